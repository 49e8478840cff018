"""Command-line interface: assemble, run, benchmark, compare.

Exit codes: 0 success, 1 result mismatch, 2 usage error (argparse default).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench, fabric
from .bench import report as rep
from .caesar import asm as caesar_asm
from .carus import asm as carus_asm
from .kernels import KernelSpec, output_count, random_inputs, reference
from .kernels.runner import run_on, verify


def _parse_shape(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shape {text!r}")


def cmd_asm_caesar(args) -> int:
    stream = caesar_asm.assemble(Path(args.source).read_text())
    caesar_asm.save_stream(stream, args.output)
    print(f"{len(stream)} commands -> {args.output}")
    return 0


def cmd_asm_xvnmc(args) -> int:
    words = carus_asm.assemble(Path(args.source).read_text())
    carus_asm.save_image(words, args.output)
    print(f"{len(words)} words ({4 * len(words)} B) -> {args.output}")
    return 0


def cmd_disasm_xvnmc(args) -> int:
    text = carus_asm.disassemble(carus_asm.load_image(args.image))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_run(args) -> int:
    spec = KernelSpec(args.kernel, args.width, _parse_shape(args.shape),
                      _run_params(args))
    device = fabric.make_device(args.device, args.timing_preset)
    inputs = random_inputs(spec, args.seed)
    run = run_on(args.device, spec, inputs, preset=args.timing_preset,
                 device=device)
    res = verify(spec, run.output, reference(spec, inputs))
    outs = output_count(spec)
    entry = rep.entry(
        f"{args.device}-{spec.name}-w{spec.width}", args.device, spec.name,
        spec.width, spec.shape, "cycles_total", run.kernel_cycles, "cycles",
        cycles_total=run.kernel_cycles, outputs=outs,
        host_cycles=run.host_cycles, ok=res.ok,
        events=device.events.as_dict())
    print(f"{args.device} {spec.name} w{spec.width} shape="
          f"{'x'.join(str(d) for d in spec.shape)}: "
          f"cycles={run.kernel_cycles} cycles/output="
          f"{run.kernel_cycles / outs:.4f} host={run.host_cycles} "
          f"verify={res}")
    if args.events:
        print(json.dumps(entry["events"], indent=2))
    if args.json:
        report = rep.new_report("run", args.timing_preset, args.seed)
        report["entries"].append(entry)
        rep.write_json(report, args.json)
    return 0 if res.ok else 1


def _run_params(args) -> dict:
    params = {}
    if args.kernel == "leaky_relu":
        params["shift"] = args.shift
    if args.kernel == "gemm":
        params["alpha"], params["beta"] = args.alpha, args.beta
    return params


def cmd_bench(args) -> int:
    report = bench.run_suite(args.suite, args.timing_preset, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rep.write_json(report, out / f"{args.suite}.json")
    rep.write_csv(report, out / f"{args.suite}.csv")
    bad = [e for e in report["entries"] if not e["ok"]]
    print(f"suite {args.suite}: {len(report['entries'])} entries, "
          f"{len(bad)} failed verification -> {out}/{args.suite}.json|csv")
    return 1 if bad else 0


def cmd_compare(args) -> int:
    report = rep.load_report(args.report)
    failures = 0
    for name in args.golden:
        golden = rep.load_golden(name)
        for row in rep.compare(report, golden, args.tol):
            mark = "pass" if row["ok"] else "FAIL"
            failures += not row["ok"]
            if row["delta"] is None:
                print(f"{mark} {row['id']}: missing from report "
                      f"(want {row['golden']})")
            else:
                print(f"{mark} {row['id']}: {row['value']:g} vs "
                      f"{row['golden']:g} ({100 * row['delta']:+.2f}%, "
                      f"tol {100 * row['tol']:.0f}%)")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nmcsim", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("asm-caesar", help="assemble a command-stream listing")
    p.add_argument("source")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_asm_caesar)

    p = sub.add_parser("asm-xvnmc", help="assemble a vector kernel image")
    p.add_argument("source")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_asm_xvnmc)

    p = sub.add_parser("disasm-xvnmc", help="disassemble a kernel image")
    p.add_argument("image")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_disasm_xvnmc)

    p = sub.add_parser("run", help="run one kernel and verify it")
    p.add_argument("--device", required=True, choices=("caesar", "carus"))
    p.add_argument("--kernel", required=True)
    p.add_argument("--width", type=int, default=8, choices=(8, 16, 32))
    p.add_argument("--shape", required=True,
                   help="comma-separated dims, e.g. 10,10,1024")
    p.add_argument("--timing-preset", default="table-v",
                   choices=("table-v", "text-0.33"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shift", type=int, default=2,
                   help="leaky_relu slope shift")
    p.add_argument("--alpha", type=int, default=1, help="gemm alpha")
    p.add_argument("--beta", type=int, default=1, help="gemm beta")
    p.add_argument("--events", action="store_true",
                   help="print event counters")
    p.add_argument("--json", help="write a single-entry report here")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--suite", default="headline", choices=sorted(bench.SUITES))
    p.add_argument("--out", default="bench-out")
    p.add_argument("--timing-preset", default="table-v",
                   choices=("table-v", "text-0.33"))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("compare", help="check a report against golden tables")
    p.add_argument("report")
    p.add_argument("--golden", action="append", required=True,
                   help="golden table name or path (repeatable)")
    p.add_argument("--tol", type=float, default=None,
                   help="override the per-entry tolerances")
    p.set_defaults(fn=cmd_compare)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
