"""Canned benchmark suites at the published operating points.

Suites:
    headline     matmul cycle counts, peak MAC/GOPS identities, and the
                 cycles/output listing the golden tables cover (default)
    sweep        matmul A[8,8]xB[8,p] column sweep on both devices
    kernels      every kernel x width x device at the standard shapes,
                 correctness-checked against the scalar oracle
    autoencoder  ten-layer matvec+ReLU chain demo
    all          everything above in one report

Shapes follow the standard operating points: elementwise/activation kernels
size their inputs to the device budget (8 KiB on the hosted macro, 10-16 KiB
on the autonomous one), matrix kernels use A[8,8] with the column count
scaled by width, and the headline matmul points use A[10,10].
"""

from __future__ import annotations

from .. import fabric
from ..kernels import KernelSpec, output_count, random_inputs, reference
from ..kernels.runner import run_on, verify
from . import report as rep

CLOCK_HZ = 330e6
OPS_PER_MAC = 2

AE_DIMS = (32, 16, 16, 16, 16, 8, 16, 16, 16, 16, 32)

# headline matmul operating points: (width, shape) per device
MATMUL_POINTS = {
    "carus": [(8, (10, 10, 1024)), (16, (10, 10, 512)), (32, (10, 10, 256))],
    "caesar": [(8, (10, 10, 1024)), (16, (10, 10, 512)), (32, (10, 10, 256))],
}

SWEEP_COLUMNS = (16, 32, 64, 128, 256, 512, 1024)


def standard_spec(device: str, kernel: str, width: int) -> KernelSpec:
    """The per-device standard shape for one kernel at one width."""
    esize = width // 8
    if device == "caesar":
        n_elem = 8192 // esize          # 8 KiB input budget
        n_act = 8192 // esize
        mat_p = {8: 512, 16: 256, 32: 128}[width]
        conv = {8: (8, 128, 4), 16: (8, 64, 4), 32: (8, 64, 3)}[width]
        pool = (16, 512 // esize)
    else:
        n_elem = 10240 // esize         # 10 KiB input budget
        n_act = 16384 // esize
        mat_p = {8: 1024, 16: 512, 32: 256}[width]
        conv = (8, 1024 // esize, 3)
        pool = (16, 1024 // esize)
    if kernel in ("xor", "add", "mul"):
        return KernelSpec(kernel, width, (n_elem,))
    if kernel == "relu":
        return KernelSpec(kernel, width, (n_act,))
    if kernel == "leaky_relu":
        return KernelSpec(kernel, width, (n_act,), {"shift": 2})
    if kernel == "matmul":
        return KernelSpec(kernel, width, (8, 8, mat_p))
    if kernel == "gemm":
        return KernelSpec(kernel, width, (8, 8, mat_p), {"alpha": 3, "beta": -2})
    if kernel == "conv2d":
        return KernelSpec(kernel, width, conv)
    if kernel == "maxpool":
        return KernelSpec(kernel, width, pool, {"window": 2, "stride": 2})
    return KernelSpec("autoencoder", width, AE_DIMS)


def _measure(device: str, spec: KernelSpec, seed: int, preset: str):
    dev = fabric.make_device(device, preset)
    inputs = random_inputs(spec, seed)
    run = run_on(device, spec, inputs, preset=preset, device=dev)
    ok = verify(spec, run.output, reference(spec, inputs)).ok
    return run, ok, dev.events.as_dict()


def _kernel_entry(device: str, spec: KernelSpec, seed: int, preset: str,
                  metric: str = "cycles_per_output") -> dict:
    run, ok, events = _measure(device, spec, seed, preset)
    outs = output_count(spec)
    value = run.kernel_cycles / outs if metric == "cycles_per_output" \
        else run.kernel_cycles
    unit = "cycles/output" if metric == "cycles_per_output" else "cycles"
    shape_tag = "x".join(str(d) for d in spec.shape)
    eid = f"{device}-{spec.name}-w{spec.width}-{shape_tag}"
    if metric == "cycles_per_output":
        eid = f"{device}-{spec.name}-w{spec.width}-cpo"
    return rep.entry(eid, device, spec.name, spec.width, spec.shape, metric,
                     value, unit, cycles_total=run.kernel_cycles, outputs=outs,
                     host_cycles=run.host_cycles, ok=ok, events=events)


def matmul_cycles_entries(seed: int, preset: str) -> list[dict]:
    out = []
    for device, points in MATMUL_POINTS.items():
        for width, shape in points:
            spec = KernelSpec("matmul", width, shape)
            out.append(_kernel_entry(device, spec, seed, preset,
                                     metric="cycles_total"))
    return out


def peak_entries(seed: int, preset: str) -> list[dict]:
    """Steady-state MAC throughput from the marginal cost of extra columns.

    Two matmul runs that differ only in column count isolate the inner MAC
    stream: fixed costs cancel in the cycle difference, so the quotient is
    the exact sustained MAC rate. GOPS counts a MAC as two operations.
    """
    out = []
    for device in ("caesar", "carus"):
        runs = {}
        for p in (512, 1024):
            spec = KernelSpec("matmul", 8, (8, 8, p))
            run, ok, _ = _measure(device, spec, seed, preset)
            assert ok, f"{device} matmul failed verification"
            runs[p] = run.kernel_cycles
        macs = 8 * 8 * (1024 - 512)
        rate = macs / (runs[1024] - runs[512])
        gops = rate * OPS_PER_MAC * CLOCK_HZ / 1e9
        out.append(rep.entry(f"{device}-peak-macs-w8", device, "matmul", 8,
                             (8, 8, 1024), "macs_per_cycle", rate, "MAC/cycle"))
        out.append(rep.entry(f"{device}-peak-gops-w8", device, "matmul", 8,
                             (8, 8, 1024), "gops", gops, "GOPS"))
    return out


def ratio_entries(seed: int, preset: str, widths=(8,)) -> list[dict]:
    """cycles/output for every kernel at its standard operating point."""
    out = []
    for device in ("caesar", "carus"):
        for width in widths:
            for kernel in ("xor", "add", "mul", "relu", "leaky_relu",
                           "matmul", "gemm", "conv2d", "maxpool",
                           "autoencoder"):
                spec = standard_spec(device, kernel, width)
                out.append(_kernel_entry(device, spec, seed, preset))
    return out


def sweep_entries(seed: int, preset: str) -> list[dict]:
    out = []
    for device in ("caesar", "carus"):
        for p in SWEEP_COLUMNS:
            spec = KernelSpec("matmul", 8, (8, 8, p))
            e = _kernel_entry(device, spec, seed, preset)
            e["id"] = f"{device}-matmul-w8-sweep-p{p}"
            out.append(e)
    return out


def autoencoder_entries(seed: int, preset: str) -> list[dict]:
    out = []
    for device in ("caesar", "carus"):
        spec = KernelSpec("autoencoder", 8, AE_DIMS)
        out.append(_kernel_entry(device, spec, seed, preset,
                                 metric="cycles_total"))
    return out


def kernels_entries(seed: int, preset: str) -> list[dict]:
    return ratio_entries(seed, preset, widths=(8, 16, 32))


SUITES = {
    "headline": lambda seed, preset: (matmul_cycles_entries(seed, preset)
                                      + peak_entries(seed, preset)
                                      + ratio_entries(seed, preset)),
    "sweep": sweep_entries,
    "kernels": kernels_entries,
    "autoencoder": autoencoder_entries,
}
SUITES["all"] = lambda seed, preset: [
    e for name in ("headline", "sweep", "kernels", "autoencoder")
    for e in SUITES[name](seed, preset)]


def run_suite(name: str, preset: str = "table-v", seed: int = 0) -> dict:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r} (have {sorted(SUITES)})")
    report = rep.new_report(name, preset, seed)
    seen = set()
    for e in SUITES[name](seed, preset):
        if e["id"] in seen:
            continue
        seen.add(e["id"])
        report["entries"].append(e)
    return report
