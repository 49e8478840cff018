"""Host-side fabric: mode control, DMA streaming, kernel launch protocol.

The host/DMA is the bus master; devices only ever react. Cycle accounting
splits into `kernel_cycles` (what the device spends computing, the number
quoted by every benchmark) and `host_cycles` (mode switches, data loading,
polling). Completion polling never extends kernel time: the macro keeps
running while the host reads the status register.

The CPU itself is never simulated; its published per-kernel cycle counts
ship as calibration constants with the benchmark data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .caesar.device import CaesarDevice
from .carus.device import CarusDevice
from .carus.asm import EMEM_BYTES
from .errors import DeviceRejected, ProgramTooLarge

DMA_SETUP_CYCLES = 2
POLL_INTERVAL = 8


@dataclass
class RunResult:
    kernel_cycles: int = 0
    host_cycles: int = 0
    polls: int = 0
    irq_used: bool = False
    reads: list[int] = field(default_factory=list)


def set_mode(device, imc: bool, t: int = 0) -> int:
    """Flip the memory/computing pin; one bus write, two cycles."""
    if isinstance(device, CaesarDevice):
        return device.set_mode(imc, t)
    device.imc = imc
    device.events.bus_writes += 1
    return t + 2


def dma_stream(device, entries, t: int = 0, kind: str = "commands") -> int:
    """Stream (offset, word) pairs at one write per granted cycle.

    kind="commands" requires computing mode (offload), kind="data" memory
    mode; a mismatch raises DeviceRejected before any beat is issued.
    Returns the cycle everything (including device pipeline) completed.
    """
    want_imc = kind == "commands"
    if device.imc != want_imc:
        raise DeviceRejected(
            f"{kind} stream needs {'computing' if want_imc else 'memory'} mode")
    bus_t = t + DMA_SETUP_CYCLES
    if isinstance(device, CaesarDevice):
        for off, data in entries:
            bus_t = device.write(off, data, bus_t)
        return max(bus_t, device.pipe_done)
    for addr, data in entries:
        bus_t = device.host_write(addr, data, bus_t)
    return bus_t


def load_words(device, base: int, words, t: int = 0) -> int:
    """Plain data stores in memory mode. Caesar: word offsets; Carus: bytes."""
    if device.imc:
        raise DeviceRejected("data load needs memory mode")
    if isinstance(device, CaesarDevice):
        for i, w in enumerate(words):
            t = device.write(base + i, w, t)
        return t
    for i, w in enumerate(words):
        t = device.host_write(base + 4 * i, w, t)
    return t


def read_words(device, base: int, count: int, t: int = 0) -> tuple[list[int], int]:
    out = []
    if isinstance(device, CaesarDevice):
        for i in range(count):
            v, t = device.read(base + i, t)
            out.append(v)
        return out, t
    for i in range(count):
        v, t = device.host_read(base + 4 * i, t)
        out.append(v)
    return out, t


def run_caesar_stream(device: CaesarDevice, stream, t: int = 0) -> RunResult:
    """Offload one command stream; kernel time is the dma_stream span."""
    t0 = set_mode(device, True, t)
    t1 = dma_stream(device, stream, t0)
    t2 = set_mode(device, False, t1)
    return RunResult(kernel_cycles=t1 - t0, host_cycles=(t0 - t) + (t2 - t1))


def run_carus_kernel(device: CarusDevice, image: list[int],
                     args: list[tuple[int, int]] = (), boot_pc: int = 0,
                     use_irq: bool = False, host_ops: list[tuple[int, int]] = (),
                     t: int = 0) -> RunResult:
    """Full launch protocol: load image + args, start, wait, acknowledge.

    `args` are (byte_addr, word) pairs dropped into the 512 B memory after
    the code. `host_ops` models memory-mode traffic the host issues while
    the kernel runs (double buffering): each access steals one device cycle.
    Polling (every 8 cycles) is host work and never counts against the
    kernel. The device is left in memory mode.
    """
    if len(image) * 4 > EMEM_BYTES:
        raise ProgramTooLarge(
            f"{len(image) * 4} B image exceeds the {EMEM_BYTES} B memory")
    host = 0
    tt = set_mode(device, True, t)
    host += tt - t
    t = tt
    for i, w in enumerate(image):
        t = device.host_write(4 * i, w, t)
        host += 1
    for addr, w in args:
        t = device.host_write(addr, w, t)
        host += 1
    t = device.host_write(0x8004, boot_pc, t)
    host += 1

    ctrl = 0x1 | (0x4 if use_irq else 0)
    t_done = device.host_write(0x8000, ctrl, t)  # runs the kernel synchronously
    host += 1  # the start write itself
    kernel = device.last_run.cycles

    if host_ops:
        # host flips to memory mode mid-run; each beat steals a device cycle
        for addr, w in host_ops:
            device.vrf.write_word(addr, w)
            device.events.bus_writes += 1
        device.steal_cycles(len(host_ops))
        kernel += len(host_ops)
        t_done += len(host_ops)
        host += 2 + 2  # the two extra mode flips around the burst

    polls = 0
    if not use_irq:
        polls = max(1, -(-kernel // POLL_INTERVAL))
    # final status read acknowledges done
    status, t_ack = device.host_read(0x8000, t_done)
    assert status & 0x2, "kernel signalled no completion"
    host += polls + 1
    t = set_mode(device, False, t_ack)
    host += 2
    return RunResult(kernel_cycles=kernel, host_cycles=host, polls=polls,
                     irq_used=use_irq)


# --- declarative scenarios --------------------------------------------------


def make_device(name: str, preset: str = "table-v"):
    if name == "caesar":
        return CaesarDevice()
    if name == "carus":
        return CarusDevice(preset=preset)
    raise ValueError(f"unknown device {name!r}")


def run_scenario(scn: dict) -> dict:
    """Execute a declarative scenario dict (see docs/formats.md)."""
    device = make_device(scn["device"], scn.get("preset", "table-v"))
    t = 0
    kernel_cycles = 0
    reads: dict[str, list[int]] = {}
    for i, step in enumerate(scn.get("steps", [])):
        op = step["op"]
        if op == "set_mode":
            t = set_mode(device, bool(step["imc"]), t)
        elif op == "write_words":
            t = load_words(device, step["base"], step["data"], t)
        elif op == "stream":
            entries = [tuple(e) for e in step["entries"]]
            t1 = dma_stream(device, entries, t)
            kernel_cycles += t1 - t
            t = t1
        elif op == "run_kernel":
            res = run_carus_kernel(
                device, step["image"],
                [tuple(a) for a in step.get("args", [])],
                boot_pc=step.get("boot_pc", 0),
                use_irq=bool(step.get("irq", False)), t=t)
            kernel_cycles += res.kernel_cycles
            t += res.kernel_cycles + res.host_cycles
        elif op == "read_words":
            vals, t = read_words(device, step["base"], step["count"], t)
            reads[str(i)] = vals
            if "expect" in step and list(step["expect"]) != vals:
                raise AssertionError(f"step {i}: read {vals}, expected {step['expect']}")
        else:
            raise ValueError(f"unknown scenario op {op!r}")
    return {
        "cycles": t,
        "kernel_cycles": kernel_cycles,
        "reads": reads,
        "events": device.events.as_dict(),
    }
