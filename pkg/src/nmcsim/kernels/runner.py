"""Run a kernel on either device and check it against the scalar reference."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatch
from . import DeviceRun, KernelSpec, output_count, random_inputs, reference


@dataclass
class VerifyResult:
    ok: bool
    checked: int
    first_mismatch: int | None = None
    got: int | None = None
    want: int | None = None

    def __str__(self):
        if self.ok:
            return f"pass ({self.checked} elements)"
        return (f"fail at element {self.first_mismatch}: "
                f"device={self.got} reference={self.want}")


def verify(spec: KernelSpec, device_result, oracle_result) -> VerifyResult:
    """Element-exact comparison; raises ShapeMismatch before comparing."""
    dev = np.asarray(device_result, dtype=np.int64).reshape(-1)
    ref = np.asarray(oracle_result, dtype=np.int64).reshape(-1)
    want = output_count(spec)
    if dev.size != want or ref.size != want:
        raise ShapeMismatch(
            f"{spec.name}{spec.shape}: expected {want} outputs, "
            f"device produced {dev.size}, reference {ref.size}")
    hi = 1 << spec.width
    if ((dev < 0) | (dev >= hi)).any() or ((ref < 0) | (ref >= hi)).any():
        raise ShapeMismatch(f"values outside the {spec.width}-bit range")
    bad = np.nonzero(dev != ref)[0]
    if bad.size:
        i = int(bad[0])
        return VerifyResult(False, want, i, int(dev[i]), int(ref[i]))
    return VerifyResult(True, want)


def run_on(device_name: str, spec: KernelSpec, inputs,
           preset: str = "table-v", device=None) -> DeviceRun:
    if device_name == "caesar":
        from . import caesar_gen
        return caesar_gen.run(spec, inputs, device=device)
    if device_name == "carus":
        from . import carus_gen
        return carus_gen.run(spec, inputs, device=device, preset=preset)
    raise ValueError(f"unknown device {device_name!r}")


def check_random(device_name: str, name: str, width: int, seed: int,
                 preset: str = "table-v"):
    """One randomized correctness trial; returns (spec, run, verify result)."""
    from . import random_spec
    spec = random_spec(name, width, seed)
    inputs = random_inputs(spec, seed + 1)
    run = run_on(device_name, spec, inputs, preset=preset)
    res = verify(spec, run.output, reference(spec, inputs))
    return spec, run, res
