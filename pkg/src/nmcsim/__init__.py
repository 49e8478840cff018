"""Bit-exact behavioral and cycle models of two near-memory compute macros.

The hosted packed-SIMD macro (`nmcsim.caesar`) executes command streams a
host writes over the bus; the autonomous vector macro (`nmcsim.carus`) runs
self-contained RV32E + vector kernels out of its register file. `fabric`
models the shared bus protocol, `kernels` generates device code for the
standard kernel set and checks it against `oracle`, and `bench` reproduces
the published operating points.
"""

from . import bench, caesar, carus, errors, events, fabric, kernels, oracle, simd
from .errors import (AddressOutOfRange, DeviceRejected, DoesNotFit,
                     IllegalOpcode, ProgramTooLarge, ShapeMismatch)
from .fabric import make_device, run_scenario
from .kernels import DeviceRun, KernelSpec, random_inputs, reference
from .kernels.runner import run_on, verify

__version__ = "0.1.0"

__all__ = [
    "AddressOutOfRange", "DeviceRejected", "DeviceRun", "DoesNotFit",
    "IllegalOpcode", "KernelSpec", "ProgramTooLarge", "ShapeMismatch",
    "__version__", "bench", "caesar", "carus", "errors", "events", "fabric",
    "kernels", "make_device", "oracle", "random_inputs", "reference",
    "run_on", "run_scenario", "simd", "verify",
]
