"""Kernel library: specs, reference results, device code generators.

A KernelSpec names the computation only; per-device layout and code live in
caesar_gen/carus_gen. Shapes:

    xor/add/mul/relu/leaky_relu : (n,)            flat element count
    matmul/gemm                 : (m, k, p)       A[m,k] x B[k,p]
    conv2d                      : (rows, cols, f) valid-region, square filter
    maxpool                     : (rows, cols)    window/stride in params
    autoencoder                 : (n0, ..., nL)   matvec+ReLU chain
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import oracle
from ..errors import ShapeMismatch

KERNELS = ("xor", "add", "mul", "matmul", "gemm", "conv2d",
           "relu", "leaky_relu", "maxpool", "autoencoder")

ELEMENTWISE = ("xor", "add", "mul")


@dataclass(frozen=True)
class KernelSpec:
    name: str
    width: int
    shape: tuple[int, ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in KERNELS:
            raise ShapeMismatch(f"unknown kernel {self.name!r}")
        if self.width not in (8, 16, 32):
            raise ShapeMismatch(f"unsupported element width {self.width}")
        _validate_shape(self)

    @property
    def esize(self) -> int:
        return self.width // 8


@dataclass
class DeviceRun:
    """What one offloaded kernel execution produced and what it cost.

    kernel_cycles covers device time only (command-stream spans or the
    launch-to-done window); host_cycles is bus traffic and host-side work.
    """
    output: np.ndarray
    kernel_cycles: int
    host_cycles: int
    streams: int = 1
    commands: int = 0
    notes: dict = field(default_factory=dict)


def _validate_shape(spec: KernelSpec) -> None:
    s = spec.shape
    name = spec.name
    if name in ELEMENTWISE or name in ("relu", "leaky_relu"):
        if len(s) != 1 or s[0] < 1:
            raise ShapeMismatch(f"{name} expects (n,), got {s}")
        if name == "leaky_relu":
            sh = spec.params.get("shift", 1)
            if not 1 <= sh < spec.width:
                raise ShapeMismatch(f"shift {sh} invalid for width {spec.width}")
    elif name in ("matmul", "gemm"):
        if len(s) != 3 or min(s) < 1:
            raise ShapeMismatch(f"{name} expects (m, k, p), got {s}")
    elif name == "conv2d":
        if len(s) != 3:
            raise ShapeMismatch(f"conv2d expects (rows, cols, f), got {s}")
        r, c, f = s
        if f < 2 or r < f or c < f:
            raise ShapeMismatch(f"bad conv2d shape {s}")
    elif name == "maxpool":
        if len(s) != 2:
            raise ShapeMismatch(f"maxpool expects (rows, cols), got {s}")
        w = spec.params.get("window", 2)
        st = spec.params.get("stride", 2)
        if (w, st) != (2, 2):
            raise ShapeMismatch("only 2x2 window with stride 2 is supported")
        if s[0] % 2 or s[1] % 2 or min(s) < 2:
            raise ShapeMismatch(f"maxpool needs even dims, got {s}")
    elif name == "autoencoder":
        if len(s) < 2 or min(s) < 1:
            raise ShapeMismatch(f"autoencoder expects layer dims, got {s}")


def random_inputs(spec: KernelSpec, seed: int) -> dict[str, np.ndarray]:
    """Full-range unsigned tensors for one run, deterministic in seed."""
    rng = np.random.default_rng(seed)
    hi = 1 << spec.width

    def tensor(*dims):
        return rng.integers(0, hi, size=dims, dtype=np.int64)

    s = spec.shape
    if spec.name in ELEMENTWISE:
        return {"a": tensor(s[0]), "b": tensor(s[0])}
    if spec.name in ("relu", "leaky_relu"):
        return {"a": tensor(s[0])}
    if spec.name == "matmul":
        m, k, p = s
        return {"a": tensor(m, k), "b": tensor(k, p)}
    if spec.name == "gemm":
        m, k, p = s
        return {"a": tensor(m, k), "b": tensor(k, p), "c": tensor(m, p)}
    if spec.name == "conv2d":
        r, c, f = s
        return {"a": tensor(r, c), "f": tensor(f, f)}
    if spec.name == "maxpool":
        return {"a": tensor(*s)}
    # autoencoder
    out = {"x": tensor(s[0])}
    for i in range(len(s) - 1):
        out[f"w{i}"] = tensor(s[i], s[i + 1])
    return out


def reference(spec: KernelSpec, inputs: dict) -> np.ndarray:
    """Scalar-oracle result for the kernel (flattened row-major)."""
    w = spec.width
    n = spec.name
    if n == "xor":
        return oracle.ref_xor(inputs["a"], inputs["b"], w)
    if n == "add":
        return oracle.ref_add(inputs["a"], inputs["b"], w)
    if n == "mul":
        return oracle.ref_mul(inputs["a"], inputs["b"], w)
    if n == "matmul":
        return oracle.ref_matmul(inputs["a"], inputs["b"], w).reshape(-1)
    if n == "gemm":
        return oracle.ref_gemm(inputs["a"], inputs["b"], inputs["c"],
                               spec.params.get("alpha", 1),
                               spec.params.get("beta", 1), w).reshape(-1)
    if n == "conv2d":
        return oracle.ref_conv2d(inputs["a"], inputs["f"], w).reshape(-1)
    if n == "relu":
        return oracle.ref_relu(inputs["a"], w)
    if n == "leaky_relu":
        return oracle.ref_leaky_relu(inputs["a"], spec.params.get("shift", 1), w)
    if n == "maxpool":
        return oracle.ref_maxpool(inputs["a"], spec.params.get("window", 2),
                                  spec.params.get("stride", 2), w).reshape(-1)
    weights = [inputs[f"w{i}"] for i in range(len(spec.shape) - 1)]
    return oracle.ref_autoencoder(inputs["x"], weights, w)


def output_count(spec: KernelSpec) -> int:
    s = spec.shape
    n = spec.name
    if n in ELEMENTWISE or n in ("relu", "leaky_relu"):
        return s[0]
    if n in ("matmul", "gemm"):
        return s[0] * s[2]
    if n == "conv2d":
        r, c, f = s
        return (r - f + 1) * (c - f + 1)
    if n == "maxpool":
        return (s[0] // 2) * (s[1] // 2)
    return s[-1]


def random_spec(name: str, width: int, seed: int) -> KernelSpec:
    """A random shape that fits both devices (see layout docs for bounds)."""
    rng = np.random.default_rng(seed)
    vlmax = 1024 // (width // 8)

    def ri(lo, hi):
        return int(rng.integers(lo, hi + 1))

    if name in ELEMENTWISE or name in ("relu", "leaky_relu"):
        params = {}
        if name == "leaky_relu":
            params = {"shift": ri(1, min(7, width - 1))}
        return KernelSpec(name, width, (ri(1, 1024),), params)
    if name in ("matmul", "gemm"):
        m, k = ri(1, 8), ri(1, 10)
        while m * k > vlmax:  # A must sit in one vector register
            m, k = ri(1, 8), ri(1, 10)
        # beyond VLMAX at 32-bit on purpose: exercises strip-mining; gemm
        # keeps p smaller so B, the addend and the result all fit at once
        p = ri(1, 192) if name == "gemm" else ri(1, 320)
        params = {"alpha": ri(-4, 4), "beta": ri(-4, 4)} if name == "gemm" else {}
        return KernelSpec(name, width, (m, k, p), params)
    if name == "conv2d":
        f = ri(2, 4)
        rows = ri(f, 8)
        cols = ri(f, 64)
        return KernelSpec(name, width, (rows, cols, f))
    if name == "maxpool":
        return KernelSpec(name, width, (2 * ri(1, 4), 2 * ri(1, 32)),
                          {"window": 2, "stride": 2})
    layers = ri(2, 4)
    dims = tuple(ri(1, 24) for _ in range(layers + 1))
    return KernelSpec(name, width, dims)
