"""Scalar reference implementations of every kernel.

Plain numpy loops/ops with explicit two's-complement wrapping. Tensors are
held as int64 arrays of *unsigned* element values in [0, 2**width); helpers
convert to signed representatives where the math needs them. These are the
bit-exactness ground truth for both devices.
"""

from __future__ import annotations

import numpy as np


def wrap_u(a: np.ndarray | int, width: int) -> np.ndarray:
    """Reduce to the unsigned canonical value mod 2**width."""
    return np.asarray(a, dtype=np.int64) & ((1 << width) - 1)


def to_signed(a: np.ndarray | int, width: int) -> np.ndarray:
    a = wrap_u(a, width)
    half = 1 << (width - 1)
    return ((a + half) & ((1 << width) - 1)) - half


def ref_xor(a, b, width):
    return wrap_u(np.asarray(a) ^ np.asarray(b), width)


def ref_add(a, b, width):
    return wrap_u(np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64), width)


def ref_mul(a, b, width):
    return wrap_u(to_signed(a, width) * to_signed(b, width), width)


def ref_matmul(a, b, width):
    # int64 products can wrap mod 2**64; that stays congruent mod 2**width
    return wrap_u(to_signed(a, width) @ to_signed(b, width), width)


def ref_gemm(a, b, c, alpha: int, beta: int, width):
    prod = to_signed(a, width) @ to_signed(b, width)
    return wrap_u(alpha * prod + beta * to_signed(c, width), width)


def ref_conv2d(a, f, width):
    """Valid-region sliding dot product (no kernel flip, no padding)."""
    a_s = to_signed(a, width)
    f_s = to_signed(f, width)
    rows, cols = a_s.shape
    fr, fc = f_s.shape
    out = np.zeros((rows - fr + 1, cols - fc + 1), dtype=np.int64)
    for di in range(fr):
        for dj in range(fc):
            out += f_s[di, dj] * a_s[di : di + out.shape[0], dj : dj + out.shape[1]]
    return wrap_u(out, width)


def ref_relu(a, width):
    s = to_signed(a, width)
    return wrap_u(np.where(s >= 0, s, 0), width)


def ref_leaky_relu(a, shift: int, width):
    # negative slope is a power of two: x >> shift (arithmetic)
    s = to_signed(a, width)
    return wrap_u(np.where(s >= 0, s, s >> shift), width)


def ref_maxpool(a, window: int, stride: int, width):
    s = to_signed(a, width)
    rows, cols = s.shape
    out_r = (rows - window) // stride + 1
    out_c = (cols - window) // stride + 1
    out = np.full((out_r, out_c), np.iinfo(np.int64).min, dtype=np.int64)
    for di in range(window):
        for dj in range(window):
            out = np.maximum(out, s[di : di + out_r * stride : stride, dj : dj + out_c * stride : stride])
    return wrap_u(out, width)


def ref_autoencoder(x, weights, width):
    """Chain of matvec layers, each followed by ReLU."""
    act = np.asarray(x, dtype=np.int64).reshape(1, -1)
    for w in weights:
        act = ref_relu(ref_matmul(act, w, width), width)
    return act.reshape(-1)
