"""Packing between unsigned element tensors and little-endian 32-bit words."""

from __future__ import annotations

import numpy as np

_DTYPE = {8: "<u1", 16: "<u2", 32: "<u4"}


def words_per_row(elems: int, width: int) -> int:
    return (elems * (width // 8) + 3) // 4


def pack_elems(arr, width: int) -> list[int]:
    """Flatten to unsigned words, zero-padding the tail to a word boundary."""
    flat = np.asarray(arr, dtype=np.int64).reshape(-1)
    raw = (flat & ((1 << width) - 1)).astype(_DTYPE[width]).tobytes()
    raw += b"\x00" * (-len(raw) % 4)
    return [int(w) for w in np.frombuffer(raw, dtype="<u4")]

def unpack_elems(words, count: int, width: int) -> np.ndarray:
    """Inverse of pack_elems: first `count` unsigned elements."""
    raw = np.asarray(list(words), dtype=np.uint32).astype("<u4").tobytes()
    flat = np.frombuffer(raw, dtype=_DTYPE[width]).astype(np.int64)
    return flat[:count].copy()


def pack_rows(mat, width: int) -> tuple[list[int], int]:
    """Pack a 2-D tensor row by row, each row word-aligned.

    Returns (words, row_stride_words).
    """
    mat = np.asarray(mat, dtype=np.int64)
    stride = words_per_row(mat.shape[1], width)
    out: list[int] = []
    for row in mat:
        w = pack_elems(row, width)
        out.extend(w + [0] * (stride - len(w)))
    return out, stride


def splat_word(value: int, width: int) -> int:
    """One element replicated across every lane of a word."""
    v = int(value) & ((1 << width) - 1)
    word = 0
    for i in range(32 // width):
        word |= v << (i * width)
    return word
