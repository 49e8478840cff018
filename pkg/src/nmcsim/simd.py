"""Packed-SIMD word primitives shared by both device models.

A data word is 32 bits and holds 4/2/1 elements of 8/16/32 bits. Lane 0 is the
least significant chunk (little-endian element order, matching byte order in
memory). All arithmetic is two's-complement with silent wraparound.
"""

from __future__ import annotations

MASK32 = 0xFFFFFFFF

# element widths in bits; lane counts are 32 // width
WIDTHS = (8, 16, 32)

BINOPS = frozenset(
    "add sub mul and or xor min max minu maxu sll srl sra".split()
)


def lanes(width: int) -> int:
    if width not in WIDTHS:
        raise ValueError(f"bad element width {width}")
    return 32 // width


def sext(value: int, bits: int) -> int:
    """Interpret the low `bits` of value as a signed integer."""
    value &= (1 << bits) - 1
    if value & (1 << (bits - 1)):
        value -= 1 << bits
    return value


def split_word(word: int, width: int) -> list[int]:
    """Unsigned lane values, lane 0 first."""
    mask = (1 << width) - 1
    return [(word >> (i * width)) & mask for i in range(lanes(width))]


def join_word(vals: list[int], width: int) -> int:
    mask = (1 << width) - 1
    word = 0
    for i, v in enumerate(vals):
        word |= (v & mask) << (i * width)
    return word


def _lane_op(op: str, x: int, y: int, width: int) -> int:
    # x, y unsigned lane values; result unsigned, masked to width
    mask = (1 << width) - 1
    if op == "add":
        return (x + y) & mask
    if op == "sub":
        return (x - y) & mask
    if op == "mul":
        # low half of the signed product == low half of the unsigned one
        return (x * y) & mask
    if op == "and":
        return x & y
    if op == "or":
        return x | y
    if op == "xor":
        return x ^ y
    if op == "min":
        return x if sext(x, width) <= sext(y, width) else y
    if op == "max":
        return x if sext(x, width) >= sext(y, width) else y
    if op == "minu":
        return min(x, y)
    if op == "maxu":
        return max(x, y)
    # shift amount: low log2(width) bits of each src2 element
    sh = y & (width - 1)
    if op == "sll":
        return (x << sh) & mask
    if op == "srl":
        return x >> sh
    if op == "sra":
        return (sext(x, width) >> sh) & mask
    raise ValueError(f"unknown packed op {op!r}")


def packed_binop(op: str, a: int, b: int, width: int) -> int:
    """Lanewise `op` over two packed words, returning the packed result."""
    if op not in BINOPS:
        raise ValueError(f"unknown packed op {op!r}")
    mask = (1 << width) - 1
    n = lanes(width)
    out = 0
    for i in range(n):
        sh = i * width
        out |= _lane_op(op, (a >> sh) & mask, (b >> sh) & mask, width) << sh
    return out


def packed_mac(acc: list[int], a: int, b: int, width: int) -> list[int]:
    """acc[i] += a_i * b_i (signed, 32-bit wrap) for each live lane.

    `acc` is the 4-deep 32-bit accumulator bank; lanes beyond the current
    element count are preserved untouched. Returns a new list.
    """
    out = list(acc)
    mask = (1 << width) - 1
    for i in range(lanes(width)):
        sh = i * width
        prod = sext((a >> sh) & mask, width) * sext((b >> sh) & mask, width)
        out[i] = (out[i] + prod) & MASK32
    return out


def packed_dot(acc: int, a: int, b: int, width: int) -> int:
    """acc += sum of lanewise signed products, one 32-bit wrapping scalar."""
    mask = (1 << width) - 1
    total = 0
    for i in range(lanes(width)):
        sh = i * width
        total += sext((a >> sh) & mask, width) * sext((b >> sh) & mask, width)
    return (acc + total) & MASK32


def pack_acc(acc: list[int], width: int) -> int:
    """Truncate each live lane accumulator to `width` bits and pack them."""
    return join_word(acc[: lanes(width)], width)
