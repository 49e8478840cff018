"""Packed-word primitive checks: frozen examples plus scalar equivalence."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nmcsim import oracle, simd

WORDS = st.integers(0, 0xFFFFFFFF)
WIDTH = st.sampled_from((8, 16, 32))


def test_add_w8_frozen():
    # 01+01, FF+01, 7F+01, 80+01 bytewise
    assert simd.packed_binop("add", 0x01FF7F80, 0x01010101, 8) == 0x02008081


def test_min_w16_signed():
    # 0x807F is negative at W16, 0x7F80 positive: signed min keeps 0x807F
    assert simd.packed_binop("min", 0x0000807F, 0x00007F80, 16) == 0x0000807F


def test_mac_w32_signed_product():
    assert simd.packed_mac([5, 0, 0, 0], 0xFFFFFFFF, 2, 32) == [3, 0, 0, 0]


def test_mac_w16_two_lanes():
    assert simd.packed_mac([0, 0, 0, 0], 0x00020003, 0x00040005, 16) \
        == [15, 8, 0, 0]


def test_dot_w8_cancels():
    # lanes (+1, -1, +1, -1) dotted with ones
    assert simd.packed_dot(0, 0xFF01FF01, 0x01010101, 8) == 0


def test_mul_w32_truncates_like_unsigned():
    a, b = 0xFFFFFFFE, 7  # -2 * 7 = -14
    assert simd.packed_binop("mul", a, b, 32) == (-14) & 0xFFFFFFFF


def test_lanes_and_bad_width():
    assert [simd.lanes(w) for w in (8, 16, 32)] == [4, 2, 1]
    with pytest.raises(ValueError):
        simd.lanes(12)


def test_unknown_op_rejected():
    with pytest.raises(ValueError):
        simd.packed_binop("rol", 1, 2, 8)


@given(WORDS, WIDTH)
def test_split_join_roundtrip(word, width):
    assert simd.join_word(simd.split_word(word, width), width) == word


_REF = {
    "add": oracle.ref_add, "xor": oracle.ref_xor, "mul": oracle.ref_mul,
}


@given(WORDS, WORDS, WIDTH, st.sampled_from(sorted(_REF)))
def test_packed_matches_scalar_oracle(a, b, width, op):
    lanes_a = np.array(simd.split_word(a, width))
    lanes_b = np.array(simd.split_word(b, width))
    want = list(_REF[op](lanes_a, lanes_b, width))
    got = simd.split_word(simd.packed_binop(op, a, b, width), width)
    assert got == want


@given(WORDS, WORDS, WIDTH)
def test_min_max_order(a, b, width):
    lo = simd.split_word(simd.packed_binop("min", a, b, width), width)
    hi = simd.split_word(simd.packed_binop("max", a, b, width), width)
    for x, y, m, M in zip(simd.split_word(a, width), simd.split_word(b, width),
                          lo, hi):
        assert {m, M} == {x, y} or (x == y == m == M)
        assert simd.sext(m, width) <= simd.sext(M, width)


@given(WORDS, st.integers(0, 31), WIDTH)
def test_srl_of_sll_masks_high_bits(word, sh, width):
    # left-then-right logical shifting clears exactly the shifted-out bits
    s = sh & (width - 1)
    shifted = simd.packed_binop("sll", word, simd.join_word(
        [s] * simd.lanes(width), width), width)
    back = simd.packed_binop("srl", shifted, simd.join_word(
        [s] * simd.lanes(width), width), width)
    mask = ((1 << (width - s)) - 1)
    assert simd.split_word(back, width) == \
        [v & mask for v in simd.split_word(word, width)]


@given(WORDS, WORDS, WIDTH)
def test_dot_equals_summed_macs(a, b, width):
    acc = simd.packed_mac([0, 0, 0, 0], a, b, width)
    total = sum(simd.sext(x, 32) for x in acc[: simd.lanes(width)])
    assert simd.packed_dot(0, a, b, width) == total & 0xFFFFFFFF


def test_byte_corner_exhaustive_w8():
    corners = (0x00, 0x7F, 0x80, 0xFF)
    for x in corners:
        for y in corners:
            a = simd.join_word([x] * 4, 8)
            b = simd.join_word([y] * 4, 8)
            for op, ref in _REF.items():
                got = simd.split_word(simd.packed_binop(op, a, b, 8), 8)
                want = list(ref(np.array([x] * 4), np.array([y] * 4), 8))
                assert got == want, (op, x, y)


def test_pack_acc_truncates():
    assert simd.pack_acc([0x1FF, 0x201, 0x303, 0x404], 8) == 0x040301FF
    assert simd.pack_acc([0x12345, 0x2, 0, 0], 16) == 0x00022345
