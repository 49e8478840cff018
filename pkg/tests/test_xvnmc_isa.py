"""Vector-extension encode/decode, collision freedom, indirect resolution."""

import pytest
from hypothesis import given, settings, strategies as st

from nmcsim.carus import isa
from nmcsim.carus.isa import (Rv32Instr, VARIANTS, VsetInstr, XvnmcInstr,
                              decode, encode_vector, encode_vsetivli,
                              encode_vsetvl, encode_vsetvli, resolve_indirect)
from nmcsim.errors import IllegalInstruction


def test_worked_example_encode():
    ins = XvnmcInstr("vadd", "vv", vd=2, vs2=1, s1=0)
    assert encode_vector(ins) == 0x0010015B


def test_worked_example_decode():
    assert decode(0x0010015B) == XvnmcInstr("vadd", "vv", vd=2, vs2=1, s1=0)


def test_resolve_indirect_byte_order():
    ins = XvnmcInstr("vadd", "vv", vs2=3, ind=True)
    # byte0 -> vd, byte1 -> vs2, byte2 -> vs1, at 128 B slot granularity
    assert resolve_indirect(ins, 0x00030201) == (1, 2, 3)


def test_resolve_indirect_scales_slots():
    ins = XvnmcInstr("vmul", "vx", vs2=3, s1=4, ind=True)
    d, s2, _ = resolve_indirect(ins, 0x00000801)
    assert (d, s2) == (1, 8)


def test_rv32e_register_bound():
    with pytest.raises(IllegalInstruction):
        encode_vector(XvnmcInstr("vadd", "vx", vd=1, vs2=2, s1=16))


def test_vv_rejects_missing_form():
    with pytest.raises(IllegalInstruction):
        encode_vector(XvnmcInstr("vslide1up", "vv", vd=1, vs2=2, s1=3))


def test_vsetvl_family_roundtrip():
    for word, want in [
        (encode_vsetvli(3, 5, 16), VsetInstr("vsetvli", 3, 5, 16)),
        (encode_vsetivli(2, 17, 32), VsetInstr("vsetivli", 2, 17, 32)),
        (encode_vsetvl(1, 4, 9), VsetInstr("vsetvl", 1, 4, rs2=9)),
    ]:
        assert decode(word) == want


def test_scalar_decode_is_rv32e():
    # addi x3, x0, 64
    ins = decode(0x04000193)
    assert ins == Rv32Instr("addi", rd=3, rs1=0, imm=64)
    with pytest.raises(IllegalInstruction):
        decode(0x02C5D533)  # divu x10: no M extension


def _legal_instrs():
    pairs = [(m, f) for m, vs in VARIANTS.items() for f in vs]
    return st.sampled_from(pairs).flatmap(lambda mf: st.tuples(
        st.just(mf[0]), st.just(mf[1]),
        st.integers(0, 15 if mf[1] in ("xe",) else 31),
        st.integers(0, 15 if mf[1] in ("ex", "xe") else 31),
        st.integers(0, 15 if mf[1] in ("vx", "ex", "xe") else 31),
        st.booleans()))


@settings(max_examples=400)
@given(_legal_instrs())
def test_encode_decode_roundtrip(item):
    mnem, form, vd, vs2, s1, ind = item
    ind = ind and form in ("vv", "vx", "vi")
    if ind:
        vd, vs2 = 0, vs2 & 0xF
        if form == "vx":
            s1 &= 0xF
        if form == "vv":
            s1 = 0
    elif form in ("vv", "vi"):
        s1 &= 0x1F
    ins = XvnmcInstr(mnem, form, vd=vd, vs2=vs2, s1=s1, ind=ind)
    assert decode(encode_vector(ins)) == ins


def test_collision_freedom_over_legal_space():
    """Distinct legal instructions encode to distinct words."""
    seen = {}
    for mnem, forms in VARIANTS.items():
        for form in forms:
            for ind in (False, True):
                if ind and form not in ("vv", "vx", "vi"):
                    continue
                vd = 0 if ind else 3
                vs2 = 2
                s1 = 0 if (ind and form == "vv") else 1
                ins = XvnmcInstr(mnem, form, vd=vd, vs2=vs2, s1=s1, ind=ind)
                word = encode_vector(ins)
                assert word not in seen, (ins, seen[word])
                seen[word] = ins
                assert decode(word) == ins
