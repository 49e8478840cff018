"""Command-word encode/decode for the hosted macro."""

import pytest
from hypothesis import given, strategies as st

from nmcsim.caesar.device import bank_of
from nmcsim.caesar.isa import CSR_WIDTHS, CaesarInstr, Opcode, decode, encode
from nmcsim.errors import IllegalOpcode


def test_worked_example_decode():
    ins = decode(0x0C040010, dest=0x5)
    assert ins == CaesarInstr(Opcode.ADD, 0x5, 0x10, 0x20)


def test_worked_example_encode():
    assert encode(CaesarInstr(Opcode.ADD, 0x5, 0x10, 0x20)) == 0x0C040010


def test_unassigned_opcode_rejected():
    with pytest.raises(IllegalOpcode):
        decode(0x3F << 26, dest=0)


def test_field_boundaries():
    # src2 occupies [25:13], src1 [12:0]
    ins = decode((0x03 << 26) | (0x1FFF << 13) | 0x1FFF, dest=0)
    assert ins.src1 == 0x1FFF and ins.src2 == 0x1FFF


def test_bank_split():
    assert bank_of(0) == 0 and bank_of(4095) == 0
    assert bank_of(4096) == 1 and bank_of(8191) == 1


def test_csr_width_table():
    assert CSR_WIDTHS == {0: 8, 1: 16, 2: 32}


_OPS = st.sampled_from(list(Opcode))
_OFF = st.integers(0, 0x1FFF)


@given(_OPS, _OFF, _OFF, _OFF)
def test_encode_decode_roundtrip(op, dest, src1, src2):
    ins = CaesarInstr(op, dest, src1, src2)
    assert decode(encode(ins), dest) == ins
