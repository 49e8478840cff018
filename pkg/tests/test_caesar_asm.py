"""Command-stream assembler round trips and error reporting."""

import pytest
from hypothesis import given, strategies as st

from nmcsim.caesar import asm
from nmcsim.caesar.isa import CaesarInstr, Opcode, decode, encode
from nmcsim.errors import OffsetOutOfRange, ParseError, UnknownMnemonic


def test_worked_example_line():
    assert asm.assemble("add 0x5, 0x10, 0x20") == [(0x5, 0x0C040010)]


def test_disassemble_inverse():
    assert asm.disassemble([(0x5, 0x0C040010)]) == "add 0x5, 0x10, 0x20\n"


def test_csrw_line():
    (dest, word), = asm.assemble("csrw 16")
    ins = decode(word, dest)
    assert ins.op is Opcode.CSRW and ins.src1 == 1


def test_accumulate_ops_may_omit_dest():
    stream = asm.assemble("mac 0x10, 0x1005")
    ins = decode(stream[0][1], stream[0][0])
    assert (ins.op, ins.dest, ins.src1, ins.src2) == \
        (Opcode.MAC, 0, 0x10, 0x1005)


def test_comments_and_blank_lines():
    text = "# setup\n\ncsrw 8   # width\nadd 1, 2, 0x1000\n"
    assert len(asm.assemble(text)) == 2


def test_unknown_mnemonic():
    with pytest.raises(UnknownMnemonic):
        asm.assemble("frobnicate 1, 2, 3")


def test_offset_out_of_range():
    with pytest.raises(OffsetOutOfRange):
        asm.assemble("add 0x2000, 0, 0x1000")


def test_bad_width():
    with pytest.raises(ParseError):
        asm.assemble("csrw 12")


def test_error_carries_line_number():
    with pytest.raises(ParseError) as info:
        asm.assemble("csrw 8\nadd 1, 2\n")
    assert info.value.line == 2


def test_save_load_text_and_json(tmp_path):
    stream = asm.assemble("csrw 8\nmax 3, 1, 0x1001\n")
    for name in ("s.txt", "s.json"):
        p = tmp_path / name
        asm.save_stream(stream, p)
        assert asm.load_stream(p) == stream


_OPS = st.sampled_from([op for op in Opcode if op is not Opcode.CSRW])
_OFF = st.integers(0, 0x1FFF)


@given(st.lists(st.tuples(_OPS, _OFF, _OFF, _OFF), min_size=1, max_size=20))
def test_text_roundtrip(items):
    stream = [(d, encode(CaesarInstr(op, d, s1, s2)))
              for op, d, s1, s2 in items]
    assert asm.assemble(asm.disassemble(stream)) == stream
