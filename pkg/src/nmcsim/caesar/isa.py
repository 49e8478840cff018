"""Caesar command-word encoding.

A command is a plain bus write in computing mode: the written word packs
{opcode[31:26], src2[25:13], src1[12:0]} and the *write address* (word
offset) names the destination. Source/destination offsets address the
32 KiB data space as 8192 words.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from ..errors import IllegalOpcode

OFFSET_BITS = 13
OFFSET_MASK = (1 << OFFSET_BITS) - 1
WORDS_PER_BANK = 4096  # 16 KiB per bank


class Opcode(IntEnum):
    AND = 0x00
    OR = 0x01
    XOR = 0x02
    ADD = 0x03
    SUB = 0x04
    MUL = 0x05
    MAC_INIT = 0x06
    MAC = 0x07
    MAC_STORE = 0x08
    DOT_INIT = 0x09
    DOT = 0x0A
    DOT_STORE = 0x0B
    SLL = 0x0C
    SLR = 0x0D
    MIN = 0x0E
    MAX = 0x0F
    CSRW = 0x10


# opcode -> packed-alu op name (None: not a plain lanewise op)
ALU_OP = {
    Opcode.AND: "and",
    Opcode.OR: "or",
    Opcode.XOR: "xor",
    Opcode.ADD: "add",
    Opcode.SUB: "sub",
    Opcode.MUL: "mul",
    Opcode.SLL: "sll",
    Opcode.SLR: "srl",
    Opcode.MIN: "min",
    Opcode.MAX: "max",
}

MAC_GROUP = {Opcode.MAC_INIT, Opcode.MAC, Opcode.MAC_STORE}
DOT_GROUP = {Opcode.DOT_INIT, Opcode.DOT, Opcode.DOT_STORE}

# ops that write their destination word back
WRITEBACK_OPS = frozenset(ALU_OP) | {Opcode.MAC_STORE, Opcode.DOT_STORE}

CSR_WIDTHS = {0: 8, 1: 16, 2: 32}


@dataclass(frozen=True)
class CaesarInstr:
    op: Opcode
    dest: int  # word offset, taken from the bus write address
    src1: int = 0
    src2: int = 0

    def bank(self, field: str) -> int:
        off = getattr(self, field)
        return 0 if off < WORDS_PER_BANK else 1


def encode(instr: CaesarInstr) -> int:
    """Pack the command word (the dest offset travels on the address bus)."""
    return (
        (int(instr.op) & 0x3F) << 26
        | (instr.src2 & OFFSET_MASK) << 13
        | (instr.src1 & OFFSET_MASK)
    )


def decode(word: int, dest: int) -> CaesarInstr:
    """Split a computing-mode bus write into an instruction.

    Raises IllegalOpcode for opcode values outside the table.
    """
    op = (word >> 26) & 0x3F
    try:
        opcode = Opcode(op)
    except ValueError:
        raise IllegalOpcode(f"opcode 0x{op:02X} in command word 0x{word:08X}") from None
    return CaesarInstr(
        op=opcode,
        dest=dest & OFFSET_MASK,
        src1=word & OFFSET_MASK,
        src2=(word >> 13) & OFFSET_MASK,
    )
