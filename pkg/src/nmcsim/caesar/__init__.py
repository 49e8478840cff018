from .isa import Opcode, CaesarInstr, encode, decode
from .device import CaesarDevice
from .asm import assemble, disassemble

__all__ = [
    "Opcode",
    "CaesarInstr",
    "encode",
    "decode",
    "CaesarDevice",
    "assemble",
    "disassemble",
]
