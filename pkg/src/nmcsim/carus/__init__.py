from .isa import XvnmcInstr, VsetInstr, Rv32Instr, decode, encode_vector
from .asm import assemble, disassemble, load_image, save_image
from .device import CarusDevice
from .vpu import PRESETS, TimingTable, VRF

__all__ = [
    "XvnmcInstr",
    "VsetInstr",
    "Rv32Instr",
    "decode",
    "encode_vector",
    "assemble",
    "disassemble",
    "load_image",
    "save_image",
    "CarusDevice",
    "PRESETS",
    "TimingTable",
    "VRF",
]
