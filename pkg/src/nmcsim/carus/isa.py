"""xvnmc instruction-set encoding plus the RV32E scalar subset.

Vector instructions live at major opcode 0x5B (custom-2):

    31      26 25  24    20 19    15 14  12 11   7 6      0
    [ funct6 ][IND][  vs2  ][s1 field][funct3][ vd ][1011011]

funct3 picks the operand form: 000 vv, 100 vx, 011 vi, 110 scalar<->vector
moves (emvv/emvx), 111 vsetvl family. Bit 25 (vector mask bit in the
parent encoding) is repurposed as the indirect-addressing flag: when set,
the vs2 field names a GPR whose low three bytes give the *logical* vector
operands (byte0 -> vd, byte1 -> vs2, byte2 -> vs1) at 128 B granularity.
Moves and vsetvl never use it.

Everything else (loads, stores, branches, OP/OP-IMM) decodes as RV32E:
16 GPRs, no M extension.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import IllegalInstruction

OPC_VECTOR = 0x5B

F3_VV = 0b000
F3_VX = 0b100
F3_VI = 0b011
F3_MV = 0b110
F3_CFG = 0b111

_FORM_F3 = {"vv": F3_VV, "vx": F3_VX, "vi": F3_VI, "ex": F3_MV, "xe": F3_MV}

FUNCT6 = {
    "vadd": 0b000000,
    "vsub": 0b000010,
    "vminu": 0b000100,
    "vmin": 0b000101,
    "vmaxu": 0b000110,
    "vmax": 0b000111,
    "vand": 0b001001,
    "vor": 0b001010,
    "vxor": 0b001011,
    "vslide1up": 0b001100,
    "vslide1down": 0b001101,
    "vslideup": 0b001110,
    "vslidedown": 0b001111,
    "emvv": 0b010000,
    "emvx": 0b010001,
    "vmv": 0b010111,
    "vmul": 0b100100,
    "vsll": 0b100101,
    "vmacc": 0b101101,
    "vsrl": 0b101000,
    "vsra": 0b101001,
}

VARIANTS = {
    "vadd": ("vv", "vx", "vi"),
    "vsub": ("vv", "vx"),
    "vmul": ("vv", "vx"),
    "vmacc": ("vv", "vx"),
    "vand": ("vv", "vx", "vi"),
    "vor": ("vv", "vx", "vi"),
    "vxor": ("vv", "vx", "vi"),
    "vmin": ("vv", "vx"),
    "vminu": ("vv", "vx"),
    "vmax": ("vv", "vx"),
    "vmaxu": ("vv", "vx"),
    "vsll": ("vv", "vx", "vi"),
    "vsrl": ("vv", "vx", "vi"),
    "vsra": ("vv", "vx", "vi"),
    "vmv": ("vv", "vx", "vi"),
    "vslideup": ("vx", "vi"),
    "vslidedown": ("vx", "vi"),
    "vslide1up": ("vx",),
    "vslide1down": ("vx",),
    "emvv": ("ex",),
    "emvx": ("xe",),
}

# imm5 is sign-extended for arithmetic/logic/splat, zero-extended for
# shift amounts and slide offsets
UNSIGNED_IMM = {"vsll", "vsrl", "vsra", "vslideup", "vslidedown"}

_F6_TO_MNEM = {code: m for m, code in FUNCT6.items()}

VLMAX = {8: 1024, 16: 512, 32: 256}
SEW_CODE = {8: 0, 16: 1, 32: 2}
CODE_SEW = {v: k for k, v in SEW_CODE.items()}

VRF_BYTES = 32 * 1024
SLOT_BYTES = 128  # logical vector granularity
NUM_SLOTS = VRF_BYTES // SLOT_BYTES  # 256 logical vectors


@dataclass(frozen=True)
class XvnmcInstr:
    """A decoded vector operation (not vsetvl)."""

    mnem: str
    form: str  # vv | vx | vi | ex | xe
    vd: int = 0     # vd, or rd for emvx
    vs2: int = 0    # vs2 / rs2 / index GPR when ind
    s1: int = 0     # vs1 / rs1 / raw 5-bit imm
    ind: bool = False


@dataclass(frozen=True)
class VsetInstr:
    kind: str  # vsetvli | vsetivli | vsetvl
    rd: int
    avl: int   # rs1 number, or the immediate AVL for vsetivli
    sew: int = 8     # for register form this is ignored (vtype in rs2)
    rs2: int = 0


@dataclass(frozen=True)
class Rv32Instr:
    op: str
    rd: int = 0
    rs1: int = 0
    rs2: int = 0
    imm: int = 0


def vtype_bits(sew: int) -> int:
    return SEW_CODE[sew] << 3  # LMUL fixed at 1 (low bits zero)


def sew_from_vtype(vtype: int) -> int:
    if vtype & ~0x38 or (vtype >> 3) not in CODE_SEW:
        raise IllegalInstruction(f"unsupported vtype 0x{vtype:X}")
    return CODE_SEW[vtype >> 3]


def _check_gpr(x: int) -> int:
    if not 0 <= x < 16:
        raise IllegalInstruction(f"x{x} is not an RV32E register")
    return x


def _check_vreg(v: int) -> int:
    if not 0 <= v < 32:
        raise IllegalInstruction(f"bad vector register v{v}")
    return v


# --- vector encode/decode ----------------------------------------------------

def encode_vector(ins: XvnmcInstr) -> int:
    if ins.mnem not in FUNCT6:
        raise IllegalInstruction(f"unknown mnemonic {ins.mnem!r}")
    if ins.form not in VARIANTS[ins.mnem]:
        raise IllegalInstruction(f"{ins.mnem} has no .{ins.form} form")
    f6 = FUNCT6[ins.mnem]
    f3 = _FORM_F3[ins.form]

    if ins.ind:
        if ins.form not in ("vv", "vx", "vi"):
            raise IllegalInstruction("indirect addressing needs vv/vx/vi")
        vd = 0
        vs2 = _check_gpr(ins.vs2)  # index GPR
        s1 = 0 if ins.form == "vv" else ins.s1 & 0x1F
        if ins.form == "vx":
            _check_gpr(ins.s1)
    else:
        if ins.form == "xe":
            vd, vs2, s1 = _check_gpr(ins.vd), _check_vreg(ins.vs2), _check_gpr(ins.s1)
        elif ins.form == "ex":
            vd, vs2, s1 = _check_vreg(ins.vd), _check_gpr(ins.vs2), _check_gpr(ins.s1)
        else:
            vd = _check_vreg(ins.vd)
            vs2 = _check_vreg(ins.vs2)
            if ins.form == "vv":
                s1 = _check_vreg(ins.s1)
            elif ins.form == "vx":
                s1 = _check_gpr(ins.s1)
            else:
                s1 = ins.s1 & 0x1F

    return (f6 << 26 | int(ins.ind) << 25 | vs2 << 20 | s1 << 15
            | f3 << 12 | vd << 7 | OPC_VECTOR)


def encode_vsetvli(rd: int, rs1: int, sew: int) -> int:
    return (vtype_bits(sew) << 20 | _check_gpr(rs1) << 15 | F3_CFG << 12
            | _check_gpr(rd) << 7 | OPC_VECTOR)


def encode_vsetivli(rd: int, uimm: int, sew: int) -> int:
    if not 0 <= uimm < 32:
        raise IllegalInstruction("vsetivli AVL must fit 5 bits")
    return (0b11 << 30 | vtype_bits(sew) << 20 | uimm << 15 | F3_CFG << 12
            | _check_gpr(rd) << 7 | OPC_VECTOR)


def encode_vsetvl(rd: int, rs1: int, rs2: int) -> int:
    return (1 << 31 | _check_gpr(rs2) << 20 | _check_gpr(rs1) << 15
            | F3_CFG << 12 | _check_gpr(rd) << 7 | OPC_VECTOR)


def _decode_vector(word: int):
    f3 = (word >> 12) & 0x7
    vd = (word >> 7) & 0x1F
    s1 = (word >> 15) & 0x1F
    vs2 = (word >> 20) & 0x1F
    ind = bool(word & (1 << 25))
    f6 = (word >> 26) & 0x3F

    if f3 == F3_CFG:
        if word >> 31 == 0:
            return VsetInstr("vsetvli", _check_gpr(vd), _check_gpr(s1),
                             sew=sew_from_vtype((word >> 20) & 0x7FF))
        if (word >> 30) == 0b11:
            return VsetInstr("vsetivli", _check_gpr(vd), s1,
                             sew=sew_from_vtype((word >> 20) & 0x3FF))
        if (word >> 25) & 0x3F:
            raise IllegalInstruction(f"bad vsetvl funct7 in 0x{word:08X}")
        return VsetInstr("vsetvl", _check_gpr(vd), _check_gpr(s1), rs2=_check_gpr(vs2))

    mnem = _F6_TO_MNEM.get(f6)
    if mnem is None:
        raise IllegalInstruction(f"funct6 0x{f6:02X} unassigned in 0x{word:08X}")
    if f3 == F3_MV:
        form = "ex" if mnem == "emvv" else "xe" if mnem == "emvx" else None
    else:
        form = {F3_VV: "vv", F3_VX: "vx", F3_VI: "vi"}.get(f3)
    if form is None or form not in VARIANTS[mnem]:
        raise IllegalInstruction(f"{mnem} has no form for funct3 {f3:03b}")
    if ind:
        if form not in ("vv", "vx", "vi"):
            raise IllegalInstruction("indirect flag on a move instruction")
        _check_gpr(vs2)
        if vd or (form == "vv" and s1):
            raise IllegalInstruction("indirect form requires zeroed vector fields")
    elif form in ("ex", "xe"):
        _check_gpr(vs2 if form == "ex" else s1)
        _check_gpr(vd if form == "xe" else s1)
    elif form == "vx":
        _check_gpr(s1)
    return XvnmcInstr(mnem, form, vd=vd, vs2=vs2, s1=s1, ind=ind)


def resolve_indirect(ins: XvnmcInstr, idx_value: int) -> tuple[int, int, int]:
    """Logical (vd, vs2, vs1) slot numbers from the index GPR's low bytes."""
    return idx_value & 0xFF, (idx_value >> 8) & 0xFF, (idx_value >> 16) & 0xFF


# --- RV32E ---------------------------------------------------------------

_OPIMM = {0: "addi", 2: "slti", 3: "sltiu", 4: "xori", 6: "ori", 7: "andi"}
_OP = {
    (0, 0x00): "add", (0, 0x20): "sub", (1, 0x00): "sll", (2, 0x00): "slt",
    (3, 0x00): "sltu", (4, 0x00): "xor", (5, 0x00): "srl", (5, 0x20): "sra",
    (6, 0x00): "or", (7, 0x00): "and",
}
_BRANCH = {0: "beq", 1: "bne", 4: "blt", 5: "bge", 6: "bltu", 7: "bgeu"}
_LOAD = {0: "lb", 1: "lh", 2: "lw", 4: "lbu", 5: "lhu"}
_STORE = {0: "sb", 1: "sh", 2: "sw"}


def _sext(v: int, bits: int) -> int:
    v &= (1 << bits) - 1
    return v - (1 << bits) if v & (1 << (bits - 1)) else v


def decode_rv32(word: int) -> Rv32Instr:
    opc = word & 0x7F
    rd = (word >> 7) & 0x1F
    f3 = (word >> 12) & 0x7
    rs1 = (word >> 15) & 0x1F
    rs2 = (word >> 20) & 0x1F
    f7 = word >> 25

    if opc == 0x37:
        return Rv32Instr("lui", rd=_check_gpr(rd), imm=word & 0xFFFFF000)
    if opc == 0x17:
        return Rv32Instr("auipc", rd=_check_gpr(rd), imm=word & 0xFFFFF000)
    if opc == 0x6F:
        imm = (_sext(word >> 31, 1) << 20 | ((word >> 12) & 0xFF) << 12
               | ((word >> 20) & 1) << 11 | ((word >> 21) & 0x3FF) << 1)
        return Rv32Instr("jal", rd=_check_gpr(rd), imm=imm)
    if opc == 0x67 and f3 == 0:
        return Rv32Instr("jalr", rd=_check_gpr(rd), rs1=_check_gpr(rs1),
                         imm=_sext(word >> 20, 12))
    if opc == 0x63 and f3 in _BRANCH:
        imm = (_sext(word >> 31, 1) << 12 | ((word >> 7) & 1) << 11
               | ((word >> 25) & 0x3F) << 5 | ((word >> 8) & 0xF) << 1)
        return Rv32Instr(_BRANCH[f3], rs1=_check_gpr(rs1), rs2=_check_gpr(rs2), imm=imm)
    if opc == 0x03 and f3 in _LOAD:
        return Rv32Instr(_LOAD[f3], rd=_check_gpr(rd), rs1=_check_gpr(rs1),
                         imm=_sext(word >> 20, 12))
    if opc == 0x23 and f3 in _STORE:
        return Rv32Instr(_STORE[f3], rs1=_check_gpr(rs1), rs2=_check_gpr(rs2),
                         imm=_sext((word >> 25) << 5 | rd, 12))
    if opc == 0x13:
        if f3 == 1 and f7 == 0:
            return Rv32Instr("slli", rd=_check_gpr(rd), rs1=_check_gpr(rs1), imm=rs2)
        if f3 == 5 and f7 in (0x00, 0x20):
            return Rv32Instr("srai" if f7 else "srli",
                             rd=_check_gpr(rd), rs1=_check_gpr(rs1), imm=rs2)
        if f3 in _OPIMM:
            return Rv32Instr(_OPIMM[f3], rd=_check_gpr(rd), rs1=_check_gpr(rs1),
                             imm=_sext(word >> 20, 12))
    if opc == 0x33:
        if f7 == 0x01:
            raise IllegalInstruction("M extension not implemented")
        key = (f3, f7)
        if key in _OP:
            return Rv32Instr(_OP[key], rd=_check_gpr(rd), rs1=_check_gpr(rs1),
                             rs2=_check_gpr(rs2))
    if word == 0x00000073:
        return Rv32Instr("ecall")
    if word == 0x00100073:
        return Rv32Instr("ebreak")
    raise IllegalInstruction(f"cannot decode 0x{word:08X}")


def decode(word: int) -> XvnmcInstr | VsetInstr | Rv32Instr:
    """Decode any word the eCPU can fetch."""
    if word & 0x7F == OPC_VECTOR:
        return _decode_vector(word)
    return decode_rv32(word)


# --- RV32 field packers (used by the assembler) ---------------------------

def enc_r(op: str, rd: int, rs1: int, rs2: int) -> int:
    f3, f7 = next(key for key, name in _OP.items() if name == op)
    return f7 << 25 | rs2 << 20 | rs1 << 15 | f3 << 12 | rd << 7 | 0x33


def enc_i(op: str, rd: int, rs1: int, imm: int) -> int:
    if op in ("slli", "srli", "srai"):
        f3 = 1 if op == "slli" else 5
        hi = 0x20 if op == "srai" else 0
        return hi << 25 | (imm & 0x1F) << 20 | rs1 << 15 | f3 << 12 | rd << 7 | 0x13
    if op == "jalr":
        return (imm & 0xFFF) << 20 | rs1 << 15 | rd << 7 | 0x67
    if op in _LOAD.values():
        f3 = next(k for k, v in _LOAD.items() if v == op)
        return (imm & 0xFFF) << 20 | rs1 << 15 | f3 << 12 | rd << 7 | 0x03
    f3 = next(k for k, v in _OPIMM.items() if v == op)
    return (imm & 0xFFF) << 20 | rs1 << 15 | f3 << 12 | rd << 7 | 0x13


def enc_s(op: str, rs1: int, rs2: int, imm: int) -> int:
    f3 = next(k for k, v in _STORE.items() if v == op)
    return ((imm >> 5) & 0x7F) << 25 | rs2 << 20 | rs1 << 15 | f3 << 12 \
        | (imm & 0x1F) << 7 | 0x23


def enc_b(op: str, rs1: int, rs2: int, imm: int) -> int:
    f3 = next(k for k, v in _BRANCH.items() if v == op)
    return (((imm >> 12) & 1) << 31 | ((imm >> 5) & 0x3F) << 25 | rs2 << 20
            | rs1 << 15 | f3 << 12 | ((imm >> 1) & 0xF) << 8
            | ((imm >> 11) & 1) << 7 | 0x63)


def enc_u(op: str, rd: int, imm: int) -> int:
    return (imm & 0xFFFFF) << 12 | rd << 7 | (0x37 if op == "lui" else 0x17)


def enc_j(rd: int, imm: int) -> int:
    return (((imm >> 20) & 1) << 31 | ((imm >> 1) & 0x3FF) << 21
            | ((imm >> 11) & 1) << 20 | ((imm >> 12) & 0xFF) << 12
            | rd << 7 | 0x6F)
