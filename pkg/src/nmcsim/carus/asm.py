"""Two-pass assembler/disassembler for Carus kernel images.

One instruction per line, `#` comments, `label:` definitions. Vector ops
use the form suffix (`vadd.vv v2, v1, v0`); an extra `.ind` suffix selects
indirect addressing, where the operand list shrinks to the index GPR (plus
the scalar/immediate operand for .vx/.vi):

    vmacc.vx.ind x3, x5     # vectors from x3's bytes, scalar in x5
    vadd.vi.ind  x3, -2

The optional `xvnmc.` mnemonic prefix is accepted and stripped. Branch and
jump targets are labels or signed byte offsets relative to the instruction.
Images are flat little-endian word lists, capped at the 512 B instruction
memory.
"""

from __future__ import annotations

import re
import struct
from pathlib import Path

from ..errors import ParseError, ProgramTooLarge, UnknownMnemonic
from . import isa
from .isa import (
    Rv32Instr,
    UNSIGNED_IMM,
    VARIANTS,
    VsetInstr,
    XvnmcInstr,
    decode,
)

EMEM_BYTES = 512
MAX_IMAGE_WORDS = EMEM_BYTES // 4

_SCALAR_R = {"add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and"}
_SCALAR_I = {"addi", "slti", "sltiu", "xori", "ori", "andi", "slli", "srli", "srai"}
_LOADS = {"lb", "lh", "lw", "lbu", "lhu"}
_STORES = {"sb", "sh", "sw"}
_BRANCHES = {"beq", "bne", "blt", "bge", "bltu", "bgeu"}

_MEM_RE = re.compile(r"^(-?\w+)\((x\d+)\)$")


def _xreg(tok: str, lineno: int) -> int:
    if re.fullmatch(r"x\d+", tok) and int(tok[1:]) < 16:
        return int(tok[1:])
    raise ParseError(f"expected GPR x0..x15, got {tok!r}", lineno)


def _vreg(tok: str, lineno: int) -> int:
    if re.fullmatch(r"v\d+", tok) and int(tok[1:]) < 32:
        return int(tok[1:])
    raise ParseError(f"expected vector register v0..v31, got {tok!r}", lineno)


def _num(tok: str, lineno: int) -> int:
    try:
        return int(tok, 0)
    except ValueError:
        raise ParseError(f"bad number {tok!r}", lineno) from None


def _sew(tok: str, lineno: int) -> int:
    if tok in ("e8", "e16", "e32"):
        return int(tok[1:])
    raise ParseError(f"expected e8/e16/e32, got {tok!r}", lineno)


def _target(tok: str, labels: dict[str, int], pc: int, lineno: int) -> int:
    if tok in labels:
        return labels[tok] - pc
    if re.fullmatch(r"[+-]?(0x)?[0-9a-fA-F]+", tok):
        return _num(tok, lineno)
    raise ParseError(f"undefined label {tok!r}", lineno)


def _li_words(rd: int, value: int) -> list[int]:
    value &= 0xFFFFFFFF
    signed = value - (1 << 32) if value >> 31 else value
    if -2048 <= signed <= 2047:
        return [isa.enc_i("addi", rd, 0, signed)]
    hi = ((value + 0x800) >> 12) & 0xFFFFF
    lo = (value - ((hi << 12) & 0xFFFFFFFF)) & 0xFFFFFFFF
    lo = lo - (1 << 32) if lo >> 31 else lo
    return [isa.enc_u("lui", rd, hi), isa.enc_i("addi", rd, rd, lo)]


def _split_lines(text: str):
    """Yield (lineno, label_defs, mnem, operand tokens)."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        labels = []
        while True:
            m = re.match(r"^([A-Za-z_]\w*):\s*", line)
            if not m:
                break
            labels.append(m.group(1))
            line = line[m.end():]
        if not line and not labels:
            continue
        if not line:
            yield lineno, labels, None, []
            continue
        mnem, _, rest = line.partition(" ")
        toks = [t.strip() for t in rest.split(",") if t.strip()]
        yield lineno, labels, mnem.lower(), toks


def _instr_size(mnem: str, toks: list[str], lineno: int) -> int:
    if mnem == "li":
        if len(toks) != 2:
            raise ParseError("li takes rd, imm", lineno)
        return len(_li_words(0, _num(toks[1], lineno) & 0xFFFFFFFF))
    return 1


def assemble(text: str) -> list[int]:
    """Assemble to an image word list; ProgramTooLarge beyond 128 words."""
    program: list[tuple[int, str, list[str]]] = []
    labels: dict[str, int] = {}
    pc = 0
    for lineno, defs, mnem, toks in _split_lines(text):
        for name in defs:
            if name in labels:
                raise ParseError(f"duplicate label {name!r}", lineno)
            labels[name] = pc
        if mnem is None:
            continue
        program.append((lineno, mnem, toks))
        pc += 4 * _instr_size(mnem, toks, lineno)

    words: list[int] = []
    for lineno, mnem, toks in program:
        words.extend(_encode_line(mnem, toks, labels, 4 * len(words), lineno))
    if len(words) > MAX_IMAGE_WORDS:
        raise ProgramTooLarge(
            f"{len(words)} instructions exceed the {EMEM_BYTES} B instruction memory")
    return words


def _encode_line(mnem: str, toks: list[str], labels: dict[str, int],
                 pc: int, lineno: int) -> list[int]:
    t = toks

    # pseudo-instructions
    if mnem == "nop":
        return [isa.enc_i("addi", 0, 0, 0)]
    if mnem == "li":
        return _li_words(_xreg(t[0], lineno), _num(t[1], lineno))
    if mnem == "mv":
        return [isa.enc_i("addi", _xreg(t[0], lineno), _xreg(t[1], lineno), 0)]
    if mnem == "j":
        return [isa.enc_j(0, _target(t[0], labels, pc, lineno))]

    if mnem in _SCALAR_R:
        if len(t) != 3:
            raise ParseError(f"{mnem} takes rd, rs1, rs2", lineno)
        return [isa.enc_r(mnem, _xreg(t[0], lineno), _xreg(t[1], lineno),
                          _xreg(t[2], lineno))]
    if mnem in _SCALAR_I:
        return [isa.enc_i(mnem, _xreg(t[0], lineno), _xreg(t[1], lineno),
                          _num(t[2], lineno))]
    if mnem in _LOADS or mnem in _STORES:
        if len(t) != 2 or not (m := _MEM_RE.match(t[1])):
            raise ParseError(f"{mnem} takes reg, imm(base)", lineno)
        imm, base = _num(m.group(1), lineno), _xreg(m.group(2), lineno)
        if mnem in _LOADS:
            return [isa.enc_i(mnem, _xreg(t[0], lineno), base, imm)]
        return [isa.enc_s(mnem, base, _xreg(t[0], lineno), imm)]
    if mnem in _BRANCHES:
        return [isa.enc_b(mnem, _xreg(t[0], lineno), _xreg(t[1], lineno),
                          _target(t[2], labels, pc, lineno))]
    if mnem == "jal":
        return [isa.enc_j(_xreg(t[0], lineno), _target(t[1], labels, pc, lineno))]
    if mnem == "jalr":
        return [isa.enc_i("jalr", _xreg(t[0], lineno), _xreg(t[1], lineno),
                          _num(t[2], lineno))]
    if mnem in ("lui", "auipc"):
        return [isa.enc_u(mnem, _xreg(t[0], lineno), _num(t[1], lineno))]
    if mnem == "ecall":
        return [0x00000073]
    if mnem == "ebreak":
        return [0x00100073]

    if mnem.startswith("xvnmc."):
        mnem = mnem[6:]

    if mnem == "vsetvli":
        return [isa.encode_vsetvli(_xreg(t[0], lineno), _xreg(t[1], lineno),
                                   _sew(t[2], lineno))]
    if mnem == "vsetivli":
        return [isa.encode_vsetivli(_xreg(t[0], lineno), _num(t[1], lineno),
                                    _sew(t[2], lineno))]
    if mnem == "vsetvl":
        return [isa.encode_vsetvl(_xreg(t[0], lineno), _xreg(t[1], lineno),
                                  _xreg(t[2], lineno))]
    if mnem == "emvv":
        if len(t) != 3:
            raise ParseError("emvv takes vd, rs1, rs2", lineno)
        return [isa.encode_vector(XvnmcInstr(
            "emvv", "ex", vd=_vreg(t[0], lineno),
            s1=_xreg(t[1], lineno), vs2=_xreg(t[2], lineno)))]
    if mnem == "emvx":
        if len(t) != 3:
            raise ParseError("emvx takes rd, vs2, rs1", lineno)
        return [isa.encode_vector(XvnmcInstr(
            "emvx", "xe", vd=_xreg(t[0], lineno),
            vs2=_vreg(t[1], lineno), s1=_xreg(t[2], lineno)))]

    parts = mnem.split(".")
    if parts[0] in VARIANTS and len(parts) >= 2:
        base, form = parts[0], parts[1]
        ind = len(parts) == 3 and parts[2] == "ind"
        if form not in ("vv", "vx", "vi") or (len(parts) == 3 and not ind) \
                or len(parts) > 3:
            raise UnknownMnemonic(f"unknown mnemonic {mnem!r}", lineno)
        return [_encode_vop(base, form, ind, t, lineno)]

    raise UnknownMnemonic(f"unknown mnemonic {mnem!r}", lineno)


def _vop_imm(base: str, tok: str, lineno: int) -> int:
    imm = _num(tok, lineno)
    lo, hi = (0, 31) if base in UNSIGNED_IMM else (-16, 15)
    if not lo <= imm <= hi:
        raise ParseError(f"immediate {imm} outside [{lo}, {hi}]", lineno)
    return imm & 0x1F


def _encode_vop(base: str, form: str, ind: bool, t: list[str], lineno: int) -> int:
    is_mv = base == "vmv"  # one source operand (vs2 field unused)
    if ind:
        need = 1 if form == "vv" else 2
        if len(t) != need:
            raise ParseError(f"{base}.{form}.ind takes {need} operand(s)", lineno)
        idx = _xreg(t[0], lineno)
        s1 = 0
        if form == "vx":
            s1 = _xreg(t[1], lineno)
        elif form == "vi":
            s1 = _vop_imm(base, t[1], lineno)
        return isa.encode_vector(XvnmcInstr(base, form, vs2=idx, s1=s1, ind=True))

    need = 2 if is_mv else 3
    if len(t) != need:
        raise ParseError(f"{base}.{form} takes {need} operands", lineno)
    vd = _vreg(t[0], lineno)
    vs2 = 0 if is_mv else _vreg(t[1], lineno)
    src = t[-1]
    if form == "vv":
        s1 = _vreg(src, lineno)
    elif form == "vx":
        s1 = _xreg(src, lineno)
    else:
        s1 = _vop_imm(base, src, lineno)
    return isa.encode_vector(XvnmcInstr(base, form, vd=vd, vs2=vs2, s1=s1))


# --- disassembly -----------------------------------------------------------


def _fmt_imm(base: str, raw5: int) -> str:
    if base in UNSIGNED_IMM:
        return str(raw5)
    return str(raw5 - 32 if raw5 & 0x10 else raw5)


def disassemble(words: list[int]) -> str:
    lines = []
    for word in words:
        ins = decode(word)
        if isinstance(ins, XvnmcInstr):
            lines.append(_dis_vector(ins))
        elif isinstance(ins, VsetInstr):
            if ins.kind == "vsetvl":
                lines.append(f"vsetvl x{ins.rd}, x{ins.avl}, x{ins.rs2}")
            elif ins.kind == "vsetvli":
                lines.append(f"vsetvli x{ins.rd}, x{ins.avl}, e{ins.sew}")
            else:
                lines.append(f"vsetivli x{ins.rd}, {ins.avl}, e{ins.sew}")
        else:
            lines.append(_dis_scalar(ins))
    return "\n".join(lines) + ("\n" if lines else "")


def _dis_vector(ins: XvnmcInstr) -> str:
    if ins.form == "ex":
        return f"emvv v{ins.vd}, x{ins.s1}, x{ins.vs2}"
    if ins.form == "xe":
        return f"emvx x{ins.vd}, v{ins.vs2}, x{ins.s1}"
    name = f"{ins.mnem}.{ins.form}"
    if ins.ind:
        out = f"{name}.ind x{ins.vs2}"
        if ins.form == "vx":
            out += f", x{ins.s1}"
        elif ins.form == "vi":
            out += f", {_fmt_imm(ins.mnem, ins.s1)}"
        return out
    src = {"vv": f"v{ins.s1}", "vx": f"x{ins.s1}",
           "vi": _fmt_imm(ins.mnem, ins.s1)}[ins.form]
    if ins.mnem == "vmv":
        return f"{name} v{ins.vd}, {src}"
    return f"{name} v{ins.vd}, v{ins.vs2}, {src}"


def _dis_scalar(ins: Rv32Instr) -> str:
    op = ins.op
    if op in _SCALAR_R:
        return f"{op} x{ins.rd}, x{ins.rs1}, x{ins.rs2}"
    if op in _SCALAR_I or op == "jalr":
        return f"{op} x{ins.rd}, x{ins.rs1}, {ins.imm}"
    if op in _LOADS:
        return f"{op} x{ins.rd}, {ins.imm}(x{ins.rs1})"
    if op in _STORES:
        return f"{op} x{ins.rs2}, {ins.imm}(x{ins.rs1})"
    if op in _BRANCHES:
        return f"{op} x{ins.rs1}, x{ins.rs2}, {ins.imm:+d}"
    if op == "jal":
        return f"jal x{ins.rd}, {ins.imm:+d}"
    if op in ("lui", "auipc"):
        return f"{op} x{ins.rd}, 0x{ins.imm >> 12:X}"
    return op  # ecall / ebreak


# --- image files -----------------------------------------------------------


def save_image(words: list[int], path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".hex":
        path.write_text("".join(f"{w:08X}\n" for w in words))
    else:
        path.write_bytes(struct.pack(f"<{len(words)}I", *words))


def load_image(path: str | Path) -> list[int]:
    path = Path(path)
    if path.suffix == ".hex":
        return [int(line, 16) for line in path.read_text().split()]
    data = path.read_bytes()
    if len(data) % 4:
        raise ParseError("image is not word-aligned", 0)
    return list(struct.unpack(f"<{len(data) // 4}I", data))
