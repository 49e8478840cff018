"""Assembler for Caesar command streams.

Programs are straight-line: one command per line, executed in order.

    csrw 16               # element width 8|16|32
    add  0x5, 0x10, 0x20  # dest, src1, src2 (word offsets)
    mac  0x10, 0x1005     # accumulate ops may omit the unused dest

A stream is an ordered list of (word_offset, data) bus writes. On disk:
text (`OFFS DATA` hex pairs, one per line) or a JSON array of pairs;
picked by file extension (.json).
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import OffsetOutOfRange, ParseError, UnknownMnemonic
from .isa import CSR_WIDTHS, CaesarInstr, Opcode, encode, decode

Stream = list[tuple[int, int]]

MNEMONICS = {op.name.lower(): op for op in Opcode}
MNEMONICS["slr"] = Opcode.SLR  # canonical name; SLR is the logical right shift

_WIDTH_SEL = {8: 0, 16: 1, 32: 2}
# ops where the destination word offset is meaningful
_HAS_DEST = {op for op in Opcode if op not in
             (Opcode.MAC_INIT, Opcode.MAC, Opcode.DOT_INIT, Opcode.DOT, Opcode.CSRW)}

MAX_OFFSET = 1 << 13


def _int_field(tok: str, lineno: int, col: int) -> int:
    try:
        return int(tok, 0)
    except ValueError:
        raise ParseError(f"bad numeric operand {tok!r}", lineno, col) from None


def _check_offset(val: int, lineno: int, col: int) -> int:
    if not 0 <= val < MAX_OFFSET:
        raise OffsetOutOfRange(
            f"offset 0x{val:X} outside the 8192-word space", lineno, col)
    return val


def assemble(text: str) -> Stream:
    """Assemble source text into an ordered command stream."""
    stream: Stream = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mnem, _, rest = line.partition(" ")
        mnem = mnem.lower()
        if mnem not in MNEMONICS:
            raise UnknownMnemonic(f"unknown mnemonic {mnem!r}", lineno,
                                  raw.lower().find(mnem) + 1)
        op = MNEMONICS[mnem]
        toks = [t.strip() for t in rest.split(",") if t.strip()] if rest.strip() else []
        col = len(mnem) + 2

        if op is Opcode.CSRW:
            if len(toks) != 1:
                raise ParseError("csrw takes one operand (8|16|32)", lineno, col)
            width = _int_field(toks[0], lineno, col)
            if width not in _WIDTH_SEL:
                raise ParseError(f"unsupported element width {width}", lineno, col)
            stream.append((0, encode(CaesarInstr(op, 0, src1=_WIDTH_SEL[width]))))
            continue

        if op in _HAS_DEST:
            if len(toks) != 3:
                raise ParseError(f"{mnem} takes dest, src1, src2", lineno, col)
            dest, src1, src2 = (_int_field(t, lineno, col) for t in toks)
        else:
            if len(toks) == 3:
                dest, src1, src2 = (_int_field(t, lineno, col) for t in toks)
            elif len(toks) == 2:
                dest = 0
                src1, src2 = (_int_field(t, lineno, col) for t in toks)
            else:
                raise ParseError(f"{mnem} takes src1, src2 (optional leading dest)",
                                 lineno, col)
        for v in (dest, src1, src2):
            _check_offset(v, lineno, col)
        stream.append((dest, encode(CaesarInstr(op, dest, src1=src1, src2=src2))))
    return stream


def disassemble(stream: Stream) -> str:
    """Inverse of assemble for canonical streams (CSRW carried at offset 0)."""
    lines = []
    for offset, data in stream:
        instr = decode(data, offset)
        if instr.op is Opcode.CSRW:
            lines.append(f"csrw {CSR_WIDTHS[instr.src1 & 0x3]}")
        else:
            name = "slr" if instr.op is Opcode.SLR else instr.op.name.lower()
            lines.append(f"{name} 0x{instr.dest:X}, 0x{instr.src1:X}, 0x{instr.src2:X}")
    return "\n".join(lines) + ("\n" if lines else "")


def save_stream(stream: Stream, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps([[o, d] for o, d in stream]) + "\n")
    else:
        path.write_text("".join(f"{o:04X} {d:08X}\n" for o, d in stream))


def load_stream(path: str | Path) -> Stream:
    path = Path(path)
    if path.suffix == ".json":
        return [(int(o), int(d)) for o, d in json.loads(path.read_text())]
    out: Stream = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'OFFSET DATA' hex pair", lineno)
        out.append((int(parts[0], 16), int(parts[1], 16)))
    return out
