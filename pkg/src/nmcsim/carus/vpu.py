"""Vector processing unit: register file, functional execute, cost model.

The VRF is 4 x 8 KiB single-port banks, word-interleaved: word w lives in
bank w % 4, so a unit-stride vector spreads evenly and the per-word port
cost caps throughput. Execution cycles for one instruction:

    ceil(word_count / 4 lanes) * cost_per_word

with cost_per_word from the active timing preset (port-limited for plain
arithmetic, multiplier-limited for vmul/vmacc).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ElementIndexOutOfRange, InvalidVector
from ..oracle import to_signed
from .isa import UNSIGNED_IMM, VRF_BYTES, XvnmcInstr

_DTYPE = {8: np.uint8, 16: np.uint16, 32: np.uint32}

# multiplier: four 8-bit / two 16-bit / one 32-bit results per 4/2/3 cycles
_MULT_WORD = {8: 4, 16: 2, 32: 3}


@dataclass(frozen=True)
class TimingTable:
    """Per-word execution costs for one calibration preset."""

    name: str
    vmacc: dict[int, int]
    bootstrap: int = 300  # fixed kernel-launch overhead, see docs

    def cost_per_word(self, ins: XvnmcInstr, sew: int) -> int:
        m = ins.mnem
        if m == "vmacc":
            return self.vmacc[sew]
        if m == "vmul":
            floor = 3 if ins.form == "vv" else 2
            return max(floor, _MULT_WORD[sew])
        if m in ("vslideup", "vslidedown", "vslide1up", "vslide1down", "vmv"):
            return 2
        # plain lanewise arithmetic/logic: port-limited
        return 3 if ins.form == "vv" else 2


PRESETS = {
    # default: matches the measured silicon cycle counts
    "table-v": TimingTable("table-v", vmacc={8: 4, 16: 3, 32: 4}),
    # alternative calibrated to the stated 0.33 MAC/cycle/lane at 32-bit
    "text-0.33": TimingTable("text-0.33", vmacc={8: 4, 16: 3, 32: 3}),
}


def word_count(vl: int, sew: int) -> int:
    return -(-(vl * (sew // 8)) // 4)


def exec_cycles(table: TimingTable, ins: XvnmcInstr, sew: int, vl: int) -> int:
    if ins.form in ("ex", "xe"):
        return 2
    if vl == 0:
        return 1
    words_per_lane = -(-word_count(vl, sew) // 4)
    return words_per_lane * table.cost_per_word(ins, sew)


class VRF:
    """32 KiB vector register file; logical vectors are 128 B-aligned views."""

    def __init__(self) -> None:
        self.data = np.zeros(VRF_BYTES, dtype=np.uint8)

    def check_window(self, base: int, vl: int, sew: int) -> None:
        if base < 0 or base + vl * (sew // 8) > VRF_BYTES:
            raise InvalidVector(
                f"vector [{base}, {base + vl * (sew // 8)}) outside the 32 KiB file")

    def read(self, base: int, vl: int, sew: int) -> np.ndarray:
        """Elements as int64 unsigned values."""
        es = sew // 8
        return self.data[base:base + vl * es].view(_DTYPE[sew]).astype(np.int64)

    def write(self, base: int, vals: np.ndarray, sew: int) -> None:
        es = sew // 8
        mask = (1 << sew) - 1
        out = (np.asarray(vals, dtype=np.int64) & mask).astype(_DTYPE[sew])
        self.data[base:base + len(out) * es] = out.view(np.uint8)

    def read_elem(self, base: int, idx: int, sew: int) -> int:
        es = sew // 8
        off = base + idx * es
        return int.from_bytes(self.data[off:off + es].tobytes(), "little")

    def write_elem(self, base: int, idx: int, value: int, sew: int) -> None:
        es = sew // 8
        off = base + idx * es
        self.data[off:off + es] = np.frombuffer(
            (value & ((1 << sew) - 1)).to_bytes(es, "little"), dtype=np.uint8)

    # host window (memory mode): flat word access
    def read_word(self, byte_off: int) -> int:
        return int.from_bytes(self.data[byte_off:byte_off + 4].tobytes(), "little")

    def write_word(self, byte_off: int, word: int) -> None:
        self.data[byte_off:byte_off + 4] = np.frombuffer(
            (word & 0xFFFFFFFF).to_bytes(4, "little"), dtype=np.uint8)


def _lane_counts(base: int, words: int) -> list[int]:
    """How many of `words` consecutive words land in each of the 4 lanes."""
    out = [0, 0, 0, 0]
    first = base // 4
    for k in range(4):
        out[(first + k) % 4] = (words + 3 - k) // 4
    return out


# per-word (read, write) port counts by instruction kind
def _port_profile(ins: XvnmcInstr) -> tuple[int, int]:
    if ins.mnem == "vmacc":
        return (3, 1) if ins.form == "vv" else (2, 1)
    if ins.mnem == "vmv":
        return (1, 1) if ins.form == "vv" else (0, 1)
    if ins.form == "vv":
        return (2, 1)
    return (1, 1)  # vx/vi and slides


def execute(vrf: VRF, events, ins: XvnmcInstr,
            bases: tuple[int, int, int], scalar: int, vl: int, sew: int,
            elem_idx: int = 0) -> int | None:
    """Apply one vector instruction functionally and count port events.

    `bases` are resolved byte offsets (vd, vs2, vs1); `scalar` is the GPR
    value (vx/ex) or raw imm5 (vi); `elem_idx` carries the element index
    GPR for emvv/emvx. Returns the GPR result for emvx, else None.
    """
    vd_b, vs2_b, vs1_b = bases
    mask = (1 << sew) - 1
    m, form = ins.mnem, ins.form

    if form == "ex":  # emvv: vd[rs2] = rs1
        if elem_idx >= vl:
            raise ElementIndexOutOfRange(f"emvv index {elem_idx} >= vl {vl}")
        vrf.check_window(vd_b, vl, sew)
        vrf.write_elem(vd_b, elem_idx, scalar, sew)
        word = (vd_b + elem_idx * (sew // 8)) // 4
        events.sram_reads[word % 4] += 1  # read-modify-write of the word
        events.sram_writes[word % 4] += 1
        return None
    if form == "xe":  # emvx: rd = sext(vs2[rs1])
        if elem_idx >= vl:
            raise ElementIndexOutOfRange(f"emvx index {elem_idx} >= vl {vl}")
        vrf.check_window(vs2_b, vl, sew)
        raw = vrf.read_elem(vs2_b, elem_idx, sew)
        word = (vs2_b + elem_idx * (sew // 8)) // 4
        events.sram_reads[word % 4] += 1
        if raw & (1 << (sew - 1)):
            raw -= 1 << sew
        return raw & 0xFFFFFFFF

    if vl == 0:
        return None

    for b, used in ((vd_b, True), (vs2_b, m != "vmv"),
                    (vs1_b, form == "vv")):
        if used:
            vrf.check_window(b, vl, sew)

    a = vrf.read(vs2_b, vl, sew)  # primary vector source
    if form == "vv":
        b_op = vrf.read(vs1_b, vl, sew)
    elif form == "vx":
        b_op = np.int64(scalar & 0xFFFFFFFF)
    else:  # vi: sign- or zero-extended per instruction class
        raw5 = scalar & 0x1F
        b_op = np.int64(raw5 if m in UNSIGNED_IMM else (raw5 - 32 if raw5 & 0x10 else raw5))

    if m == "vadd":
        out = a + b_op
    elif m == "vsub":
        out = a - b_op
    elif m == "vmul":
        out = to_signed(a, sew) * to_signed(b_op, sew)
    elif m == "vmacc":
        acc = vrf.read(vd_b, vl, sew)
        out = acc + to_signed(a, sew) * to_signed(b_op, sew)
        events.macs += vl
    elif m == "vand":
        out = a & (b_op & mask)
    elif m == "vor":
        out = a | (b_op & mask)
    elif m == "vxor":
        out = a ^ (b_op & mask)
    elif m in ("vmin", "vmax"):
        sa, sb = to_signed(a, sew), to_signed(b_op, sew)
        out = np.minimum(sa, sb) if m == "vmin" else np.maximum(sa, sb)
    elif m in ("vminu", "vmaxu"):
        ub = b_op & mask
        out = np.minimum(a, ub) if m == "vminu" else np.maximum(a, ub)
    elif m in ("vsll", "vsrl", "vsra"):
        sh = b_op & (sew - 1)  # low log2(sew) bits select the shift amount
        if m == "vsll":
            out = a << sh
        elif m == "vsrl":
            out = a >> sh
        else:
            out = to_signed(a, sew) >> sh
    elif m == "vmv":
        if form == "vv":
            out = vrf.read(vs1_b, vl, sew)
        else:
            out = np.full(vl, int(b_op) & mask, dtype=np.int64)
    elif m == "vslideup":
        ofs = int(b_op) & 0xFFFFFFFF if form == "vx" else int(b_op)
        if ofs < vl:
            dst = vrf.read(vd_b, vl, sew)
            dst[ofs:] = a[: vl - ofs]
            out = dst
        else:
            out = vrf.read(vd_b, vl, sew)  # nothing moves
    elif m == "vslidedown":
        ofs = int(b_op) & 0xFFFFFFFF if form == "vx" else int(b_op)
        out = np.zeros(vl, dtype=np.int64)
        if ofs < vl:
            out[: vl - ofs] = a[ofs:]  # source elements beyond vl read as 0
    elif m == "vslide1up":
        out = np.empty(vl, dtype=np.int64)
        out[0] = int(b_op) & mask
        out[1:] = a[:-1]
    elif m == "vslide1down":
        out = np.empty(vl, dtype=np.int64)
        out[:-1] = a[1:]
        out[-1] = int(b_op) & mask
    else:
        raise AssertionError(f"unhandled vector op {m}")

    if m != "vmacc":
        events.alu_ops += vl
    vrf.write(vd_b, out & mask, sew)

    words = word_count(vl, sew)
    rd_w, wr_w = _port_profile(ins)
    for lane, n in enumerate(_lane_counts(vd_b, words)):
        events.sram_reads[lane] += rd_w * n
        events.sram_writes[lane] += wr_w * n
    return None
