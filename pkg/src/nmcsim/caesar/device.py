"""Transaction-level model of the Caesar macro.

Timing is an event recurrence over instructions rather than a per-cycle
loop; both give identical counts for this microarchitecture. Key rules:

 - decode holds an instruction for 1 cycle, operand fetch takes 1 cycle
   when the sources sit in different banks and 2 when they share one
   (single-port SRAMs), the ALU takes 2, writeback 1;
 - the next command is granted when the previous one leaves decode for
   the ALU, giving 2 (cross-bank) or 3 (same-bank) cycles per op in the
   steady state;
 - a command whose source has a pending writeback stalls in decode until
   that writeback lands (no forwarding network);
 - reads issued in computing mode drain the pipeline first.

All device state (clock, pipeline horizon, accumulators) lives here; the
host fabric supplies bus arrival times.
"""

from __future__ import annotations

from .. import simd
from ..errors import AddressOutOfRange
from ..events import EventCounters
from .isa import (
    ALU_OP,
    CSR_WIDTHS,
    Opcode,
    WORDS_PER_BANK,
    decode,
)

TOTAL_WORDS = 2 * WORDS_PER_BANK  # 32 KiB


def bank_of(offset: int) -> int:
    return 0 if offset < WORDS_PER_BANK else 1


class CaesarDevice:
    """One 32 KiB macro: two 16 KiB banks behind an SRAM-like port."""

    def __init__(self) -> None:
        self.imc = False
        self.mem: list[int] = [0] * TOTAL_WORDS
        self.width = 8
        self.lane_acc: list[int] = [0, 0, 0, 0]
        self.dot_acc = 0
        self.events = EventCounters()
        # timeline (absolute device cycles)
        self.decode_free = 0
        self.pipe_done = 0
        self._pending_wb: dict[int, int] = {}

    # -- host port ----------------------------------------------------------

    def set_mode(self, imc: bool, t: int = 0) -> int:
        """Switch memory/computing mode. Returns the cycle the switch lands."""
        start = max(t, self.pipe_done, self.decode_free)
        self.imc = imc
        self.events.bus_writes += 1
        self.decode_free = start + 2
        self.pipe_done = max(self.pipe_done, start + 2)
        return start + 2

    def write(self, offset: int, word: int, t: int = 0) -> int:
        """Bus write at cycle t. Data store or command dispatch, per mode.

        Returns the cycle after which the bus may issue the next beat.
        """
        offset &= TOTAL_WORDS - 1
        word &= simd.MASK32
        self.events.bus_writes += 1
        if not self.imc:
            self.mem[offset] = word
            self.events.sram_writes[bank_of(offset)] += 1
            return t + 1
        return self._dispatch(offset, word, t)

    def read(self, offset: int, t: int = 0) -> tuple[int, int]:
        """Bus read; in computing mode the pipeline drains first."""
        offset &= TOTAL_WORDS - 1
        start = max(t, self.pipe_done) if self.imc else t
        self.events.bus_reads += 1
        self.events.sram_reads[bank_of(offset)] += 1
        return self.mem[offset], start + 1

    # -- pipeline -------------------------------------------------------------

    def _dispatch(self, dest: int, word: int, t: int) -> int:
        instr = decode(word, dest)
        op = instr.op
        ev = self.events
        ev.instructions += 1

        grant = max(t, self.decode_free)
        if op is Opcode.CSRW:
            sel = instr.src1 & 0x3
            if sel not in CSR_WIDTHS:
                raise AddressOutOfRange(f"reserved width selector {sel}")
            self.width = CSR_WIDTHS[sel]
            self.decode_free = grant + 2
            self.pipe_done = max(self.pipe_done, grant + 2)
            ev.stall_cycles += grant - t
            return grant + 1

        # operand ops stall decode until any pending producer writes back
        for src in (instr.src1, instr.src2):
            w = self._pending_wb.get(src)
            if w is not None and w > grant:
                grant = w
        ev.stall_cycles += grant - t

        fetch = 1 if bank_of(instr.src1) != bank_of(instr.src2) else 2
        alu_start = grant + 1 + fetch
        done = alu_start + 2  # 2-cycle ALU; writeback ops store in this cycle

        self.decode_free = alu_start
        a = self.mem[instr.src1]
        b = self.mem[instr.src2]
        ev.sram_reads[bank_of(instr.src1)] += 1
        ev.sram_reads[bank_of(instr.src2)] += 1

        n = simd.lanes(self.width)
        wrote = False
        if op in ALU_OP:
            self.mem[instr.dest] = simd.packed_binop(ALU_OP[op], a, b, self.width)
            ev.alu_ops += n
            wrote = True
        elif op is Opcode.MAC_INIT:
            self.lane_acc = simd.packed_mac([0, 0, 0, 0], a, b, self.width)
            ev.macs += n
        elif op is Opcode.MAC:
            self.lane_acc = simd.packed_mac(self.lane_acc, a, b, self.width)
            ev.macs += n
        elif op is Opcode.MAC_STORE:
            self.lane_acc = simd.packed_mac(self.lane_acc, a, b, self.width)
            self.mem[instr.dest] = simd.pack_acc(self.lane_acc, self.width)
            ev.macs += n
            wrote = True
        elif op is Opcode.DOT_INIT:
            self.dot_acc = simd.packed_dot(0, a, b, self.width)
            ev.macs += n
        elif op is Opcode.DOT:
            self.dot_acc = simd.packed_dot(self.dot_acc, a, b, self.width)
            ev.macs += n
        else:  # DOT_STORE
            self.dot_acc = simd.packed_dot(self.dot_acc, a, b, self.width)
            self.mem[instr.dest] = self.dot_acc
            ev.macs += n
            wrote = True

        if wrote:
            ev.sram_writes[bank_of(instr.dest)] += 1
            self._pending_wb[instr.dest] = done
            self.pipe_done = max(self.pipe_done, done + 1)
        else:
            self.pipe_done = max(self.pipe_done, done)
        return grant + 1

    # -- helpers for the fabric ----------------------------------------------

    def load_words(self, base: int, words: list[int]) -> None:
        """Direct (un-timed) image load used by tests; kernels go via the bus."""
        for i, w in enumerate(words):
            self.mem[(base + i) & (TOTAL_WORDS - 1)] = w & simd.MASK32

    def dump_words(self, base: int, count: int) -> list[int]:
        return [self.mem[(base + i) & (TOTAL_WORDS - 1)] for i in range(count)]
