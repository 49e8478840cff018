"""The Carus macro: little scalar core driving a 4-lane VPU over the VRF.

Memory map seen by the host:
  computing mode (imc=1): 0x0000-0x01FF instruction/data memory (512 B),
      0x8000 control/status (bit0 start, bit1 done, bit2 irq_enable),
      0x8004 boot PC; anything else AddressOutOfRange.
  memory mode (imc=0): the VRF as a flat 32 KiB SRAM, 1 cycle per word.

A kernel launch simulates the eCPU to completion (store to 0x8000 from the
inside). Timing model: the scalar core retires one instruction per cycle;
a vector instruction additionally needs a free slot (two in flight) and
executes in order on the VPU; emvv/emvx first drain everything in flight
(the only data hazard the scoreboard resolves) and then take their move
cost. Pure scalar work therefore hides under vector execution, which is
what the measured kernels rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import (
    AddressOutOfRange,
    IllegalInstruction,
    KernelFault,
    Timeout,
)
from ..events import EventCounters
from . import vpu
from .isa import (
    Rv32Instr,
    VLMAX,
    VsetInstr,
    XvnmcInstr,
    decode,
    resolve_indirect,
    sew_from_vtype,
)

EMEM_BYTES = 512
CTRL_ADDR = 0x8000
BOOT_PC_ADDR = 0x8004
SLOT_BYTES = 128
REG_BYTES = 1024  # one architectural vector register

CTRL_START = 1 << 0
CTRL_DONE = 1 << 1
CTRL_IRQ_EN = 1 << 2


@dataclass
class KernelRun:
    cycles: int
    steps: int  # retired eCPU instructions


class CarusDevice:
    def __init__(self, preset: str = "table-v", bootstrap: int | None = None,
                 max_cycles: int = 10_000_000) -> None:
        self.table = vpu.PRESETS[preset]
        self.bootstrap = self.table.bootstrap if bootstrap is None else bootstrap
        self.max_cycles = max_cycles
        self.imc = False
        self.emem = bytearray(EMEM_BYTES)
        self.vrf = vpu.VRF()
        self.events = EventCounters(sram_reads=[0] * 4, sram_writes=[0] * 4)
        self.done = False
        self.irq_enable = False
        self.boot_pc = 0
        self.last_run: KernelRun | None = None
        # architectural vector state (persists across kernels)
        self.vl = 0
        self.sew = 8

    @property
    def irq(self) -> bool:
        return self.done and self.irq_enable

    # -- host port -----------------------------------------------------------

    def host_write(self, addr: int, word: int, t: int = 0) -> int:
        word &= 0xFFFFFFFF
        self.events.bus_writes += 1
        if not self.imc:
            if not 0 <= addr <= vpu.VRF_BYTES - 4:
                raise AddressOutOfRange(f"0x{addr:X} outside the 32 KiB window")
            self.vrf.write_word(addr, word)
            return t + 1
        if 0 <= addr <= EMEM_BYTES - 4:
            self.emem[addr:addr + 4] = word.to_bytes(4, "little")
            return t + 1
        if addr == CTRL_ADDR:
            self.irq_enable = bool(word & CTRL_IRQ_EN)
            if word & CTRL_DONE:
                self.done = False  # explicit ack
            if word & CTRL_START:
                self.last_run = self._run()
                self.done = True
                return t + 1 + self.last_run.cycles
            return t + 1
        if addr == BOOT_PC_ADDR:
            if word % 4 or word >= EMEM_BYTES:
                raise AddressOutOfRange(f"boot pc 0x{word:X} not in instruction memory")
            self.boot_pc = word
            return t + 1
        raise AddressOutOfRange(f"config write to 0x{addr:X}")

    def host_read(self, addr: int, t: int = 0) -> tuple[int, int]:
        self.events.bus_reads += 1
        if not self.imc:
            if not 0 <= addr <= vpu.VRF_BYTES - 4:
                raise AddressOutOfRange(f"0x{addr:X} outside the 32 KiB window")
            return self.vrf.read_word(addr), t + 1
        if 0 <= addr <= EMEM_BYTES - 4:
            return int.from_bytes(self.emem[addr:addr + 4], "little"), t + 1
        if addr == CTRL_ADDR:
            status = (CTRL_DONE if self.done else 0) | (CTRL_IRQ_EN if self.irq_enable else 0)
            self.done = False  # read acknowledges completion
            return status, t + 1
        if addr == BOOT_PC_ADDR:
            return self.boot_pc, t + 1
        raise AddressOutOfRange(f"config read from 0x{addr:X}")

    def steal_cycles(self, count: int) -> None:
        """Account host memory-mode traffic that interleaved with a run."""
        if self.last_run is not None:
            self.last_run.cycles += count
        self.events.stall_cycles += count

    # -- kernel execution ------------------------------------------------------

    def _fault(self, msg: str, pc: int):
        raise KernelFault(f"pc=0x{pc:03X}: {msg}")

    def _run(self) -> KernelRun:
        emem = self.emem
        regs = [0] * 16
        pc = self.boot_pc
        now = self.bootstrap
        inflight: list[int] = []  # exec-end times, oldest first
        last_end = 0
        ev = self.events
        table = self.table
        steps = 0
        max_cycles = self.max_cycles

        while True:
            if now > max_cycles:
                raise Timeout(f"kernel exceeded {max_cycles} cycles")
            if pc % 4 or not 0 <= pc < EMEM_BYTES:
                self._fault("fetch outside instruction memory", pc)
            word = int.from_bytes(emem[pc:pc + 4], "little")
            try:
                ins = decode(word)
            except IllegalInstruction as e:
                self._fault(str(e), pc)
            steps += 1
            ev.instructions += 1
            next_pc = pc + 4

            if isinstance(ins, Rv32Instr):
                op = ins.op
                now += 1
                if op in _SCALAR_EXEC:
                    val = _SCALAR_EXEC[op](regs[ins.rs1], regs[ins.rs2], ins.imm)
                    if ins.rd:
                        regs[ins.rd] = val
                elif op == "lui":
                    if ins.rd:
                        regs[ins.rd] = ins.imm
                elif op == "auipc":
                    if ins.rd:
                        regs[ins.rd] = (pc + ins.imm) & 0xFFFFFFFF
                elif op in _BR_EXEC:
                    if _BR_EXEC[op](regs[ins.rs1], regs[ins.rs2]):
                        next_pc = pc + ins.imm
                elif op == "jal":
                    if ins.rd:
                        regs[ins.rd] = (pc + 4) & 0xFFFFFFFF
                    next_pc = pc + ins.imm
                elif op == "jalr":
                    if ins.rd:
                        regs[ins.rd] = (pc + 4) & 0xFFFFFFFF
                    next_pc = (regs[ins.rs1] + ins.imm) & 0xFFFFFFFE
                elif op[0] == "l":  # loads
                    addr = (regs[ins.rs1] + ins.imm) & 0xFFFFFFFF
                    val = self._load(op, addr, pc)
                    if ins.rd:
                        regs[ins.rd] = val
                else:  # stores / ecall / ebreak
                    if op in ("ecall", "ebreak"):
                        self._fault(op, pc)
                    addr = (regs[ins.rs1] + ins.imm) & 0xFFFFFFFF
                    if addr == CTRL_ADDR and op == "sw":
                        # drain, then the store cycle itself ends the kernel
                        if inflight:
                            now = max(now, inflight[-1])
                        return KernelRun(cycles=now, steps=steps)
                    self._store(op, addr, regs[ins.rs2], pc)
                pc = next_pc
                continue

            if isinstance(ins, VsetInstr):
                if len(inflight) == 2:
                    wake = inflight.pop(0)
                    ev.stall_cycles += max(0, wake - now)
                    now = max(now, wake)
                elif inflight and inflight[0] <= now:
                    inflight.pop(0)
                now += 1  # issue cycle; config takes effect immediately
                if ins.kind == "vsetivli":
                    avl = ins.avl
                    self.sew = ins.sew
                elif ins.kind == "vsetvli":
                    self.sew = ins.sew
                    avl = None if ins.avl == 0 else regs[ins.avl]
                else:
                    try:
                        self.sew = sew_from_vtype(regs[ins.rs2])
                    except IllegalInstruction as e:
                        self._fault(str(e), pc)
                    avl = None if ins.avl == 0 else regs[ins.avl]
                vlmax = VLMAX[self.sew]
                if avl is None:
                    # rs1=x0: keep vl (rd=x0) or ask for the maximum
                    self.vl = min(self.vl, vlmax) if ins.rd == 0 else vlmax
                else:
                    self.vl = min(avl, vlmax)
                if ins.rd:
                    regs[ins.rd] = self.vl
                start = max(now, last_end)
                last_end = start + 1
                inflight.append(last_end)
                pc = next_pc
                continue

            # vector operation
            assert isinstance(ins, XvnmcInstr)
            if ins.form in ("ex", "xe"):
                # drains every in-flight op, then the 2-cycle element move
                if inflight:
                    drain = inflight[-1]
                    ev.stall_cycles += max(0, drain - now)
                    now = max(now, drain)
                    inflight.clear()
                now = max(now, last_end) + 2
                last_end = max(last_end, now)
                try:
                    if ins.form == "ex":
                        res = vpu.execute(self.vrf, ev, ins,
                                          (ins.vd * REG_BYTES, 0, 0),
                                          regs[ins.s1], self.vl, self.sew,
                                          elem_idx=regs[ins.vs2])
                    else:
                        res = vpu.execute(self.vrf, ev, ins,
                                          (0, ins.vs2 * REG_BYTES, 0),
                                          0, self.vl, self.sew,
                                          elem_idx=regs[ins.s1])
                        if ins.vd:
                            regs[ins.vd] = res
                except IllegalInstruction as e:
                    self._fault(str(e), pc)
                pc = next_pc
                continue

            if len(inflight) == 2:
                wake = inflight.pop(0)
                ev.stall_cycles += max(0, wake - now)
                now = max(now, wake)
            elif inflight and inflight[0] <= now:
                inflight.pop(0)
            now += 1  # issue cycle

            if ins.ind:
                d, s2, s1v = resolve_indirect(ins, regs[ins.vs2])
                bases = (d * SLOT_BYTES, s2 * SLOT_BYTES, s1v * SLOT_BYTES)
            else:
                bases = (ins.vd * REG_BYTES, ins.vs2 * REG_BYTES,
                         (ins.s1 * REG_BYTES) if ins.form == "vv" else 0)
            scalar = regs[ins.s1] if ins.form == "vx" else ins.s1
            vpu.execute(self.vrf, ev, ins, bases, scalar, self.vl, self.sew)

            start = max(now, last_end)
            last_end = start + vpu.exec_cycles(table, ins, self.sew, self.vl)
            inflight.append(last_end)
            pc = next_pc

    # -- eCPU memory space ---------------------------------------------------

    def _load(self, op: str, addr: int, pc: int) -> int:
        size = {"lb": 1, "lbu": 1, "lh": 2, "lhu": 2, "lw": 4}[op]
        if addr == CTRL_ADDR and size == 4:
            return CTRL_DONE if self.done else 0
        if addr % size or not 0 <= addr <= EMEM_BYTES - size:
            self._fault(f"{op} from 0x{addr:X}", pc)
        val = int.from_bytes(self.emem[addr:addr + size], "little")
        if op in ("lb", "lh") and val & (1 << (8 * size - 1)):
            val -= 1 << (8 * size)
        return val & 0xFFFFFFFF

    def _store(self, op: str, addr: int, value: int, pc: int) -> None:
        size = {"sb": 1, "sh": 2, "sw": 4}[op]
        if addr % size or not 0 <= addr <= EMEM_BYTES - size:
            self._fault(f"{op} to 0x{addr:X}", pc)
        self.emem[addr:addr + size] = (value & ((1 << (8 * size)) - 1)).to_bytes(
            size, "little")


def _u32(x: int) -> int:
    return x & 0xFFFFFFFF


def _s32(x: int) -> int:
    x &= 0xFFFFFFFF
    return x - (1 << 32) if x >> 31 else x


_SCALAR_EXEC = {
    "addi": lambda a, b, imm: _u32(a + imm),
    "slti": lambda a, b, imm: int(_s32(a) < imm),
    "sltiu": lambda a, b, imm: int(a < _u32(imm)),
    "xori": lambda a, b, imm: _u32(a ^ imm),
    "ori": lambda a, b, imm: _u32(a | imm),
    "andi": lambda a, b, imm: _u32(a & imm),
    "slli": lambda a, b, imm: _u32(a << imm),
    "srli": lambda a, b, imm: a >> imm,
    "srai": lambda a, b, imm: _u32(_s32(a) >> imm),
    "add": lambda a, b, imm: _u32(a + b),
    "sub": lambda a, b, imm: _u32(a - b),
    "sll": lambda a, b, imm: _u32(a << (b & 31)),
    "slt": lambda a, b, imm: int(_s32(a) < _s32(b)),
    "sltu": lambda a, b, imm: int(a < b),
    "xor": lambda a, b, imm: _u32(a ^ b),
    "srl": lambda a, b, imm: a >> (b & 31),
    "sra": lambda a, b, imm: _u32(_s32(a) >> (b & 31)),
    "or": lambda a, b, imm: _u32(a | b),
    "and": lambda a, b, imm: _u32(a & b),
}

_BR_EXEC = {
    "beq": lambda a, b: a == b,
    "bne": lambda a, b: a != b,
    "blt": lambda a, b: _s32(a) < _s32(b),
    "bge": lambda a, b: _s32(a) >= _s32(b),
    "bltu": lambda a, b: a < b,
    "bgeu": lambda a, b: a >= b,
}
