"""Event counters collected by both device models."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class EventCounters:
    """Micro-architectural event tallies for one device run.

    sram_reads/sram_writes are per-bank (Caesar: 2 banks; Carus: 4 VRF lanes).
    Bus counters see host-side traffic only.
    """

    sram_reads: list[int] = field(default_factory=list)
    sram_writes: list[int] = field(default_factory=list)
    bus_reads: int = 0
    bus_writes: int = 0
    instructions: int = 0
    alu_ops: int = 0
    macs: int = 0
    stall_cycles: int = 0

    def __post_init__(self) -> None:
        if not self.sram_reads:
            self.sram_reads = [0, 0]
        if not self.sram_writes:
            self.sram_writes = [0, 0]

    @property
    def total_sram_reads(self) -> int:
        return sum(self.sram_reads)

    @property
    def total_sram_writes(self) -> int:
        return sum(self.sram_writes)

    def as_dict(self) -> dict:
        return {
            "sram_reads": list(self.sram_reads),
            "sram_writes": list(self.sram_writes),
            "bus_reads": self.bus_reads,
            "bus_writes": self.bus_writes,
            "instructions": self.instructions,
            "alu_ops": self.alu_ops,
            "macs": self.macs,
            "stall_cycles": self.stall_cycles,
        }
