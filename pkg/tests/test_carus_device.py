"""Vector-unit timing, scalar pipeline, and launch protocol checks."""

import pytest

from nmcsim import fabric
from nmcsim.carus import asm
from nmcsim.carus.device import CarusDevice
from nmcsim.carus.isa import VLMAX, vtype_bits
from nmcsim.errors import KernelFault, Timeout

TERM = "    lui x1, 0x8\n    sw x0, 0(x1)\n"


def _cycles(body: str, preset: str = "table-v", loads=(), device=None) -> int:
    dev = device or CarusDevice(preset=preset)
    image = asm.assemble(body + TERM)
    for base, words in loads:
        fabric.load_words(dev, base, words, 0)
    res = fabric.run_carus_kernel(dev, image)
    return res.kernel_cycles


def _vec_prog(width: int, vl: int, ops: str) -> str:
    return (f"    li x3, {vl}\n    li x9, {vtype_bits(width)}\n"
            f"    vsetvl x5, x3, x9\n{ops}")


def _marginal(width: int, vl: int, op_line: str, preset="table-v") -> int:
    """Execution cycles of one vector op: the cost of a second copy."""
    one = _vec_prog(width, vl, op_line)
    two = _vec_prog(width, vl, op_line + op_line)
    return _cycles(two, preset) - _cycles(one, preset)


def test_vmacc_vx_w8_full_register():
    # 256 element-words over 4 lanes at 4 cycles per word-group
    assert _marginal(8, 1024, "    vmacc.vx v1, v0, x2\n") == 256


def test_vmax_vx_w8_full_register():
    assert _marginal(8, 1024, "    vmax.vx v1, v0, x2\n") == 128


def test_vadd_vv_w32_full_register():
    assert _marginal(32, 256, "    vadd.vv v2, v1, v0\n") == 192


def test_vmacc_width_costs_differ():
    # per-word multiplier cost: W16 beats both W8 and W32
    w8 = _marginal(8, 1024, "    vmacc.vx v1, v0, x2\n")
    w16 = _marginal(16, 512, "    vmacc.vx v1, v0, x2\n")
    w32 = _marginal(32, 256, "    vmacc.vx v1, v0, x2\n")
    assert w16 < w8 and w16 < w32


def test_text_preset_speeds_up_w32_mac():
    table_v = _marginal(32, 256, "    vmacc.vx v1, v0, x2\n", "table-v")
    text = _marginal(32, 256, "    vmacc.vx v1, v0, x2\n", "text-0.33")
    assert table_v == 256 and text == 192


def test_scalars_hide_under_vector_execution():
    base = _vec_prog(8, 1024, "    vmul.vv v2, v1, v0\n")
    padded = base + "    addi x6, x6, 1\n" * 20
    assert _cycles(padded) == _cycles(base)


def test_scalar_cpi_is_one():
    trivial = _cycles("")
    assert _cycles("    addi x6, x6, 1\n" * 20) == trivial + 20


def test_emvx_waits_for_inflight_commit():
    base = _vec_prog(8, 1024, "    vmul.vv v2, v1, v0\n")
    with_fetch = base + "    emvx x13, v0, x0\n"
    # the fetch stalls to the running op's commit, then costs its 2 transfer
    # cycles; the 2-instruction terminator no longer hides under the drain
    assert _cycles(with_fetch) - _cycles(base) == 2 + 2


def test_emvx_after_commit_costs_transfer_only():
    base = _vec_prog(8, 16, "    vmul.vv v2, v1, v0\n") \
        + "    addi x6, x6, 1\n" * 40
    with_fetch = base + "    emvx x13, v0, x0\n"
    # vector op long since committed: only the two transfer cycles remain
    assert _cycles(with_fetch) - _cycles(base) == 2


def test_vslide1down_semantics():
    dev = CarusDevice()
    prog = _vec_prog(32, 4, "    li x10, 9\n    vslide1down.vx v1, v0, x10\n")
    _cycles(prog, device=dev, loads=[(0, [1, 2, 3, 4])])
    out = [dev.vrf.read_word(1024 + 4 * i) for i in range(4)]
    assert out == [2, 3, 4, 9]


def test_vl_clamps_to_vlmax():
    dev = CarusDevice()
    prog = _vec_prog(16, 4000, "")
    _cycles(prog, device=dev)
    assert dev.vl == VLMAX[16] and dev.sew == 16


def test_bootstrap_constant_sets_floor():
    quick = CarusDevice(bootstrap=0)
    slow = CarusDevice(bootstrap=500)
    assert _cycles("", device=slow) - _cycles("", device=quick) == 500


def test_per_lane_event_counts():
    dev = CarusDevice()
    _cycles(_vec_prog(8, 1024, "    vmacc.vx v1, v0, x2\n"), device=dev)
    # per lane: 64 words, each reading vs2 + old vd and writing vd once
    assert dev.events.sram_reads == [128] * 4
    assert dev.events.sram_writes == [64] * 4


def test_done_and_ack_protocol():
    dev = CarusDevice()
    res = fabric.run_carus_kernel(dev, asm.assemble(TERM))
    assert res.kernel_cycles > 0 and not dev.done  # status read acked done
    assert res.polls >= 1 and not res.irq_used


def test_irq_mode_skips_polling():
    dev = CarusDevice()
    res = fabric.run_carus_kernel(dev, asm.assemble(TERM), use_irq=True)
    assert res.irq_used and res.polls == 0


def test_runaway_kernel_times_out():
    dev = CarusDevice(max_cycles=5000)
    with pytest.raises(Timeout):
        fabric.run_carus_kernel(dev, asm.assemble("spin:\n    j spin\n"))


def test_illegal_instruction_faults():
    dev = CarusDevice()
    with pytest.raises(KernelFault):
        fabric.run_carus_kernel(dev, [0xFFFFFFFF, 0])
