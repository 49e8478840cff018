"""Bus protocol: mode gating, launch accounting, scenarios, determinism."""

import pytest

from nmcsim import fabric
from nmcsim.caesar.device import CaesarDevice
from nmcsim.caesar.isa import CaesarInstr, Opcode, encode
from nmcsim.carus import asm
from nmcsim.carus.device import CarusDevice
from nmcsim.errors import DeviceRejected, ProgramTooLarge

TERM = asm.assemble("lui x1, 0x8\nsw x0, 0(x1)")


def _add_stream(n):
    return [(2048 + i, encode(CaesarInstr(Opcode.ADD, 2048 + i, i, 4096 + i)))
            for i in range(n)]


def test_command_stream_needs_computing_mode():
    dev = CaesarDevice()
    with pytest.raises(DeviceRejected):
        fabric.dma_stream(dev, _add_stream(1), 0)


def test_data_load_needs_memory_mode():
    dev = CaesarDevice()
    fabric.set_mode(dev, True, 0)
    with pytest.raises(DeviceRejected):
        fabric.load_words(dev, 0, [1, 2, 3], 0)


def test_data_stream_kind_gates_mode():
    dev = CarusDevice()
    with pytest.raises(DeviceRejected):
        fabric.dma_stream(dev, [(0, 1)], 0, kind="commands")
    assert fabric.dma_stream(dev, [(0, 1), (4, 2)], 0, kind="data") > 0


def test_oversized_image_rejected():
    words = [0x13] * 150  # 600 B of nops
    dev = CarusDevice()
    with pytest.raises(ProgramTooLarge):
        fabric.run_carus_kernel(dev, words)


def test_polling_is_host_side_only():
    slow = CarusDevice(bootstrap=800)
    res = fabric.run_carus_kernel(slow, TERM)
    assert res.polls == -(-res.kernel_cycles // fabric.POLL_INTERVAL)
    # kernel time is pure device time; polls only grow host time
    assert res.host_cycles > res.polls


def test_irq_replaces_polling():
    res = fabric.run_carus_kernel(CarusDevice(), TERM, use_irq=True)
    assert res.polls == 0 and res.irq_used


def test_host_ops_steal_device_cycles():
    base = fabric.run_carus_kernel(CarusDevice(), TERM).kernel_cycles
    stolen = fabric.run_carus_kernel(
        CarusDevice(), TERM, host_ops=[(0, 1), (4, 2), (8, 3)]).kernel_cycles
    assert stolen == base + 3


def test_caesar_stream_determinism():
    runs = [fabric.run_caesar_stream(CaesarDevice(), _add_stream(30))
            for _ in range(2)]
    assert runs[0] == runs[1]


def test_bus_write_conservation():
    dev = CaesarDevice()
    n = 12
    fabric.run_caesar_stream(dev, _add_stream(n))
    # one bus write per command, plus one per mode flip on either side
    assert dev.events.bus_writes == n + 2


def test_scenario_caesar_end_to_end():
    scn = {
        "device": "caesar",
        "steps": [
            {"op": "write_words", "base": 0, "data": [5]},
            {"op": "write_words", "base": 4096, "data": [7]},
            {"op": "set_mode", "imc": True},
            {"op": "stream", "entries": _add_stream(1)[:0] + [
                [2048, encode(CaesarInstr(Opcode.ADD, 2048, 0, 4096))]]},
            {"op": "set_mode", "imc": False},
            {"op": "read_words", "base": 2048, "count": 1, "expect": [12]},
        ],
    }
    out = fabric.run_scenario(scn)
    assert out["reads"]["5"] == [12]
    assert out["kernel_cycles"] > 0 and out["cycles"] > out["kernel_cycles"]


def test_scenario_carus_kernel():
    image = asm.assemble("""
    addi x2, x0, 0x100
    lw x3, 0(x2)
    addi x3, x3, 1
    sw x3, 4(x2)
    lui x1, 0x8
    sw x0, 0(x1)
""")
    scn = {
        "device": "carus",
        "steps": [
            {"op": "run_kernel", "image": image, "args": [[0x100, 41]]},
        ],
    }
    out = fabric.run_scenario(scn)
    assert out["kernel_cycles"] > 0


def test_scenario_expect_mismatch_raises():
    scn = {"device": "caesar",
           "steps": [{"op": "write_words", "base": 0, "data": [1]},
                     {"op": "read_words", "base": 0, "count": 1,
                      "expect": [2]}]}
    with pytest.raises(AssertionError):
        fabric.run_scenario(scn)


def test_make_device_names():
    assert isinstance(fabric.make_device("caesar"), CaesarDevice)
    assert isinstance(fabric.make_device("carus"), CarusDevice)
    with pytest.raises(ValueError):
        fabric.make_device("blade")
