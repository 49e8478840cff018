"""Kernel generators vs the scalar oracle, plus capacity and verify checks."""

import numpy as np
import pytest

from nmcsim.errors import DoesNotFit, ShapeMismatch
from nmcsim.kernels import (ELEMENTWISE, KERNELS, DeviceRun, KernelSpec,
                            output_count, random_inputs, random_spec,
                            reference)
from nmcsim.kernels import carus_gen
from nmcsim.kernels.runner import check_random, run_on, verify

WIDTHS = (8, 16, 32)


@pytest.mark.parametrize("device", ("caesar", "carus"))
@pytest.mark.parametrize("kernel", KERNELS)
def test_random_shapes_match_oracle(device, kernel):
    for width in WIDTHS:
        for seed in range(3):
            spec, run, res = check_random(device, kernel, width,
                                          seed * 97 + width)
            assert res.ok, f"{device} {spec}: {res}"
            assert run.kernel_cycles > 0


@pytest.mark.parametrize("kernel", ("matmul", "gemm", "conv2d"))
def test_carus_binaries_are_shape_independent(kernel):
    # indirect addressing: one image serves every geometry and width
    img = carus_gen.program(kernel)
    assert img == carus_gen.program(kernel)
    dev_shapes = {"matmul": [(2, 3, 5), (8, 8, 300)],
                  "gemm": [(1, 1, 1), (4, 6, 100)],
                  "conv2d": [(4, 10, 3), (8, 60, 4)]}[kernel]
    for width in WIDTHS:
        for shape in dev_shapes:
            params = {"alpha": 2, "beta": 3} if kernel == "gemm" else {}
            spec = KernelSpec(kernel, width, shape, params)
            inputs = random_inputs(spec, 11)
            run = run_on("carus", spec, inputs)
            assert verify(spec, run.output, reference(spec, inputs)).ok
    assert carus_gen.program(kernel) == img  # runs never patch the image


def test_verify_reports_first_mismatch():
    spec = KernelSpec("add", 8, (6,))
    ref = np.arange(6)
    bad = ref.copy()
    bad[3] = 99
    res = verify(spec, bad, ref)
    assert not res.ok and res.first_mismatch == 3
    assert res.got == 99 and res.want == 3
    assert "element 3" in str(res)


def test_verify_shape_mismatch():
    spec = KernelSpec("add", 8, (6,))
    with pytest.raises(ShapeMismatch):
        verify(spec, np.zeros(5), np.zeros(6))
    with pytest.raises(ShapeMismatch):
        verify(spec, np.full(6, 300), np.zeros(6))  # out of 8-bit range


def test_caesar_capacity_limit():
    spec = KernelSpec("add", 8, (8193,))
    with pytest.raises(DoesNotFit):
        run_on("caesar", spec, random_inputs(spec, 0))


def test_carus_capacity_limit():
    spec = KernelSpec("matmul", 8, (8, 130, 8))  # left matrix > one register
    with pytest.raises(DoesNotFit):
        run_on("carus", spec, random_inputs(spec, 0))


def test_leaky_relu_shift_sweep():
    for width in WIDTHS:
        for shift in (1, 3, width - 1):
            spec = KernelSpec("leaky_relu", width, (64,), {"shift": shift})
            inputs = random_inputs(spec, shift)
            for device in ("caesar", "carus"):
                run = run_on(device, spec, inputs)
                assert verify(spec, run.output, reference(spec, inputs)).ok


def test_gemm_negative_coefficients():
    spec = KernelSpec("gemm", 16, (3, 4, 10), {"alpha": -3, "beta": -1})
    inputs = random_inputs(spec, 5)
    for device in ("caesar", "carus"):
        run = run_on(device, spec, inputs)
        assert verify(spec, run.output, reference(spec, inputs)).ok


def test_matmul_single_element_edge():
    spec = KernelSpec("matmul", 32, (1, 1, 1))
    inputs = random_inputs(spec, 2)
    for device in ("caesar", "carus"):
        run = run_on(device, spec, inputs)
        assert verify(spec, run.output, reference(spec, inputs)).ok


def test_device_run_accounting_fields():
    spec = KernelSpec("add", 8, (256,))
    inputs = random_inputs(spec, 1)
    run = run_on("caesar", spec, inputs)
    assert isinstance(run, DeviceRun)
    assert run.commands > 0 and run.host_cycles > 0 and run.streams == 1


def test_random_spec_fits_both_devices():
    for kernel in KERNELS:
        for width in WIDTHS:
            for seed in range(40):
                spec = random_spec(kernel, width, seed)
                assert output_count(spec) > 0


def test_spec_validation():
    with pytest.raises(ShapeMismatch):
        KernelSpec("matmul", 8, (2, 3))
    with pytest.raises(ShapeMismatch):
        KernelSpec("add", 12, (8,))
    with pytest.raises(ShapeMismatch):
        KernelSpec("maxpool", 8, (3, 4))
    with pytest.raises(ShapeMismatch):
        KernelSpec("leaky_relu", 8, (16,), {"shift": 8})
    with pytest.raises(ShapeMismatch):
        KernelSpec("slerp", 8, (4,))


def test_elementwise_names_cover_ops():
    assert set(ELEMENTWISE) == {"xor", "add", "mul"}
