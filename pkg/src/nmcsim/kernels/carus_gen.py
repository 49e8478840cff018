"""Kernel programs for the autonomous macro, one binary per kernel.

Every program is shape- and width-independent: geometry (element count,
register-file slots, row strides, the vtype word) arrives through an
argument block in the upper instruction memory, so the same image runs any
shape that fits. The host pre-loads operands into the vector register file
in memory mode, drops the image and arguments, and rings the control
register; results are read back over the same port afterwards.

Shared conventions:
 - the left operand of matmul-like kernels lives flat in v0 and is walked
   element-by-element with emvx; vl is raised to VLMAX around a fetch when
   the current chunk length does not cover the element index, then restored;
 - long vectors are strip-mined in full-register chunks, so advancing to
   the next chunk is always "+8 slots" regardless of element width;
 - loops address vectors through the byte-packed index GPR of the indirect
   forms, advanced with plain adds, so no code is ever patched.
"""

from __future__ import annotations

import numpy as np

from .. import fabric
from ..carus import asm
from ..carus.device import CarusDevice
from ..carus.isa import SLOT_BYTES, VLMAX, vtype_bits
from ..errors import DoesNotFit
from . import DeviceRun, KernelSpec
from .pack import pack_elems, unpack_elems

ARGS_BASE = 0x180
AE_ARGS_BASE = 0x140  # the autoencoder needs room for its layer table
AE_TABLE_BASE = 0x150
NUM_SLOTS = 256

_TERMINATE = """\
    lui x1, 0x8
    sw x0, 0(x1)
"""


def _vv_program(op: str) -> str:
    """c = a <op> b over strip-mined chunks; slots in x11/x12/x13."""
    return f"""\
    addi x2, x0, {ARGS_BASE}
    lw x9, 0(x2)        # vtype
    lw x3, 4(x2)        # remaining elements
    lw x11, 8(x2)       # a slot
    lw x12, 12(x2)      # b slot
    lw x13, 16(x2)      # c slot
chunk:
    vsetvl x5, x3, x9
    slli x15, x11, 8
    add x4, x13, x15    # vd=c, vs2=a
    slli x15, x12, 16
    add x4, x4, x15     # vs1=b
    {op}.vv.ind x4
    sub x3, x3, x5
    addi x11, x11, 8
    addi x12, x12, 8
    addi x13, x13, 8
    bne x3, x0, chunk
""" + _TERMINATE


_RELU = f"""\
    addi x2, x0, {ARGS_BASE}
    lw x9, 0(x2)
    lw x3, 4(x2)
    lw x13, 8(x2)       # data slot, rewritten in place
chunk:
    vsetvl x5, x3, x9
    slli x15, x13, 8
    add x4, x13, x15    # vd = vs2 = data
    vmax.vx.ind x4, x0  # signed max against zero
    sub x3, x3, x5
    addi x13, x13, 8
    bne x3, x0, chunk
""" + _TERMINATE


_LEAKY = f"""\
    addi x2, x0, {ARGS_BASE}
    lw x9, 0(x2)
    lw x3, 4(x2)
    lw x13, 8(x2)       # data slot
    lw x14, 12(x2)      # scratch slot
    lw x12, 16(x2)      # shift amount
chunk:
    vsetvl x5, x3, x9
    slli x15, x13, 8
    add x4, x14, x15    # scratch = data >> shift (arithmetic)
    vsra.vx.ind x4, x12
    slli x15, x13, 8
    add x4, x13, x15    # data = max(data, scratch)
    slli x15, x14, 16
    add x4, x4, x15
    vmax.vv.ind x4
    sub x3, x3, x5
    addi x13, x13, 8
    addi x14, x14, 8
    bne x3, x0, chunk
""" + _TERMINATE


def _matmul_program(gemm: bool) -> str:
    """C[m,p] = A[m,k]*B[k,p] (plus alpha/beta epilogue for gemm), A in v0."""
    epilogue = ""
    if gemm:
        epilogue = f"""\
    # out = alpha*out + beta*addend for this row chunk
    addi x2, x0, {ARGS_BASE}
    lw x15, 28(x2)      # alpha
    slli x7, x1, 8
    add x4, x1, x7      # vd = vs2 = out row
    vmul.vx.ind x4, x15
    lw x15, 32(x2)      # beta
    lw x2, 36(x2)       # addend slot delta
    add x2, x1, x2
    slli x7, x2, 8
    add x4, x2, x7      # vd = vs2 = addend row (scratched in place)
    vmul.vx.ind x4, x15
    slli x7, x2, 16
    add x4, x1, x7
    slli x7, x1, 8
    add x4, x4, x7      # vd=out, vs2=out, vs1=addend
    vadd.vv.ind x4
"""
    return f"""\
    addi x2, x0, {ARGS_BASE}
    lw x9, 0(x2)        # vtype
    lw x10, 4(x2)       # m
    lw x11, 8(x2)       # k
    lw x3, 12(x2)       # p (remaining columns)
    lw x13, 16(x2)      # out base slot
    lw x14, 20(x2)      # right-matrix base slot
    lw x12, 24(x2)      # row stride in slots, pre-shifted <<8
chunk:
    vsetvl x5, x3, x9
    addi x6, x0, 0      # left element index
    add x1, x13, x0     # out row slot runner
    add x8, x10, x0     # rows left
row:
    slli x15, x14, 8
    add x4, x1, x15     # vd=out row, vs2=first right row of the chunk
    add x7, x11, x0     # taps left
tap:
    blt x6, x5, fetch_direct
    vsetvl x15, x0, x9  # raise vl to VLMAX for the element fetch
    emvx x15, v0, x6
    vsetvl x2, x5, x9   # back to the chunk length
    j fetched
fetch_direct:
    emvx x15, v0, x6
fetched:
    addi x6, x6, 1
    bne x7, x11, accum  # first tap initializes, the rest accumulate
    vmul.vx.ind x4, x15
    j step
accum:
    vmacc.vx.ind x4, x15
step:
    add x4, x4, x12     # next right-matrix row
    addi x7, x7, -1
    bne x7, x0, tap
rowdone:
{epilogue}\
    srli x15, x12, 8
    add x1, x1, x15     # next out row
    addi x8, x8, -1
    bne x8, x0, row
    sub x3, x3, x5      # next chunk: one full register ahead
    addi x14, x14, 8
    addi x13, x13, 8
    bne x3, x0, chunk
""" + _TERMINATE


_CONV2D = f"""\
    addi x2, x0, {ARGS_BASE}
    lw x9, 0(x2)        # vtype
    lw x3, 4(x2)        # input row length (elements)
    lw x6, 8(x2)        # filter side
    lw x8, 12(x2)       # output rows
    lw x1, 36(x2)       # filter tap table pointer
    lw x15, 20(x2)
    slli x14, x15, 8    # input row stride, pre-shifted for the index GPR
    addi x10, x0, 0     # di
di_loop:
    addi x11, x0, 0     # dj
dj_loop:
    lw x12, 0(x1)       # filter value
    addi x1, x1, 4
    addi x2, x0, {ARGS_BASE}
    lw x15, 16(x2)      # input base slot
    lw x2, 20(x2)       # input row stride
    add x5, x10, x0
shift_rows:             # x15 = base + di*stride (no hardware multiply)
    beq x5, x0, rows_done
    add x15, x15, x2
    addi x5, x5, -1
    j shift_rows
rows_done:
    slli x4, x15, 8
    addi x2, x0, {ARGS_BASE}
    lw x15, 32(x2)
    add x4, x4, x15     # slide index: vd=scratch, vs2=input row
    lw x13, 24(x2)
    lw x15, 32(x2)
    slli x15, x15, 8
    add x13, x13, x15   # tap index: vd=output row, vs2=scratch
    add x7, x8, x0      # output rows left
o_loop:
    vsetvl x5, x3, x9   # full input row
    vslidedown.vx.ind x4, x11
    addi x2, x0, {ARGS_BASE}
    lw x5, 40(x2)
    vsetvl x5, x5, x9   # output row length
    or x15, x10, x11
    bne x15, x0, not_first
    vmul.vx.ind x13, x12
    j advance
not_first:
    vmacc.vx.ind x13, x12
advance:
    add x4, x4, x14
    lw x15, 28(x2)      # output row stride
    add x13, x13, x15
    addi x7, x7, -1
    bne x7, x0, o_loop
    addi x11, x11, 1
    blt x11, x6, dj_loop
    addi x10, x10, 1
    blt x10, x6, di_loop
""" + _TERMINATE


_MAXPOOL = f"""\
    addi x2, x0, {ARGS_BASE}
    lw x9, 0(x2)        # vtype
    lw x3, 4(x2)        # columns
    lw x6, 8(x2)        # output rows
    lw x7, 12(x2)       # input slot (row pairs)
    lw x8, 16(x2)       # input row stride (slots)
    lw x14, 20(x2)      # output slot
j_loop:
    vsetvl x5, x3, x9
    addi x4, x0, 240    # v30 = vertical max of the row pair
    slli x15, x7, 8
    add x4, x4, x15
    add x15, x7, x8
    slli x15, x15, 16
    add x4, x4, x15
    vmax.vv.ind x4
    addi x10, x0, 0     # 2c
    addi x11, x0, 0     # c
c_loop:                 # horizontal reduction element by element
    emvx x12, v30, x10
    addi x10, x10, 1
    emvx x13, v30, x10
    addi x10, x10, 1
    blt x13, x12, keep
    add x12, x13, x0
keep:
    emvv v31, x12, x11
    addi x11, x11, 1
    addi x2, x0, {ARGS_BASE}
    lw x15, 24(x2)      # output columns
    bne x11, x15, c_loop
    vsetvl x5, x15, x9
    lui x15, 0xF80      # v31 slot in the vs1 byte
    add x4, x14, x15
    vmv.vv.ind x4       # copy the packed row out of the scratch register
    slli x15, x8, 1
    add x7, x7, x15
    lw x15, 28(x2)      # output row stride
    add x14, x14, x15
    addi x6, x6, -1
    bne x6, x0, j_loop
""" + _TERMINATE


_AUTOENC = f"""\
    addi x2, x0, {AE_ARGS_BASE}
    lw x9, 0(x2)        # vtype
    lw x8, 4(x2)        # layers
    lw x10, 8(x2)       # activation slot
    addi x14, x0, {AE_TABLE_BASE}
layer:
    lw x11, 0(x14)      # weight base slot
    lw x7, 4(x14)       # fan-in
    lw x3, 8(x14)       # fan-out
    lw x12, 12(x14)     # weight row stride (slots)
    addi x14, x14, 16
    addi x6, x0, 0      # input element index
    vsetvl x5, x3, x9   # vl = fan-out (always a single chunk)
    slli x15, x11, 8
    add x4, x10, x15    # vd=activations, vs2=weight row
tap:
    blt x6, x5, fetch_direct
    vsetvl x15, x0, x9
    emvx x13, v0, x6
    vsetvl x15, x5, x9
    j fetched
fetch_direct:
    emvx x13, v0, x6
fetched:
    bne x6, x0, accum
    vmul.vx.ind x4, x13
    j step
accum:
    vmacc.vx.ind x4, x13
step:
    addi x6, x6, 1
    slli x15, x12, 8
    add x4, x4, x15     # next weight row
    bne x6, x7, tap
    slli x15, x10, 8
    add x4, x10, x15
    vmax.vx.ind x4, x0  # ReLU
    slli x15, x10, 16
    add x4, x15, x0     # vd=v0, vs1=activations
    vmv.vv.ind x4
    addi x8, x8, -1
    bne x8, x0, layer
""" + _TERMINATE


_SOURCES = {
    "xor": _vv_program("vxor"),
    "add": _vv_program("vadd"),
    "mul": _vv_program("vmul"),
    "relu": _RELU,
    "leaky_relu": _LEAKY,
    "matmul": _matmul_program(gemm=False),
    "gemm": _matmul_program(gemm=True),
    "conv2d": _CONV2D,
    "maxpool": _MAXPOOL,
    "autoencoder": _AUTOENC,
}

_IMAGES: dict[str, list[int]] = {}


def program(name: str) -> list[int]:
    """Assembled image for a kernel; one binary serves every shape/width."""
    if name not in _IMAGES:
        _IMAGES[name] = asm.assemble(_SOURCES[name])
    return _IMAGES[name]


def _slots(elems: int, width: int) -> int:
    return -(-(elems * (width // 8)) // SLOT_BYTES)


def _fit(cond: bool, what: str) -> None:
    if not cond:
        raise DoesNotFit(f"{what} exceeds the register file")


def _args_words(base: int, values) -> list[tuple[int, int]]:
    return [(base + 4 * i, int(v) & 0xFFFFFFFF) for i, v in enumerate(values)]


class _Session:
    """Tracks the host/kernel cycle split across loads, launch, readback."""

    def __init__(self, device: CarusDevice):
        self.device = device
        self.t = 0
        self.host = 0
        self.kernel = 0

    def load(self, byte_base: int, words) -> None:
        t1 = fabric.load_words(self.device, byte_base, words, self.t)
        self.host += t1 - self.t
        self.t = t1

    def load_rows(self, mat, width: int, slot0: int, stride_slots: int) -> None:
        for i, row in enumerate(np.asarray(mat, dtype=np.int64)):
            self.load((slot0 + i * stride_slots) * SLOT_BYTES,
                      pack_elems(row, width))

    def launch(self, name: str, args) -> None:
        res = fabric.run_carus_kernel(self.device, program(name), args=args,
                                      t=self.t)
        self.kernel = res.kernel_cycles
        self.host += res.host_cycles
        self.t += res.kernel_cycles + res.host_cycles

    def read_rows(self, rows: int, elems: int, width: int, slot0: int,
                  stride_slots: int) -> np.ndarray:
        per = -(-(elems * (width // 8)) // 4)
        out = []
        for i in range(rows):
            words, t1 = fabric.read_words(
                self.device, (slot0 + i * stride_slots) * SLOT_BYTES, per, self.t)
            self.host += t1 - self.t
            self.t = t1
            out.append(unpack_elems(words, elems, width))
        return np.concatenate(out)

    def result(self, output: np.ndarray) -> DeviceRun:
        return DeviceRun(output, self.kernel, self.host,
                         commands=self.device.last_run.steps)


def run_elementwise(device: CarusDevice, spec: KernelSpec, inputs) -> DeviceRun:
    n = spec.shape[0]
    w = spec.width
    a0, b0, c0 = 0, 86, 172
    _fit(_slots(n, w) <= 84, f"{n} elements")
    s = _Session(device)
    s.load(a0 * SLOT_BYTES, pack_elems(inputs["a"], w))
    s.load(b0 * SLOT_BYTES, pack_elems(inputs["b"], w))
    s.launch(spec.name, _args_words(ARGS_BASE, [vtype_bits(w), n, a0, b0, c0]))
    return s.result(s.read_rows(1, n, w, c0, 0))


def run_relu(device: CarusDevice, spec: KernelSpec, inputs) -> DeviceRun:
    n = spec.shape[0]
    w = spec.width
    _fit(_slots(n, w) <= NUM_SLOTS, f"{n} elements")
    s = _Session(device)
    s.load(0, pack_elems(inputs["a"], w))
    s.launch("relu", _args_words(ARGS_BASE, [vtype_bits(w), n, 0]))
    return s.result(s.read_rows(1, n, w, 0, 0))


def run_leaky_relu(device: CarusDevice, spec: KernelSpec, inputs) -> DeviceRun:
    n = spec.shape[0]
    w = spec.width
    shift = spec.params.get("shift", 1)
    _fit(_slots(n, w) <= 128, f"{n} elements with scratch")
    s = _Session(device)
    s.load(0, pack_elems(inputs["a"], w))
    s.launch("leaky_relu",
             _args_words(ARGS_BASE, [vtype_bits(w), n, 0, 128, shift]))
    return s.result(s.read_rows(1, n, w, 0, 0))


def _matmul_layout(spec: KernelSpec):
    m, k, p = spec.shape
    w = spec.width
    spr = _slots(p, w)
    b0 = 8
    c0 = b0 + k * spr
    _fit(m * k <= VLMAX[w], "left matrix in one vector register")
    return spr, b0, c0, c0 + m * spr


def run_matmul(device: CarusDevice, spec: KernelSpec, inputs) -> DeviceRun:
    m, k, p = spec.shape
    w = spec.width
    spr, b0, c0, end = _matmul_layout(spec)
    _fit(end <= NUM_SLOTS, "matrices")
    s = _Session(device)
    s.load(0, pack_elems(np.asarray(inputs["a"]).reshape(-1), w))
    s.load_rows(inputs["b"], w, b0, spr)
    s.launch("matmul", _args_words(
        ARGS_BASE, [vtype_bits(w), m, k, p, c0, b0, spr << 8]))
    return s.result(s.read_rows(m, p, w, c0, spr))


def run_gemm(device: CarusDevice, spec: KernelSpec, inputs) -> DeviceRun:
    m, k, p = spec.shape
    w = spec.width
    spr, b0, c0, cin0 = _matmul_layout(spec)
    _fit(cin0 + m * spr <= NUM_SLOTS, "matrices and addend")
    alpha = spec.params.get("alpha", 1)
    beta = spec.params.get("beta", 1)
    s = _Session(device)
    s.load(0, pack_elems(np.asarray(inputs["a"]).reshape(-1), w))
    s.load_rows(inputs["b"], w, b0, spr)
    s.load_rows(inputs["c"], w, cin0, spr)
    s.launch("gemm", _args_words(
        ARGS_BASE, [vtype_bits(w), m, k, p, c0, b0, spr << 8,
                    alpha, beta, cin0 - c0]))
    return s.result(s.read_rows(m, p, w, c0, spr))


def run_conv2d(device: CarusDevice, spec: KernelSpec, inputs) -> DeviceRun:
    r, n, f = spec.shape
    w = spec.width
    ro, ow = r - f + 1, n - f + 1
    _fit(n <= VLMAX[w], "input row in one chunk")
    spr_a = _slots(n, w)
    spr_o = _slots(ow, w)
    tmp = r * spr_a
    out0 = tmp + spr_a
    _fit(out0 + ro * spr_o <= NUM_SLOTS, "rows and scratch")
    filt_base = ARGS_BASE + 44
    args = _args_words(ARGS_BASE, [vtype_bits(w), n, f, ro, 0, spr_a,
                                   out0, spr_o, tmp, filt_base, ow])
    args += _args_words(filt_base,
                        np.asarray(inputs["f"], dtype=np.int64).reshape(-1))
    s = _Session(device)
    s.load_rows(inputs["a"], w, 0, spr_a)
    s.launch("conv2d", args)
    return s.result(s.read_rows(ro, ow, w, out0, spr_o))


def run_maxpool(device: CarusDevice, spec: KernelSpec, inputs) -> DeviceRun:
    r, n = spec.shape
    w = spec.width
    ow = n // 2
    _fit(n <= VLMAX[w], "input row in one chunk")
    spr_in = _slots(n, w)
    spr_out = _slots(ow, w)
    out0 = 128
    _fit(r * spr_in <= out0 and out0 + (r // 2) * spr_out <= 240, "rows")
    s = _Session(device)
    s.load_rows(inputs["a"], w, 0, spr_in)
    s.launch("maxpool", _args_words(
        ARGS_BASE, [vtype_bits(w), n, r // 2, 0, spr_in, out0, ow, spr_out]))
    return s.result(s.read_rows(r // 2, ow, w, out0, spr_out))


def run_autoencoder(device: CarusDevice, spec: KernelSpec, inputs) -> DeviceRun:
    dims = spec.shape
    w = spec.width
    layers = len(dims) - 1
    _fit(layers <= 11, "layer table")
    _fit(max(dims) <= VLMAX[w], "activations in one register")
    act = 8
    s = _Session(device)
    table = []
    w_slot = 16
    for l in range(layers):
        k, p = dims[l], dims[l + 1]
        spr = _slots(p, w)
        table += [w_slot, k, p, spr]
        s.load_rows(inputs[f"w{l}"], w, w_slot, spr)
        w_slot += k * spr
    _fit(w_slot <= NUM_SLOTS, "weights")
    s.load(0, pack_elems(inputs["x"], w))
    args = _args_words(AE_ARGS_BASE, [vtype_bits(w), layers, act])
    args += _args_words(AE_TABLE_BASE, table)
    s.launch("autoencoder", args)
    return s.result(s.read_rows(1, dims[-1], w, 0, 0))


_RUNNERS = {
    "xor": run_elementwise, "add": run_elementwise, "mul": run_elementwise,
    "relu": run_relu, "leaky_relu": run_leaky_relu,
    "matmul": run_matmul, "gemm": run_gemm, "conv2d": run_conv2d,
    "maxpool": run_maxpool, "autoencoder": run_autoencoder,
}


def run(spec: KernelSpec, inputs, device: CarusDevice | None = None,
        preset: str = "table-v") -> DeviceRun:
    return _RUNNERS[spec.name](device or CarusDevice(preset=preset), spec, inputs)
