"""Kernel offload flows for the packed-SIMD macro.

Every kernel here follows the same protocol: load operands over the bus in
memory mode, stream a command sequence in computing mode, read results back.
`kernel_cycles` is the sum of command-stream spans (DMA setup included);
everything else (data movement, mode flips, host arithmetic) is host time.

Layout conventions (word offsets, bank 1 starts at 4096):
 - sources of every command sit in opposite banks, so the steady state is
   two cycles per command;
 - matmul/gemm use the accumulate group with the host pre-splatting each
   left-matrix element across the lanes of one word;
 - destinations are never re-read by later commands except across stages
   long enough to hide the writeback.
"""

from __future__ import annotations

import numpy as np

from .. import fabric, oracle
from ..caesar.device import CaesarDevice
from ..caesar.isa import CaesarInstr, Opcode, WORDS_PER_BANK, encode
from ..errors import DoesNotFit
from . import DeviceRun, KernelSpec
from .pack import pack_elems, pack_rows, splat_word, unpack_elems, words_per_row

BANK = WORDS_PER_BANK
_WIDTH_SEL = {8: 0, 16: 1, 32: 2}


def _enc(op: Opcode, dest: int, src1: int, src2: int) -> tuple[int, int]:
    return dest, encode(CaesarInstr(op, dest, src1, src2))


def _csrw(width: int) -> tuple[int, int]:
    return _enc(Opcode.CSRW, 0, _WIDTH_SEL[width], 0)


def _mac_group(splats, srcs, dest) -> list[tuple[int, int]]:
    """One accumulate chain: init, middles, store. Pairs are (src1, src2)."""
    k = len(srcs)
    if k == 1:
        return [_enc(Opcode.MUL, dest, splats[0], srcs[0])]
    out = [_enc(Opcode.MAC_INIT, 0, splats[0], srcs[0])]
    for i in range(1, k - 1):
        out.append(_enc(Opcode.MAC, 0, splats[i], srcs[i]))
    out.append(_enc(Opcode.MAC_STORE, dest, splats[k - 1], srcs[k - 1]))
    return out


def _fit(cond: bool, what: str) -> None:
    if not cond:
        raise DoesNotFit(f"{what} exceeds a 16 KiB bank")


def _run_streams(device: CaesarDevice, loads, streams, result_base, result_words):
    """Shared load/offload/readback sequence for single-stage kernels."""
    t = 0
    host = 0
    for base, words in loads:
        t1 = fabric.load_words(device, base, words, t)
        host += t1 - t
        t = t1
    kernel = 0
    ncmd = 0
    for s in streams:
        t0 = fabric.set_mode(device, True, t)
        t1 = fabric.dma_stream(device, s, t0)
        t2 = fabric.set_mode(device, False, t1)
        kernel += t1 - t0
        host += (t0 - t) + (t2 - t1)
        t = t2
        ncmd += len(s)
    words, t1 = fabric.read_words(device, result_base, result_words, t)
    host += t1 - t
    return words, kernel, host, ncmd


def run_elementwise(device: CaesarDevice, spec: KernelSpec, inputs) -> DeviceRun:
    op = {"xor": Opcode.XOR, "add": Opcode.ADD, "mul": Opcode.MUL}[spec.name]
    n = spec.shape[0]
    nw = words_per_row(n, spec.width)
    _fit(nw <= 2048, f"{n} elements")
    a_base, out_base, b_base = 0, 2048, BANK
    stream = [_csrw(spec.width)]
    stream += [_enc(op, out_base + i, a_base + i, b_base + i) for i in range(nw)]
    loads = [(a_base, pack_elems(inputs["a"], spec.width)),
             (b_base, pack_elems(inputs["b"], spec.width))]
    words, kernel, host, ncmd = _run_streams(device, loads, [stream], out_base, nw)
    return DeviceRun(unpack_elems(words, n, spec.width), kernel, host, 1, ncmd)


def run_relu(device: CaesarDevice, spec: KernelSpec, inputs) -> DeviceRun:
    n = spec.shape[0]
    nw = words_per_row(n, spec.width)
    _fit(nw <= BANK, f"{n} elements")
    zero = BANK  # one zero word in the far bank keeps every fetch dual-bank
    stream = [_csrw(spec.width)]
    stream += [_enc(Opcode.MAX, i, i, zero) for i in range(nw)]
    loads = [(0, pack_elems(inputs["a"], spec.width)), (zero, [0])]
    words, kernel, host, ncmd = _run_streams(device, loads, [stream], 0, nw)
    return DeviceRun(unpack_elems(words, n, spec.width), kernel, host, 1, ncmd)


def run_leaky_relu(device: CaesarDevice, spec: KernelSpec, inputs) -> DeviceRun:
    """max(x, (x >> s) | sign_mask): the OR forces the shifted copy negative
    for non-negative x, so the signed max keeps x itself there; for negative
    x it reconstructs the arithmetic shift from the logical one."""
    n = spec.shape[0]
    w = spec.width
    s = spec.params.get("shift", 1)
    nw = words_per_row(n, w)
    _fit(nw <= 2048, f"{n} elements")
    mask_off = 2048            # bank 0, next to x
    tmp, shift_off = BANK, BANK + nw  # bank 1
    mask = splat_word((((1 << w) - 1) << (w - s)) & ((1 << w) - 1), w)
    stream = [_csrw(w)]
    stream += [_enc(Opcode.SLR, tmp + i, i, shift_off) for i in range(nw)]
    stream += [_enc(Opcode.OR, tmp + i, tmp + i, mask_off) for i in range(nw)]
    stream += [_enc(Opcode.MAX, i, i, tmp + i) for i in range(nw)]
    loads = [(0, pack_elems(inputs["a"], w)),
             (mask_off, [mask]), (shift_off, [splat_word(s, w)])]
    words, kernel, host, ncmd = _run_streams(device, loads, [stream], 0, nw)
    return DeviceRun(unpack_elems(words, n, w), kernel, host, 1, ncmd)


def _splat_matrix(a, width: int) -> list[int]:
    return [splat_word(v, width) for v in np.asarray(a, dtype=np.int64).reshape(-1)]


def run_matmul(device: CaesarDevice, spec: KernelSpec, inputs) -> DeviceRun:
    m, k, p = spec.shape
    w = spec.width
    rw = words_per_row(p, w)
    _fit(m * k + m * rw <= BANK, "left matrix and result")
    _fit(k * rw <= BANK, "right matrix")
    a_s, c0, b0 = 0, m * k, BANK
    b_words, _ = pack_rows(inputs["b"], w)
    stream = [_csrw(w)]
    for i in range(m):
        for wj in range(rw):
            stream += _mac_group(
                [a_s + i * k + kk for kk in range(k)],
                [b0 + kk * rw + wj for kk in range(k)],
                c0 + i * rw + wj)
    loads = [(a_s, _splat_matrix(inputs["a"], w)), (b0, b_words)]
    words, kernel, host, ncmd = _run_streams(device, loads, [stream], c0, m * rw)
    out = np.concatenate([unpack_elems(words[i * rw:(i + 1) * rw], p, w)
                          for i in range(m)])
    return DeviceRun(out, kernel, host, 1, ncmd)


def run_gemm(device: CaesarDevice, spec: KernelSpec, inputs) -> DeviceRun:
    """matmul into the output region, then out = alpha*out + beta*C as one
    accumulate pair per word (src banks alternate, so no fetch penalty)."""
    m, k, p = spec.shape
    w = spec.width
    alpha = spec.params.get("alpha", 1)
    beta = spec.params.get("beta", 1)
    rw = words_per_row(p, w)
    _fit(m * k + 1 + m * rw <= BANK, "left matrix and result")
    _fit((k + m) * rw + 1 <= BANK, "right matrix and addend")
    a_s, beta_off, t0 = 0, m * k, m * k + 1
    b0, cin, alpha_off = BANK, BANK + k * rw, BANK + (k + m) * rw
    stream = [_csrw(w)]
    for i in range(m):
        for wj in range(rw):
            stream += _mac_group(
                [a_s + i * k + kk for kk in range(k)],
                [b0 + kk * rw + wj for kk in range(k)],
                t0 + i * rw + wj)
    for i in range(m * rw):
        stream.append(_enc(Opcode.MAC_INIT, 0, t0 + i, alpha_off))
        stream.append(_enc(Opcode.MAC_STORE, t0 + i, cin + i, beta_off))
    b_words, _ = pack_rows(inputs["b"], w)
    c_words, _ = pack_rows(inputs["c"], w)
    loads = [(a_s, _splat_matrix(inputs["a"], w)),
             (beta_off, [splat_word(beta, w)]),
             (b0, b_words), (cin, c_words),
             (alpha_off, [splat_word(alpha, w)])]
    words, kernel, host, ncmd = _run_streams(device, loads, [stream], t0, m * rw)
    out = np.concatenate([unpack_elems(words[i * rw:(i + 1) * rw], p, w)
                          for i in range(m)])
    return DeviceRun(out, kernel, host, 1, ncmd)


def run_conv2d(device: CaesarDevice, spec: KernelSpec, inputs) -> DeviceRun:
    """Square-filter valid convolution as one accumulate chain per output
    word. Column offsets that land on a word boundary read the padded input
    rows directly at a word offset; the others use shifted row copies that
    the host stages (sub-word lane boundaries cannot be crossed on-device).
    """
    r, n, f = spec.shape
    w = spec.width
    es = w // 8
    ro, ow = r - f + 1, n - f + 1
    rw = words_per_row(n, w)
    oww = words_per_row(ow, w)
    pad = ((f - 1) * es + 3) // 4
    stride = rw + pad
    a = np.asarray(inputs["a"], dtype=np.int64)

    aligned = {dj: (dj * es) // 4 for dj in range(f) if (dj * es) % 4 == 0}
    staged = [dj for dj in range(f) if dj not in aligned]
    a0 = BANK
    s_base = {dj: a0 + r * stride + i * r * oww for i, dj in enumerate(staged)}
    _fit(r * stride + len(staged) * r * oww <= BANK, "input and shifted copies")
    _fit(f * f <= 2048 and ro * oww <= 2048, "filter and result")

    loads = [(0, _splat_matrix(inputs["f"], w))]
    rows_padded = []
    for i in range(r):
        rw_words = pack_elems(a[i], w)
        rows_padded.extend(rw_words + [0] * (stride - len(rw_words)))
    loads.append((a0, rows_padded))
    for dj in staged:
        shifted = []
        for i in range(r):
            row = pack_elems(a[i, dj:], w)
            shifted.extend((row + [0] * oww)[:oww])
        loads.append((s_base[dj], shifted))

    stream = [_csrw(w)]
    out0 = 2048
    for o in range(ro):
        for wj in range(oww):
            splats, srcs = [], []
            for di in range(f):
                for dj in range(f):
                    splats.append(di * f + dj)
                    if dj in aligned:
                        srcs.append(a0 + (o + di) * stride + aligned[dj] + wj)
                    else:
                        srcs.append(s_base[dj] + (o + di) * oww + wj)
            stream += _mac_group(splats, srcs, out0 + o * oww + wj)
    words, kernel, host, ncmd = _run_streams(device, loads, [stream], out0, ro * oww)
    out = np.concatenate([unpack_elems(words[o * oww:(o + 1) * oww], ow, w)
                          for o in range(ro)])
    return DeviceRun(out, kernel, host, 1, ncmd,
                     notes={"staged_offsets": staged})


def run_maxpool(device: CaesarDevice, spec: KernelSpec, inputs) -> DeviceRun:
    """Vertical reduction on-device (even rows bank 0, odd rows bank 1);
    the horizontal pairwise max runs on the host after readback."""
    r, n = spec.shape
    w = spec.width
    rw = words_per_row(n, w)
    half = r // 2
    _fit(half * rw <= 2048, "input rows")
    a = np.asarray(inputs["a"], dtype=np.int64)
    even, _ = pack_rows(a[0::2], w)
    odd, _ = pack_rows(a[1::2], w)
    v0 = 2048
    stream = [_csrw(w)]
    for j in range(half):
        for wj in range(rw):
            stream.append(_enc(Opcode.MAX, v0 + j * rw + wj,
                               j * rw + wj, BANK + j * rw + wj))
    loads = [(0, even), (BANK, odd)]
    words, kernel, host, ncmd = _run_streams(device, loads, [stream], v0, half * rw)
    v = np.stack([unpack_elems(words[j * rw:(j + 1) * rw], n, w)
                  for j in range(half)])
    out = _hmax(v, w)
    host += out.size  # one comparison per produced element on the host
    return DeviceRun(out.reshape(-1), kernel, host, 1, ncmd)


def _hmax(v: np.ndarray, width: int) -> np.ndarray:
    s = oracle.to_signed(v, width)
    return oracle.wrap_u(np.maximum(s[:, 0::2], s[:, 1::2]), width)


def run_autoencoder(device: CaesarDevice, spec: KernelSpec, inputs) -> DeviceRun:
    """One offload stream per layer; between layers the host reads the
    activations back and re-splats them as the next left vector."""
    dims = spec.shape
    w = spec.width
    zero_off = 2 * BANK - 1
    w_base, offs = BANK, []
    for l in range(len(dims) - 1):
        offs.append(w_base)
        w_base += dims[l] * words_per_row(dims[l + 1], w)
    _fit(w_base - BANK + 1 <= BANK - 1, "weight matrices")
    _fit(max(dims) <= 2048, "activations")

    t = 0
    host = 0
    kernel = 0
    ncmd = 0
    for l, off in enumerate(offs):
        ww, _ = pack_rows(inputs[f"w{l}"], w)
        t = fabric.load_words(device, off, ww, t)
        host += len(ww)
    t = fabric.load_words(device, zero_off, [0], t)
    host += 1

    x = np.asarray(inputs["x"], dtype=np.int64)
    act0 = 2048
    for l in range(len(dims) - 1):
        k, p = dims[l], dims[l + 1]
        rw = words_per_row(p, w)
        t = fabric.load_words(device, 0, [splat_word(v, w) for v in x], t)
        host += k
        stream = [_csrw(w)]
        for wj in range(rw):
            stream += _mac_group(list(range(k)),
                                 [offs[l] + kk * rw + wj for kk in range(k)],
                                 act0 + wj)
        stream += [_enc(Opcode.MAX, act0 + wj, act0 + wj, zero_off)
                   for wj in range(rw)]
        t0 = fabric.set_mode(device, True, t)
        t1 = fabric.dma_stream(device, stream, t0)
        t2 = fabric.set_mode(device, False, t1)
        kernel += t1 - t0
        host += (t0 - t) + (t2 - t1)
        ncmd += len(stream)
        t = t2
        words, t = fabric.read_words(device, act0, rw, t)
        host += rw
        x = unpack_elems(words, p, w)
    return DeviceRun(x, kernel, host, len(dims) - 1, ncmd)


_RUNNERS = {
    "xor": run_elementwise, "add": run_elementwise, "mul": run_elementwise,
    "relu": run_relu, "leaky_relu": run_leaky_relu,
    "matmul": run_matmul, "gemm": run_gemm, "conv2d": run_conv2d,
    "maxpool": run_maxpool, "autoencoder": run_autoencoder,
}


def run(spec: KernelSpec, inputs, device: CaesarDevice | None = None) -> DeviceRun:
    return _RUNNERS[spec.name](device or CaesarDevice(), spec, inputs)
