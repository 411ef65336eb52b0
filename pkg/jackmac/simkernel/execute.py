import hashlib
import logging

from dataclasses import replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from numpy.lib.stride_tricks import sliding_window_view

from ..datapath import Mode, finalize, jack_mac
from ..exceptions import FormatMismatchError, ShapeMismatchError
from ..formats import BlockSlice, EncodedTensor, ExactValue, ScalarCode
from .config import ArrayConfig
from .timing import SimReport, estimate_cycles
from .workload import WorkloadSpec


logger = logging.getLogger(__name__)


Chunk = Union[Sequence[ScalarCode], BlockSlice]


def checksum(tensor: EncodedTensor) -> str:
    digest = hashlib.sha256()
    digest.update(np.asarray(tensor.shape, dtype="<u4").tobytes())
    digest.update(tensor.codes.astype("<u2").tobytes())

    return digest.hexdigest()[:16]


def _row_chunks(tensor: EncodedTensor, row: int, mode: Mode) -> List[Chunk]:
    """One row's K axis split into unit-sized chunks that never straddle a block."""
    lanes = mode.lanes

    if mode.is_mx:
        return [part for block in tensor.row_blocks(row) for part in block.lanes(lanes)]

    codes = tensor.row_codes(row)
    codes += [ScalarCode(mode.element_format, 0)] * (-len(codes) % lanes)

    return [codes[i : i + lanes] for i in range(0, len(codes), lanes)]


def _dot(mode: Mode, xs: List[Chunk], ws: List[Chunk], wide: bool) -> ScalarCode:
    if wide:
        total = ExactValue.zero()
        for x, w in zip(xs, ws):
            total = total + jack_mac(mode, x, w).exact_value()

        return finalize(total, mode)

    acc: Optional[ScalarCode] = None
    for x, w in zip(xs, ws):
        acc = jack_mac(mode, x, w, acc).output

    return acc


def _check_operands(a: EncodedTensor, w: EncodedTensor, mode: Mode):
    for name, tensor in (("A", a), ("W", w)):
        if tensor.format != mode.element_format:
            raise FormatMismatchError(f"{name} is {tensor.format}, mode {mode} needs {mode.element_format}")

        if len(tensor.shape) != 2:
            raise ShapeMismatchError(f"{name} must be a matrix, got shape {tensor.shape}")

    if a.shape[1] != w.shape[1]:
        raise ShapeMismatchError(f"inner dimensions disagree: A{a.shape} W{w.shape}")


def gemm_functional(a: EncodedTensor, w: EncodedTensor, mode, wide_accumulation: bool = False) -> EncodedTensor:
    """`C = A . W^T` through the unit, one chained K-reduction per output."""
    mode = Mode.of(mode)
    _check_operands(a, w, mode)

    a_chunks = [_row_chunks(a, i, mode) for i in range(a.shape[0])]
    w_chunks = [_row_chunks(w, j, mode) for j in range(w.shape[0])]

    codes = np.zeros((a.shape[0], w.shape[0]), dtype=np.uint16)
    for i, xs in enumerate(a_chunks):
        for j, ws in enumerate(w_chunks):
            codes[i, j] = _dot(mode, xs, ws, wide_accumulation).bits

    return EncodedTensor(mode.output_descriptor, codes)


def _mode_for(fmt, cfg: ArrayConfig, mode) -> Mode:
    return cfg.require(Mode.of(mode, fmt.block_size if fmt.is_mx else None))


def gemm_execute(
    a: EncodedTensor, w: EncodedTensor, cfg: ArrayConfig, mode
) -> Tuple[EncodedTensor, SimReport]:
    mode = _mode_for(a.format, cfg, mode)
    _check_operands(a, w, mode)

    spec = WorkloadSpec.gemm(a.shape[0], w.shape[0], a.shape[1], mode)
    report = estimate_cycles(spec, cfg)

    c = gemm_functional(a, w, mode, cfg.wide_accumulation)
    logger.debug("gemm %s: %d outputs, checksum %s", spec.gemm_shape(), c.codes.size, checksum(c))

    return c, replace(report, result_checksum=checksum(c))


def _window_rows(array: np.ndarray, kh: int, kw: int, stride: int) -> np.ndarray:
    """(H, W, C) -> (OH*OW, kh*kw*C), K flattened in (kh, kw, C) order."""
    windows = sliding_window_view(array, (kh, kw), axis=(0, 1))[::stride, ::stride]
    out_h, out_w = windows.shape[:2]

    return np.ascontiguousarray(windows.transpose(0, 1, 3, 4, 2)).reshape(out_h * out_w, -1)


def im2col(x: EncodedTensor, kh: int, kw: int, stride: int = 1) -> EncodedTensor:
    if len(x.shape) != 3:
        raise ShapeMismatchError(f"activations must be HWC, got shape {x.shape}")

    h, w, cin = x.shape
    if kh > h or kw > w:
        raise ShapeMismatchError(f"{kh}x{kw} kernel does not fit a {h}x{w} input")

    fmt = x.format
    if fmt.is_mx and cin % fmt.block_size:
        raise ShapeMismatchError(f"{cin} channels do not split into {fmt.block_size}-element blocks")

    codes = _window_rows(x.codes, kh, kw, stride)
    exponents = _window_rows(x.shared_exponents, kh, kw, stride) if fmt.is_mx else None

    return EncodedTensor(fmt, codes, exponents)


def _flatten_weights(w: EncodedTensor) -> EncodedTensor:
    cout = w.shape[0]
    exponents = w.shared_exponents.reshape(cout, -1) if w.format.is_mx else None

    return EncodedTensor(w.format, w.codes.reshape(cout, -1), exponents)


def conv_execute(
    x: EncodedTensor, w: EncodedTensor, cfg: ArrayConfig, mode, stride: int = 1
) -> Tuple[EncodedTensor, SimReport]:
    if len(w.shape) != 4:
        raise ShapeMismatchError(f"weights must be (Cout, kh, kw, Cin), got shape {w.shape}")

    if len(x.shape) != 3 or x.shape[2] != w.shape[3]:
        raise ShapeMismatchError(f"channel counts disagree: x{x.shape} w{w.shape}")

    h, width, cin = x.shape
    cout, kh, kw, _ = w.shape

    rows = im2col(x, kh, kw, stride)
    mode = _mode_for(x.format, cfg, mode)

    spec = WorkloadSpec.conv(h, width, cin, cout, kh, kw, mode, stride=stride)
    report = estimate_cycles(spec, cfg)

    lowered = gemm_functional(rows, _flatten_weights(w), mode, cfg.wide_accumulation)
    out_h, out_w = spec.output_hw

    y = EncodedTensor(lowered.format, lowered.codes.reshape(out_h, out_w, cout))
    logger.debug("conv %s: %d outputs, checksum %s", spec.gemm_shape(), y.codes.size, checksum(y))

    return y, replace(report, result_checksum=checksum(y))
