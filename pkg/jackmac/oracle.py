"""Golden models in exact rational arithmetic.

Nothing here calls into `jackmac.datapath` arithmetic: the oracle rebuilds
every result from decoded operand values with `fractions.Fraction`.
"""

import math

from enum import Enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .datapath.modes import Mode, OutputFormat
from .exceptions import FormatMismatchError, ShapeMismatchError
from .formats import (
    FP16,
    INT16,
    BlockCode,
    BlockSlice,
    EncodedTensor,
    ExactValue,
    ScalarCode,
    decode,
    decode_tensor_exact,
    encode_tensor,
)
from .mixins.serialize import JsonMixin


FP16_MAX_EXPONENT = 15
FP16_MIN_EXPONENT = -14
FP16_MANTISSA = 10
FP16_MAX_FINITE_BITS = 0x7BFF


@dataclass(frozen=True)
class ExactDot:
    terms: Tuple[ExactValue, ...]
    sum: ExactValue


def _fraction(value) -> Fraction:
    if isinstance(value, ScalarCode):
        value = decode(value)

    return ExactValue.of(value).to_fraction()


def exact_dot_terms(xs: Sequence, ws: Sequence) -> ExactDot:
    if len(xs) != len(ws):
        raise ShapeMismatchError(f"dot product of {len(xs)} and {len(ws)} terms")

    products = [_fraction(x) * _fraction(w) for x, w in zip(xs, ws)]

    return ExactDot(
        tuple(ExactValue.of(p) for p in products),
        ExactValue.of(sum(products, Fraction(0))),
    )


def exact_dot(xs: Sequence, ws: Sequence) -> ExactValue:
    return exact_dot_terms(xs, ws).sum


def _floor_log2(magnitude: Fraction) -> int:
    exponent = magnitude.numerator.bit_length() - magnitude.denominator.bit_length()
    if Fraction(2) ** exponent > magnitude:
        exponent -= 1

    return exponent


class Fp16Class(str, Enum):
    ZERO = "zero"
    NORMAL = "normal"
    FLUSHED = "flushed"
    SATURATED = "saturated"


def classify_fp16(value) -> Fp16Class:
    magnitude = abs(_fraction(value))
    if magnitude == 0:
        return Fp16Class.ZERO

    exponent = _floor_log2(magnitude)
    if exponent > FP16_MAX_EXPONENT:
        return Fp16Class.SATURATED

    if exponent < FP16_MIN_EXPONENT:
        return Fp16Class.FLUSHED

    return Fp16Class.NORMAL


def truncate_exact_to_fp16(value) -> ScalarCode:
    """Round toward zero into binary16; flush below min normal, saturate above max finite."""
    exact = _fraction(value)
    kind = classify_fp16(exact)

    if kind in (Fp16Class.ZERO, Fp16Class.FLUSHED):
        return ScalarCode(FP16, 0)

    sign = 0x8000 if exact < 0 else 0
    if kind is Fp16Class.SATURATED:
        return ScalarCode(FP16, sign | FP16_MAX_FINITE_BITS)

    magnitude = abs(exact)
    exponent = _floor_log2(magnitude)
    significand = math.floor(magnitude / Fraction(2) ** (exponent - FP16_MANTISSA))

    return ScalarCode(
        FP16, sign | ((exponent + 15) << FP16_MANTISSA) | (significand - (1 << FP16_MANTISSA))
    )


def saturate_int16(value) -> ScalarCode:
    exact = _fraction(value)
    if exact.denominator != 1:
        raise FormatMismatchError(f"{exact} is not an integer")

    clamped = min(max(exact.numerator, -32768), 32767)

    return ScalarCode(INT16, clamped & 0xFFFF)


def _operand_values(operand) -> Tuple[list, int]:
    if isinstance(operand, (BlockSlice, BlockCode)):
        return list(operand.elements), operand.shared_exponent

    return list(operand), 0


def exact_mac(mode, x, w, acc_in: Optional[ScalarCode] = None) -> ScalarCode:
    mode = Mode.of(mode)
    xs, ex = _operand_values(x)
    ws, ew = _operand_values(w)

    total = exact_dot(xs, ws).to_fraction() * Fraction(2) ** (ex + ew)
    if acc_in is not None:
        total += _fraction(acc_in)

    if mode.output_format is OutputFormat.INT16:
        return saturate_int16(total)

    return truncate_exact_to_fp16(total)


def _as_exact(tensor, mode) -> np.ndarray:
    if isinstance(tensor, EncodedTensor):
        return decode_tensor_exact(tensor)

    array = np.asarray(tensor, dtype=np.float64)
    if mode is not None:
        return decode_tensor_exact(encode_tensor(array, Mode.of(mode).element_format))

    out = np.empty(array.shape, dtype=object)
    for index in np.ndindex(*array.shape):
        out[index] = ExactValue.of(float(array[index]))

    return out


def _scaled_integers(exact: np.ndarray) -> Tuple[np.ndarray, int]:
    base = min((v.exponent for v in exact.flat if not v.is_zero), default=0)

    ints = np.empty(exact.shape, dtype=object)
    for index, v in np.ndenumerate(exact):
        ints[index] = 0 if v.is_zero else v.signed_significand << (v.exponent - base)

    return ints, base


def reference_gemm(a, w, mode=None) -> np.ndarray:
    """Exact `a @ w.T` rounded once to float64; float inputs go through `mode`'s element format first."""
    a_exact, w_exact = _as_exact(a, mode), _as_exact(w, mode)

    if a_exact.ndim != 2 or w_exact.ndim != 2:
        raise ShapeMismatchError("reference_gemm takes two matrices")

    if a_exact.shape[1] != w_exact.shape[1]:
        raise ShapeMismatchError(
            f"inner dimensions disagree: {a_exact.shape} against {w_exact.shape}"
        )

    a_int, a_base = _scaled_integers(a_exact)
    w_int, w_base = _scaled_integers(w_exact)

    products = a_int.dot(w_int.T)
    scale = Fraction(2) ** (a_base + w_base)

    out = np.empty(products.shape, dtype=np.float64)
    for index, p in np.ndenumerate(products):
        out[index] = float(Fraction(int(p)) * scale)

    return out


@dataclass(frozen=True)
class ErrorStats(JsonMixin):
    count: int
    median: float
    mean: float
    max: float


def relative_errors(result, reference, floor: float = 1e-3) -> ErrorStats:
    result = np.asarray(result, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)

    if result.shape != reference.shape:
        raise ShapeMismatchError(f"result {result.shape} against reference {reference.shape}")

    mask = np.abs(reference) > floor
    if not mask.any():
        return ErrorStats(0, 0.0, 0.0, 0.0)

    errors = np.abs(result[mask] - reference[mask]) / np.abs(reference[mask])

    return ErrorStats(
        int(errors.size),
        float(np.median(errors)),
        float(np.mean(errors)),
        float(np.max(errors)),
    )
