import logging

from dataclasses import dataclass
from typing import Union

from ..exceptions import FormatMismatchError
from ..formats import ExactValue, FP16, INT16, ScalarCode
from .modes import Mode, OutputFormat


logger = logging.getLogger(__name__)


OUTPUT_MANTISSA_BITS = FP16.mantissa_bits
OUTPUT_MAX_EXPONENT = FP16.largest_exponent
OUTPUT_MIN_EXPONENT = FP16.smallest_exponent
OUTPUT_MAX_FINITE = (FP16.max_exponent_field << OUTPUT_MANTISSA_BITS) | ((1 << OUTPUT_MANTISSA_BITS) - 1)

INT16_MIN = -(1 << (INT16.width - 1))
INT16_MAX = (1 << (INT16.width - 1)) - 1


@dataclass(frozen=True)
class Normalized:
    sign: int
    exponent: int
    mantissa: int
    mantissa_bits: int
    is_zero: bool = False
    saturated: bool = False
    flushed: bool = False

    @classmethod
    def zero(cls) -> "Normalized":
        return cls(1, 0, 0, 0, True)


def normalize(acc: int, e_max: int, cap: int, fraction_bits: int) -> Normalized:
    """Leading-one detection on `acc * 2^(e_max - cap - fraction_bits)`."""
    if acc == 0:
        return Normalized.zero()

    magnitude = abs(acc)
    lead = magnitude.bit_length() - 1
    exponent = e_max - cap - fraction_bits + lead

    saturated = exponent > OUTPUT_MAX_EXPONENT
    flushed = exponent < OUTPUT_MIN_EXPONENT
    if saturated:
        logger.debug("saturate: exponent %d above FP16 range", exponent)
    elif flushed:
        logger.debug("flush: exponent %d below FP16 normal range", exponent)

    return Normalized(
        -1 if acc < 0 else 1,
        exponent,
        magnitude - (1 << lead),
        lead,
        False,
        saturated,
        flushed,
    )


def _pack_fp16(value: Normalized) -> int:
    if value.is_zero or value.flushed:
        return 0

    sign_field = (1 if value.sign < 0 else 0) << 15
    if value.saturated:
        return sign_field | OUTPUT_MAX_FINITE

    drop = value.mantissa_bits - OUTPUT_MANTISSA_BITS
    mantissa = value.mantissa >> drop if drop > 0 else value.mantissa << -drop

    return sign_field | ((value.exponent + FP16.bias) << OUTPUT_MANTISSA_BITS) | mantissa


def saturate16(acc: int) -> int:
    if not INT16_MIN <= acc <= INT16_MAX:
        logger.debug("saturate: %d outside INT16", acc)

    return min(max(acc, INT16_MIN), INT16_MAX)


def round_output(value: Union[Normalized, int], mode: Mode) -> ScalarCode:
    if mode.output_format is OutputFormat.INT16:
        if isinstance(value, Normalized):
            raise FormatMismatchError(f"mode {mode} rounds an integer accumulator")

        return ScalarCode(INT16, saturate16(value) & 0xFFFF)

    if not isinstance(value, Normalized):
        raise FormatMismatchError(f"mode {mode} rounds a normalized FP value")

    return ScalarCode(FP16, _pack_fp16(value))


def finalize(exact: ExactValue, mode: Mode) -> ScalarCode:
    exact = ExactValue.of(exact)

    if mode.output_format is OutputFormat.INT16:
        if not exact.is_zero and exact.exponent < 0:
            raise FormatMismatchError(f"{exact!r} is not an integer accumulator")

        return round_output(0 if exact.is_zero else exact.signed_significand << exact.exponent, mode)

    if exact.is_zero:
        return round_output(Normalized.zero(), mode)

    return round_output(normalize(exact.signed_significand, exact.exponent, 0, 0), mode)
