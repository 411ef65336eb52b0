import logging

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

from ..exceptions import UnrepresentableError
from .descriptor import FormatDescriptor
from .exact import ExactValue


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScalarCode:
    format: FormatDescriptor
    bits: int

    def __post_init__(self):
        fmt = self.format
        if not 0 <= self.bits < (1 << fmt.width):
            raise UnrepresentableError(
                f"bits 0x{self.bits:x} do not fit the {fmt.width}-bit {fmt} format"
            )

        if fmt.is_float and self.exponent_field == fmt.max_exponent_field + 1:
            raise UnrepresentableError(
                f"bits 0x{self.bits:x} use the reserved exponent field of {fmt}"
            )

    @property
    def sign_bit(self) -> int:
        return self.bits >> (self.format.width - 1) if self.format.sign_bits else 0

    @property
    def exponent_field(self) -> int:
        fmt = self.format

        return (self.bits >> fmt.mantissa_bits) & ((1 << fmt.exponent_bits) - 1)

    @property
    def mantissa_field(self) -> int:
        return self.bits & ((1 << self.format.mantissa_bits) - 1)

    @property
    def as_signed(self) -> int:
        width = self.format.width
        if self.bits >> (width - 1):
            return self.bits - (1 << width)

        return self.bits

    def __repr__(self) -> str:
        digits = (self.format.width + 3) // 4

        return f"ScalarCode({self.format}, 0x{self.bits:0{digits}x})"


class FormatRange(NamedTuple):
    min_positive_normal: ExactValue
    max_finite: ExactValue


def _shift_round_half_even(value: int, shift: int) -> int:
    """value * 2^shift for non-negative value, rounded to nearest even."""
    if shift >= 0:
        return value << shift

    drop = -shift
    quotient = value >> drop
    remainder = value - (quotient << drop)
    half = 1 << (drop - 1)

    if remainder > half or (remainder == half and quotient & 1):
        quotient += 1

    return quotient


def _encode_float(value: ExactValue, fmt: FormatDescriptor) -> int:
    sign_field = (1 if value.sign < 0 else 0) << (fmt.exponent_bits + fmt.mantissa_bits)
    if value.is_zero:
        return sign_field

    exponent = value.log2_floor()
    if exponent < fmt.smallest_exponent:
        logger.debug("flush to zero: %r below %s min normal", value, fmt)
        return sign_field

    # significand with mantissa_bits fraction bits, in [2^M, 2^(M+1)]
    quotient = _shift_round_half_even(
        value.significand, value.exponent - (exponent - fmt.mantissa_bits)
    )
    if quotient >> (fmt.mantissa_bits + 1):
        quotient >>= 1
        exponent += 1

    field = exponent + fmt.bias
    if field > fmt.max_exponent_field:
        logger.debug("saturate: %r beyond %s max finite", value, fmt)
        return sign_field | (fmt.max_exponent_field << fmt.mantissa_bits) | (
            (1 << fmt.mantissa_bits) - 1
        )

    return sign_field | (field << fmt.mantissa_bits) | (quotient - (1 << fmt.mantissa_bits))


def _encode_integer(value: ExactValue, fmt: FormatDescriptor) -> int:
    width = fmt.width
    magnitude = _shift_round_half_even(value.significand, value.exponent + fmt.fraction_bits)
    integer = value.sign * magnitude

    low, high = -(1 << (width - 1)), (1 << (width - 1)) - 1
    if not low <= integer <= high:
        logger.debug("saturate: %r outside %s", value, fmt)
        integer = min(max(integer, low), high)

    return integer & ((1 << width) - 1)


def encode(value, fmt: FormatDescriptor) -> ScalarCode:
    """Nearest code under round-to-nearest-even, saturating, flush-to-zero."""
    value = ExactValue.of(value)

    if fmt.is_float:
        return ScalarCode(fmt, _encode_float(value, fmt))

    return ScalarCode(fmt, _encode_integer(value, fmt))


def decode(code: ScalarCode) -> ExactValue:
    fmt = code.format

    if not fmt.is_float:
        return ExactValue.make(code.as_signed, -fmt.fraction_bits)

    sign = -1 if code.sign_bit else 1
    field = code.exponent_field
    if field == 0:
        return ExactValue.zero(sign)

    return ExactValue(
        sign,
        (1 << fmt.mantissa_bits) | code.mantissa_field,
        field - fmt.bias - fmt.mantissa_bits,
        False,
    )


def code_space(fmt: FormatDescriptor) -> Iterator[ScalarCode]:
    for bits in range(1 << fmt.width):
        if fmt.is_float and (bits >> fmt.mantissa_bits) & ((1 << fmt.exponent_bits) - 1) == (
            fmt.max_exponent_field + 1
        ):
            continue

        yield ScalarCode(fmt, bits)


@lru_cache(maxsize=None)
def format_range(fmt: FormatDescriptor) -> FormatRange:
    smallest = largest = None

    for code in code_space(fmt):
        value = decode(code)
        if value.is_zero or value.sign < 0:
            continue

        fraction = value.to_fraction()
        if smallest is None or fraction < smallest[0]:
            smallest = (fraction, value)
        if largest is None or fraction > largest[0]:
            largest = (fraction, value)

    return FormatRange(smallest[1], largest[1])
