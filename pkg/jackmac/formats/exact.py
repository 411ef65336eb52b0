import math
import numbers

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ..exceptions import UnrepresentableError


@dataclass(frozen=True)
class ExactValue:
    """A dyadic rational (-1)^s * significand * 2^exponent.

    Normalized on construction: the significand is odd, or zero with
    `is_zero` set. Zero keeps its sign so signed-zero codes round-trip.
    """

    sign: int = 1
    significand: int = 0
    exponent: int = 0
    is_zero: bool = True

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

        if self.significand < 0:
            raise ValueError("significand must be non-negative")

        if self.significand == 0:
            object.__setattr__(self, "exponent", 0)
            object.__setattr__(self, "is_zero", True)
            return

        trailing = (self.significand & -self.significand).bit_length() - 1
        object.__setattr__(self, "significand", self.significand >> trailing)
        object.__setattr__(self, "exponent", self.exponent + trailing)
        object.__setattr__(self, "is_zero", False)

    @classmethod
    def zero(cls, sign: int = 1) -> "ExactValue":
        return cls(sign, 0, 0, True)

    @classmethod
    def make(cls, integer: int, exponent: int = 0) -> "ExactValue":
        return cls(-1 if integer < 0 else 1, abs(integer), exponent, integer == 0)

    @classmethod
    def of(cls, value: Union["ExactValue", numbers.Real, str]) -> "ExactValue":
        if isinstance(value, ExactValue):
            return value

        if isinstance(value, str):
            value = float(value)

        if isinstance(value, numbers.Integral):
            return cls.make(int(value))

        if isinstance(value, Fraction):
            return cls._of_fraction(value)

        value = float(value)
        if not math.isfinite(value):
            raise UnrepresentableError(f"unrepresentable: {value}")

        if value == 0.0:
            return cls.zero(-1 if math.copysign(1.0, value) < 0 else 1)

        numerator, denominator = value.as_integer_ratio()

        return cls._of_fraction(Fraction(numerator, denominator))

    @classmethod
    def _of_fraction(cls, value: Fraction) -> "ExactValue":
        denominator = value.denominator
        if denominator & (denominator - 1):
            raise UnrepresentableError(f"unrepresentable: {value} is not dyadic")

        return cls.make(value.numerator, -(denominator.bit_length() - 1))

    @property
    def signed_significand(self) -> int:
        return self.sign * self.significand

    def log2_floor(self) -> int:
        if self.is_zero:
            raise ValueError("log2 of zero")

        return self.exponent + self.significand.bit_length() - 1

    def scale(self, power: int) -> "ExactValue":
        if self.is_zero:
            return self

        return ExactValue(self.sign, self.significand, self.exponent + power, False)

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.signed_significand << self.exponent)

        return Fraction(self.signed_significand, 1 << -self.exponent)

    def __float__(self) -> float:
        if self.is_zero:
            return math.copysign(0.0, self.sign)

        return float(self.to_fraction())

    def __neg__(self) -> "ExactValue":
        return ExactValue(-self.sign, self.significand, self.exponent, self.is_zero)

    def __abs__(self) -> "ExactValue":
        return ExactValue(1, self.significand, self.exponent, self.is_zero)

    def __add__(self, other: "ExactValue") -> "ExactValue":
        if self.is_zero:
            return other

        if other.is_zero:
            return self

        base = min(self.exponent, other.exponent)
        total = (self.signed_significand << (self.exponent - base)) + (
            other.signed_significand << (other.exponent - base)
        )

        return ExactValue.make(total, base)

    def __mul__(self, other: "ExactValue") -> "ExactValue":
        sign = self.sign * other.sign
        if self.is_zero or other.is_zero:
            return ExactValue.zero(sign)

        return ExactValue(
            sign,
            self.significand * other.significand,
            self.exponent + other.exponent,
            False,
        )

    def __repr__(self) -> str:
        if self.is_zero:
            return f"ExactValue({'-' if self.sign < 0 else '+'}0)"

        return f"ExactValue({self.signed_significand}*2^{self.exponent})"
