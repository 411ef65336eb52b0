from enum import Enum
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

from ..exceptions import ConfigError
from ..mixins.serialize import JsonMixin


MAX_ELEMENT_BITS = 16
SHARED_EXPONENT_BITS = 8
DEFAULT_BLOCK_SIZE = 32


class FormatKind(str, Enum):
    INT = "INT"
    FP = "FP"
    MXINT = "MXINT"
    MXFP = "MXFP"

    @property
    def is_mx(self) -> bool:
        return self in (FormatKind.MXINT, FormatKind.MXFP)

    @property
    def is_float(self) -> bool:
        return self in (FormatKind.FP, FormatKind.MXFP)


def bias_for(exponent_bits: int) -> int:
    if exponent_bits == 0:
        return 0

    return (1 << (exponent_bits - 1)) - 1


@dataclass(frozen=True)
class FormatDescriptor(JsonMixin):
    kind: FormatKind
    sign_bits: int
    exponent_bits: int
    mantissa_bits: int
    shared_exponent_bits: int = 0
    block_size: int = 1
    bias: int = field(init=False)

    __json_decoders__ = {"kind": FormatKind}
    __json_derived__ = ("bias",)

    def __post_init__(self):
        object.__setattr__(self, "kind", FormatKind(self.kind))

        if self.sign_bits not in (0, 1):
            raise ConfigError("sign_bits must be 0 or 1")

        if min(self.exponent_bits, self.mantissa_bits) < 0:
            raise ConfigError("field widths must be non-negative")

        if self.width > MAX_ELEMENT_BITS:
            raise ConfigError(f"element width {self.width} exceeds {MAX_ELEMENT_BITS} bits")

        mx_shape = self.shared_exponent_bits == SHARED_EXPONENT_BITS and self.block_size >= 2
        if self.kind.is_mx != mx_shape:
            raise ConfigError(
                f"{self.kind.value} requires shared_exponent_bits="
                f"{SHARED_EXPONENT_BITS if self.kind.is_mx else 0} and "
                f"block_size {'>= 2' if self.kind.is_mx else '= 1'}"
            )

        if not self.kind.is_mx and (self.shared_exponent_bits or self.block_size != 1):
            raise ConfigError("scalar formats have no shared exponent and block_size 1")

        if self.kind.is_float:
            if self.exponent_bits < 2 or self.sign_bits != 1:
                raise ConfigError("floating formats need a sign bit and at least 2 exponent bits")
        elif self.exponent_bits != 0:
            raise ConfigError(f"{self.kind.value} formats have no exponent field")
        elif self.mantissa_bits < 1:
            raise ConfigError("integer formats need at least one magnitude bit")

        object.__setattr__(self, "bias", bias_for(self.exponent_bits))

    @property
    def width(self) -> int:
        return self.sign_bits + self.exponent_bits + self.mantissa_bits

    @property
    def is_float(self) -> bool:
        return self.kind.is_float

    @property
    def is_mx(self) -> bool:
        return self.kind.is_mx

    @property
    def fraction_bits(self) -> int:
        """Binary point position of the element significand."""
        if self.kind is FormatKind.MXINT:
            return self.mantissa_bits - 1

        if self.kind is FormatKind.INT:
            return 0

        return self.mantissa_bits

    @property
    def significand_bits(self) -> int:
        """Width of the operand the multiplier sees."""
        if self.is_float:
            return self.mantissa_bits + 1

        return self.width

    @property
    def max_exponent_field(self) -> int:
        # all-ones is reserved
        return (1 << self.exponent_bits) - 2

    @property
    def largest_exponent(self) -> int:
        """Largest unbiased exponent of a representable element magnitude."""
        if self.is_float:
            return self.max_exponent_field - self.bias

        return self.mantissa_bits - 1 - self.fraction_bits

    @property
    def smallest_exponent(self) -> int:
        if self.is_float:
            return 1 - self.bias

        return -self.fraction_bits

    def with_block_size(self, block_size: int) -> "FormatDescriptor":
        if not self.is_mx:
            raise ConfigError("only MX formats carry a block size")

        return replace(self, block_size=block_size)

    @property
    def name(self) -> Optional[str]:
        for name, preset in PRESETS.items():
            if preset.is_mx != self.is_mx:
                continue

            if (replace(preset, block_size=self.block_size) if self.is_mx else preset) == self:
                return name

        return None

    @classmethod
    def preset(cls, name: str, block_size: Optional[int] = None) -> "FormatDescriptor":
        try:
            fmt = PRESETS[name.lower()]
        except KeyError:
            raise ConfigError(
                f"unknown format {name!r}; expected one of {', '.join(PRESETS)}"
            ) from None

        if block_size is not None:
            fmt = fmt.with_block_size(block_size)

        return fmt

    def __str__(self) -> str:
        name = self.name or self.kind.value
        if self.is_mx and self.block_size != DEFAULT_BLOCK_SIZE:
            return f"{name}@{self.block_size}"

        return name


def _mx(kind: FormatKind, exponent_bits: int, mantissa_bits: int) -> FormatDescriptor:
    return FormatDescriptor(
        kind, 1, exponent_bits, mantissa_bits, SHARED_EXPONENT_BITS, DEFAULT_BLOCK_SIZE
    )


PRESETS: Dict[str, FormatDescriptor] = {
    "bf16": FormatDescriptor(FormatKind.FP, 1, 8, 7),
    "fp8_e4m3": FormatDescriptor(FormatKind.FP, 1, 4, 3),
    "int8": FormatDescriptor(FormatKind.INT, 1, 0, 7),
    "int4": FormatDescriptor(FormatKind.INT, 1, 0, 3),
    "mxint8": _mx(FormatKind.MXINT, 0, 7),
    "mxint4": _mx(FormatKind.MXINT, 0, 3),
    "mxfp8_e4m3": _mx(FormatKind.MXFP, 4, 3),
    "fp16": FormatDescriptor(FormatKind.FP, 1, 5, 10),
    "int16": FormatDescriptor(FormatKind.INT, 1, 0, 15),
}

BF16 = PRESETS["bf16"]
FP8_E4M3 = PRESETS["fp8_e4m3"]
INT8 = PRESETS["int8"]
INT4 = PRESETS["int4"]
MXINT8 = PRESETS["mxint8"]
MXINT4 = PRESETS["mxint4"]
MXFP8_E4M3 = PRESETS["mxfp8_e4m3"]
FP16 = PRESETS["fp16"]
INT16 = PRESETS["int16"]
