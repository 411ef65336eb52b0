from enum import Enum
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ..csm import Precision, SubMulConfig, SIGNED, UNSIGNED, FUSION_OFFSETS
from ..exceptions import ConfigError
from ..formats import DEFAULT_BLOCK_SIZE, FormatDescriptor, FP16, INT16


class ModeName(str, Enum):
    BF16 = "bf16"
    FP8 = "fp8"
    INT8 = "int8"
    INT4 = "int4"
    MXINT8 = "mxint8"
    MXINT4 = "mxint4"
    MXFP8 = "mxfp8"


class OutputFormat(str, Enum):
    FP16 = "FP16"
    INT16 = "INT16"


_ELEMENT_PRESETS: Dict[ModeName, str] = {
    ModeName.BF16: "bf16",
    ModeName.FP8: "fp8_e4m3",
    ModeName.INT8: "int8",
    ModeName.INT4: "int4",
    ModeName.MXINT8: "mxint8",
    ModeName.MXINT4: "mxint4",
    ModeName.MXFP8: "mxfp8_e4m3",
}

# format preset names are accepted as mode names too
_ALIASES: Dict[str, ModeName] = {
    **{mode.value: mode for mode in ModeName},
    **{preset: mode for mode, preset in _ELEMENT_PRESETS.items()},
}


@dataclass(frozen=True)
class Mode:
    name: ModeName
    element_format: FormatDescriptor

    def __post_init__(self):
        object.__setattr__(self, "name", ModeName(self.name))

        fmt = self.element_format
        expected = FormatDescriptor.preset(_ELEMENT_PRESETS[self.name])
        if expected.is_mx and fmt.is_mx:
            expected = expected.with_block_size(fmt.block_size)

        if fmt != expected:
            raise ConfigError(f"mode {self.name.value} cannot run {fmt} elements")

        if fmt.significand_bits not in (4, 8):
            raise ConfigError(f"{fmt} significands are neither 4 nor 8 bits wide")

    @classmethod
    def of(cls, name, block_size: Optional[int] = None) -> "Mode":
        if isinstance(name, Mode):
            if block_size is None or not name.is_mx:
                return name
            return cls(name.name, name.element_format.with_block_size(block_size))

        key = name.value if isinstance(name, ModeName) else str(name).lower()
        try:
            mode = _ALIASES[key]
        except KeyError:
            raise ConfigError(
                f"unknown mode {name!r}; expected one of {', '.join(m.value for m in ModeName)}"
            ) from None

        fmt = FormatDescriptor.preset(_ELEMENT_PRESETS[mode])
        if block_size is not None and fmt.is_mx:
            fmt = fmt.with_block_size(block_size)

        return cls(mode, fmt)

    @property
    def is_float(self) -> bool:
        return self.element_format.is_float

    @property
    def is_mx(self) -> bool:
        return self.element_format.is_mx

    @property
    def is_integer(self) -> bool:
        return not self.is_float and not self.is_mx

    @property
    def block_size(self) -> int:
        return self.element_format.block_size

    @property
    def precision(self) -> Precision:
        return Precision(self.element_format.significand_bits)

    @property
    def lanes(self) -> int:
        return 4 if self.precision is Precision.BIT8 else 16

    @property
    def csm_config(self) -> SubMulConfig:
        # FP significands are magnitudes; integer patterns are two's complement
        return UNSIGNED if self.is_float else SIGNED

    @property
    def sub_product_offsets(self) -> Tuple[int, ...]:
        return FUSION_OFFSETS if self.precision is Precision.BIT8 else (0,)

    @property
    def output_format(self) -> OutputFormat:
        return OutputFormat.INT16 if self.is_integer else OutputFormat.FP16

    @property
    def output_descriptor(self) -> FormatDescriptor:
        return INT16 if self.output_format is OutputFormat.INT16 else FP16

    @property
    def fraction_bits(self) -> int:
        return 2 * self.element_format.fraction_bits

    @property
    def product_bits(self) -> int:
        return 2 * self.element_format.significand_bits

    @property
    def exponent_span(self) -> int:
        """Largest alignment distance between two lane products."""
        if not self.is_float:
            return 0

        fmt = self.element_format

        return 2 * (fmt.largest_exponent - fmt.smallest_exponent)

    @property
    def shifter_width(self) -> int:
        return self.product_bits + self.exponent_span

    def __str__(self) -> str:
        if self.is_mx and self.block_size != DEFAULT_BLOCK_SIZE:
            return f"{self.name.value}@{self.block_size}"

        return self.name.value


def all_modes(block_size: Optional[int] = None) -> Tuple[Mode, ...]:
    modes = (Mode.of(name) for name in ModeName)

    return tuple(Mode.of(m, block_size) if m.is_mx else m for m in modes)


def widest_shifter(lanes: int) -> int:
    """Shifter width that keeps alignment exact for every mode at this lane count."""
    return max(mode.shifter_width for mode in all_modes() if mode.lanes == lanes)
