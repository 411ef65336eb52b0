"""Precision-scalable carry-save multiplier.

Four 4x4 sub-multipliers either fuse into one 8x8 product or run as four
independent 4-bit lanes. The model is value-accurate at sub-product
granularity; carry/sum vectors are not represented.
"""

from enum import Enum
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

from .exceptions import ConfigError, LaneMismatchError, UnrepresentableError
from .mixins.serialize import JsonMixin


NIBBLE = 0xF
SUB_MULTIPLIERS_PER_CSM = 4
CSMS_PER_UNIT = 4

# (a half, b half) -> left shift applied after the sub-multiplier
FUSION_OFFSETS: Tuple[int, ...] = (0, 4, 4, 8)


class Precision(Enum):
    BIT8 = 8
    BIT4 = 4


class Grouping(str, Enum):
    UNGROUPED = "UNGROUPED"
    GROUPED_2D = "GROUPED_2D"


@dataclass(frozen=True)
class SubMulConfig:
    a_signed: bool = False
    b_signed: bool = False


UNSIGNED = SubMulConfig(False, False)
SIGNED = SubMulConfig(True, True)
SUB_MUL_CONFIGS: Tuple[SubMulConfig, ...] = (
    SubMulConfig(False, False),
    SubMulConfig(False, True),
    SubMulConfig(True, False),
    SubMulConfig(True, True),
)


def _nibble_value(pattern: int, signed: bool) -> int:
    pattern &= NIBBLE
    if signed and pattern & 0x8:
        return pattern - 0x10

    return pattern


def submul4(a: int, b: int, cfg: SubMulConfig) -> int:
    return _nibble_value(a, cfg.a_signed) * _nibble_value(b, cfg.b_signed)


def _half_configs(cfg: SubMulConfig) -> Tuple[SubMulConfig, ...]:
    # low nibbles are unsigned; a high nibble carries its operand's sign
    return (UNSIGNED, SubMulConfig(False, cfg.b_signed), SubMulConfig(cfg.a_signed, False), cfg)


def decompose8(a: int, b: int, cfg: SubMulConfig) -> Tuple[int, int, int, int]:
    a_lo, a_hi = a & NIBBLE, (a >> 4) & NIBBLE
    b_lo, b_hi = b & NIBBLE, (b >> 4) & NIBBLE

    ll, lh, hl, hh = _half_configs(cfg)

    return (
        submul4(a_lo, b_lo, ll),
        submul4(a_lo, b_hi, lh),
        submul4(a_hi, b_lo, hl),
        submul4(a_hi, b_hi, hh),
    )


def _nibble_range(signed: bool) -> Tuple[int, int]:
    return (-8, 7) if signed else (0, NIBBLE)


def _product_range(cfg: SubMulConfig) -> Tuple[int, int]:
    a, b = _nibble_range(cfg.a_signed), _nibble_range(cfg.b_signed)
    corners = [x * y for x in a for y in b]

    return min(corners), max(corners)


def fuse8x8(pll: int, plh: int, phl: int, phh: int, cfg: Optional[SubMulConfig] = None) -> int:
    if cfg is not None:
        for name, value, half in zip(("ll", "lh", "hl", "hh"), (pll, plh, phl, phh), _half_configs(cfg)):
            low, high = _product_range(half)
            if not low <= value <= high:
                raise UnrepresentableError(f"sub-product {name}={value} outside [{low}, {high}] for {cfg}")

    return (phh << 8) + ((phl + plh) << 4) + pll


def multiply8(a: int, b: int, cfg: SubMulConfig) -> int:
    return fuse8x8(*decompose8(a, b, cfg), cfg)


def csm_multiply(
    x: Union[int, Sequence[int]],
    w: Union[int, Sequence[int]],
    precision: Precision,
    cfg: Union[SubMulConfig, Sequence[SubMulConfig]] = UNSIGNED,
) -> Tuple[int, ...]:
    if precision is Precision.BIT8:
        if not isinstance(cfg, SubMulConfig):
            raise LaneMismatchError("8-bit mode takes a single sign configuration")

        return (multiply8(int(x), int(w), cfg),)

    x_lanes, w_lanes = _lanes(x), _lanes(w)
    configs = (cfg,) * SUB_MULTIPLIERS_PER_CSM if isinstance(cfg, SubMulConfig) else tuple(cfg)
    if len(configs) != SUB_MULTIPLIERS_PER_CSM:
        raise LaneMismatchError(f"4-bit mode takes {SUB_MULTIPLIERS_PER_CSM} lane configurations")

    return tuple(submul4(a, b, c) for a, b, c in zip(x_lanes, w_lanes, configs))


def _lanes(operand: Union[int, Sequence[int]]) -> Tuple[int, ...]:
    if isinstance(operand, int):
        # packed: lane 0 in the low nibble
        return tuple((operand >> (4 * i)) & NIBBLE for i in range(SUB_MULTIPLIERS_PER_CSM))

    lanes = tuple(int(v) & NIBBLE for v in operand)
    if len(lanes) != SUB_MULTIPLIERS_PER_CSM:
        raise LaneMismatchError(f"4-bit mode takes {SUB_MULTIPLIERS_PER_CSM} lanes, got {len(lanes)}")

    return lanes


@dataclass(frozen=True)
class CsmStructure(JsonMixin):
    sub_multiplier_count: int
    shifter_count: int
    grouping: Grouping
    lanes: int
    shifter_width: int

    __json_decoders__ = {"grouping": Grouping}


def structure_report(
    grouping: Union[Grouping, str], lanes: int, shifter_width: Optional[int] = None
) -> CsmStructure:
    """Sub-multiplier and barrel-shifter instances of one unit's four CSMs.

    Ungrouped, every sub-multiplier output owns a shifter. Grouped 2D,
    sub-multipliers in the same position across the CSMs share one.
    """
    grouping = Grouping(grouping)
    if lanes not in (CSMS_PER_UNIT, CSMS_PER_UNIT * SUB_MULTIPLIERS_PER_CSM):
        raise LaneMismatchError(f"lanes must be 4 or 16, got {lanes}")

    sub_multipliers = CSMS_PER_UNIT * SUB_MULTIPLIERS_PER_CSM
    shifters = sub_multipliers if grouping is Grouping.UNGROUPED else SUB_MULTIPLIERS_PER_CSM

    if shifter_width is None:
        # import here: datapath depends on this module
        from .datapath.modes import widest_shifter

        shifter_width = widest_shifter(lanes)

    return CsmStructure(sub_multipliers, shifters, grouping, lanes, shifter_width)


class MacDesign(str, Enum):
    DEDICATED = "DEDICATED"
    SCALABLE = "SCALABLE"
    IN_CSM_SHIFT = "IN_CSM_SHIFT"
    JACK = "JACK"


@dataclass(frozen=True)
class DesignInventory(JsonMixin):
    design: MacDesign
    dedicated_multipliers: Dict[str, int] = field(default_factory=dict)
    sub_multipliers: int = 0
    barrel_shifters: int = 0
    fp_adder_tree: bool = False

    __json_decoders__ = {"design": MacDesign}


def inventory(design: Union[MacDesign, str]) -> DesignInventory:
    try:
        design = MacDesign(design)
    except ValueError:
        raise ConfigError(f"unknown design {design!r}") from None

    sub_multipliers = CSMS_PER_UNIT * SUB_MULTIPLIERS_PER_CSM

    if design is MacDesign.DEDICATED:
        return DesignInventory(
            design,
            dedicated_multipliers={"bf16": 4, "fp8_e4m3": 16, "int8": 4, "int4": 16},
            fp_adder_tree=True,
        )

    if design is MacDesign.SCALABLE:
        return DesignInventory(design, sub_multipliers=sub_multipliers, fp_adder_tree=True)

    grouping = Grouping.UNGROUPED if design is MacDesign.IN_CSM_SHIFT else Grouping.GROUPED_2D

    return DesignInventory(
        design,
        sub_multipliers=sub_multipliers,
        barrel_shifters=structure_report(grouping, 16, shifter_width=0).shifter_count,
    )
