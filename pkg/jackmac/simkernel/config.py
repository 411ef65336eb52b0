from enum import Enum
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, Tuple

from ..datapath import Mode, ModeName
from ..exceptions import ConfigError, UnsupportedModeError
from ..mixins.serialize import JsonMixin


class UnitKind(str, Enum):
    JACK = "JACK"
    BASELINE = "BASELINE"


# a conventional MAC array has one multiplier per format it was built for
BASELINE_MODES: FrozenSet[ModeName] = frozenset(
    {ModeName.BF16, ModeName.FP8, ModeName.INT8, ModeName.INT4}
)


@dataclass(frozen=True)
class ArrayConfig(JsonMixin):
    rows: int = 32
    cols: int = 32
    unit: UnitKind = UnitKind.JACK
    input_link_bits: int = 8
    ibuf_kb: int = 512
    wbuf_kb: int = 512
    obuf_kb: int = 256
    bandwidth_bytes_per_cycle: int = 2048
    clock_mhz: float = 286.0
    memory_model: bool = True
    wide_accumulation: bool = False

    __json_decoders__ = {"unit": UnitKind}

    def __post_init__(self):
        object.__setattr__(self, "unit", UnitKind(self.unit))

        for name in ("rows", "cols", "input_link_bits", "bandwidth_bytes_per_cycle"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")

        for name in ("ibuf_kb", "wbuf_kb", "obuf_kb"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} cannot be negative")

    @classmethod
    def preset(cls, name: str) -> "ArrayConfig":
        try:
            return PRESETS[name.lower()]
        except KeyError:
            raise ConfigError(
                f"unknown array preset {name!r}; expected one of {', '.join(PRESETS)}"
            ) from None

    def with_(self, **changes) -> "ArrayConfig":
        return replace(self, **changes)

    def supports(self, mode) -> bool:
        mode = Mode.of(mode)

        return self.unit is UnitKind.JACK or mode.name in BASELINE_MODES

    def require(self, mode) -> Mode:
        mode = Mode.of(mode)
        if not self.supports(mode):
            raise UnsupportedModeError(f"{self.unit.value} array does not run {mode}")

        return mode

    def lanes_per_unit(self, mode) -> int:
        mode = self.require(mode)
        if self.unit is UnitKind.JACK:
            return mode.lanes

        # one multiplier per unit, four-way packed for 4-bit significands
        return mode.lanes // 4

    def effective_grid(self, mode) -> Tuple[int, int]:
        lanes = self.lanes_per_unit(mode)

        return self.rows * lanes, self.cols * lanes

    def effective_multipliers(self, mode) -> int:
        rows, cols = self.effective_grid(mode)

        return rows * cols


PRESETS: Dict[str, ArrayConfig] = {
    "jack": ArrayConfig(),
    "baseline": ArrayConfig(rows=128, cols=128, unit=UnitKind.BASELINE, input_link_bits=16),
}
