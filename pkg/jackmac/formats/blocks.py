from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

from ..exceptions import FormatMismatchError, ShapeMismatchError
from .codec import ScalarCode, decode, encode, format_range
from .descriptor import FormatDescriptor
from .exact import ExactValue


SHARED_EXPONENT_MIN = -128
SHARED_EXPONENT_MAX = 127


def _check_elements(shared_exponent: int, elements: Sequence[ScalarCode]) -> FormatDescriptor:
    if not SHARED_EXPONENT_MIN <= shared_exponent <= SHARED_EXPONENT_MAX:
        raise ShapeMismatchError(f"shared exponent {shared_exponent} outside signed 8-bit range")

    if not elements:
        raise ShapeMismatchError("a block needs at least one element")

    fmt = elements[0].format
    if not fmt.is_mx:
        raise FormatMismatchError(f"block elements must be MX-encoded, got {fmt}")

    if any(e.format != fmt for e in elements):
        raise FormatMismatchError("block elements mix formats")

    return fmt


@dataclass(frozen=True)
class BlockSlice:
    """A contiguous run of one block's elements, still under its shared exponent."""

    shared_exponent: int
    elements: Tuple[ScalarCode, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        fmt = _check_elements(self.shared_exponent, self.elements)

        if len(self.elements) > fmt.block_size:
            raise ShapeMismatchError("slice is longer than its block")

    @property
    def format(self) -> FormatDescriptor:
        return self.elements[0].format

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class BlockCode:
    shared_exponent: int
    elements: Tuple[ScalarCode, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        fmt = _check_elements(self.shared_exponent, self.elements)

        if len(self.elements) != fmt.block_size:
            raise ShapeMismatchError(
                f"{fmt} block holds {fmt.block_size} elements, got {len(self.elements)}"
            )

    @property
    def format(self) -> FormatDescriptor:
        return self.elements[0].format

    def __len__(self) -> int:
        return len(self.elements)

    def slice(self, start: int, stop: int) -> BlockSlice:
        return BlockSlice(self.shared_exponent, self.elements[start:stop])

    def lanes(self, lanes: int) -> Iterator[BlockSlice]:
        for start in range(0, len(self.elements), lanes):
            yield self.slice(start, start + lanes)


def shared_exponent_for(values: Sequence[ExactValue], fmt: FormatDescriptor) -> int:
    nonzero = [v for v in values if not v.is_zero]
    if not nonzero:
        return SHARED_EXPONENT_MIN

    exponent = max(v.log2_floor() for v in nonzero) - fmt.largest_exponent

    # one step up when the largest magnitude would clamp at the top code
    limit = format_range(fmt).max_finite.to_fraction() * Fraction(2) ** exponent
    if max(abs(v).to_fraction() for v in nonzero) > limit:
        exponent += 1

    return min(max(exponent, SHARED_EXPONENT_MIN), SHARED_EXPONENT_MAX)


def quantize_block(values: Sequence, fmt: FormatDescriptor) -> BlockCode:
    if not fmt.is_mx:
        raise FormatMismatchError(f"quantize_block needs an MX format, got {fmt}")

    if len(values) != fmt.block_size:
        raise ShapeMismatchError(f"{fmt} block holds {fmt.block_size} values, got {len(values)}")

    exact = [ExactValue.of(v) for v in values]
    shared_exponent = shared_exponent_for(exact, fmt)

    elements = [encode(v.scale(-shared_exponent), fmt) for v in exact]

    return BlockCode(shared_exponent, tuple(elements))


def dequantize_block(block: BlockCode) -> List[ExactValue]:
    return [decode(e).scale(block.shared_exponent) for e in block.elements]
