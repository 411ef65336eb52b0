from enum import Enum
from dataclasses import dataclass
from typing import Callable, FrozenSet, List, Optional, Sequence, Tuple, Union

from ..exceptions import FormatMismatchError, LaneMismatchError
from ..formats import BlockCode, BlockSlice, ExactValue, ScalarCode, decode
from ..mixins.serialize import JsonMixin
from .modes import Mode, ModeName
from .normalizer import INT16_MAX, INT16_MIN, normalize, round_output
from .stages import (
    AlignmentSet,
    ProductTerm,
    exponent_extract,
    grouped_accumulate,
    multiply_lanes,
    ungrouped_accumulate,
)


Operands = Union[Sequence[ScalarCode], BlockSlice, BlockCode]

EXPONENT_CALCULATORS = 16


class Submodule(str, Enum):
    CSM = "CSM"
    XOR_BUNDLE = "XOR"
    EXPONENT_EXTRACTOR = "ExpExtract"
    NORMALIZER = "Normalizer"
    ROUNDER = "Rounder"


def _submodules(values) -> FrozenSet[Submodule]:
    return frozenset(Submodule(v) for v in values)


@dataclass(frozen=True)
class Activation(JsonMixin):
    submodules: FrozenSet[Submodule]
    exponent_calculators: int = 0
    direct_output: bool = False
    adds_shared_exponents: bool = False

    __json_decoders__ = {"submodules": _submodules}

    def __contains__(self, submodule) -> bool:
        return Submodule(submodule) in self.submodules


def mode_activation(mode: Union[Mode, ModeName, str]) -> Activation:
    mode = Mode.of(mode)

    if mode.is_integer:
        return Activation(frozenset({Submodule.CSM}), direct_output=True)

    if not mode.is_float:
        # MXINT lanes share one exponent, so one calculator suffices
        return Activation(
            frozenset(
                {Submodule.CSM, Submodule.EXPONENT_EXTRACTOR, Submodule.NORMALIZER, Submodule.ROUNDER}
            ),
            exponent_calculators=1,
            adds_shared_exponents=True,
        )

    return Activation(
        frozenset(Submodule),
        exponent_calculators=EXPONENT_CALCULATORS,
        adds_shared_exponents=mode.is_mx,
    )


@dataclass(frozen=True)
class JackResult:
    mode: Mode
    output: ScalarCode
    e_max: int
    raw_accumulator: int
    active_submodules: Activation
    alignment_cap: int = 0
    fraction_bits: int = 0
    saturated: bool = False
    flushed: bool = False

    def exact_value(self) -> ExactValue:
        if self.mode.is_integer:
            return ExactValue.make(self.raw_accumulator)

        return ExactValue.make(
            self.raw_accumulator, self.e_max - self.alignment_cap - self.fraction_bits
        )

    @property
    def value(self) -> float:
        return float(decode(self.output))

    def to_dict(self) -> dict:
        return {
            "mode": str(self.mode),
            "output": {
                "format": str(self.output.format),
                "bits": self.output.bits,
                "hex": f"0x{self.output.bits:04x}",
                "value": self.value,
            },
            "e_max": self.e_max,
            "raw_accumulator": self.raw_accumulator,
            "alignment_cap": self.alignment_cap,
            "fraction_bits": self.fraction_bits,
            "active_submodules": self.active_submodules.to_dict(),
            "saturated": self.saturated,
            "flushed": self.flushed,
        }


def _unpack(mode: Mode, x: Operands, w: Operands) -> Tuple[List[ScalarCode], List[ScalarCode], int]:
    blocked = (BlockSlice, BlockCode)

    if mode.is_mx:
        if not isinstance(x, blocked) or not isinstance(w, blocked):
            raise FormatMismatchError(f"mode {mode} takes block slices")

        if len(x) != len(w):
            raise LaneMismatchError(f"block slices differ in length: {len(x)} vs {len(w)}")

        if len(x) > mode.lanes:
            raise LaneMismatchError(f"mode {mode} has {mode.lanes} lanes, got a slice of {len(x)}")

        return list(x.elements), list(w.elements), x.shared_exponent + w.shared_exponent

    if isinstance(x, blocked) or isinstance(w, blocked):
        raise FormatMismatchError(f"mode {mode} does not take block slices")

    xs, ws = list(x), list(w)
    if len(xs) != mode.lanes or len(ws) != mode.lanes:
        raise LaneMismatchError(f"mode {mode} has {mode.lanes} lanes, got {len(xs)} and {len(ws)}")

    return xs, ws, 0


def _check_acc_in(mode: Mode, acc_in: Optional[ScalarCode]):
    if acc_in is not None and acc_in.format != mode.output_descriptor:
        raise FormatMismatchError(f"acc_in is {acc_in.format}, mode {mode} accumulates in {mode.output_descriptor}")


def acc_in_term(acc_in: Optional[ScalarCode], mode: Mode, shared_bias_add: int = 0) -> ProductTerm:
    """The incoming FP16 partial sum as one more term of the adder tree.

    Its exponent is expressed in the lane products' frame, so that after the
    shared exponents are added it lands at its own binary point.
    """
    if acc_in is None:
        return ProductTerm.zero()

    fmt = acc_in.format
    field = acc_in.exponent_field
    sign = -1 if acc_in.sign_bit else 1
    if field == 0:
        return ProductTerm.zero(sign)

    exponent = field - fmt.bias - fmt.mantissa_bits + mode.fraction_bits - shared_bias_add

    return ProductTerm(sign, exponent, (1 << fmt.mantissa_bits) | acc_in.mantissa_field)


Accumulate = Callable[[Sequence[ProductTerm], AlignmentSet], int]


def _mac(
    mode: Union[Mode, str],
    x: Operands,
    w: Operands,
    acc_in: Optional[ScalarCode],
    accumulate: Accumulate,
) -> JackResult:
    mode = Mode.of(mode)
    _check_acc_in(mode, acc_in)

    xs, ws, shared_bias_add = _unpack(mode, x, w)
    terms = multiply_lanes(mode, xs, ws)
    activation = mode_activation(mode)

    if mode.is_integer:
        # no exponent path: products go straight to the adder tree
        alignment = AlignmentSet(0, (0,) * len(terms), mode.product_bits + len(terms).bit_length() + 1)
        acc = accumulate(terms, alignment)
        if acc_in is not None:
            acc += acc_in.as_signed

        return JackResult(
            mode,
            round_output(acc, mode),
            0,
            acc,
            activation,
            saturated=not INT16_MIN <= acc <= INT16_MAX,
        )

    terms.append(acc_in_term(acc_in, mode, shared_bias_add))

    alignment = exponent_extract(terms, mode, shared_bias_add)
    acc = accumulate(terms, alignment)
    normalized = normalize(acc, alignment.e_max, alignment.cap, mode.fraction_bits)

    return JackResult(
        mode,
        round_output(normalized, mode),
        alignment.e_max,
        acc,
        activation,
        alignment.cap,
        mode.fraction_bits,
        normalized.saturated,
        normalized.flushed,
    )


def jack_mac(
    mode: Union[Mode, str], x: Operands, w: Operands, acc_in: Optional[ScalarCode] = None
) -> JackResult:
    return _mac(mode, x, w, acc_in, grouped_accumulate)


def jack_mac_reference(
    mode: Union[Mode, str], x: Operands, w: Operands, acc_in: Optional[ScalarCode] = None
) -> JackResult:
    return _mac(mode, x, w, acc_in, ungrouped_accumulate)
