import logging

from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

from ..csm import SUB_MULTIPLIERS_PER_CSM, Precision, csm_multiply, decompose8
from ..exceptions import FormatMismatchError, LaneMismatchError
from ..formats import ScalarCode
from .modes import Mode


logger = logging.getLogger(__name__)


# e_max reported when every lane is zero; below any reachable product exponent
EMPTY_EXPONENT = -1024


class SubProduct(NamedTuple):
    position: int
    offset: int
    value: int


@dataclass(frozen=True)
class ProductTerm:
    sign: int
    exponent: int
    significand: int
    is_zero: bool = False
    # signed; sum of value << offset equals signed_significand
    sub_products: Tuple[SubProduct, ...] = ()

    @property
    def signed_significand(self) -> int:
        return self.sign * self.significand

    @classmethod
    def zero(cls, sign: int = 1) -> "ProductTerm":
        return cls(sign, 0, 0, True, ())


@dataclass(frozen=True)
class AlignmentSet:
    e_max: int
    shifts: Tuple[int, ...]
    accumulator_width: int

    @property
    def cap(self) -> int:
        return max(self.shifts, default=0)


class LaneOperand(NamedTuple):
    sign: int
    exponent: int
    pattern: int
    is_zero: bool


def lane_operand(code: ScalarCode) -> LaneOperand:
    fmt = code.format

    if not fmt.is_float:
        return LaneOperand(1, 0, code.bits, code.bits == 0)

    sign = -1 if code.sign_bit else 1
    field = code.exponent_field
    if field == 0:
        return LaneOperand(sign, 0, 0, True)

    return LaneOperand(sign, field - fmt.bias, (1 << fmt.mantissa_bits) | code.mantissa_field, False)


def xor_bundle(signs_x: Sequence[int], signs_w: Sequence[int]) -> List[int]:
    if len(signs_x) != len(signs_w):
        raise LaneMismatchError(f"sign vectors differ in length: {len(signs_x)} vs {len(signs_w)}")

    if len(signs_x) > 16:
        raise LaneMismatchError("the XOR bundle has 16 gates")

    return [-1 if (sx ^ sw) & 1 else 1 for sx, sw in zip(signs_x, signs_w)]


def _check_codes(codes: Sequence[ScalarCode], mode: Mode, side: str):
    fmt = mode.element_format
    for lane, code in enumerate(codes):
        if code.format != fmt:
            raise FormatMismatchError(f"{side}[{lane}] is {code.format}, mode {mode} needs {fmt}")


def _sub_products(mode: Mode, xs: List[LaneOperand], ws: List[LaneOperand]) -> List[Tuple[int, ...]]:
    cfg = mode.csm_config

    if mode.precision is Precision.BIT8:
        return [decompose8(a.pattern, b.pattern, cfg) for a, b in zip(xs, ws)]

    # four lanes per CSM, one per sub-multiplier
    outputs = []
    for start in range(0, len(xs), SUB_MULTIPLIERS_PER_CSM):
        x_lanes = [o.pattern for o in xs[start : start + SUB_MULTIPLIERS_PER_CSM]]
        w_lanes = [o.pattern for o in ws[start : start + SUB_MULTIPLIERS_PER_CSM]]
        pad = SUB_MULTIPLIERS_PER_CSM - len(x_lanes)

        products = csm_multiply(x_lanes + [0] * pad, w_lanes + [0] * pad, Precision.BIT4, cfg)
        outputs.extend((p,) for p in products[: len(x_lanes)])

    return outputs


def multiply_lanes(mode: Mode, xs: Sequence[ScalarCode], ws: Sequence[ScalarCode]) -> List[ProductTerm]:
    if len(xs) != len(ws):
        raise LaneMismatchError(f"operand lanes differ: {len(xs)} vs {len(ws)}")

    if len(xs) > mode.lanes:
        raise LaneMismatchError(f"mode {mode} has {mode.lanes} lanes, got {len(xs)}")

    _check_codes(xs, mode, "x")
    _check_codes(ws, mode, "w")

    ox = [lane_operand(c) for c in xs]
    ow = [lane_operand(c) for c in ws]

    if mode.is_float:
        signs = xor_bundle([o.sign < 0 for o in ox], [o.sign < 0 for o in ow])
    else:
        signs = [1] * len(ox)

    offsets = mode.sub_product_offsets
    terms = []

    for lane, (a, b, sign, raw) in enumerate(zip(ox, ow, signs, _sub_products(mode, ox, ow))):
        if a.is_zero or b.is_zero:
            terms.append(ProductTerm.zero(sign))
            continue

        if len(raw) == 1:
            sub_products = (SubProduct(lane % SUB_MULTIPLIERS_PER_CSM, 0, sign * raw[0]),)
        else:
            sub_products = tuple(
                SubProduct(position, offset, sign * value)
                for position, (offset, value) in enumerate(zip(offsets, raw))
            )

        product = sum(p.value << p.offset for p in sub_products)
        terms.append(
            ProductTerm(
                -1 if product < 0 else 1,
                a.exponent + b.exponent,
                abs(product),
                False,
                sub_products,
            )
        )

    return terms


def exponent_extract(
    terms: Sequence[ProductTerm], mode: Mode, shared_bias_add: int = 0
) -> AlignmentSet:
    """Maximum effective exponent over the non-zero lanes and each lane's distance to it."""
    if not terms:
        raise LaneMismatchError("exponent extraction needs at least one term")

    exponents = [None if t.is_zero else t.exponent + shared_bias_add for t in terms]
    live = [e for e in exponents if e is not None]

    if not live:
        return AlignmentSet(EMPTY_EXPONENT, (0,) * len(terms), mode.product_bits + 1)

    e_max = max(live)
    shifts = tuple(0 if e is None else e_max - e for e in exponents)

    significand_bits = max(mode.product_bits, *(t.significand.bit_length() for t in terms))
    width = significand_bits + max(shifts) + len(terms).bit_length() + 1

    return AlignmentSet(e_max, shifts, width)


def align_and_accumulate(terms: Sequence[ProductTerm], alignment: AlignmentSet) -> int:
    if len(terms) != len(alignment.shifts):
        raise LaneMismatchError("alignment does not match the terms")

    cap = alignment.cap
    acc = 0
    for term, shift in zip(terms, alignment.shifts):
        if not term.is_zero:
            acc += term.signed_significand << (cap - shift)

    return acc


def grouped_accumulate(terms: Sequence[ProductTerm], alignment: AlignmentSet) -> int:
    """Adder-tree sum with 2D sub-word grouping.

    Sub-products at the same position across the CSMs are aligned, summed in
    their group, and share one shifter that applies the group's fusion offset.
    Terms without sub-products (the incoming partial sum) enter the tree directly.
    """
    cap = alignment.cap
    groups = {}
    offsets = {}
    direct = 0

    for term, shift in zip(terms, alignment.shifts):
        if term.is_zero:
            continue

        if not term.sub_products:
            direct += term.signed_significand << (cap - shift)

        for sub in term.sub_products:
            groups[sub.position] = groups.get(sub.position, 0) + (sub.value << (cap - shift))
            offsets[sub.position] = sub.offset

    return direct + sum(total << offsets[position] for position, total in groups.items())


def ungrouped_accumulate(terms: Sequence[ProductTerm], alignment: AlignmentSet) -> int:
    cap = alignment.cap
    acc = 0

    for term, shift in zip(terms, alignment.shifts):
        if term.is_zero:
            continue

        if not term.sub_products:
            acc += term.signed_significand << (cap - shift)

        for sub in term.sub_products:
            acc += sub.value << (sub.offset + cap - shift)

    if acc.bit_length() + 1 > alignment.accumulator_width:
        logger.debug("accumulator %d overruns %d bits", acc, alignment.accumulator_width)

    return acc
