"""Property suites run by ``jackmac verify`` and by the test-suite.

Every suite is deterministic for a given seed: operands come from one
`numpy.random.Generator` seeded up front.
"""

import logging

from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, Iterable, Optional, Union

import numpy as np

from .csm import SUB_MUL_CONFIGS, decompose8, fuse8x8, submul4
from .datapath import Mode, ModeName, jack_mac, jack_mac_reference
from .exceptions import ConfigError
from .formats import BlockSlice, FormatDescriptor, ScalarCode, decode
from .formats.blocks import SHARED_EXPONENT_MAX, SHARED_EXPONENT_MIN
from .mixins.serialize import JsonMixin
from .oracle import exact_mac
from .settings import default_seed, default_trials


logger = logging.getLogger(__name__)


# exponent window around the bias used for most random FP operands
NARROW_SPREAD = 4


@dataclass(frozen=True)
class SuiteResult(JsonMixin):
    suite: str
    seed: int
    cases: int
    failures: int
    passed: bool
    counterexample: Optional[str] = None


class _Tally:
    def __init__(self, suite: str, seed: int):
        self.suite = suite
        self.seed = seed
        self.cases = 0
        self.failures = 0
        self.counterexample: Optional[str] = None

    def check(self, ok: bool, describe: Callable[[], str]):
        self.cases += 1
        if ok:
            return

        self.failures += 1
        if self.counterexample is None:
            self.counterexample = describe()
            logger.debug("%s counterexample: %s", self.suite, self.counterexample)

    def result(self) -> SuiteResult:
        return SuiteResult(
            self.suite, self.seed, self.cases, self.failures, self.failures == 0, self.counterexample
        )


def _as_int(pattern: int, width: int, signed: bool) -> int:
    pattern &= (1 << width) - 1
    if signed and pattern >> (width - 1):
        return pattern - (1 << width)

    return pattern


def random_code(rng: np.random.Generator, fmt: FormatDescriptor, spread: Optional[int] = None) -> ScalarCode:
    if not fmt.is_float:
        return ScalarCode(fmt, int(rng.integers(0, 1 << fmt.width)))

    sign = int(rng.integers(0, 2))
    if rng.integers(0, 8) == 0:
        field = 0
    elif spread is None:
        field = int(rng.integers(1, fmt.max_exponent_field + 1))
    else:
        field = int(np.clip(fmt.bias + rng.integers(-spread, spread + 1), 1, fmt.max_exponent_field))

    mantissa = int(rng.integers(0, 1 << fmt.mantissa_bits)) if field else 0

    return ScalarCode(
        fmt, (sign << (fmt.width - 1)) | (field << fmt.mantissa_bits) | mantissa
    )


def random_operand(
    rng: np.random.Generator, mode: Mode, spread: Optional[int] = NARROW_SPREAD, lanes: Optional[int] = None
) -> Union[list, BlockSlice]:
    fmt = mode.element_format

    if not mode.is_mx:
        return [random_code(rng, fmt, spread) for _ in range(mode.lanes)]

    count = lanes if lanes is not None else min(mode.lanes, mode.block_size)
    shared = int(rng.integers(-(spread or 8), (spread or 8) + 1))

    return BlockSlice(shared, tuple(random_code(rng, fmt, spread) for _ in range(count)))


def random_acc_in(rng: np.random.Generator, mode: Mode, spread: Optional[int] = 6) -> Optional[ScalarCode]:
    if rng.integers(0, 2) == 0:
        return None

    return random_code(rng, mode.output_descriptor, spread)


def _describe(mode, x, w, acc_in, got, expected) -> Callable[[], str]:
    return lambda: f"mode={mode} x={x!r} w={w!r} acc_in={acc_in!r} got={got!r} expected={expected!r}"


def suite_submul(trials: int, seed: int) -> SuiteResult:
    tally = _Tally("submul", seed)

    for cfg, a, b in product(SUB_MUL_CONFIGS, range(16), range(16)):
        got = submul4(a, b, cfg)
        expected = _as_int(a, 4, cfg.a_signed) * _as_int(b, 4, cfg.b_signed)
        tally.check(got == expected, lambda: f"submul4({a:#x}, {b:#x}, {cfg}) = {got}, expected {expected}")

    return tally.result()


def suite_fusion(trials: int, seed: int) -> SuiteResult:
    tally = _Tally("fusion", seed)

    for cfg in SUB_MUL_CONFIGS:
        for a, b in product(range(256), range(256)):
            got = fuse8x8(*decompose8(a, b, cfg), cfg)
            expected = _as_int(a, 8, cfg.a_signed) * _as_int(b, 8, cfg.b_signed)
            tally.check(got == expected, lambda: f"fuse8x8 {a:#x}*{b:#x} {cfg} = {got}, expected {expected}")

    return tally.result()


FP_ORACLE_MODES = (ModeName.BF16, ModeName.FP8, ModeName.MXFP8, ModeName.MXINT8, ModeName.MXINT4)
INT_ORACLE_MODES = (ModeName.INT8, ModeName.INT4)


def _oracle_trials(tally: _Tally, rng: np.random.Generator, modes: Iterable[ModeName], trials: int):
    for name in modes:
        mode = Mode.of(name)
        for trial in range(trials):
            # every fourth trial spans the full exponent range to reach saturation and flush
            spread = None if trial % 4 == 0 else NARROW_SPREAD
            x = random_operand(rng, mode, spread)
            w = random_operand(rng, mode, spread)
            acc_in = random_acc_in(rng, mode, None if trial % 4 == 0 else 6)

            got = jack_mac(mode, x, w, acc_in).output
            expected = exact_mac(mode, x, w, acc_in)
            tally.check(got == expected, _describe(mode, x, w, acc_in, got, expected))


def suite_fp_oracle(trials: int, seed: int) -> SuiteResult:
    tally = _Tally("fp-oracle", seed)
    _oracle_trials(tally, np.random.default_rng(seed), FP_ORACLE_MODES, trials)

    return tally.result()


def suite_int_oracle(trials: int, seed: int) -> SuiteResult:
    tally = _Tally("int-oracle", seed)
    _oracle_trials(tally, np.random.default_rng(seed), INT_ORACLE_MODES, trials)

    # two live INT4 lanes, exhaustively
    mode = Mode.of(ModeName.INT4)
    fmt = mode.element_format
    padding = [ScalarCode(fmt, 0)] * (mode.lanes - 2)

    for x0, x1, w0, w1 in product(range(16), repeat=4):
        x = [ScalarCode(fmt, x0), ScalarCode(fmt, x1)] + padding
        w = [ScalarCode(fmt, w0), ScalarCode(fmt, w1)] + padding

        got = jack_mac(mode, x, w).output
        expected = exact_mac(mode, x, w)
        tally.check(got == expected, _describe(mode, x, w, None, got, expected))

    return tally.result()


def suite_grouped_eq(trials: int, seed: int) -> SuiteResult:
    tally = _Tally("grouped-eq", seed)
    rng = np.random.default_rng(seed)

    for name in ModeName:
        mode = Mode.of(name)
        for trial in range(trials):
            spread = None if trial % 4 == 0 else NARROW_SPREAD
            x = random_operand(rng, mode, spread)
            w = random_operand(rng, mode, spread)
            acc_in = random_acc_in(rng, mode)

            grouped = jack_mac(mode, x, w, acc_in)
            reference = jack_mac_reference(mode, x, w, acc_in)
            tally.check(grouped == reference, _describe(mode, x, w, acc_in, grouped, reference))

    return tally.result()


MX_MODES = (ModeName.MXINT8, ModeName.MXINT4, ModeName.MXFP8)


def suite_mx_scaling(trials: int, seed: int) -> SuiteResult:
    """Moving the shared exponents by k moves the output by exactly 2^k."""
    tally = _Tally("mx-scaling", seed)
    rng = np.random.default_rng(seed)

    for name in MX_MODES:
        mode = Mode.of(name)
        for _ in range(trials):
            x = random_operand(rng, mode)
            w = random_operand(rng, mode)
            k = int(rng.integers(-6, 7))

            shifted = x.shared_exponent + k
            if not SHARED_EXPONENT_MIN <= shifted <= SHARED_EXPONENT_MAX:
                continue

            base = jack_mac(mode, x, w)
            moved = jack_mac(mode, BlockSlice(shifted, x.elements), w)
            if any(r.saturated or r.flushed for r in (base, moved)):
                continue

            expected = decode(base.output).scale(k)
            got = decode(moved.output)
            tally.check(
                got.to_fraction() == expected.to_fraction(),
                _describe(mode, x, w, k, got, expected),
            )

    return tally.result()


SUITES: Dict[str, Callable[[int, int], SuiteResult]] = {
    "submul": suite_submul,
    "fusion": suite_fusion,
    "fp-oracle": suite_fp_oracle,
    "int-oracle": suite_int_oracle,
    "grouped-eq": suite_grouped_eq,
    "mx-scaling": suite_mx_scaling,
}


def run_suite(name: str, trials: Optional[int] = None, seed: Optional[int] = None) -> SuiteResult:
    try:
        suite = SUITES[name]
    except KeyError:
        raise ConfigError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}") from None

    trials = default_trials() if trials is None else trials
    seed = default_seed() if seed is None else seed
    if trials < 0:
        raise ConfigError("trials cannot be negative")

    logger.debug("suite %s: %d trials, seed %d", name, trials, seed)

    return suite(trials, seed)
