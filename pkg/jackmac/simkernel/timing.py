"""Weight-stationary cycle model of a systolic array of MAC units.

K maps onto the effective grid's rows and N onto its columns. Tiles are
visited N-major with K ascending, so each output tile's partial sums stay
in the output buffer until its last K-tile retires.
"""

import logging

from dataclasses import dataclass
from typing import Iterator, List, Optional

from ..mixins.serialize import JsonMixin
from .config import ArrayConfig
from .workload import WorkloadSpec


logger = logging.getLogger(__name__)


OUTPUT_BITS = 16
SHARED_EXPONENT_BITS = 8


@dataclass(frozen=True)
class Tile:
    index: int
    n_start: int
    n_len: int
    k_start: int
    k_len: int
    unit_rows: int
    unit_cols: int

    @property
    def first_k(self) -> bool:
        return self.k_start == 0


def iter_tiles(m: int, n: int, k: int, grid_rows: int, grid_cols: int, lanes: int) -> Iterator[Tile]:
    index = 0
    for n_start in range(0, n, grid_cols):
        n_len = min(grid_cols, n - n_start)
        for k_start in range(0, k, grid_rows):
            k_len = min(grid_rows, k - k_start)

            yield Tile(index, n_start, n_len, k_start, k_len, -(-k_len // lanes), -(-n_len // lanes))
            index += 1


@dataclass(frozen=True)
class SimReport(JsonMixin):
    mode: str
    total_cycles: int
    compute_cycles: int
    memory_stall_cycles: int
    input_feed_cycles_per_operand: int
    utilization: float
    fill_cycles: int
    tiles: int
    effective_multipliers: int
    macs: int
    latency_us: float
    result_checksum: Optional[str] = None

    def summary(self) -> List[List[str]]:
        return [
            ["mode", self.mode],
            ["total cycles", str(self.total_cycles)],
            ["compute cycles", str(self.compute_cycles)],
            ["memory stall cycles", str(self.memory_stall_cycles)],
            ["fill cycles", str(self.fill_cycles)],
            ["tiles", str(self.tiles)],
            ["feed cycles/operand", str(self.input_feed_cycles_per_operand)],
            ["utilization", f"{self.utilization:.4f}"],
            ["latency (us)", f"{self.latency_us:.3f}"],
        ]


def adder_tree_depth(lanes: int) -> int:
    """ceil(log2(lanes + 1)): lane products plus the incoming partial sum."""
    return lanes.bit_length()


def feed_cycles(operand_bits: int, link_bits: int) -> int:
    return -(-operand_bits // link_bits)


def tile_fill(tile: Tile, depth: int, feed: int) -> int:
    # weight preload, partial sums down the column, activations across the row
    return tile.unit_rows + tile.unit_rows * depth + tile.unit_cols * feed - 1


class _Traffic:
    def __init__(self, cfg: ArrayConfig, m: int, width: int, block_size: Optional[int]):
        self._cfg = cfg
        self._m = m
        self._width = width
        self._block_size = block_size

    def _blocks(self, k_len: int) -> int:
        if self._block_size is None:
            return 0

        return -(-k_len // self._block_size)

    def cycles(self, bits: int) -> int:
        return -(-bits // (8 * self._cfg.bandwidth_bytes_per_cycle))

    def weight_bits(self, tile: Tile) -> int:
        return tile.n_len * (tile.k_len * self._width + self._blocks(tile.k_len) * SHARED_EXPONENT_BITS)

    def activation_bits(self, tile: Tile) -> int:
        return self._m * (tile.k_len * self._width + self._blocks(tile.k_len) * SHARED_EXPONENT_BITS)

    def output_bits(self, n_len: int) -> int:
        return self._m * n_len * OUTPUT_BITS

    def load(self, tile: Tile) -> int:
        return self.cycles(self.weight_bits(tile) + self.activation_bits(tile))

    def double_buffered(self, tile: Tile) -> bool:
        cfg = self._cfg

        return (
            2 * self.activation_bits(tile) <= cfg.ibuf_kb * 8192
            and 2 * self.weight_bits(tile) <= cfg.wbuf_kb * 8192
        )

    def spills(self, tile: Tile) -> bool:
        return self.output_bits(tile.n_len) > self._cfg.obuf_kb * 8192


def estimate_cycles(spec: WorkloadSpec, cfg: ArrayConfig) -> SimReport:
    mode = cfg.require(spec.mode_of())
    lanes = cfg.lanes_per_unit(mode)
    grid_rows, grid_cols = cfg.effective_grid(mode)
    m, n, k = spec.gemm_shape()

    width = mode.element_format.width
    depth = adder_tree_depth(lanes)
    feed = feed_cycles(width, cfg.input_link_bits)

    tiles = list(iter_tiles(m, n, k, grid_rows, grid_cols, lanes))
    fills = [tile_fill(t, depth, feed) for t in tiles]
    busy = [fill + m for fill in fills]
    compute = sum(busy)

    stall = 0
    if cfg.memory_model:
        traffic = _Traffic(cfg, m, width, mode.block_size if mode.is_mx else None)
        stall = traffic.load(tiles[0])

        for t, tile in enumerate(tiles):
            background = 0

            if t + 1 < len(tiles):
                upcoming = tiles[t + 1]
                if traffic.double_buffered(upcoming):
                    background += traffic.load(upcoming)
                else:
                    stall += traffic.load(upcoming)

            if tile.first_k and t > 0:
                # the previous N-tile drains while this one computes
                background += traffic.cycles(traffic.output_bits(tiles[t - 1].n_len))

            stall += max(0, background - busy[t])

            last_k = tile.k_start + tile.k_len == k
            if not last_k and traffic.spills(tile):
                stall += traffic.cycles(2 * traffic.output_bits(tile.n_len))

        stall += traffic.cycles(traffic.output_bits(tiles[-1].n_len))

    total = compute + stall
    multipliers = grid_rows * grid_cols

    logger.debug(
        "%s on %s: %d tiles, fill %d, compute %d, stall %d",
        mode,
        cfg.unit.value,
        len(tiles),
        sum(fills),
        compute,
        stall,
    )

    return SimReport(
        mode=str(mode),
        total_cycles=total,
        compute_cycles=compute,
        memory_stall_cycles=stall,
        input_feed_cycles_per_operand=feed,
        utilization=spec.macs / (multipliers * total),
        fill_cycles=sum(fills),
        tiles=len(tiles),
        effective_multipliers=multipliers,
        macs=spec.macs,
        latency_us=total / cfg.clock_mhz,
    )


@dataclass(frozen=True)
class ComparisonReport(JsonMixin):
    label_a: str
    label_b: str
    total_cycles_a: int
    total_cycles_b: int
    compute_cycles_a: int
    compute_cycles_b: int
    speedup: float
    compute_speedup: float
    effective_multipliers_a: int
    effective_multipliers_b: int
    multiplier_ratio: float
    utilization_a: float
    utilization_b: float


def _compare(label_a: str, a: SimReport, label_b: str, b: SimReport) -> ComparisonReport:
    return ComparisonReport(
        label_a=label_a,
        label_b=label_b,
        total_cycles_a=a.total_cycles,
        total_cycles_b=b.total_cycles,
        compute_cycles_a=a.compute_cycles,
        compute_cycles_b=b.compute_cycles,
        speedup=a.total_cycles / b.total_cycles,
        compute_speedup=a.compute_cycles / b.compute_cycles,
        effective_multipliers_a=a.effective_multipliers,
        effective_multipliers_b=b.effective_multipliers,
        multiplier_ratio=b.effective_multipliers / a.effective_multipliers,
        utilization_a=a.utilization,
        utilization_b=b.utilization,
    )


def compare_configs(spec: WorkloadSpec, cfg_a: ArrayConfig, cfg_b: ArrayConfig) -> ComparisonReport:
    a = estimate_cycles(spec, cfg_a)
    b = estimate_cycles(spec, cfg_b)

    return _compare(cfg_a.unit.value, a, cfg_b.unit.value, b)


def compare_modes(spec_a: WorkloadSpec, spec_b: WorkloadSpec, cfg: ArrayConfig) -> ComparisonReport:
    a = estimate_cycles(spec_a, cfg)
    b = estimate_cycles(spec_b, cfg)

    return _compare(a.mode, a, b.mode, b)
