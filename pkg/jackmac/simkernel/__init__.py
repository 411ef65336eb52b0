from .config import ArrayConfig, UnitKind, BASELINE_MODES, PRESETS
from .workload import WorkloadKind, WorkloadSpec
from .timing import (
    ComparisonReport,
    SimReport,
    Tile,
    adder_tree_depth,
    compare_configs,
    compare_modes,
    estimate_cycles,
    feed_cycles,
    iter_tiles,
)
from .execute import checksum, conv_execute, gemm_execute, gemm_functional, im2col
from .tensorfile import (
    DTYPE_IDS,
    atomic_write_bytes,
    atomic_write_text,
    dumps,
    loads,
    read_csv,
    read_tensor,
    read_values,
    write_tensor,
)

__all__ = [
    "ArrayConfig",
    "UnitKind",
    "BASELINE_MODES",
    "PRESETS",
    "WorkloadKind",
    "WorkloadSpec",
    "ComparisonReport",
    "SimReport",
    "Tile",
    "adder_tree_depth",
    "compare_configs",
    "compare_modes",
    "estimate_cycles",
    "feed_cycles",
    "iter_tiles",
    "checksum",
    "conv_execute",
    "gemm_execute",
    "gemm_functional",
    "im2col",
    "DTYPE_IDS",
    "atomic_write_bytes",
    "atomic_write_text",
    "dumps",
    "loads",
    "read_csv",
    "read_tensor",
    "read_values",
    "write_tensor",
]
