from .jackunit import JackUnit
from .builders.mac import MacBuilder
from .builders.workload import WorkloadBuilder
from .csm import Grouping, MacDesign, Precision, SubMulConfig, fuse8x8, structure_report, submul4
from .datapath import JackResult, Mode, ModeName, jack_mac, jack_mac_reference
from .exceptions import (
    JackMacError,
    ConfigError,
    FormatMismatchError,
    LaneMismatchError,
    ShapeMismatchError,
    TensorFileError,
    UnrepresentableError,
    UnsupportedModeError,
)
from .formats import (
    BlockCode,
    BlockSlice,
    EncodedTensor,
    ExactValue,
    FormatDescriptor,
    ScalarCode,
    decode,
    encode,
    quantize_block,
)
from .oracle import exact_dot, exact_mac, reference_gemm, truncate_exact_to_fp16
from .simkernel import ArrayConfig, SimReport, WorkloadSpec, estimate_cycles, gemm_execute, conv_execute

__all__ = [
    "JackUnit",
    "MacBuilder",
    "WorkloadBuilder",
    "Grouping",
    "MacDesign",
    "Precision",
    "SubMulConfig",
    "fuse8x8",
    "structure_report",
    "submul4",
    "JackResult",
    "Mode",
    "ModeName",
    "jack_mac",
    "jack_mac_reference",
    "JackMacError",
    "ConfigError",
    "FormatMismatchError",
    "LaneMismatchError",
    "ShapeMismatchError",
    "TensorFileError",
    "UnrepresentableError",
    "UnsupportedModeError",
    "BlockCode",
    "BlockSlice",
    "EncodedTensor",
    "ExactValue",
    "FormatDescriptor",
    "ScalarCode",
    "decode",
    "encode",
    "quantize_block",
    "exact_dot",
    "exact_mac",
    "reference_gemm",
    "truncate_exact_to_fp16",
    "ArrayConfig",
    "SimReport",
    "WorkloadSpec",
    "estimate_cycles",
    "gemm_execute",
    "conv_execute",
]
