from .exact import ExactValue
from .descriptor import (
    FormatKind,
    FormatDescriptor,
    PRESETS,
    DEFAULT_BLOCK_SIZE,
    BF16,
    FP8_E4M3,
    INT8,
    INT4,
    MXINT8,
    MXINT4,
    MXFP8_E4M3,
    FP16,
    INT16,
)
from .codec import ScalarCode, FormatRange, encode, decode, code_space, format_range
from .blocks import (
    BlockCode,
    BlockSlice,
    SHARED_EXPONENT_MIN,
    SHARED_EXPONENT_MAX,
    shared_exponent_for,
    quantize_block,
    dequantize_block,
)
from .tensor import EncodedTensor, encode_tensor, decode_tensor, decode_tensor_exact

__all__ = [
    "ExactValue",
    "FormatKind",
    "FormatDescriptor",
    "PRESETS",
    "DEFAULT_BLOCK_SIZE",
    "BF16",
    "FP8_E4M3",
    "INT8",
    "INT4",
    "MXINT8",
    "MXINT4",
    "MXFP8_E4M3",
    "FP16",
    "INT16",
    "ScalarCode",
    "FormatRange",
    "encode",
    "decode",
    "code_space",
    "format_range",
    "BlockCode",
    "BlockSlice",
    "SHARED_EXPONENT_MIN",
    "SHARED_EXPONENT_MAX",
    "shared_exponent_for",
    "quantize_block",
    "dequantize_block",
    "EncodedTensor",
    "encode_tensor",
    "decode_tensor",
    "decode_tensor_exact",
]
