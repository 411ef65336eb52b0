"""JKT1 tensor files and CSV ingestion.

Layout: magic ``JKT1``, one dtype byte, one ndim byte, ndim little-endian
u32 dims, then the element codes packed to whole bytes (16-bit codes as LE
u16, 8-bit codes as bytes, 4-bit codes two per byte with the low nibble
first, FP32 as LE float32). MX tensors append one signed byte per block.
"""

import os
import struct
import tempfile

from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from ..exceptions import ConfigError, TensorFileError
from ..formats import EncodedTensor, FormatDescriptor


MAGIC = b"JKT1"
FP32 = "fp32"

DTYPE_IDS: Dict[str, int] = {
    FP32: 0,
    "bf16": 1,
    "fp8_e4m3": 2,
    "int8": 3,
    "int4": 4,
    "mxint8": 5,
    "mxint4": 6,
    "mxfp8_e4m3": 7,
    "fp16": 8,
    "int16": 9,
}
DTYPE_NAMES = {v: k for k, v in DTYPE_IDS.items()}

Tensor = Union[EncodedTensor, np.ndarray]
PathLike = Union[str, "os.PathLike[str]"]


def atomic_write_bytes(path: PathLike, data: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: PathLike, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def _pack_codes(codes: np.ndarray, width: int) -> bytes:
    flat = codes.reshape(-1)

    if width > 8:
        return flat.astype("<u2").tobytes()

    if width > 4:
        return flat.astype(np.uint8).tobytes()

    nibbles = flat.astype(np.uint8) & 0xF
    if nibbles.size % 2:
        nibbles = np.append(nibbles, np.uint8(0))

    return (nibbles[0::2] | (nibbles[1::2] << 4)).astype(np.uint8).tobytes()


def _unpack_codes(body: bytes, count: int, width: int) -> np.ndarray:
    if width > 8:
        return np.frombuffer(body, dtype="<u2", count=count).astype(np.uint16)

    if width > 4:
        return np.frombuffer(body, dtype=np.uint8, count=count).astype(np.uint16)

    packed = np.frombuffer(body, dtype=np.uint8)
    nibbles = np.empty(packed.size * 2, dtype=np.uint16)
    nibbles[0::2] = packed & 0xF
    nibbles[1::2] = packed >> 4

    return nibbles[:count]


def _code_bytes(count: int, width: int) -> int:
    if width > 8:
        return 2 * count

    if width > 4:
        return count

    return (count + 1) // 2


def dumps(tensor: Tensor) -> bytes:
    if isinstance(tensor, EncodedTensor):
        name = tensor.format.name
        if name not in DTYPE_IDS:
            raise TensorFileError(f"{tensor.format} has no JKT1 dtype")
        shape = tensor.shape
        body = _pack_codes(tensor.codes, tensor.format.width)
        if tensor.format.is_mx:
            body += tensor.shared_exponents.astype(np.int8).tobytes()
    else:
        array = np.asarray(tensor, dtype="<f4")
        if array.ndim == 0:
            array = array.reshape(1)
        name, shape, body = FP32, array.shape, array.tobytes()

    if len(shape) > 255:
        raise TensorFileError(f"{len(shape)} dimensions do not fit the header")

    header = struct.pack(f"<4sBB{len(shape)}I", MAGIC, DTYPE_IDS[name], len(shape), *shape)

    return header + body


def loads(data: bytes, block_size: Optional[int] = None) -> Tensor:
    """Parse a JKT1 image; MX tensors are blocked by `block_size` (default 32)."""
    if len(data) < 6 or data[:4] != MAGIC:
        raise TensorFileError("not a JKT1 tensor")

    dtype, ndim = data[4], data[5]
    if dtype not in DTYPE_NAMES:
        raise TensorFileError(f"unknown dtype code {dtype}")

    if ndim == 0:
        raise TensorFileError("JKT1 tensors need at least one dimension")

    offset = 6 + 4 * ndim
    if len(data) < offset:
        raise TensorFileError("truncated JKT1 header")

    shape = struct.unpack_from(f"<{ndim}I", data, 6)
    count = int(np.prod(shape))
    body = data[offset:]

    if DTYPE_NAMES[dtype] == FP32:
        if len(body) != 4 * count:
            raise TensorFileError(f"expected {4 * count} data bytes, found {len(body)}")

        return np.frombuffer(body, dtype="<f4").reshape(shape).astype(np.float32)

    name = DTYPE_NAMES[dtype]
    try:
        fmt = FormatDescriptor.preset(name, block_size if name.startswith("mx") else None)
    except ConfigError as e:
        raise TensorFileError(str(e)) from e

    code_bytes = _code_bytes(count, fmt.width)
    blocks = 0
    if fmt.is_mx:
        blocks = int(np.prod(shape[:-1])) * -(-shape[-1] // fmt.block_size)

    if len(body) != code_bytes + blocks:
        raise TensorFileError(f"expected {code_bytes + blocks} data bytes, found {len(body)}")

    codes = _unpack_codes(body[:code_bytes], count, fmt.width).reshape(shape)
    exponents = None
    if fmt.is_mx:
        exponents = np.frombuffer(body[code_bytes:], dtype=np.int8).reshape(
            tuple(shape[:-1]) + (-(-shape[-1] // fmt.block_size),)
        )

    try:
        return EncodedTensor(fmt, codes, exponents)
    except ValueError as e:
        raise TensorFileError(f"malformed codes: {e}") from e


def write_tensor(path: PathLike, tensor: Tensor):
    atomic_write_bytes(path, dumps(tensor))


def read_tensor(path: PathLike, block_size: Optional[int] = None) -> Tensor:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise TensorFileError(f"cannot read {path}: {e.strerror or e}") from e

    return loads(data, block_size)


def read_csv(path: PathLike) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", dtype=np.float32, ndmin=2)
    except OSError as e:
        raise TensorFileError(f"cannot read {path}: {e.strerror or e}") from e
    except ValueError as e:
        raise TensorFileError(f"{path}: {e}") from e


def read_values(path: PathLike) -> np.ndarray:
    if str(path).lower().endswith(".csv"):
        return read_csv(path)

    tensor = read_tensor(path)
    if isinstance(tensor, EncodedTensor):
        raise TensorFileError(f"{path} holds {tensor.format} codes, expected fp32 values")

    return tensor
