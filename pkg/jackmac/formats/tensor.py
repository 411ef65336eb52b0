from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import FormatMismatchError, ShapeMismatchError
from .blocks import BlockCode, dequantize_block, quantize_block
from .codec import ScalarCode, decode, encode
from .descriptor import FormatDescriptor
from .exact import ExactValue


@dataclass(frozen=True, eq=False)
class EncodedTensor:
    """Raw codes of a tensor in one format.

    MX tensors are blocked along the innermost axis; `shared_exponents` has
    the tensor's shape with the innermost axis replaced by the block count,
    and a ragged last block is zero-padded.
    """

    format: FormatDescriptor
    codes: np.ndarray
    shared_exponents: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "codes", np.asarray(self.codes, dtype=np.uint16))

        if self.codes.ndim == 0:
            raise ShapeMismatchError("tensors need at least one dimension")

        if int(self.codes.max(initial=0)) >> self.format.width:
            raise FormatMismatchError(f"codes exceed the {self.format.width}-bit {self.format} width")

        if self.format.is_mx:
            if self.shared_exponents is None:
                raise FormatMismatchError(f"{self.format} tensor needs shared exponents")

            exponents = np.asarray(self.shared_exponents, dtype=np.int8)
            if exponents.shape != self.block_shape:
                raise ShapeMismatchError(
                    f"shared exponents shaped {exponents.shape}, expected {self.block_shape}"
                )
            object.__setattr__(self, "shared_exponents", exponents)

        elif self.shared_exponents is not None:
            raise FormatMismatchError(f"{self.format} tensors carry no shared exponents")

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.codes.shape)

    @property
    def block_shape(self) -> Tuple[int, ...]:
        blocks = -(-self.shape[-1] // self.format.block_size)

        return self.shape[:-1] + (blocks,)

    def code(self, *index: int) -> ScalarCode:
        return ScalarCode(self.format, int(self.codes[index]))

    def row_codes(self, *index: int) -> List[ScalarCode]:
        return [ScalarCode(self.format, int(b)) for b in self.codes[index]]

    def row_blocks(self, *index: int) -> List[BlockCode]:
        if not self.format.is_mx:
            raise FormatMismatchError(f"{self.format} tensors are not blocked")

        size = self.format.block_size
        codes = self.row_codes(*index)
        codes += [ScalarCode(self.format, 0)] * (-len(codes) % size)

        return [
            BlockCode(int(exponent), tuple(codes[i * size : (i + 1) * size]))
            for i, exponent in enumerate(self.shared_exponents[index])
        ]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EncodedTensor):
            return NotImplemented

        if self.format != other.format or not np.array_equal(self.codes, other.codes):
            return False

        if self.format.is_mx:
            return np.array_equal(self.shared_exponents, other.shared_exponents)

        return True


def encode_tensor(values, fmt: FormatDescriptor) -> EncodedTensor:
    array = np.asarray(values)
    if array.ndim == 0:
        array = array.reshape(1)

    if not fmt.is_mx:
        flat = [encode(v, fmt).bits for v in array.reshape(-1).tolist()]

        return EncodedTensor(fmt, np.array(flat, dtype=np.uint16).reshape(array.shape))

    size = fmt.block_size
    inner = array.shape[-1]
    rows = array.reshape(-1, inner)
    blocks = -(-inner // size)

    codes = np.zeros((rows.shape[0], inner), dtype=np.uint16)
    exponents = np.zeros((rows.shape[0], blocks), dtype=np.int8)

    for r, row in enumerate(rows.tolist()):
        row += [0] * (blocks * size - inner)
        for b in range(blocks):
            block = quantize_block(row[b * size : (b + 1) * size], fmt)
            exponents[r, b] = block.shared_exponent

            stop = min((b + 1) * size, inner)
            codes[r, b * size : stop] = [e.bits for e in block.elements[: stop - b * size]]

    return EncodedTensor(
        fmt, codes.reshape(array.shape), exponents.reshape(array.shape[:-1] + (blocks,))
    )


def decode_tensor_exact(tensor: EncodedTensor) -> np.ndarray:
    out = np.empty(tensor.shape, dtype=object)

    if not tensor.format.is_mx:
        for index in np.ndindex(*tensor.shape):
            out[index] = decode(tensor.code(*index))

        return out

    inner = tensor.shape[-1]
    for lead in np.ndindex(*tensor.shape[:-1]):
        values: Sequence[ExactValue] = [
            v for block in tensor.row_blocks(*lead) for v in dequantize_block(block)
        ]
        for i in range(inner):
            out[lead + (i,)] = values[i]

    return out


def decode_tensor(tensor: EncodedTensor) -> np.ndarray:
    exact = decode_tensor_exact(tensor)

    return np.vectorize(float, otypes=[np.float64])(exact) if exact.size else exact.astype(np.float64)
