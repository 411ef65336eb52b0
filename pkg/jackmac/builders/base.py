from typing import List, Optional, Union

from ..datapath import Mode
from ..exceptions import FormatMismatchError
from ..formats import BlockCode, BlockSlice, ScalarCode, encode, quantize_block


Operand = Union[List[ScalarCode], BlockSlice]


class BaseBuilder:
    def __init__(self, mode):
        self._mode: Mode = Mode.of(mode)

    def get_mode(self) -> Mode:
        return self._mode

    def block_size(self, size: int):
        if not self._mode.is_mx:
            raise FormatMismatchError(f"mode {self._mode} has no blocks")

        self._mode = Mode.of(self._mode, size)

        return self


class OperandBase(BaseBuilder):
    _x: Optional[Operand] = None
    _w: Optional[Operand] = None

    def _quantize(self, values) -> Operand:
        mode = self._mode
        fmt = mode.element_format

        if all(isinstance(v, ScalarCode) for v in values):
            codes = list(values)
            if any(c.format != fmt for c in codes):
                raise FormatMismatchError(f"mode {mode} takes {fmt} codes")

            return BlockSlice(0, tuple(codes)) if mode.is_mx else codes

        if not mode.is_mx:
            return [encode(v, fmt) for v in values]

        # the lane values form the head of one block; the rest is zero
        padded = list(values) + [0] * (fmt.block_size - len(values))
        block: BlockCode = quantize_block(padded, fmt)

        return block.slice(0, len(values))

    def _from_bits(self, bits, shared_exponent: int) -> Operand:
        fmt = self._mode.element_format
        codes = [ScalarCode(fmt, int(b)) for b in bits]

        return BlockSlice(shared_exponent, tuple(codes)) if self._mode.is_mx else codes

    def x(self, *values):
        """Activations as real values, quantized through the mode's element format."""
        self._x = self._quantize(values)

        return self

    def w(self, *values):
        self._w = self._quantize(values)

        return self

    def x_bits(self, *bits: int, shared_exponent: int = 0):
        self._x = self._from_bits(bits, shared_exponent)

        return self

    def w_bits(self, *bits: int, shared_exponent: int = 0):
        self._w = self._from_bits(bits, shared_exponent)

        return self

    def operands(self):
        if self._x is None or self._w is None:
            raise FormatMismatchError("both x and w must be set before running")

        return self._x, self._w
