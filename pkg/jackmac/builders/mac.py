from typing import Optional

from .base import OperandBase
from ..datapath import JackResult, jack_mac, jack_mac_reference
from ..formats import ScalarCode, encode
from ..oracle import exact_mac


class MacBuilder(OperandBase):
    """One call of the unit, assembled step by step."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)

        self._acc_in: Optional[ScalarCode] = None
        self._grouped = True

    def acc(self, value):
        """Incoming partial sum, as a value or an already encoded 16-bit code."""
        if isinstance(value, ScalarCode):
            self._acc_in = value
        else:
            self._acc_in = encode(value, self._mode.output_descriptor)

        return self

    def acc_bits(self, bits: int):
        self._acc_in = ScalarCode(self._mode.output_descriptor, int(bits))

        return self

    def grouped(self, flag: bool = True):
        self._grouped = flag

        return self

    def run(self) -> JackResult:
        x, w = self.operands()
        mac = jack_mac if self._grouped else jack_mac_reference

        return mac(self._mode, x, w, self._acc_in)

    def expected(self) -> ScalarCode:
        x, w = self.operands()

        return exact_mac(self._mode, x, w, self._acc_in)
