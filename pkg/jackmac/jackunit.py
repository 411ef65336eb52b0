from typing import Optional

from .builders.mac import MacBuilder
from .builders.workload import WorkloadBuilder
from .csm import CsmStructure, DesignInventory, Grouping, inventory, structure_report
from .datapath import Activation, Mode, mode_activation


class JackUnit:
    """Entry points for the unit and the array built from it."""

    @classmethod
    def mode(cls, name, block_size: Optional[int] = None) -> Mode:
        return Mode.of(name, block_size)

    @classmethod
    def activation(cls, name) -> Activation:
        return mode_activation(name)

    @classmethod
    def mac(cls, mode) -> MacBuilder:
        return MacBuilder(mode)

    @classmethod
    def gemm(cls, mode, m: int, n: int, k: int) -> WorkloadBuilder:
        return WorkloadBuilder(mode).gemm(m, n, k)

    @classmethod
    def conv(
        cls, mode, h: int, w: int, cin: int, cout: int, kh: int, kw: int, stride: int = 1
    ) -> WorkloadBuilder:
        return WorkloadBuilder(mode).conv(h, w, cin, cout, kh, kw, stride)

    @classmethod
    def structure(cls, grouping=Grouping.GROUPED_2D, lanes: int = 16) -> CsmStructure:
        return structure_report(grouping, lanes)

    @classmethod
    def inventory(cls, design) -> DesignInventory:
        return inventory(design)
