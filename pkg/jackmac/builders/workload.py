from typing import Optional, Tuple, Union

import numpy as np

from .base import BaseBuilder
from ..exceptions import ConfigError
from ..formats import EncodedTensor, encode_tensor
from ..simkernel import (
    ArrayConfig,
    ComparisonReport,
    SimReport,
    WorkloadKind,
    WorkloadSpec,
    compare_configs,
    compare_modes,
    conv_execute,
    estimate_cycles,
    gemm_execute,
)


class WorkloadBuilder(BaseBuilder):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)

        self._kind: Optional[WorkloadKind] = None
        self._dims: dict = {}
        self._config: ArrayConfig = ArrayConfig.preset("jack")

    def gemm(self, m: int, n: int, k: int):
        self._kind = WorkloadKind.GEMM
        self._dims = {"m": m, "n": n, "k": k}

        return self

    def conv(self, h: int, w: int, cin: int, cout: int, kh: int, kw: int, stride: int = 1):
        self._kind = WorkloadKind.CONV
        self._dims = {"h": h, "w": w, "cin": cin, "cout": cout, "kh": kh, "kw": kw, "stride": stride}

        return self

    def on(self, config: Union[ArrayConfig, str]):
        self._config = ArrayConfig.preset(config) if isinstance(config, str) else config

        return self

    def with_memory(self, flag: bool = True):
        self._config = self._config.with_(memory_model=flag)

        return self

    def wide(self, flag: bool = True):
        self._config = self._config.with_(wide_accumulation=flag)

        return self

    def get_config(self) -> ArrayConfig:
        return self._config

    def spec(self, mode=None) -> WorkloadSpec:
        if self._kind is None:
            raise ConfigError("call gemm() or conv() before building a workload")

        mode = self._mode if mode is None else mode
        if self._kind is WorkloadKind.GEMM:
            return WorkloadSpec.gemm(mode=mode, **self._dims)

        return WorkloadSpec.conv(mode=mode, **self._dims)

    def estimate(self) -> SimReport:
        return estimate_cycles(self.spec(), self._config)

    def compare(self, other_mode) -> ComparisonReport:
        """This mode against `other_mode` on the same array."""
        return compare_modes(self.spec(), self.spec(other_mode), self._config)

    def against(self, other: Union[ArrayConfig, str]) -> ComparisonReport:
        other = ArrayConfig.preset(other) if isinstance(other, str) else other

        return compare_configs(self.spec(), self._config, other)

    def _encoded(self, tensor) -> EncodedTensor:
        if isinstance(tensor, EncodedTensor):
            return tensor

        return encode_tensor(np.asarray(tensor, dtype=np.float64), self._mode.element_format)

    def execute(self, a, w) -> Tuple[EncodedTensor, SimReport]:
        """Run real operands; float arrays are quantized through the mode first.

        The workload shape comes from the operands, so gemm() or conv() only
        pick the kind (and the conv stride).
        """
        a, w = self._encoded(a), self._encoded(w)

        if self._kind is WorkloadKind.CONV:
            return conv_execute(a, w, self._config, self._mode, self._dims.get("stride", 1))

        return gemm_execute(a, w, self._config, self._mode)
