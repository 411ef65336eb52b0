from enum import Enum
from dataclasses import dataclass
from typing import Optional, Tuple

from ..datapath import Mode
from ..exceptions import ConfigError
from ..formats import DEFAULT_BLOCK_SIZE
from ..mixins.serialize import JsonMixin


class WorkloadKind(str, Enum):
    GEMM = "GEMM"
    CONV = "CONV"


GEMM_DIMS = ("m", "n", "k")
CONV_DIMS = ("h", "w", "cin", "cout", "kh", "kw", "stride")


def _mode_fields(mode, block_size: Optional[int]) -> Tuple[str, Optional[int]]:
    mode = Mode.of(mode, block_size)
    if mode.is_mx and mode.block_size != DEFAULT_BLOCK_SIZE:
        return mode.name.value, mode.block_size

    return mode.name.value, None


@dataclass(frozen=True)
class WorkloadSpec(JsonMixin):
    """A GEMM `C[M,N] = A[M,K] . W[N,K]^T`, or a valid HWC convolution lowered to one."""

    kind: WorkloadKind
    mode: str
    m: int = 1
    n: int = 1
    k: int = 1
    h: int = 1
    w: int = 1
    cin: int = 1
    cout: int = 1
    kh: int = 1
    kw: int = 1
    stride: int = 1
    block_size: Optional[int] = None

    __json_decoders__ = {"kind": WorkloadKind}

    def __post_init__(self):
        object.__setattr__(self, "kind", WorkloadKind(self.kind))

        # resolves the name and block size up front
        self.mode_of()

        for name in self.dims:
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")

        if self.kind is WorkloadKind.CONV and (self.kh > self.h or self.kw > self.w):
            raise ConfigError(f"{self.kh}x{self.kw} kernel does not fit a {self.h}x{self.w} input")

    @classmethod
    def gemm(cls, m: int, n: int, k: int, mode, block_size: Optional[int] = None) -> "WorkloadSpec":
        name, block_size = _mode_fields(mode, block_size)

        return cls(WorkloadKind.GEMM, name, m=m, n=n, k=k, block_size=block_size)

    @classmethod
    def conv(
        cls,
        h: int,
        w: int,
        cin: int,
        cout: int,
        kh: int,
        kw: int,
        mode,
        stride: int = 1,
        block_size: Optional[int] = None,
    ) -> "WorkloadSpec":
        name, block_size = _mode_fields(mode, block_size)

        return cls(
            WorkloadKind.CONV,
            name,
            h=h,
            w=w,
            cin=cin,
            cout=cout,
            kh=kh,
            kw=kw,
            stride=stride,
            block_size=block_size,
        )

    @property
    def dims(self) -> Tuple[str, ...]:
        return GEMM_DIMS if self.kind is WorkloadKind.GEMM else CONV_DIMS

    def mode_of(self) -> Mode:
        return Mode.of(self.mode, self.block_size)

    @property
    def output_hw(self) -> Tuple[int, int]:
        return (self.h - self.kh) // self.stride + 1, (self.w - self.kw) // self.stride + 1

    def gemm_shape(self) -> Tuple[int, int, int]:
        if self.kind is WorkloadKind.GEMM:
            return self.m, self.n, self.k

        out_h, out_w = self.output_hw

        return out_h * out_w, self.cout, self.kh * self.kw * self.cin

    @property
    def macs(self) -> int:
        m, n, k = self.gemm_shape()

        return m * n * k

    def to_dict(self) -> dict:
        data = {"kind": self.kind.value, "mode": self.mode}
        data.update({name: getattr(self, name) for name in self.dims})
        if self.block_size is not None:
            data["block_size"] = self.block_size

        return data
