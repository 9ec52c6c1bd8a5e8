from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Literal, Optional, Tuple

import numpy as np

Quadrature = Literal["trapezoidal", "summation"]
MomentMap = Dict[Tuple[int, int], float]
ExactMomentMap = Dict[Tuple[int, int], Fraction]

BINS = 256


@dataclass(frozen=True, eq=False)
class Histogram:
    """256 级灰度直方图，bin i 对应灰度 i"""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.shape != (BINS,):
            raise ValueError(f"直方图必须有 {BINS} 个 bin，实际 {arr.shape}")
        if (arr < 0).any():
            raise ValueError("直方图计数不能为负")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def probabilities(self) -> np.ndarray:
        return self.counts / self.total


@dataclass(frozen=True)
class MomentSet:
    """原始矩、质心、中心矩与归一化矩（p + q <= 3）

    raw_moments_* 返回只含 m 的部分结果，complete_moments 补全其余字段。
    精确值（Fraction）与浮点值并存，不变量由精确值计算。
    """

    m: MomentMap
    quadrature: Quadrature
    peak: int  # 最大灰度，用于灰度函数归一化
    exact_m: ExactMomentMap = field(repr=False)
    centroid: Optional[Tuple[float, float]] = None
    mu: Optional[MomentMap] = None
    eta: Optional[MomentMap] = None
    exact_mu: Optional[ExactMomentMap] = field(default=None, repr=False)

    @classmethod
    def from_exact(cls, exact_m: ExactMomentMap, quadrature: Quadrature, peak: int) -> "MomentSet":
        return cls(
            m={k: float(v) for k, v in exact_m.items()},
            quadrature=quadrature,
            peak=peak,
            exact_m=dict(exact_m),
        )

    @property
    def is_complete(self) -> bool:
        return self.eta is not None
