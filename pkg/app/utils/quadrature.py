"""像素网格上的二维复合梯形求积

节点就是像素中心，步长 h = k = 1。梯形权重乘 2 后为整数（端点 1，内部 2），
二维权重为两个方向的外积，因此角点 1、边 2、内部 4，总和除以 4 即得 I_T。
整数权重保证矩的求和完全精确。
"""
from fractions import Fraction
from typing import Dict, Tuple

import numpy as np

MAX_ORDER = 3
INT64_MAX = int(np.iinfo(np.int64).max)
ORDERS: Tuple[Tuple[int, int], ...] = tuple(
    (p, q) for total in range(MAX_ORDER + 1) for p in range(total, -1, -1) for q in [total - p]
)


def trapezoid_weights(n: int) -> np.ndarray:
    """一维复合梯形权重（乘 2 后），长度 n >= 2"""
    w = np.full(n, 2, dtype=np.int64)
    w[0] = w[-1] = 1
    return w


def uniform_weights(n: int) -> np.ndarray:
    """直接求和的权重（乘 2 后，与梯形权重同一尺度）"""
    return np.full(n, 2, dtype=np.int64)


def weighted_moments(
    pixels: np.ndarray,
    wx: np.ndarray,
    wy: np.ndarray,
) -> Dict[Tuple[int, int], Fraction]:
    """计算 Σ_y Σ_x wy(y)·wx(x)·x^p·y^q·g(x, y) / 4，p + q <= 3

    先按行收缩 x 方向，再用 Python 整数收缩 y 方向。行和的上界超出 int64 时
    行收缩也改用 Python 整数。
    """
    g = np.asarray(pixels, dtype=np.int64)
    height, width = g.shape
    peak = int(g.max()) if g.size else 0
    xs = np.arange(width, dtype=object)
    wx_list = wx.astype(object)
    ys = [int(v) for v in range(height)]
    wy_list = [int(v) for v in wy]

    moments: Dict[Tuple[int, int], Fraction] = {}
    for p in range(MAX_ORDER + 1):
        weights = wx_list * xs ** p
        # 每行 Σ_x wx·x^p·g
        if peak * int(weights.sum()) <= INT64_MAX:
            row_sums = (g @ weights.astype(np.int64)).tolist()
        else:
            row_sums = (g.astype(object) @ weights).tolist()
        for q in range(MAX_ORDER + 1 - p):
            total = sum(w * y ** q * s for w, y, s in zip(wy_list, ys, row_sums) if s)
            moments[(p, q)] = Fraction(total, 4)
    return moments
