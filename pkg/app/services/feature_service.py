# app/services/feature_service.py
"""熵与矩不变量特征

矩的求和与中心化都在精确算术下完成，只在输出时转换为浮点。
"""
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import comb
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.config import Settings, settings
from app.core.exceptions import DegenerateGrid, EmptySample, ZeroMass
from app.models.image import BitMask, GrayImage
from app.models.moments import BINS, ExactMomentMap, Histogram, MomentSet
from app.models.schemas import FeatureVector
from app.utils.logger import logger
from app.utils.quadrature import ORDERS, trapezoid_weights, uniform_weights, weighted_moments

EntropyScope = Literal["foreground", "whole"]

PSI_CLAMP = 1e-30
# φ_i 作为中心矩多项式的次数，φ_i = P_i(μ) / μ00^d_i
HU_DEGREES = (2, 4, 5, 5, 10, 7, 10)


# ========== 熵 ==========

def histogram(img: GrayImage, mask: Optional[BitMask] = None) -> Histogram:
    """统计灰度直方图；给定掩码时只统计掩码内像素"""
    values = img.pixels
    if mask is not None:
        if mask.bits.shape != img.pixels.shape:
            raise ValueError(f"掩码尺寸 {mask.bits.shape} 与图像尺寸 {img.pixels.shape} 不符")
        values = img.pixels[mask.bits]
        if values.size == 0:
            raise EmptySample("掩码没有选中任何像素")
    return Histogram(np.bincount(values.ravel(), minlength=BINS))


def entropy(h: Histogram) -> float:
    """S = -Σ P_i log2 P_i，约定 0·log2 0 = 0"""
    if h.total < 1:
        raise EmptySample("直方图为空")
    p = h.probabilities()
    p = p[p > 0]
    s = float(-np.sum(p * np.log2(p)))
    return min(8.0, max(0.0, s))


# ========== 原始矩 ==========

def _peak(img: GrayImage) -> int:
    peak = int(img.pixels.max())
    if peak == 0:
        raise ZeroMass("图像全为 0，无法计算矩")
    return peak


def raw_moments_sum(img: GrayImage) -> MomentSet:
    """直接求和 m_pq = Σ_y Σ_x x^p y^q g(x, y)，作为求积的对照"""
    peak = _peak(img)
    exact = weighted_moments(img.pixels, uniform_weights(img.width), uniform_weights(img.height))
    return MomentSet.from_exact(exact, "summation", peak)


def raw_moments_trap(img: GrayImage) -> MomentSet:
    """复合梯形求积 I_T，h = k = 1，节点 f_{i,j} 为像素

    i = 0..N（N = height - 1），j = 0..M（M = width - 1）。
    """
    if img.width < 2 or img.height < 2:
        raise DegenerateGrid(f"梯形求积需要至少 2x2 网格，实际 {img.width}x{img.height}")
    peak = _peak(img)
    exact = weighted_moments(img.pixels, trapezoid_weights(img.width), trapezoid_weights(img.height))
    return MomentSet.from_exact(exact, "trapezoidal", peak)


# ========== 中心矩与归一化矩 ==========

def _central(exact_m: ExactMomentMap, xc: Fraction, yc: Fraction) -> ExactMomentMap:
    """二项展开 (x - xc)^p (y - yc)^q，与对 f(x, y) 做同一求积等价"""
    mu: ExactMomentMap = {}
    for p, q in ORDERS:
        total = Fraction(0)
        for i in range(p + 1):
            for j in range(q + 1):
                total += comb(p, i) * comb(q, j) * (-xc) ** (p - i) * (-yc) ** (q - j) * exact_m[(i, j)]
        mu[(p, q)] = total
    return mu


def _normalized(mu_t: ExactMomentMap) -> Dict[Tuple[int, int], float]:
    """η_pq = μ_pq / μ00^λ，λ = (p + q)/2 + 1"""
    mu00 = mu_t[(0, 0)]
    eta = {}
    for (p, q), value in mu_t.items():
        order = p + q
        if order % 2 == 0:
            eta[(p, q)] = float(value / mu00 ** (order // 2 + 1))
        else:
            # λ 为半整数：η = sign(μ)·sqrt(μ² / μ00^(2λ))
            magnitude = math.sqrt(float(value * value / mu00 ** (order + 2)))
            eta[(p, q)] = math.copysign(magnitude, float(value)) if value else 0.0
    return eta


def complete_moments(raw: MomentSet) -> MomentSet:
    """补全质心、中心矩 μ_pq 和归一化矩 η_pq

    η 使用按峰值归一化的灰度函数 g / g_max，对比度缩放不改变 η。
    """
    m00 = raw.exact_m[(0, 0)]
    if m00 <= 0:
        raise ZeroMass("m00 必须为正")

    xc = raw.exact_m[(1, 0)] / m00
    yc = raw.exact_m[(0, 1)] / m00
    mu = _central(raw.exact_m, xc, yc)
    mu_t = {k: v / raw.peak for k, v in mu.items()}

    return MomentSet(
        m=dict(raw.m),
        quadrature=raw.quadrature,
        peak=raw.peak,
        exact_m=dict(raw.exact_m),
        centroid=(float(xc), float(yc)),
        mu={k: float(v) for k, v in mu.items()},
        eta=_normalized(mu_t),
        exact_mu=mu,
    )


# ========== Hu 不变量 ==========

def _hu_polynomials(n: Mapping[Tuple[int, int], object]) -> List:
    """Hu 七个不变量的标准形式，对浮点与 Fraction 通用"""
    n20, n02, n11 = n[(2, 0)], n[(0, 2)], n[(1, 1)]
    n30, n03, n21, n12 = n[(3, 0)], n[(0, 3)], n[(2, 1)], n[(1, 2)]

    a = n30 - 3 * n12
    b = 3 * n21 - n03
    s = n30 + n12
    t = n21 + n03

    phi1 = n20 + n02
    phi2 = (n20 - n02) ** 2 + 4 * n11 ** 2
    phi3 = a ** 2 + b ** 2
    phi4 = s ** 2 + t ** 2
    phi5 = a * s * (s ** 2 - 3 * t ** 2) + b * t * (3 * s ** 2 - t ** 2)
    phi6 = (n20 - n02) * (s ** 2 - t ** 2) + 4 * n11 * s * t
    phi7 = b * s * (s ** 2 - 3 * t ** 2) - a * t * (3 * s ** 2 - t ** 2)
    return [phi1, phi2, phi3, phi4, phi5, phi6, phi7]


def hu_invariants(ms: MomentSet) -> Tuple[float, ...]:
    """七个平移、旋转、尺度不变量 φ1..φ7"""
    if ms.eta is None:
        raise ValueError("MomentSet 尚未补全，先调用 complete_moments")
    if ms.exact_mu is None:
        return tuple(float(v) for v in _hu_polynomials(ms.eta))

    # 精确路径：φ_i 是 μ 的齐次多项式除以 μ00 的幂
    mu_t = {k: v / ms.peak for k, v in ms.exact_mu.items()}
    mu00 = mu_t[(0, 0)]
    polys = _hu_polynomials(mu_t)
    return tuple(float(poly / mu00 ** degree) for poly, degree in zip(polys, HU_DEGREES))


def log_scale(phi: Sequence[float]) -> Tuple[float, ...]:
    """ψ_i = sign(φ_i)·log10|φ_i|，|φ_i| < 1e-30 时取 0"""
    psi = []
    for value in phi:
        if abs(value) < PSI_CLAMP:
            psi.append(0.0)
        else:
            psi.append(math.copysign(1.0, value) * math.log10(abs(value)))
    return tuple(psi)


# ========== 特征提取 ==========

def extract_features(sub: GrayImage, entropy_scope: EntropyScope = "foreground") -> FeatureVector:
    """计算子图的熵与 Hu 不变量；sub 应带零边框"""
    pix = sub.pixels
    if pix.shape[0] >= 2 and pix.shape[1] >= 2:
        border = np.concatenate([pix[0], pix[-1], pix[:, 0], pix[:, -1]])
        if border.any():
            logger.warning(f"子图 {sub.width}x{sub.height} 边框非零，梯形求积与直接求和将不一致")

    if entropy_scope == "foreground":
        h = histogram(sub, BitMask(pix >= 1))
    elif entropy_scope == "whole":
        h = histogram(sub)
    else:
        raise ValueError(f"未知的熵统计范围: {entropy_scope}")

    moments = complete_moments(raw_moments_trap(sub))
    return FeatureVector(entropy=entropy(h), phi=hu_invariants(moments))


class FeatureService:
    """特征提取服务"""

    def __init__(self, entropy_scope: EntropyScope = "foreground", workers: int = 4):
        self.entropy_scope = entropy_scope
        self.workers = workers

    @classmethod
    def from_settings(cls, cfg: Settings) -> "FeatureService":
        return cls(entropy_scope=cfg.ENTROPY_SCOPE, workers=cfg.WORKERS)

    def extract(self, sub: GrayImage) -> FeatureVector:
        return extract_features(sub, self.entropy_scope)

    def extract_batch(self, subs: Sequence[GrayImage]) -> List[FeatureVector]:
        """并行提取多张子图的特征，结果保持输入顺序"""
        if len(subs) <= 1 or self.workers == 1:
            return [self.extract(sub) for sub in subs]

        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            results = list(executor.map(self.extract, subs))
        logger.debug(f"批量提取 {len(results)} 个子图特征完成")
        return results


# 单例模式
feature_service = FeatureService.from_settings(settings)
