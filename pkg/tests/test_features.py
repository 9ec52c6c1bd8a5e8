"""熵、矩与 Hu 不变量测试"""
import math
from fractions import Fraction

import numpy as np
import pytest

from app.core.exceptions import DegenerateGrid, EmptySample, ZeroMass
from app.models.image import BitMask, GrayImage
from app.models.moments import Histogram
from app.models.schemas import ShapeSpec
from app.services.feature_service import (
    FeatureService,
    complete_moments,
    entropy,
    extract_features,
    histogram,
    hu_invariants,
    log_scale,
    raw_moments_sum,
    raw_moments_trap,
)
from app.services.synth_service import mirror, render, rotate
from app.utils.quadrature import ORDERS, trapezoid_weights, uniform_weights, weighted_moments
from tests.conftest import padded


# ========== 熵 ==========

def test_histogram_counts():
    h = histogram(GrayImage.from_rows([[5, 5], [5, 5]]))
    assert h.counts[5] == 4 and h.total == 4

    h = histogram(GrayImage.from_rows([[0, 255]]))
    assert h.counts[0] == 1 and h.counts[255] == 1


def test_histogram_empty_mask():
    img = GrayImage.from_rows([[1, 2]])
    with pytest.raises(EmptySample):
        histogram(img, BitMask(np.zeros((1, 2), dtype=bool)))


@pytest.mark.parametrize("levels", [1, 2, 4, 16, 256])
def test_entropy_equiprobable_levels(levels):
    """k 个等概率灰度级的熵恰为 log2 k"""
    counts = np.zeros(256, dtype=np.int64)
    counts[:levels] = 3
    assert entropy(Histogram(counts)) == math.log2(levels)


def test_entropy_permutation_invariant():
    rng = np.random.default_rng(11)
    pix = rng.integers(0, 256, size=(40, 40))
    shuffled = rng.permutation(pix.ravel()).reshape(40, 40)
    assert entropy(histogram(GrayImage(pix))) == entropy(histogram(GrayImage(shuffled)))


# ========== 原始矩 ==========

def test_sum_moments_small_cases():
    ms = raw_moments_sum(GrayImage.from_rows([[5]]))
    assert (ms.m[(0, 0)], ms.m[(1, 0)], ms.m[(0, 1)]) == (5.0, 0.0, 0.0)

    ms = raw_moments_sum(GrayImage(np.ones((3, 3))))
    assert (ms.m[(0, 0)], ms.m[(1, 0)], ms.m[(0, 1)]) == (9.0, 9.0, 9.0)


def test_trap_all_ones():
    """3x3 全 1：I_T = (1/4)(4 + 2·4 + 4) = 4"""
    ms = raw_moments_trap(GrayImage(np.ones((3, 3))))
    assert ms.m[(0, 0)] == 4.0
    assert complete_moments(ms).centroid == (1.0, 1.0)


def test_trap_degenerate_and_zero():
    with pytest.raises(DegenerateGrid):
        raw_moments_trap(GrayImage(np.ones((1, 3))))
    with pytest.raises(ZeroMass):
        raw_moments_trap(GrayImage(np.zeros((4, 4))))
    with pytest.raises(ZeroMass):
        raw_moments_sum(GrayImage(np.zeros((4, 4))))


def test_trap_equals_sum_with_zero_border():
    rng = np.random.default_rng(5)
    for _ in range(20):
        h, w = rng.integers(1, 12, size=2)
        img = padded(rng.integers(0, 256, size=(h, w)))
        if not img.pixels.any():
            continue
        trap, direct = raw_moments_trap(img), raw_moments_sum(img)
        assert trap.exact_m == direct.exact_m
        assert all(trap.m[k] == direct.m[k] for k in ORDERS)


def test_wide_image_moments_are_exact():
    """两万像素宽的行，三阶矩超出 int64 范围"""
    width = 20000
    pix = np.zeros((3, width), dtype=np.uint8)
    pix[1, 1:-1] = 255
    n = width - 2
    cubes = (n * (n + 1) // 2) ** 2
    squares = n * (n + 1) * (2 * n + 1) // 6

    trap = weighted_moments(pix, trapezoid_weights(width), trapezoid_weights(3))
    assert trap[(3, 0)] == 255 * cubes
    assert trap[(2, 1)] == 255 * squares
    assert trap[(3, 0)] > np.iinfo(np.int64).max

    direct = weighted_moments(pix, uniform_weights(width), uniform_weights(3))
    assert direct == trap
    assert raw_moments_trap(GrayImage(pix)).exact_m[(3, 0)] == Fraction(255 * cubes)


# ========== 中心矩与不变量 ==========

def test_first_central_moments_vanish():
    rng = np.random.default_rng(9)
    img = GrayImage(rng.integers(0, 256, size=(17, 23)))
    ms = complete_moments(raw_moments_trap(img))
    assert ms.mu[(1, 0)] == 0.0 and ms.mu[(0, 1)] == 0.0
    assert ms.eta[(0, 0)] == 1.0
    assert ms.is_complete


def test_centered_square_symmetry_zeros():
    img = padded(np.full((20, 20), 200), margin=3)
    phi = hu_invariants(complete_moments(raw_moments_trap(img)))
    assert phi[0] > 0
    assert all(abs(v) <= 1e-9 * max(1.0, abs(phi[0])) for v in phi[1:])


def test_disk_oracle(disk_image):
    """半径 100 的圆盘 φ1 与 1/(2π) 相差不到 1%"""
    phi = hu_invariants(complete_moments(raw_moments_trap(disk_image)))
    assert phi[0] == pytest.approx(1 / (2 * math.pi), rel=0.01)
    assert all(abs(v) <= 1e-6 for v in phi[1:])


def test_float_path_matches_exact():
    """没有精确中心矩时用浮点 η 计算，结果与精确路径一致"""
    spec = ShapeSpec(kind="triangle", width=64, height=64,
                     vertices=((8, 10), (55, 20), (20, 52)), shading="sweep", fg=240, phase=30)
    ms = complete_moments(raw_moments_trap(render(spec)))
    exact = hu_invariants(ms)
    approx = hu_invariants(ms.__class__(**{**ms.__dict__, "exact_mu": None}))
    assert approx == pytest.approx(exact, rel=1e-9, abs=1e-15)


def test_hu_requires_complete_moments():
    with pytest.raises(ValueError):
        hu_invariants(raw_moments_trap(GrayImage(np.ones((3, 3)))))


def test_contrast_scaling_is_exact():
    """g -> c·g 不改变 φ"""
    spec = ShapeSpec(kind="rect", width=48, height=48, rect_w=30, rect_h=14,
                     shading="sweep", fg=80, fg_lo=4, phase=40, sweep_offset=(5.0, 2.0))
    img = render(spec)
    base = extract_features(img).phi
    for c in (2, 3):
        scaled = GrayImage(img.pixels.astype(np.int64) * c)
        assert extract_features(scaled).phi == pytest.approx(base, rel=1e-9)


def test_translation_invariance():
    rng = np.random.default_rng(21)
    blob = rng.integers(1, 256, size=(9, 7))
    a = GrayImage(np.pad(blob, ((2, 10), (3, 8))))
    b = GrayImage(np.pad(blob, ((9, 3), (1, 10))))
    ma = complete_moments(raw_moments_trap(a))
    mb = complete_moments(raw_moments_trap(b))
    assert ma.exact_mu == mb.exact_mu
    assert hu_invariants(ma) == hu_invariants(mb)


def test_mirror_negates_phi7():
    spec = ShapeSpec(kind="triangle", width=80, height=80,
                     vertices=((10, 12), (70, 30), (25, 68)), shading="sweep", fg=250, phase=75)
    img = render(spec)
    phi = extract_features(img).phi
    flipped = extract_features(mirror(img, "horizontal")).phi
    assert flipped[:6] == phi[:6]
    assert flipped[6] == -phi[6] and phi[6] != 0


@pytest.mark.parametrize("theta", [90, 180, 270])
def test_quarter_rotation_is_exact(theta):
    spec = ShapeSpec(kind="annulus", width=90, height=90, radius=36, inner_radius=12,
                     shading="sweep", fg=230, fg_lo=3, phase=10, sweep_offset=(6.0, -9.0))
    img = render(spec)
    assert extract_features(rotate(img, theta)) == extract_features(img)


# ========== ψ ==========

def test_log_scale():
    psi = log_scale([0.01, -0.01, 0.0, 1e-31, 1.0, 1e3, -1e-5])
    assert psi == pytest.approx((-2.0, 2.0, 0.0, 0.0, 0.0, 3.0, 5.0), abs=1e-12)


def test_feature_vector_psi():
    fv = extract_features(padded(np.full((6, 6), 255)))
    assert fv.entropy == 0.0
    assert fv.psi == log_scale(fv.phi)


# ========== 特征提取 ==========

def test_constant_disk_entropy_zero(disk_image):
    assert extract_features(disk_image).entropy == 0.0


def test_entropy_scope_whole():
    img = padded([[10, 20], [30, 40]])
    assert extract_features(img, "foreground").entropy == 2.0
    # 12 个零边像素 + 4 个不同灰度
    expected = -(0.75 * math.log2(0.75) + 4 * (1 / 16) * math.log2(1 / 16))
    assert extract_features(img, "whole").entropy == pytest.approx(expected)


def test_unknown_scope():
    with pytest.raises(ValueError):
        extract_features(padded([[1, 2]]), "border")


def test_batch_keeps_order():
    subs = [padded(np.full((k, k + 1), 50 + k)) for k in range(2, 9)]
    service = FeatureService(workers=3)
    assert service.extract_batch(subs) == [service.extract(s) for s in subs]
    assert FeatureService(workers=1).extract_batch(subs) == service.extract_batch(subs)
