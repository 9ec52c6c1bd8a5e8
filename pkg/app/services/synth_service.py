# app/services/synth_service.py
"""合成图形与几何变换

渲染按像素中心判定内外；任意角度旋转与缩放用反向映射加双线性插值。
"""
import math
from typing import List, Literal, Tuple

import numpy as np
from scipy import ndimage

from app.core.exceptions import ContentClipped, ShapeOutOfFrame
from app.models.image import GrayImage
from app.models.schemas import ShapeSpec
from app.utils.logger import logger

BORDER = 2


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5)


def _to_image(values: np.ndarray) -> GrayImage:
    return GrayImage(np.clip(_round_half_up(values), 0, 255).astype(np.uint8))


# ========== 渲染 ==========

def _inside(spec: ShapeSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    cx, cy = spec.center
    if spec.kind == "disk":
        return (xs - cx) ** 2 + (ys - cy) ** 2 <= spec.radius ** 2
    if spec.kind == "annulus":
        d2 = (xs - cx) ** 2 + (ys - cy) ** 2
        return (d2 <= spec.radius ** 2) & (d2 > spec.inner_radius ** 2)
    if spec.kind == "rect":
        # 半开区间，宽 w 的区间恰好包含 w 个像素中心
        return (
            (xs >= cx - spec.rect_w / 2.0) & (xs < cx + spec.rect_w / 2.0)
            & (ys >= cy - spec.rect_h / 2.0) & (ys < cy + spec.rect_h / 2.0)
        )

    (x1, y1), (x2, y2), (x3, y3) = spec.vertices
    e1 = (x2 - x1) * (ys - y1) - (y2 - y1) * (xs - x1)
    e2 = (x3 - x2) * (ys - y2) - (y3 - y2) * (xs - x2)
    e3 = (x1 - x3) * (ys - y3) - (y1 - y3) * (xs - x3)
    return ((e1 >= 0) & (e2 >= 0) & (e3 >= 0)) | ((e1 <= 0) & (e2 <= 0) & (e3 <= 0))


def _shade(spec: ShapeSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    if spec.shading == "flat":
        return np.full(xs.shape, float(spec.fg))
    cx, cy = spec.center
    sx, sy = cx + spec.sweep_offset[0], cy + spec.sweep_offset[1]
    theta = np.degrees(np.arctan2(ys - sy, xs - sx))
    t = np.mod(theta - spec.phase, 360.0) / 360.0
    return spec.fg_lo + (spec.fg - spec.fg_lo) * t


def render(spec: ShapeSpec) -> GrayImage:
    """渲染图形；图形必须完全落在画布内并留出 2 像素零边框"""
    ys, xs = np.mgrid[0:spec.height, 0:spec.width].astype(np.float64)
    inside = _inside(spec, xs, ys)

    frame = np.ones_like(inside)
    frame[BORDER:spec.height - BORDER, BORDER:spec.width - BORDER] = False
    if not inside.any():
        raise ShapeOutOfFrame(f"{spec.kind} 在 {spec.width}x{spec.height} 画布内没有像素")
    if (inside & frame).any():
        raise ShapeOutOfFrame(f"{spec.kind} 超出画布或侵入 {BORDER} 像素边框")

    values = np.where(inside, _shade(spec, xs, ys), 0.0)
    return _to_image(values)


# ========== 几何变换 ==========

def _pad(pixels: np.ndarray, border: int = BORDER) -> GrayImage:
    return GrayImage(np.pad(pixels, border, mode="constant", constant_values=0))


def _extent(value: float) -> int:
    return int(math.ceil(value - 1e-9))


def rotate(img: GrayImage, theta: float, exact: bool = True) -> GrayImage:
    """绕画布中心旋转 theta 度（y 轴向下时为顺时针）

    90° 的整数倍走精确的像素置换；其余角度输出画布扩大到容纳旋转内容并加 2 像素零边。
    """
    if not math.isfinite(theta):
        raise ValueError(f"旋转角必须是有限数，实际 {theta}")
    quarter = theta / 90.0
    if exact and quarter == int(quarter):
        return GrayImage(np.rot90(img.pixels, k=-(int(quarter) % 4)))

    rad = math.radians(theta)
    cos_t, sin_t = math.cos(rad), math.sin(rad)
    w, h = img.width, img.height
    out_w = _extent(abs(w * cos_t) + abs(h * sin_t))
    out_h = _extent(abs(w * sin_t) + abs(h * cos_t))

    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    ocx, ocy = (out_w - 1) / 2.0, (out_h - 1) / 2.0
    oy, ox = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    dx, dy = ox - ocx, oy - ocy
    src_x = cx + dx * cos_t + dy * sin_t
    src_y = cy - dx * sin_t + dy * cos_t

    sampled = ndimage.map_coordinates(
        img.pixels.astype(np.float64), [src_y, src_x], order=1, mode="constant", cval=0.0
    )
    return _pad(_to_image(sampled).pixels)


def scale(img: GrayImage, s: float) -> GrayImage:
    """双线性缩放，输出 ⌈sW⌉×⌈sH⌉ 再加 2 像素零边"""
    if not (s > 0 and math.isfinite(s)):
        raise ValueError(f"缩放因子必须是正的有限数，实际 {s}")
    out_w = max(1, _extent(s * img.width))
    out_h = max(1, _extent(s * img.height))

    oy, ox = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    # 像素中心对齐
    src_x = (ox + 0.5) / s - 0.5
    src_y = (oy + 0.5) / s - 0.5
    sampled = ndimage.map_coordinates(
        img.pixels.astype(np.float64), [src_y, src_x], order=1, mode="constant", cval=0.0
    )
    return _pad(_to_image(sampled).pixels)


def translate(img: GrayImage, dx: int, dy: int) -> GrayImage:
    """整数像素平移，空出部分补 0"""
    pix = img.pixels
    ys, xs = np.nonzero(pix)
    if ys.size and (
        xs.min() + dx < 0 or xs.max() + dx >= img.width or ys.min() + dy < 0 or ys.max() + dy >= img.height
    ):
        raise ContentClipped(f"平移 ({dx}, {dy}) 会裁掉非零像素")

    out = np.zeros_like(pix)
    src = pix[max(0, -dy):img.height - max(0, dy), max(0, -dx):img.width - max(0, dx)]
    out[max(0, dy):max(0, dy) + src.shape[0], max(0, dx):max(0, dx) + src.shape[1]] = src
    return GrayImage(out)


def mirror(img: GrayImage, axis: Literal["horizontal", "vertical"] = "horizontal") -> GrayImage:
    """镜像：horizontal 左右翻转，vertical 上下翻转"""
    if axis == "horizontal":
        return GrayImage(np.fliplr(img.pixels))
    if axis == "vertical":
        return GrayImage(np.flipud(img.pixels))
    raise ValueError(f"未知的镜像方向: {axis}")


# ========== 验收语料 ==========

def _frame(extent: float) -> int:
    return int(math.ceil(extent)) + 2 * (BORDER + 4)


def corpus() -> List[Tuple[str, ShapeSpec]]:
    """固定枚举的 50 个扫描着色图形：圆盘、矩形、三角形、圆环"""
    shapes: List[Tuple[str, ShapeSpec]] = []

    # 圆盘：不变量只取决于扫描中心偏移与灰度范围
    disk_params = [
        (0.0, 0.0, 255, 1), (0.1, 0.0, 240, 2), (0.0, 0.2, 224, 4), (-0.3, 0.0, 255, 8),
        (0.0, -0.4, 208, 1), (-0.12, -0.33, 224, 4), (0.6, 0.0, 176, 3), (0.0, 0.7, 255, 16),
        (0.26, -0.3, 207, 2), (0.9, 0.0, 160, 1),
    ]
    for i, (ox, oy, fg, lo) in enumerate(disk_params):
        radius = 70 + 4 * (i % 4)
        size = _frame(2 * radius)
        shapes.append((f"disk{i:02d}", ShapeSpec(
            kind="disk", width=size, height=size, radius=radius, fg=fg, fg_lo=lo,
            shading="sweep", phase=17.0 * i, sweep_offset=(ox * radius, oy * radius),
        )))

    # 矩形：宽高比与接缝角
    rect_params = [
        (150, 150, 10.0), (150, 150, 55.0), (160, 120, 0.0), (160, 120, 45.0), (169, 129, 340.0),
        (170, 100, 135.0), (180, 90, 20.0), (180, 80, 160.0), (140, 140, 80.0), (176, 110, 70.0),
        (190, 76, 110.0), (150, 130, 200.0), (164, 96, 300.0), (186, 70, 250.0),
    ]
    for i, (rw, rh, phase) in enumerate(rect_params):
        size = _frame(math.hypot(rw, rh))
        fg = (255, 224, 192, 240)[i % 4]
        shapes.append((f"rect{i:02d}", ShapeSpec(
            kind="rect", width=size, height=size, rect_w=rw, rect_h=rh, fg=fg, fg_lo=1 + i % 5,
            shading="sweep", phase=phase, sweep_offset=(0.12 * rw * ((i % 3) - 1), 0.1 * rh * ((i % 2) * 2 - 1)),
        )))

    # 三角形：不等边，顶点相对中心给出
    tri_params = [
        ((-80, 60), (90, 70), (-10, -85)), ((-90, 50), (85, 40), (30, -80)),
        ((-70, 75), (95, 20), (-40, -80)), ((-95, 30), (70, 70), (50, -75)),
        ((-60, 80), (90, 55), (-85, -60)), ((-85, 70), (85, 75), (5, -60)),
        ((-90, 10), (80, 80), (40, -85)), ((-75, 85), (95, -10), (-55, -70)),
        ((-95, 60), (60, 85), (80, -70)), ((-50, 90), (95, 35), (-90, -55)),
        ((75, -90), (-10, 85), (-65, -55)), ((-70, 60), (90, 80), (10, -90)),
        ((80, -65), (55, 75), (-90, -65)),
    ]
    for i, verts in enumerate(tri_params):
        extent = 2 * max(max(abs(x), abs(y)) for x, y in verts)
        size = _frame(extent)
        c = (size - 1) / 2.0
        fg = (255, 200, 232, 176)[i % 4]
        shapes.append((f"tri{i:02d}", ShapeSpec(
            kind="triangle", width=size, height=size,
            vertices=tuple((c + x, c + y) for x, y in verts),
            fg=fg, fg_lo=1 + 2 * (i % 3), shading="sweep", phase=29.0 * i,
        )))

    # 圆环：内外径比、扫描中心偏移与灰度范围
    annulus_params = [
        (0.3, 0.0, 0.0, 255, 1), (0.37, -0.36, -0.26, 187, 1), (0.5, 0.0, 0.4, 184, 3),
        (0.35, -0.4, 0.2, 248, 4), (0.45, 0.6, -0.1, 255, 1), (0.25, 0.2, 0.6, 216, 2),
        (0.24, 0.22, -0.31, 225, 1), (0.3, 0.7, 0.3, 248, 4), (0.34, 0.18, -0.02, 216, 4),
        (0.2, 0.5, 0.0, 216, 2), (0.27, 0.38, 0.1, 240, 1), (0.3, -0.75, 0.0, 248, 4),
        (0.33, -0.25, 0.5, 213, 1),
    ]
    for i, (ratio, ox, oy, fg, lo) in enumerate(annulus_params):
        radius = 72 + 3 * (i % 3)
        size = _frame(2 * radius)
        shapes.append((f"ring{i:02d}", ShapeSpec(
            kind="annulus", width=size, height=size, radius=radius, inner_radius=ratio * radius,
            fg=fg, fg_lo=lo, shading="sweep", phase=23.0 * i,
            sweep_offset=(ox * radius, oy * radius),
        )))

    logger.debug(f"验收语料共 {len(shapes)} 个图形")
    return shapes
