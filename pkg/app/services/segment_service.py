# app/services/segment_service.py
"""区域选择：阈值化、连通分量、Moore 边界跟踪与子图提取"""
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from app.config import Settings, settings
from app.models.image import BitMask, GrayImage, Region
from app.utils.logger import logger

Connectivity = Literal[4, 8]

_STRUCTURES = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}

# Moore 邻域，从 W 开始顺时针（y 轴向下）
_MOORE = ((-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1))
_MOORE_INDEX = {offset: i for i, offset in enumerate(_MOORE)}


def threshold_mask(img: GrayImage, t: int) -> BitMask:
    """灰度 >= t 的像素为前景"""
    if not 0 <= t <= 255:
        raise ValueError(f"阈值必须在 [0, 255] 内，实际 {t}")
    return BitMask(img.pixels >= t)


def connected_components(mask: BitMask, connectivity: Connectivity = 8, min_area: int = 4) -> List[Region]:
    """标记连通分量，丢弃面积小于 min_area 的分量，按包围盒 (y_min, x_min) 排序"""
    if connectivity not in _STRUCTURES:
        raise ValueError(f"连通性只能是 4 或 8，实际 {connectivity}")

    labels, count = ndimage.label(mask.bits, structure=_STRUCTURES[connectivity])
    if count == 0:
        return []

    candidates = []
    for index, slices in enumerate(ndimage.find_objects(labels), start=1):
        if slices is None:
            continue
        ys, xs = slices
        crop = labels[ys, xs] == index
        if int(crop.sum()) < min_area:
            continue
        bbox = (xs.start, ys.start, xs.stop - 1, ys.stop - 1)
        candidates.append((bbox, crop))

    candidates.sort(key=lambda item: (item[0][1], item[0][0]))
    return [Region(label, bbox, crop) for label, (bbox, crop) in enumerate(candidates)]


def boundary_trace(region: Region) -> List[Tuple[int, int]]:
    """Moore 邻域跟踪外轮廓，顺时针，起点为最上行最左像素

    终止条件：再次从起点沿第一步方向离开（Jacob 准则）。
    """
    ys, xs = np.nonzero(region.mask)
    x0, y0 = region.bbox[0], region.bbox[1]
    top = int(ys.min())
    start = (int(xs[ys == top].min()) + x0, top + y0)

    contour = [start]
    first_move = None
    p, back = start, 0  # 回溯点在起点正西方，必为背景
    for _ in range(8 * region.area + 8):
        found = None
        for k in range(1, 9):
            idx = (back + k) % 8
            dx, dy = _MOORE[idx]
            q = (p[0] + dx, p[1] + dy)
            if region.contains(*q):
                found = (q, idx)
                break
        if found is None:
            return contour  # 孤立像素

        q, idx = found
        if first_move is None:
            first_move = (p, q)
        elif (p, q) == first_move:
            break

        pdx, pdy = _MOORE[(idx - 1) % 8]
        back = _MOORE_INDEX[(p[0] + pdx - q[0], p[1] + pdy - q[1])]
        contour.append(q)
        p = q
    else:
        raise RuntimeError(f"区域 {region.label} 边界跟踪未能闭合")

    if len(contour) > 1 and contour[-1] == start:
        contour.pop()
    return contour


def extract_subimage(img: GrayImage, region: Region, margin: int = 1) -> GrayImage:
    """按包围盒裁剪区域，四周补 margin 像素零边，非区域像素置 0"""
    if margin < 0:
        raise ValueError("margin 不能为负")
    x_min, y_min, x_max, y_max = region.bbox
    if x_max >= img.width or y_max >= img.height or x_min < 0 or y_min < 0:
        raise ValueError(f"区域 {region.bbox} 超出图像 {img.width}x{img.height}")

    crop = img.pixels[y_min:y_max + 1, x_min:x_max + 1]
    out = np.zeros((crop.shape[0] + 2 * margin, crop.shape[1] + 2 * margin), dtype=np.uint8)
    out[margin:margin + crop.shape[0], margin:margin + crop.shape[1]] = np.where(region.mask, crop, 0)
    return GrayImage(out)


class SegmentService:
    """区域选择服务"""

    def __init__(self, threshold: int = 1, connectivity: Connectivity = 8, min_area: int = 4, margin: int = 1):
        self.threshold = threshold
        self.connectivity = connectivity
        self.min_area = min_area
        self.margin = margin

    @classmethod
    def from_settings(cls, cfg: Settings) -> "SegmentService":
        return cls(
            threshold=cfg.THRESHOLD,
            connectivity=cfg.CONNECTIVITY,
            min_area=cfg.MIN_AREA,
            margin=cfg.MARGIN,
        )

    def regions(self, img: GrayImage) -> List[Region]:
        mask = threshold_mask(img, self.threshold)
        regions = connected_components(mask, self.connectivity, self.min_area)
        logger.debug(f"图像 {img.width}x{img.height} 分割出 {len(regions)} 个区域")
        return regions

    def segment(self, img: GrayImage) -> List[Tuple[Region, GrayImage]]:
        """分割图像并提取每个区域的子图"""
        return [(region, extract_subimage(img, region, self.margin)) for region in self.regions(img)]

    def largest_subimage(self, img: GrayImage) -> Optional[GrayImage]:
        """面积最大区域的子图；没有区域时返回 None"""
        region = self.largest(self.regions(img))
        if region is None:
            return None
        return extract_subimage(img, region, self.margin)

    @staticmethod
    def largest(regions: Sequence[Region]) -> Optional[Region]:
        """面积最大的区域，并列时取排序靠前者"""
        best = None
        for region in regions:
            if best is None or region.area > best.area:
                best = region
        return best


# 单例模式
segment_service = SegmentService.from_settings(settings)
