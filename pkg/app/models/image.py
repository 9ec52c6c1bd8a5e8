from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8 位灰度图像，坐标 x = 列、y = 行，原点在左上角"""

    pixels: np.ndarray  # (H, W) uint8，行优先

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"图像必须是非空二维数组，实际形状 {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.dtype.kind == "f" and not np.array_equal(arr, np.floor(arr)):
                raise ValueError("像素值必须是整数")
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("像素值必须在 [0, 255] 范围内")
            arr = arr.astype(np.uint8)
        else:
            arr = arr.copy()
        object.__setattr__(self, "pixels", _readonly(arr))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "GrayImage":
        return cls(np.array(rows, dtype=np.int64))

    @classmethod
    def from_flat(cls, width: int, height: int, values: Iterable[int]) -> "GrayImage":
        flat = np.fromiter(values, dtype=np.int64)
        if flat.size != width * height:
            raise ValueError(f"像素数 {flat.size} 与尺寸 {width}x{height} 不符")
        return cls(flat.reshape(height, width))

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def flat(self) -> List[int]:
        return self.pixels.ravel().tolist()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class BitMask:
    """前景/背景划分，尺寸与源图像一致"""

    bits: np.ndarray  # (H, W) bool

    def __post_init__(self):
        arr = np.asarray(self.bits, dtype=bool)
        if arr.ndim != 2:
            raise ValueError(f"掩码必须是二维数组，实际形状 {arr.shape}")
        object.__setattr__(self, "bits", _readonly(arr.copy()))

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        if not isinstance(other, BitMask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))


@dataclass(frozen=True, eq=False)
class Region:
    """连通前景区域

    像素集合以包围盒内的布尔裁剪 `mask` 保存，`pixels` 按需展开为 (x, y) 集合。
    """

    label: int
    bbox: Tuple[int, int, int, int]  # (x_min, y_min, x_max, y_max)，闭区间
    mask: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.mask, dtype=bool)
        x_min, y_min, x_max, y_max = self.bbox
        if arr.shape != (y_max - y_min + 1, x_max - x_min + 1):
            raise ValueError(f"区域掩码形状 {arr.shape} 与包围盒 {self.bbox} 不符")
        if not arr.any():
            raise ValueError("区域不能为空")
        object.__setattr__(self, "mask", _readonly(arr.copy()))

    @classmethod
    def from_pixels(cls, label: int, pixels: Iterable[Tuple[int, int]]) -> "Region":
        coords = np.array(sorted(set(pixels)), dtype=np.int64).reshape(-1, 2)
        if coords.size == 0:
            raise ValueError("区域不能为空")
        x_min, y_min = coords.min(axis=0)
        x_max, y_max = coords.max(axis=0)
        mask = np.zeros((y_max - y_min + 1, x_max - x_min + 1), dtype=bool)
        mask[coords[:, 1] - y_min, coords[:, 0] - x_min] = True
        return cls(label, (int(x_min), int(y_min), int(x_max), int(y_max)), mask)

    @property
    def area(self) -> int:
        return int(self.mask.sum())

    @property
    def pixels(self) -> FrozenSet[Tuple[int, int]]:
        ys, xs = np.nonzero(self.mask)
        x0, y0 = self.bbox[0], self.bbox[1]
        return frozenset(zip((xs + x0).tolist(), (ys + y0).tolist()))

    def contains(self, x: int, y: int) -> bool:
        x_min, y_min, x_max, y_max = self.bbox
        if x < x_min or x > x_max or y < y_min or y > y_max:
            return False
        return bool(self.mask[y - y_min, x - x_min])

    def __repr__(self):
        return f"Region(label={self.label}, bbox={self.bbox}, area={self.area})"
