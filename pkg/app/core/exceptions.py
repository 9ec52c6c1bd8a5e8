"""检索系统的异常类型

每一类同时继承 ValueError，只认 ValueError 的调用方也能捕获。
"""


class CBIRError(Exception):
    """所有业务异常的基类"""


# ========== 图像编解码 ==========

class RasterError(CBIRError, ValueError):
    """图像格式错误"""


class UnsupportedFormat(RasterError):
    """不支持的图像格式（仅支持 P2/P5）"""


class MalformedImage(RasterError):
    """PGM 数据损坏：截断、尺寸非法或样本超出 maxval"""


# ========== 区域选择 ==========

class SegmentError(CBIRError, ValueError):
    """区域选择失败"""


class NoRegion(SegmentError):
    """图像中没有满足面积要求的前景区域"""


# ========== 特征计算 ==========

class FeatureError(CBIRError, ValueError):
    """特征计算失败"""


class EmptySample(FeatureError):
    """掩码没有选中任何像素"""


class ZeroMass(FeatureError):
    """图像全为 0，m00 = 0"""


class DegenerateGrid(FeatureError):
    """梯形求积需要宽高均不小于 2"""


# ========== 特征索引 ==========

class IndexDbError(CBIRError, ValueError):
    """索引库错误"""


class DuplicateId(IndexDbError):
    """记录 id 重复"""


class RecordNotFound(IndexDbError):
    """记录不存在"""


class BadMagic(IndexDbError):
    """索引文件头不是 CBIRIDX 1"""


class MalformedRecord(IndexDbError):
    """索引文件中的记录行无法解析"""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"第 {line_no} 行: {reason}")


# ========== 合成图像 ==========

class SynthError(CBIRError, ValueError):
    """合成图像错误"""


class ShapeOutOfFrame(SynthError):
    """图形超出画布或侵入 2 像素零边框"""


class ContentClipped(SynthError):
    """平移会裁掉非零像素"""
