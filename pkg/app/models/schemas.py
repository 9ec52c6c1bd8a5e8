import math
from typing import Annotated, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]
Phi = Tuple[FiniteFloat, FiniteFloat, FiniteFloat, FiniteFloat, FiniteFloat, FiniteFloat, FiniteFloat]

INDEX_VERSION = 1


# ========== 特征向量 ==========

class FeatureVector(BaseModel):
    """子图特征：熵 S、Hu 不变量 φ1..φ7 及其对数尺度 ψ"""
    model_config = ConfigDict(frozen=True)

    entropy: float = Field(..., ge=0.0, le=8.0, description="灰度熵（bit）")
    phi: Phi

    @computed_field
    @property
    def psi(self) -> Tuple[float, ...]:
        from app.services.feature_service import log_scale
        return log_scale(self.phi)


# ========== 索引 ==========

def _check_field_text(value: str, name: str) -> str:
    if any(ch in value for ch in "\t\n\r"):
        raise ValueError(f"{name} 不能包含制表符或换行")
    return value


class IndexRecord(BaseModel):
    """索引库中一条子图记录，φ 以原始值保存"""
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    source: str
    entropy: float = Field(..., ge=0.0, le=8.0)
    phi: Phi

    @field_validator("id")
    @classmethod
    def check_id(cls, value: str) -> str:
        return _check_field_text(value, "id")

    @field_validator("source")
    @classmethod
    def check_source(cls, value: str) -> str:
        return _check_field_text(value, "source")

    @classmethod
    def from_features(cls, record_id: str, source: str, features: FeatureVector) -> "IndexRecord":
        return cls(id=record_id, source=source, entropy=features.entropy, phi=features.phi)

    def features(self) -> FeatureVector:
        return FeatureVector(entropy=self.entropy, phi=self.phi)


class IndexDb(BaseModel):
    """不可变的索引库快照，保持插入顺序"""
    model_config = ConfigDict(frozen=True)

    version: Literal[1] = INDEX_VERSION
    records: Tuple[IndexRecord, ...] = ()

    @model_validator(mode="after")
    def check_unique_ids(self) -> "IndexDb":
        seen = set()
        for rec in self.records:
            if rec.id in seen:
                raise ValueError(f"记录 id 重复: {rec.id}")
            seen.add(rec.id)
        return self

    def ids(self) -> Tuple[str, ...]:
        return tuple(rec.id for rec in self.records)

    def __len__(self) -> int:
        return len(self.records)


# ========== 检索结果 ==========

class QueryResult(BaseModel):
    """一条检索命中"""
    model_config = ConfigDict(frozen=True)

    id: str
    source: str
    distance: float = Field(..., ge=0.0)
    entropy_gap: float = Field(..., ge=0.0)


# ========== 合成图形 ==========

class ShapeSpec(BaseModel):
    """合成图形描述

    shading=flat 时图形内部恒为 fg；shading=sweep 时灰度随绕扫描中心的角度
    从 fg_lo 线性增至 fg，接缝位于 phase 角处。
    """
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    kind: Literal["disk", "rect", "triangle", "annulus"]
    width: int = Field(..., ge=1, description="画布宽")
    height: int = Field(..., ge=1, description="画布高")
    cx: Optional[float] = None
    cy: Optional[float] = None
    radius: Optional[float] = Field(default=None, gt=0)
    inner_radius: Optional[float] = Field(default=None, gt=0)
    rect_w: Optional[int] = Field(default=None, ge=1)
    rect_h: Optional[int] = Field(default=None, ge=1)
    vertices: Optional[Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float]]] = None
    fg: int = Field(default=255, ge=1, le=255)
    shading: Literal["flat", "sweep"] = "flat"
    fg_lo: int = Field(default=1, ge=1, le=255)
    phase: float = 0.0
    sweep_offset: Tuple[float, float] = (0.0, 0.0)

    @model_validator(mode="after")
    def check_geometry(self) -> "ShapeSpec":
        if self.kind in ("disk", "annulus") and self.radius is None:
            raise ValueError(f"{self.kind} 需要 radius")
        if self.kind == "annulus":
            if self.inner_radius is None:
                raise ValueError("annulus 需要 inner_radius")
            if self.inner_radius >= self.radius:
                raise ValueError("inner_radius 必须小于 radius")
        if self.kind == "rect" and (self.rect_w is None or self.rect_h is None):
            raise ValueError("rect 需要 rect_w 与 rect_h")
        if self.kind == "triangle":
            if self.vertices is None:
                raise ValueError("triangle 需要 vertices")
            (x1, y1), (x2, y2), (x3, y3) = self.vertices
            if math.isclose((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1), 0.0, abs_tol=1e-9):
                raise ValueError("三角形顶点共线")
        if self.fg_lo > self.fg:
            raise ValueError("fg_lo 不能大于 fg")
        return self

    @property
    def center(self) -> Tuple[float, float]:
        """图形中心；三角形取顶点重心"""
        if self.kind == "triangle" and self.cx is None and self.cy is None:
            xs, ys = zip(*self.vertices)
            return sum(xs) / 3.0, sum(ys) / 3.0
        cx = (self.width - 1) / 2.0 if self.cx is None else self.cx
        cy = (self.height - 1) / 2.0 if self.cy is None else self.cy
        return cx, cy
