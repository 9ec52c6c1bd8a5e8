# app/services/query_service.py
"""两级检索：先按熵过滤，再按 ψ 的欧氏距离排序"""
import math
from typing import List, Optional, Sequence

import numpy as np

from app.config import Settings, settings
from app.models.schemas import FeatureVector, IndexDb, IndexRecord, QueryResult
from app.services.feature_service import log_scale
from app.utils.logger import logger


def entropy_filter(db: IndexDb, s_q: float, tau: float) -> List[IndexRecord]:
    """保留 |S - s_q| <= tau 的记录，保持库内顺序"""
    if math.isnan(tau) or tau < 0:
        raise ValueError(f"熵容差必须非负，实际 {tau}")
    return [rec for rec in db.records if abs(rec.entropy - s_q) <= tau]


def moment_distance(psi_a: Sequence[float], psi_b: Sequence[float]) -> float:
    a = np.asarray(psi_a, dtype=np.float64)
    b = np.asarray(psi_b, dtype=np.float64)
    if a.shape != (7,) or b.shape != (7,):
        raise ValueError(f"ψ 必须是 7 维，实际 {a.shape} 与 {b.shape}")
    return float(np.linalg.norm(a - b))


def query(
    db: IndexDb,
    template: FeatureVector,
    tau: float,
    k: int,
    max_distance: Optional[float] = None,
) -> List[QueryResult]:
    """检索与模板最相似的至多 k 条记录，按 (distance, id) 升序"""
    if k < 1:
        raise ValueError(f"k 必须 >= 1，实际 {k}")

    candidates = entropy_filter(db, template.entropy, tau)
    target = template.psi
    results = [
        QueryResult(
            id=rec.id,
            source=rec.source,
            distance=moment_distance(target, log_scale(rec.phi)),
            entropy_gap=abs(rec.entropy - template.entropy),
        )
        for rec in candidates
    ]
    if max_distance is not None:
        results = [r for r in results if r.distance <= max_distance]

    results.sort(key=lambda r: (r.distance, r.id))
    logger.debug(f"熵过滤保留 {len(candidates)}/{len(db)} 条，返回前 {min(k, len(results))} 条")
    return results[:k]


class QueryService:
    """检索服务，携带默认的 tau、k 与距离上限"""

    def __init__(self, tau: float = 0.5, top_k: int = 10, max_distance: Optional[float] = None):
        self.tau = tau
        self.top_k = top_k
        self.max_distance = max_distance

    @classmethod
    def from_settings(cls, cfg: Settings) -> "QueryService":
        return cls(tau=cfg.TAU, top_k=cfg.TOP_K, max_distance=cfg.MAX_DISTANCE)

    def search(self, db: IndexDb, template: FeatureVector) -> List[QueryResult]:
        return query(db, template, self.tau, self.top_k, self.max_distance)


# 单例模式
query_service = QueryService.from_settings(settings)
