# app/commands/common.py
"""子命令共用的参数、配置合并与错误输出"""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from app.config import Settings, settings
from app.models.image import GrayImage
from app.models.schemas import FeatureVector
from app.services.feature_service import FeatureService
from app.services.segment_service import SegmentService
from app.utils.logger import logger
from app.utils.pgm import read_image

# 命令行参数名 -> Settings 字段
OVERRIDES = {
    "db": "DB_PATH",
    "threshold": "THRESHOLD",
    "connectivity": "CONNECTIVITY",
    "min_area": "MIN_AREA",
    "margin": "MARGIN",
    "entropy_scope": "ENTROPY_SCOPE",
    "tau": "TAU",
    "top": "TOP_K",
    "max_distance": "MAX_DISTANCE",
    "workers": "WORKERS",
}

# 操作错误：退出码 1（CBIRError 与 ValidationError 都是 ValueError）
OPERATIONAL_ERRORS = (ValueError, OSError)


def config_parser() -> argparse.ArgumentParser:
    """所有子命令共享的配置参数；未给出的保持 None，由环境变量或默认值决定"""
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("配置")
    group.add_argument("--db", help="索引文件路径")
    group.add_argument("--threshold", type=int, help="前景阈值，灰度 >= 阈值为前景")
    group.add_argument("--connectivity", type=int, choices=[4, 8], help="连通性")
    group.add_argument("--min-area", dest="min_area", type=int, help="最小区域面积")
    group.add_argument("--margin", type=int, help="子图零边宽度")
    group.add_argument("--entropy-scope", dest="entropy_scope", choices=["foreground", "whole"], help="熵统计范围")
    group.add_argument("--tau", type=float, help="熵容差（bit），可为 inf")
    group.add_argument("--top", type=int, help="返回的最大结果数 k")
    group.add_argument("--max-distance", dest="max_distance", type=float, help="距离上限")
    group.add_argument("--workers", type=int, help="批量特征提取线程数")
    group.add_argument("--debug", action="store_true", default=None, help="输出调试日志")
    return parser


def build_settings(args: argparse.Namespace, base: Optional[Settings] = None) -> Settings:
    """命令行参数覆盖环境变量与默认值，合并后重新校验"""
    base = base or settings
    overrides: Dict[str, Any] = {
        field: getattr(args, name)
        for name, field in OVERRIDES.items()
        if getattr(args, name, None) is not None
    }
    if getattr(args, "debug", None):
        overrides["DEBUG"] = True
    return Settings(**{**base.model_dump(), **overrides})


def report(target: Any, exc: BaseException) -> int:
    """记录并向 stderr 输出错误，返回退出码 1"""
    logger.error(f"{target}: {exc}")
    print(f"error: {target}: {exc}", file=sys.stderr)
    return 1


def expand_paths(paths: Iterable[str]) -> List[Path]:
    """目录展开为其中按名排序的 *.pgm 文件"""
    expanded: List[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files = sorted(p for p in path.iterdir() if p.suffix.lower() == ".pgm" and p.is_file())
            if not files:
                logger.warning(f"目录 {path} 中没有 PGM 文件")
            expanded.extend(files)
        else:
            expanded.append(path)
    return expanded


def image_features(cfg: Settings, path: Path) -> List[Tuple[int, int, FeatureVector]]:
    """读取图像并提取每个区域的 (区域序号, 面积, 特征)"""
    img: GrayImage = read_image(path)
    logger.info(f"已读取 {path} ({img.width}x{img.height})")
    pairs = SegmentService.from_settings(cfg).segment(img)
    if not pairs:
        logger.warning(f"{path} 中没有找到区域")
        return []
    features = FeatureService.from_settings(cfg).extract_batch([sub for _, sub in pairs])
    return [(region.label, region.area, fv) for (region, _), fv in zip(pairs, features)]
