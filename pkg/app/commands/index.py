# app/commands/index.py
import argparse
from typing import List

from app.commands.common import OPERATIONAL_ERRORS, config_parser, expand_paths, image_features, report
from app.config import Settings
from app.services.index_service import IndexService
from app.utils.logger import logger


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "index", parents=[config_parser()], help="分割图像并把各区域特征写入索引",
    )
    parser.add_argument("paths", nargs="+", help="PGM 文件或包含 PGM 的目录")
    parser.set_defaults(handler=run)


def run(cfg: Settings, args: argparse.Namespace) -> int:
    """索引图像：任何一个文件失败时索引文件保持不变"""
    store = IndexService.from_settings(cfg)
    try:
        db = store.load(missing_ok=True)
    except OPERATIONAL_ERRORS as e:
        return report(cfg.DB_PATH, e)

    lines: List[str] = []
    for path in expand_paths(args.paths):
        try:
            for label, area, fv in image_features(cfg, path):
                db = store.add_features(db, f"{path.name}#{label}", str(path), fv)
                rec = db.records[-1]
                lines.append(f"{rec.id}\t{area}\t{fv.entropy:.6f}\t{fv.phi[0]:.6e}\t{rec.source}")
        except OPERATIONAL_ERRORS as e:
            return report(path, e)

    try:
        store.save(db)
    except OPERATIONAL_ERRORS as e:
        return report(cfg.DB_PATH, e)

    for line in lines:
        print(line)
    logger.info(f"新增 {len(lines)} 条记录，索引共 {len(db)} 条")
    return 0
