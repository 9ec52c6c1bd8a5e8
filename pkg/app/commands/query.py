# app/commands/query.py
import argparse

from app.commands.common import OPERATIONAL_ERRORS, config_parser, report
from app.config import Settings
from app.core.exceptions import NoRegion
from app.services.feature_service import FeatureService
from app.services.index_service import IndexService
from app.services.query_service import QueryService
from app.services.segment_service import SegmentService
from app.utils.pgm import read_image


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "query", parents=[config_parser()], help="以模板图像中最大的区域检索索引",
    )
    parser.add_argument("template", help="模板 PGM 文件")
    parser.set_defaults(handler=run)


def run(cfg: Settings, args: argparse.Namespace) -> int:
    try:
        db = IndexService.from_settings(cfg).load()
    except OPERATIONAL_ERRORS as e:
        return report(cfg.DB_PATH, e)

    try:
        img = read_image(args.template)
        sub = SegmentService.from_settings(cfg).largest_subimage(img)
        if sub is None:
            raise NoRegion("模板中没有找到区域")
        template = FeatureService.from_settings(cfg).extract(sub)
        results = QueryService.from_settings(cfg).search(db, template)
    except OPERATIONAL_ERRORS as e:
        return report(args.template, e)

    for rank, hit in enumerate(results, start=1):
        print(f"{rank}\t{hit.id}\t{hit.distance:.6f}\t{hit.entropy_gap:.6f}\t{hit.source}")
    return 0
