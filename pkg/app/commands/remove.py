# app/commands/remove.py
import argparse

from app.commands.common import OPERATIONAL_ERRORS, config_parser, report
from app.config import Settings
from app.services.index_service import IndexService, db_remove


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "remove", parents=[config_parser()], help="从索引中删除记录",
    )
    parser.add_argument("ids", nargs="+", help="记录 id，如 shapes.pgm#0")
    parser.set_defaults(handler=run)


def run(cfg: Settings, args: argparse.Namespace) -> int:
    """全部删除成功才写回索引"""
    store = IndexService.from_settings(cfg)
    try:
        db = store.load()
        for record_id in args.ids:
            db = db_remove(db, record_id)
        store.save(db)
    except OPERATIONAL_ERRORS as e:
        return report(cfg.DB_PATH, e)

    for record_id in args.ids:
        print(record_id)
    return 0
