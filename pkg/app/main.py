# app/main.py
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.commands import features, gen, index, oracle, query, remove
from app.commands.common import build_settings
from app.config import settings
from app.utils.logger import logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbir",
        description=f"{settings.APP_NAME}：按熵与 Hu 矩不变量进行以图搜图",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    index.register(subparsers)
    query.register(subparsers)
    features.register(subparsers)
    oracle.register(subparsers)
    gen.register(subparsers)
    remove.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """命令行入口，返回退出码：0 成功，1 操作错误，2 用法错误"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        cfg = build_settings(args)
    except ValidationError as e:
        print(f"error: 配置无效: {e.errors()[0]['loc'][0]}: {e.errors()[0]['msg']}", file=sys.stderr)
        return 2

    if cfg.DEBUG:
        logging.getLogger().setLevel(logging.DEBUG)
    logger.debug(f"执行 {args.command}，索引 {cfg.DB_PATH}")
    return args.handler(cfg, args)


if __name__ == "__main__":
    sys.exit(main())
