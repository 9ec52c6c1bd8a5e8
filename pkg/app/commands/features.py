# app/commands/features.py
import argparse
from pathlib import Path

from app.commands.common import OPERATIONAL_ERRORS, config_parser, image_features, report
from app.config import Settings


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "features", parents=[config_parser()], help="输出每个区域的熵、φ 与 ψ",
    )
    parser.add_argument("image", help="PGM 文件")
    parser.set_defaults(handler=run)


def run(cfg: Settings, args: argparse.Namespace) -> int:
    try:
        rows = image_features(cfg, Path(args.image))
    except OPERATIONAL_ERRORS as e:
        return report(args.image, e)

    for label, area, fv in rows:
        phi = "\t".join(f"{v:.6e}" for v in fv.phi)
        psi = "\t".join(f"{v:.6f}" for v in fv.psi)
        print(f"{label}\t{area}\t{fv.entropy:.6f}\t{phi}\t{psi}")
    return 0
