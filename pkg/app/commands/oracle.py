# app/commands/oracle.py
"""梯形求积与直接求和的逐项对照"""
import argparse
import math

from app.commands.common import OPERATIONAL_ERRORS, config_parser, report
from app.config import Settings
from app.services.feature_service import raw_moments_sum, raw_moments_trap
from app.utils.pgm import read_image
from app.utils.quadrature import ORDERS


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "oracle", parents=[config_parser()], help="对比梯形求积矩与直接求和矩",
    )
    parser.add_argument("image", help="PGM 文件")
    parser.set_defaults(handler=run)


def relative_gap(trap: float, direct: float) -> float:
    if trap == direct:
        return 0.0
    if direct == 0:
        return math.inf
    return abs(trap - direct) / abs(direct)


def run(cfg: Settings, args: argparse.Namespace) -> int:
    try:
        img = read_image(args.image)
        trap = raw_moments_trap(img)
        direct = raw_moments_sum(img)
    except OPERATIONAL_ERRORS as e:
        return report(args.image, e)

    gap = 0.0
    for p, q in ORDERS:
        t, s = trap.m[(p, q)], direct.m[(p, q)]
        gap = max(gap, relative_gap(t, s))
        print(f"{p}\t{q}\t{t:.6f}\t{s:.6f}")
    print(f"max_rel_gap\t{gap:.3e}")
    return 0
