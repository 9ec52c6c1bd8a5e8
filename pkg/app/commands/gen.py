# app/commands/gen.py
"""渲染合成图形或变换已有图像，变换按命令行给出的顺序依次执行"""
import argparse
import sys
from typing import List, Optional, Tuple

from app.commands.common import OPERATIONAL_ERRORS, config_parser, report
from app.config import Settings
from app.models.image import GrayImage
from app.models.schemas import ShapeSpec
from app.services import synth_service
from app.utils.pgm import read_image, write_image


class TransformAction(argparse.Action):
    """把 --rotate/--scale/--translate/--mirror 按出现顺序收集到 transforms"""

    def __call__(self, parser, namespace, values, option_string=None):
        transforms = list(getattr(namespace, "transforms", None) or [])
        transforms.append((self.dest, values))
        setattr(namespace, "transforms", transforms)


def _pair(text: str) -> Tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"需要 x,y 形式，实际 {text!r}")
    return float(parts[0]), float(parts[1])


def _vertices(text: str) -> Tuple[Tuple[float, float], ...]:
    values = [float(v) for v in text.split(",")]
    if len(values) != 6:
        raise argparse.ArgumentTypeError(f"三角形需要 6 个坐标，实际 {len(values)} 个")
    return tuple(zip(values[0::2], values[1::2]))


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "gen", parents=[config_parser()], help="生成合成图形 PGM",
    )
    parser.add_argument("kind", nargs="?", choices=["disk", "rect", "triangle", "annulus"], help="图形种类")
    parser.add_argument("-o", "--out", required=True, help="输出 PGM 路径")
    parser.add_argument("--input", help="变换已有 PGM，而不是渲染图形")
    parser.add_argument("--ascii", action="store_true", help="输出 P2 文本格式")

    shape = parser.add_argument_group("图形")
    shape.add_argument("--width", type=int, default=256)
    shape.add_argument("--height", type=int, default=256)
    shape.add_argument("--cx", type=float)
    shape.add_argument("--cy", type=float)
    shape.add_argument("--radius", type=float)
    shape.add_argument("--inner-radius", dest="inner_radius", type=float)
    shape.add_argument("--rect-w", dest="rect_w", type=int)
    shape.add_argument("--rect-h", dest="rect_h", type=int)
    shape.add_argument("--vertices", type=_vertices, help="x1,y1,x2,y2,x3,y3")
    shape.add_argument("--fg", type=int, default=255)
    shape.add_argument("--shading", choices=["flat", "sweep"], default="flat")
    shape.add_argument("--fg-lo", dest="fg_lo", type=int, default=1)
    shape.add_argument("--phase", type=float, default=0.0)
    shape.add_argument("--sweep-offset", dest="sweep_offset", type=_pair, default=(0.0, 0.0), help="dx,dy")

    transform = parser.add_argument_group("变换")
    transform.add_argument("--rotate", type=float, action=TransformAction, help="旋转角度（度）")
    transform.add_argument("--scale", type=float, action=TransformAction, help="缩放因子")
    transform.add_argument("--translate", type=int, nargs=2, metavar=("DX", "DY"), action=TransformAction)
    transform.add_argument("--mirror", choices=["horizontal", "vertical"], action=TransformAction)
    transform.add_argument("--bilinear", action="store_true", help="90° 的整数倍也走插值路径")

    parser.set_defaults(handler=run, transforms=None)


def _shape_spec(args: argparse.Namespace) -> ShapeSpec:
    fields = {
        name: getattr(args, name)
        for name in ("cx", "cy", "radius", "inner_radius", "rect_w", "rect_h", "vertices")
        if getattr(args, name) is not None
    }
    return ShapeSpec(
        kind=args.kind, width=args.width, height=args.height, fg=args.fg, shading=args.shading,
        fg_lo=args.fg_lo, phase=args.phase, sweep_offset=args.sweep_offset, **fields,
    )


def apply_transforms(img: GrayImage, transforms: Optional[List[Tuple[str, object]]], exact: bool = True) -> GrayImage:
    for name, value in transforms or []:
        if name == "rotate":
            img = synth_service.rotate(img, value, exact=exact)
        elif name == "scale":
            img = synth_service.scale(img, value)
        elif name == "translate":
            img = synth_service.translate(img, *value)
        elif name == "mirror":
            img = synth_service.mirror(img, value)
    return img


def run(cfg: Settings, args: argparse.Namespace) -> int:
    if (args.kind is None) == (args.input is None):
        print("error: 必须且只能给出图形种类或 --input 之一", file=sys.stderr)
        return 2

    try:
        img = read_image(args.input) if args.input else synth_service.render(_shape_spec(args))
        img = apply_transforms(img, args.transforms, exact=not args.bilinear)
        write_image(args.out, img, binary=not args.ascii)
    except OPERATIONAL_ERRORS as e:
        return report(args.input or args.out, e)

    print(f"{args.out}\t{img.width}\t{img.height}")
    return 0
