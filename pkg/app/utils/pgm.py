"""PGM (P2/P5) 编解码

解码结果要么是完整合法的 GrayImage，要么抛出类型化异常，不会返回残缺图像。
"""
import re
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from app.core.exceptions import MalformedImage, UnsupportedFormat
from app.models.image import GrayImage

_WHITESPACE = b" \t\n\r\v\f"
_TOKEN = re.compile(rb"[^\s#]+")


def _skip_space_and_comments(data: bytes, pos: int) -> int:
    """跳过空白与 # 注释"""
    while pos < len(data):
        ch = data[pos:pos + 1]
        if ch in (b" ", b"\t", b"\n", b"\r", b"\v", b"\f"):
            pos += 1
        elif ch == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        else:
            break
    return pos


def _read_header_int(data: bytes, pos: int, name: str) -> Tuple[int, int]:
    pos = _skip_space_and_comments(data, pos)
    match = _TOKEN.match(data, pos)
    if match is None:
        raise MalformedImage(f"头部缺少 {name}")
    token = match.group()
    if not token.isdigit():
        raise MalformedImage(f"头部 {name} 不是整数: {token[:16]!r}")
    return int(token), match.end()


def _rescale(values: np.ndarray, maxval: int) -> np.ndarray:
    """maxval != 255 时按 round-half-up 缩放到 [0, 255]"""
    if maxval == 255:
        return values
    v = values.astype(np.int64)
    return (v * 255 * 2 + maxval) // (2 * maxval)


def decode_pgm(data: bytes) -> GrayImage:
    """解码 P2/P5 字节流"""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedFormat(f"不支持的格式标识: {magic!r}")

    pos = 2
    if pos < len(data) and data[pos:pos + 1] not in _WHITESPACE and data[pos:pos + 1] != b"#":
        raise MalformedImage("格式标识后缺少分隔符")

    width, pos = _read_header_int(data, pos, "width")
    height, pos = _read_header_int(data, pos, "height")
    maxval, pos = _read_header_int(data, pos, "maxval")

    if width <= 0 or height <= 0:
        raise MalformedImage(f"非法尺寸 {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise MalformedImage(f"非法 maxval {maxval}")

    count = width * height
    if magic == b"P5":
        if pos >= len(data) or data[pos:pos + 1] not in _WHITESPACE:
            raise MalformedImage("头部之后缺少分隔空白")
        pos += 1
        sample_bytes = 1 if maxval <= 255 else 2
        payload = data[pos:pos + count * sample_bytes]
        if len(payload) < count * sample_bytes:
            raise MalformedImage(f"像素数据被截断: 需要 {count * sample_bytes} 字节，实际 {len(payload)}")
        dtype = np.uint8 if sample_bytes == 1 else np.dtype(">u2")
        values = np.frombuffer(payload, dtype=dtype).astype(np.int64)
    else:
        tokens = data[pos:].split()
        if len(tokens) < count:
            raise MalformedImage(f"像素数据被截断: 需要 {count} 个样本，实际 {len(tokens)}")
        if len(tokens) > count:
            raise MalformedImage(f"像素数据多出 {len(tokens) - count} 个样本")
        if not all(t.isdigit() for t in tokens):
            raise MalformedImage("P2 样本必须是非负整数")
        values = np.array([int(t) for t in tokens], dtype=np.int64)

    if values.size and int(values.max()) > maxval:
        raise MalformedImage(f"样本值 {int(values.max())} 超过 maxval {maxval}")

    return GrayImage.from_flat(width, height, _rescale(values, maxval))


def encode_pgm(img: GrayImage, binary: bool = True) -> bytes:
    """编码为 P5（binary=True）或 P2，maxval 固定为 255"""
    if binary:
        header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
        return header + img.pixels.tobytes()

    lines: List[str] = ["P2", f"{img.width} {img.height}", "255"]
    for row in img.pixels.tolist():
        lines.append(" ".join(str(v) for v in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def read_image(path: Union[str, Path]) -> GrayImage:
    """读取 PGM 文件"""
    return decode_pgm(Path(path).read_bytes())


def write_image(path: Union[str, Path], img: GrayImage, binary: bool = True) -> None:
    """写出 PGM 文件"""
    Path(path).write_bytes(encode_pgm(img, binary))
