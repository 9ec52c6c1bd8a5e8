"""PGM 编解码测试"""
import numpy as np
import pytest

from app.core.exceptions import MalformedImage, UnsupportedFormat
from app.models.image import GrayImage
from app.utils.pgm import decode_pgm, encode_pgm, read_image, write_image


def test_decode_ascii():
    """P2 文本按行优先读出"""
    img = decode_pgm(b"P2\n2 2\n255\n0 255 255 0")
    assert (img.width, img.height) == (2, 2)
    assert img.flat() == [0, 255, 255, 0]


def test_decode_binary():
    img = decode_pgm(b"P5\n1 1\n255\n" + bytes([0x80]))
    assert img.flat() == [128]


def test_decode_comments_in_header():
    """头部允许 # 注释"""
    img = decode_pgm(b"P2\n# made by hand\n3 1\n# max\n255\n1 2 3\n")
    assert img.flat() == [1, 2, 3]


def test_unsupported_magic():
    with pytest.raises(UnsupportedFormat):
        decode_pgm(b"P3\n1 1\n255\n0 0 0")


@pytest.mark.parametrize("data", [
    b"P2\n2 2\n255\n0 1 2",
    b"P2\n2 2\n255\n0 1 2 3 4",
    b"P5\n2 2\n255\n\x00\x01\x02",
    b"P2\n0 2\n255\n",
    b"P2\n2 1\n0\n0 0",
    b"P2\n2 1\n100\n0 101",
    b"P2\n2 1\n255\n0 -1",
    b"P5\n1 1\n255",
])
def test_malformed(data):
    """截断、多余样本、非法尺寸与超出 maxval 都抛 MalformedImage"""
    with pytest.raises(MalformedImage):
        decode_pgm(data)


def test_rescale_maxval():
    """maxval != 255 时按四舍五入缩放"""
    img = decode_pgm(b"P2\n4 1\n15\n0 1 8 15")
    # 1*255/15 = 17, 8*255/15 = 136
    assert img.flat() == [0, 17, 136, 255]


def test_sixteen_bit_binary():
    payload = np.array([0, 65535, 32768], dtype=">u2").tobytes()
    img = decode_pgm(b"P5\n3 1\n65535\n" + payload)
    assert img.flat() == [0, 255, 128]


def test_encode_binary_exact_bytes():
    assert encode_pgm(GrayImage.from_rows([[7]]), binary=True) == b"P5\n1 1\n255\n\x07"


def test_encode_ascii_tokens():
    data = encode_pgm(GrayImage.from_rows([[0, 255]]), binary=False)
    assert data.split() == [b"P2", b"2", b"1", b"255", b"0", b"255"]


@pytest.mark.parametrize("binary", [True, False])
def test_file_round_trip(tmp_path, binary):
    rng = np.random.default_rng(7)
    img = GrayImage(rng.integers(0, 256, size=(5, 9)))
    path = tmp_path / "x.pgm"
    write_image(path, img, binary=binary)
    assert read_image(path) == img


@pytest.mark.parametrize("binary", [True, False])
def test_random_round_trip(binary):
    """随机尺寸与内容的编码再解码保持逐像素一致"""
    rng = np.random.default_rng(11)
    for _ in range(50):
        h, w = rng.integers(1, 40, size=2)
        img = GrayImage(rng.integers(0, 256, size=(h, w)))
        assert decode_pgm(encode_pgm(img, binary=binary)) == img


def test_from_flat_row_major():
    img = GrayImage.from_flat(3, 2, [1, 2, 3, 4, 5, 6])
    assert img.pixels.tolist() == [[1, 2, 3], [4, 5, 6]]
    with pytest.raises(ValueError):
        GrayImage.from_flat(3, 2, [1, 2, 3])


def test_gray_image_rejects_fractional_values():
    """浮点像素必须是整数值，不做截断"""
    with pytest.raises(ValueError):
        GrayImage(np.array([[0.7]]))
    with pytest.raises(ValueError):
        GrayImage(np.array([[1.0, 254.5]]))
    assert GrayImage(np.full((2, 2), 3.0)).flat() == [3, 3, 3, 3]
