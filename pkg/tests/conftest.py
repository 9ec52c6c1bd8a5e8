"""测试共用夹具"""
import numpy as np
import pytest

from app.models.image import GrayImage
from app.models.schemas import IndexDb, IndexRecord, ShapeSpec
from app.services.feature_service import extract_features
from app.services.index_service import db_add
from app.services.segment_service import SegmentService
from app.services.synth_service import corpus, render
from app.utils.pgm import write_image


def padded(rows, margin: int = 1) -> GrayImage:
    """给像素行加零边"""
    return GrayImage(np.pad(np.array(rows, dtype=np.int64), margin))


def largest_features(img: GrayImage):
    """与 query 命令一致：取最大区域子图的特征"""
    sub = SegmentService().largest_subimage(img)
    assert sub is not None
    return extract_features(sub)


@pytest.fixture(scope="session")
def corpus_images():
    return [(name, render(spec)) for name, spec in corpus()]


@pytest.fixture(scope="session")
def corpus_features(corpus_images):
    return {name: largest_features(img) for name, img in corpus_images}


@pytest.fixture(scope="session")
def corpus_db(corpus_features):
    db = IndexDb()
    for name, fv in corpus_features.items():
        db = db_add(db, IndexRecord.from_features(name, f"{name}.pgm", fv))
    return db


@pytest.fixture(scope="session")
def disk_image():
    """256x256 画布中心半径 100 的纯色圆盘"""
    return render(ShapeSpec(kind="disk", width=256, height=256, radius=100))


@pytest.fixture
def run_cli(capsys):
    """调用命令行入口，返回 (退出码, stdout, stderr)"""
    from app.main import main

    def _run(*argv):
        code = main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run


@pytest.fixture
def blobs_pgm(tmp_path):
    """含三个分离色块的 PGM"""
    pix = np.zeros((20, 30), dtype=np.uint8)
    pix[2:6, 2:6] = 200
    pix[2:8, 12:16] = np.arange(24, dtype=np.uint8).reshape(6, 4) * 10 + 10
    pix[12:17, 5:25] = 90
    path = tmp_path / "blobs.pgm"
    write_image(path, GrayImage(pix))
    return path
