"""命令行测试"""
import numpy as np
import pytest

from app.models.image import GrayImage
from app.services.index_service import db_load
from app.utils.pgm import read_image, write_image


def test_index_then_query(tmp_path, run_cli, blobs_pgm):
    db = tmp_path / "index.txt"
    code, out, _ = run_cli("index", "--db", db, blobs_pgm)
    assert code == 0
    lines = out.splitlines()
    assert [line.split("\t")[0] for line in lines] == ["blobs.pgm#0", "blobs.pgm#1", "blobs.pgm#2"]
    assert len(db_load(db.read_bytes())) == 3

    code, out, _ = run_cli("query", "--db", db, blobs_pgm)
    assert code == 0
    first = out.splitlines()[0].split("\t")
    assert first[:3] == ["1", "blobs.pgm#2", "0.000000"]
    assert first[4] == str(blobs_pgm)


def test_reindex_is_rejected(tmp_path, run_cli, blobs_pgm):
    db = tmp_path / "index.txt"
    assert run_cli("index", "--db", db, blobs_pgm)[0] == 0
    before = db.read_bytes()
    code, out, err = run_cli("index", "--db", db, blobs_pgm)
    assert code == 1
    assert out == ""
    assert f"error: {blobs_pgm}:" in err
    assert db.read_bytes() == before


def test_index_black_image(tmp_path, run_cli):
    path = tmp_path / "black.pgm"
    write_image(path, GrayImage(np.zeros((8, 8))))
    db = tmp_path / "index.txt"
    code, out, _ = run_cli("index", "--db", db, path)
    assert code == 0 and out == ""
    assert db.read_bytes() == b"CBIRIDX 1\n"


def test_index_directory(tmp_path, run_cli, blobs_pgm):
    other = tmp_path / "a_disk.pgm"
    code, _, _ = run_cli("gen", "disk", "--width", 40, "--height", 40, "--radius", 12, "-o", other)
    assert code == 0
    (tmp_path / "notes.txt").write_text("ignored")
    db = tmp_path / "index.txt"
    code, out, _ = run_cli("index", "--db", db, tmp_path)
    assert code == 0
    ids = [line.split("\t")[0] for line in out.splitlines()]
    assert ids == ["a_disk.pgm#0", "blobs.pgm#0", "blobs.pgm#1", "blobs.pgm#2"]


def test_query_errors(tmp_path, run_cli, blobs_pgm):
    db = tmp_path / "index.txt"
    code, _, err = run_cli("query", "--db", db, blobs_pgm)
    assert code == 1 and "error:" in err

    db.write_bytes(b"CBIRIDX 1\n")
    assert run_cli("query", "--db", db, blobs_pgm)[:2] == (0, "")

    black = tmp_path / "black.pgm"
    write_image(black, GrayImage(np.zeros((6, 6))))
    assert run_cli("query", "--db", db, black)[0] == 1
    assert run_cli("query", "--db", db, tmp_path / "missing.pgm")[0] == 1


def test_features_command(tmp_path, run_cli):
    path = tmp_path / "disk.pgm"
    run_cli("gen", "disk", "--width", 256, "--height", 256, "--radius", 100, "-o", path)
    code, out, _ = run_cli("features", path)
    assert code == 0
    fields = out.strip().split("\t")
    assert len(fields) == 3 + 7 + 7
    assert fields[2] == "0.000000"
    assert float(fields[3]) == pytest.approx(0.1592, abs=5e-4)
    assert run_cli("features", tmp_path / "nope.pgm")[0] == 1


def test_oracle_command(tmp_path, run_cli):
    path = tmp_path / "ones.pgm"
    write_image(path, GrayImage(np.pad(np.ones((3, 3)), 1)))
    code, out, _ = run_cli("oracle", path)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 11
    assert lines[0] == "0\t0\t9.000000\t9.000000"
    assert lines[-1] == "max_rel_gap\t0.000e+00"

    thin = tmp_path / "thin.pgm"
    write_image(thin, GrayImage(np.ones((5, 1))))
    code, _, err = run_cli("oracle", thin)
    assert code == 1 and "2x2" in err


def test_gen_transforms(tmp_path, run_cli):
    base = ["gen", "rect", "--width", 50, "--height", 40, "--rect-w", 20, "--rect-h", 10,
            "--shading", "sweep", "--fg-lo", 5, "--phase", 30]
    twice, once = tmp_path / "twice.pgm", tmp_path / "once.pgm"
    code, out, _ = run_cli(*base, "--rotate", 90, "--rotate", 90, "-o", twice)
    assert code == 0
    assert out.strip() == f"{twice}\t50\t40"
    run_cli(*base, "--rotate", 180, "-o", once)
    assert twice.read_bytes() == once.read_bytes()

    text = tmp_path / "text.pgm"
    run_cli(*base, "--ascii", "--mirror", "vertical", "-o", text)
    assert text.read_bytes().startswith(b"P2")
    assert read_image(text) == GrayImage(np.flipud(read_image(tmp_path / "twice.pgm").pixels[::-1, ::-1]))


def test_gen_order_matters(tmp_path, run_cli):
    base = ["gen", "disk", "--width", 40, "--height", 40, "--radius", 8]
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    run_cli(*base, "--translate", 5, 0, "--scale", 2, "-o", a)
    run_cli(*base, "--scale", 2, "--translate", 5, 0, "-o", b)
    assert read_image(a) != read_image(b)


def test_gen_from_input(tmp_path, run_cli, blobs_pgm):
    out = tmp_path / "mirrored.pgm"
    assert run_cli("gen", "--input", blobs_pgm, "--mirror", "horizontal", "-o", out)[0] == 0
    assert read_image(out) == GrayImage(np.fliplr(read_image(blobs_pgm).pixels))


def test_gen_errors(tmp_path, run_cli):
    out = tmp_path / "x.pgm"
    assert run_cli("gen", "disk", "--width", 20, "--height", 20, "--radius", 9, "-o", out)[0] == 1
    assert run_cli("gen", "disk", "--width", 20, "--height", 20, "-o", out)[0] == 1
    assert run_cli("gen", "-o", out)[0] == 2
    assert not out.exists()


def test_gen_non_finite_transform(tmp_path, run_cli):
    out = tmp_path / "x.pgm"
    base = ["gen", "disk", "--width", 40, "--height", 40, "--radius", 12]
    code, _, err = run_cli(*base, "--scale", "inf", "-o", out)
    assert code == 1 and err.startswith("error:")
    assert run_cli(*base, "--rotate", "nan", "-o", out)[0] == 1
    assert not out.exists()


def test_remove_command(tmp_path, run_cli, blobs_pgm):
    db = tmp_path / "index.txt"
    run_cli("index", "--db", db, blobs_pgm)
    code, out, _ = run_cli("remove", "--db", db, "blobs.pgm#1")
    assert code == 0 and out == "blobs.pgm#1\n"
    assert db_load(db.read_bytes()).ids() == ("blobs.pgm#0", "blobs.pgm#2")

    before = db.read_bytes()
    assert run_cli("remove", "--db", db, "blobs.pgm#0", "blobs.pgm#1")[0] == 1
    assert db.read_bytes() == before


def test_usage_errors(tmp_path, run_cli, blobs_pgm):
    assert run_cli()[0] == 2
    assert run_cli("frobnicate")[0] == 2
    assert run_cli("query", "--connectivity", 6, blobs_pgm)[0] == 2
    assert run_cli("query", "--db", tmp_path / "i.txt", "--tau", -1, blobs_pgm)[0] == 2
    assert run_cli("index", "--db", tmp_path / "i.txt", "--min-area", 0, blobs_pgm)[0] == 2


def test_pipeline_is_deterministic(tmp_path, run_cli, blobs_pgm):
    outputs = []
    for run in range(2):
        db = tmp_path / f"index{run}.txt"
        run_cli("index", "--db", db, blobs_pgm)
        outputs.append((db.read_bytes(), run_cli("query", "--db", db, "--tau", "inf", blobs_pgm)[1]))
    assert outputs[0] == outputs[1]
