# app/services/index_service.py
"""特征索引库：增删记录与 CBIRIDX 1 文本格式的读写"""
import math
import os
import tempfile
from pathlib import Path
from typing import List, Union

from pydantic import ValidationError

from app.config import Settings, settings
from app.core.exceptions import BadMagic, DuplicateId, MalformedRecord, RecordNotFound
from app.models.schemas import INDEX_VERSION, FeatureVector, IndexDb, IndexRecord
from app.utils.logger import logger

MAGIC = f"CBIRIDX {INDEX_VERSION}"
FIELD_COUNT = 10


def _fmt(value: float) -> str:
    # 17 位有效数字保证 64 位浮点往返无损
    return format(value, ".17g")


# ========== 记录增删 ==========

def db_add(db: IndexDb, rec: IndexRecord) -> IndexDb:
    """追加一条记录，返回新的索引库"""
    if rec.id in db.ids():
        raise DuplicateId(f"记录 id 已存在: {rec.id}")
    return IndexDb(version=db.version, records=db.records + (rec,))


def db_remove(db: IndexDb, record_id: str) -> IndexDb:
    """删除指定 id 的记录，其余记录顺序不变"""
    if record_id not in db.ids():
        raise RecordNotFound(f"记录不存在: {record_id}")
    return IndexDb(version=db.version, records=tuple(r for r in db.records if r.id != record_id))


# ========== 序列化 ==========

def db_save(db: IndexDb) -> bytes:
    lines = [MAGIC]
    for rec in db.records:
        fields = [rec.id, rec.source, _fmt(rec.entropy), *(_fmt(v) for v in rec.phi)]
        lines.append("\t".join(fields))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _parse_real(text: str, line_no: int, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedRecord(line_no, f"{name} 不是数字: {text!r}")
    if not math.isfinite(value):
        raise MalformedRecord(line_no, f"{name} 不是有限数: {text!r}")
    return value


def db_load(data: bytes) -> IndexDb:
    """解析 CBIRIDX 1 文件；行号从 1 开始，文件头为第 1 行"""
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    if not lines or lines[0].rstrip(b"\r") != MAGIC.encode("ascii"):
        head = lines[0][:32] if lines else b""
        raise BadMagic(f"文件头应为 {MAGIC!r}，实际 {head!r}")

    records: List[IndexRecord] = []
    seen = set()
    for line_no, raw in enumerate(lines[1:], start=2):
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedRecord(line_no, "不是合法的 UTF-8")

        fields = line.split("\t")
        if len(fields) != FIELD_COUNT:
            raise MalformedRecord(line_no, f"应有 {FIELD_COUNT} 个字段，实际 {len(fields)} 个")

        record_id, source = fields[0], fields[1]
        entropy = _parse_real(fields[2], line_no, "entropy")
        phi = tuple(_parse_real(text, line_no, f"phi{i}") for i, text in enumerate(fields[3:], start=1))

        if record_id in seen:
            raise MalformedRecord(line_no, f"记录 id 重复: {record_id}")
        try:
            rec = IndexRecord(id=record_id, source=source, entropy=entropy, phi=phi)
        except ValidationError as e:
            raise MalformedRecord(line_no, f"记录无效: {e.errors()[0]['msg']}")
        seen.add(record_id)
        records.append(rec)

    return IndexDb(records=tuple(records))


class IndexService:
    """索引文件服务：读写磁盘上的索引库"""

    def __init__(self, db_path: Union[str, Path] = "./cbir_index.txt"):
        self.db_path = Path(db_path)

    @classmethod
    def from_settings(cls, cfg: Settings) -> "IndexService":
        return cls(db_path=cfg.DB_PATH)

    def load(self, missing_ok: bool = False) -> IndexDb:
        """读取索引文件；missing_ok 时文件不存在视为空库"""
        if not self.db_path.exists():
            if missing_ok:
                logger.info(f"索引文件 {self.db_path} 不存在，使用空库")
                return IndexDb()
            raise FileNotFoundError(f"索引文件不存在: {self.db_path}")
        db = db_load(self.db_path.read_bytes())
        logger.debug(f"已加载索引 {self.db_path}，共 {len(db)} 条记录")
        return db

    def save(self, db: IndexDb) -> None:
        """原子写入：先写同目录临时文件，再替换目标"""
        data = db_save(db)
        directory = self.db_path.parent
        directory.mkdir(parents=True, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(prefix=f".{self.db_path.name}.", dir=directory)
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp_path, self.db_path)
        except Exception:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)
            raise
        logger.info(f"已保存索引 {self.db_path}，共 {len(db)} 条记录")

    def add_features(self, db: IndexDb, record_id: str, source: str, features: FeatureVector) -> IndexDb:
        return db_add(db, IndexRecord.from_features(record_id, source, features))


# 单例模式
index_service = IndexService.from_settings(settings)
