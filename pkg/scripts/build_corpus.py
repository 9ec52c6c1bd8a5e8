"""生成 50 个合成图形的 PGM 语料并建立索引"""
import sys
sys.path.append('.')

from pathlib import Path
from typing import Optional

from tqdm import tqdm

from app.models.schemas import IndexDb
from app.services.feature_service import feature_service
from app.services.index_service import IndexService, index_service
from app.services.segment_service import segment_service
from app.services.synth_service import corpus, render
from app.utils.logger import logger
from app.utils.pgm import write_image


def build_corpus(out_dir: str, db_path: Optional[str] = None) -> IndexDb:
    """渲染语料到 out_dir，每张图取最大区域写入索引，id 为图形名

    未给出 db_path 时写入配置中的 CBIR_DB_PATH。
    """
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    store = IndexService(db_path) if db_path else index_service

    db = IndexDb()
    for name, spec in tqdm(corpus(), desc="生成语料"):
        img = render(spec)
        path = directory / f"{name}.pgm"
        write_image(path, img)

        sub = segment_service.largest_subimage(img)
        if sub is None:
            logger.warning(f"{name} 没有区域，跳过")
            continue
        db = store.add_features(db, name, str(path), feature_service.extract(sub))

    store.save(db)
    logger.info(f"语料共 {len(db)} 张，索引写入 {store.db_path}")
    return db


if __name__ == "__main__":
    if len(sys.argv) < 2:
        print("使用方法: python scripts/build_corpus.py <输出目录> [索引文件]")
        print("示例: python scripts/build_corpus.py ./corpus ./corpus/index.txt")
        sys.exit(1)

    build_corpus(sys.argv[1], sys.argv[2] if len(sys.argv) > 2 else None)
