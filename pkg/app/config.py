from typing import Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """命令行与服务共用的配置（CliConfig）"""

    model_config = SettingsConfigDict(env_file=".env", env_prefix="CBIR_", extra="ignore")

    # 应用配置
    APP_NAME: str = "熵与矩不变量图像检索系统"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_FILE: str = ""

    # 索引文件
    DB_PATH: str = "./cbir_index.txt"

    # 分割配置
    THRESHOLD: int = Field(default=1, ge=0, le=255)
    CONNECTIVITY: Literal[4, 8] = 8
    MIN_AREA: int = Field(default=4, ge=1)
    MARGIN: int = Field(default=1, ge=0)

    # 特征配置
    ENTROPY_SCOPE: Literal["foreground", "whole"] = "foreground"
    WORKERS: int = Field(default=4, ge=1)

    # 检索配置
    TAU: float = Field(default=0.5, ge=0.0)  # 熵容差（bit），允许 inf
    TOP_K: int = Field(default=10, ge=1)
    MAX_DISTANCE: Optional[float] = Field(default=None, ge=0.0)


settings = Settings()
