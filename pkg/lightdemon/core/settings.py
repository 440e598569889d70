from pathlib import Path

from pydantic_settings import BaseSettings
from pydantic_settings import SettingsConfigDict


class Settings(BaseSettings):
    WORKERS: int = -1
    OUTPUT_DIR: Path = Path("runs")
    CACHE_DIR: Path = Path(".lightdemon-cache")
    model_config = SettingsConfigDict(env_file=".env", env_prefix="LIGHTDEMON_", env_file_encoding="utf-8")
