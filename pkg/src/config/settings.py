# Configuration settings for the workbench, read from the environment or .env

from functools import lru_cache
from typing import Optional, Tuple

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings with environment variable support"""

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Oracle defaults
    default_sigma: str = "a,b"
    oracle_max_len: int = 5
    oracle_workers: int = 1

    # Bounded searches
    search_max_len: int = 12

    # API Configuration
    api_host: str = "0.0.0.0"
    api_port: int = 8000
    api_reload: bool = False

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="WORKBENCH_",
        case_sensitive=False,
        extra="ignore",
    )

    @property
    def alphabet(self) -> Tuple[str, ...]:
        """Default alphabet as a tuple of letters"""
        return tuple(letter.strip() for letter in self.default_sigma.split(",") if letter.strip())


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()
