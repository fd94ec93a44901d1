from __future__ import annotations

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    # Logging goes to stderr; stdout only ever carries command output.
    log_level: str = Field(default="WARNING", alias="DMCERT_LOG_LEVEL")

    # Certificates: number of total degrees checked past the top fibre degree
    # is 2 * window.
    default_window: int = Field(default=8, alias="DMCERT_WINDOW")

    # E2 display bound is 2p + max_i_extra columns.
    default_max_i_extra: int = Field(default=4, alias="DMCERT_MAX_I_EXTRA")

    # Number of stabilized degrees compared by the Borel localization check.
    localization_window: int = Field(default=6, alias="DMCERT_LOCALIZATION_WINDOW")

    # Stable-tree enumeration blows up quickly (39208 trees at p=7).
    tree_max_p: int = Field(default=7, alias="DMCERT_TREE_MAX_P")

    def display_columns(self, p: int) -> int:
        """Default E2 display bound for the prime ``p``."""
        return 2 * p + self.default_max_i_extra


def get_settings() -> Settings:
    return Settings()  # type: ignore[call-arg]
