"""
Configuration module for the QTradeoff toolkit.

This module uses `pydantic-settings` to load numerical tolerances and run
defaults from environment variables (prefixed with `QTRADEOFF_`) or a `.env`
file into a strongly-typed Settings class.

Environment variables (all optional):
- QTRADEOFF_TOLERANCE
- QTRADEOFF_PARALLEL_TOLERANCE
- QTRADEOFF_FRONTIER_TOLERANCE
- QTRADEOFF_SAMPLER_MAX_RETRIES
- QTRADEOFF_SWEEP_GRID_SIZE
- QTRADEOFF_SWEEP_RESTARTS
- QTRADEOFF_SWEEP_PENALTY
- QTRADEOFF_WORKERS
- QTRADEOFF_FLOAT_DIGITS
- QTRADEOFF_LOG_LEVEL
- QTRADEOFF_API_VERSION
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Toolkit configuration settings using Pydantic's BaseSettings.

    Every value here is a default; the operations that use them accept an
    explicit keyword argument that takes precedence.
    """

    TOLERANCE: float = 1e-12
    PARALLEL_TOLERANCE: float = 1e-9
    FRONTIER_TOLERANCE: float = 1e-9
    SAMPLER_MAX_RETRIES: int = 10_000
    SWEEP_GRID_SIZE: int = 41
    SWEEP_RESTARTS: int = 16
    SWEEP_PENALTY: float = 10.0
    WORKERS: int = 1
    FLOAT_DIGITS: int = 17
    LOG_LEVEL: str = "WARNING"
    API_VERSION: str = "v1"

    # Settings model config for environment loading
    model_config = SettingsConfigDict(
        env_file=".env",  # Load variables from a .env file
        env_prefix="QTRADEOFF_",
        extra="ignore",  # Ignore undefined extra variables in the env file
    )


# Instantiate the settings object to access configuration throughout the toolkit
Config = Settings()
