import math
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Classe para carregar as configurações do ambiente."""

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", env_prefix="QSUMM_", extra="ignore"
    )

    # Formulação do problema
    DEFAULT_LAMBDA: float = 0.075
    IDF_N: Literal["words", "sentences"] = "words"

    # Amostragem
    SHOTS: int = 2000
    GRID_SHOTS: int = 1000

    # Busca em grade do QAOA
    GRID_POINTS: int = 50
    GRID_GAMMA_MAX: float = math.pi
    GRID_BETA_MAX: float = math.pi
    ICP_THRESHOLD: float = 0.06

    # Multistart (COBYLA)
    LVQE_STARTS_14: int = 20
    LVQE_STARTS_20: int = 5
    XY_QAOA_STARTS: int = 10
    BUDGET_PER_START: int = 400

    # Modelo de ruído sintético (taxas típicas do H1-1)
    NOISE_P1: float = 5e-5
    NOISE_P2: float = 3e-3
    NOISE_PSPAM: float = 3e-3

    # Limites de simulação
    MAX_QUBITS: int = 24
    BRUTE_FORCE_MAX_QUBITS: int = 24
    MIXER_TOPOLOGY: Literal["path", "ring"] = "path"

    WORKERS: int = 1
    LOG_LEVEL: str = "INFO"
    SCHEMA_VERSION: str = "1.0"


settings = Settings()
