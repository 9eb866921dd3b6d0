#!/usr/bin/env python3
"""
Configuración global del pipeline de clasificación de correlaciones cuánticas
"""

from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import TYPE_CHECKING, Literal, Optional, Tuple, Union

# Sin numpy aquí: main.py fija los hilos de BLAS antes de importarlo
if TYPE_CHECKING:
    from models.training import TrainConfig

class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file="pipeline.env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # App
    APP_TITLE: str = "Quantum Correlation Classifier"
    APP_VERSION: str = "1.0.0"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = "logs/qcorr.log"

    # Generación de estados
    SEED: int = 20240611
    STREAM_INDEX: int = 0
    SHARD_SIZE: int = 65536
    SMALL_RAW_COUNT: int = 1_000_000  # análogo del set 10M
    LARGE_RAW_COUNT: int = 5_000_000  # análogo del set 50M
    CLASSIFICATION_EPS: float = 1e-10
    STATE_MEASURE: Literal["spectral", "hs"] = "spectral"

    # Paralelismo
    THREADS: Union[int, str] = "auto"
    DETERMINISTIC: bool = False

    # Salidas
    OUTPUT_DIR: str = "runs"

    # Dataset
    SPLIT_RATIO: str = "12:3:1"

    # ANN
    LEARNING_RATE: float = 1e-4
    ADAM_BETA1: float = 0.9
    ADAM_BETA2: float = 0.999
    ADAM_EPS: float = 1e-8
    BATCH_PHASE1: int = 4096
    BATCH_PHASE2: int = 2 ** 18
    MAX_EPOCHS: int = 4096
    PATIENCE: int = 10
    HIDDEN_WIDTH: int = 512
    BN_INPUT: bool = True
    BN_EPS: float = 1e-5
    BN_MOMENTUM: float = 0.1

    # Evaluación
    EVAL_SUBSETS: int = 12
    PLAN: str = "paper"

    @property
    def split_ratio(self) -> Tuple[int, int, int]:
        """Proporción train:val:test como tupla de enteros"""
        parts = tuple(int(x) for x in self.SPLIT_RATIO.split(":"))
        if len(parts) != 3 or min(parts) < 1:
            raise ValueError(f"SPLIT_RATIO inválido: {self.SPLIT_RATIO}")
        return parts

    @property
    def threads(self) -> int:
        """Número de hilos efectivo (1 en modo determinista)"""
        if self.DETERMINISTIC:
            return 1
        from utils.cpu_detection import resolve_threads
        return resolve_threads(str(self.THREADS))

    def train_config(self, seed: Optional[int] = None) -> "TrainConfig":
        """Construir TrainConfig a partir de los valores resueltos"""
        from models.training import TrainConfig

        return TrainConfig(
            learning_rate=self.LEARNING_RATE,
            beta1=self.ADAM_BETA1,
            beta2=self.ADAM_BETA2,
            adam_eps=self.ADAM_EPS,
            batch_phase1=self.BATCH_PHASE1,
            batch_phase2=self.BATCH_PHASE2,
            max_epochs=self.MAX_EPOCHS,
            patience=self.PATIENCE,
            hidden_width=self.HIDDEN_WIDTH,
            bn_input=self.BN_INPUT,
            bn_eps=self.BN_EPS,
            bn_momentum=self.BN_MOMENTUM,
            seed=self.SEED if seed is None else seed,
        )

def load_settings(config_path: Optional[str] = None, **overrides) -> Settings:
    """
    Cargar Settings desde archivo key=value + entorno + overrides de CLI

    Los overrides con valor None se ignoran (flag no indicado).
    """
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if config_path is not None:
        return Settings(_env_file=config_path, **overrides)
    return Settings(**overrides)

# Crear instancia global
settings = Settings()
