#!/usr/bin/env python3
"""
Modelos Pydantic para el entrenamiento del clasificador
"""

from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

class TrainConfig(BaseModel):
    """Hiperparámetros de entrenamiento"""
    learning_rate: float = Field(1e-4, gt=0.0, description="Tasa de aprendizaje de Adam")
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(1e-8, gt=0.0)
    batch_phase1: int = Field(4096, ge=2, description="Mini-batch de la fase 1")
    batch_phase2: int = Field(2 ** 18, ge=2, description="Mini-batch de afinado (se limita al train set)")
    max_epochs: int = Field(4096, ge=1, description="Épocas máximas sumando ambas fases")
    patience: int = Field(10, ge=1, description="Épocas sin mejora en validación antes de parar")
    hidden_width: int = Field(512, ge=1, description="Nodos por capa oculta")
    bn_input: bool = Field(True, description="Batch-norm también antes de la primera capa")
    bn_eps: float = Field(1e-5, gt=0.0)
    bn_momentum: float = Field(0.1, gt=0.0, le=1.0)
    seed: int = Field(0, ge=0)

    @model_validator(mode='after')
    def validate_batches(self):
        if self.batch_phase2 < self.batch_phase1:
            raise ValueError("batch_phase2 debe ser ≥ batch_phase1")
        return self

    def check_train_size(self, train_size: int) -> None:
        """Precondición: el batch de la fase 1 cabe en el train set"""
        if self.batch_phase1 > train_size:
            raise ValueError(
                f"batch_phase1={self.batch_phase1} mayor que el train set ({train_size})"
            )

class EpochRecord(BaseModel):
    """Una fila del historial de entrenamiento"""
    epoch: int = Field(..., ge=1)
    phase: int = Field(..., ge=1, le=2)
    batch_size: int = Field(..., ge=1)
    train_loss: float
    val_loss: float
    val_acc: float = Field(..., ge=0.0, le=1.0)

class TrainHistory(BaseModel):
    """Historial completo y época del mejor modelo"""
    epochs: List[EpochRecord] = Field(default_factory=list)
    best_epoch: Optional[int] = None
    best_val_loss: Optional[float] = None
    stopped_early: bool = False

    @property
    def best_val_acc(self) -> Optional[float]:
        for record in self.epochs:
            if record.epoch == self.best_epoch:
                return record.val_acc
        return None

class EvaluationResult(BaseModel):
    """Pérdida y exactitud de un modelo sobre un conjunto etiquetado"""
    loss: float = Field(..., ge=0.0, description="Entropía cruzada media")
    accuracy: float = Field(..., ge=0.0, le=1.0)
    count: int = Field(..., ge=0)
