#!/usr/bin/env python3
"""
Modelos Pydantic para matrices de confusión y reportes de métricas
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.quantum import N_CLASSES

class ConfusionMatrix(BaseModel):
    """Conteos (clase verdadera c, clase predicha c′)"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    counts: np.ndarray = Field(..., description="5×5 enteros no negativos, filas = verdadera")

    @model_validator(mode='after')
    def validate_counts(self):
        counts = np.asarray(self.counts)
        if counts.shape != (N_CLASSES, N_CLASSES):
            raise ValueError(f"Forma inválida: {counts.shape}")
        if (counts < 0).any():
            raise ValueError("Conteos negativos")
        self.counts = counts.astype(np.int64)
        return self

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(counts=self.counts + other.counts)

class ScoreReport(BaseModel):
    """Recall, precisión, F1 por clase y exactitudes global y relajada"""
    recall: List[float] = Field(..., min_length=N_CLASSES, max_length=N_CLASSES)
    precision: List[float] = Field(..., min_length=N_CLASSES, max_length=N_CLASSES)
    f1: List[float] = Field(..., min_length=N_CLASSES, max_length=N_CLASSES)
    accuracy: float = Field(..., ge=0.0, le=1.0)
    relaxed_accuracy: float = Field(..., ge=0.0, le=1.0, description="sep/ent fusionadas")
    macro_recall: float = Field(..., ge=0.0, le=1.0)
    macro_precision: float = Field(..., ge=0.0, le=1.0)
    macro_f1: float = Field(..., ge=0.0, le=1.0)
    error_rate: float = Field(..., ge=0.0, le=1.0, description="Fracción fuera de la diagonal")
    relaxed_error_rate: float = Field(..., ge=0.0, le=1.0)
    empty_rows: List[int] = Field(default_factory=list, description="Clases sin estados verdaderos")
    empty_columns: List[int] = Field(default_factory=list, description="Clases nunca predichas")

    # Incertidumbres (solo con subset_scores y k ≥ 2)
    subsets: int = Field(1, ge=1)
    recall_std: Optional[List[float]] = None
    precision_std: Optional[List[float]] = None
    f1_std: Optional[List[float]] = None
    accuracy_std: Optional[float] = None
    relaxed_accuracy_std: Optional[float] = None
    cm_mean: Optional[List[List[float]]] = None
    cm_std: Optional[List[List[float]]] = None

    @model_validator(mode='after')
    def validate_ranges(self):
        for name in ("recall", "precision", "f1"):
            values = getattr(self, name)
            if any(not 0.0 <= v <= 1.0 for v in values):
                raise ValueError(f"{name} fuera de [0, 1]")
        return self
