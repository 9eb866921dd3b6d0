#!/usr/bin/env python3
"""
Modelos Pydantic para registros y cabeceras de dataset
"""

from typing import Dict, List

from pydantic import BaseModel, Field, model_validator

from models.features import N_FEATURES
from models.quantum import CLASS_NAMES, N_CLASSES, ClassLabel

DATASET_MAGIC = b"QCORRDS1"
DATASET_VERSION = 1

class SampleRecord(BaseModel):
    """Un estado etiquetado: features, cantidades analíticas y clase"""
    features: List[float] = Field(..., min_length=N_FEATURES, max_length=N_FEATURES)
    quantities: List[float] = Field(..., min_length=4, max_length=4, description="N, FEF_w, S3, B")
    label: ClassLabel

    @model_validator(mode='after')
    def validate_features(self):
        if any(abs(p) > 1.0 for p in self.features):
            raise ValueError("|p| > 1 en features")
        return self

class DatasetHeader(BaseModel):
    """Cabecera del archivo binario de dataset"""
    magic: bytes = Field(DATASET_MAGIC, min_length=8, max_length=8)
    version: int = Field(DATASET_VERSION, ge=0, lt=2 ** 32)
    record_count: int = Field(..., ge=0, lt=2 ** 64)
    class_counts: List[int] = Field(..., min_length=N_CLASSES, max_length=N_CLASSES)
    generator_seed: int = Field(0, ge=0, lt=2 ** 64)
    stream_index: int = Field(0, ge=0, lt=2 ** 64)

    @model_validator(mode='after')
    def validate_counts(self):
        if any(c < 0 for c in self.class_counts):
            raise ValueError("class_counts negativos")
        if sum(self.class_counts) != self.record_count:
            raise ValueError(
                f"Σ class_counts ({sum(self.class_counts)}) ≠ record_count ({self.record_count})"
            )
        return self

    def histogram(self) -> Dict[str, int]:
        return dict(zip(CLASS_NAMES, self.class_counts))

class DatasetSummary(BaseModel):
    """Resumen de poblaciones de un dataset crudo"""
    path: str
    record_count: int
    class_counts: Dict[str, int]
    least_populated: str
    equalized_size: int = Field(..., description="5 × población mínima")
    equalized_ratio: float = Field(..., description="equalized_size / record_count")
