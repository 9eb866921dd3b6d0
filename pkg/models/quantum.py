#!/usr/bin/env python3
"""
Modelos Pydantic para estados de dos qubits y sus correlaciones
"""

from enum import IntEnum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

# S3 y B son raíces: un redondeo de 1e-15 bajo la raíz da ~3e-8
HIERARCHY_BAND = 1e-6

class ClassLabel(IntEnum):
    """Clases mutuamente excluyentes, de menor a mayor correlación"""
    SEP = 0
    ENT = 1
    FEF = 2
    STEER = 3
    BELL = 4

    @property
    def short_name(self) -> str:
        return CLASS_NAMES[self.value]

CLASS_NAMES = ("sep", "ent", "FEF", "steer", "Bell")
N_CLASSES = len(CLASS_NAMES)

class StateSeed(BaseModel):
    """Semilla de un stream de estados aleatorios"""
    seed: int = Field(..., ge=0, lt=2 ** 64, description="Semilla del generador")
    stream_index: int = Field(0, ge=0, lt=2 ** 64, description="Índice de stream (generación paralela)")

class QuantRecord(BaseModel):
    """Las cuatro cantidades analíticas de un estado y su clase"""
    negativity: float = Field(..., ge=0.0, le=1.0 + 1e-9, description="Negatividad N")
    fef_witness: float = Field(..., ge=0.0, le=1.0 + 1e-9, description="Testigo de FEF")
    steering: float = Field(..., ge=0.0, le=1.0 + 1e-9, description="Steering S3 de 3 medidas")
    bell: float = Field(..., ge=0.0, le=2 ** 0.5 + 1e-9, description="No-localidad de Bell B")
    label: Optional[ClassLabel] = Field(None, description="Clase asignada (None antes de classify)")

    @model_validator(mode='after')
    def validate_hierarchy(self):
        # B > 0 ⇒ S3 > 0 ⇒ FEF_w > 0 ⇒ N > 0, fuera de la banda de redondeo
        chain = (self.bell, self.steering, self.fef_witness, self.negativity)
        for stronger, weaker in zip(chain, chain[1:]):
            if stronger > HIERARCHY_BAND and weaker <= 0.0:
                raise ValueError(f"Jerarquía violada: {chain}")
        return self
