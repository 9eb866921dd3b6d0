#!/usr/bin/env python3
"""
Modelos Pydantic para el barrido de reducción de features y el selftest
"""

from typing import List, Optional

from pydantic import BaseModel, Field

from models.quantum import N_CLASSES

class SweepEntry(BaseModel):
    """Resultado de un n del barrido"""
    n: int = Field(..., ge=0, le=10, description="Features retenidas (0 = línea base de azar)")
    retained: List[str] = Field(default_factory=list)
    accuracy: float = Field(..., ge=0.0, le=1.0)
    accuracy_std: Optional[float] = None
    relaxed_accuracy: float = Field(..., ge=0.0, le=1.0)
    relaxed_accuracy_std: Optional[float] = None
    val_accuracy: Optional[float] = Field(None, description="Exactitud de validación del mejor modelo")
    macro_f1: float = Field(..., ge=0.0, le=1.0)
    f1: List[float] = Field(..., min_length=N_CLASSES, max_length=N_CLASSES)
    f1_std: Optional[List[float]] = None
    best_epoch: Optional[int] = None
    never_predicted: List[str] = Field(default_factory=list)

class SweepReport(BaseModel):
    """Barrido completo n = 10..1 para una estrategia de reducción"""
    strategy: str
    dataset: str
    subsets: int = Field(..., ge=1)
    entries: List[SweepEntry] = Field(default_factory=list)

    def entry(self, n: int) -> Optional[SweepEntry]:
        for e in self.entries:
            if e.n == n:
                return e
        return None

class CheckResult(BaseModel):
    """Resultado de una verificación del selftest"""
    name: str
    passed: bool
    value: Optional[float] = Field(None, description="Métrica observada (error máximo, conteo...)")
    threshold: Optional[float] = None
    detail: str = ""
