#!/usr/bin/env python3
"""
Modelos para medidas colectivas: base mínima, vector de features y plan de reducción
"""

from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

# Orden canónico de los 10 valores únicos p_ij (índices 0-based de Π)
FEATURE_PAIRS: Tuple[Tuple[int, int], ...] = (
    (0, 0), (1, 1), (2, 2), (3, 3),
    (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
)
FEATURE_NAMES: Tuple[str, ...] = tuple(f"p{i + 1}{j + 1}" for i, j in FEATURE_PAIRS)
N_FEATURES = len(FEATURE_PAIRS)

def feature_index(name: str) -> int:
    """Posición canónica de 'p14', 'p22', ..."""
    try:
        return FEATURE_NAMES.index(name)
    except ValueError:
        raise ValueError(f"Feature desconocida: {name}") from None

class MinimalBasis(BaseModel):
    """Proyectores de la base mínima (tetraedro) y la transformación M"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    projectors: np.ndarray = Field(..., description="Π_1..Π_4, forma (4, 2, 2) compleja")
    transform: np.ndarray = Field(..., description="M, Π_i = Σ_j M_ij σ_j")
    inverse_transform: np.ndarray = Field(..., description="M⁻¹ en forma cerrada")

    @model_validator(mode='after')
    def validate_basis(self):
        if self.projectors.shape != (4, 2, 2) or self.transform.shape != (4, 4):
            raise ValueError("Base mínima con forma inválida")
        if not np.allclose(self.inverse_transform @ self.transform, np.eye(4), rtol=0.0, atol=1e-14):
            raise ValueError("inverse_transform·M ≠ 1")
        if not np.allclose(self.projectors.sum(axis=0), np.eye(2), rtol=0.0, atol=1e-14):
            raise ValueError("Σ Π_i ≠ 1")
        overlaps = np.einsum('iab,jba->ij', self.projectors, self.projectors).real
        expected = np.where(np.eye(4, dtype=bool), 1 / 4, 1 / 12)
        if not np.allclose(overlaps, expected, rtol=0.0, atol=1e-14):
            raise ValueError("Solapamientos Tr[Π_i Π_j] incorrectos")
        return self

class FeatureVector(BaseModel):
    """Los 10 valores p_ij en orden canónico con su máscara de presencia"""
    values: List[float] = Field(..., min_length=N_FEATURES, max_length=N_FEATURES)
    mask: List[bool] = Field(default_factory=lambda: [True] * N_FEATURES,
                             min_length=N_FEATURES, max_length=N_FEATURES)

    @model_validator(mode='after')
    def validate_values(self):
        for value, present in zip(self.values, self.mask):
            if present and abs(value) > 1.0:
                raise ValueError(f"|p| > 1: {value}")
        # Forma serializada: ausentes exactamente 0
        self.values = [v if m else 0.0 for v, m in zip(self.values, self.mask)]
        return self

    @property
    def complete(self) -> bool:
        return all(self.mask)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

class ReductionPlan(BaseModel):
    """Conjuntos de features retenidas para cada n ∈ [1, 10]"""
    strategy: str = Field("paper", description="paper, nested o custom")
    retained_sets: Dict[int, Tuple[int, ...]] = Field(..., description="n → índices canónicos retenidos")

    @model_validator(mode='after')
    def validate_sets(self):
        for n, retained in self.retained_sets.items():
            if not 1 <= n <= N_FEATURES:
                raise ValueError(f"n fuera de rango: {n}")
            if len(set(retained)) != n or len(retained) != n:
                raise ValueError(f"plan[{n}] debe tener {n} features distintas")
            if any(not 0 <= k < N_FEATURES for k in retained):
                raise ValueError(f"plan[{n}] con índice inválido")
        if N_FEATURES in self.retained_sets and set(self.retained_sets[N_FEATURES]) != set(range(N_FEATURES)):
            raise ValueError("plan[10] debe retener todas las features")
        return self

    @property
    def sizes(self) -> List[int]:
        """n en orden de barrido (de mayor a menor)"""
        return sorted(self.retained_sets, reverse=True)

    def names(self, n: int) -> List[str]:
        return [FEATURE_NAMES[k] for k in self.retained_sets[n]]
