#!/usr/bin/env python3
"""
Cantidades analíticas de correlación y etiquetado en cinco clases

N     = Σ(|λ_i| − λ_i), λ = eig(ρ^Γ)
R     = TᵀT, T_ij = Tr[ρ(σ_i⊗σ_j)]
FEF_w = ½·max(0, Tr√R − 1)
S3    = √(½·max(0, Tr R − 1))
B     = √(max(0, Tr R − min eig R − 1))
"""

from typing import Tuple

import numpy as np

from core.exceptions import PreconditionError
from models.quantum import ClassLabel, QuantRecord, N_CLASSES
from services.states import werner_state
from utils.qmath import (
    PAULI,
    batch_hermitian_eigenvalues,
    batch_sym3_spectrum,
    hermitian_eigenvalues,
    partial_transpose,
    sym3_spectrum,
)

CLASSIFICATION_EPS = 1e-10

# σ_m ⊗ σ_k para m, k ∈ 0..3, forma (4, 4, 4, 4)
PAULI_PRODUCTS = np.einsum('mab,kcd->mkacbd', PAULI, PAULI).reshape(4, 4, 4, 4)

def pauli_expectations(rho: np.ndarray) -> np.ndarray:
    """C_mk = Tr[ρ(σ_m⊗σ_k)], forma (..., 4, 4); C_00 = 1, T = C[1:, 1:]"""
    return np.einsum('...ab,mkba->...mk', rho, PAULI_PRODUCTS).real

def t_matrix(rho: np.ndarray) -> np.ndarray:
    """Matriz de correlaciones T (3×3) de un estado o pila de estados"""
    return pauli_expectations(rho)[..., 1:, 1:]

def r_matrix(rho: np.ndarray) -> np.ndarray:
    """R = TᵀT"""
    t = t_matrix(rho)
    return np.swapaxes(t, -1, -2) @ t

def witnesses_from_spectrum(eigs: np.ndarray, trace_sqrt: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(FEF_w, S3, B) a partir del espectro de R; funciona por filas"""
    trace_r = eigs.sum(axis=-1)
    fef = 0.5 * np.maximum(0.0, trace_sqrt - 1.0)
    steer = np.sqrt(0.5 * np.maximum(0.0, trace_r - 1.0))
    bell = np.sqrt(np.maximum(0.0, trace_r - eigs.min(axis=-1) - 1.0))
    return fef, steer, bell

def witnesses_from_r(r: np.ndarray) -> Tuple[float, float, float]:
    """(FEF_w, S3, B) de una R dada (3×3)"""
    eigs, trace_sqrt = sym3_spectrum(r)
    fef, steer, bell = witnesses_from_spectrum(eigs, np.asarray(trace_sqrt))
    return float(fef), float(steer), float(bell)

def negativity(rho: np.ndarray) -> float:
    lam = hermitian_eigenvalues(partial_transpose(rho))
    return float(np.sum(np.abs(lam) - lam))

def quantities(rho: np.ndarray) -> QuantRecord:
    """Las cuatro cantidades de un estado (sin etiqueta)"""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise PreconditionError(f"Se esperaba ρ 4×4, forma {rho.shape}")
    fef, steer, bell = witnesses_from_r(r_matrix(rho))
    return QuantRecord(
        negativity=negativity(rho),
        fef_witness=fef,
        steering=steer,
        bell=bell,
    )

def classify(q: QuantRecord, eps: float = CLASSIFICATION_EPS) -> ClassLabel:
    """Clase más fuerte alcanzada según la jerarquía"""
    if q.bell > eps:
        return ClassLabel.BELL
    if q.steering > eps:
        return ClassLabel.STEER
    if q.fef_witness > eps:
        return ClassLabel.FEF
    if q.negativity > eps:
        return ClassLabel.ENT
    return ClassLabel.SEP

def label_state(rho: np.ndarray, eps: float = CLASSIFICATION_EPS) -> QuantRecord:
    """quantities + classify en un solo paso"""
    record = quantities(rho)
    record.label = classify(record, eps)
    return record

# ===== RUTAS VECTORIZADAS =====

def batch_quantities(rhos: np.ndarray) -> np.ndarray:
    """Columnas (N, FEF_w, S3, B) para una pila (M, 4, 4)"""
    rhos = np.asarray(rhos, dtype=np.complex128)
    lam = batch_hermitian_eigenvalues(partial_transpose(rhos))
    neg = np.sum(np.abs(lam) - lam, axis=1)
    eigs, trace_sqrt = batch_sym3_spectrum(r_matrix(rhos))
    fef, steer, bell = witnesses_from_spectrum(eigs, trace_sqrt)
    return np.stack([neg, fef, steer, bell], axis=1)

def batch_classify(quants: np.ndarray, eps: float = CLASSIFICATION_EPS) -> np.ndarray:
    """Etiquetas uint8 para filas (N, FEF_w, S3, B)"""
    neg, fef, steer, bell = (quants[:, k] for k in range(4))
    labels = np.select(
        [bell > eps, steer > eps, fef > eps, neg > eps],
        [ClassLabel.BELL, ClassLabel.STEER, ClassLabel.FEF, ClassLabel.ENT],
        default=ClassLabel.SEP,
    )
    return labels.astype(np.uint8)

def hierarchy_violations(quants: np.ndarray, band: float = CLASSIFICATION_EPS) -> int:
    """Estados con un eslabón fuerte > band y el siguiente débil = 0"""
    neg, fef, steer, bell = (quants[:, k] for k in range(4))
    broken = ((bell > band) & (steer <= 0.0)) | ((steer > band) & (fef <= 0.0)) | ((fef > band) & (neg <= 0.0))
    return int(broken.sum())

def class_histogram(labels: np.ndarray) -> np.ndarray:
    return np.bincount(np.asarray(labels, dtype=np.int64), minlength=N_CLASSES)[:N_CLASSES]

# ===== FAMILIA DE WERNER =====

def werner_threshold(boundary: ClassLabel, tol: float = 1e-9, eps: float = CLASSIFICATION_EPS) -> float:
    """
    Menor p para el que el estado de Werner alcanza la clase boundary

    Bisección sobre p ∈ [0, 1]; los cortes esperados son 1/3 (FEF),
    1/√3 (steer) y 1/√2 (Bell).
    """
    boundary = ClassLabel(boundary)
    if boundary == ClassLabel.SEP:
        raise PreconditionError("sep no tiene umbral inferior")

    def reaches(p: float) -> bool:
        return label_state(werner_state(p), eps).label >= boundary

    lo, hi = 0.0, 1.0
    if not reaches(hi):
        raise PreconditionError(f"La familia de Werner nunca alcanza {boundary.short_name}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if reaches(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
