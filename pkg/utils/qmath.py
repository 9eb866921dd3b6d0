#!/usr/bin/env python3
"""
Núcleo de álgebra lineal de tamaño fijo (4×4 complejo, 3×3 real simétrico)

Los valores propios hermíticos se obtienen con rotaciones de Jacobi cíclicas
sobre la forma real simétrica 8×8 [[A, -B], [B, A]] de H = A + iB; cada valor
propio de H aparece dos veces en la forma real.
"""

from typing import Tuple

import numpy as np
from numba import njit, prange

from core.exceptions import NumericalDegeneracyError, PreconditionError

HERMITIAN_TOL = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
PSD_ERROR_TOL = -1e-6

# σ0 = 1, σ1 = X, σ2 = Y, σ3 = Z
PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=np.complex128)

def pauli_matrices() -> np.ndarray:
    """Copia de (σ0, σ1, σ2, σ3), forma (4, 2, 2)"""
    return PAULI.copy()

@njit(cache=True)
def _jacobi_eigenvalues(a: np.ndarray, tol: float, max_sweeps: int) -> Tuple[np.ndarray, bool]:
    a = a.copy()
    n = a.shape[0]
    scale = max(1.0, np.sqrt(np.sum(a * a)))
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if np.sqrt(2.0 * off) <= tol * scale:
            return np.sort(np.diag(a).copy()), True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
    return np.sort(np.diag(a).copy()), False

@njit(cache=True, parallel=True)
def _batch_jacobi(stack: np.ndarray, tol: float, max_sweeps: int) -> Tuple[np.ndarray, np.ndarray]:
    count, n = stack.shape[0], stack.shape[1]
    eigs = np.empty((count, n))
    converged = np.empty(count, dtype=np.bool_)
    for idx in prange(count):
        values, ok = _jacobi_eigenvalues(stack[idx], tol, max_sweeps)
        eigs[idx] = values
        converged[idx] = ok
    return eigs, converged

@njit(cache=True)
def _sym3_eigenvalues(r: np.ndarray) -> np.ndarray:
    # Forma cerrada trigonométrica para 3×3 simétrica, ascendente
    out = np.empty(3)
    p1 = r[0, 1] ** 2 + r[0, 2] ** 2 + r[1, 2] ** 2
    q = (r[0, 0] + r[1, 1] + r[2, 2]) / 3.0
    if p1 == 0.0:
        out[0] = r[0, 0]
        out[1] = r[1, 1]
        out[2] = r[2, 2]
        return np.sort(out)
    p2 = (r[0, 0] - q) ** 2 + (r[1, 1] - q) ** 2 + (r[2, 2] - q) ** 2 + 2.0 * p1
    p = np.sqrt(p2 / 6.0)
    b00 = (r[0, 0] - q) / p
    b11 = (r[1, 1] - q) / p
    b22 = (r[2, 2] - q) / p
    b01 = r[0, 1] / p
    b02 = r[0, 2] / p
    b12 = r[1, 2] / p
    det_b = (b00 * (b11 * b22 - b12 * b12)
             - b01 * (b01 * b22 - b12 * b02)
             + b02 * (b01 * b12 - b11 * b02))
    half = det_b / 2.0
    if half <= -1.0:
        phi = np.pi / 3.0
    elif half >= 1.0:
        phi = 0.0
    else:
        phi = np.arccos(half) / 3.0
    largest = q + 2.0 * p * np.cos(phi)
    smallest = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    out[0] = smallest
    out[1] = 3.0 * q - largest - smallest
    out[2] = largest
    return np.sort(out)

@njit(cache=True, parallel=True)
def _batch_sym3(stack: np.ndarray) -> np.ndarray:
    count = stack.shape[0]
    eigs = np.empty((count, 3))
    for idx in prange(count):
        eigs[idx] = _sym3_eigenvalues(stack[idx])
    return eigs

def _real_embedding(m: np.ndarray) -> np.ndarray:
    """[[Re, -Im], [Im, Re]] sobre el último par de ejes"""
    re, im = m.real, m.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.ascontiguousarray(np.concatenate([top, bottom], axis=-2), dtype=np.float64)

def _check_hermitian(m: np.ndarray) -> None:
    if m.shape[-2:] != (4, 4):
        raise PreconditionError(f"Se esperaba una matriz 4×4, forma {m.shape}")
    deviation = np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2))))
    if deviation > HERMITIAN_TOL:
        raise PreconditionError(f"Matriz no hermítica (desviación {deviation:.2e})")

def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """
    Valores propios (ascendentes) de una matriz hermítica 4×4

    Raises:
        PreconditionError: si m no es hermítica dentro de 1e-12
        NumericalDegeneracyError: si Jacobi no converge en 100 barridos
    """
    m = np.asarray(m, dtype=np.complex128)
    _check_hermitian(m)
    eigs, converged = _jacobi_eigenvalues(_real_embedding(m), JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise NumericalDegeneracyError("Jacobi no convergió")
    return 0.5 * (eigs[0::2] + eigs[1::2])

def batch_hermitian_eigenvalues(stack: np.ndarray) -> np.ndarray:
    """hermitian_eigenvalues sobre una pila (N, 4, 4), paralelo por estado"""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3:
        raise PreconditionError(f"Se esperaba una pila (N, 4, 4), forma {stack.shape}")
    if len(stack) == 0:
        return np.empty((0, 4))
    _check_hermitian(stack)
    eigs, converged = _batch_jacobi(_real_embedding(stack), JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not converged.all():
        raise NumericalDegeneracyError(f"Jacobi no convergió en {int((~converged).sum())} estados")
    return 0.5 * (eigs[:, 0::2] + eigs[:, 1::2])

def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """
    Transpuesta parcial sobre el segundo qubit: (2i+j, 2k+l) ↦ (2i+l, 2k+j)

    Acepta una matriz (4, 4) o una pila (..., 4, 4). Es una permutación pura,
    por lo que aplicarla dos veces devuelve la entrada bit a bit.
    """
    rho = np.asarray(rho)
    lead = rho.shape[:-2]
    blocks = rho.reshape(lead + (2, 2, 2, 2))
    return np.swapaxes(blocks, -3, -1).reshape(lead + (4, 4))

def _check_psd(eigs: np.ndarray) -> None:
    worst = float(np.min(eigs)) if eigs.size else 0.0
    if worst < PSD_ERROR_TOL:
        raise NumericalDegeneracyError(f"R no es PSD: valor propio {worst:.3e}")

def sym3_spectrum(r: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Valores propios ascendentes de R (3×3 simétrica) y Tr√R

    Valores propios negativos de redondeo se recortan a 0 antes de la raíz;
    por debajo de -1e-6 se considera R corrupta.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (3, 3):
        raise PreconditionError(f"Se esperaba una matriz 3×3, forma {r.shape}")
    if np.max(np.abs(r - r.T)) > HERMITIAN_TOL:
        raise PreconditionError("R no es simétrica")
    eigs = _sym3_eigenvalues(np.ascontiguousarray(0.5 * (r + r.T)))
    _check_psd(eigs)
    return eigs, float(np.sqrt(np.maximum(eigs, 0.0)).sum())

def batch_sym3_spectrum(stack: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """sym3_spectrum sobre una pila (N, 3, 3)"""
    stack = np.asarray(stack, dtype=np.float64)
    if len(stack) == 0:
        return np.empty((0, 3)), np.empty(0)
    sym = np.ascontiguousarray(0.5 * (stack + np.swapaxes(stack, -1, -2)))
    eigs = _batch_sym3(sym)
    _check_psd(eigs)
    return eigs, np.sqrt(np.maximum(eigs, 0.0)).sum(axis=1)
