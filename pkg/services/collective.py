#!/usr/bin/env python3
"""
Medidas colectivas sobre dos copias de ρ en la geometría de entanglement swapping

Subsistemas ordenados (a, b, a', b'): la primera copia ocupa (a, b) y la
segunda (a', b'). Sobre (b, b') se proyecta al singlete vía
S = 1 − 4|Ψ−⟩⟨Ψ−|; sobre (a, a') actúan σ_i⊗σ_j (elementos de R) o
Π_i⊗Π_j (features p_ij de la base mínima).

No se implementan aquí los esquemas de 36 y 16 proyecciones de von Neumann
con matrices de Pauli: la base mínima de 4 proyectores por qubit los
reemplaza, y con p_ij = p_ji bastan 10 configuraciones.
"""

from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import ConfigError, MissingFeatureError, PreconditionError
from models.features import (
    FEATURE_NAMES,
    FEATURE_PAIRS,
    N_FEATURES,
    FeatureVector,
    MinimalBasis,
    ReductionPlan,
    feature_index,
)
from utils.qmath import PAULI

CHUNK_SIZE = 8192
_S = 1.0 / np.sqrt(3.0)

# Signos de las direcciones del tetraedro (filas = Π_i, columnas = σ_1..σ_3)
TETRAHEDRON_SIGNS = np.array([
    [1, 1, 1],
    [1, -1, -1],
    [-1, 1, -1],
    [-1, -1, 1],
], dtype=np.float64)

def minimal_basis() -> MinimalBasis:
    """Π_i = Σ_j M_ij σ_j con M = ¼[1, s·signos], s = 1/√3"""
    transform = 0.25 * np.hstack([np.ones((4, 1)), _S * TETRAHEDRON_SIGNS])
    inverse = np.vstack([np.ones((1, 4)), np.sqrt(3.0) * TETRAHEDRON_SIGNS.T])
    projectors = np.einsum('ij,jab->iab', transform, PAULI)
    return MinimalBasis(projectors=projectors, transform=transform, inverse_transform=inverse)

def singlet_witness_operator() -> np.ndarray:
    """S = 1 − 4|Ψ−⟩⟨Ψ−| sobre (b, b'); espectro {1, 1, 1, −3}"""
    psi = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2.0)
    return np.eye(4, dtype=np.complex128) - 4.0 * np.outer(psi, psi.conj())

def embed_collective(local_aa: np.ndarray, joint_bb: np.ndarray) -> np.ndarray:
    """
    Operador 16×16 en el orden (a, b, a', b') a partir de un operador sobre
    (a, a') y otro sobre (b, b')
    """
    full = np.kron(local_aa, joint_bb).reshape((2,) * 8)
    # filas/columnas en orden (a, a', b, b') → (a, b, a', b')
    return full.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(16, 16)

def two_copies(rho: np.ndarray) -> np.ndarray:
    """ρ_ab ⊗ ρ_a'b' para un estado o una pila (N, 4, 4)"""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim == 2:
        return np.kron(rho, rho)
    return np.einsum('nij,nkl->nikjl', rho, rho).reshape(len(rho), 16, 16)

def collective_expectation(rho: np.ndarray, op_a: np.ndarray, op_a_prime: np.ndarray) -> float:
    """Tr[(ρ⊗ρ)·S_bb'·(A⊗B)_aa'] para operadores A sobre a y B sobre a'"""
    operator = embed_collective(np.kron(op_a, op_a_prime), singlet_witness_operator())
    return float(np.trace(two_copies(rho) @ operator).real)

class CollectiveOperators:
    """Operadores 16×16 precalculados; inmutables tras la construcción"""

    def __init__(self):
        self.basis = minimal_basis()
        s_op = singlet_witness_operator()
        proj = self.basis.projectors
        self.feature_ops = np.stack([
            embed_collective(np.kron(proj[i], proj[j]), s_op) for i, j in FEATURE_PAIRS
        ])
        self.r_ops = np.stack([
            np.stack([embed_collective(np.kron(PAULI[i], PAULI[j]), s_op) for j in range(1, 4)])
            for i in range(1, 4)
        ])
        for array in (self.feature_ops, self.r_ops):
            array.setflags(write=False)

    def _evaluate(self, rho: np.ndarray, ops: np.ndarray, spec: str) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.ndim == 2:
            return np.einsum('xy,...yx->...', two_copies(rho), ops).real
        out = []
        for start in range(0, len(rho), CHUNK_SIZE):
            doubled = two_copies(rho[start:start + CHUNK_SIZE])
            out.append(np.einsum(spec, doubled, ops).real)
        return np.concatenate(out) if out else np.empty((0,) + ops.shape[:-2])

    def features(self, rho: np.ndarray) -> np.ndarray:
        return self._evaluate(rho, self.feature_ops, 'nxy,kyx->nk')

    def collective_r(self, rho: np.ndarray) -> np.ndarray:
        return self._evaluate(rho, self.r_ops, 'nxy,ijyx->nij')

_OPERATORS: Optional[CollectiveOperators] = None

def get_operators() -> CollectiveOperators:
    """Cache global de operadores (se construye una vez)"""
    global _OPERATORS
    if _OPERATORS is None:
        _OPERATORS = CollectiveOperators()
    return _OPERATORS

def collective_R(rho: np.ndarray) -> np.ndarray:
    """R_ij = Tr[(ρ⊗ρ)·S_bb'·(σ_i⊗σ_j)_aa'], mismo espectro que TᵀT"""
    return get_operators().collective_r(rho)

def features(rho: np.ndarray) -> FeatureVector:
    """Los 10 valores p_ij de un estado (máscara completa)"""
    values = get_operators().features(rho)
    return FeatureVector(values=values.tolist())

def batch_features(rhos: np.ndarray) -> np.ndarray:
    """Matriz (N, 10) de features en orden canónico"""
    return get_operators().features(np.asarray(rhos))

def _symmetric_p(values: np.ndarray) -> np.ndarray:
    lead = values.shape[:-1]
    p = np.zeros(lead + (4, 4))
    for k, (i, j) in enumerate(FEATURE_PAIRS):
        p[..., i, j] = values[..., k]
        p[..., j, i] = values[..., k]
    return p

def batch_reconstruct_R(values: np.ndarray) -> np.ndarray:
    """G = M⁻¹·P·(M⁻¹)ᵀ por fila; devuelve el bloque 3×3 inferior derecho"""
    inverse = get_operators().basis.inverse_transform
    g = inverse @ _symmetric_p(np.asarray(values, dtype=np.float64)) @ inverse.T
    return g[..., 1:, 1:]

def reconstruct_R(f: FeatureVector) -> np.ndarray:
    """Reconstruir R desde las 10 features; exige máscara completa"""
    if not f.complete:
        missing = [name for name, present in zip(FEATURE_NAMES, f.mask) if not present]
        raise MissingFeatureError(f"Faltan features para reconstruir R: {missing}")
    return batch_reconstruct_R(f.as_array())

# ===== PLANES DE REDUCCIÓN =====

# Orden de eliminación para n ≥ 5: se conservan las diagonales y no se
# acumulan eliminaciones en una misma fila o columna
_HIGH_N_REMOVALS = ("p13", "p24", "p34", "p12", "p23")

# Para n < 5: off-diagonal p14 con sus diagonales (colectibilidad), luego
# dos off-diagonales disjuntas, y una diagonal para n = 1
_LOW_N_SETS = {
    4: ("p14", "p11", "p44", "p33"),
    3: ("p14", "p11", "p44"),
    2: ("p14", "p23"),
    1: ("p22",),
}

# Continuación de la cadena n ≥ 5 por debajo de 5 (curva de comparación)
_NESTED_LOW_REMOVALS = ("p14", "p44", "p33", "p11")

def _high_n_chain() -> Dict[int, Tuple[int, ...]]:
    retained = list(range(N_FEATURES))
    sets = {N_FEATURES: tuple(retained)}
    for name in _HIGH_N_REMOVALS:
        retained.remove(feature_index(name))
        sets[len(retained)] = tuple(retained)
    return sets

def reduction_plan(strategy: str = "paper") -> ReductionPlan:
    """
    Plan de reducción de 10 a 1 features

    paper:  cadena anidada para n ≥ 5 y conjuntos específicos para n ≤ 4
    nested: la cadena n ≥ 5 continuada eliminando p14, p44, p33, p11
    """
    sets = _high_n_chain()
    if strategy == "paper":
        for n, names in _LOW_N_SETS.items():
            sets[n] = tuple(feature_index(name) for name in names)
    elif strategy == "nested":
        retained = list(sets[5])
        for name in _NESTED_LOW_REMOVALS:
            retained.remove(feature_index(name))
            sets[len(retained)] = tuple(retained)
    else:
        raise ConfigError(f"Estrategia de reducción desconocida: {strategy}")
    return ReductionPlan(strategy=strategy, retained_sets=sets)

def custom_plan(tokens: Iterable[str]) -> ReductionPlan:
    """Plan de un solo n a partir de nombres ('p14') o posiciones 1-based"""
    retained = []
    for token in tokens:
        token = token.strip()
        if not token:
            continue
        try:
            if token.isdigit():
                position = int(token)
                if not 1 <= position <= N_FEATURES:
                    raise ValueError(f"posición fuera de rango: {position}")
                retained.append(position - 1)
            else:
                retained.append(feature_index(token))
        except ValueError as e:
            raise ConfigError(f"Plan custom inválido: {e}") from None
    try:
        return ReductionPlan(strategy="custom", retained_sets={len(retained): tuple(retained)})
    except ValueError as e:
        raise ConfigError(f"Plan custom inválido: {e}") from None

def parse_plan(text: str) -> ReductionPlan:
    """'paper' | 'nested' | 'custom:<índices>'"""
    if text.startswith("custom:"):
        return custom_plan(text[len("custom:"):].split(","))
    return reduction_plan(text)

def feature_mask(retained: Sequence[int]) -> np.ndarray:
    mask = np.zeros(N_FEATURES, dtype=bool)
    mask[list(retained)] = True
    return mask

def apply_mask(values: np.ndarray, retained: Sequence[int]) -> np.ndarray:
    """Columnas retenidas (entrada del clasificador), forma (N, n)"""
    values = np.asarray(values)
    if values.shape[-1] != N_FEATURES:
        raise PreconditionError(f"Se esperaban {N_FEATURES} features, forma {values.shape}")
    return values[..., list(retained)]

def masked_features(values: np.ndarray, retained: Sequence[int]) -> np.ndarray:
    """Forma serializada: ausentes exactamente 0"""
    return np.where(feature_mask(retained), values, 0.0)
