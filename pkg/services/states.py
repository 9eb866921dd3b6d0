#!/usr/bin/env python3
"""
Generación de estados de dos qubits aleatorios

Dos medidas, ambas invariantes ante unitarias:

    spectral  ρ = U·diag(λ)·U† con U de Haar y λ sorteados secuencialmente
              (λ1 ~ U(0,1), λ2 ~ U(0, 1−λ1), λ3 ~ U(0, 1−λ1−λ2), λ4 el resto)
              y permutados al azar. Es la medida de los datasets.
    hs        ρ = GG†/Tr(GG†) con G de 4×4 gaussiana compleja (Ginibre,
              Hilbert-Schmidt).
"""

from typing import Iterator, Literal, Optional, Tuple, Union

import numpy as np

from core.exceptions import ConfigError, PreconditionError
from models.quantum import StateSeed

DIM = 4
DEFAULT_SHARD_SIZE = 65536

Measure = Literal["spectral", "hs"]
MEASURES = ("spectral", "hs")
DEFAULT_MEASURE: Measure = "spectral"

def make_generator(seed: Union[StateSeed, int], stream_index: Optional[int] = None) -> np.random.Generator:
    """
    Generator de numpy para un stream (seed, stream_index)

    Streams con distinto stream_index son estadísticamente independientes
    (SeedSequence con spawn_key).
    """
    if isinstance(seed, StateSeed):
        base, index = seed.seed, seed.stream_index
    else:
        base, index = int(seed), 0
    if stream_index is not None:
        index = int(stream_index)
    return np.random.default_rng(np.random.SeedSequence(entropy=base, spawn_key=(index,)))

def shard_generator(seed: StateSeed, shard: int) -> np.random.Generator:
    """Generator del shard: spawn_key (stream_index, shard), disjunto entre streams"""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed.seed, spawn_key=(seed.stream_index, int(shard)))
    )

def check_measure(measure: str) -> Measure:
    if measure not in MEASURES:
        raise ConfigError(f"Medida desconocida: {measure!r} (válidas: {', '.join(MEASURES)})")
    return measure

def _ginibre(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    parts = rng.standard_normal(shape + (2,))
    return parts[..., 0] + 1j * parts[..., 1]

def _hermitize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))

def haar_unitaries(count: int, rng: np.random.Generator, dim: int = DIM) -> np.ndarray:
    """count unitarias de Haar (QR de Ginibre con fases de R fijadas)"""
    q, r = np.linalg.qr(_ginibre(rng, (count, dim, dim)))
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]

def sequential_spectra(count: int, rng: np.random.Generator, dim: int = DIM) -> np.ndarray:
    """Espectros λ ≥ 0 con Σλ = 1 sorteados secuencialmente y permutados"""
    draws = rng.uniform(size=(count, dim - 1))
    spectra = np.empty((count, dim))
    remaining = np.ones(count)
    for k in range(dim - 1):
        spectra[:, k] = draws[:, k] * remaining
        remaining = remaining - spectra[:, k]
    spectra[:, -1] = np.maximum(remaining, 0.0)
    return rng.permuted(spectra, axis=1)

def _spectral_states(count: int, rng: np.random.Generator) -> np.ndarray:
    unitaries = haar_unitaries(count, rng)
    spectra = sequential_spectra(count, rng)
    rho = _hermitize((unitaries * spectra[:, None, :]) @ np.conj(np.swapaxes(unitaries, -1, -2)))
    traces = np.trace(rho, axis1=-2, axis2=-1).real
    return rho / traces[:, None, None]

def _hs_states(count: int, rng: np.random.Generator) -> np.ndarray:
    g = _ginibre(rng, (count, DIM, DIM))
    rho = _hermitize(g @ np.conj(np.swapaxes(g, -1, -2)))
    traces = np.trace(rho, axis1=-2, axis2=-1).real
    # Traza nula tiene probabilidad cero; se regenera igual
    for idx in np.flatnonzero(traces <= 0.0):
        rho[idx] = _hs_states(1, rng)[0]
        traces[idx] = 1.0
    return rho / traces[:, None, None]

def random_states(count: int, rng: np.random.Generator, measure: Measure = DEFAULT_MEASURE) -> np.ndarray:
    """count estados consecutivos del mismo stream, forma (count, 4, 4)"""
    if count < 0:
        raise PreconditionError(f"count negativo: {count}")
    if check_measure(measure) == "hs":
        return _hs_states(count, rng)
    return _spectral_states(count, rng)

def random_state(rng: np.random.Generator, measure: Measure = DEFAULT_MEASURE) -> np.ndarray:
    """Un estado aleatorio ρ (4×4) del stream rng"""
    return random_states(1, rng, measure)[0]

def iter_shards(count: int, seed: StateSeed, shard_size: int = DEFAULT_SHARD_SIZE,
                measure: Measure = DEFAULT_MEASURE) -> Iterator[Tuple[int, np.ndarray]]:
    """
    Recorrer count estados en shards de shard_size

    El shard s usa su propio stream (seed, stream_index, s), así el contenido
    no depende del número de workers y dos stream_index no comparten estados.
    """
    if count < 1:
        raise PreconditionError("count debe ser ≥ 1")
    if shard_size < 1:
        raise PreconditionError("shard_size debe ser ≥ 1")
    check_measure(measure)
    for shard, start in enumerate(range(0, count, shard_size)):
        size = min(shard_size, count - start)
        yield shard, random_states(size, shard_generator(seed, shard), measure)

# ===== ESTADOS DE REFERENCIA =====

def singlet() -> np.ndarray:
    """|Ψ−⟩⟨Ψ−| con |Ψ−⟩ = (|01⟩ − |10⟩)/√2"""
    psi = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2.0)
    return np.outer(psi, psi.conj())

def werner_state(p: float) -> np.ndarray:
    """p·|Ψ−⟩⟨Ψ−| + (1−p)·1/4"""
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"p fuera de [0, 1]: {p}")
    return p * singlet() + (1.0 - p) * np.eye(DIM, dtype=np.complex128) / DIM

def product_state(bits: str) -> np.ndarray:
    """|b1 b2⟩⟨b1 b2| para bits como '01'"""
    if len(bits) != 2 or set(bits) - {"0", "1"}:
        raise PreconditionError(f"bits inválidos: {bits!r}")
    rho = np.zeros((DIM, DIM), dtype=np.complex128)
    k = int(bits, 2)
    rho[k, k] = 1.0
    return rho

def maximally_mixed() -> np.ndarray:
    return np.eye(DIM, dtype=np.complex128) / DIM

def random_local_unitary(rng: np.random.Generator) -> np.ndarray:
    """U⊗V con U, V de Haar en U(2)"""
    u, v = haar_unitaries(2, rng, dim=2)
    return np.kron(u, v)
