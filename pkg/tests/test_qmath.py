#!/usr/bin/env python3
"""
Tests unitarios para el núcleo de álgebra lineal (utils/qmath)
"""

import numpy as np
import pytest

from core.exceptions import NumericalDegeneracyError, PreconditionError
from services.states import make_generator, random_states, singlet
from utils.qmath import (
    PAULI,
    batch_hermitian_eigenvalues,
    batch_sym3_spectrum,
    hermitian_eigenvalues,
    partial_transpose,
    pauli_matrices,
    sym3_spectrum,
)

class TestHermitianEigenvalues:
    """Tests para el Jacobi sobre la forma real 8×8"""

    def setup_method(self):
        self.rng = make_generator(7)

    def test_diagonal_matrix(self):
        """Test diag(0.1, 0.2, 0.3, 0.4) → los mismos valores"""
        eigs = hermitian_eigenvalues(np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex))
        assert np.allclose(eigs, [0.1, 0.2, 0.3, 0.4], atol=1e-14)

    def test_singlet_spectrum(self):
        """Test proyector del singlete → {0, 0, 0, 1}"""
        eigs = hermitian_eigenvalues(singlet())
        assert np.allclose(eigs, [0, 0, 0, 1], atol=1e-12)

    def test_matches_numpy_on_random_states(self):
        """Test coincidencia con eigvalsh en estados aleatorios"""
        rhos = random_states(200, self.rng)
        ours = batch_hermitian_eigenvalues(rhos)
        ref = np.linalg.eigvalsh(rhos)
        assert np.max(np.abs(ours - ref)) < 1e-12

    def test_single_matches_batch(self):
        """Test la ruta individual y la vectorizada dan lo mismo"""
        rhos = random_states(5, self.rng)
        batch = batch_hermitian_eigenvalues(rhos)
        for rho, expected in zip(rhos, batch):
            assert np.allclose(hermitian_eigenvalues(rho), expected, atol=1e-14)

    def test_eigenvalues_sum_to_trace(self):
        """Test Σλ = Tr ρ = 1"""
        rhos = random_states(50, self.rng)
        eigs = batch_hermitian_eigenvalues(rhos)
        assert np.allclose(eigs.sum(axis=1), 1.0, atol=1e-12)

    def test_non_hermitian_rejected(self):
        """Test matriz no hermítica → PreconditionError"""
        m = np.zeros((4, 4), dtype=complex)
        m[0, 1] = 1.0
        with pytest.raises(PreconditionError):
            hermitian_eigenvalues(m)

    def test_wrong_shape_rejected(self):
        """Test forma 3×3 → PreconditionError"""
        with pytest.raises(PreconditionError):
            hermitian_eigenvalues(np.eye(3, dtype=complex))

class TestPartialTranspose:
    """Tests para la transpuesta parcial"""

    def test_involution_bitwise(self):
        """Test aplicarla dos veces devuelve la entrada bit a bit"""
        rho = random_states(1, make_generator(3))[0]
        assert np.array_equal(partial_transpose(partial_transpose(rho)), rho)

    def test_index_mapping(self):
        """Test (2i+j, 2k+l) ↦ (2i+l, 2k+j)"""
        m = np.arange(16, dtype=float).reshape(4, 4)
        pt = partial_transpose(m)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    for l in range(2):
                        assert pt[2 * i + l, 2 * k + j] == m[2 * i + j, 2 * k + l]

    def test_singlet_has_negative_eigenvalue(self):
        """Test ρ^Γ del singlete tiene valor propio −1/2"""
        eigs = hermitian_eigenvalues(partial_transpose(singlet()))
        assert np.allclose(eigs, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)

    def test_batch_shape(self):
        """Test acepta pilas (N, 4, 4)"""
        rhos = random_states(3, make_generator(4))
        pts = partial_transpose(rhos)
        assert pts.shape == (3, 4, 4)
        assert np.array_equal(pts[1], partial_transpose(rhos[1]))

class TestSym3Spectrum:
    """Tests para el solver cerrado 3×3"""

    def test_identity(self):
        """Test R = 1 → (1, 1, 1) y Tr√R = 3"""
        eigs, trace_sqrt = sym3_spectrum(np.eye(3))
        assert np.allclose(eigs, [1, 1, 1])
        assert trace_sqrt == pytest.approx(3.0)

    def test_matches_numpy(self):
        """Test coincidencia con eigvalsh en matrices PSD aleatorias"""
        rng = make_generator(11)
        a = rng.standard_normal((500, 3, 3))
        r = a @ np.swapaxes(a, -1, -2)
        eigs, trace_sqrt = batch_sym3_spectrum(r)
        ref = np.linalg.eigvalsh(r)
        assert np.max(np.abs(eigs - ref)) < 1e-8
        assert np.allclose(trace_sqrt, np.sqrt(np.clip(ref, 0, None)).sum(axis=1), atol=1e-8)

    def test_roundoff_negative_clamped(self):
        """Test valor propio −1e-14 se recorta a 0 en Tr√R"""
        eigs, trace_sqrt = sym3_spectrum(np.diag([-1e-14, 0.25, 1.0]))
        assert eigs[0] < 0
        assert trace_sqrt == pytest.approx(1.5, abs=1e-12)

    def test_not_psd_raises(self):
        """Test valor propio −1e-3 → NumericalDegeneracyError"""
        with pytest.raises(NumericalDegeneracyError):
            sym3_spectrum(np.diag([-1e-3, 0.5, 0.5]))

    def test_asymmetric_rejected(self):
        """Test R no simétrica → PreconditionError"""
        r = np.eye(3)
        r[0, 1] = 0.5
        with pytest.raises(PreconditionError):
            sym3_spectrum(r)

class TestPauli:
    """Tests para las matrices de Pauli"""

    def test_algebra(self):
        """Test σ_i² = 1 y Tr σ_i σ_j = 2δ_ij"""
        sigma = pauli_matrices()
        for i in range(4):
            assert np.allclose(sigma[i] @ sigma[i], np.eye(2))
            for j in range(4):
                assert np.trace(sigma[i] @ sigma[j]).real == pytest.approx(2.0 if i == j else 0.0)

    def test_copy_is_independent(self):
        """Test pauli_matrices devuelve una copia"""
        sigma = pauli_matrices()
        sigma[0, 0, 0] = 5
        assert PAULI[0, 0, 0] == 1
