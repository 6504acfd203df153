import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrprep.qcore import (BOSONIC, FERMIONIC, DensityMatrix, DimensionError, PureState, SubsystemSplit,
                          enumerate_basis, hermitian_function, partial_trace, partial_transpose,
                          random_density_matrix, random_unitary, tensor_product, trace_norm,
                          von_neumann_entropy)

BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


def assert_valid(rho):
    DensityMatrix(rho, tol=1e-10, psd_tol=1e-9)


def index_sum_partial_trace(rho, da, db):
    # <i|rho_A|j> = sum_k <ik|rho|jk>
    out = np.zeros((da, da), dtype=complex)
    for i in range(da):
        for j in range(da):
            out[i, j] = sum(rho[i * db + k, j * db + k] for k in range(db))
    return out


class TestTensorProduct:
    def test_identity(self):
        assert np.array_equal(tensor_product(np.eye(2), np.eye(2)), np.eye(4))

    def test_ordering(self):
        v = tensor_product(np.array([1, 0]), np.array([0, 1]))
        assert np.array_equal(v, [0, 1, 0, 0])

    def test_trace_factorizes(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=(2, 2)), rng.normal(size=(3, 3))
        assert abs(np.trace(tensor_product(a, b)) - np.trace(a) * np.trace(b)) < 1e-12


class TestPartialTrace:
    def test_product_state(self):
        rng = np.random.default_rng(1)
        ra, rb = random_density_matrix(2, rng), random_density_matrix(3, rng)
        out = partial_trace(np.kron(ra, rb), (2, 3), [0])
        assert np.allclose(out, ra, atol=1e-12)
        assert_valid(out)

    def test_bell_marginal(self):
        assert np.allclose(partial_trace(np.outer(BELL, BELL), (2, 2), [0]), np.eye(2) / 2)

    def test_index_sum_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            rho = random_density_matrix(4, rng)
            assert np.max(np.abs(partial_trace(rho, (2, 2), [0]) - index_sum_partial_trace(rho, 2, 2))) < 1e-12

    def test_sequential_equals_union(self):
        rng = np.random.default_rng(3)
        rho = random_density_matrix(8, rng)
        once = partial_trace(rho, (2, 2, 2), [0])
        twice = partial_trace(partial_trace(rho, (2, 2, 2), [0, 1]), (2, 2), [0])
        assert np.max(np.abs(once - twice)) < 1e-12

    def test_bad_dims(self):
        with pytest.raises(DimensionError):
            partial_trace(np.eye(4) / 4, (2, 3), [0])


class TestPartialTranspose:
    def test_bell_min_eigenvalue(self):
        pt = partial_transpose(np.outer(BELL, BELL), (2, 2), 1)
        assert abs(np.linalg.eigvalsh(pt).min() + 0.5) < 1e-12

    def test_product_state_positive(self):
        rng = np.random.default_rng(4)
        rho = np.kron(random_density_matrix(2, rng), random_density_matrix(2, rng))
        w = np.linalg.eigvalsh(partial_transpose(rho, (2, 2), 1))
        assert w.min() > -1e-12
        assert np.allclose(np.sort(w), np.sort(np.linalg.eigvalsh(rho)))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_involution_and_trace(self, seed):
        rho = random_density_matrix(6, np.random.default_rng(seed))
        pt = partial_transpose(rho, (2, 3), 1)
        assert np.array_equal(partial_transpose(pt, (2, 3), 1), rho)
        assert abs(np.trace(pt) - 1) < 1e-12
        assert np.max(np.abs(pt - pt.conj().T)) < 1e-12


class TestEntropy:
    def test_pure(self):
        assert abs(von_neumann_entropy(np.outer(BELL, BELL))) < 1e-12

    def test_maximally_mixed_qubit(self):
        assert abs(von_neumann_entropy(np.eye(2) / 2) - 1) < 1e-12

    def test_diag(self):
        assert abs(von_neumann_entropy(np.diag([0.75, 0.25])) - 0.811278) < 1e-6

    def test_unitary_invariance(self):
        rng = np.random.default_rng(5)
        rho = random_density_matrix(5, rng)
        u = random_unitary(5, rng)
        assert abs(von_neumann_entropy(rho) - von_neumann_entropy(u @ rho @ u.conj().T)) < 1e-10

    def test_non_hermitian(self):
        with pytest.raises(ValueError):
            von_neumann_entropy(np.array([[0.5, 1.0], [0.0, 0.5]]))


class TestHermitianFunction:
    def test_sqrt_identity(self):
        assert np.allclose(hermitian_function(np.eye(3), "sqrt"), np.eye(3))

    def test_sqrt_diag(self):
        assert np.allclose(hermitian_function(np.diag([4.0, 9.0]), "sqrt"), np.diag([2.0, 3.0]))

    def test_exp_log(self):
        rng = np.random.default_rng(6)
        a = random_density_matrix(4, rng) + 0.1 * np.eye(4)
        log = hermitian_function(a, "log")
        assert np.max(np.abs(hermitian_function(log, np.exp) - a)) < 1e-9

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
    def test_sqrt_squared(self, seed, rank):
        a = random_density_matrix(4, np.random.default_rng(seed), rank=rank)
        r = hermitian_function(a, "sqrt")
        assert np.max(np.abs(r @ r - a)) < 1e-9

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_function(np.array([[1.0, 2.0], [0.0, 1.0]]), "sqrt")

    def test_unknown_function(self):
        with pytest.raises(ValueError):
            hermitian_function(np.eye(2), "cosh")


class TestBasis:
    def test_fermionic_count(self):
        b = enumerate_basis(3, FERMIONIC)
        assert b.dim == 8 and set(np.unique(b.occupations)) == {0, 1}

    def test_bosonic_two_modes(self):
        b = enumerate_basis(2, BOSONIC, 2)
        assert b.states == ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0))

    def test_bosonic_three_modes(self):
        assert enumerate_basis(3, BOSONIC, 3).dim == 20

    def test_deterministic(self):
        a = enumerate_basis(3, BOSONIC, 2)
        enumerate_basis.cache_clear()
        assert enumerate_basis(3, BOSONIC, 2).states == a.states

    def test_sector_and_index(self):
        b = enumerate_basis(2, BOSONIC, 2)
        assert list(b.sector(2)) == [3, 4, 5]
        assert b.index((1, 1)) == 4 and (2, 0) in b and (2, 1) not in b

    @pytest.mark.parametrize("args", [(0, FERMIONIC), (2, "anyonic"), (2, BOSONIC)])
    def test_errors(self, args):
        with pytest.raises(ValueError):
            enumerate_basis(*args)


class TestContainers:
    def test_density_matrix_checks(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([0.6, 0.6]))
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([1.2, -0.2]))
        with pytest.raises(DimensionError):
            DensityMatrix(np.eye(3) / 3, enumerate_basis(1))
        rho = DensityMatrix.from_ket(BELL)
        assert abs(rho.purity() - 1) < 1e-12 and rho.dim == 4

    def test_pure_state(self):
        b = enumerate_basis(2, BOSONIC, 2)
        psi = PureState.from_terms({(2, 0): 1, (0, 2): 1}, b)
        assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12
        with pytest.raises(ValueError):
            PureState([1.0, 1.0])

    def test_split(self):
        with pytest.raises(DimensionError):
            SubsystemSplit((2, 0))
        assert SubsystemSplit((2, 3)).total == 6

    def test_trace_norm(self):
        assert abs(trace_norm(np.diag([0.5, -0.5])) - 1) < 1e-12
        assert abs(trace_norm(np.array([[0, 1], [0, 0]])) - 1) < 1e-12

    def test_random_unitary(self):
        u = random_unitary(4, np.random.default_rng(0))
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12
