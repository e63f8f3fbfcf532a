import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from qxent.exceptions import NotHermitian, NotPsd, Singular, ZeroMatrix
from qxent.matfun import (
    HermitianEig,
    commutator_norm,
    eig_hermitian,
    kron,
    log_frechet,
    matrix_exp,
    matrix_log,
    matrix_sqrt,
    numerical_rank,
)

from conftest import random_hermitian, random_pd


def test_eig_diagonal():
    eig = eig_hermitian(np.diag([1.0, 2.0]))
    np.testing.assert_allclose(eig.eigenvalues, [1.0, 2.0])
    np.testing.assert_allclose(np.abs(eig.eigenvectors), np.eye(2))


def test_eig_pauli_x():
    eig = eig_hermitian(np.array([[0, 1], [1, 0]]))
    np.testing.assert_allclose(eig.eigenvalues, [-1.0, 1.0], atol=1e-15)


def test_eig_reconstruction_6x6(rng):
    A = random_hermitian(6, rng)
    eig = eig_hermitian(A)
    assert np.max(np.abs(eig.reconstruct() - A)) < 1e-10
    U = eig.eigenvectors
    assert np.max(np.abs(U.conj().T @ U - np.eye(6))) < 1e-12
    assert np.all(np.diff(eig.eigenvalues) >= 0)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_eig_does_not_modify_input(rng):
    A = random_hermitian(4, rng)
    before = A.copy()
    eig_hermitian(A)
    matrix_log(A @ A.conj().T)
    np.testing.assert_array_equal(A, before)


def test_log_identity_and_diag():
    np.testing.assert_allclose(matrix_log(np.eye(3)), np.zeros((3, 3)), atol=1e-15)
    L = matrix_log(np.diag([2 / 3, 1 / 3]))
    np.testing.assert_allclose(L, np.diag([np.log(2 / 3), np.log(1 / 3)]), atol=1e-15)


def test_log_matches_scipy_on_full_rank(rng):
    A = random_pd(5, rng)
    np.testing.assert_allclose(matrix_log(A), scipy.linalg.logm(A), atol=1e-10)


def test_log_restricted_to_support(rng):
    V = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    A = (V[:, :2] * [0.3, 0.7]) @ V[:, :2].conj().T
    L, mask = matrix_log(A, return_support=True)
    assert mask.sum() == 2
    # zero on the kernel
    assert np.max(np.abs(L @ V[:, 2:])) < 1e-12
    P = V[:, :2] @ V[:, :2].conj().T
    back = matrix_exp(L) - (np.eye(4) - P)
    assert np.max(np.abs(back - A)) < 1e-9


def test_log_errors():
    with pytest.raises(ZeroMatrix):
        matrix_log(np.zeros((2, 2)))
    with pytest.raises(NotPsd):
        matrix_log(np.diag([1.0, -0.5]))


def test_log_accepts_precomputed_eig():
    eig = eig_hermitian(np.diag([0.25, 0.75]))
    assert isinstance(eig, HermitianEig)
    np.testing.assert_allclose(matrix_log(eig), np.diag(np.log([0.25, 0.75])))


def test_sqrt_examples(rng):
    np.testing.assert_allclose(matrix_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    np.testing.assert_allclose(matrix_sqrt(np.eye(3)), np.eye(3))
    A = random_pd(5, rng)
    S = matrix_sqrt(A)
    assert np.max(np.abs(S @ S - A)) < 1e-9
    np.testing.assert_allclose(S, scipy.linalg.sqrtm(A), atol=1e-9)


def test_frechet_trivial_cases(rng):
    H = random_hermitian(3, rng)
    np.testing.assert_allclose(log_frechet(np.eye(3), H), H, atol=1e-14)
    np.testing.assert_allclose(log_frechet(2.5 * np.eye(3), H), H / 2.5, atol=1e-14)


def test_frechet_singular():
    with pytest.raises(Singular):
        log_frechet(np.diag([1.0, 0.0]), np.eye(2))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 6))
def test_frechet_finite_difference(seed, dim):
    rng = np.random.default_rng(seed)
    A = random_pd(dim, rng, floor=0.2)
    H = random_hermitian(dim, rng)
    eps = 1e-6
    fd = (matrix_log(A + eps * H) - matrix_log(A - eps * H)) / (2 * eps)
    D = log_frechet(A, H)
    assert np.linalg.norm(D - fd) / np.linalg.norm(fd) < 1e-5


def test_frechet_self_adjoint(rng):
    A = random_pd(4, rng)
    H, K = random_hermitian(4, rng), random_hermitian(4, rng)
    lhs = np.trace(K @ log_frechet(A, H))
    rhs = np.trace(log_frechet(A, K) @ H)
    assert abs(lhs - rhs) < 1e-10


def test_numerical_rank(rng):
    assert numerical_rank(np.diag([1.0, 0.0])) == 1
    assert numerical_rank(np.zeros((3, 3))) == 0
    B = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    C = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    assert numerical_rank(B @ C) == 2


def test_numerical_rank_scale():
    noise = np.full((2, 2), 1e-17)
    assert numerical_rank(noise) == 1
    assert numerical_rank(noise, scale=1.0) == 0


def test_kron_and_commutator():
    Z = np.diag([1.0, -1.0])
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert kron(Z, X).shape == (4, 4)
    assert commutator_norm(Z, Z) == 0.0
    assert commutator_norm(Z, X) == 2.0
