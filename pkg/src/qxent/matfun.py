"""Hermitian eigendecomposition and spectral matrix functions.

All functions return new arrays; inputs are never modified. Matrix functions
act on the spectrum, so they are only as accurate as ``eig_hermitian``,
whose reconstruction residual is the contract every other module relies on.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_hermitian, check_same_shape, check_square, hermitize
from .exceptions import NoConvergence, NotPsd, Singular, ZeroMatrix

SUPPORT_TOL = 1e-10
PSD_SLACK = 1e-10


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues (ascending) and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def apply(self, f):
        """Return ``U f(Λ) U†`` for a vectorised scalar function ``f``."""
        U = self.eigenvectors
        return (U * f(self.eigenvalues)) @ U.conj().T


def eig_hermitian(A):
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrised before LAPACK ``heevd`` is called, so the
    returned eigenvalues are exactly real and sorted ascending.

    Raises
    ------
    NotHermitian
        If ``max|A - A†| > 1e-9``.
    NoConvergence
        If the eigensolver fails.
    """
    A = check_hermitian(A)
    try:
        w, U = np.linalg.eigh(hermitize(A))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return HermitianEig(w, U)


def _as_eig(A):
    return A if isinstance(A, HermitianEig) else eig_hermitian(A)


def _check_psd(w, slack=PSD_SLACK):
    if w.size and w[0] < -slack:
        raise NotPsd(f"matrix has eigenvalue {w[0]:.3g} < -{slack:g}")


def support_mask(w, support_tol=SUPPORT_TOL):
    """Boolean mask of eigenvalues above ``support_tol * max(w)``."""
    top = w.max() if w.size else 0.0
    if top <= 0:
        return np.zeros(w.shape, dtype=bool)
    return w > support_tol * top


def matrix_log(A, support_tol=SUPPORT_TOL, return_support=False):
    """Natural logarithm of a PSD matrix restricted to its support.

    Eigenvalues at or below ``support_tol * λ_max`` are treated as zero: the
    returned matrix vanishes on that subspace. With ``return_support=True``
    the boolean support mask (aligned with ascending eigenvalues) is returned
    as a second value.

    ``A`` may also be a precomputed :class:`HermitianEig`.
    """
    eig = _as_eig(A)
    w, U = eig.eigenvalues, eig.eigenvectors
    _check_psd(w)
    mask = support_mask(w, support_tol)
    if not mask.any():
        raise ZeroMatrix("matrix has no eigenvalue above the support threshold")
    Us = U[:, mask]
    L = (Us * np.log(w[mask])) @ Us.conj().T
    if return_support:
        return L, mask
    return L


def matrix_exp(A):
    """Exponential of a Hermitian matrix."""
    return _as_eig(A).apply(np.exp)


def matrix_sqrt(A):
    """Principal square root of a PSD matrix (tiny negative eigenvalues clipped)."""
    eig = _as_eig(A)
    _check_psd(eig.eigenvalues)
    return eig.apply(lambda w: np.sqrt(np.clip(w, 0.0, None)))


def _log_divided_differences(w):
    # first divided differences of log; the diagonal limit is 1/λ
    li, lj = np.meshgrid(w, w, indexing="ij")
    diff = li - lj
    close = np.abs(diff) <= 1e-12 * np.maximum(li, lj)
    safe = np.where(close, 1.0, diff)
    phi = np.where(close, 2.0 / (li + lj), (np.log(li) - np.log(lj)) / safe)
    return phi


def log_frechet(A, H, support_tol=SUPPORT_TOL):
    """Fréchet derivative of the matrix logarithm at ``A`` in direction ``H``.

    Uses the Daleckii–Krein formula ``U (Φ ∘ (U† H U)) U†`` with ``Φ`` the
    matrix of first divided differences of ``log`` over the eigenvalues of
    ``A``. The map is self-adjoint under the trace inner product, which the
    gradient code in :mod:`qxent.mle` relies on.

    Raises
    ------
    Singular
        If ``A`` is not strictly positive definite.
    """
    eig = _as_eig(A)
    H = check_hermitian(H, name="direction")
    w, U = eig.eigenvalues, eig.eigenvectors
    check_same_shape(U, H)
    if w.size == 0 or w[0] <= support_tol * w[-1] or w[-1] <= 0:
        raise Singular("log_frechet requires a positive definite matrix")
    Ht = U.conj().T @ H @ U
    return U @ (_log_divided_differences(w) * Ht) @ U.conj().T


def numerical_rank(A, tol=SUPPORT_TOL, scale=None):
    """Number of singular values above ``tol * σ_max`` (0 for the zero matrix).

    Pass ``scale`` to measure singular values against a fixed reference
    instead of ``σ_max``; products that should vanish exactly (e.g. a
    projector times an orthogonal one) then get rank 0 rather than the rank
    of their rounding noise.
    """
    A = np.asarray(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    ref = s[0] if scale is None else scale
    if s[0] <= 0 or ref <= 0:
        return 0
    return int(np.sum(s > tol * ref))


def kron(A, B):
    """Tensor product of two square matrices."""
    return np.kron(check_square(A), check_square(B))


def commutator_norm(A, B):
    """Largest absolute entry of ``AB - BA``."""
    A, B = check_square(A), check_square(B)
    check_same_shape(A, B)
    return float(np.max(np.abs(A @ B - B @ A)))
