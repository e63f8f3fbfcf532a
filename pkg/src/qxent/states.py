"""Density matrices, pure states and random ensembles."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._validation import check_random_state, check_same_shape, check_square, hermitize
from .exceptions import DimensionMismatch, InvalidDensity
from .matfun import SUPPORT_TOL, eig_hermitian, support_mask

DENSITY_TOL = 1e-9
PURE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated quantum state.

    ``data`` is stored Hermitian-symmetrised and read-only. The
    eigendecomposition is computed on first use and cached.
    """

    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = np.asarray(self.data)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
            raise InvalidDensity(f"not a non-empty square matrix (shape {M.shape})")
        if not np.all(np.isfinite(M)):
            raise InvalidDensity("non-finite entries")
        M = M.astype(np.complex128)
        herm_err = np.max(np.abs(M - M.conj().T))
        if herm_err > DENSITY_TOL:
            raise InvalidDensity(f"not Hermitian (max deviation {herm_err:.3g})")
        M = hermitize(M)
        tr = np.trace(M).real
        if abs(tr - 1.0) > DENSITY_TOL:
            raise InvalidDensity(f"trace is {tr:.12g}, expected 1")
        M.setflags(write=False)
        object.__setattr__(self, "data", M)
        w = self.eig.eigenvalues
        if w[0] < -DENSITY_TOL:
            raise InvalidDensity(f"negative eigenvalue {w[0]:.3g}")

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, rank={self.rank()})"

    @property
    def dim(self):
        return self.data.shape[0]

    @cached_property
    def eig(self):
        return eig_hermitian(self.data)

    @property
    def eigenvalues(self):
        return self.eig.eigenvalues

    def rank(self, tol=SUPPORT_TOL):
        return int(support_mask(self.eigenvalues, tol).sum())

    def is_pure(self, tol=DENSITY_TOL):
        return abs(np.trace(self.data @ self.data).real - 1.0) <= tol

    def support_projector(self, tol=SUPPORT_TOL):
        return support_projector(self, tol)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > PURE_TOL:
            raise InvalidDensity(f"state vector has norm {norm:.15g}")
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)

    @property
    def dim(self):
        return self.amplitudes.size


def density_from_matrix(M):
    """Validate ``M`` and wrap it as a :class:`DensityMatrix`.

    Raises :class:`~qxent.exceptions.InvalidDensity` with a ``reason`` when
    ``M`` is not Hermitian, not unit trace or has an eigenvalue below -1e-9.
    """
    return DensityMatrix(M)


def as_density(x):
    """Return ``x`` unchanged if it is a DensityMatrix, else validate it."""
    if isinstance(x, DensityMatrix):
        return x
    if isinstance(x, PureState):
        return pure(x)
    return DensityMatrix(x)


def pure(psi):
    """Projector ``|ψ⟩⟨ψ|``; accepts a :class:`PureState` or a unit vector."""
    if not isinstance(psi, PureState):
        psi = PureState(psi)
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()))


def basis_state(dim, index):
    """Computational basis projector ``|index⟩⟨index|``."""
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return pure(v)


def maximally_mixed(dim):
    return DensityMatrix(np.eye(dim) / dim)


def support_projector(rho, tol=SUPPORT_TOL):
    """Orthogonal projector onto the range of ``rho``."""
    rho = as_density(rho)
    mask = support_mask(rho.eigenvalues, tol)
    V = rho.eig.eigenvectors[:, mask]
    return V @ V.conj().T


def random_pure(dim, rng=None):
    """Haar-random pure state from a normalised complex Gaussian vector."""
    rng = check_random_state(rng)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v))


def random_density(dim, rank=None, rng=None):
    """Random state ``GG†/tr(GG†)`` from a ``dim × rank`` complex Ginibre matrix.

    ``rank=None`` means full rank (the Hilbert–Schmidt ensemble).
    """
    rng = check_random_state(rng)
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    M = G @ G.conj().T
    return DensityMatrix(M / np.trace(M).real)


def random_unitary(dim, rng=None):
    """Haar-random unitary: QR of a complex Ginibre matrix with R's diagonal phases removed."""
    rng = check_random_state(rng)
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def unitary_conjugate(rho, U):
    rho = as_density(rho)
    return DensityMatrix(U @ rho.data @ U.conj().T)


def trace_distance(rho, sigma):
    """Half the trace norm of ``rho - sigma``."""
    a = np.asarray(as_density(rho))
    b = np.asarray(as_density(sigma))
    check_same_shape(a, b)
    w = np.linalg.eigvalsh(hermitize(a - b))
    return float(min(1.0, 0.5 * np.abs(w).sum()))


def tensor(*states):
    """Tensor product of density matrices, left to right."""
    if not states:
        raise ValueError("tensor() needs at least one state")
    out = np.asarray(as_density(states[0]))
    for s in states[1:]:
        out = np.kron(out, np.asarray(as_density(s)))
    return DensityMatrix(out)


def mixture(weights, states):
    """Convex combination ``Σ w_i ρ_i``."""
    weights = np.asarray(weights, dtype=float)
    mats = [np.asarray(as_density(s)) for s in states]
    if len(weights) != len(mats):
        raise DimensionMismatch("weights and states differ in length")
    return DensityMatrix(sum(w * m for w, m in zip(weights, mats)))


def state_from_literal(literal):
    """Parse a nested ``[[[re, im], ...], ...]`` matrix literal into a state."""
    arr = np.asarray(literal, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise InvalidDensity("state literal must be a matrix of [re, im] pairs")
    return DensityMatrix(arr[..., 0] + 1j * arr[..., 1])


def matrix_to_literal(M):
    """Inverse of :func:`state_from_literal` for any complex matrix."""
    M = np.asarray(M, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_literal(literal):
    arr = np.asarray(literal, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("matrix literal must be a matrix of [re, im] pairs")
    return check_square(arr[..., 0] + 1j * arr[..., 1])

