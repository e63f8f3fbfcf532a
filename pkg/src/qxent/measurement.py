"""Projective measurements, POVMs, outcome sampling and post-measurement states."""

import hashlib
import itertools
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ._validation import check_hermitian, check_random_state, check_square, hermitize
from .exceptions import DimensionMismatch, IncompleteSet, InvalidMeasurement, ZeroProbability
from .matfun import eig_hermitian, numerical_rank
from .states import DensityMatrix, as_density, matrix_from_literal

MEASUREMENT_TOL = 1e-9
CLUSTER_TOL = 1e-8
ZERO_PROB_TOL = 1e-12


def _freeze(mats):
    out = []
    for M in mats:
        M = np.array(M, dtype=np.complex128)
        M.setflags(write=False)
        out.append(M)
    return tuple(out)


def _max_dev(A, B):
    return float(np.max(np.abs(A - B)))


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Complete set of orthogonal projectors ``{Π_m}`` with outcome values ``m``.

    ``eigenvalues`` defaults to the outcome indices ``0, 1, ...``.
    """

    projectors: tuple = field(repr=False)
    eigenvalues: tuple = None

    def __post_init__(self):
        P = _freeze(check_square(p, "projector") for p in self.projectors)
        if not P:
            raise InvalidMeasurement("a measurement needs at least one projector")
        d = P[0].shape[0]
        if any(p.shape != (d, d) for p in P):
            raise DimensionMismatch("projectors differ in dimension")
        for i, p in enumerate(P):
            if _max_dev(p, p.conj().T) > MEASUREMENT_TOL:
                raise InvalidMeasurement(f"projector {i} is not Hermitian")
            if _max_dev(p @ p, p) > MEASUREMENT_TOL:
                raise InvalidMeasurement(f"projector {i} is not idempotent")
        for i, j in itertools.combinations(range(len(P)), 2):
            if np.max(np.abs(P[i] @ P[j])) > MEASUREMENT_TOL:
                raise InvalidMeasurement(f"projectors {i} and {j} are not orthogonal")
        if _max_dev(sum(P), np.eye(d)) > MEASUREMENT_TOL:
            raise InvalidMeasurement("projectors do not sum to the identity")
        object.__setattr__(self, "projectors", P)
        ev = tuple(range(len(P))) if self.eigenvalues is None else tuple(self.eigenvalues)
        if len(ev) != len(P):
            raise InvalidMeasurement("one eigenvalue per projector is required")
        object.__setattr__(self, "eigenvalues", ev)

    def __len__(self):
        return len(self.projectors)

    @property
    def dim(self):
        return self.projectors[0].shape[0]

    @property
    def effects(self):
        return self.projectors

    def ranks(self):
        return [int(round(np.trace(p).real)) for p in self.projectors]

    def probabilities(self, rho):
        return born_probabilities(self, rho)

    def observable(self):
        """``A = Σ m Π_m``."""
        return sum(float(m) * p for m, p in zip(self.eigenvalues, self.projectors))


@dataclass(frozen=True, eq=False)
class Povm:
    """Measurement operators ``{M_i}`` with ``Σ M_i† M_i = I``."""

    operators: tuple = field(repr=False)

    def __post_init__(self):
        M = _freeze(check_square(m, "POVM operator") for m in self.operators)
        if not M:
            raise InvalidMeasurement("a POVM needs at least one operator")
        d = M[0].shape[0]
        if any(m.shape != (d, d) for m in M):
            raise DimensionMismatch("POVM operators differ in dimension")
        total = sum(m.conj().T @ m for m in M)
        if _max_dev(total, np.eye(d)) > MEASUREMENT_TOL:
            raise InvalidMeasurement("POVM operators do not satisfy Σ M†M = I")
        object.__setattr__(self, "operators", M)

    def __len__(self):
        return len(self.operators)

    @property
    def dim(self):
        return self.operators[0].shape[0]

    @property
    def effects(self):
        return tuple(m.conj().T @ m for m in self.operators)

    def probabilities(self, rho):
        return born_probabilities(self, rho)


def _vectorised_effects(groups):
    return np.array([E.ravel() for g in groups for E in g.effects])


@dataclass(frozen=True, eq=False)
class TomographicSet:
    """Groups of measurements ``{E_jk}`` whose effects span the Hermitian matrices.

    ``weights`` are the fractions ``n_j`` of shots spent on each group; they
    default to uniform.
    """

    groups: tuple
    weights: np.ndarray = None

    def __post_init__(self):
        groups = tuple(self.groups)
        if not groups:
            raise IncompleteSet("no measurement groups")
        d = groups[0].dim
        if any(g.dim != d for g in groups):
            raise DimensionMismatch("measurement groups differ in dimension")
        w = np.full(len(groups), 1.0 / len(groups)) if self.weights is None else self.weights
        w = np.asarray(w, dtype=float)
        if w.shape != (len(groups),) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be non-negative, one per group, summing to 1")
        w.setflags(write=False)
        rank = numerical_rank(_vectorised_effects(groups), 1e-10)
        if rank < d * d:
            raise IncompleteSet(f"effects span a space of dimension {rank} < {d * d}")
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.groups)

    @property
    def dim(self):
        return self.groups[0].dim

    def probabilities(self, rho):
        """List of per-group outcome probability vectors ``p_jk = tr(E_jk ρ)``."""
        return [born_probabilities(g, rho) for g in self.groups]


def born_probabilities(meas, rho):
    """Outcome probabilities ``tr(E_k ρ)`` as a real vector."""
    R = np.asarray(as_density(rho))
    if R.shape[0] != meas.dim:
        raise DimensionMismatch(f"state has dim {R.shape[0]}, measurement has dim {meas.dim}")
    return np.array([np.real(np.sum(E.T * R)) for E in meas.effects])


def measurement_from_observable(A, cluster_tol=CLUSTER_TOL):
    """Spectral measurement of a Hermitian observable.

    Consecutive eigenvalues whose gap is at most ``cluster_tol`` times the
    spectral range are merged into one eigenspace, so degenerate (or
    numerically near-degenerate) eigenvalues give a single higher-rank
    projector. Each cluster's value is the mean of its eigenvalues.
    """
    eig = eig_hermitian(A)
    w, U = eig.eigenvalues, eig.eigenvectors
    span = w[-1] - w[0]
    clusters = [[0]]
    for i in range(1, w.size):
        if w[i] - w[i - 1] <= cluster_tol * span:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    projectors = [U[:, c] @ U[:, c].conj().T for c in clusters]
    values = [float(np.mean(w[c])) for c in clusters]
    return ProjectiveMeasurement(projectors, values)


def computational_measurement(dim):
    return ProjectiveMeasurement([np.diag(np.eye(dim)[k]) for k in range(dim)])


def basis_measurement(U):
    """Rank-1 measurement in the orthonormal basis given by the columns of ``U``."""
    U = check_square(U, "basis")
    return ProjectiveMeasurement([np.outer(U[:, k], U[:, k].conj()) for k in range(U.shape[1])])


_PAULI_BASES = {
    "X": np.array([[1, 1], [1, -1]]) / np.sqrt(2),
    "Y": np.array([[1, 1], [1j, -1j]]) / np.sqrt(2),
    "Z": np.eye(2),
}


def pauli_tomographic_set(n_qubits):
    """All ``3**n`` product Pauli bases on ``n`` qubits, uniformly weighted."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    groups = []
    for labels in itertools.product("XYZ", repeat=n_qubits):
        U = reduce(np.kron, (_PAULI_BASES[c] for c in labels))
        groups.append(basis_measurement(U))
    return TomographicSet(groups)


def sample_outcomes(meas, rho, size, rng=None):
    """Draw ``size`` outcome indices by inverse-CDF sampling of the Born rule."""
    rng = check_random_state(rng)
    p = born_probabilities(meas, rho)
    if abs(p.sum() - 1.0) >= MEASUREMENT_TOL:
        raise InvalidMeasurement(f"outcome probabilities sum to {p.sum():.12g}")
    p = np.clip(p, 0.0, None)
    cdf = np.cumsum(p / p.sum())
    u = rng.random(size)
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(p) - 1)


def sample_outcome(meas, rho, rng=None):
    return int(sample_outcomes(meas, rho, 1, rng)[0])


def post_state_operator(projector):
    """Operator-perspective record ``Π / tr Π``."""
    P = check_hermitian(projector, MEASUREMENT_TOL, "projector")
    return DensityMatrix(P / np.trace(P).real)


def post_state_state(projector, sigma):
    """State-perspective record ``Π σ Π / tr(Π σ)``.

    Raises :class:`~qxent.exceptions.ZeroProbability` if ``tr(Πσ) <= 1e-12``.
    """
    P = check_hermitian(projector, MEASUREMENT_TOL, "projector")
    S = np.asarray(as_density(sigma))
    if P.shape != S.shape:
        raise DimensionMismatch("projector and state differ in dimension")
    p = np.real(np.sum(P.T * S))
    if p <= ZERO_PROB_TOL:
        raise ZeroProbability(f"tr(Πσ) = {p:.3g}")
    return DensityMatrix(hermitize(P @ S @ P) / p)


def povm_post_state(M, sigma):
    """Post-measurement state ``M σ M† / tr(M† M σ)`` for a POVM operator."""
    M = check_square(M, "POVM operator")
    S = np.asarray(as_density(sigma))
    if M.shape != S.shape:
        raise DimensionMismatch("operator and state differ in dimension")
    out = M @ S @ M.conj().T
    p = np.trace(out).real
    if p <= ZERO_PROB_TOL:
        raise ZeroProbability(f"tr(M†Mσ) = {p:.3g}")
    return DensityMatrix(hermitize(out) / p)


def dephase(rho, meas):
    """Unread measurement ``Σ Q_i ρ Q_i``."""
    R = np.asarray(as_density(rho))
    return DensityMatrix(sum(Q @ R @ Q for Q in meas.projectors))


def manifest_hash(groups):
    """Stable SHA-256 over the effect operators of a list of measurement groups."""
    h = hashlib.sha256()
    for j, g in enumerate(groups):
        h.update(f"{type(g).__name__}:{j}:{len(g)}:{g.dim};".encode())
        ops = g.projectors if isinstance(g, ProjectiveMeasurement) else g.operators
        for op in ops:
            h.update(np.ascontiguousarray(op, dtype=np.complex128).tobytes())
    return h.hexdigest()


def measurement_from_literal(literal, dim=None):
    """Build measurement groups from a config literal.

    ``"computational"`` gives one computational-basis group, ``"pauli"`` the
    Pauli product bases (``dim`` must be a power of two). A mapping with key
    ``projectors`` (list of matrix literals) or ``groups`` (list of such
    lists) gives explicit projective measurements.
    """
    if isinstance(literal, str):
        if dim is None:
            raise ValueError("preset measurements need a dimension")
        if literal == "computational":
            return [computational_measurement(dim)]
        if literal == "pauli":
            n = int(round(np.log2(dim)))
            if 2 ** n != dim:
                raise ValueError(f"pauli preset needs a power-of-two dimension, got {dim}")
            return list(pauli_tomographic_set(n).groups)
        raise ValueError(f"unknown measurement preset {literal!r}")
    if isinstance(literal, dict):
        if set(literal) == {"projectors"}:
            groups = [literal["projectors"]]
        elif set(literal) == {"groups"}:
            groups = literal["groups"]
        else:
            raise ValueError("measurement literal needs exactly one of 'projectors' or 'groups'")
        return [ProjectiveMeasurement([matrix_from_literal(p) for p in g]) for g in groups]
    raise ValueError("measurement literal must be a preset name or a mapping")
