"""State estimation from exact states or measurement frequencies.

Two routes are provided. :func:`linear_inversion` solves the Born-rule
linear system directly. :func:`minimize_cross_entropy` and
:func:`maximize_likelihood` optimise over a Cholesky-style parameterisation
``σ(T) = TT†/tr(TT†)`` with Barzilai–Borwein steps safeguarded by Armijo
backtracking, so every accepted step decreases the objective.

The estimator classes at the bottom wrap the same functions behind the
scikit-learn ``fit``/``score``/``get_params`` protocol.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_hermitian, hermitize
from .empirical import MeasurementDataset, avg_log_likelihood
from .entropy import quantum_cross_entropy, von_neumann
from .exceptions import IncompleteSet, NotPsd, Singular
from .matfun import eig_hermitian, log_frechet
from .measurement import ZERO_PROB_TOL, TomographicSet
from .states import DensityMatrix, as_density

GTOL = 1e-7
MAX_ITER = 5000
SHRINK = 0.5
ARMIJO = 1e-4


@dataclass(frozen=True, eq=False)
class CholeskyParam:
    """Lower-triangular ``T`` with non-negative real diagonal, mapping to ``TT†/tr(TT†)``."""

    T: np.ndarray = field(repr=False)

    def __post_init__(self):
        T = np.array(self.T, dtype=np.complex128)
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise ValueError("T must be square")
        if np.any(np.triu(T, 1) != 0):
            raise ValueError("T must be lower triangular")
        if not np.any(T):
            raise ValueError("T must be non-zero")
        d = np.diag(T)
        # column phases are a gauge freedom of TT†; fix them so the diagonal is real >= 0
        phase = np.where(np.abs(d) > 0, np.conj(d) / np.where(d == 0, 1, np.abs(d)), 1.0)
        T = T * phase
        T[np.diag_indices_from(T)] = np.abs(d)
        T.setflags(write=False)
        object.__setattr__(self, "T", T)

    @property
    def dim(self):
        return self.T.shape[0]

    def density(self):
        M = self.T @ self.T.conj().T
        return DensityMatrix(hermitize(M) / np.trace(M).real)

    @property
    def full_rank(self):
        return bool(np.all(np.diag(self.T).real > 0))

    @classmethod
    def maximally_mixed(cls, dim):
        return cls(np.eye(dim) / np.sqrt(dim))

    @classmethod
    def from_density(cls, rho):
        """Cholesky factor of a full-rank state."""
        try:
            return cls(np.linalg.cholesky(np.asarray(as_density(rho))))
        except np.linalg.LinAlgError as exc:
            raise Singular("state is not full rank") from exc

    def to_vector(self):
        return _to_vector(self.T)

    @classmethod
    def from_vector(cls, x, dim):
        return cls(_from_vector(x, dim))


def _tril(dim):
    return np.tril_indices(dim), np.tril_indices(dim, -1)


def _to_vector(T):
    full, strict = _tril(T.shape[0])
    return np.concatenate([T[full].real, T[strict].imag])


def _from_vector(x, dim):
    full, strict = _tril(dim)
    n = len(full[0])
    T = np.zeros((dim, dim), dtype=np.complex128)
    T[full] = x[:n]
    T[strict] += 1j * x[n:]
    return T


def _chain_rule(T, sigma, G):
    """Gradient w.r.t. the real parameter vector of ``f(σ(T))`` given ``G = ∂f/∂σ``.

    With ``t = tr(TT†)`` and ``c = tr(Gσ)``, the complex gradient matrix is
    ``(2/t)(G - cI)T``: real parts for Re T, imaginary parts for Im T.
    """
    t = np.real(np.sum(np.abs(T) ** 2))
    c = np.real(np.sum(G.T * sigma))
    Gamma = (2.0 / t) * ((G - c * np.eye(G.shape[0])) @ T)
    return _to_vector(Gamma)


def _sigma_of(T):
    M = T @ T.conj().T
    return hermitize(M) / np.trace(M).real


def _cross_entropy_objective(rho):
    R = np.asarray(as_density(rho))

    def objective(T):
        sigma = _sigma_of(T)
        eig = eig_hermitian(sigma)
        w = eig.eigenvalues
        if w[0] <= 1e-14 * w[-1]:
            return math.inf, None
        L = eig.apply(np.log)
        f = -np.real(np.sum(R.T * L))
        G = -log_frechet(eig, R)
        return f, _chain_rule(T, sigma, G)

    return objective


def _likelihood_objective(tset, freqs):
    weights = tset.weights
    terms = []
    for w, g, q in zip(weights, tset.groups, freqs):
        for E, qk in zip(g.effects, q):
            if w * qk > 0:
                terms.append((w * qk, E))
    coef = np.array([c for c, _ in terms])
    E = np.array([e for _, e in terms])

    def objective(T):
        sigma = _sigma_of(T)
        p = np.real(np.einsum("kij,ji->k", E, sigma))
        if np.any(p <= ZERO_PROB_TOL):
            return math.inf, None
        f = -float(np.sum(coef * np.log(p)))
        G = -np.einsum("k,kij->ij", coef / p, E)
        return f, _chain_rule(T, sigma, G)

    return objective


def cross_entropy_gradient(rho, T):
    """Gradient of ``S(ρ, σ(T))`` w.r.t. ``[Re T_ij (i>=j), Im T_ij (i>j)]``.

    Raises :class:`Singular` if ``σ(T)`` is not full rank.
    """
    T = _initial_T(T, None)
    f, g = _cross_entropy_objective(rho)(T)
    if g is None:
        raise Singular("σ(T) is not full rank")
    return g


def likelihood_gradient(tset, freqs, T):
    """Gradient of the negative weighted log-likelihood w.r.t. the parameter vector."""
    T = _initial_T(T, None)
    f, g = _likelihood_objective(tset, freqs)(T)
    if g is None:
        raise Singular("model assigns zero probability to an observed outcome")
    return g


@dataclass
class OptimizerReport:
    iterations: int
    objective: float
    gradient_norm: float
    estimate: DensityMatrix
    converged: bool
    objective_trace: list = field(default_factory=list, repr=False)
    param: CholeskyParam = field(default=None, repr=False)
    message: str = ""

    def as_dict(self):
        return {
            "iterations": self.iterations,
            "objective": self.objective,
            "gradient_norm": self.gradient_norm,
            "converged": self.converged,
            "message": self.message,
            "objective_trace": list(self.objective_trace),
        }


def _descend(objective, T0, gtol, max_iter, shrink, armijo, offset=0.0):
    dim = T0.shape[0]
    x = _to_vector(T0)
    f, g = objective(T0)
    if g is None:
        raise Singular("initial point has an infinite objective")
    trace = [f - offset]
    alpha = 1.0
    it = 0
    message = "max_iterations"
    converged = False
    while True:
        gnorm = float(np.linalg.norm(g))
        if gnorm < gtol:
            converged, message = True, "gtol"
            break
        if it >= max_iter:
            break
        step = alpha
        while True:
            x_new = x - step * g
            f_new, g_new = objective(_from_vector(x_new, dim))
            if g_new is not None and f_new <= f - armijo * step * gnorm ** 2:
                break
            step *= shrink
            if step < 1e-30:
                g_new = None
                break
        if g_new is None:
            message = "line_search_failed"
            break
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        alpha = float(s @ s) / sy if sy > 0 else 2.0 * step
        x, f, g = x_new, f_new, g_new
        it += 1
        trace.append(f - offset)
    param = CholeskyParam(_from_vector(x, dim))
    return OptimizerReport(
        iterations=it,
        objective=f - offset,
        gradient_norm=gnorm,
        estimate=param.density(),
        converged=converged,
        objective_trace=trace,
        param=param,
        message=message,
    )


def _initial_T(init, dim):
    if init is None:
        return CholeskyParam.maximally_mixed(dim).T
    if isinstance(init, CholeskyParam):
        return init.T
    return np.asarray(init, dtype=np.complex128)


def minimize_cross_entropy(rho, init=None, gtol=GTOL, max_iter=MAX_ITER, shrink=SHRINK,
                           armijo=ARMIJO, objective="cross_entropy"):
    """Minimise ``S(ρ, σ(T))`` over full-rank states ``σ``.

    ``objective="relative_entropy"`` minimises ``S(ρ‖σ)`` instead; the two
    differ by the constant ``S(ρ)`` and follow the same iterates.

    Returns an :class:`OptimizerReport`; ``converged`` is False when the
    iteration budget runs out or the line search stalls.
    """
    rho = as_density(rho)
    if objective not in ("cross_entropy", "relative_entropy"):
        raise ValueError(f"unknown objective {objective!r}")
    offset = von_neumann(rho) if objective == "relative_entropy" else 0.0
    T0 = _initial_T(init, rho.dim)
    return _descend(_cross_entropy_objective(rho), T0, gtol, max_iter, shrink, armijo, offset)


def _check_freqs(tset, freqs):
    if len(freqs) != len(tset.groups):
        raise ValueError("need one frequency vector per measurement group")
    out = []
    for g, q in zip(tset.groups, freqs):
        q = np.nan_to_num(np.asarray(q, dtype=float))
        if q.shape != (len(g),):
            raise ValueError("frequency vector length does not match its group")
        out.append(q)
    return out


def maximize_likelihood(tset, freqs, init=None, gtol=GTOL, max_iter=MAX_ITER, shrink=SHRINK,
                        armijo=ARMIJO):
    """Maximise ``Σ_j n_j Σ_k q_jk log tr(E_jk σ(T))``.

    The report's ``objective`` is the *negative* weighted log-likelihood
    (the quantity actually minimised).
    """
    freqs = _check_freqs(tset, freqs)
    T0 = _initial_T(init, tset.dim)
    return _descend(_likelihood_objective(tset, freqs), T0, gtol, max_iter, shrink, armijo)


def _hermitian_basis(dim):
    """Orthonormal (Hilbert–Schmidt) basis of Hermitian ``dim × dim`` matrices."""
    basis = []
    for i in range(dim):
        B = np.zeros((dim, dim), dtype=np.complex128)
        B[i, i] = 1
        basis.append(B)
    for i in range(dim):
        for j in range(i + 1, dim):
            B = np.zeros((dim, dim), dtype=np.complex128)
            B[i, j] = B[j, i] = 1 / np.sqrt(2)
            basis.append(B)
            B = np.zeros((dim, dim), dtype=np.complex128)
            B[i, j], B[j, i] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            basis.append(B)
    return np.array(basis)


def linear_inversion(tset, freqs):
    """Least-squares Hermitian ``X`` with ``tr X = 1`` and ``tr(E_jk X) ≈ q_jk``.

    The result is generally not positive semidefinite when ``freqs`` are
    sampled; see :func:`project_to_density`.
    """
    if not isinstance(tset, TomographicSet):
        raise IncompleteSet("linear inversion needs a validated TomographicSet")
    freqs = _check_freqs(tset, freqs)
    d = tset.dim
    B = _hermitian_basis(d)
    effects = np.array([E for g in tset.groups for E in g.effects])
    A = np.real(np.einsum("kij,bji->kb", effects, B))
    q = np.concatenate(freqs)
    tr = np.real(np.einsum("bii->b", B))
    x0 = tr / (tr @ tr)
    N = scipy.linalg.null_space(tr[None, :])
    y, *_ = np.linalg.lstsq(A @ N, q - A @ x0, rcond=None)
    x = x0 + N @ y
    return hermitize(np.einsum("b,bij->ij", x, B))


def project_to_density(X):
    """Clip negative eigenvalues of a Hermitian matrix and renormalise to unit trace."""
    eig = eig_hermitian(check_hermitian(X))
    w = np.clip(eig.eigenvalues, 0.0, None)
    if w.sum() <= 0:
        raise NotPsd("matrix has no positive eigenvalue")
    U = eig.eigenvectors
    return DensityMatrix((U * (w / w.sum())) @ U.conj().T)


def _tomography_data(X):
    """Accept a dataset or a ``(TomographicSet, freqs)`` pair."""
    if isinstance(X, MeasurementDataset):
        Nj = X.group_counts()
        if Nj.sum() == 0:
            raise ValueError("empty dataset")
        tset = TomographicSet(X.measurements, Nj / Nj.sum())
        return tset, [np.nan_to_num(f) for f in X.frequencies()]
    try:
        tset, freqs = X
    except (TypeError, ValueError):
        raise TypeError("expected a MeasurementDataset or a (TomographicSet, freqs) pair") from None
    return tset, freqs


def _weighted_log_likelihood(tset, freqs, sigma):
    total = 0.0
    for w, p, q in zip(tset.weights, tset.probabilities(sigma), freqs):
        seen = np.asarray(q) > 0
        if w == 0 or not seen.any():
            continue
        if np.any(p[seen] <= ZERO_PROB_TOL):
            return -math.inf
        total += w * float(np.sum(np.asarray(q)[seen] * np.log(p[seen])))
    return total


class _StateEstimator(BaseEstimator):
    def score(self, X, y=None):
        """Average log-likelihood of ``X`` under the fitted state (higher is better)."""
        check_is_fitted(self, "estimate_")
        if isinstance(X, MeasurementDataset):
            return avg_log_likelihood(X, self.estimate_)
        tset, freqs = _tomography_data(X)
        return _weighted_log_likelihood(tset, _check_freqs(tset, freqs), self.estimate_)


class LinearInversionTomography(_StateEstimator):
    """Linear-inversion tomography.

    Parameters
    ----------
    project : bool, default=True
        Repair the raw inverse into a density matrix with
        :func:`project_to_density`.

    Attributes
    ----------
    raw_estimate_ : ndarray
        Unconstrained Hermitian least-squares solution.
    estimate_ : DensityMatrix
    """

    def __init__(self, project=True):
        self.project = project

    def fit(self, X, y=None):
        tset, freqs = _tomography_data(X)
        self.raw_estimate_ = linear_inversion(tset, freqs)
        if self.project:
            self.estimate_ = project_to_density(self.raw_estimate_)
        else:
            self.estimate_ = DensityMatrix(self.raw_estimate_)
        return self


class MaxLikelihoodTomography(_StateEstimator):
    """Maximum-likelihood tomography over full-rank states.

    ``fit`` takes a :class:`~qxent.empirical.MeasurementDataset` (group
    weights and frequencies come from its counts) or a
    ``(TomographicSet, freqs)`` pair.
    """

    def __init__(self, gtol=GTOL, max_iter=MAX_ITER, shrink=SHRINK, armijo=ARMIJO, init=None):
        self.gtol = gtol
        self.max_iter = max_iter
        self.shrink = shrink
        self.armijo = armijo
        self.init = init

    def fit(self, X, y=None):
        tset, freqs = _tomography_data(X)
        self.report_ = maximize_likelihood(tset, freqs, self.init, self.gtol, self.max_iter,
                                           self.shrink, self.armijo)
        self.estimate_ = self.report_.estimate
        return self


class CrossEntropyMinimizer(BaseEstimator):
    """Fit a full-rank model ``σ`` to an unmeasured state by minimising ``S(ρ, σ)``."""

    def __init__(self, gtol=GTOL, max_iter=MAX_ITER, shrink=SHRINK, armijo=ARMIJO, init=None,
                 objective="cross_entropy"):
        self.gtol = gtol
        self.max_iter = max_iter
        self.shrink = shrink
        self.armijo = armijo
        self.init = init
        self.objective = objective

    def fit(self, X, y=None):
        self.report_ = minimize_cross_entropy(X, self.init, self.gtol, self.max_iter,
                                              self.shrink, self.armijo, self.objective)
        self.estimate_ = self.report_.estimate
        return self

    def score(self, X, y=None):
        """Negative cross entropy ``-S(X, σ*)``."""
        check_is_fitted(self, "estimate_")
        return -quantum_cross_entropy(X, self.estimate_)
