"""Classical and quantum entropies, cross entropies and fidelities.

All logarithms are natural (nats). Quantities that can diverge return a
Python float that may be ``math.inf``; report writers serialise that as the
literal ``"inf"``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, LabelMismatch
from .matfun import SUPPORT_TOL, matrix_log, support_mask
from .states import as_density

SUPPORT_VIOLATION_TOL = 1e-9
# eigenvalues this far below the top one are rounding noise, not spectrum
_NOISE_TOL = 1e-14
_DIST_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ClassicalDist:
    """A finite probability vector with optional outcome labels."""

    probs: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).ravel()
        if p.size == 0:
            raise ValueError("empty distribution")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > _DIST_TOL:
            raise ValueError(f"probabilities sum to {p.sum():.17g}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != p.size or len(set(labels)) != p.size:
                raise LabelMismatch("labels must be unique and match the number of probabilities")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.probs.size

    def prob(self, label):
        if self.labels is None:
            return float(self.probs[label])
        return float(self.probs[self.labels.index(label)])


def as_dist(p):
    return p if isinstance(p, ClassicalDist) else ClassicalDist(p)


def _paired(p, q):
    p, q = as_dist(p), as_dist(q)
    if len(p) != len(q):
        raise LabelMismatch(f"distributions have {len(p)} and {len(q)} outcomes")
    if p.labels is not None and q.labels is not None and p.labels != q.labels:
        if set(p.labels) != set(q.labels):
            raise LabelMismatch("distributions are over different label sets")
        order = [q.labels.index(lab) for lab in p.labels]
        return p.probs, q.probs[order]
    return p.probs, q.probs


def shannon(p):
    """Shannon entropy ``-Σ p log p`` with ``0 log 0 = 0``."""
    p = as_dist(p).probs
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def classical_cross_entropy(p, q):
    """``H(p, q) = -Σ p(x) log q(x)``; ``inf`` if q misses part of p's support."""
    p, q = _paired(p, q)
    on = p > 0
    if np.any(q[on] == 0):
        return math.inf
    return float(-np.sum(p[on] * np.log(q[on])))


def kl_divergence(p, q):
    p, q = _paired(p, q)
    on = p > 0
    if np.any(q[on] == 0):
        return math.inf
    return float(np.sum(p[on] * (np.log(p[on]) - np.log(q[on]))))


def classical_fidelity(p, q):
    """``(Σ √(p q))²``, in [0, 1]."""
    p, q = _paired(p, q)
    return float(min(1.0, np.sum(np.sqrt(p * q)) ** 2))


def _pair(rho, sigma):
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"states have dimensions {rho.dim} and {sigma.dim}")
    return rho, sigma


def von_neumann(rho):
    """Von Neumann entropy ``-tr(ρ log ρ)`` in nats."""
    w = as_density(rho).eigenvalues
    w = w[support_mask(w, SUPPORT_TOL)]
    return float(-np.sum(w * np.log(w)))


def support_violation(rho, sigma, support_tol=SUPPORT_TOL):
    """Largest entry of ``(I - P_σ) ρ (I - P_σ)``; zero when supp ρ ⊆ supp σ."""
    rho, sigma = _pair(rho, sigma)
    mask = support_mask(sigma.eigenvalues, support_tol)
    V = sigma.eig.eigenvectors[:, ~mask]
    if V.shape[1] == 0:
        return 0.0
    outside = V @ (V.conj().T @ rho.data @ V) @ V.conj().T
    return float(np.max(np.abs(outside)))


def quantum_cross_entropy(rho, sigma, support_tol=SUPPORT_TOL):
    """Quantum cross entropy ``S(ρ, σ) = -tr(ρ log σ)``.

    Returns ``math.inf`` when the support of ``rho`` is not contained in the
    support of ``sigma`` (detected as ``max|(I-P_σ)ρ(I-P_σ)| > 1e-9``).
    Otherwise the logarithm is taken on the support of ``sigma`` only.

    Examples
    --------
    >>> import numpy as np
    >>> round(quantum_cross_entropy(np.diag([1.0, 0.0]), np.diag([2/3, 1/3])), 6)
    0.405465
    """
    rho, sigma = _pair(rho, sigma)
    if support_violation(rho, sigma, support_tol) > SUPPORT_VIOLATION_TOL:
        return math.inf
    L = matrix_log(sigma.eig, support_tol)
    # tr(ρL) without forming the product
    return float(-np.real(np.sum(rho.data.T * L)))


def quantum_relative_entropy(rho, sigma, support_tol=SUPPORT_TOL):
    """``S(ρ‖σ) = tr ρ log ρ - tr ρ log σ``, ``inf`` on support violation."""
    rho, sigma = _pair(rho, sigma)
    s = quantum_cross_entropy(rho, sigma, support_tol)
    if math.isinf(s):
        return s
    # tr ρ log ρ from the matrix logarithm rather than the spectrum, so that
    # S(ρ,σ) = S(ρ‖σ) + S(ρ) is a genuine consistency check
    log_rho = matrix_log(rho.eig, support_tol)
    return float(np.real(np.sum(rho.data.T * log_rho))) + s


def _denoised_sqrt(rho):
    w, U = rho.eig.eigenvalues, rho.eig.eigenvectors
    keep = w > _NOISE_TOL * max(w[-1], 0.0)
    Uk = U[:, keep]
    return (Uk * np.sqrt(w[keep])) @ Uk.conj().T


def quantum_fidelity(rho, sigma):
    """Uhlmann fidelity ``(tr √(√ρ σ √ρ))²``.

    Evaluated as the squared nuclear norm of ``√ρ √σ``, which equals the
    textbook expression but avoids taking square roots of rounding noise in
    the spectrum of ``√ρ σ √ρ``.
    """
    rho, sigma = _pair(rho, sigma)
    s = np.linalg.svd(_denoised_sqrt(rho) @ _denoised_sqrt(sigma), compute_uv=False)
    return float(min(1.0, s.sum() ** 2))


def overlap(rho, sigma):
    """Hilbert–Schmidt overlap ``tr(ρσ)``."""
    rho, sigma = _pair(rho, sigma)
    return float(np.real(np.sum(rho.data.T * sigma.data)))


def _neg_log(x):
    return math.inf if x <= 0 else -math.log(x)


def _gap(upper, lower):
    if math.isinf(upper) and math.isinf(lower):
        return 0.0
    return upper - lower


@dataclass(frozen=True)
class BoundChain:
    """The two lower bounds on ``S(ρ, σ)`` and the slack in each."""

    cross_entropy: float
    neg_log_overlap: float
    neg_log_fidelity: float

    @property
    def overlap_gap(self):
        """``S(ρ,σ) + log tr(ρσ)``; non-negative up to rounding."""
        return _gap(self.cross_entropy, self.neg_log_overlap)

    @property
    def fidelity_gap(self):
        """``-log tr(ρσ) + log F(ρ,σ)``; non-negative up to rounding."""
        return _gap(self.neg_log_overlap, self.neg_log_fidelity)

    def holds(self, tol=1e-9):
        return self.overlap_gap >= -tol and self.fidelity_gap >= -tol

    def as_dict(self):
        return {
            "S": self.cross_entropy,
            "neg_log_overlap": self.neg_log_overlap,
            "neg_log_fidelity": self.neg_log_fidelity,
            "overlap_gap": self.overlap_gap,
            "fidelity_gap": self.fidelity_gap,
        }


def bound_chain(rho, sigma):
    """Evaluate ``S(ρ,σ) ≥ -log tr(ρσ) ≥ -log F(ρ,σ)`` for one pair."""
    rho, sigma = _pair(rho, sigma)
    return BoundChain(
        cross_entropy=quantum_cross_entropy(rho, sigma),
        neg_log_overlap=_neg_log(overlap(rho, sigma)),
        neg_log_fidelity=_neg_log(quantum_fidelity(rho, sigma)),
    )
