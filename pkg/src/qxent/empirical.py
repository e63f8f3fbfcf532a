"""Measurement datasets, empirical distributions/density matrices and likelihoods."""

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_random_state
from .entropy import ClassicalDist, as_dist, quantum_cross_entropy
from .exceptions import DimensionMismatch, LabelMismatch, ModelMismatch, ZeroProbabilityRecord
from .measurement import ZERO_PROB_TOL, Povm, ProjectiveMeasurement, manifest_hash, sample_outcomes
from .states import DensityMatrix, as_density

OPERATOR = "operator"
STATE = "state"


@dataclass(frozen=True, eq=False)
class MeasurementDataset:
    """Ordered outcome records ``(j, k)``: group ``j`` was measured, outcome ``k`` seen.

    ``measurements[j]`` is the measurement used for group ``j``; record ``n``
    refers to the effect ``measurements[groups[n]].effects[outcomes[n]]``.
    """

    measurements: tuple = field(repr=False)
    groups: np.ndarray = field(repr=False)
    outcomes: np.ndarray = field(repr=False)
    seed: int = None

    def __post_init__(self):
        meas = tuple(self.measurements)
        if not meas:
            raise ValueError("a dataset needs at least one measurement group")
        d = meas[0].dim
        if any(m.dim != d for m in meas):
            raise DimensionMismatch("measurement groups differ in dimension")
        g = np.asarray(self.groups, dtype=np.int64).ravel().copy()
        k = np.asarray(self.outcomes, dtype=np.int64).ravel().copy()
        if g.shape != k.shape:
            raise ValueError("groups and outcomes differ in length")
        if g.size and (g.min() < 0 or g.max() >= len(meas)):
            raise ValueError("record refers to a non-existent measurement group")
        sizes = np.array([len(m) for m in meas])
        if k.size and (k.min() < 0 or np.any(k >= sizes[g])):
            raise ValueError("record refers to an outcome outside its measurement group")
        g.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "measurements", meas)
        object.__setattr__(self, "groups", g)
        object.__setattr__(self, "outcomes", k)

    def __len__(self):
        return self.groups.size

    def __repr__(self):
        return (f"MeasurementDataset(n_records={len(self)}, n_groups={len(self.measurements)}, "
                f"dim={self.dim}, seed={self.seed})")

    @property
    def dim(self):
        return self.measurements[0].dim

    @property
    def is_projective(self):
        return all(isinstance(m, ProjectiveMeasurement) for m in self.measurements)

    @property
    def manifest(self):
        return manifest_hash(self.measurements)

    def group_counts(self):
        """``N_j`` for every group."""
        return np.bincount(self.groups, minlength=len(self.measurements))

    def counts(self):
        """List of ``N_jk`` vectors, one per group."""
        return [np.bincount(self.outcomes[self.groups == j], minlength=len(m))
                for j, m in enumerate(self.measurements)]

    def frequencies(self):
        """Per-group relative frequencies ``N_jk / N_j`` (NaN for unused groups)."""
        return [c / c.sum() if c.sum() else np.full(c.shape, np.nan) for c in self.counts()]

    def effect(self, n):
        return self.measurements[self.groups[n]].effects[self.outcomes[n]]

    def records(self):
        return list(zip(self.groups.tolist(), self.outcomes.tolist()))

    def merge(self, *others):
        """Concatenate datasets taken with the same measurement manifest."""
        for o in others:
            if o.manifest != self.manifest:
                raise ValueError("cannot merge datasets with different measurement manifests")
        return MeasurementDataset(
            self.measurements,
            np.concatenate([self.groups] + [o.groups for o in others]),
            np.concatenate([self.outcomes] + [o.outcomes for o in others]),
            self.seed,
        )


def sample_dataset(measurements, rho, shots, rng=None, seed=None):
    """Simulate measuring ``rho``: ``shots[j]`` (or ``shots``) draws from group ``j``."""
    if isinstance(measurements, (ProjectiveMeasurement, Povm)):
        measurements = [measurements]
    measurements = list(getattr(measurements, "groups", measurements))
    if seed is not None and rng is None:
        rng = seed
    rng = check_random_state(rng)
    shots = np.broadcast_to(np.asarray(shots, dtype=np.int64), (len(measurements),))
    groups, outcomes = [], []
    for j, (m, n) in enumerate(zip(measurements, shots)):
        groups.append(np.full(n, j))
        outcomes.append(sample_outcomes(m, rho, n, rng))
    return MeasurementDataset(measurements, np.concatenate(groups), np.concatenate(outcomes), seed)


@dataclass(frozen=True, eq=False)
class EmpiricalState:
    """An empirical density matrix together with how it was built."""

    perspective: str
    matrix: DensityMatrix
    source: MeasurementDataset = field(repr=False)
    model: DensityMatrix = field(default=None, repr=False)

    def __post_init__(self):
        if self.perspective not in (OPERATOR, STATE):
            raise ValueError(f"unknown perspective {self.perspective!r}")
        if self.perspective == STATE and self.model is None:
            raise ValueError("state-perspective empirical matrices must record their model")

    def __array__(self, dtype=None, copy=None):
        return self.matrix.__array__(dtype)

    def check_model(self, sigma):
        """Raise :class:`ModelMismatch` if ``sigma`` differs from the recorded model."""
        if self.perspective != STATE:
            return
        sigma = as_density(sigma)
        if sigma is not self.model and not np.array_equal(sigma.data, self.model.data):
            raise ModelMismatch("state-perspective empirical matrix was built from a different σ")


def _require_projective(ds):
    if not ds.is_projective:
        raise TypeError("empirical density matrices are only defined for projective datasets")


def empirical_operator(ds):
    """``ρ^O = (1/N) Σ_n Π_n / tr Π_n``."""
    _require_projective(ds)
    N = len(ds)
    if N == 0:
        raise ValueError("empty dataset")
    acc = np.zeros((ds.dim, ds.dim), dtype=np.complex128)
    for m, c in zip(ds.measurements, ds.counts()):
        for P, n in zip(m.projectors, c):
            if n:
                acc += (n / N) * P / np.trace(P).real
    return EmpiricalState(OPERATOR, DensityMatrix(acc), ds)


def _record_probabilities(ds, sigma):
    """``tr(E_jk σ)`` for every (group, outcome) pair, as a list of vectors."""
    S = np.asarray(as_density(sigma))
    if S.shape[0] != ds.dim:
        raise DimensionMismatch("model and dataset differ in dimension")
    return [np.array([np.real(np.sum(E.T * S)) for E in m.effects]) for m in ds.measurements]


def empirical_state(ds, sigma):
    """``ρ^S = (1/N) Σ_n Π_n σ Π_n / tr(Π_n σ)``; the result records ``sigma``."""
    _require_projective(ds)
    sigma = as_density(sigma)
    N = len(ds)
    if N == 0:
        raise ValueError("empty dataset")
    probs = _record_probabilities(ds, sigma)
    S = sigma.data
    acc = np.zeros((ds.dim, ds.dim), dtype=np.complex128)
    for j, (m, c, p) in enumerate(zip(ds.measurements, ds.counts(), probs)):
        for k, (P, n) in enumerate(zip(m.projectors, c)):
            if not n:
                continue
            if p[k] <= ZERO_PROB_TOL:
                first = int(np.flatnonzero((ds.groups == j) & (ds.outcomes == k))[0])
                raise ZeroProbabilityRecord(first)
            acc += (n / N) * (P @ S @ P) / p[k]
    acc = 0.5 * (acc + acc.conj().T)
    return EmpiricalState(STATE, DensityMatrix(acc), ds, sigma)


def avg_log_likelihood(ds, sigma, grouped=False):
    """Average log-likelihood ``l(σ) = (1/N) Σ_n log tr(E_n σ)``.

    Returns ``-inf`` if any observed record has zero probability under
    ``sigma``. ``grouped=True`` evaluates the regrouped form
    ``Σ_jk (N_jk / N) log tr(E_jk σ)`` instead of the per-record mean.
    """
    N = len(ds)
    if N == 0:
        raise ValueError("empty dataset")
    probs = _record_probabilities(ds, sigma)
    if grouped:
        total = 0.0
        for c, p in zip(ds.counts(), probs):
            seen = c > 0
            if np.any(p[seen] <= ZERO_PROB_TOL):
                return -math.inf
            total += float(np.sum(c[seen] / N * np.log(p[seen])))
        return total
    flat = np.concatenate(probs)
    offsets = np.concatenate([[0], np.cumsum([len(p) for p in probs])[:-1]])
    per_record = flat[offsets[ds.groups] + ds.outcomes]
    if np.any(per_record <= ZERO_PROB_TOL):
        return -math.inf
    return float(np.mean(np.log(per_record)))


def cross_entropy(emp, sigma):
    """``S(ρ^O, σ)`` or ``S(ρ^S, σ)``, refusing a state-perspective matrix built from another σ."""
    emp.check_model(sigma)
    return quantum_cross_entropy(emp.matrix, sigma)


def likelihood_margin(emp, sigma):
    """``S(ρ^X, σ) + l(σ)`` over the dataset ``emp`` was built from."""
    return cross_entropy(emp, sigma) + avg_log_likelihood(emp.source, sigma)


def empirical_distribution(data, support):
    """``P_D(x) = (1/N) Σ_i 1{x = x_i}`` over the labels in ``support``."""
    support = tuple(support)
    data = list(data)
    if not data:
        raise ValueError("empty dataset")
    counts = Counter(data)
    unknown = set(counts) - set(support)
    if unknown:
        raise LabelMismatch(f"outcomes {sorted(map(str, unknown))} not in the support")
    N = len(data)
    return ClassicalDist(np.array([counts[x] / N for x in support]), support)


def classical_avg_log_likelihood(data, model):
    """``l(θ) = (1/N) Σ_i log P(x_i | θ)`` for a labelled model distribution."""
    model = as_dist(model)
    data = list(data)
    if not data:
        raise ValueError("empty dataset")
    try:
        p = np.array([model.prob(x) for x in data])
    except (ValueError, IndexError) as exc:
        raise LabelMismatch(str(exc)) from exc
    if np.any(p == 0):
        return -math.inf
    return float(np.mean(np.log(p)))
