"""Named Monte-Carlo and fixture checks with worst-case margins.

Every check draws its trials from per-trial random streams keyed by
``(seed, group id, dim, trial)``, so a result depends only on its id, seed
and parameters, never on scheduling. Each trial produces a dict of inputs
(plain arrays and numbers) and a margin function maps those inputs to a
signed margin. The inputs of the worst trial are kept as the witness and
:func:`replay` recomputes its margin from them.

Margins follow one convention per kind:

* ``inequality``: pass iff ``worst_margin >= -tolerance`` (worst = minimum);
* ``identity``: pass iff ``|worst_margin| <= tolerance`` (worst = largest
  magnitude).

Checks of an "if and only if" statement are expressed as inequalities on a
slack that is positive exactly when the instance lands on the expected side.
"""

import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .empirical import (
    MeasurementDataset,
    avg_log_likelihood,
    classical_avg_log_likelihood,
    empirical_distribution,
    empirical_operator,
    empirical_state,
    sample_dataset,
)
from .entropy import (
    ClassicalDist,
    bound_chain,
    classical_cross_entropy,
    quantum_cross_entropy,
    quantum_relative_entropy,
    von_neumann,
)
from .matfun import commutator_norm, matrix_log, numerical_rank
from .measurement import (
    Povm,
    ProjectiveMeasurement,
    basis_measurement,
    dephase,
    measurement_from_observable,
    povm_post_state,
)
from .states import (
    as_density,
    maximally_mixed,
    mixture,
    pure,
    random_density,
    random_pure,
    random_unitary,
    support_projector,
    tensor,
    trace_distance,
    unitary_conjugate,
)

INEQUALITY = "inequality"
IDENTITY = "identity"

INEQ_TOL = 1e-9
EQUALITY_TOL = 1e-9
STRICT_GAP = 1e-6
COMMUTE_TOL = 1e-9
RANK_TOL = 1e-8
N_SAMPLES = 200

SUITES = ("propositions", "theorem1", "equality", "povm-counterexample", "lemma-a1", "lemma-a2")


@dataclass
class CheckResult:
    check_id: str
    kind: str
    trials: int
    worst_margin: float
    tolerance: float
    passed: bool
    witness: dict = None
    params: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "check_id": self.check_id,
            "kind": self.kind,
            "trials": self.trials,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "params": self.params,
            "witness": self.witness,
        }


def _passes(kind, margin, tol):
    if kind == INEQUALITY:
        return margin >= -tol
    return abs(margin) <= tol


# witness (de)serialisation -------------------------------------------------

def encode(value):
    """Make trial inputs JSON-friendly; complex matrices become [re, im] literals."""
    if isinstance(value, dict):
        return {k: encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if hasattr(value, "__array__") and not isinstance(value, np.ndarray):
        value = np.asarray(value)
    if isinstance(value, np.ndarray):
        if value.ndim == 2 and np.iscomplexobj(value):
            return {"matrix": [[[float(z.real), float(z.imag)] for z in row] for row in value]}
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def decode(value):
    if isinstance(value, dict):
        if set(value) == {"matrix"}:
            a = np.asarray(value["matrix"], dtype=float)
            return a[..., 0] + 1j * a[..., 1]
        return {k: decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [decode(v) for v in value]
    return value


# runner ---------------------------------------------------------------------

_MARGINS = {}
_KINDS = {}


def _margin(check_id, kind):
    def register(fn):
        _MARGINS[check_id] = fn
        _KINDS[check_id] = kind
        return fn
    return register


def trial_rng(seed, group_id, dim, trial):
    key = (zlib.crc32(group_id.encode()), int(dim), int(trial))
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def _run(group_id, checks, make_inputs, dim, trials, seed, n_jobs=1, params=None):
    """Run ``trials`` draws of ``make_inputs`` and evaluate each check on them.

    ``checks`` is a list of ``(check_id, tolerance)``; the margin function
    and kind come from the registry.
    """
    def one(i):
        inputs = make_inputs(trial_rng(seed, group_id, dim, i), i)
        return inputs, [_MARGINS[cid](**inputs) for cid, _ in checks]

    if n_jobs > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            outcomes = list(pool.map(one, range(trials)))
    else:
        outcomes = [one(i) for i in range(trials)]

    base = {"dim": dim, "seed": seed}
    base.update(params or {})
    results = []
    for c, (cid, tol) in enumerate(checks):
        kind = _KINDS[cid]
        worst_i, worst = None, (math.inf if kind == INEQUALITY else 0.0)
        for i, (_, margins) in enumerate(outcomes):
            m = margins[c]
            if kind == INEQUALITY and (m < worst or worst_i is None):
                worst_i, worst = i, m
            elif kind == IDENTITY and (abs(m) > abs(worst) or worst_i is None):
                worst_i, worst = i, m
        witness = None
        if worst_i is not None:
            witness = {"trial": worst_i, "inputs": encode(outcomes[worst_i][0])}
        results.append(CheckResult(cid, kind, trials, float(worst), tol,
                                   bool(_passes(kind, worst, tol)), witness, dict(base)))
    return results


def replay(result):
    """Recompute the margin stored in ``result``'s witness."""
    if result.witness is None:
        raise ValueError("result has no witness (zero trials)")
    inputs = decode(result.witness["inputs"])
    return _MARGINS[result.check_id](**inputs)


# shared generators ------------------------------------------------------------

def _rank_between(rng, lo, hi):
    return int(rng.integers(lo, hi + 1))


def _raw(rho):
    return np.array(as_density(rho))


def _random_observable(dim, rng, degenerate):
    U = random_unitary(dim, rng)
    if degenerate and dim > 1 and rng.random() < 0.5:
        values = rng.integers(0, dim - 1, size=dim).astype(float)
    else:
        values = np.arange(dim, dtype=float) + rng.random(dim) * 0.5
    return (U * values) @ U.conj().T


def _empirical_pair(projectors, outcomes, sigma):
    meas = ProjectiveMeasurement(projectors)
    ds = MeasurementDataset([meas], np.zeros(len(outcomes), dtype=int), outcomes)
    return ds, as_density(sigma)


# likelihood bound: S(ρ^X, σ) >= -l(σ) -------------------------------------------

@_margin("theorem1-operator", INEQUALITY)
def theorem1_operator_margin(sigma, projectors, outcomes, rho=None):
    """``S(ρ^O, σ) + l(σ)``; ``rho`` is the sampled state, kept for audit only."""
    ds, sigma = _empirical_pair(projectors, outcomes, sigma)
    return quantum_cross_entropy(empirical_operator(ds).matrix, sigma) + avg_log_likelihood(ds, sigma)


@_margin("theorem1-state", INEQUALITY)
def theorem1_state_margin(sigma, projectors, outcomes, rho=None):
    """``S(ρ^S, σ) + l(σ)``."""
    ds, sigma = _empirical_pair(projectors, outcomes, sigma)
    return (quantum_cross_entropy(empirical_state(ds, sigma).matrix, sigma)
            + avg_log_likelihood(ds, sigma))


def check_theorem1(dim, trials, allow_degenerate=True, seed=0, n_samples=N_SAMPLES, n_jobs=1):
    """Random full-rank ``ρ, σ`` and observables; ``n_samples`` outcomes per trial."""
    def make(rng, i):
        rho = random_density(dim, rng=rng)
        sigma = random_density(dim, rng=rng)
        meas = measurement_from_observable(_random_observable(dim, rng, allow_degenerate))
        ds = sample_dataset(meas, rho, n_samples, rng)
        return {"rho": _raw(rho), "sigma": _raw(sigma),
                "projectors": list(meas.projectors), "outcomes": ds.outcomes}

    return _run("theorem1", [("theorem1-operator", INEQ_TOL), ("theorem1-state", INEQ_TOL)],
                make, dim, trials, seed, n_jobs,
                {"allow_degenerate": bool(allow_degenerate), "n_samples": n_samples})


# equality conditions ---------------------------------------------------------------

def _side_slack(gap, expect_equal):
    if expect_equal:
        return EQUALITY_TOL - abs(gap)
    return gap - STRICT_GAP


@_margin("equality-operator", INEQUALITY)
def equality_operator_slack(sigma, projectors, outcomes, expect_operator, expect_state, case):
    """Positive iff ``S(ρ^O,σ) + l(σ)`` is ~0 when expected, and > 1e-6 otherwise."""
    gap = theorem1_operator_margin(sigma, projectors, outcomes)
    return _side_slack(gap, expect_operator)


@_margin("equality-state", INEQUALITY)
def equality_state_slack(sigma, projectors, outcomes, expect_operator, expect_state, case):
    gap = theorem1_state_margin(sigma, projectors, outcomes)
    return _side_slack(gap, expect_state)


def _nonuniform_probs(dim, rng):
    # well-separated eigenvalues so "non-uniform" is unambiguous
    p = np.sort(rng.dirichlet(np.ones(dim)))[::-1] + np.linspace(0.5, 0.0, dim) / dim
    return p / p.sum()


EQUALITY_CASES = ("commuting-rank1", "degenerate-ray", "non-commuting", "degenerate-full")


def equality_instance(case, dim, rng, n_samples=N_SAMPLES):
    """Construct one instance of an equality/strict-inequality case.

    ``commuting-rank1``: rank-1 projectors diagonalising ``σ``; equality in
    both perspectives. ``degenerate-ray``: one rank-2 projector whose range
    meets ``supp σ`` in a single ray; equality for ``ρ^S`` only.
    ``non-commuting``: rank-1 projectors in a basis rotated against ``σ``;
    strict in both. ``degenerate-full``: rank-2 projector with a full-rank,
    non-uniform ``σ``; strict in both.
    """
    U = random_unitary(dim, rng)
    p = _nonuniform_probs(dim, rng)
    if case == "commuting-rank1":
        projectors = list(basis_measurement(U).projectors)
        expect = (True, True)
    elif case == "degenerate-ray":
        p[1] = 0.0
        p = p / p.sum()
        projectors = _degenerate_projectors(U)
        expect = (False, True)
    elif case == "non-commuting":
        theta = rng.uniform(0.3, 1.2)
        R = np.eye(dim, dtype=complex)
        R[:2, :2] = [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        projectors = list(basis_measurement(U @ R).projectors)
        expect = (False, False)
    elif case == "degenerate-full":
        projectors = _degenerate_projectors(U)
        expect = (False, False)
    else:
        raise ValueError(f"unknown equality case {case!r}")
    sigma = (U * p) @ U.conj().T
    sigma = 0.5 * (sigma + sigma.conj().T)
    # data drawn from σ itself: every observed record has positive model probability
    ds = sample_dataset(ProjectiveMeasurement(projectors), sigma, n_samples, rng)
    return {"sigma": sigma, "projectors": projectors, "outcomes": ds.outcomes,
            "expect_operator": expect[0], "expect_state": expect[1], "case": case}


def _degenerate_projectors(U):
    dim = U.shape[0]
    first = U[:, :2] @ U[:, :2].conj().T
    return [first] + [np.outer(U[:, k], U[:, k].conj()) for k in range(2, dim)]


def check_equality_conditions(dim, trials=None, seed=0, n_jobs=1):
    """Cycle through :data:`EQUALITY_CASES`; ``trials`` defaults to 25 per case."""
    if dim < 2:
        raise ValueError("equality cases need dim >= 2")
    trials = 25 * len(EQUALITY_CASES) if trials is None else trials

    def make(rng, i):
        return equality_instance(EQUALITY_CASES[i % len(EQUALITY_CASES)], dim, rng)

    return _run("equality", [("equality-operator", 0.0), ("equality-state", 0.0)],
                make, dim, trials, seed, n_jobs,
                {"equality_tol": EQUALITY_TOL, "strict_gap": STRICT_GAP})


# POVM counterexample ----------------------------------------------------------------

def povm_counterexample_values(sigma, M1, M2):
    """The scalars of the qubit POVM counterexample for the given operators."""
    sigma = as_density(sigma)
    log_sigma = matrix_log(sigma.eig)
    values = {}
    for n, M in ((1, M1), (2, M2)):
        post = povm_post_state(M, sigma)
        values[f"tr_rho{n}_log_sigma"] = float(np.real(np.trace(np.asarray(post) @ log_sigma)))
        values[f"log_prob{n}"] = float(np.log(np.real(np.trace(M.conj().T @ M @ sigma.data))))
    values["post_state_distance"] = trace_distance(povm_post_state(M1, sigma),
                                                   povm_post_state(M2, sigma))
    values["completeness_error"] = float(np.max(np.abs(
        M1.conj().T @ M1 + M2.conj().T @ M2 - np.eye(M1.shape[0]))))
    # per-record state-perspective bound tr(ρ_n log σ) <= log tr(M_n†M_n σ); > 0 means violated
    values["record2_violation"] = values["tr_rho2_log_sigma"] - values["log_prob2"]
    return values


@_margin("povm-counterexample", IDENTITY)
def povm_counterexample_margin(sigma, M1, M2):
    """Largest deviation from the expected fixture values (inf if no violation)."""
    v = povm_counterexample_values(sigma, np.asarray(M1), np.asarray(M2))
    if not v["record2_violation"] > 0:
        return math.inf
    devs = [
        v["tr_rho1_log_sigma"] - math.log(2 / 3),
        v["tr_rho2_log_sigma"] - math.log(2 / 3),
        v["log_prob1"] - math.log(2 / 3),
        v["log_prob2"] - math.log(1 / 3),
        v["post_state_distance"],
        v["completeness_error"],
    ]
    return max(devs, key=abs)


def povm_counterexample_fixture():
    sigma = np.diag([2 / 3, 1 / 3]).astype(complex)
    M1 = np.array([[1, 0], [0, 0]], dtype=complex)
    M2 = np.array([[0, 1], [0, 0]], dtype=complex)
    return sigma, M1, M2


def check_povm_counterexample():
    sigma, M1, M2 = povm_counterexample_fixture()
    Povm([M1, M2])
    margin = povm_counterexample_margin(sigma, M1, M2)
    values = povm_counterexample_values(sigma, M1, M2)
    witness = {"trial": 0, "inputs": encode({"sigma": sigma, "M1": M1, "M2": M2}),
               "values": values}
    return CheckResult("povm-counterexample", IDENTITY, 1, float(margin), 1e-12,
                       bool(_passes(IDENTITY, margin, 1e-12)), witness,
                       {"dim": 2})


# rank and commutator lemmas ----------------------------------------------------------------------

def _random_projector(dim, rank, rng):
    V = random_unitary(dim, rng)[:, :rank]
    return V @ V.conj().T


@_margin("lemma-a1", IDENTITY)
def lemma_a1_margin(projector, sigma):
    """``rank(Π P_σ) - rank(Π σ Π)``."""
    P = np.asarray(projector)
    sigma = as_density(sigma)
    Ps = support_projector(sigma)
    lam = sigma.eigenvalues[-1]
    return (numerical_rank(P @ Ps, RANK_TOL, scale=1.0)
            - numerical_rank(P @ sigma.data @ P, RANK_TOL, scale=lam))


def check_lemma_a1(dim, trials, seed=0, n_jobs=1):
    def make(rng, i):
        r_sigma = _rank_between(rng, 1, dim)
        sigma = random_density(dim, r_sigma, rng)
        if i % 5 == 0 and r_sigma < dim:
            # projector onto (part of) the kernel of σ: both ranks are 0
            V = sigma.eig.eigenvectors[:, : dim - r_sigma]
            k = _rank_between(rng, 1, V.shape[1])
            P = V[:, :k] @ V[:, :k].conj().T
        else:
            P = _random_projector(dim, _rank_between(rng, 1, dim), rng)
        return {"projector": P, "sigma": _raw(sigma)}

    return _run("lemma-a1", [("lemma-a1", 0.0)], make, dim, trials, seed, n_jobs,
                {"rank_tol": RANK_TOL})


@_margin("lemma-a2", INEQUALITY)
def lemma_a2_slack(projector, sigma):
    """Positive iff ``[ΠσΠ, σ] = 0`` and ``[Π, σ] = 0`` hold or fail together.

    The slack is the distance of the nearer commutator norm from the
    threshold, signed by agreement. Instances with ``rank(ΠσΠ) != 1`` are
    outside the lemma and score ``-inf``.
    """
    P = np.asarray(projector)
    S = np.asarray(as_density(sigma))
    sandwich = P @ S @ P
    if numerical_rank(sandwich, RANK_TOL, scale=float(np.linalg.eigvalsh(S)[-1])) != 1:
        return -math.inf
    a = commutator_norm(P, S)
    b = commutator_norm(sandwich, S)
    agree = (a < COMMUTE_TOL) == (b < COMMUTE_TOL)
    slack = min(abs(a - COMMUTE_TOL), abs(b - COMMUTE_TOL))
    return slack if agree else -slack


LEMMA_A2_CASES = ("commuting", "rank1-projector", "rank1-state", "tilted")


def lemma_a2_instance(case, dim, rng):
    U = random_unitary(dim, rng)
    if case == "commuting":
        # σ diagonal in U; Π covers exactly one index in supp σ
        p = rng.dirichlet(np.ones(dim))
        k = _rank_between(rng, 1, dim)
        idx = rng.permutation(dim)[:k]
        p[idx[1:]] = 0.0
        if p.sum() == 0:
            p[idx[0]] = 1.0
        p = p / p.sum()
        sigma = (U * p) @ U.conj().T
        P = U[:, idx] @ U[:, idx].conj().T
    elif case == "rank1-projector":
        sigma = np.asarray(random_density(dim, rng=rng))
        P = _random_projector(dim, 1, rng)
    elif case == "rank1-state":
        sigma = np.asarray(random_density(dim, 1, rng))
        P = _random_projector(dim, _rank_between(rng, 1, dim), rng)
    elif case == "tilted":
        p = np.sort(rng.dirichlet(np.ones(dim)))[::-1] + 0.1
        p = p / p.sum()
        sigma = np.diag(p).astype(complex)
        theta = rng.uniform(0.1, 0.7)
        v = np.zeros(dim, dtype=complex)
        v[0], v[1] = np.cos(theta), np.sin(theta)
        P = np.outer(v, v.conj())
    else:
        raise ValueError(f"unknown lemma case {case!r}")
    return {"projector": P, "sigma": 0.5 * (sigma + np.conj(sigma).T)}


def check_lemma_a2(dim, trials, seed=0, n_jobs=1):
    if dim < 2:
        raise ValueError("lemma checks need dim >= 2")

    def make(rng, i):
        return lemma_a2_instance(LEMMA_A2_CASES[i % len(LEMMA_A2_CASES)], dim, rng)

    return _run("lemma-a2", [("lemma-a2", 0.0)], make, dim, trials, seed, n_jobs,
                {"commute_tol": COMMUTE_TOL, "rank_tol": RANK_TOL})


# properties of S(ρ, σ) -------------------------------------------------------------------

@_margin("zero-iff-pure", IDENTITY)
def zero_margin(rho, sigma):
    return quantum_cross_entropy(rho, sigma)


@_margin("positivity", INEQUALITY)
def positivity_slack(rho, sigma):
    """``S < 1e-9`` must imply ``ρ = σ`` pure; otherwise the slack is ``S`` itself."""
    s = quantum_cross_entropy(rho, sigma)
    if s < 1e-9:
        return min(1e-5 - trace_distance(rho, sigma), 1e-6 - von_neumann(rho))
    return s


@_margin("unitary-invariance", IDENTITY)
def unitary_margin(rho, sigma, unitary):
    U = np.asarray(unitary)
    return (quantum_cross_entropy(rho, sigma)
            - quantum_cross_entropy(unitary_conjugate(rho, U), unitary_conjugate(sigma, U)))


@_margin("linearity", IDENTITY)
def linearity_margin(rhos, weights, sigma):
    lhs = quantum_cross_entropy(mixture(weights, rhos), sigma)
    return lhs - sum(w * quantum_cross_entropy(r, sigma) for w, r in zip(weights, rhos))


@_margin("convexity", INEQUALITY)
def convexity_margin(rho, sigmas, weights):
    rhs = sum(q * quantum_cross_entropy(rho, s) for q, s in zip(weights, sigmas))
    return rhs - quantum_cross_entropy(rho, mixture(weights, sigmas))


@_margin("joint-convexity", INEQUALITY)
def joint_convexity_margin(rhos, p, sigmas, q):
    rhs = sum(pi * qj * quantum_cross_entropy(r, s)
              for pi, r in zip(p, rhos) for qj, s in zip(q, sigmas))
    return rhs - quantum_cross_entropy(mixture(p, rhos), mixture(q, sigmas))


@_margin("extensivity", IDENTITY)
def extensivity_margin(rho1, sigma1, rho2, sigma2):
    joint = quantum_cross_entropy(tensor(rho1, rho2), tensor(sigma1, sigma2))
    return joint - quantum_cross_entropy(rho1, sigma1) - quantum_cross_entropy(rho2, sigma2)


@_margin("overlap-bound", INEQUALITY)
def overlap_bound_margin(rho, sigma):
    return bound_chain(rho, sigma).overlap_gap


@_margin("fidelity-bound", INEQUALITY)
def fidelity_bound_margin(rho, sigma):
    return bound_chain(rho, sigma).fidelity_gap


@_margin("bound-equality", IDENTITY)
def bound_equality_margin(rho, sigma, case):
    chain = bound_chain(rho, sigma)
    if case == "identical-pure":
        return max(chain.overlap_gap, chain.fidelity_gap, key=abs)
    return chain.overlap_gap


@_margin("decomposition", IDENTITY)
def decomposition_margin(rho, sigma):
    return (quantum_cross_entropy(rho, sigma)
            - quantum_relative_entropy(rho, sigma) - von_neumann(rho))


@_margin("no-readout", IDENTITY)
def no_readout_margin(rho, projectors):
    dephased = dephase(rho, ProjectiveMeasurement(projectors))
    return quantum_cross_entropy(rho, dephased) - von_neumann(dephased)


@_margin("likelihood-identity", IDENTITY)
def likelihood_identity_margin(data, model):
    labels = tuple(range(len(model)))
    p_data = empirical_distribution(data, labels)
    theta = ClassicalDist(np.asarray(model), labels)
    return classical_cross_entropy(p_data, theta) + classical_avg_log_likelihood(data, theta)


def _some_rank(dim, rng):
    # half the draws full rank, the rest any rank
    return dim if rng.random() < 0.5 else _rank_between(rng, 1, dim)


def _pair_inputs(dim, rng):
    return {"rho": _raw(random_density(dim, _some_rank(dim, rng), rng)),
            "sigma": _raw(random_density(dim, rng=rng))}


BOUND_EQUALITY_CASES = ("maximally-mixed", "commuting-rank1", "identical-pure")


def _prop_generators(dim):
    def zero(rng, i):
        r = _raw(pure(random_pure(dim, rng)))
        return {"rho": r, "sigma": r}

    def positivity(rng, i):
        case = i % 4
        if case == 0:
            return _pair_inputs(dim, rng)
        r = random_density(dim, 1 if case in (1, 2) else dim, rng)
        s = r if case in (1, 3) else random_density(dim, rng=rng)
        return {"rho": _raw(r), "sigma": _raw(s)}

    def unitary(rng, i):
        d = _pair_inputs(dim, rng)
        d["unitary"] = random_unitary(dim, rng)
        return d

    def linearity(rng, i):
        k = 3
        return {"rhos": [_raw(random_density(dim, _some_rank(dim, rng), rng)) for _ in range(k)],
                "weights": rng.dirichlet(np.ones(k)),
                "sigma": _raw(random_density(dim, rng=rng))}

    def convexity(rng, i):
        k = 3
        return {"rho": _raw(random_density(dim, _some_rank(dim, rng), rng)),
                "sigmas": [_raw(random_density(dim, rng=rng)) for _ in range(k)],
                "weights": rng.dirichlet(np.ones(k))}

    def joint_convexity(rng, i):
        return {"rhos": [_raw(random_density(dim, _some_rank(dim, rng), rng)) for _ in range(2)],
                "p": rng.dirichlet(np.ones(2)),
                "sigmas": [_raw(random_density(dim, rng=rng)) for _ in range(3)],
                "q": rng.dirichlet(np.ones(3))}

    def extensivity(rng, i):
        return {"rho1": _raw(random_density(dim, _some_rank(dim, rng), rng)),
                "sigma1": _raw(random_density(dim, rng=rng)),
                "rho2": _raw(random_density(2, _some_rank(2, rng), rng)),
                "sigma2": _raw(random_density(2, rng=rng))}

    def bound_equality(rng, i):
        case = BOUND_EQUALITY_CASES[i % 3]
        if case == "maximally-mixed":
            rho, sigma = random_density(dim, _some_rank(dim, rng), rng), maximally_mixed(dim)
        elif case == "commuting-rank1":
            sigma = random_density(dim, rng=rng)
            v = sigma.eig.eigenvectors[:, int(rng.integers(dim))]
            rho = pure(v)
        else:
            rho = sigma = pure(random_pure(dim, rng))
        return {"rho": _raw(rho), "sigma": _raw(sigma), "case": case}

    def no_readout(rng, i):
        rho = random_density(dim, _some_rank(dim, rng), rng)
        meas = measurement_from_observable(_random_observable(dim, rng, True))
        return {"rho": _raw(rho), "projectors": list(meas.projectors)}

    def likelihood(rng, i):
        k = int(rng.integers(2, dim + 3))
        model = rng.dirichlet(np.ones(k))
        n = int(rng.integers(1, 201))
        return {"data": rng.choice(k, size=n, p=model).tolist(), "model": model}

    return [
        ("zero", [("zero-iff-pure", 1e-9)], zero),
        ("positivity", [("positivity", 0.0)], positivity),
        ("unitary", [("unitary-invariance", 1e-9)], unitary),
        ("linearity", [("linearity", 1e-10)], linearity),
        ("convexity", [("convexity", INEQ_TOL)], convexity),
        ("joint-convexity", [("joint-convexity", INEQ_TOL)], joint_convexity),
        ("extensivity", [("extensivity", 1e-9)], extensivity),
        ("bounds", [("overlap-bound", INEQ_TOL), ("fidelity-bound", INEQ_TOL)],
         lambda rng, i: _pair_inputs(dim, rng)),
        ("bound-equality", [("bound-equality", 1e-9)], bound_equality),
        ("decomposition", [("decomposition", 1e-10)], lambda rng, i: _pair_inputs(dim, rng)),
        ("no-readout", [("no-readout", 1e-9)], no_readout),
        ("likelihood", [("likelihood-identity", 1e-12)], likelihood),
    ]


def check_propositions(dim, trials, seed=0, n_jobs=1):
    """Property checks on ``S(ρ, σ)`` plus the classical likelihood identity."""
    results = []
    for group_id, checks, make in _prop_generators(dim):
        results.extend(_run(group_id, checks, make, dim, trials, seed, n_jobs))
    return results


def run_suites(suites, dim, trials, seed, n_jobs=1):
    """Run named suites (or ``"all"``) and return the concatenated results."""
    names = list(SUITES) if "all" in suites else list(suites)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    results = []
    for name in names:
        if name == "propositions":
            results += check_propositions(dim, trials, seed, n_jobs)
        elif name == "theorem1":
            results += check_theorem1(dim, trials, True, seed, n_jobs=n_jobs)
        elif name == "equality":
            results += check_equality_conditions(max(dim, 2), None, seed, n_jobs)
        elif name == "povm-counterexample":
            results.append(check_povm_counterexample())
        elif name == "lemma-a1":
            results += check_lemma_a1(dim, trials, seed, n_jobs)
        elif name == "lemma-a2":
            results += check_lemma_a2(max(dim, 2), trials, seed, n_jobs)
    return results
