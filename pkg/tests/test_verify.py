import json
import math

import numpy as np
import pytest

from qxent.reporting import dumps_json
from qxent.verify import (
    EQUALITY_CASES,
    LEMMA_A2_CASES,
    SUITES,
    check_equality_conditions,
    check_lemma_a1,
    check_lemma_a2,
    check_povm_counterexample,
    check_propositions,
    check_theorem1,
    decode,
    encode,
    equality_instance,
    equality_operator_slack,
    equality_state_slack,
    lemma_a1_margin,
    lemma_a2_instance,
    lemma_a2_slack,
    povm_counterexample_margin,
    replay,
    run_suites,
    trial_rng,
)
from qxent.matfun import commutator_norm
from qxent.states import random_density


def _all_pass(results):
    failed = [(r.check_id, r.worst_margin) for r in results if not r.passed]
    assert not failed, failed


@pytest.mark.parametrize("dim", [2, 3, 4, 8])
def test_all_suites_pass(dim):
    _all_pass(run_suites(["all"], dim, 40, seed=3))


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suites(["nope"], 2, 1, 0)
    assert "theorem1" in SUITES


def test_zero_trials_vacuous_pass():
    results = check_theorem1(2, 0, seed=1)
    assert all(r.passed and r.trials == 0 and r.witness is None for r in results)
    with pytest.raises(ValueError):
        replay(results[0])


def test_reports_are_deterministic_and_thread_independent():
    a = dumps_json([r.as_dict() for r in check_propositions(3, 25, seed=9)])
    b = dumps_json([r.as_dict() for r in check_propositions(3, 25, seed=9, n_jobs=4)])
    assert a == b
    c = dumps_json([r.as_dict() for r in check_propositions(3, 25, seed=10)])
    assert a != c


def test_trial_streams_are_keyed():
    x = trial_rng(1, "theorem1", 2, 5).random()
    assert x == trial_rng(1, "theorem1", 2, 5).random()
    assert x != trial_rng(1, "theorem1", 2, 6).random()
    assert x != trial_rng(1, "lemma-a1", 2, 5).random()


def test_witness_replays_through_json():
    for r in check_theorem1(3, 30, seed=2) + check_lemma_a2(3, 20, seed=2):
        again = type(r)(**{**r.__dict__, "witness": json.loads(json.dumps(r.witness))})
        assert abs(replay(again) - r.worst_margin) <= 1e-12


def test_encode_decode():
    M = np.array([[1 + 2j, 0], [0, -1j]])
    out = decode(json.loads(json.dumps(encode({"m": M, "k": [np.int64(3)]}))))
    np.testing.assert_array_equal(out["m"], M)
    assert out["k"] == [3]


def test_povm_counterexample_result():
    r = check_povm_counterexample()
    assert r.passed and abs(r.worst_margin) <= 1e-12
    v = r.witness["values"]
    assert abs(v["tr_rho1_log_sigma"] - math.log(2 / 3)) <= 1e-12
    assert abs(v["tr_rho2_log_sigma"] - math.log(2 / 3)) <= 1e-12
    assert abs(v["log_prob2"] - math.log(1 / 3)) <= 1e-12
    assert v["completeness_error"] == 0.0 and v["post_state_distance"] == 0.0


def test_projective_variant_is_not_a_counterexample():
    # with P2 = |1><1| the post-state bound holds, so the margin reports no violation
    sigma = np.diag([2 / 3, 1 / 3]).astype(complex)
    assert povm_counterexample_margin(sigma, np.diag([1, 0]), np.diag([0, 1])) == math.inf


@pytest.mark.parametrize("case", EQUALITY_CASES)
def test_equality_cases_land_on_expected_side(case):
    rng = np.random.default_rng(5)
    for dim in (2, 3, 4):
        if case.startswith("degenerate") and dim < 3:
            continue
        inst = equality_instance(case, dim, rng)
        assert equality_operator_slack(**inst) > 0, (case, dim)
        assert equality_state_slack(**inst) > 0, (case, dim)


def test_lemma_examples():
    sigma = random_density(3, rng=0).data
    assert lemma_a1_margin(np.diag([1.0, 1.0, 0.0]), sigma) == 0
    kernel_sigma = np.diag([0.5, 0.5, 0.0])
    assert lemma_a1_margin(np.diag([0.0, 0.0, 1.0]), kernel_sigma) == 0
    diag_sigma = np.diag([0.5, 0.3, 0.2])
    P0 = np.diag([1.0, 0.0, 0.0])
    assert commutator_norm(P0, diag_sigma) == 0.0
    assert lemma_a2_slack(P0, diag_sigma) > 0
    tilted = lemma_a2_instance("tilted", 3, np.random.default_rng(1))
    P, S = tilted["projector"], tilted["sigma"]
    assert commutator_norm(P, S) > 1e-3 and commutator_norm(P @ S @ P, S) > 1e-3
    assert lemma_a2_slack(**tilted) > 0
    assert len(LEMMA_A2_CASES) == 4


def test_equality_needs_dim_two():
    with pytest.raises(ValueError):
        check_equality_conditions(1)


def test_lemma_a1_suite_all_dims():
    for dim in range(1, 7):
        _all_pass(check_lemma_a1(dim, 50, seed=dim))
