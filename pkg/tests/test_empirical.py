import math

import numpy as np
import pytest

from qxent.empirical import (
    MeasurementDataset,
    avg_log_likelihood,
    classical_avg_log_likelihood,
    cross_entropy,
    empirical_distribution,
    empirical_operator,
    empirical_state,
    likelihood_margin,
    sample_dataset,
)
from qxent.entropy import classical_cross_entropy
from qxent.exceptions import LabelMismatch, ModelMismatch, ZeroProbabilityRecord
from qxent.measurement import (
    Povm,
    ProjectiveMeasurement,
    computational_measurement,
    pauli_tomographic_set,
)
from qxent.states import basis_state, maximally_mixed, random_density, random_unitary, trace_distance


def _dataset(meas, outcomes):
    return MeasurementDataset([meas], np.zeros(len(outcomes), dtype=int), outcomes)


def test_empirical_distribution_examples():
    d = empirical_distribution("HHTH", "HT")
    np.testing.assert_allclose(d.probs, [0.75, 0.25])
    np.testing.assert_allclose(empirical_distribution(["T"], "HT").probs, [0, 1])
    rng = np.random.default_rng(0)
    data = np.where(rng.random(10_000) < 2 / 3, "H", "T")
    assert abs(empirical_distribution(data, "HT").prob("H") - 2 / 3) <= 0.02
    with pytest.raises(LabelMismatch):
        empirical_distribution("HX", "HT")


def test_classical_likelihood_identity(rng):
    for _ in range(20):
        k = int(rng.integers(2, 7))
        model = rng.dirichlet(np.ones(k))
        data = rng.choice(k, size=int(rng.integers(1, 300)), p=model).tolist()
        labels = tuple(range(k))
        H = classical_cross_entropy(empirical_distribution(data, labels), model)
        assert abs(H + classical_avg_log_likelihood(data, model)) < 1e-12


def test_empirical_operator_examples():
    Z = computational_measurement(2)
    np.testing.assert_allclose(empirical_operator(_dataset(Z, [0, 0, 0])).matrix.data,
                               np.diag([1, 0]))
    np.testing.assert_allclose(empirical_operator(_dataset(Z, [0, 1])).matrix.data, np.eye(2) / 2)
    ds = sample_dataset(Z, np.diag([2 / 3, 1 / 3]), 10_000, rng=1)
    f = ds.frequencies()[0]
    assert trace_distance(empirical_operator(ds).matrix, np.diag(f)) == 0.0


def test_empirical_state_rank_one_matches_operator(rng):
    sigma = random_density(3, rng=rng)
    meas = ProjectiveMeasurement([np.outer(u, u.conj()) for u in random_unitary(3, rng).T])
    ds = sample_dataset(meas, random_density(3, rng=rng), 100, rng)
    rho_o = empirical_operator(ds).matrix.data
    rho_s = empirical_state(ds, sigma).matrix.data
    assert np.max(np.abs(rho_o - rho_s)) < 1e-12


def test_empirical_state_identity_records_give_sigma():
    sigma = random_density(2, rng=3)
    ds = _dataset(ProjectiveMeasurement([np.eye(2)]), [0, 0, 0])
    np.testing.assert_allclose(empirical_state(ds, sigma).matrix.data, sigma.data, atol=1e-15)


def test_perspectives_differ_on_degenerate_projector():
    P = np.diag([1.0, 1.0, 0.0])
    meas = ProjectiveMeasurement([P, np.eye(3) - P])
    sigma = np.diag([0.6, 0.1, 0.3])
    ds = _dataset(meas, [0, 0, 1, 0])
    gap = empirical_operator(ds).matrix.data - empirical_state(ds, sigma).matrix.data
    assert np.max(np.abs(gap)) > 1e-3


def test_zero_probability_record_index():
    ds = _dataset(computational_measurement(2), [0, 0, 1, 1])
    with pytest.raises(ZeroProbabilityRecord) as info:
        empirical_state(ds, basis_state(2, 0))
    assert info.value.index == 2
    assert avg_log_likelihood(ds, basis_state(2, 0)) == -math.inf


def test_avg_log_likelihood_examples(rng):
    ds = _dataset(computational_measurement(2), [0, 0])
    assert avg_log_likelihood(ds, basis_state(2, 0)) == 0.0
    ds = _dataset(computational_measurement(2), [0, 1])
    assert abs(avg_log_likelihood(ds, maximally_mixed(2)) - math.log(0.5)) < 1e-15
    tset = pauli_tomographic_set(2)
    ds = sample_dataset(tset, random_density(4, rng=rng), [5, 17, 3, 40, 1, 9, 22, 8, 11], rng)
    sigma = random_density(4, rng=rng)
    assert abs(avg_log_likelihood(ds, sigma) - avg_log_likelihood(ds, sigma, grouped=True)) < 1e-12


def test_state_perspective_model_guard(rng):
    ds = sample_dataset(computational_measurement(2), maximally_mixed(2), 10, rng)
    sigma = random_density(2, rng=rng)
    emp = empirical_state(ds, sigma)
    cross_entropy(emp, sigma)
    with pytest.raises(ModelMismatch):
        cross_entropy(emp, random_density(2, rng=rng))
    assert likelihood_margin(emp, sigma) >= -1e-9


def test_dataset_bookkeeping(rng):
    tset = pauli_tomographic_set(1)
    ds = sample_dataset(tset, random_density(2, rng=rng), 50, rng, seed=4)
    assert len(ds) == 150 and ds.dim == 2 and ds.seed == 4
    np.testing.assert_array_equal(ds.group_counts(), [50, 50, 50])
    merged = ds.merge(ds)
    assert len(merged) == 300
    np.testing.assert_array_equal(merged.counts()[1], 2 * ds.counts()[1])
    with pytest.raises(ValueError):
        ds.merge(sample_dataset(computational_measurement(2), maximally_mixed(2), 1, rng))
    with pytest.raises(ValueError):
        MeasurementDataset([computational_measurement(2)], [0], [2])


def test_sampling_is_seeded():
    tset = pauli_tomographic_set(1)
    rho = random_density(2, rng=0)
    a = sample_dataset(tset, rho, 100, seed=5)
    b = sample_dataset(tset, rho, 100, seed=5)
    assert a.outcomes.tobytes() == b.outcomes.tobytes()


def test_povm_dataset_has_likelihood_only():
    povm = Povm([np.diag([1, 0]), np.array([[0, 1], [0, 0]])])
    ds = sample_dataset(povm, np.diag([2 / 3, 1 / 3]), 20, rng=0)
    assert math.isfinite(avg_log_likelihood(ds, np.diag([2 / 3, 1 / 3])))
    with pytest.raises(TypeError):
        empirical_operator(ds)
