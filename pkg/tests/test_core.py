import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berhr.core import (
    Configuration,
    Constant,
    Harmonic,
    HazardBoundSequence,
    OptimalSet,
    Product,
    TheoremOne,
    UniformStream,
    aggregate,
    iter_batch,
    make_system,
    renormalize_rows,
    replication_seed,
    replication_seeds,
    run_trajectory,
    simplex_grid,
    slow_step,
    splitmix64,
    theorem1_slowing_constant,
    uniforms_at,
)
from berhr.counterexamples import AbsorbingRule, VNParams, VNRule
from berhr.environments import Environment
from berhr.errors import ConfigurationError, InvariantViolation, ParameterError, PreconditionError
from berhr.individual_rules import MonotoneRule

# published SplitMix64 outputs for state 1234567
SPLITMIX_REFERENCE = [6457827717110365317, 3203168211198807973, 9817491932198370423, 4593380528125082431]


def test_splitmix64_reference_vector():
    state = 1234567
    out = []
    for _ in range(4):
        state, z = splitmix64(state)
        out.append(z)
    assert out == SPLITMIX_REFERENCE


def test_uniforms_match_reference_outputs():
    u = uniforms_at([1234567], np.arange(4))[0]
    expected = [(z >> 11) * 2.0 ** -53 for z in SPLITMIX_REFERENCE]
    assert u.tolist() == expected


def test_replication_seed_is_mixed_xor():
    state, z = splitmix64(0 ^ 0)
    assert replication_seed(0, 0) == z == 0xE220A8397B1DCDAF
    assert replication_seed(77, 5) == splitmix64(77 ^ 5)[1]
    assert replication_seeds(77, [5]).tolist() == [replication_seed(77, 5)]


def test_stream_block_size_does_not_change_values():
    seeds = replication_seeds(3, range(7))
    a = UniformStream(seeds, 3, block=1)
    b = UniformStream(seeds, 3, block=64)
    for t in (0, 1, 5, 63, 64, 200):
        np.testing.assert_array_equal(a.step(t), b.step(t))
    np.testing.assert_array_equal(a.step(5), uniforms_at(seeds, np.arange(15, 18)))


@given(st.integers(0, 2 ** 64 - 1), st.lists(st.integers(0, 2 ** 40), min_size=1, max_size=20))
def test_uniforms_in_unit_interval(seed, counters):
    u = uniforms_at([seed], np.array(counters, dtype=np.uint64))
    assert np.all((u >= 0.0) & (u < 1.0))


# --------------------------------------------------------------- aggregate


def test_aggregate_single_individual():
    assert aggregate(Configuration([[0.3, 0.7]]), OptimalSet(({0},), 2)) == pytest.approx(0.3, abs=1e-15)


def test_aggregate_averages_individuals():
    opt = OptimalSet.same({0}, 2, 2)
    assert aggregate(Configuration([[1.0, 0.0], [0.0, 1.0]]), opt) == 0.5


def test_aggregate_unit_mass_on_optimal():
    opt = OptimalSet(({1}, {0, 2}), 3)
    assert aggregate(Configuration([[0, 1, 0], [0.5, 0, 0.5]]), opt) == 1.0


def test_aggregate_dimension_mismatch():
    with pytest.raises(ConfigurationError):
        aggregate(Configuration([[0.5, 0.5]]), OptimalSet.same({0}, 2, 2))


@pytest.mark.parametrize(
    "rows",
    [[[0.5, 0.6]], [[1.2, -0.2]], [[1.0]], [[np.nan, 1.0]]],
)
def test_configuration_rejects_invalid_rows(rows):
    with pytest.raises(ConfigurationError):
        Configuration(rows)


@pytest.mark.parametrize("sets", [({},), ({0, 1},), ({2},)])
def test_optimal_set_rejects_degenerate(sets):
    with pytest.raises(ConfigurationError):
        OptimalSet(sets, 2)


# --------------------------------------------------------------- slow step


def test_slow_step_identity_and_midpoint():
    sigma = Configuration([[0.5, 0.5]])
    proposed = Configuration([[1.0, 0.0]])
    assert slow_step(sigma, proposed, 1.0) == proposed
    np.testing.assert_allclose(slow_step(sigma, proposed, 0.5).rows, [[0.75, 0.25]], atol=1e-15)
    assert Harmonic()(0) == 0.5
    assert slow_step(sigma, proposed, Harmonic()(0)) == slow_step(sigma, proposed, 0.5)


@pytest.mark.parametrize("theta", [0.0, -0.1, 1.5, np.nan])
def test_slow_step_rejects_theta(theta):
    with pytest.raises(ParameterError):
        slow_step(Configuration([[0.5, 0.5]]), Configuration([[1.0, 0.0]]), theta)


@st.composite
def simplex_rows(draw, n_actions=3):
    w = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=n_actions, max_size=n_actions)))
    if w.sum() == 0.0:
        w[0] = 1.0
    return w / w.sum()


@given(simplex_rows(), simplex_rows(), st.floats(1e-6, 1.0))
def test_slow_step_stays_on_simplex(a, b, theta):
    out = slow_step(a[None], b[None], theta)
    assert np.all(out >= -1e-15)
    assert abs(out.sum() - 1.0) <= 1e-12


# --------------------------------------------------------------- schedules


def test_harmonic_exact():
    assert [Harmonic()(t) for t in range(4)] == [1 / 2, 1 / 3, 1 / 4, 1 / 5]


def test_product_schedule_is_pointwise_product():
    p = Product((Constant(0.5), Harmonic()))
    assert p(3) == 0.5 * (1 / 5)
    assert not p.is_identity()
    assert Product((Constant(1.0),)).is_identity()


def test_constant_schedule_range():
    with pytest.raises(ParameterError):
        Constant(0.0)
    with pytest.raises(ParameterError):
        Constant(1.01)


@pytest.mark.parametrize("p0,eps,expected", [(1.0, 0.5, 1), (0.5, 0.1, 5), (0.5, 0.9, 1)])
def test_theorem1_slowing_constant(p0, eps, expected):
    assert theorem1_slowing_constant(p0, eps) == expected


@given(st.floats(1e-3, 1.0), st.floats(1e-6, 0.999))
def test_theorem1_constant_is_smallest(p0, eps):
    g = theorem1_slowing_constant(p0, eps)
    assert math.exp(-g * p0) < eps
    assert g == 1 or math.exp(-(g - 1) * p0) >= eps


@pytest.mark.parametrize("p0,eps", [(0.0, 0.5), (0.5, 0.0), (0.5, 1.0), (1.5, 0.5)])
def test_theorem1_constant_preconditions(p0, eps):
    with pytest.raises(PreconditionError):
        theorem1_slowing_constant(p0, eps)


def test_theorem_one_schedule_values():
    seq = HazardBoundSequence.constant(0.15)
    th = TheoremOne(5, seq)
    assert th(0) == 0.15 / 5
    big = TheoremOne(2, HazardBoundSequence.constant(3.0))
    assert big(10) == 0.5


def test_hazard_bound_sequence_flags():
    s = HazardBoundSequence.constant(0.2)
    assert s.is_berhr and s.floor == 0.2 and s.is_square_nonsummable
    z = HazardBoundSequence.constant(0.0)
    assert not z.is_berhr
    with pytest.raises(ParameterError):
        HazardBoundSequence.constant(-0.1)
    with pytest.raises(PreconditionError):
        TheoremOne(2, z)


# ------------------------------------------------------------- simplex grid


def test_simplex_grid_counts():
    assert simplex_grid(2, 11).shape == (11, 2)
    assert simplex_grid(3, 11).shape == (66, 3)  # C(12, 2)
    g = simplex_grid(3, 5)
    np.testing.assert_allclose(g.sum(axis=1), 1.0, atol=1e-15)


# ----------------------------------------------------------- renormalization


def test_renormalize_small_drift():
    rows = np.array([[[0.5, 0.5 + 5e-13]]])
    out = renormalize_rows(rows)
    assert abs(out.sum() - 1.0) < 1e-15


def test_renormalize_exact_rows_unchanged():
    rows = np.array([[[0.25, 0.75]]])
    assert renormalize_rows(rows) is rows


def test_renormalize_large_drift_reports_step_and_seed():
    rows = np.array([[[0.5, 0.5]], [[0.5, 0.6]]])
    with pytest.raises(InvariantViolation) as err:
        renormalize_rows(rows, step=7, seeds=np.array([11, 22], dtype=np.uint64))
    assert err.value.step == 7 and err.value.seed == 22


def test_renormalize_negative_mass():
    with pytest.raises(InvariantViolation):
        renormalize_rows(np.array([[[1.1, -0.1]]]))
    out = renormalize_rows(np.array([[[1.0, -1e-14]]]))
    assert out.min() == 0.0


# -------------------------------------------------------------- trajectories


def test_absorbing_trajectory_two_steps():
    system = make_system(AbsorbingRule(0.5))
    for seed in range(20):
        tr = run_trajectory(system, None, 2, seed)
        assert tr.performance[0] == 0.5
        assert tr.performance[1] in (0.0, 1.0)
        assert tr.performance[2] == tr.performance[1]
        assert len(tr.performance) == 3


def test_constant_one_schedule_is_bit_identical():
    env = Environment.bernoulli([0.9, 0.5])
    base = make_system(MonotoneRule(), env)
    slowed = base.with_schedule(Constant(1.0))
    for seed in (0, 1, 99):
        a = run_trajectory(base, env, 300, seed, stride=10)
        b = run_trajectory(slowed, env, 300, seed, stride=10)
        assert a.to_bytes() == b.to_bytes()


def test_trajectory_determinism():
    system = make_system(VNRule(), schedule=Constant(0.3))
    a = run_trajectory(system, None, 500, 12345, stride=7)
    b = run_trajectory(system, None, 500, 12345, stride=7)
    assert a.to_bytes() == b.to_bytes()
    c = run_trajectory(system, None, 500, 12346, stride=7)
    assert a.to_bytes() != c.to_bytes()


def test_trajectory_matches_batch_replication():
    system = make_system(VNRule(), schedule=Harmonic())
    seeds = replication_seeds(5, range(4))
    batch = np.array([s.performance for s in iter_batch(system, None, 100, seeds)])
    for r in range(4):
        tr = run_trajectory(system, None, 100, 5, replication=r)
        np.testing.assert_array_equal(tr.performance, batch[:, r])


def test_harmonic_pathwise_floor_every_step():
    system = make_system(VNRule(VNParams(0.1, 0.1, 0.9, 0.5)), schedule=Harmonic())
    for seed in range(10):
        tr = run_trajectory(system, None, 2000, seed)
        t = np.arange(len(tr.performance))
        assert np.all(tr.performance >= 0.5 / (t + 1))


def test_run_trajectory_rejects_zero_horizon():
    with pytest.raises(ParameterError):
        run_trajectory(make_system(AbsorbingRule()), None, 0, 1)


def test_environment_dimension_mismatch():
    env = Environment.bernoulli([0.9, 0.5, 0.1])
    system = make_system(MonotoneRule(), Environment.bernoulli([0.9, 0.5]))
    with pytest.raises(ConfigurationError):
        run_trajectory(system, env, 5, 0)


def test_trajectory_performance_in_unit_interval():
    env = Environment.bernoulli([0.7, 0.6, 0.2])
    system = make_system(MonotoneRule(), env)
    tr = run_trajectory(system, env, 400, 3, stride=50)
    assert np.all((tr.performance >= 0.0) & (tr.performance <= 1.0))
    for rows in tr.snapshots.values():
        np.testing.assert_allclose(rows.sum(axis=1), 1.0, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1.0), st.integers(0, 2 ** 32))
def test_simplex_preserved_under_slowing(theta, seed):
    env = Environment.bernoulli([0.8, 0.3, 0.5])
    system = make_system(MonotoneRule(), env, schedule=Constant(theta))
    for step in iter_batch(system, env, 30, replication_seeds(seed, range(3))):
        assert np.all(step.rows >= 0.0)
        np.testing.assert_allclose(step.rows.sum(axis=-1), 1.0, atol=1e-12)
