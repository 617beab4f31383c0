import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from berhr.core import OptimalSet, uniforms_at
from berhr.environments import (
    Distribution,
    Environment,
    NoDominantAction,
    PayoffSupport,
    choose_action,
    choose_actions,
    delta_lower_bound,
    mean_gap,
    optimal_set_expected,
    optimal_set_fosd,
)
from berhr.errors import ConfigurationError, ParameterError
from berhr.individual_rules import SwitchFunction, SwitchMatrix


@pytest.mark.parametrize("u,expected", [(0.0, 0), (0.3, 1), (0.999, 1)])
def test_choose_action_examples(u, expected):
    assert choose_action([0.3, 0.7], u) == expected


@pytest.mark.parametrize("u", [-0.1, 1.0, 1.5])
def test_choose_action_rejects_u(u):
    with pytest.raises(ParameterError):
        choose_action([0.3, 0.7], u)


def test_choose_action_overshoot_uses_last_positive_action():
    rows = np.array([[[0.5, 0.5 - 1e-15, 0.0]]])
    assert choose_actions(rows, np.array([[1.0 - 1e-16]]))[0, 0] == 1


def test_device_frequencies_match_row():
    row = np.array([0.2, 0.5, 0.3])
    n = 10 ** 6
    u = uniforms_at([2024], np.arange(n))[0]
    a = choose_actions(np.broadcast_to(row, (n, 1, 3)), u[:, None])[:, 0]
    freq = np.bincount(a, minlength=3) / n
    se = np.sqrt(row * (1 - row) / n)
    assert np.all(np.abs(freq - row) <= 4 * se)


def test_payoff_frequencies_match_declared():
    env = Environment([[Distribution([(0.0, 0.25), (0.5, 0.25), (1.0, 0.5)]), Distribution.bernoulli(0.3)]])
    n = 10 ** 6
    u = uniforms_at([7], np.arange(2 * n))[0].reshape(n, 1, 2)
    x = env.draw_payoffs(u)
    for a, d in enumerate(env.distributions[0]):
        for v, p in zip(d.values, d.probs):
            f = np.mean(x[:, 0, a] == v)
            assert abs(f - p) <= 4 * np.sqrt(p * (1 - p) / n)


def test_draw_realized_matches_full_draw():
    env = Environment.bernoulli([0.9, 0.4, 0.6], n_individuals=2)
    u = uniforms_at([3], np.arange(600))[0].reshape(100, 2, 3)
    actions = (uniforms_at([4], np.arange(200))[0].reshape(100, 2) * 3).astype(np.int64)
    full = np.take_along_axis(env.draw_payoffs(u), actions[..., None], axis=-1)[..., 0]
    np.testing.assert_array_equal(env.draw_realized(u, actions), full)


def test_distribution_validation():
    with pytest.raises(ConfigurationError):
        Distribution([(0.0, 0.5), (1.0, 0.4)])
    with pytest.raises(ConfigurationError):
        Distribution([(0.0, -0.5), (1.0, 1.5)])
    d = Distribution([(1.0, 0.25), (0.0, 0.5), (1.0, 0.25), (2.0, 0.0)])
    assert d.values.tolist() == [0.0, 1.0] and d.probs.tolist() == [0.5, 0.5]


def test_support_validation():
    with pytest.raises(ConfigurationError):
        PayoffSupport(1.0, 1.0)
    with pytest.raises(ConfigurationError):
        Environment([[Distribution.bernoulli(0.5, 0, 2), Distribution.bernoulli(0.5)]], support=(0, 1))


def test_identical_assertion_checked():
    rows = [[Distribution.bernoulli(0.9), Distribution.bernoulli(0.5)], [Distribution.bernoulli(0.8), Distribution.bernoulli(0.5)]]
    with pytest.raises(ConfigurationError):
        Environment(rows, identical=True)
    assert not Environment(rows).identical
    assert Environment.bernoulli([0.9, 0.5], n_individuals=3).identical


def test_optimal_set_expected_examples():
    assert optimal_set_expected(Environment.bernoulli([0.9, 0.5])).sets == (frozenset({0}),)
    with pytest.raises(ConfigurationError):
        optimal_set_expected(Environment.bernoulli([0.7, 0.7]))
    assert optimal_set_expected(Environment.bernoulli([0.2, 0.5, 0.5])).sets == (frozenset({1, 2}),)


def test_optimal_set_fosd_examples():
    assert optimal_set_fosd(Environment.bernoulli([0.9, 0.4])).sets == (frozenset({0}),)
    crossing = Environment([[Distribution([(0.0, 0.5), (1.0, 0.5)]), Distribution([(0.4, 1.0)])]])
    assert optimal_set_fosd(crossing) is NoDominantAction
    assert not NoDominantAction
    with pytest.raises(ConfigurationError):
        optimal_set_fosd(Environment.bernoulli([0.6, 0.6]))


def test_delta_lower_bound_examples():
    env = Environment.bernoulli([0.9, 0.5])
    assert delta_lower_bound(env, "monotone", 0, c=1.0) == pytest.approx(0.4, abs=1e-15)
    lin = SwitchMatrix(2, default=SwitchFunction.linear(1.0))
    assert delta_lower_bound(env, "full_info", 0, switch=lin) == pytest.approx(0.4, abs=1e-15)
    env2 = Environment.bernoulli([0.9, 0.5])
    assert delta_lower_bound(env2, "roth_erev", 0, V0=10.0, epsilon=0.4, x_max=1.0) == pytest.approx(0.4 / 22, abs=1e-15)


def test_delta_lower_bound_social_and_unknown():
    env = Environment.bernoulli([0.9, 0.5], n_individuals=3)
    assert delta_lower_bound(env, "social", 0, lambda_t=0.5, xi=0.5, delta_tilde=0.2) == pytest.approx(0.1)
    with pytest.raises(ParameterError):
        delta_lower_bound(env, "fictitious_play", 0)


def test_delta_lower_bound_monotone_decays_harmonically():
    env = Environment.bernoulli([0.9, 0.5])
    assert delta_lower_bound(env, "monotone", 3, c=0.5) == pytest.approx(0.5 / 4 * 0.4)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.integers(0, 50))
def test_delta_lower_bound_nonnegative(p, q, t):
    if abs(p - q) < 1e-9:
        return
    env = Environment.bernoulli([p, q])
    d = delta_lower_bound(env, "monotone", t, c=1.0)
    assert d > 0.0
    assert delta_lower_bound(env, "full_info", t, switch=SwitchMatrix(2, default=SwitchFunction.linear(0.5))) > 0.0


def test_mean_gap():
    env = Environment.bernoulli([0.9, 0.4, 0.7])
    assert mean_gap(env, OptimalSet(({0},), 3)) == pytest.approx(0.2)
