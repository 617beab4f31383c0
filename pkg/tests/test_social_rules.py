from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berhr import diagnostics as dg
from berhr.core import Configuration, OptimalSet, aggregate, make_system, simplex_grid
from berhr.environments import Distribution, Environment
from berhr.errors import ConfigurationError, ParameterError, UnsupportedError
from berhr.social_rules import (
    ExplicitTable,
    ImitationRate,
    LinearPairwise,
    NormalizedScore,
    Proportional,
    SocialRule,
    UniformK,
    UniformPairs,
    behavioral_update,
    delta_tilde_exact,
    imitation_probs,
    population_step,
    social_expected_gain,
    wberhr_social_exact,
    xi_by_enumeration,
)

COMPONENTS = [Proportional(), NormalizedScore(), LinearPairwise(0.5)]


def brute_force_mean(rows, component, lam, env):
    """Oracle for |W| = 2 (each individual always samples the other): enumerate actions and payoffs."""
    rows = np.asarray(rows, dtype=np.float64)
    out = np.zeros_like(rows)
    for acts in product(range(rows.shape[1]), repeat=2):
        pa = rows[0, acts[0]] * rows[1, acts[1]]
        if pa == 0.0:
            continue
        d0, d1 = env.distributions[0][acts[0]], env.distributions[1][acts[1]]
        for (x0, p0), (x1, p1) in product(zip(d0.values, d0.probs), zip(d1.values, d1.probs)):
            for i in range(2):
                new = behavioral_update(i, [0, 1], acts, [x0, x1], component, lam, rows[i], env.support)
                out[i] += pa * p0 * p1 * new
    return out


# ------------------------------------------------------------- components


def test_imitation_probs_examples():
    np.testing.assert_allclose(imitation_probs(Proportional(), [0, 1], [0, 1], [0.3, 0.8], 0), [0.6, 0.4])
    np.testing.assert_allclose(imitation_probs(NormalizedScore(), [0, 1], [0, 1], [0.4, 0.8], 0), [1 / 3, 2 / 3])
    np.testing.assert_allclose(imitation_probs(NormalizedScore(), [0, 1, 2], [0, 1, 0], [0.0, 0.0, 0.0], 1), [1 / 3] * 3)


def test_imitation_probs_requires_self():
    with pytest.raises(ParameterError):
        imitation_probs(Proportional(), [1, 2], [0, 1], [0.3, 0.8], 0)


@pytest.mark.parametrize("component", COMPONENTS, ids=lambda c: c.kind)
def test_must_see_on_every_support_point(component):
    grid = [0.0, 0.5, 1.0]
    for m in (2, 3):
        for xs in product(grid, repeat=m):
            for i in range(m):
                w = imitation_probs(component, list(range(m)), [0] * m, xs, i)
                assert np.all(w >= -1e-15) and abs(w.sum() - 1.0) <= 1e-12


def test_behavioral_update_examples():
    sigma = np.array([0.5, 0.5])
    np.testing.assert_array_equal(behavioral_update(0, [0, 1], [0, 1], [0.3, 0.8], Proportional(), 0.0, sigma), sigma)
    np.testing.assert_allclose(behavioral_update(0, [0], [1], [0.7], Proportional(), 1.0, sigma), [0.0, 1.0])
    out = behavioral_update(0, [0, 1], [0, 1], [0.3, 0.8], Proportional(), 0.5, sigma, )
    np.testing.assert_allclose(out, [0.55, 0.45])


def test_imitation_rate():
    assert ImitationRate()(0) == 0.5 and ImitationRate()(2) == 0.25
    assert ImitationRate("constant", 0.3)(7) == 0.3
    with pytest.raises(ConfigurationError):
        ImitationRate("constant", 1.5)


# --------------------------------------------------------------- sampling


def test_xi_closed_forms_match_enumeration():
    for w in (2, 3, 4, 5):
        assert UniformPairs().xi(w) == pytest.approx(xi_by_enumeration(UniformPairs(), w), abs=1e-15)
        assert UniformPairs().xi(w) == pytest.approx(1 / (w - 1))
    for w, k in ((3, 1), (4, 2), (5, 3)):
        assert UniformK(k).xi(w) == pytest.approx(xi_by_enumeration(UniformK(k), w), abs=1e-15)
        assert UniformK(k).xi(w) == pytest.approx(k / (w - 1))


@pytest.mark.parametrize("sampling", [UniformPairs(), UniformK(2)], ids=["pairs", "k2"])
def test_sample_draws_include_self_and_match_distribution(sampling):
    w = 4
    n = 200_000
    rng = np.random.default_rng(5)
    s = sampling.draw(rng.random((n, sampling.n_uniforms(w))), w)
    assert np.all(s[:, np.arange(w), np.arange(w)])
    for smp, p in sampling.distribution(0, w):
        mask = np.array([j in smp for j in range(w)])
        f = np.mean(np.all(s[:, 0, :] == mask, axis=-1))
        assert abs(f - p) <= 4 * np.sqrt(p * (1 - p) / n)


def test_explicit_table_validation():
    ok = ExplicitTable({0: [({0, 1}, 1.0)], 1: [({0, 1}, 1.0)]})
    ok.validate(2)
    with pytest.raises(ConfigurationError):
        ExplicitTable({0: [({1}, 1.0)], 1: [({0, 1}, 1.0)]}).validate(2)
    asym = ExplicitTable({0: [({0, 1}, 0.5), ({0}, 0.5)], 1: [({0, 1}, 1.0)]})
    with pytest.raises(ConfigurationError):
        asym.validate(2)
    blind = ExplicitTable({0: [({0}, 1.0)], 1: [({1}, 1.0)]})
    with pytest.raises(ConfigurationError):
        blind.validate(2)
    with pytest.raises(ConfigurationError):
        UniformK(3).validate(3)


# ---------------------------------------------------------- population step


def test_population_step_zero_rate_is_constant():
    env = Environment.bernoulli([0.9, 0.5], n_individuals=3)
    cfg = Configuration([[0.2, 0.8], [0.5, 0.5], [0.9, 0.1]])
    rng = np.random.default_rng(1)
    for t in range(50):
        nxt = population_step(cfg, Proportional(), UniformPairs(), 0.0, env, rng, t)
        assert nxt == cfg


@pytest.mark.parametrize("component", COMPONENTS, ids=lambda c: c.kind)
def test_population_step_absorbing_at_optimum(component):
    env = Environment.bernoulli([0.9, 0.5], n_individuals=2)
    cfg = Configuration([[1.0, 0.0], [1.0, 0.0]])
    rng = np.random.default_rng(2)
    for lam in (0.3, 1.0):
        assert population_step(cfg, component, UniformPairs(), lam, env, rng) == cfg


@pytest.mark.parametrize("component", COMPONENTS, ids=lambda c: c.kind)
@pytest.mark.parametrize("lam", [1.0, 0.4])
def test_exact_mean_matches_brute_force(component, lam):
    env = Environment.bernoulli([0.9, 0.5], n_individuals=2)
    rule = SocialRule(component, UniformPairs(), ImitationRate("constant", lam))
    opt = OptimalSet.same({0}, 2, 2)
    for r0 in simplex_grid(2, 6):
        for r1 in simplex_grid(2, 6):
            rows = np.array([r0, r1])
            probs, nxt, _ = rule.enumerate_outcomes(0, rows, None, env)
            mean = np.einsum("m,mwa->wa", probs, nxt)
            oracle = brute_force_mean(rows, component, lam, env)
            np.testing.assert_allclose(mean, oracle, atol=1e-12)
            gain = social_expected_gain(rows, component, UniformPairs(), lam, env, opt)
            assert gain == pytest.approx(aggregate(oracle, opt) - aggregate(rows, opt), abs=1e-12)


def test_population_step_mc_matches_exact_mean():
    env = Environment.bernoulli([0.9, 0.5], n_individuals=2)
    rows = np.array([[0.3, 0.7], [0.6, 0.4]])
    system = make_system(SocialRule(Proportional(), UniformPairs(), ImitationRate("constant", 1.0)), env, initial=rows)
    gain, se, bound, holds = dg.wberhr_check_mc(system, env, rows, n=200_000, seed=3)
    exact = social_expected_gain(rows, Proportional(), UniformPairs(), 1.0, env, system.optimal)
    assert abs(gain - exact) <= 4 * se and holds


# ------------------------------------------------------------- delta tilde


def test_delta_tilde_proportional():
    env = Environment.bernoulli([0.9, 0.5], n_individuals=2)
    assert delta_tilde_exact(Proportional(), env, 2) == pytest.approx(0.2, abs=1e-15)


def test_delta_tilde_normalized_score_oracle():
    # outcomes (x_a, x_b): (1,1) -> 0, (1,0) -> +1, (0,1) -> -1, (0,0) -> 0
    oracle = 0.9 * 0.5 * 1.0 + 0.1 * 0.5 * (-1.0)
    env = Environment.bernoulli([0.9, 0.5], n_individuals=2)
    assert oracle == pytest.approx(0.4)
    assert delta_tilde_exact(NormalizedScore(), env, 2) == pytest.approx(oracle, abs=1e-15)


def test_delta_tilde_identical_actions_vanishes():
    d = Distribution([(0.0, 0.3), (1.0, 0.7)])
    env = Environment([[d, Distribution([(0.0, 0.3), (1.0, 0.7 - 1e-3), (0.5, 1e-3)])]] * 2)
    assert abs(delta_tilde_exact(Proportional(), env, 2)) < 1e-3
    same_mean = Environment([[Distribution([(0.0, 0.5), (1.0, 0.5)]), Distribution([(0.25, 0.5), (0.75, 0.5)]), Distribution.bernoulli(0.1)]] * 2)
    assert abs(delta_tilde_exact(Proportional(), same_mean, 2, optimal=OptimalSet.same({0}, 2, 3))) < 1e-12


def test_delta_tilde_requires_identical():
    env = Environment([[Distribution.bernoulli(0.9), Distribution.bernoulli(0.5)], [Distribution.bernoulli(0.8), Distribution.bernoulli(0.5)]])
    with pytest.raises(UnsupportedError):
        delta_tilde_exact(Proportional(), env, 2)


@pytest.mark.parametrize("component", [Proportional(), NormalizedScore()], ids=lambda c: c.kind)
@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.integers(2, 3))
def test_delta_tilde_nonnegative(component, p, q, m):
    if abs(p - q) < 1e-9:
        return
    env = Environment.bernoulli([p, q], n_individuals=3)
    assert delta_tilde_exact(component, env, m) >= -1e-12


# ---------------------------------------------------------------- WBERHR


@pytest.mark.parametrize("component", [Proportional(), NormalizedScore()], ids=lambda c: c.kind)
def test_wberhr_social_endpoints_and_zero_rate(component):
    env = Environment.bernoulli([0.9, 0.5], n_individuals=2)
    for rows in ([[1, 0], [1, 0]], [[0, 1], [0, 1]]):
        gain, bound, holds = wberhr_social_exact(rows, component, UniformPairs(), 0.5, env)
        assert gain == pytest.approx(0.0, abs=1e-15) and bound == 0.0 and holds
    gain, bound, holds = wberhr_social_exact([[0.3, 0.7], [0.6, 0.4]], component, UniformPairs(), 0.0, env)
    assert gain == 0.0 and bound == 0.0 and holds


@pytest.mark.parametrize("component", [Proportional(), NormalizedScore()], ids=lambda c: c.kind)
@pytest.mark.parametrize("t", [0, 3])
def test_wberhr_social_grid_three_individuals(component, t):
    env = Environment.bernoulli([0.9, 0.4], n_individuals=3)
    grid = simplex_grid(2, 6)
    for rows in product(grid, repeat=3):
        gain, bound, holds = wberhr_social_exact(np.array(rows), component, UniformPairs(), ImitationRate(), env, t=t)
        assert holds, (rows, gain, bound)


def test_wberhr_social_uniform_k():
    env = Environment.bernoulli([0.9, 0.4], n_individuals=3)
    for rows in product(simplex_grid(2, 5), repeat=3):
        assert wberhr_social_exact(np.array(rows), Proportional(), UniformK(2), 0.5, env)[2]


def test_wberhr_social_too_large():
    env = Environment.bernoulli([0.9, 0.4], n_individuals=5)
    with pytest.raises(UnsupportedError):
        wberhr_social_exact(np.full((5, 2), 0.5), Proportional(), UniformPairs(), 0.5, env)


def test_social_rule_hazard_bound():
    env = Environment.bernoulli([0.9, 0.5], n_individuals=3)
    rule = SocialRule(Proportional(), UniformPairs())
    seq = rule.hazard_bound(env, make_system(rule, env).optimal)
    assert seq(0) == pytest.approx(0.5 * 2 * 0.5 * 0.2)
    assert seq(2) == pytest.approx(0.25 * 2 * 0.5 * 0.2)
    assert not seq.is_berhr and seq.is_square_nonsummable
