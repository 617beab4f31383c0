"""Population imitation: sampling processes, imitation components, inertia.

Each individual observes a sample of the population that always contains
itself, computes imitation probabilities over the sample from the observed
payoffs (the imitation component), and mixes the actions so imitated with its
own current probabilities through the imitation rate ``lambda_t``.  The rate
evaluated at ``t`` drives the transition from ``t`` to ``t + 1``.
"""

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .core.engine import Outcome, UpdatingRule
from .core.schedules import HazardBoundSequence
from .core.types import Configuration, aggregate_rows, count_last
from .environments import choose_actions, optimal_set_expected
from .errors import ConfigurationError, ParameterError, UnsupportedError

PROB_ATOL = 1e-12
MAX_EXACT_INDIVIDUALS = 4
MAX_EXACT_ACTIONS = 3
MAX_EXACT_SUPPORT = 3
MAX_JOINT = 200_000


# ---------------------------------------------------------------- sampling


class SamplingProcess:
    """Time-invariant sampling; ``distribution(i, n)`` lists ``(sample, probability)`` pairs."""

    kind = "abstract"

    def n_uniforms(self, n_individuals):
        raise NotImplementedError

    def draw(self, u, n_individuals):
        """Boolean ``(R, |W|, |W|)`` array, ``[r, i, j]`` true when ``i`` observes ``j``."""
        raise NotImplementedError

    def distribution(self, i, n_individuals):
        raise NotImplementedError

    def xi(self, n_individuals):
        """Exact minimum over ordered pairs of the co-observation probability."""
        return min(
            sum(p for s, p in self.distribution(i, n_individuals) if j in s)
            for i in range(n_individuals)
            for j in range(n_individuals)
            if j != i
        )

    def sample_sizes(self, n_individuals):
        return sorted({len(s) for i in range(n_individuals) for s, p in self.distribution(i, n_individuals) if p > 0.0})

    def validate(self, n_individuals):
        if n_individuals < 2:
            raise ConfigurationError("social learning needs at least two individuals")


def _others(i, n):
    return [j for j in range(n) if j != i]


@dataclass(frozen=True)
class UniformPairs(SamplingProcess):
    """Each individual observes itself and one other individual drawn uniformly."""

    kind = "uniform_pairs"

    def n_uniforms(self, n_individuals):
        return n_individuals

    def draw(self, u, n_individuals):
        n = n_individuals
        k = np.minimum((u * (n - 1)).astype(np.int64), n - 2)
        me = np.arange(n)
        other = k + (k >= me)
        s = np.zeros(u.shape + (n,), dtype=bool)
        np.put_along_axis(s, other[..., None], True, axis=-1)
        s[..., me, me] = True
        return s

    def distribution(self, i, n_individuals):
        p = 1.0 / (n_individuals - 1)
        return [(frozenset((i, j)), p) for j in _others(i, n_individuals)]

    def xi(self, n_individuals):
        return 1.0 / (n_individuals - 1)


@dataclass(frozen=True)
class UniformK(SamplingProcess):
    """Each individual observes itself and ``k`` distinct others drawn uniformly."""

    k: int = 1
    kind = "uniform_k"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ConfigurationError(f"sample size k must be a positive integer, got {self.k}", key="k")

    def validate(self, n_individuals):
        super().validate(n_individuals)
        if self.k > n_individuals - 1:
            raise ConfigurationError(f"k={self.k} exceeds |W|-1={n_individuals - 1}", key="k")

    def n_uniforms(self, n_individuals):
        return n_individuals * (n_individuals - 1)

    def draw(self, u, n_individuals):
        n = n_individuals
        keys = u.reshape(u.shape[0], n, n - 1)
        picked = np.argsort(keys, axis=-1, kind="stable")[..., : self.k]
        me = np.arange(n)[None, :, None]
        other = picked + (picked >= me)
        s = np.zeros((u.shape[0], n, n), dtype=bool)
        np.put_along_axis(s, other, True, axis=-1)
        s[:, np.arange(n), np.arange(n)] = True
        return s

    def distribution(self, i, n_individuals):
        subsets = list(combinations(_others(i, n_individuals), self.k))
        p = 1.0 / len(subsets)
        return [(frozenset((i,) + c), p) for c in subsets]

    def xi(self, n_individuals):
        return self.k / (n_individuals - 1)


class ExplicitTable(SamplingProcess):
    """Explicit sample probabilities ``rho^(i)(s)`` for every individual."""

    kind = "explicit"

    def __init__(self, tables):
        self.tables = {
            int(i): [(frozenset(int(j) for j in s), float(p)) for s, p in rows]
            for i, rows in dict(tables).items()
        }

    def validate(self, n_individuals):
        super().validate(n_individuals)
        n = n_individuals
        if sorted(self.tables) != list(range(n)):
            raise ConfigurationError("explicit sampling table needs one distribution per individual")
        rho = {}
        for i, rows in self.tables.items():
            total = sum(p for _, p in rows)
            if abs(total - 1.0) > PROB_ATOL:
                raise ConfigurationError(f"sample probabilities of individual {i} sum to {total!r}")
            for s, p in rows:
                if p < 0.0:
                    raise ConfigurationError("sample probabilities must be nonnegative")
                if p > 0.0 and i not in s:
                    raise ConfigurationError(f"individual {i} has a sample without itself")
                if any(j < 0 or j >= n for j in s):
                    raise ConfigurationError("sample names an unknown individual")
                rho[(i, s)] = rho.get((i, s), 0.0) + p
        for (i, s), p in rho.items():
            for j in s:
                if j != i and abs(rho.get((j, s), 0.0) - p) > PROB_ATOL:
                    raise ConfigurationError(f"sampling is not symmetric: rho^({i})({sorted(s)}) != rho^({j})")
        for i in range(n):
            for j in _others(i, n):
                if not sum(p for s, p in self.tables[i] if j in s) > 0.0:
                    raise ConfigurationError(f"observability fails: individual {i} never observes {j}")

    def n_uniforms(self, n_individuals):
        return n_individuals

    def draw(self, u, n_individuals):
        n = n_individuals
        s = np.zeros(u.shape + (n,), dtype=bool)
        for i in range(n):
            rows = [(smp, p) for smp, p in self.tables[i] if p > 0.0]
            cum = np.cumsum([p for _, p in rows])
            cum[-1] = 1.0
            idx = (u[:, i, None] >= cum[None, :]).sum(axis=-1)
            masks = np.array([[j in smp for j in range(n)] for smp, _ in rows])
            s[:, i, :] = masks[idx]
        return s

    def distribution(self, i, n_individuals):
        return [(s, p) for s, p in self.tables[i] if p > 0.0]


# --------------------------------------------------------------- components


class ImitationComponent:
    """Maps a sample's payoffs to imitation probabilities over the sample."""

    kind = "abstract"

    def weights(self, samples, x, support):
        """Imitation weights ``(R, |W|, |W|)``; row ``i`` sums to one and vanishes outside ``i``'s sample."""
        raise NotImplementedError

    def validate(self, support):
        """Raise if the component is not defined on ``support``."""


def _sizes(samples):
    return count_last(samples)


def _with_self_remainder(samples, off):
    me = np.arange(samples.shape[-1])
    off = np.array(off, dtype=np.float64)
    off[..., me, me] = 0.0
    off[..., me, me] = 1.0 - off.sum(axis=-1)
    return off


@dataclass(frozen=True)
class Proportional(ImitationComponent):
    """Imitate each other sampled ``j`` with probability ``x_j / (|s| x_max)``; the rest stays with self."""

    kind = "proportional"

    def validate(self, support):
        if support.x_min < 0.0 or not support.x_max > 0.0:
            raise ConfigurationError("proportional imitation needs nonnegative payoffs and x_max > 0")

    def weights(self, samples, x, support):
        size = _sizes(samples)[..., None]
        off = np.where(samples, x[..., None, :] / (size * support.x_max), 0.0)
        return _with_self_remainder(samples, off)


def _identity(x):
    return x


@dataclass(frozen=True)
class NormalizedScore(ImitationComponent):
    """Imitate ``j`` with probability ``f(x_j) / sum_{k in s} f(x_k)``; all-zero scores give ``1/|s|``."""

    score: object = _identity
    kind = "normalized_score"

    def validate(self, support):
        grid = np.linspace(support.x_min, support.x_max, 101)
        f = np.asarray(self.score(grid), dtype=np.float64)
        if np.any(f < 0.0) or np.any(np.diff(f) < -PROB_ATOL):
            raise ConfigurationError("score function must be nonnegative and nondecreasing on the support")

    def weights(self, samples, x, support):
        f = np.asarray(self.score(x), dtype=np.float64)
        num = np.where(samples, f[..., None, :], 0.0)
        den = num.sum(axis=-1, keepdims=True)
        size = _sizes(samples)[..., None]
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), samples / size)
        return w


@dataclass(frozen=True)
class LinearPairwise(ImitationComponent):
    """Imitate better-performing ``j`` with probability ``b max(x_j - x_i, 0) / ((|s| - 1) range)``."""

    b: float = 1.0
    kind = "linear_pairwise"

    def __post_init__(self):
        if not 0.0 < self.b <= 1.0:
            raise ConfigurationError(f"pairwise imitation strength must lie in (0, 1], got {self.b}", key="b")

    def weights(self, samples, x, support):
        size = _sizes(samples)[..., None]
        gap = np.maximum(x[..., None, :] - x[..., :, None], 0.0) / support.width
        denom = np.maximum(size - 1, 1)
        off = np.where(samples, self.b * gap / denom, 0.0)
        return _with_self_remainder(samples, off)


def imitation_probs(component, sample, actions, payoffs, self_index, support=None):
    """Imitation probabilities over ``sample`` (aligned with its order) for individual ``self_index``.

    ``actions`` do not enter the built-in components and are accepted for
    interface completeness.
    """
    sample = [int(j) for j in sample]
    if self_index not in sample:
        raise ParameterError(f"individual {self_index} is not in its own sample {sample}")
    if len(set(sample)) != len(sample):
        raise ParameterError("sample lists an individual twice")
    x = np.asarray(payoffs, dtype=np.float64)
    if support is None:
        from .environments import PayoffSupport

        support = PayoffSupport(min(0.0, float(x.min())), max(1.0, float(x.max())))
    m = len(sample)
    pos = sample.index(self_index)
    s = np.zeros((1, m, m), dtype=bool)
    s[0, pos, :] = True
    for k in range(m):
        s[0, k, k] = True
    return component.weights(s, x[None, :], support)[0, pos]


def behavioral_update(i, sample, actions, payoffs, component, lambda_t, sigma_i, support=None):
    """New probability row of individual ``i`` after observing its sample."""
    sigma_i = np.asarray(sigma_i, dtype=np.float64)
    if not 0.0 <= lambda_t <= 1.0:
        raise ParameterError(f"imitation rate must lie in [0, 1], got {lambda_t}")
    w = imitation_probs(component, sample, actions, payoffs, i, support)
    imit = np.zeros_like(sigma_i)
    for wk, ak in zip(w, actions):
        imit[int(ak)] += wk
    return lambda_t * imit + (1.0 - lambda_t) * sigma_i


# -------------------------------------------------------------------- rate


@dataclass(frozen=True)
class ImitationRate:
    """``lambda_t``: ``harmonic`` gives ``1/(t + 2)``; ``constant`` gives ``value``."""

    kind: str = "harmonic"
    value: float = 1.0

    def __post_init__(self):
        if self.kind not in ("harmonic", "constant"):
            raise ConfigurationError(f"unknown imitation rate {self.kind!r}", key="rate")
        if not 0.0 <= self.value <= 1.0:
            raise ConfigurationError(f"imitation rate must lie in [0, 1], got {self.value}", key="lambda")

    def __call__(self, t):
        if self.kind == "harmonic":
            return 1.0 / (t + 2)
        return float(self.value)


def _rate(lam):
    return lam if isinstance(lam, ImitationRate) else ImitationRate("constant", float(lam))


# -------------------------------------------------------------------- rule


class SocialRule(UpdatingRule):
    """Imitation updating rule for a population; one row of the configuration per individual."""

    model = "social"

    def __init__(self, component, sampling, rate=None):
        self.component = component
        self.sampling = sampling
        self.rate = _rate(ImitationRate() if rate is None else rate)

    def n_uniforms(self, n_individuals, n_actions):
        return n_individuals * (1 + n_actions) + self.sampling.n_uniforms(n_individuals)

    def validate(self, env, n_individuals, n_actions):
        self.sampling.validate(n_individuals)
        self.component.validate(env.support)
        if not env.independent_individuals:
            raise ConfigurationError("social rules need payoffs independent across individuals")

    def default_optimal(self, env):
        return optimal_set_expected(env)

    def draw(self, u, rows, info, env):
        n, w, a = rows.shape
        actions = choose_actions(rows, u[:, :w])
        realized = env.draw_realized(u[:, w : w * (1 + a)].reshape(n, w, a), actions)
        samples = self.sampling.draw(u[:, w * (1 + a) :], w)
        return Outcome(actions=actions, samples=samples, realized=realized)

    def _update(self, rows, actions, x, samples, lam, support):
        weights = self.component.weights(samples, x, support)
        onehot = (np.arange(rows.shape[-1]) == actions[..., None]).astype(np.float64)
        imit = np.matmul(weights, onehot)
        if lam == 1.0:
            return imit
        return lam * imit + (1.0 - lam) * rows

    def apply(self, t, rows, info, outcome, env):
        if outcome.realized is not None:
            x = outcome.realized
        else:
            x = np.take_along_axis(outcome.payoffs, outcome.actions[..., None], axis=-1)[..., 0]
        return self._update(rows, outcome.actions, x, outcome.samples, self.rate(t), env.support), info

    def enumerate_outcomes(self, t, rows, info, env):
        w, a = rows.shape
        lam = self.rate(t)
        per = []
        for i in range(w):
            items = []
            for act in range(a):
                if rows[i, act] <= 0.0:
                    continue
                d = env.distributions[i][act]
                for v, p in zip(d.values, d.probs):
                    items.append((act, v, rows[i, act] * p))
            per.append(items)
        samp = [self.sampling.distribution(i, w) for i in range(w)]
        total = np.prod([len(x) for x in per]) * np.prod([len(x) for x in samp])
        if total > MAX_JOINT:
            raise UnsupportedError(f"{total} joint social outcomes exceed the enumeration limit")
        probs, out = [], []
        for choice in product(*per):
            acts = np.array([c[0] for c in choice])
            x = np.array([c[1] for c in choice])
            pc = np.prod([c[2] for c in choice])
            for smp in product(*samp):
                s = np.array([[j in sm for j in range(w)] for sm, _ in smp])
                ps = np.prod([p for _, p in smp])
                new = self._update(rows[None], acts[None], x[None], s[None], lam, env.support)[0]
                probs.append(pc * ps)
                out.append(new)
        return np.array(probs), np.array(out), None

    def delta_tilde(self, env, t=0, optimal=None):
        return min(
            delta_tilde_exact(self.component, env, m, t, optimal)
            for m in self.sampling.sample_sizes(env.n_individuals)
        )

    def hazard_bound(self, env, optimal):
        w = env.n_individuals
        xi = self.sampling.xi(w)
        dt = self.delta_tilde(env, optimal=optimal)
        rate = self.rate

        def fn(t, info=None):
            return max(0.0, rate(t) * (w - 1) * xi * dt)

        floor = fn(0) if (rate.kind == "constant" and fn(0) > 0.0) else None
        return HazardBoundSequence(fn, floor=floor, square_nonsummable=fn(0) > 0.0, label="social")


def population_step(config, component, sampling, lambda_t, env, rng, t=0):
    """One population update drawn with ``rng`` (a numpy Generator or a vector of uniforms)."""
    if not isinstance(config, Configuration):
        config = Configuration(config)
    rows = config.rows[None].copy()
    w, a = config.rows.shape
    if w < 2:
        raise ConfigurationError("population_step needs at least two individuals")
    rule = SocialRule(component, sampling, _rate(lambda_t))
    rule.validate(env, w, a)
    n = rule.n_uniforms(w, a)
    u = rng.random(n) if hasattr(rng, "random") else np.asarray(rng, dtype=np.float64)
    if u.shape != (n,):
        raise ParameterError(f"population_step needs {n} uniforms")
    outcome = rule.draw(u[None, :], rows, None, env)
    new, _ = rule.apply(t, rows, None, outcome, env)
    from .core.types import renormalize_rows

    return Configuration(renormalize_rows(new, step=t + 1)[0])


# ------------------------------------------------------------------- exact


def _require_identical(env):
    if not env.identical:
        raise UnsupportedError("exact imitation bounds need payoff distributions identical across individuals")


def delta_tilde_exact(component, env, sample_size, t=0, optimal=None):
    """Exact ``min_{a in A*, b not in A*}`` of ``E[Lhat^(j)_i - Lhat^(i)_j]`` for a sample of the given size.

    ``i`` plays ``a``, ``j`` plays ``b``; the remaining members' actions range
    over every assignment and the minimum is taken.  Payoffs are independent
    draws from the (common) action distributions.
    """
    _require_identical(env)
    if sample_size < 2:
        raise ParameterError("a sample shared by two individuals has at least two members")
    if optimal is None:
        optimal = optimal_set_expected(env)
    dists = env.distributions[0]
    opt = sorted(optimal.sets[0])
    non = [b for b in range(env.n_actions) if b not in optimal.sets[0]]
    m = sample_size
    total = env.n_actions ** (m - 2) * int(np.prod([max(len(d.values) for d in dists)] * m))
    if total > MAX_JOINT:
        raise UnsupportedError(f"{total} sample outcomes exceed the enumeration limit")
    samples = np.ones((1, m, m), dtype=bool)
    best = np.inf
    for a, b in product(opt, non):
        for rest in product(range(env.n_actions), repeat=m - 2):
            acts = (a, b) + rest
            ds = [dists[k] for k in acts]
            xs = np.array(list(product(*[d.values for d in ds])))
            ps = np.prod(np.array(list(product(*[d.probs for d in ds]))), axis=1)
            w = component.weights(np.broadcast_to(samples, (len(xs), m, m)), xs, env.support)
            val = float(np.dot(ps, w[:, 1, 0] - w[:, 0, 1]))
            best = min(best, val)
    return best


def _check_small(config, env):
    w, a = config.shape
    k = max(len(d.values) for row in env.distributions for d in row)
    if w > MAX_EXACT_INDIVIDUALS or a > MAX_EXACT_ACTIONS or k > MAX_EXACT_SUPPORT:
        raise UnsupportedError(
            f"exact social check supports |W|<={MAX_EXACT_INDIVIDUALS}, |A|<={MAX_EXACT_ACTIONS}, "
            f"support<={MAX_EXACT_SUPPORT}; got {w}, {a}, {k}"
        )


def social_expected_gain(rows, component, sampling, lam, env, optimal):
    """Exact ``E[P_{t+1}] - P_t`` by enumeration of each individual's sample, actions and payoffs."""
    w, a = rows.shape
    mask = optimal.mask()
    p_now = float(aggregate_rows(rows, mask))
    expected = 0.0
    for i in range(w):
        p_i = float(rows[i, mask[i]].sum())
        e_imit = 0.0
        for smp, rho in sampling.distribution(i, w):
            members = sorted(smp)
            pos = members.index(i)
            m = len(members)
            s = np.ones((m, m), dtype=bool)
            for acts in product(range(a), repeat=m):
                pa = np.prod([rows[j, ak] for j, ak in zip(members, acts)])
                if pa == 0.0:
                    continue
                ds = [env.distributions[j][ak] for j, ak in zip(members, acts)]
                xs = np.array(list(product(*[d.values for d in ds])))
                ps = np.prod(np.array(list(product(*[d.probs for d in ds]))), axis=1)
                wts = component.weights(np.broadcast_to(s, (len(xs), m, m)), xs, env.support)[:, pos, :]
                hit = np.array([mask[i, ak] for ak in acts], dtype=np.float64)
                e_imit += rho * pa * float(np.dot(ps, wts @ hit))
        expected += lam * e_imit + (1.0 - lam) * p_i
    return expected / w - p_now


def wberhr_social_exact(config, component, sampling, lambda_t, env, t=0, optimal=None):
    """Exact one-step gain against ``lambda_t (|W|-1) xi delta_tilde P (1 - P)``.

    Returns ``(gain, bound, holds)`` with ``holds`` meaning ``gain >= bound - 1e-12``.
    """
    rows = config.rows if isinstance(config, Configuration) else np.asarray(config, dtype=np.float64)
    _check_small(rows, env)
    w = rows.shape[0]
    sampling.validate(w)
    if optimal is None:
        optimal = optimal_set_expected(env)
    lam = _rate(lambda_t)(t)
    p = float(aggregate_rows(rows, optimal.mask()))
    gain = social_expected_gain(rows, component, sampling, lam, env, optimal)
    dt = min(delta_tilde_exact(component, env, m, t, optimal) for m in sampling.sample_sizes(w))
    bound = lam * (w - 1) * sampling.xi(w) * dt * p * (1.0 - p)
    return gain, bound, bool(gain >= bound - 1e-12)


def xi_by_enumeration(sampling, n_individuals):
    """Co-observation minimum recomputed from the sample distributions."""
    return SamplingProcess.xi(sampling, n_individuals)


__all__ = [
    "ExplicitTable",
    "ImitationComponent",
    "ImitationRate",
    "LinearPairwise",
    "NormalizedScore",
    "Proportional",
    "SamplingProcess",
    "SocialRule",
    "UniformK",
    "UniformPairs",
    "behavioral_update",
    "delta_tilde_exact",
    "imitation_probs",
    "population_step",
    "social_expected_gain",
    "wberhr_social_exact",
    "xi_by_enumeration",
]
