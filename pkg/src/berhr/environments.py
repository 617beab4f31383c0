"""Finite-support payoff environments and the randomization device.

Payoffs are iid over time and independent across actions and individuals.
Each individual/action pair has its own finite distribution; the optimal sets
and the closed-form hazard bounds of the learning models are computed from
these known distributions.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .core.types import OptimalSet, count_last
from .errors import ConfigurationError, ParameterError

PROB_ATOL = 1e-12
FOSD_ATOL = 1e-12
TIE_ATOL = 1e-12


@dataclass(frozen=True)
class PayoffSupport:
    x_min: float
    x_max: float

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)) or not self.x_min < self.x_max:
            raise ConfigurationError(f"payoff support needs x_min < x_max, got [{self.x_min}, {self.x_max}]")

    @property
    def width(self):
        return self.x_max - self.x_min

    def contains(self, x):
        x = np.asarray(x)
        return bool(np.all((x >= self.x_min) & (x <= self.x_max)))


class Distribution:
    """Finite payoff distribution; support points sorted, duplicates merged, zero masses dropped."""

    def __init__(self, pairs):
        pairs = list(pairs.items()) if isinstance(pairs, dict) else list(pairs)
        if not pairs:
            raise ConfigurationError("a payoff distribution needs at least one support point")
        merged = {}
        for v, p in pairs:
            v, p = float(v), float(p)
            if not np.isfinite(v):
                raise ConfigurationError("payoff values must be finite")
            if p < 0.0 or not np.isfinite(p):
                raise ConfigurationError(f"payoff probability must be nonnegative, got {p}")
            merged[v] = merged.get(v, 0.0) + p
        total = sum(merged.values())
        if abs(total - 1.0) > PROB_ATOL:
            raise ConfigurationError(f"payoff probabilities sum to {total!r}, not 1")
        items = sorted((v, p) for v, p in merged.items() if p > 0.0)
        self.values = np.array([v for v, _ in items])
        self.probs = np.array([p for _, p in items])
        self.values.setflags(write=False)
        self.probs.setflags(write=False)

    @classmethod
    def bernoulli(cls, p, low=0.0, high=1.0):
        return cls([(low, 1.0 - p), (high, p)])

    @property
    def mean(self):
        return float(np.dot(self.values, self.probs))

    def expect(self, f):
        return float(np.dot(f(self.values), self.probs))

    def cdf(self, z):
        z = np.asarray(z, dtype=np.float64)
        return (self.probs[None, :] * (self.values[None, :] <= z.reshape(-1, 1))).sum(axis=1).reshape(z.shape)

    def pairs(self):
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def __eq__(self, other):
        return (
            isinstance(other, Distribution)
            and np.array_equal(self.values, other.values)
            and np.allclose(self.probs, other.probs, rtol=0.0, atol=PROB_ATOL)
        )

    def __hash__(self):
        return hash(tuple(self.values.tolist()))

    def __repr__(self):
        return f"Distribution({self.pairs()!r})"


class Environment:
    """Per-individual, per-action payoff distributions (iid over time).

    ``identical`` asserts that every individual faces the same distribution for
    each action; it is checked at construction.
    """

    stationarity = "iid"
    independent_actions = True
    independent_individuals = True

    def __init__(self, distributions, support=None, identical=False):
        dists = tuple(tuple(d if isinstance(d, Distribution) else Distribution(d) for d in row) for row in distributions)
        if not dists or any(len(row) != len(dists[0]) for row in dists):
            raise ConfigurationError("every individual needs a distribution for every action")
        if len(dists[0]) < 2:
            raise ConfigurationError("an environment needs at least two actions")
        values = np.concatenate([d.values for row in dists for d in row])
        if support is None:
            support = PayoffSupport(float(values.min()), float(values.max()))
        elif not isinstance(support, PayoffSupport):
            support = PayoffSupport(*support)
        if not support.contains(values):
            raise ConfigurationError(f"payoff values leave the declared support [{support.x_min}, {support.x_max}]")
        if identical and any(row != dists[0] for row in dists[1:]):
            raise ConfigurationError("distributions are declared identical across individuals but differ")
        self.distributions = dists
        self.support = support
        self.identical = bool(identical) or all(row == dists[0] for row in dists[1:])
        self._build_tables()

    @classmethod
    def identical_for(cls, n_individuals, action_distributions, support=None):
        row = tuple(d if isinstance(d, Distribution) else Distribution(d) for d in action_distributions)
        return cls([row] * n_individuals, support=support, identical=True)

    @classmethod
    def bernoulli(cls, success_probs, n_individuals=1, low=0.0, high=1.0):
        row = [Distribution.bernoulli(p, low, high) for p in success_probs]
        return cls.identical_for(n_individuals, row, support=PayoffSupport(low, high))

    @property
    def n_individuals(self):
        return len(self.distributions)

    @property
    def n_actions(self):
        return len(self.distributions[0])

    def means(self):
        return np.array([[d.mean for d in row] for row in self.distributions])

    def _build_tables(self):
        k = max(len(d.values) for row in self.distributions for d in row)
        w, a = self.n_individuals, self.n_actions
        vals = np.zeros((w, a, k))
        cum = np.full((w, a, k), np.inf)
        for i, row in enumerate(self.distributions):
            for j, d in enumerate(row):
                n = len(d.values)
                vals[i, j, :n] = d.values
                vals[i, j, n:] = d.values[-1]
                c = np.cumsum(d.probs)
                c[-1] = 1.0
                cum[i, j, :n] = c
        self._values = vals
        self._cum = cum

    def draw_payoffs(self, u):
        """Inverse-CDF payoff draws; ``u`` has shape ``(R, |W|, |A|)``."""
        idx = count_last(u[..., None] >= self._cum)
        return np.take_along_axis(np.broadcast_to(self._values, u.shape + self._values.shape[-1:]), idx[..., None], axis=-1)[..., 0]

    def draw_realized(self, u, actions):
        """Payoffs of the chosen ``actions`` only; equals ``draw_payoffs(u)`` gathered at ``actions``."""
        w = np.arange(self.n_individuals)
        uu = np.take_along_axis(u, actions[..., None], axis=-1)
        idx = count_last(uu >= self._cum[w, actions])
        return self._values[w, actions, idx]

    def __repr__(self):
        return f"Environment({self.n_individuals}x{self.n_actions}, support=[{self.support.x_min}, {self.support.x_max}])"


def choose_action(row, u):
    """Randomization device: smallest action ``a`` with ``u < sum(row[:a+1])``."""
    if not 0.0 <= u < 1.0:
        raise ParameterError(f"device uniform must lie in [0, 1), got {u}")
    row = np.asarray(row, dtype=np.float64)
    return int(choose_actions(row[None, None, :], np.array([[u]]))[0, 0])


def choose_actions(rows, u):
    """Vectorised device over ``rows`` ``(R, |W|, |A|)`` and uniforms ``u`` ``(R, |W|)``."""
    cum = np.cumsum(rows, axis=-1)
    idx = count_last(u[..., None] >= cum)
    n = rows.shape[-1]
    over = idx >= n
    if np.any(over):
        # u beyond the rounded total: fall back to the last action with mass
        last = n - 1 - np.argmax(rows[..., ::-1] > 0.0, axis=-1)
        idx = np.where(over, last, idx)
    return idx


def expected_maximizers(env):
    means = env.means()
    return [
        frozenset(int(a) for a in np.flatnonzero(m >= m.max() - TIE_ATOL))
        for m in means
    ]


def optimal_set_expected(env):
    """Expected-payoff maximizing actions per individual (ties included)."""
    return OptimalSet(tuple(expected_maximizers(env)), env.n_actions)


class _NoDominantAction:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NoDominantAction"

    def __bool__(self):
        return False


NoDominantAction = _NoDominantAction()


def fosd_dominant(env):
    """Per individual, actions whose CDF lies below every other action's CDF on the merged grid."""
    out = []
    for row in env.distributions:
        grid = np.unique(np.concatenate([d.values for d in row]))
        cdfs = np.array([d.cdf(grid) for d in row])
        dom = [
            a for a in range(len(row))
            if np.all(cdfs[a][None, :] <= cdfs + FOSD_ATOL)
        ]
        out.append(frozenset(dom))
    return out


def optimal_set_fosd(env):
    """First-order stochastically dominant actions, or ``NoDominantAction``."""
    sets = fosd_dominant(env)
    if any(not s for s in sets):
        return NoDominantAction
    return OptimalSet(tuple(sets), env.n_actions)


def _rescaled_means(env):
    return (env.means() - env.support.x_min) / env.support.width


def _pairs(optimal, i, n_actions):
    opt = sorted(optimal.sets[i])
    non = [b for b in range(n_actions) if b not in optimal.sets[i]]
    return product(opt, non)


def delta_lower_bound(env, model, t, optimal=None, **params):
    """Closed-form lower bound ``delta_t`` of the expected relative hazard rate.

    ``model`` is one of ``monotone`` (params ``B``: coefficient matrix at
    ``t``, or ``c`` for the canonical ``c/(t+1)``), ``full_info`` (``switch``
    and ``scale``; payoffs rescaled to [0, 1]), ``roth_erev`` (``V0`` and optionally ``epsilon``,
    ``x_max``) or ``social`` (``lambda_t``, ``xi``, ``delta_tilde``).
    """
    if optimal is None and model != "social":
        optimal = optimal_set_expected(env)
    if model == "monotone":
        if "B" in params:
            b = np.asarray(params["B"], dtype=np.float64)
        else:
            c = float(params.get("c", 1.0))
            b = np.full((env.n_actions, env.n_actions), c / (t + 1))
        means = _rescaled_means(env)
        vals = [
            b[bb, a] * (means[i, a] - means[i, bb])
            for i in range(env.n_individuals)
            for a, bb in _pairs(optimal, i, env.n_actions)
        ]
        return max(0.0, min(vals))
    if model == "full_info":
        switch = params["switch"]
        scale = float(params.get("scale", 1.0))
        vals = []
        for i in range(env.n_individuals):
            row = env.distributions[i]
            for a, bb in _pairs(optimal, i, env.n_actions):
                g = switch.for_pair(a, bb)
                vals.append(scale * expected_switch(g, row[bb], row[a], env.support))
        return max(0.0, min(vals))
    if model == "roth_erev":
        x_max = float(params.get("x_max", env.support.x_max))
        v0 = float(params["V0"])
        eps = params.get("epsilon")
        if eps is None:
            eps = mean_gap(env, optimal)
        return float(eps) / (2.0 * (v0 + (t + 1) * x_max))
    if model == "social":
        lam = float(params["lambda_t"])
        xi = float(params["xi"])
        dt = float(params["delta_tilde"])
        n = int(params.get("n_individuals", env.n_individuals))
        return lam * (n - 1) * xi * dt
    raise ParameterError(f"unknown model {model!r} for delta_lower_bound")


def expected_switch(g, dist_from, dist_to, support=None):
    """``E[g(x_from, x_to)]`` for independent payoffs, rescaled to [0, 1] when ``support`` is given."""
    vf, vt = dist_from.values, dist_to.values
    if support is not None:
        vf = (vf - support.x_min) / support.width
        vt = (vt - support.x_min) / support.width
    xf, xt = np.meshgrid(vf, vt, indexing="ij")
    w = np.outer(dist_from.probs, dist_to.probs)
    return float((w * g(xf, xt)).sum())


def mean_gap(env, optimal=None):
    """Smallest expected payoff gap between an optimal and a non-optimal action."""
    if optimal is None:
        optimal = optimal_set_expected(env)
    means = env.means()
    return float(min(
        means[i, a] - means[i, b]
        for i in range(env.n_individuals)
        for a, b in _pairs(optimal, i, env.n_actions)
    ))
