"""Individual learning rules: monotone partial-information, symmetric-switch full-information, Roth-Erev.

Monotone and full-information rules act on payoffs rescaled to [0, 1] through
the environment's payoff support.  Roth-Erev works on raw (nonnegative)
payoffs.

Coefficient index convention: the stand-alone update functions take the
coefficient index ``t`` directly, so ``A = (1 - c)/(t + 1)`` and
``B = c/(t + 1)``.  A rule object used in a simulation applies coefficient
index ``t + offset`` on the transition from step ``t`` to ``t + 1``
(``offset=1`` by default, so the first transition uses ``B = c/2``).
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .core.engine import Outcome, UpdatingRule
from .core.schedules import HazardBoundSequence, SlowingSchedule
from .environments import (
    choose_actions,
    delta_lower_bound,
    mean_gap,
    optimal_set_expected,
)
from .errors import ConfigurationError, ParameterError, PreconditionError, UnsupportedError

COEF_ATOL = 1e-12
SWITCH_ATOL = 1e-12
MAX_ENUMERATION = 200_000


def rescale(x, support):
    """Map payoffs from ``[x_min, x_max]`` onto ``[0, 1]``."""
    return (np.asarray(x, dtype=np.float64) - support.x_min) / support.width


def _decay(kind, c, t):
    if kind == "harmonic":
        return c / (t + 1)
    if kind == "constant":
        return c
    raise ConfigurationError(f"unknown decay {kind!r}; use 'harmonic' or 'constant'", key="decay")


# ---------------------------------------------------------------- monotone


@dataclass(frozen=True)
class MonotoneParams:
    """Coefficients of a monotone rule.

    Canonical form (``A``/``B`` tables omitted): ``A_t = (1 - c)/(t + 1)`` and
    ``B_t = c/(t + 1)`` for every pair.  General form: symmetric off-diagonal
    tables ``A[b, a]``, ``B[b, a]`` (chosen ``b``, affected ``a``) scaled by the
    decay; the chosen action's own coefficients are the ``sigma(c)``-weighted
    averages of its column, which keeps rows on the simplex exactly.
    """

    c: float = 1.0
    A: Optional[np.ndarray] = None
    B: Optional[np.ndarray] = None
    decay: str = "harmonic"
    diagonal_convention: str = field(default="sigma(c)-weighted", init=False)

    def __post_init__(self):
        _decay(self.decay, 1.0, 0)
        if (self.A is None) != (self.B is None):
            raise ConfigurationError("general monotone coefficients need both A and B tables")
        if self.A is None:
            if not 0.0 < self.c <= 1.0:
                raise ConfigurationError(f"monotone c must lie in (0, 1], got {self.c}", key="c")
            return
        a = np.array(self.A, dtype=np.float64)
        b = np.array(self.B, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape or a.shape[0] < 2:
            raise ConfigurationError("coefficient tables must be square |A|x|A| arrays of equal shape")
        off = ~np.eye(a.shape[0], dtype=bool)
        if np.any(b[off] < 0.0):
            raise ConfigurationError("B coefficients must be nonnegative")
        if not (np.allclose(a, a.T, atol=COEF_ATOL, rtol=0) and np.allclose(b, b.T, atol=COEF_ATOL, rtol=0)):
            raise ConfigurationError("coefficient tables must be symmetric across pairs")
        for x in (0.0, 1.0):
            k = (a + b * x)[off]
            if np.any(k < -COEF_ATOL) or np.any(k > 1.0 + COEF_ATOL):
                raise ConfigurationError(f"A + B*x leaves [0, 1] at x={x}; the rule would leave the simplex")
        if not _connected(b > 0.0):
            raise ConfigurationError("some non-empty strict subset of actions receives no positive B coefficient")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)

    @property
    def canonical(self):
        return self.A is None

    @property
    def n_actions(self):
        return None if self.canonical else self.A.shape[0]

    def coefficients(self, t, n_actions):
        """``(A_t, B_t)`` as ``|A| x |A|`` arrays (diagonal unused)."""
        if self.canonical:
            s = _decay(self.decay, 1.0, t)
            return np.full((n_actions, n_actions), (1.0 - self.c) * s), np.full((n_actions, n_actions), self.c * s)
        if n_actions != self.A.shape[0]:
            raise ConfigurationError(f"coefficient tables are {self.A.shape[0]}x{self.A.shape[0]} but |A|={n_actions}")
        s = _decay(self.decay, 1.0, t)
        return self.A * s, self.B * s

    def scalars(self, t):
        """Canonical ``(A_t, B_t)``."""
        s = _decay(self.decay, 1.0, t)
        return (1.0 - self.c) * s, self.c * s


def _connected(adj):
    n = adj.shape[0]
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(adj[i]):
            if j != i and j not in seen:
                seen.add(int(j))
                stack.append(int(j))
    return len(seen) == n


def _check_k(k):
    if np.any(k < -COEF_ATOL) or np.any(k > 1.0 + COEF_ATOL):
        raise ParameterError("A + B*x lies outside [0, 1]")


def monotone_update(chosen, x, params, sigma, t):
    """One monotone update of a single probability row after playing ``chosen`` for payoff ``x``.

    Parameters
    ----------
    chosen : int
        Action played (0-based).
    x : float
        Payoff rescaled to [0, 1].
    params : MonotoneParams
    sigma : array_like
        Current probability row.
    t : int
        Coefficient index.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if not 0.0 <= x <= 1.0:
        raise ParameterError(f"monotone rules need payoffs rescaled to [0, 1], got {x}")
    if params.canonical:
        a, b = params.scalars(t)
        k = a + b * x
        _check_k(k)
        out = sigma * (1.0 - k)
        out[chosen] = sigma[chosen] + (1.0 - sigma[chosen]) * k
        return out
    a, b = params.coefficients(t, len(sigma))
    k = a[chosen] + b[chosen] * x
    k[chosen] = 0.0
    _check_k(k)
    out = sigma * (1.0 - k)
    out[chosen] = sigma[chosen] + np.dot(sigma, k)
    return out


def monotone_expected_change(params, sigma, env, t, individual=0):
    """Expected one-step change of every action probability, in closed form.

    Returns ``sigma(a) * sum_b B_t[b, a] sigma(b) (E x(a) - E x(b))`` with means
    on the rescaled payoff scale.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    _, b = params.coefficients(t, len(sigma))
    mu = rescale(env.means()[individual], env.support)
    diff = mu[None, :] - mu[:, None]  # [b, a] = mu_a - mu_b
    return sigma * np.einsum("b,ba,ba->a", sigma, b, diff)


def _realized(outcome):
    if outcome.realized is not None:
        return outcome.realized
    return np.take_along_axis(outcome.payoffs, outcome.actions[..., None], axis=-1)[..., 0]


class _IndividualRule(UpdatingRule):
    """Shared pieces: one device uniform per individual plus one payoff uniform per action."""

    observes_forgone = True

    def n_uniforms(self, n_individuals, n_actions):
        return n_individuals * (1 + n_actions)

    def draw(self, u, rows, info, env):
        n, w, a = rows.shape
        actions = choose_actions(rows, u[:, :w])
        pu = u[:, w:].reshape(n, w, a)
        if self.observes_forgone:
            return Outcome(actions=actions, payoffs=env.draw_payoffs(pu))
        return Outcome(actions=actions, realized=env.draw_realized(pu, actions))

    def default_optimal(self, env):
        return optimal_set_expected(env)

    def _joint(self, per_individual):
        sizes = [len(p[0]) for p in per_individual]
        total = int(np.prod(sizes))
        if total > MAX_ENUMERATION:
            raise UnsupportedError(f"{total} joint one-step outcomes exceed the enumeration limit")
        probs, rows, infos = [], [], []
        for combo in product(*[range(s) for s in sizes]):
            probs.append(np.prod([per_individual[i][0][k] for i, k in enumerate(combo)]))
            rows.append(np.stack([per_individual[i][1][k] for i, k in enumerate(combo)]))
            if per_individual[0][2] is not None:
                infos.append(np.stack([per_individual[i][2][k] for i, k in enumerate(combo)]))
        return np.array(probs), np.array(rows), (np.array(infos) if infos else None)

    def _partial_outcomes(self, rows, env):
        """Per individual: every (action, payoff) pair with its probability."""
        out = []
        for i, row in enumerate(rows):
            items = []
            for a, pa in enumerate(row):
                if pa <= 0.0:
                    continue
                d = env.distributions[i][a]
                for v, p in zip(d.values, d.probs):
                    items.append((a, float(v), pa * p))
            out.append(items)
        return out


class MonotoneRule(_IndividualRule):
    """Monotone partial-information learning rule."""

    model = "monotone"
    observes_forgone = False

    def __init__(self, params=None, offset=1):
        self.params = params if params is not None else MonotoneParams()
        self.offset = int(offset)
        if self.offset < 0:
            raise ConfigurationError("coefficient offset must be nonnegative", key="offset")

    def validate(self, env, n_individuals, n_actions):
        if not self.params.canonical and self.params.n_actions != n_actions:
            raise ConfigurationError(f"coefficient tables do not match |A|={n_actions}")

    def apply(self, t, rows, info, outcome, env):
        k_index = t + self.offset
        x = rescale(_realized(outcome), env.support)
        onehot = np.arange(rows.shape[-1]) == outcome.actions[..., None]
        if self.params.canonical:
            a, b = self.params.scalars(k_index)
            k = (a + b * x)[..., None]
            out = np.where(onehot, rows + (1.0 - rows) * k, rows * (1.0 - k))
            return out, info
        a, b = self.params.coefficients(k_index, rows.shape[-1])
        kmat = a[outcome.actions] + b[outcome.actions] * x[..., None]
        kmat = np.where(onehot, 0.0, kmat)
        out = rows * (1.0 - kmat)
        gained = (rows * kmat).sum(axis=-1, keepdims=True)
        return np.where(onehot, rows + gained, out), info

    def enumerate_outcomes(self, t, rows, info, env):
        k_index = t + self.offset
        per = []
        for i, items in enumerate(self._partial_outcomes(rows, env)):
            probs = [p for _, _, p in items]
            new = [monotone_update(a, float(rescale(v, env.support)), self.params, rows[i], k_index) for a, v, _ in items]
            per.append((probs, new, None))
        return self._joint(per)

    def hazard_bound(self, env, optimal):
        n = env.n_actions

        def fn(t, info=None):
            _, b = self.params.coefficients(t + self.offset, n)
            return delta_lower_bound(env, "monotone", t + self.offset, optimal=optimal, B=b)

        harmonic = self.params.decay == "harmonic"
        floor = None if harmonic else fn(0) or None
        return HazardBoundSequence(fn, floor=floor, square_nonsummable=bool(fn(0) > 0.0), label="monotone")


# ---------------------------------------------------------- full information


class SwitchFunction:
    """Symmetric-switch function ``g(x1, x2)`` on rescaled payoffs.

    Build with :meth:`linear`, :meth:`power` or :meth:`custom`.
    """

    def __init__(self, family, fn, params, grid=None):
        self.family = family
        self._fn = fn
        self.params = dict(params)
        self.grid = None if grid is None else np.asarray(grid, dtype=np.float64)

    @classmethod
    def linear(cls, b=1.0):
        if not 0.0 <= b <= 1.0:
            raise ConfigurationError(f"linear switch needs 0 <= b <= 1, got {b}", key="b")
        return cls("linear", lambda x1, x2: b * (x2 - x1), {"b": b})

    @classmethod
    def power(cls, beta=1.0, p=1.0):
        if not 0.0 <= beta <= 1.0:
            raise ConfigurationError(f"power switch needs 0 <= beta <= 1, got {beta}", key="beta")
        if not p > 0.0:
            raise ConfigurationError(f"power switch needs p > 0, got {p}", key="p")
        return cls("power", lambda x1, x2: beta * (np.power(x2, p) - np.power(x1, p)), {"beta": beta, "p": p})

    @classmethod
    def custom(cls, grid, table, check=True):
        grid = np.asarray(grid, dtype=np.float64)
        table = np.asarray(table, dtype=np.float64)
        if table.shape != (len(grid), len(grid)):
            raise ConfigurationError("custom switch table must be square over its grid")
        order = np.argsort(grid)
        grid, table = grid[order], table[np.ix_(order, order)]

        def fn(x1, x2):
            i1 = _grid_index(grid, x1)
            i2 = _grid_index(grid, x2)
            return table[i1, i2]

        g = cls("custom", fn, {"table": table.tolist()}, grid=grid)
        if check:
            problems = g.validate()
            if problems:
                raise ConfigurationError("custom switch table is not symmetric-switch: " + "; ".join(problems[:3]))
        return g

    def __call__(self, x1, x2):
        return self._fn(np.asarray(x1, dtype=np.float64), np.asarray(x2, dtype=np.float64))

    def validate(self, grid=None, atol=SWITCH_ATOL):
        """List every violated symmetric-switch condition on ``grid`` (default: own grid or 21 points)."""
        if grid is None:
            grid = self.grid if self.grid is not None else np.linspace(0.0, 1.0, 21)
        grid = np.asarray(grid, dtype=np.float64)
        x1, x2 = np.meshgrid(grid, grid, indexing="ij")
        g = self(x1, x2)
        problems = []
        for i, j in np.argwhere(np.abs(g + g.T) > atol):
            if i <= j:
                problems.append(f"antisymmetry fails at ({grid[i]:g}, {grid[j]:g})")
        for i, j in np.argwhere(np.diff(g, axis=1) < -atol):
            problems.append(f"decreasing in second argument at x1={grid[i]:g} between {grid[j]:g} and {grid[j + 1]:g}")
        for i, j in np.argwhere((x2 > x1) & (g < -atol)):
            problems.append(f"negative switch at ({grid[i]:g}, {grid[j]:g})")
        for i, j in np.argwhere(np.abs(g) > 1.0 + atol):
            problems.append(f"value outside [-1, 1] at ({grid[i]:g}, {grid[j]:g})")
        return problems

    def __repr__(self):
        return f"SwitchFunction({self.family}, {self.params})"


def _grid_index(grid, x):
    idx = np.searchsorted(grid, x)
    idx = np.clip(idx, 0, len(grid) - 1)
    if not np.all(np.abs(grid[idx] - x) <= SWITCH_ATOL):
        raise ParameterError("payoff not on the custom switch grid")
    return idx


class SwitchMatrix:
    """One symmetric-switch function per unordered action pair."""

    def __init__(self, n_actions, default=None, pairs=None):
        self.n_actions = int(n_actions)
        self._pairs = {}
        for a in range(self.n_actions):
            for b in range(a + 1, self.n_actions):
                self._pairs[(a, b)] = default
        for (a, b), g in (pairs or {}).items():
            key = (min(a, b), max(a, b))
            if key not in self._pairs or a == b:
                raise ConfigurationError(f"switch pair {(a, b)} out of range")
            self._pairs[key] = g
        missing = [k for k, g in self._pairs.items() if g is None]
        if missing:
            raise ConfigurationError(f"no switch function for pairs {missing}")
        self.uniform = pairs is None or all(g is default for g in self._pairs.values())
        self.default = default

    def for_pair(self, a, b):
        return self._pairs[(min(a, b), max(a, b))]

    def validate(self, grid=None):
        out = []
        for (a, b), g in self._pairs.items():
            out.extend(f"pair ({a}, {b}): {p}" for p in g.validate(grid))
        return out


def full_info_update(payoffs, switches, sigma, scale=1.0):
    """Full-information update of one probability row from the payoff vector (rescaled).

    ``L_a = sigma(a) (1 + sum_{b != a} sigma(b) scale g_{b,a}(x(b), x(a)))``.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    x = np.asarray(payoffs, dtype=np.float64)
    n = len(sigma)
    if isinstance(switches, SwitchFunction):
        switches = SwitchMatrix(n, default=switches)
    gain = np.zeros(n)
    for a in range(n):
        for b in range(n):
            if b != a:
                gain[a] += sigma[b] * switches.for_pair(a, b)(x[b], x[a])
    return sigma * (1.0 + scale * gain)


class FullInfoRule(_IndividualRule):
    """Symmetric-switch full-information rule with optional time decay of the switch scale."""

    model = "full_info"

    def __init__(self, switches, decay="constant", c=1.0, offset=1, grid=None):
        self.switches = switches
        self.decay = decay
        self.c = float(c)
        self.offset = int(offset)
        _decay(decay, self.c, 0)
        if not 0.0 < self.c <= 1.0:
            raise ConfigurationError(f"switch scale c must lie in (0, 1], got {c}", key="c")
        problems = self._matrix(switches.n_actions if isinstance(switches, SwitchMatrix) else 2).validate(grid)
        if problems:
            raise ConfigurationError("switch functions are not symmetric-switch: " + "; ".join(problems[:3]))

    def _matrix(self, n_actions):
        if isinstance(self.switches, SwitchMatrix):
            if self.switches.n_actions != n_actions:
                raise ConfigurationError(f"switch matrix is for {self.switches.n_actions} actions, not {n_actions}")
            return self.switches
        return SwitchMatrix(n_actions, default=self.switches)

    def scale(self, t):
        return _decay(self.decay, self.c, t)

    def validate(self, env, n_individuals, n_actions):
        m = self._matrix(n_actions)
        grid = np.unique(rescale(np.concatenate([d.values for row in env.distributions for d in row]), env.support))
        problems = m.validate(grid)
        if problems:
            raise ConfigurationError("switch functions fail on the payoff support: " + "; ".join(problems[:3]))

    def _gmat(self, x):
        n = x.shape[-1]
        m = self._matrix(n)
        if m.uniform:
            return m.default(x[..., :, None], x[..., None, :])
        g = np.zeros(x.shape + (n,))
        for a in range(n):
            for b in range(n):
                if a != b:
                    g[..., b, a] = m.for_pair(a, b)(x[..., b], x[..., a])
        return g

    def apply(self, t, rows, info, outcome, env):
        x = rescale(outcome.payoffs, env.support)
        g = self._gmat(x)  # [..., b, a] = g(x_b, x_a)
        n = rows.shape[-1]
        g = np.where(np.eye(n, dtype=bool), 0.0, g)
        gain = np.einsum("...b,...ba->...a", rows, g)
        return rows * (1.0 + self.scale(t + self.offset) * gain), info

    def enumerate_outcomes(self, t, rows, info, env):
        s = self.scale(t + self.offset)
        m = self._matrix(rows.shape[-1])
        per = []
        for i, row in enumerate(rows):
            dists = env.distributions[i]
            probs, new = [], []
            for combo in product(*[range(len(d.values)) for d in dists]):
                x = np.array([rescale(d.values[k], env.support) for d, k in zip(dists, combo)])
                probs.append(float(np.prod([d.probs[k] for d, k in zip(dists, combo)])))
                new.append(full_info_update(x, m, row, s))
            per.append((probs, new, None))
        return self._joint(per)

    def hazard_bound(self, env, optimal):
        m = self._matrix(env.n_actions)

        def fn(t, info=None):
            return delta_lower_bound(env, "full_info", t, optimal=optimal, switch=m, scale=self.scale(t + self.offset))

        d0 = fn(0)
        floor = d0 if (self.decay == "constant" and d0 > 0.0) else None
        return HazardBoundSequence(fn, floor=floor, square_nonsummable=d0 > 0.0, label="full_info")


# ----------------------------------------------------------------- Roth-Erev


def roth_erev_update(chosen, x, f):
    """Roth-Erev update; returns ``(probabilities, attractions)``."""
    f = np.asarray(f, dtype=np.float64)
    if x < 0.0:
        raise ParameterError(f"Roth-Erev payoffs must be nonnegative, got {x}")
    if np.any(f <= 0.0):
        raise ParameterError("attractions must be strictly positive")
    new = f.copy()
    new[chosen] += x
    return new / new.sum(), new


def roth_erev_theta(f, x_max):
    """``x_max / V`` for attractions ``f`` with total ``V``."""
    v = float(np.sum(f))
    if not v > x_max:
        raise PreconditionError(f"sum of attractions {v} must exceed x_max={x_max}")
    return x_max / v


def roth_erev_delta(f, env, optimal=None, individual=0):
    """``min_{a in A*, b not in A*} E x(a)/(V + x_max) - E x(b)/V`` at attractions ``f``."""
    if optimal is None:
        optimal = optimal_set_expected(env)
    v = np.sum(f, axis=-1)
    x_max = env.support.x_max
    mu = env.means()[individual]
    opt = sorted(optimal.sets[individual])
    non = [b for b in range(env.n_actions) if b not in optimal.sets[individual]]
    vals = [mu[a] / (v + x_max) - mu[b] / v for a in opt for b in non]
    return np.min(np.stack(vals), axis=0)


class RothErevRule(_IndividualRule):
    """Roth-Erev rule; the information state is the attraction array ``(R, |W|, |A|)``."""

    model = "roth_erev"
    observes_forgone = False

    def __init__(self, attractions, strict=True):
        f = np.array(attractions, dtype=np.float64)
        if f.ndim == 1:
            f = f[None, :]
        if f.ndim != 2 or f.shape[1] < 2:
            raise ConfigurationError("initial attractions need shape (|W|, |A|) with |A| >= 2", key="attractions")
        if np.any(~(f > 0.0)):
            raise ConfigurationError("initial attractions must be strictly positive", key="attractions")
        f.setflags(write=False)
        self.f0 = f
        self.strict = bool(strict)

    @property
    def v0(self):
        return self.f0.sum(axis=-1)

    def validate(self, env, n_individuals, n_actions):
        if self.f0.shape != (n_individuals, n_actions):
            raise ConfigurationError(f"attractions have shape {self.f0.shape}, system is {(n_individuals, n_actions)}")
        if env.support.x_min < 0.0:
            raise ConfigurationError("Roth-Erev needs a nonnegative payoff support", key="x_min")
        if self.strict:
            x_max = env.support.x_max
            eps = mean_gap(env)
            if eps <= 0.0:
                raise PreconditionError("Roth-Erev guarantee needs a strictly positive mean gap")
            need = max(2.0 * x_max ** 2 / eps, x_max)
            if np.any(self.v0 <= need):
                raise PreconditionError(f"initial attraction total must exceed max(2 x_max^2/eps, x_max) = {need:g}")

    def default_initial(self, env):
        from .core.types import Configuration

        return Configuration(self.f0 / self.f0.sum(axis=-1, keepdims=True))

    def initial_info(self, rows, n):
        return np.broadcast_to(self.f0, (n,) + self.f0.shape).copy()

    def apply(self, t, rows, info, outcome, env):
        x = _realized(outcome)[..., None]
        onehot = np.arange(rows.shape[-1]) == outcome.actions[..., None]
        f = info + np.where(onehot, x, 0.0)
        return f / f.sum(axis=-1, keepdims=True), f

    def enumerate_outcomes(self, t, rows, info, env):
        per = []
        for i, items in enumerate(self._partial_outcomes(rows, env)):
            probs, new, infos = [], [], []
            for a, v, p in items:
                row, f = roth_erev_update(a, v, info[i])
                probs.append(p)
                new.append(row)
                infos.append(f)
            per.append((probs, new, infos))
        return self._joint(per)

    def hazard_bound(self, env, optimal):
        def fn(t, info=None):
            if info is None:
                return delta_lower_bound(env, "roth_erev", t, optimal=optimal, V0=float(self.v0.min()))
            return np.min(roth_erev_delta(info, env, optimal), axis=-1)

        return HazardBoundSequence(fn, square_nonsummable=True, label="roth_erev")

    def summary(self, info):
        return {"attractions": info}


class AttractionTheta(SlowingSchedule):
    """``theta_t = x_max / V_t`` read from Roth-Erev attractions (single individual)."""

    kind = "attraction"

    def __init__(self, x_max):
        self.x_max = float(x_max)

    def __call__(self, t, info=None):
        if info is None:
            raise ParameterError("attraction-based theta needs the information state")
        info = np.asarray(info)
        if info.ndim == 3 and info.shape[1] != 1:
            raise UnsupportedError("attraction-based theta is defined for a single individual")
        v = info.reshape(info.shape[0], -1).sum(axis=-1) if info.ndim == 3 else np.sum(info)
        if np.any(v <= self.x_max):
            raise PreconditionError("attraction total must exceed x_max")
        return self.x_max / v
