"""Configurations, optimal sets, the aggregator and the slow-version step."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, InvariantViolation, ParameterError

SIMPLEX_ATOL = 1e-12


def _as_rows(rows):
    arr = np.array(rows, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ConfigurationError(f"configuration must be a 2-d array of rows, got shape {arr.shape}")
    return arr


def check_simplex_rows(arr, atol=SIMPLEX_ATOL):
    """Raise ``ConfigurationError`` unless every row of ``arr`` is a probability vector."""
    arr = np.asarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError("configuration contains non-finite entries")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ConfigurationError("configuration entries must lie in [0, 1]")
    dev = np.abs(arr.sum(axis=-1) - 1.0)
    if np.any(dev > atol):
        raise ConfigurationError(f"configuration rows must sum to 1 (max deviation {dev.max():.3e})")


@dataclass(frozen=True, eq=False)
class Configuration:
    """``|W|`` probability vectors over ``|A|`` actions, one row per individual."""

    rows: np.ndarray

    def __post_init__(self):
        arr = _as_rows(self.rows)
        if arr.shape[0] < 1:
            raise ConfigurationError("a configuration needs at least one individual")
        if arr.shape[1] < 2:
            raise ConfigurationError("a configuration needs at least two actions")
        check_simplex_rows(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    @property
    def n_individuals(self):
        return self.rows.shape[0]

    @property
    def n_actions(self):
        return self.rows.shape[1]

    def __eq__(self, other):
        return isinstance(other, Configuration) and np.array_equal(self.rows, other.rows)

    def __repr__(self):
        return f"Configuration({self.rows.tolist()!r})"

    @classmethod
    def uniform(cls, n_individuals, n_actions):
        return cls(np.full((n_individuals, n_actions), 1.0 / n_actions))


@dataclass(frozen=True)
class OptimalSet:
    """Per-individual sets of optimal action indices (0-based)."""

    sets: tuple
    n_actions: int

    def __post_init__(self):
        sets = tuple(frozenset(int(a) for a in s) for s in self.sets)
        if not sets:
            raise ConfigurationError("optimal set needs at least one individual")
        for i, s in enumerate(sets):
            if not s:
                raise ConfigurationError(f"optimal set of individual {i} is empty")
            if any(a < 0 or a >= self.n_actions for a in s):
                raise ConfigurationError(f"optimal set of individual {i} has an out-of-range action")
            if len(s) == self.n_actions:
                raise ConfigurationError(
                    f"optimal set of individual {i} contains every action; performance would be constant"
                )
        object.__setattr__(self, "sets", sets)

    @classmethod
    def same(cls, actions, n_individuals, n_actions):
        return cls(tuple(frozenset(actions) for _ in range(n_individuals)), n_actions)

    @property
    def n_individuals(self):
        return len(self.sets)

    def mask(self):
        """Boolean ``(|W|, |A|)`` indicator of optimal actions."""
        m = np.zeros((self.n_individuals, self.n_actions), dtype=bool)
        for i, s in enumerate(self.sets):
            m[i, sorted(s)] = True
        return m


def aggregate(config, optimal):
    """Average probability mass on optimal actions."""
    rows = config.rows if isinstance(config, Configuration) else np.asarray(config, dtype=np.float64)
    mask = optimal.mask()
    if rows.shape[-2:] != mask.shape:
        raise ConfigurationError(
            f"configuration shape {rows.shape[-2:]} does not match optimal set shape {mask.shape}"
        )
    return aggregate_rows(rows, mask)


def row_sums(rows):
    """Sum over the last axis by sequential slice addition (fast for few actions, order fixed)."""
    out = rows[..., 0].copy()
    for a in range(1, rows.shape[-1]):
        out += rows[..., a]
    return out


def count_last(flags):
    """Number of true entries along the last axis (faster than ``sum`` for short axes)."""
    out = flags[..., 0].astype(np.int64)
    for k in range(1, flags.shape[-1]):
        out += flags[..., k]
    return out


def aggregate_rows(rows, mask):
    """Vectorised aggregator over any leading axes; ``mask`` is the optimal-action indicator."""
    per = row_sums(rows * mask)
    out = per[..., 0].copy()
    for i in range(1, per.shape[-1]):
        out += per[..., i]
    return out / per.shape[-1]


def check_theta(theta):
    th = np.asarray(theta, dtype=np.float64)
    if np.any(~(th > 0.0)) or np.any(th > 1.0):
        raise ParameterError(f"slowing factor must lie in (0, 1], got {theta!r}")


def slow_step(sigma, proposed, theta):
    """Move ``sigma`` a fraction ``theta`` of the way towards ``proposed``.

    ``theta == 1`` returns ``proposed`` itself, bit for bit.
    """
    check_theta(theta)
    if isinstance(sigma, Configuration) or isinstance(proposed, Configuration):
        a = sigma.rows if isinstance(sigma, Configuration) else _as_rows(sigma)
        b = proposed.rows if isinstance(proposed, Configuration) else _as_rows(proposed)
        if a.shape != b.shape:
            raise ConfigurationError("slow_step needs configurations of equal shape")
        return Configuration(slow_rows(a, b, theta))
    a = np.asarray(sigma, dtype=np.float64)
    b = np.asarray(proposed, dtype=np.float64)
    if a.shape != b.shape:
        raise ConfigurationError("slow_step needs configurations of equal shape")
    return slow_rows(a, b, theta)


def slow_rows(sigma, proposed, theta):
    """Array form of :func:`slow_step`; ``theta`` may be scalar or per-replication."""
    if np.ndim(theta) == 0:
        if theta == 1.0:
            return proposed
        return sigma + theta * (proposed - sigma)
    th = np.asarray(theta, dtype=np.float64).reshape((-1,) + (1,) * (sigma.ndim - 1))
    moved = sigma + th * (proposed - sigma)
    return np.where(th == 1.0, proposed, moved)


def renormalize_rows(rows, step=None, seeds=None, atol=SIMPLEX_ATOL):
    """Absorb floating-point drift of at most ``atol`` per row; anything larger is an error.

    Rows whose sum is exactly one are returned unchanged.
    """
    if rows.min() < 0.0:
        rows = _clip_negative_zeros(rows, step, seeds, atol)
    sums = row_sums(rows)[..., None]
    dev = np.abs(sums - 1.0)
    worst = dev.max()
    if not worst <= atol:
        bad = np.argwhere(~(dev <= atol))[0]
        seed = _seed_of(seeds, rows, bad)
        raise InvariantViolation(
            f"row sum deviates from 1 by {float(dev[tuple(bad)]):.3e}", step=step, seed=seed
        )
    if worst == 0.0:
        return rows
    return np.where(dev == 0.0, rows, rows / sums)


def _seed_of(seeds, rows, index):
    if seeds is None:
        return None
    seeds = np.atleast_1d(np.asarray(seeds))
    return int(seeds[index[0]]) if rows.ndim == 3 else int(seeds[0])


def _clip_negative_zeros(rows, step, seeds, atol):
    low = rows.min()
    if low < -atol:
        bad = np.argwhere(rows < -atol)[0]
        seed = _seed_of(seeds, rows, bad)
        raise InvariantViolation(f"negative probability {low:.3e}", step=step, seed=seed)
    return np.maximum(rows, 0.0)


def simplex_grid(n_actions, n_points=11):
    """All probability vectors whose coordinates are multiples of ``1/(n_points-1)``."""
    m = n_points - 1
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + [remaining])
            return
        for k in range(remaining, -1, -1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], m, n_actions)
    return np.array(out, dtype=np.float64)[::-1] / m
