"""Replication experiments, convergence classification and property checks.

Experiments split replications into fixed-size chunks.  Chunk results are
merged in chunk order, so a summary does not depend on how many worker
processes ran the chunks.
"""

import copy
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core.engine import iter_batch
from .core.rng import UniformStream, replication_seed, replication_seeds
from .core.schedules import Harmonic, TheoremOne, theorem1_slowing_constant
from .core.types import aggregate_rows, simplex_grid
from .errors import ConfigurationError, ParameterError, PreconditionError, UnsupportedError

OPTIMAL = "Optimal"
NULL = "Null"
UNDETERMINED = "Undetermined"
LABELS = (OPTIMAL, NULL, UNDETERMINED)
ABSORBED_EPS = 1e-15
Z95 = 1.959963984540054
DEFAULT_CHUNK = 8192
MAX_GRID = 200_000


class _Sentinel:
    def __init__(self, name):
        self._name = name

    def __repr__(self):
        return self._name

    def __bool__(self):
        return False

    def __reduce__(self):
        return (_sentinel, (self._name,))


_SENTINELS = {}


def _sentinel(name):
    if name not in _SENTINELS:
        _SENTINELS[name] = _Sentinel(name)
    return _SENTINELS[name]


Absorbed = _sentinel("Absorbed")
NotReached = _sentinel("NotReached")
NotComputed = _sentinel("NotComputed")


# --------------------------------------------------------- classification


@dataclass(frozen=True)
class Thresholds:
    """``Optimal`` when ``P_T >= hi``, ``Null`` when ``P_T <= lo``, otherwise ``Undetermined``."""

    hi: float = 0.99
    lo: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ConfigurationError(f"thresholds need 0 <= lo < hi <= 1, got lo={self.lo}, hi={self.hi}", key="hi")

    def classify(self, p):
        p = np.asarray(p, dtype=np.float64)
        return np.where(p >= self.hi, OPTIMAL, np.where(p <= self.lo, NULL, UNDETERMINED))


def wilson_interval(successes, n, z=Z95):
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ParameterError("Wilson interval needs n >= 1")
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    centre = (p + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class ReplicationSummary:
    """Result of :func:`estimate_optimality`."""

    replications: int
    horizon: int
    master_seed: int
    thresholds: Thresholds
    terminal: np.ndarray
    stream_seeds: np.ndarray
    classification: np.ndarray
    curve_t: np.ndarray
    mean_p: np.ndarray
    se_p: np.ndarray
    mean_hazard: np.ndarray
    probes: dict = field(default_factory=dict)

    @property
    def counts(self):
        return {label: int(np.sum(self.classification == label)) for label in LABELS}

    @property
    def optimality_frequency(self):
        return self.counts[OPTIMAL] / self.replications

    def fraction(self, label):
        return self.counts[label] / self.replications

    @property
    def wilson(self):
        return wilson_interval(self.counts[OPTIMAL], self.replications)

    @property
    def standard_error(self):
        p = self.optimality_frequency
        return math.sqrt(p * (1.0 - p) / self.replications)

    def to_dict(self):
        lo, hi = self.wilson
        return {
            "replications": self.replications,
            "horizon": self.horizon,
            "master_seed": self.master_seed,
            "thresholds": {"hi": self.thresholds.hi, "lo": self.thresholds.lo},
            "counts": self.counts,
            "optimality_frequency": self.optimality_frequency,
            "wilson_95": [lo, hi],
            "mean_terminal_P": float(np.mean(self.terminal)),
        }

    def to_bytes(self):
        parts = [
            self.terminal.tobytes(),
            self.stream_seeds.tobytes(),
            "|".join(self.classification.tolist()).encode(),
            self.curve_t.tobytes(),
            self.mean_p.tobytes(),
            self.se_p.tobytes(),
            self.mean_hazard.tobytes(),
        ]
        for k in sorted(self.probes):
            parts.append(k.encode() + np.asarray(self.probes[k]).tobytes())
        return b"".join(parts)


# ------------------------------------------------------------------ probes


class Probe:
    """Streaming per-replication statistic; ``fresh(n)`` returns an empty accumulator for ``n`` replications."""

    name = "probe"

    def fresh(self, n):
        out = copy.copy(self)
        out._init(n)
        return out

    def _init(self, n):
        pass

    def observe(self, prev, step):
        """Called with consecutive :class:`BatchStep` objects (``t`` and ``t + 1``)."""

    def result(self):
        raise NotImplementedError


class FloorProbe(Probe):
    """First ``t`` with ``P_t < P_0/(t + 1)``, or -1."""

    name = "floor_violation"

    def __init__(self, p0):
        self.p0 = float(p0)

    def _init(self, n):
        self.first = np.full(n, -1, dtype=np.int64)

    def observe(self, prev, step):
        bad = (step.performance < self.p0 / (step.t + 1)) & (self.first < 0)
        self.first[bad] = step.t

    def result(self):
        return self.first


class RhoProbe(Probe):
    """First ``t`` with ``P_t >= y theta_t``, or -1; ``theta_fn(step)`` gives ``theta_t`` per replication."""

    name = "rho"

    def __init__(self, theta_fn, y):
        self.theta_fn = theta_fn
        self.y = float(y)

    def _init(self, n):
        self.first = np.full(n, -1, dtype=np.int64)
        self._started = False

    def _check(self, step):
        hit = (step.performance >= self.y * np.asarray(self.theta_fn(step))) & (self.first < 0)
        self.first[hit] = step.t

    def observe(self, prev, step):
        if not self._started:
            self._check(prev)
            self._started = True
        self._check(step)

    def result(self):
        return self.first


class SandwichProbe(Probe):
    """Counts steps violating ``-P x_max/V <= P' - P <= (1 - P) x_max/V`` (attractions in ``info``)."""

    name = "sandwich_violations"

    def __init__(self, x_max, atol=1e-12):
        self.x_max = float(x_max)
        self.atol = atol

    def _init(self, n):
        self.count = np.zeros(n, dtype=np.int64)

    def observe(self, prev, step):
        v = prev.info.sum(axis=-1).min(axis=-1)
        p = prev.performance
        d = step.performance - p
        lo = -p * self.x_max / v
        hi = (1.0 - p) * self.x_max / v
        self.count += (d < lo - self.atol) | (d > hi + self.atol)

    def result(self):
        return self.count


class RothErevDeltaProbe(Probe):
    """Counts steps where ``delta_t(a, b)`` at the current attractions falls below ``eps/(2(V_0 + (t+1) x_max))``."""

    name = "delta_violations"

    def __init__(self, env, optimal, v0, epsilon):
        self.env = env
        self.optimal = optimal
        self.v0 = float(v0)
        self.epsilon = float(epsilon)

    def _init(self, n):
        self.count = np.zeros(n, dtype=np.int64)
        self.worst = np.full(n, np.inf)

    def observe(self, prev, step):
        from .individual_rules import roth_erev_delta

        d = roth_erev_delta(prev.info[:, 0, :], self.env, self.optimal)
        bound = self.epsilon / (2.0 * (self.v0 + (prev.t + 1) * self.env.support.x_max))
        self.count += d < bound
        self.worst = np.minimum(self.worst, d - bound)

    def result(self):
        return self.count


class TerminalInfoProbe(Probe):
    """Information state after the last step."""

    name = "terminal_info"

    def _init(self, n):
        self.info = None

    def observe(self, prev, step):
        self.info = step.info

    def result(self):
        return np.asarray(self.info)


class CheckpointProbe(Probe):
    """Performance of every replication at the given steps, shape ``(R, K)``."""

    name = "checkpoints"

    def __init__(self, checkpoints):
        self.checkpoints = sorted(int(c) for c in checkpoints)

    def _init(self, n):
        self.values = np.full((n, len(self.checkpoints)), np.nan)
        self._pos = {c: k for k, c in enumerate(self.checkpoints)}

    def observe(self, prev, step):
        if prev.t == 0 and 0 in self._pos:
            self.values[:, self._pos[0]] = prev.performance
        k = self._pos.get(step.t)
        if k is not None:
            self.values[:, k] = step.performance

    def result(self):
        return self.values


# -------------------------------------------------------------- experiments


def curve_grid(horizon, stride):
    grid = list(range(0, horizon + 1, stride))
    if grid[-1] != horizon:
        grid.append(horizon)
    return np.array(grid, dtype=np.int64)


def _run_chunk(system, env, horizon, master_seed, indices, stride, probes):
    seeds = replication_seeds(master_seed, indices)
    grid = curve_grid(horizon, stride)
    pos = {int(t): k for k, t in enumerate(grid)}
    k = len(grid)
    s1 = np.zeros(k)
    s2 = np.zeros(k)
    h_sum = np.zeros(k)
    h_cnt = np.zeros(k, dtype=np.int64)
    accs = [p.fresh(len(seeds)) for p in probes]
    prev = None
    for step in iter_batch(system, env, horizon, seeds):
        perf = step.performance
        if prev is not None:
            for a in accs:
                a.observe(prev, step)
            j = pos.get(prev.t)
            if j is not None:
                pp = prev.performance
                den = pp * (1.0 - pp)
                live = den >= ABSORBED_EPS
                if np.any(live):
                    h_sum[j] += np.sum((perf[live] - pp[live]) / den[live])
                    h_cnt[j] += int(np.sum(live))
        j = pos.get(step.t)
        if j is not None:
            s1[j] += perf.sum()
            s2[j] += np.dot(perf, perf)
        prev = step
    return {
        "terminal": prev.performance.copy(),
        "seeds": seeds,
        "s1": s1,
        "s2": s2,
        "h_sum": h_sum,
        "h_cnt": h_cnt,
        "probes": {p.name: a.result() for p, a in zip(probes, accs)},
    }


_POOL_TASK = {}


def _pool_chunk(args):
    key, indices = args
    t = _POOL_TASK[key]
    return _run_chunk(t["system"], t["env"], t["horizon"], t["seed"], indices, t["stride"], t["probes"])


def _chunks(replications, chunk_size):
    return [np.arange(s, min(s + chunk_size, replications)) for s in range(0, replications, chunk_size)]


def estimate_optimality(
    system,
    env,
    horizon,
    replications,
    seed,
    thresholds=None,
    stride=None,
    probes=(),
    workers=1,
    chunk_size=DEFAULT_CHUNK,
):
    """Run ``replications`` independent trajectories of length ``horizon`` and summarize them.

    Replication ``r`` uses the stream seed derived from ``(seed, r)``, exactly
    as :func:`berhr.core.run_trajectory` does.
    """
    if replications < 1:
        raise ParameterError("need at least one replication")
    if horizon < 1:
        raise ParameterError("horizon must be at least 1")
    thresholds = thresholds or Thresholds()
    stride = int(stride) if stride else max(1, horizon // 1000)
    chunks = _chunks(replications, int(chunk_size))
    probes = list(probes)
    if workers and workers > 1 and len(chunks) > 1:
        key = id(system)
        _POOL_TASK[key] = dict(system=system, env=env, horizon=horizon, seed=seed, stride=stride, probes=probes)
        try:
            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                parts = list(pool.map(_pool_chunk, [(key, c) for c in chunks]))
        finally:
            _POOL_TASK.pop(key, None)
    else:
        parts = [_run_chunk(system, env, horizon, seed, c, stride, probes) for c in chunks]
    return _merge(parts, replications, horizon, seed, thresholds, stride, probes)


def _merge(parts, replications, horizon, seed, thresholds, stride, probes):
    terminal = np.concatenate([p["terminal"] for p in parts])
    seeds = np.concatenate([p["seeds"] for p in parts])
    s1 = sum((p["s1"] for p in parts[1:]), parts[0]["s1"].copy())
    s2 = sum((p["s2"] for p in parts[1:]), parts[0]["s2"].copy())
    h_sum = sum((p["h_sum"] for p in parts[1:]), parts[0]["h_sum"].copy())
    h_cnt = sum((p["h_cnt"] for p in parts[1:]), parts[0]["h_cnt"].copy())
    n = replications
    mean = s1 / n
    var = np.maximum(s2 / n - mean ** 2, 0.0) * (n / (n - 1) if n > 1 else 0.0)
    se = np.sqrt(var / n)
    with np.errstate(invalid="ignore", divide="ignore"):
        hazard = np.where(h_cnt > 0, h_sum / np.maximum(h_cnt, 1), np.nan)
    merged = {}
    for p in probes:
        merged[p.name] = np.concatenate([np.asarray(part["probes"][p.name]) for part in parts])
    return ReplicationSummary(
        replications=n,
        horizon=horizon,
        master_seed=seed,
        thresholds=thresholds,
        terminal=terminal,
        stream_seeds=seeds,
        classification=thresholds.classify(terminal),
        curve_t=curve_grid(horizon, stride),
        mean_p=mean,
        se_p=se,
        mean_hazard=hazard,
        probes=merged,
    )


def mean_nondecreasing(values, z=3.0):
    """Paired check that replication means do not decrease between consecutive checkpoints.

    ``values`` has shape ``(R, K)``.  Between checkpoints ``k`` and ``k + 1``
    the mean paired difference must be at least ``-z`` standard errors.
    Returns ``(holds, slack)`` with ``slack[k] = mean_diff + z * se``.
    """
    v = np.asarray(values, dtype=np.float64)
    d = np.diff(v, axis=1)
    n = v.shape[0]
    mean = d.mean(axis=0)
    se = d.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros_like(mean)
    slack = mean + z * se
    tol = 1e-15
    return bool(np.all(slack >= -tol)), slack


# ------------------------------------------------------- trajectory checks


def hazard_rate_series(trajectory):
    """``(t, rate)`` pairs; ``rate`` is ``Absorbed`` when ``P_t (1 - P_t) < 1e-15``."""
    p = trajectory.performance if hasattr(trajectory, "performance") else np.asarray(trajectory, dtype=np.float64)
    out = []
    for t in range(len(p) - 1):
        den = p[t] * (1.0 - p[t])
        out.append((t, Absorbed if den < ABSORBED_EPS else float((p[t + 1] - p[t]) / den)))
    return out


@dataclass(frozen=True)
class FloorCheck:
    holds: bool
    first_violation: object = None


def pathwise_floor_check(trajectory, p0=None):
    """Exact check of ``P_t >= P_0/(t + 1)`` along a trajectory run with the harmonic schedule."""
    if not isinstance(getattr(trajectory, "schedule", None), Harmonic):
        raise PreconditionError("the pathwise floor needs a trajectory simulated with theta_t = 1/(t+2)")
    p = trajectory.performance
    p0 = p[0] if p0 is None else p0
    t = np.arange(len(p))
    bad = np.flatnonzero(p < p0 / (t + 1))
    return FloorCheck(True, None) if bad.size == 0 else FloorCheck(False, int(bad[0]))


def rho_finiteness_probe(trajectory, thetas, y):
    """First ``t`` with ``P_t >= y theta_t`` over the recorded horizon, else ``NotReached``.

    ``thetas`` is an array aligned with the performance path, a schedule, or a
    callable ``t -> theta_t``.
    """
    p = trajectory.performance if hasattr(trajectory, "performance") else np.asarray(trajectory, dtype=np.float64)
    if callable(thetas):
        th = np.array([float(np.asarray(thetas(t)).reshape(-1)[0]) for t in range(len(p))])
    else:
        th = np.asarray(thetas, dtype=np.float64)
        if len(th) < len(p):
            raise ParameterError("theta sequence is shorter than the trajectory")
        th = th[: len(p)]
    hit = np.flatnonzero(p >= y * th)
    return int(hit[0]) if hit.size else NotReached


def attraction_thetas(trajectory, x_max):
    """``x_max / V_t`` from attraction snapshots recorded at stride 1."""
    f = trajectory.summaries.get("attractions")
    if f is None or trajectory.stride != 1:
        raise PreconditionError("needs a Roth-Erev trajectory recorded with stride 1")
    return x_max / f.reshape(len(f), -1).sum(axis=-1)


# -------------------------------------------------------------- exact checks


def configuration_grid(n_individuals, n_actions, n_points=11):
    """Every configuration whose rows lie on the ``n_points`` simplex grid."""
    rows = simplex_grid(n_actions, n_points)
    if len(rows) ** n_individuals > MAX_GRID:
        raise UnsupportedError(f"{len(rows)}^{n_individuals} grid configurations exceed the limit of {MAX_GRID}")
    idx = np.stack(np.meshgrid(*[np.arange(len(rows))] * n_individuals, indexing="ij"), axis=-1)
    return rows[idx.reshape(-1, n_individuals)]


@dataclass(frozen=True)
class GridCheck:
    rows: np.ndarray
    performance: float
    gain: float
    bound: float
    holds: bool

    @property
    def slack(self):
        return self.gain - self.bound


def _theta(system, t, info):
    if system.schedule is None or system.schedule.is_identity():
        return 1.0
    th = system.schedule(t, None if info is None else np.asarray(info)[None])
    return float(np.asarray(th).reshape(-1)[0])


def info_for(rule, rows):
    """Information state consistent with ``rows``: Roth-Erev attractions with the initial totals, else ``None``."""
    f = getattr(rule, "f0", None)
    if f is None:
        return None
    return np.asarray(rows) * f.sum(axis=-1, keepdims=True)


def admissible(rule, rows):
    """Attraction-based rules need strictly positive probabilities."""
    return getattr(rule, "f0", None) is None or bool(np.all(np.asarray(rows) > 0.0))


def one_step_distribution(system, env, rows, t=0, info=None):
    """Exact ``(probabilities, next configurations)`` of the (slowed) system from ``rows``."""
    rows = np.asarray(rows, dtype=np.float64)
    probs, proposed, _ = system.rule.enumerate_outcomes(t, rows, info, env)
    theta = _theta(system, t, info)
    nxt = proposed if theta == 1.0 else rows[None] + theta * (proposed - rows[None])
    return probs, nxt


def wberhr_check_exact(system, env, grid=None, t=0, n_points=11, delta=None, atol=1e-12):
    """Exact one-step gain ``E[P_{t+1}] - P_t`` against ``delta_t P_t (1 - P_t)`` at every grid configuration.

    The bound of a slowed system is ``theta_t delta_t``.  ``delta`` overrides
    the rule's own hazard bound.
    """
    rule = system.rule
    mask = system.optimal.mask()
    if grid is None:
        grid = configuration_grid(system.n_individuals, system.n_actions, n_points)
    if delta is None:
        seq = rule.hazard_bound(env, system.optimal)
    out = []
    for rows in grid:
        rows = np.asarray(rows, dtype=np.float64)
        if not admissible(rule, rows):
            continue
        info = info_for(rule, rows)
        p = float(aggregate_rows(rows, mask))
        theta = _theta(system, t, info)
        if rule.model == "social":
            from .social_rules import social_expected_gain

            base_gain = social_expected_gain(rows, rule.component, rule.sampling, rule.rate(t), env, system.optimal)
            gain = theta * base_gain
        else:
            probs, nxt = one_step_distribution(system, env, rows, t, info)
            gain = float(np.dot(probs, aggregate_rows(nxt, mask))) - p
        d = delta if delta is not None else float(np.asarray(seq(t, info)).reshape(-1)[0])
        bound = theta * d * p * (1.0 - p)
        out.append(GridCheck(rows, p, gain, bound, bool(gain - bound >= -atol)))
    return out


def wberhr_check_mc(system, env, rows, t=0, n=100_000, seed=0, info=None, delta=None, z=3.0):
    """Monte Carlo version: ``(gain, se, bound, holds)`` with ``z`` standard errors of slack."""
    rows = np.asarray(rows, dtype=np.float64)
    if info is None:
        info = info_for(system.rule, rows)
    nxt = _mc_next(system, env, rows, t, n, seed, info)
    mask = system.optimal.mask()
    p = float(aggregate_rows(rows, mask))
    vals = aggregate_rows(nxt, mask) - p
    gain = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n))
    if delta is None:
        delta = float(np.asarray(system.rule.hazard_bound(env, system.optimal)(t, info)).reshape(-1)[0])
    bound = _theta(system, t, info) * delta * p * (1.0 - p)
    return gain, se, bound, bool(gain + z * se >= bound)


def _mc_next(system, env, rows, t, n, seed, info):
    rule = system.rule
    seeds = replication_seeds(seed, range(n))
    batch = np.broadcast_to(rows, (n,) + rows.shape).copy()
    binfo = rule.initial_info(batch, n) if info is None else np.broadcast_to(info, (n,) + np.shape(info)).copy()
    u = UniformStream(seeds, rule.n_uniforms(*rows.shape)).step(t)
    outcome = rule.draw(u, batch, binfo, env)
    proposed, _ = rule.apply(t, batch, binfo, outcome, env)
    theta = _theta(system, t, info)
    return proposed if theta == 1.0 else batch + theta * (proposed - batch)


@dataclass(frozen=True)
class SupermartingaleResult:
    lhs: float
    rhs: float
    holds: bool
    se: float = 0.0


def supermartingale_check(system, env, sigma, theta_t, gamma, t=0, mode="exact", n=100_000, seed=0, info=None, delta=None, atol=1e-12):
    """Compare ``E[exp(-(gamma/theta) P^theta_{t+1})]`` with ``exp(-(gamma/theta) P_t)``.

    ``system`` is the base (unslowed) system; ``theta_t`` slows one step.
    ``gamma`` must lie in ``(0, min(1, delta_t)]``.
    """
    rows = np.asarray(sigma.rows if hasattr(sigma, "rows") else sigma, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[None]
    if info is None:
        info = info_for(system.rule, rows)
    if not 0.0 < theta_t <= 1.0:
        raise ParameterError(f"theta must lie in (0, 1], got {theta_t}")
    if delta is None:
        delta = float(np.asarray(system.rule.hazard_bound(env, system.optimal)(t, info)).reshape(-1)[0])
    if not 0.0 < gamma <= min(1.0, delta) + 1e-12:
        raise ParameterError(f"gamma must lie in (0, min(1, delta_t)] = (0, {min(1.0, delta):g}], got {gamma}")
    base = system.with_schedule(None)
    mask = system.optimal.mask()
    p = float(aggregate_rows(rows, mask))
    k = gamma / theta_t
    rhs = math.exp(-k * p)
    if mode == "exact":
        probs, proposed, _ = base.rule.enumerate_outcomes(t, rows, info, env)
        nxt = proposed if theta_t == 1.0 else rows[None] + theta_t * (proposed - rows[None])
        lhs = float(np.dot(probs, np.exp(-k * aggregate_rows(nxt, mask))))
        return SupermartingaleResult(lhs, rhs, bool(lhs <= rhs + atol))
    if mode == "mc":
        proposed = _mc_next(base, env, rows, t, n, seed, info)
        nxt = proposed if theta_t == 1.0 else rows[None] + theta_t * (proposed - rows[None])
        vals = np.exp(-k * aggregate_rows(nxt, mask))
        lhs = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(n))
        return SupermartingaleResult(lhs, rhs, bool(lhs <= rhs + 3.0 * se), se)
    raise ParameterError(f"mode must be 'exact' or 'mc', got {mode!r}")


def gamma_grid(delta, steps=10):
    """``{0.1 k : k = 1..steps}`` restricted to ``(0, min(1, delta)]``."""
    cap = min(1.0, delta)
    return [round(0.1 * k, 10) for k in range(1, steps + 1) if round(0.1 * k, 10) <= cap + 1e-12]


def theorem_one_schedule(system, env, epsilon):
    """``theta_t = min(1, delta_t)/gamma_tilde`` with ``gamma_tilde`` the smallest integer with ``exp(-gamma P_0) < epsilon``."""
    g = theorem1_slowing_constant(system.p0, epsilon)
    return TheoremOne(g, system.rule.hazard_bound(env, system.optimal))


def replication_trajectory_seed(master_seed, replication):
    """Stream seed of one replication (matches the ``seed`` column of experiment output)."""
    return replication_seed(master_seed, replication)


__all__ = [
    "Absorbed",
    "CheckpointProbe",
    "FloorCheck",
    "FloorProbe",
    "GridCheck",
    "NotComputed",
    "NotReached",
    "Probe",
    "ReplicationSummary",
    "RhoProbe",
    "RothErevDeltaProbe",
    "SandwichProbe",
    "SupermartingaleResult",
    "TerminalInfoProbe",
    "Thresholds",
    "UnsupportedError",
    "attraction_thetas",
    "configuration_grid",
    "curve_grid",
    "estimate_optimality",
    "admissible",
    "gamma_grid",
    "info_for",
    "hazard_rate_series",
    "mean_nondecreasing",
    "one_step_distribution",
    "pathwise_floor_check",
    "rho_finiteness_probe",
    "supermartingale_check",
    "theorem_one_schedule",
    "wberhr_check_exact",
    "wberhr_check_mc",
    "wilson_interval",
]
