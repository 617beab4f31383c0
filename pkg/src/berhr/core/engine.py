"""Systems, trajectories and the lock-step batch simulator.

A batch holds ``R`` replications of one system.  Arrays carry the replication
axis first: configurations are ``(R, |W|, |A|)``, performance is ``(R,)``.
Running a batch and running each replication alone give identical bits, since
every operation is elementwise or reduces only within a replication.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConfigurationError, ParameterError
from .rng import UniformStream, replication_seed
from .schedules import SlowingSchedule
from .types import Configuration, OptimalSet, aggregate_rows, renormalize_rows, slow_rows


@dataclass
class Outcome:
    """One step's draw of the world, batched along the first axis.

    ``actions`` ``(R, |W|)`` chosen actions, ``payoffs`` ``(R, |W|, |A|)``
    obtained and forgone payoffs, ``samples`` ``(R, |W|, |W|)`` with
    ``samples[r, i, j]`` true when ``i`` observes ``j``, ``omega`` any
    model-specific raw coordinates, ``realized`` ``(R, |W|)`` the obtained
    payoffs only (for rules that never see forgone payoffs).
    """

    actions: Optional[np.ndarray] = None
    payoffs: Optional[np.ndarray] = None
    samples: Optional[np.ndarray] = None
    omega: Optional[np.ndarray] = None
    realized: Optional[np.ndarray] = None


class UpdatingRule:
    """Interface every model implements.

    ``draw`` turns uniforms into an :class:`Outcome`; ``apply`` maps an outcome
    to the proposed (unslowed) configuration and the next information state;
    ``enumerate_outcomes`` lists every one-step outcome of a single state with
    its probability, for exact checks.
    """

    model = "abstract"
    needs_environment = True

    def n_uniforms(self, n_individuals, n_actions):
        raise NotImplementedError

    def validate(self, env, n_individuals, n_actions):
        """Raise if the rule cannot run against this environment and shape."""

    def initial_info(self, rows, n):
        return None

    def draw(self, u, rows, info, env):
        raise NotImplementedError

    def apply(self, t, rows, info, outcome, env):
        raise NotImplementedError

    def enumerate_outcomes(self, t, rows, info, env):
        raise NotImplementedError

    def hazard_bound(self, env, optimal):
        raise NotImplementedError

    def summary(self, info):
        """Bounded per-replication projection of the information state."""
        return {}

    def default_initial(self, env):
        return None

    def default_optimal(self, env):
        raise NotImplementedError


@dataclass(frozen=True)
class SystemSpec:
    """An updating rule with its aggregator (optimal set), initial state and optional slowing."""

    rule: UpdatingRule
    optimal: OptimalSet
    initial: Configuration
    schedule: Optional[SlowingSchedule] = None
    initial_info: Optional[object] = None

    def __post_init__(self):
        if not isinstance(self.initial, Configuration):
            object.__setattr__(self, "initial", Configuration(self.initial))
        if self.initial.rows.shape != (self.optimal.n_individuals, self.optimal.n_actions):
            raise ConfigurationError(
                f"initial configuration shape {self.initial.rows.shape} does not match the optimal set"
            )

    @property
    def n_individuals(self):
        return self.initial.n_individuals

    @property
    def n_actions(self):
        return self.initial.n_actions

    @property
    def p0(self):
        return float(aggregate_rows(self.initial.rows, self.optimal.mask()))

    def with_schedule(self, schedule):
        return SystemSpec(self.rule, self.optimal, self.initial, schedule, self.initial_info)


def make_system(rule, env=None, initial=None, schedule=None, optimal=None, initial_info=None):
    """Build a :class:`SystemSpec`, filling the optimal set and initial state from the rule's defaults."""
    if optimal is None:
        optimal = rule.default_optimal(env)
    if initial is None:
        initial = rule.default_initial(env)
    if initial is None:
        initial = Configuration.uniform(optimal.n_individuals, optimal.n_actions)
    return SystemSpec(rule, optimal, initial, schedule, initial_info)


@dataclass
class BatchStep:
    t: int
    rows: np.ndarray
    info: object
    performance: np.ndarray
    theta: object = None
    outcome: Optional[Outcome] = None


def _check_compatible(system, env):
    rule = system.rule
    if rule.needs_environment:
        if env is None:
            raise ConfigurationError(f"model {rule.model!r} needs an environment")
        if (env.n_individuals, env.n_actions) != (system.n_individuals, system.n_actions):
            raise ConfigurationError(
                f"environment is {env.n_individuals}x{env.n_actions} but the system is "
                f"{system.n_individuals}x{system.n_actions}"
            )
    rule.validate(env, system.n_individuals, system.n_actions)


def iter_batch(system, env, horizon, seeds, block=256):
    """Yield a :class:`BatchStep` for ``t = 0 .. horizon`` for every stream seed in ``seeds``.

    Each step draws the outcome, applies the updating rule, slows it with the
    schedule's factor at ``t`` and checks the simplex invariant.
    """
    if horizon < 0:
        raise ParameterError("horizon must be nonnegative")
    _check_compatible(system, env)
    seeds = np.asarray(seeds, dtype=np.uint64)
    n = len(seeds)
    rule = system.rule
    mask = system.optimal.mask()
    rows = np.broadcast_to(system.initial.rows, (n,) + system.initial.rows.shape).copy()
    info = rule.initial_info(rows, n) if system.initial_info is None else _broadcast_info(system.initial_info, n)
    stream = UniformStream(seeds, rule.n_uniforms(system.n_individuals, system.n_actions), block=block)
    schedule = system.schedule
    identity = schedule is None or schedule.is_identity()
    perf = aggregate_rows(rows, mask)
    yield BatchStep(0, rows, info, perf)
    for t in range(horizon):
        u = stream.step(t)
        outcome = rule.draw(u, rows, info, env)
        proposed, new_info = rule.apply(t, rows, info, outcome, env)
        theta = None
        if not identity:
            theta = schedule(t, info)
            if np.any(~(np.asarray(theta) > 0.0)) or np.any(np.asarray(theta) > 1.0):
                raise ParameterError(f"slowing factor left (0, 1] at step {t}")
            proposed = slow_rows(rows, proposed, theta)
        rows = renormalize_rows(proposed, step=t + 1, seeds=seeds)
        info = new_info
        perf = aggregate_rows(rows, mask)
        yield BatchStep(t + 1, rows, info, perf, theta, outcome)


def _broadcast_info(info, n):
    arr = np.asarray(info, dtype=np.float64)
    return np.broadcast_to(arr, (n,) + arr.shape).copy()


@dataclass
class Trajectory:
    """Performance path of one replication plus strided snapshots."""

    performance: np.ndarray
    seed: int
    horizon: int
    replication: int = 0
    stream_seed: int = 0
    stride: int = 0
    snapshots: dict = field(default_factory=dict)
    summaries: dict = field(default_factory=dict)
    schedule: Optional[SlowingSchedule] = None
    thetas: Optional[np.ndarray] = None

    def to_bytes(self):
        parts = [self.performance.tobytes()]
        for t in sorted(self.snapshots):
            parts.append(np.int64(t).tobytes() + self.snapshots[t].tobytes())
        for k in sorted(self.summaries):
            parts.append(k.encode() + np.asarray(self.summaries[k]).tobytes())
        return b"".join(parts)


def run_trajectory(system, env, horizon, seed, replication=0, stride=0, record_theta=False):
    """Simulate one replication.

    The stream seed is derived from ``(seed, replication)`` exactly as in
    batch experiments, so replication ``r`` of an experiment with master seed
    ``seed`` reproduces this trajectory.
    """
    if horizon < 1:
        raise ParameterError("horizon must be at least 1")
    stream_seed = replication_seed(seed, replication)
    perf = np.empty(horizon + 1)
    snaps, summaries, thetas = {}, {}, []
    for step in iter_batch(system, env, horizon, [stream_seed]):
        perf[step.t] = step.performance[0]
        if stride and step.t % stride == 0:
            snaps[step.t] = step.rows[0].copy()
            for k, v in system.rule.summary(step.info).items():
                summaries.setdefault(k, []).append(np.asarray(v)[0])
        if record_theta and step.t < horizon:
            thetas.append(_theta_at(system, step))
    return Trajectory(
        performance=perf,
        seed=seed,
        horizon=horizon,
        replication=replication,
        stream_seed=stream_seed,
        stride=stride,
        snapshots=snaps,
        summaries={k: np.array(v) for k, v in summaries.items()},
        schedule=system.schedule,
        thetas=np.array(thetas) if record_theta else None,
    )


def _theta_at(system, step):
    if system.schedule is None:
        return 1.0
    th = system.schedule(step.t, step.info)
    return float(np.asarray(th).reshape(-1)[0])
