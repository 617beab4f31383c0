"""Two systems with bounded expected relative hazard rates that still fail optimality.

Both act on a single individual with two actions.  The configuration row is
``(1 - sigma, sigma)``; the second action (index 1) is the optimal one, so the
performance equals ``sigma``.
"""

from dataclasses import dataclass

import numpy as np

from .core.engine import Outcome, UpdatingRule
from .core.schedules import HazardBoundSequence
from .core.types import Configuration, OptimalSet
from .errors import ConfigurationError, ParameterError

OPTIMAL = OptimalSet(({1},), 2)


def _row(sigma):
    return np.array([1.0 - sigma, sigma])


def _stack(sigma):
    return np.stack([1.0 - sigma, sigma], axis=-1)[..., None, :]


# --------------------------------------------------------------- absorbing


def absorbing_step(sigma, u):
    """Jump to 1 when ``u <= (1 + sigma)/2`` and to 0 otherwise; 0 is absorbing."""
    if not 0.0 <= sigma <= 1.0:
        raise ParameterError(f"sigma must lie in [0, 1], got {sigma}")
    if sigma == 0.0:
        return 0.0
    return 1.0 if u <= (1.0 + sigma) / 2.0 else 0.0


class AbsorbingRule(UpdatingRule):
    """All mass jumps to one action; the hazard bound is the constant 1/2."""

    model = "absorbing"
    needs_environment = False

    def __init__(self, sigma0=0.5):
        if not 0.0 <= sigma0 <= 1.0:
            raise ConfigurationError(f"sigma0 must lie in [0, 1], got {sigma0}", key="sigma0")
        self.sigma0 = float(sigma0)

    def n_uniforms(self, n_individuals, n_actions):
        return 1

    def validate(self, env, n_individuals, n_actions):
        if (n_individuals, n_actions) != (1, 2):
            raise ConfigurationError("the absorbing example has one individual and two actions")

    def default_initial(self, env):
        return Configuration(_row(self.sigma0))

    def default_optimal(self, env):
        return OPTIMAL

    def draw(self, u, rows, info, env):
        return Outcome(omega=u)

    def apply(self, t, rows, info, outcome, env):
        sigma = rows[:, 0, 1]
        jump = (outcome.omega[:, 0] <= (1.0 + sigma) / 2.0) & (sigma > 0.0)
        return _stack(np.where(jump, 1.0, 0.0)), info

    def enumerate_outcomes(self, t, rows, info, env):
        sigma = float(rows[0, 1])
        if sigma == 0.0:
            return np.array([1.0]), rows[None].copy(), None
        p_up = (1.0 + sigma) / 2.0
        return np.array([p_up, 1.0 - p_up]), np.array([[_row(1.0)], [_row(0.0)]]), None

    def hazard_bound(self, env, optimal):
        return HazardBoundSequence.constant(0.5, label="absorbing")


# --------------------------------------------------------- VN automaton


@dataclass(frozen=True)
class VNParams:
    """Retention ``beta``, success probabilities ``mu1 < mu2`` and initial probability ``sigma0`` of action 2."""

    beta: float = 0.5
    mu1: float = 0.5
    mu2: float = 0.8
    sigma0: float = 0.5

    def __post_init__(self):
        for name in ("beta", "mu1", "mu2", "sigma0"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigurationError(f"{name} must lie in (0, 1), got {v}", key=name)
        if not self.mu1 < self.mu2:
            raise ConfigurationError("VN automaton needs mu1 < mu2", key="mu2")

    @property
    def floor(self):
        return (1.0 - self.beta) * (self.mu2 - self.mu1)


def vn_step(sigma, params, omega):
    """One VN update; ``omega = (w1, w2, w3)`` with success indicators ``w1, w2`` and device value ``w3``."""
    w1, w2, w3 = omega
    chose_two = w3 <= sigma
    up = (1.0 - sigma) * float(chose_two and bool(w2))
    down = sigma * float((not chose_two) and bool(w1))
    return sigma + (1.0 - params.beta) * (up - down)


def vn_lower_bound(params, n):
    """``prod_{j<=N} (1 - beta^{j-1} sigma0)^j * prod_{j<=N} (1 - (1 - mu1)^j)``."""
    if int(n) != n or n < 1:
        raise ParameterError("N must be a positive integer")
    j = np.arange(1, int(n) + 1, dtype=np.float64)
    first = np.prod((1.0 - params.beta ** (j - 1) * params.sigma0) ** j)
    second = np.prod(1.0 - (1.0 - params.mu1) ** j)
    return float(first * second)


class VNRule(UpdatingRule):
    """VN automaton: three uniforms per step, read as ``(w1, w2, w3)``.

    ``w1 = 1{u1 < mu1}`` and ``w2 = 1{u2 < mu2}`` are the successes of actions
    1 and 2; action 2 is played when ``u3 <= sigma``.
    """

    model = "vn"
    needs_environment = False

    def __init__(self, params=None):
        self.params = params if params is not None else VNParams()

    def n_uniforms(self, n_individuals, n_actions):
        return 3

    def validate(self, env, n_individuals, n_actions):
        if (n_individuals, n_actions) != (1, 2):
            raise ConfigurationError("the VN automaton has one individual and two actions")

    def default_initial(self, env):
        return Configuration(_row(self.params.sigma0))

    def default_optimal(self, env):
        return OPTIMAL

    def draw(self, u, rows, info, env):
        return Outcome(omega=u)

    def apply(self, t, rows, info, outcome, env):
        p = self.params
        sigma = rows[:, 0, 1]
        u = outcome.omega
        chose_two = u[:, 2] <= sigma
        up = np.where(chose_two & (u[:, 1] < p.mu2), 1.0 - sigma, 0.0)
        down = np.where(~chose_two & (u[:, 0] < p.mu1), sigma, 0.0)
        return _stack(sigma + (1.0 - p.beta) * (up - down)), info

    def enumerate_outcomes(self, t, rows, info, env):
        p = self.params
        s = float(rows[0, 1])
        probs = np.array([s * p.mu2, s * (1.0 - p.mu2), (1.0 - s) * p.mu1, (1.0 - s) * (1.0 - p.mu1)])
        above = np.nextafter(s, 2.0)  # representative device value for action 1
        omegas = [(0, 1, s), (0, 0, s), (1, 0, above), (0, 0, above)]
        new = [vn_step(s, p, w) for w in omegas]
        keep = probs > 0.0
        return probs[keep], np.array([[_row(v)] for v in new])[keep], None

    def hazard_bound(self, env, optimal):
        return HazardBoundSequence.constant(self.params.floor, label="vn")
