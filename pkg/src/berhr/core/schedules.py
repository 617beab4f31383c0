"""Slowing schedules and lower-bound (hazard) sequences.

A schedule maps the step index ``t`` (and, for state-dependent schedules, the
current information state) to a factor in (0, 1].  The factor evaluated at
``t`` is used for the transition from step ``t`` to ``t + 1``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import ParameterError, PreconditionError


@dataclass(frozen=True)
class HazardBoundSequence:
    """Lower bound sequence ``t -> delta_t >= 0`` of the expected relative hazard rate.

    ``fn(t, info)`` may depend on the recorded information state; it returns a
    scalar or one value per replication.  ``floor`` is a strictly positive
    lower bound for all ``t`` when the system has bounded (not only weakly
    bounded) rates.
    """

    fn: Callable
    floor: Optional[float] = None
    square_nonsummable: bool = False
    label: str = ""

    def __post_init__(self):
        if self.floor is not None and not self.floor > 0.0:
            raise ParameterError("a BERHR floor must be strictly positive")

    @property
    def is_berhr(self):
        return self.floor is not None

    @property
    def is_square_nonsummable(self):
        return self.square_nonsummable or self.is_berhr

    def __call__(self, t, info=None):
        d = self.fn(t, info)
        if np.any(np.asarray(d) < 0.0):
            raise ParameterError(f"hazard bound is negative at t={t}")
        return d

    @classmethod
    def constant(cls, value, label=""):
        value = float(value)
        if value < 0.0:
            raise ParameterError("hazard bound must be nonnegative")
        return cls(
            lambda t, info=None: value,
            floor=value if value > 0.0 else None,
            square_nonsummable=value > 0.0,
            label=label or f"constant({value:g})",
        )


class SlowingSchedule:
    """Base class; subclasses implement ``__call__(t, info=None)``."""

    kind = "abstract"

    def __call__(self, t, info=None):  # pragma: no cover - interface
        raise NotImplementedError

    def is_identity(self):
        return False


@dataclass(frozen=True)
class Constant(SlowingSchedule):
    theta: float
    kind = "constant"

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ParameterError(f"constant slowing factor must lie in (0, 1], got {self.theta}")

    def __call__(self, t, info=None):
        return float(self.theta)

    def is_identity(self):
        return self.theta == 1.0


@dataclass(frozen=True)
class Harmonic(SlowingSchedule):
    """``theta_t = 1 / (t + 2)``."""

    kind = "harmonic"

    def __call__(self, t, info=None):
        return 1.0 / (t + 2)


@dataclass(frozen=True)
class TheoremOne(SlowingSchedule):
    """``theta_t = min(1, delta_t) / gamma_tilde`` built from a hazard bound sequence."""

    gamma_tilde: int
    delta: HazardBoundSequence
    kind = "theorem1"

    def __post_init__(self):
        if int(self.gamma_tilde) != self.gamma_tilde or self.gamma_tilde < 1:
            raise ParameterError("gamma_tilde must be a positive integer")
        if not self.delta.is_square_nonsummable:
            raise PreconditionError("the hazard bound sequence must be square non-summable")

    def __call__(self, t, info=None):
        d = self.delta(t, info)
        theta = np.minimum(1.0, d) / self.gamma_tilde
        if np.any(~(np.asarray(theta) > 0.0)):
            raise ParameterError(f"theorem-one schedule vanishes at t={t} (delta_t = 0)")
        return float(theta) if np.ndim(theta) == 0 else theta


@dataclass(frozen=True)
class Product(SlowingSchedule):
    """Pointwise product of schedules."""

    factors: tuple = field(default_factory=tuple)
    kind = "product"

    def __post_init__(self):
        if not self.factors:
            raise ParameterError("a product schedule needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    def __call__(self, t, info=None):
        out = 1.0
        for f in self.factors:
            out = out * f(t, info)
        return out

    def is_identity(self):
        return all(f.is_identity() for f in self.factors)


def theorem1_slowing_constant(p0, epsilon):
    """Smallest positive integer ``g`` with ``exp(-g * p0) < epsilon``."""
    if not 0.0 < p0 <= 1.0:
        raise PreconditionError("initial performance must lie in (0, 1]")
    if not 0.0 < epsilon < 1.0:
        raise PreconditionError("epsilon must lie in (0, 1)")
    g = max(1, math.floor(-math.log(epsilon) / p0))
    while math.exp(-g * p0) >= epsilon:
        g += 1
    while g > 1 and math.exp(-(g - 1) * p0) < epsilon:
        g -= 1
    return g
