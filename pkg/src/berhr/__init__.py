"""Bounded expected relative hazard rates: learning systems, slow versions and diagnostics."""

from .core import (
    Configuration,
    Constant,
    Harmonic,
    HazardBoundSequence,
    OptimalSet,
    Product,
    SystemSpec,
    TheoremOne,
    aggregate,
    make_system,
    run_trajectory,
    slow_step,
    theorem1_slowing_constant,
)
from .counterexamples import AbsorbingRule, VNParams, VNRule
from .diagnostics import Thresholds, estimate_optimality
from .environments import Distribution, Environment, PayoffSupport, delta_lower_bound
from .errors import (
    BerhrError,
    ConfigurationError,
    InvariantViolation,
    ParameterError,
    PreconditionError,
    UnsupportedError,
)
from .individual_rules import FullInfoRule, MonotoneParams, MonotoneRule, RothErevRule, SwitchFunction
from .social_rules import NormalizedScore, Proportional, SocialRule, UniformK, UniformPairs

__version__ = "0.1.0"

__all__ = [
    "AbsorbingRule",
    "BerhrError",
    "Configuration",
    "ConfigurationError",
    "Constant",
    "Distribution",
    "Environment",
    "FullInfoRule",
    "Harmonic",
    "HazardBoundSequence",
    "InvariantViolation",
    "MonotoneParams",
    "MonotoneRule",
    "NormalizedScore",
    "OptimalSet",
    "ParameterError",
    "PayoffSupport",
    "PreconditionError",
    "Product",
    "Proportional",
    "RothErevRule",
    "SocialRule",
    "SwitchFunction",
    "SystemSpec",
    "TheoremOne",
    "Thresholds",
    "UniformK",
    "UniformPairs",
    "UnsupportedError",
    "VNParams",
    "VNRule",
    "aggregate",
    "delta_lower_bound",
    "estimate_optimality",
    "make_system",
    "run_trajectory",
    "slow_step",
    "theorem1_slowing_constant",
]
