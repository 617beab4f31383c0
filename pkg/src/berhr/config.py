"""Experiment configuration: an INI file with one section per concern.

Grammar (``configparser``; ``#`` and ``;`` start comments)::

    [experiment]
    model = absorbing | vn | monotone | full_info | roth_erev | social
    horizon = <int>           replications = <int>      seed = <uint64>
    hi = 0.99                 lo = 0.01                 stride = <int>

    [model]                   model parameters, keys depend on the model:
      absorbing:  sigma0
      vn:         beta, mu1, mu2, sigma0
      monotone:   c, decay (harmonic|constant), offset
      full_info:  switch (linear|power|custom), b, beta, p, grid, table, decay, c, offset
      roth_erev:  attractions, strict
      social:     component (proportional|normalized_score|linear_pairwise), b,
                  sampling (uniform_pairs|uniform_k), k, rate (harmonic|constant), lambda

    [environment]             not used by absorbing / vn
    individuals = <int>
    kind = bernoulli | discrete
    probs = 0.9, 0.5          (bernoulli)      low = 0    high = 1
    action0 = 0:0.1 1:0.9     (discrete, value:probability pairs per action)
    x_min, x_max              optional declared support

    [initial]
    sigma = 0.5, 0.5          rows separated by ``|``; a single row is used for every individual

    [schedule]
    kind = none | constant | harmonic | theorem1 | attraction
    theta = <float>           (constant)
    epsilon = <float>         (theorem1)
    eta = none | harmonic     (extra factor multiplied onto the schedule)

    [output]
    dir = out

    [check]
    n_points = 11             t = 0

Lists are comma separated; matrices separate rows with ``|``.
"""

import configparser
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

MODELS = ("absorbing", "vn", "monotone", "full_info", "roth_erev", "social")


def _float(s):
    return float(s)


def _int(s):
    v = float(s)
    if v != int(v):
        raise ValueError(f"{s!r} is not an integer")
    return int(v)


def _uint64(s):
    v = int(str(s), 0)
    if not 0 <= v < 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return v


def _bool(s):
    t = str(s).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{s!r} is not a boolean")


def _str(s):
    return str(s).strip().lower()


def _floats(s):
    return tuple(float(x) for x in str(s).replace(",", " ").split())


def _matrix(s):
    return tuple(_floats(r) for r in str(s).split("|") if r.strip())


def _pairs(s):
    out = []
    for tok in str(s).replace(",", " ").split():
        v, p = tok.split(":")
        out.append((float(v), float(p)))
    return tuple(out)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple) and v and isinstance(v[0], tuple):
        return " | ".join(", ".join(repr(float(x)) for x in row) for row in v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def _fmt_pairs(v):
    return " ".join(f"{x!r}:{p!r}" for x, p in v)


EXPERIMENT_KEYS = {
    "model": _str,
    "horizon": _int,
    "replications": _int,
    "seed": _uint64,
    "hi": _float,
    "lo": _float,
    "stride": _int,
}

MODEL_KEYS = {
    "absorbing": {"sigma0": _float},
    "vn": {"beta": _float, "mu1": _float, "mu2": _float, "sigma0": _float},
    "monotone": {"c": _float, "decay": _str, "offset": _int},
    "full_info": {
        "switch": _str,
        "b": _float,
        "beta": _float,
        "p": _float,
        "grid": _floats,
        "table": _matrix,
        "decay": _str,
        "c": _float,
        "offset": _int,
    },
    "roth_erev": {"attractions": _matrix, "strict": _bool},
    "social": {
        "component": _str,
        "b": _float,
        "sampling": _str,
        "k": _int,
        "rate": _str,
        "lambda": _float,
    },
}

ENV_KEYS = {
    "individuals": _int,
    "kind": _str,
    "probs": _floats,
    "low": _float,
    "high": _float,
    "x_min": _float,
    "x_max": _float,
}

SECTION_KEYS = {
    "initial": {"sigma": _matrix},
    "schedule": {"kind": _str, "theta": _float, "epsilon": _float, "eta": _str},
    "output": {"dir": str},
    "check": {"n_points": _int, "t": _int},
}

SECTIONS = ("experiment", "model", "environment", "initial", "schedule", "output", "check")


@dataclass
class ExperimentConfig:
    """Parsed experiment file; every value already typed and validated for unknown keys."""

    model: str
    horizon: int = 100
    replications: int = 100
    seed: int = 0
    hi: float = 0.99
    lo: float = 0.01
    stride: int = 0
    model_params: dict = field(default_factory=dict)
    environment: dict = field(default_factory=dict)
    initial: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    check: dict = field(default_factory=dict)

    def to_ini(self):
        """Serialize back to the INI grammar; ``parse_config(to_ini())`` reproduces this object."""
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["experiment"] = {
            "model": self.model,
            "horizon": str(self.horizon),
            "replications": str(self.replications),
            "seed": str(self.seed),
            "hi": _fmt(self.hi),
            "lo": _fmt(self.lo),
            "stride": str(self.stride),
        }
        for name, values in (
            ("model", self.model_params),
            ("environment", self.environment),
            ("initial", self.initial),
            ("schedule", self.schedule),
            ("output", self.output),
            ("check", self.check),
        ):
            if values:
                cp[name] = {
                    k: (_fmt_pairs(v) if k.startswith("action") and name == "environment" else _fmt(v))
                    for k, v in values.items()
                }
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _read_section(cp, name, schema, dynamic=None):
    out = {}
    if not cp.has_section(name):
        return out
    for key, raw in cp.items(name):
        conv = schema.get(key)
        if conv is None and dynamic is not None:
            conv = dynamic(key)
        if conv is None:
            raise ConfigurationError(f"unknown key {key!r} in section [{name}]", key=f"{name}.{key}")
        try:
            out[key] = conv(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigurationError(f"bad value for {name}.{key}: {exc}", key=f"{name}.{key}") from None
    return out


def _env_dynamic(key):
    if key.startswith("action") and key[6:].isdigit():
        return _pairs
    return None


def parse_config(text):
    """Parse INI text into an :class:`ExperimentConfig`; unknown sections or keys raise ``ConfigurationError``."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"cannot parse configuration: {exc}") from None
    for s in cp.sections():
        if s not in SECTIONS:
            raise ConfigurationError(f"unknown section [{s}]", key=s)
    exp = _read_section(cp, "experiment", EXPERIMENT_KEYS)
    model = exp.get("model")
    if model is None:
        raise ConfigurationError("missing experiment.model", key="experiment.model")
    if model not in MODELS:
        raise ConfigurationError(f"unknown model {model!r}; expected one of {', '.join(MODELS)}", key="experiment.model")
    cfg = ExperimentConfig(
        **exp,
        model_params=_read_section(cp, "model", MODEL_KEYS[model]),
        environment=_read_section(cp, "environment", ENV_KEYS, _env_dynamic),
        initial=_read_section(cp, "initial", SECTION_KEYS["initial"]),
        schedule=_read_section(cp, "schedule", SECTION_KEYS["schedule"]),
        output=_read_section(cp, "output", SECTION_KEYS["output"]),
        check=_read_section(cp, "check", SECTION_KEYS["check"]),
    )
    for k in ("horizon", "replications"):
        if getattr(cfg, k) < 1:
            raise ConfigurationError(f"experiment.{k} must be at least 1", key=f"experiment.{k}")
    if cfg.stride < 0:
        raise ConfigurationError("experiment.stride must be nonnegative", key="experiment.stride")
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# ----------------------------------------------------------------- building


def _keyed(section, key, fn, *args, **kwargs):
    """Call ``fn`` and tag any configuration error with ``section.key`` when it carries no key."""
    try:
        return fn(*args, **kwargs)
    except ConfigurationError as exc:
        if exc.key is None or "." not in str(exc.key):
            exc.key = f"{section}.{exc.key or key}"
        raise


def build_environment(cfg):
    from .environments import Distribution, Environment, PayoffSupport

    e = cfg.environment
    if cfg.model in ("absorbing", "vn"):
        if e:
            raise ConfigurationError(f"model {cfg.model} takes no [environment]", key="environment")
        return None
    n = e.get("individuals", 1)
    if n < 1:
        raise ConfigurationError("environment.individuals must be at least 1", key="environment.individuals")
    kind = e.get("kind", "bernoulli")
    support = None
    if "x_min" in e or "x_max" in e:
        if not ("x_min" in e and "x_max" in e):
            raise ConfigurationError("declare both x_min and x_max", key="environment.x_min")
        support = _keyed("environment", "x_min", PayoffSupport, e["x_min"], e["x_max"])
    if kind == "bernoulli":
        if "probs" not in e:
            raise ConfigurationError("bernoulli environment needs probs", key="environment.probs")
        if any(k.startswith("action") for k in e):
            raise ConfigurationError("actionN keys belong to kind = discrete", key="environment.kind")
        low, high = e.get("low", 0.0), e.get("high", 1.0)
        for p in e["probs"]:
            if not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"success probability {p} outside [0, 1]", key="environment.probs")
        row = [Distribution.bernoulli(p, low, high) for p in e["probs"]]
        support = support or _keyed("environment", "low", PayoffSupport, low, high)
        return _keyed("environment", "probs", Environment.identical_for, n, row, support)
    if kind == "discrete":
        acts = sorted((int(k[6:]), v) for k, v in e.items() if k.startswith("action"))
        if not acts or [a for a, _ in acts] != list(range(len(acts))):
            raise ConfigurationError("discrete environment needs action0, action1, ...", key="environment.action0")
        for k in ("probs", "low", "high"):
            if k in e:
                raise ConfigurationError(f"{k} belongs to kind = bernoulli", key=f"environment.{k}")
        row = [_keyed("environment", f"action{a}", Distribution, pairs) for a, pairs in acts]
        return _keyed("environment", "action0", Environment.identical_for, n, row, support)
    raise ConfigurationError(f"unknown environment kind {kind!r}", key="environment.kind")


def _check_keys(params, allowed, model):
    for k in params:
        if k not in allowed:
            raise ConfigurationError(f"key {k!r} does not apply to this {model} configuration", key=f"model.{k}")


def build_switch(p, strict=True):
    from .individual_rules import SwitchFunction

    kind = p.get("switch", "linear")
    if kind == "linear":
        _check_keys(p, {"switch", "b", "decay", "c", "offset"}, "linear switch")
        return _keyed("model", "b", SwitchFunction.linear, p.get("b", 1.0))
    if kind == "power":
        _check_keys(p, {"switch", "beta", "p", "decay", "c", "offset"}, "power switch")
        return _keyed("model", "beta", SwitchFunction.power, p.get("beta", 1.0), p.get("p", 1.0))
    if kind == "custom":
        _check_keys(p, {"switch", "grid", "table", "decay", "c", "offset"}, "custom switch")
        if "grid" not in p or "table" not in p:
            raise ConfigurationError("custom switch needs grid and table", key="model.table")
        return _keyed("model", "table", SwitchFunction.custom, p["grid"], p["table"], check=strict)
    raise ConfigurationError(f"unknown switch {kind!r}", key="model.switch")


def build_rule(cfg, env, strict=True):
    from .counterexamples import AbsorbingRule, VNParams, VNRule
    from .individual_rules import FullInfoRule, MonotoneParams, MonotoneRule, RothErevRule
    from .social_rules import ImitationRate, LinearPairwise, NormalizedScore, Proportional, SocialRule, UniformK, UniformPairs

    p = cfg.model_params
    m = cfg.model
    if m == "absorbing":
        return _keyed("model", "sigma0", AbsorbingRule, p.get("sigma0", 0.5))
    if m == "vn":
        return VNRule(_keyed("model", "beta", VNParams, **p))
    if env is None:
        raise ConfigurationError(f"model {m} needs an [environment] section", key="environment")
    if m == "monotone":
        params = _keyed("model", "c", MonotoneParams, c=p.get("c", 1.0), decay=p.get("decay", "harmonic"))
        return MonotoneRule(params, offset=p.get("offset", 1))
    if m == "full_info":
        g = build_switch(p, strict)
        return _keyed(
            "model", "switch", FullInfoRule, g, decay=p.get("decay", "constant"), c=p.get("c", 1.0), offset=p.get("offset", 1)
        )
    if m == "roth_erev":
        if "attractions" not in p:
            raise ConfigurationError("roth_erev needs attractions", key="model.attractions")
        f = np.array(p["attractions"], dtype=np.float64)
        if f.shape[0] == 1 and env.n_individuals > 1:
            f = np.repeat(f, env.n_individuals, axis=0)
        return _keyed("model", "attractions", RothErevRule, f, strict=p.get("strict", True))
    if m == "social":
        comp = p.get("component", "proportional")
        if comp == "proportional":
            component = Proportional()
        elif comp == "normalized_score":
            component = NormalizedScore()
        elif comp == "linear_pairwise":
            component = _keyed("model", "b", LinearPairwise, p.get("b", 1.0))
        else:
            raise ConfigurationError(f"unknown imitation component {comp!r}", key="model.component")
        if "b" in p and comp != "linear_pairwise":
            raise ConfigurationError("b applies to the linear_pairwise component only", key="model.b")
        samp = p.get("sampling", "uniform_pairs")
        if samp == "uniform_pairs":
            if "k" in p:
                raise ConfigurationError("k applies to uniform_k sampling only", key="model.k")
            sampling = UniformPairs()
        elif samp == "uniform_k":
            sampling = _keyed("model", "k", UniformK, p.get("k", 1))
        else:
            raise ConfigurationError(f"unknown sampling {samp!r}", key="model.sampling")
        kind = p.get("rate", "harmonic")
        lam = p.get("lambda", 1.0)
        if not 0.0 <= lam <= 1.0:
            raise ConfigurationError(f"imitation rate lambda must lie in [0, 1], got {lam}", key="model.lambda")
        if kind == "harmonic" and "lambda" in p:
            raise ConfigurationError("lambda applies to rate = constant only", key="model.lambda")
        rate = _keyed("model", "rate", ImitationRate, kind, lam)
        return SocialRule(component, sampling, rate)
    raise ConfigurationError(f"unknown model {m!r}", key="experiment.model")  # pragma: no cover


def build_initial(cfg, rule, env):
    from .core.types import Configuration

    s = cfg.initial.get("sigma")
    if s is None:
        return None
    rows = np.array(s, dtype=np.float64)
    n = 1 if env is None else env.n_individuals
    if rows.shape[0] == 1 and n > 1:
        rows = np.repeat(rows, n, axis=0)
    return _keyed("initial", "sigma", Configuration, rows)


def build_schedule(cfg, rule, env, system):
    from .core.schedules import Constant, Harmonic, Product, TheoremOne, theorem1_slowing_constant
    from .individual_rules import AttractionTheta

    s = cfg.schedule
    kind = s.get("kind", "none")
    allowed = {"none": set(), "constant": {"theta"}, "harmonic": set(), "theorem1": {"epsilon"}, "attraction": set()}
    if kind not in allowed:
        raise ConfigurationError(f"unknown schedule kind {kind!r}", key="schedule.kind")
    for k in s:
        if k not in allowed[kind] | {"kind", "eta"}:
            raise ConfigurationError(f"key {k!r} does not apply to schedule kind {kind}", key=f"schedule.{k}")
    try:
        if kind == "none":
            base = None
        elif kind == "constant":
            if "theta" not in s:
                raise ConfigurationError("constant schedule needs theta", key="schedule.theta")
            base = Constant(s["theta"])
        elif kind == "harmonic":
            base = Harmonic()
        elif kind == "theorem1":
            if "epsilon" not in s:
                raise ConfigurationError("theorem1 schedule needs epsilon", key="schedule.epsilon")
            g = theorem1_slowing_constant(system.p0, s["epsilon"])
            base = TheoremOne(g, rule.hazard_bound(env, system.optimal))
        else:
            base = AttractionTheta(env.support.x_max)
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(str(exc), key=f"schedule.{'epsilon' if kind == 'theorem1' else 'theta'}") from None
    eta = s.get("eta", "none")
    if eta == "none":
        return base
    if eta != "harmonic":
        raise ConfigurationError(f"unknown eta {eta!r}", key="schedule.eta")
    return Harmonic() if base is None else Product((base, Harmonic()))


def build_system(cfg, strict=True):
    """``(system, env)`` ready for simulation; every invariant is validated here."""
    from .core.engine import _check_compatible, make_system

    env = build_environment(cfg)
    rule = build_rule(cfg, env, strict)
    initial = build_initial(cfg, rule, env)
    system = _keyed("initial", "sigma", make_system, rule, env, initial=initial)
    system = system.with_schedule(build_schedule(cfg, rule, env, system))
    _keyed("model", cfg.model, _check_compatible, system, env)
    return system, env
