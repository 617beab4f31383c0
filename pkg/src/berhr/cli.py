"""Command line experiment runner: ``berhr run <config>`` and ``berhr check <config>``."""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import diagnostics as dg
from .config import build_switch, build_system, load_config
from .core.types import aggregate_rows
from .errors import BerhrError, ConfigurationError, InvariantViolation, PreconditionError, UnsupportedError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3

REPLICATION_HEADER = ("replication", "seed", "terminal_P", "classification")
CURVE_HEADER = ("t", "mean_P", "se_P", "mean_hazard")


def _num(x):
    x = float(x)
    return "nan" if np.isnan(x) else repr(x)


def write_outputs(summary, out_dir):
    """Write ``replications.csv``, ``curve.csv`` and ``summary.json`` into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "replications.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPLICATION_HEADER)
        for r in range(summary.replications):
            w.writerow((r, int(summary.stream_seeds[r]), _num(summary.terminal[r]), summary.classification[r]))
    with open(os.path.join(out_dir, "curve.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for t, m, s, h in zip(summary.curve_t, summary.mean_p, summary.se_p, summary.mean_hazard):
            w.writerow((int(t), _num(m), _num(s), _num(h)))
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load(path, seed=None, strict=True):
    cfg = load_config(path)
    if seed is not None:
        cfg.seed = seed
    system, env = build_system(cfg, strict=strict)
    return cfg, system, env


def _config_error(exc, err):
    key = getattr(exc, "key", None)
    err.write(f"configuration error [{key}]: {exc}\n" if key else f"configuration error: {exc}\n")
    return EXIT_CONFIG


def cmd_run(args, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg, system, env = _load(args.config, args.seed)
    except (BerhrError, ValueError, OSError) as exc:
        return _config_error(exc, err)
    out_dir = args.out or cfg.output.get("dir", "out")
    try:
        summary = dg.estimate_optimality(
            system,
            env,
            cfg.horizon,
            cfg.replications,
            cfg.seed,
            thresholds=dg.Thresholds(cfg.hi, cfg.lo),
            stride=cfg.stride or None,
            workers=args.workers,
        )
    except InvariantViolation as exc:
        err.write(f"invariant violation at step {exc.step}, seed {exc.seed}: {exc}\n")
        return EXIT_INVARIANT
    except (ConfigurationError, PreconditionError) as exc:
        return _config_error(exc, err)
    write_outputs(summary, out_dir)
    lo, hi = summary.wilson
    c = summary.counts
    out.write(
        f"model={cfg.model} T={cfg.horizon} R={cfg.replications} seed={cfg.seed}\n"
        f"optimal={c[dg.OPTIMAL]} null={c[dg.NULL]} undetermined={c[dg.UNDETERMINED]}\n"
        f"optimality frequency {summary.optimality_frequency:.6f}  Wilson 95% [{lo:.6f}, {hi:.6f}]\n"
        f"outputs written to {out_dir}\n"
    )
    return EXIT_OK


def _rows_check(out, rows):
    width = max(len(r[0]) for r in rows)
    out.write(f"{'check'.ljust(width)}  result  detail\n")
    for name, status, detail in rows:
        out.write(f"{name.ljust(width)}  {status.ljust(6)}  {detail}\n")


def _tightest(results):
    vals = [g.gain / (g.performance * (1.0 - g.performance)) for g in results if g.performance * (1.0 - g.performance) > 1e-12]
    return min(vals) if vals else float("nan")


def _delta(system, env, t):
    info = getattr(system.rule, "f0", None)
    return float(np.asarray(system.rule.hazard_bound(env, system.optimal)(t, info)).reshape(-1)[0])


def run_checks(cfg, system, env, n_points=None, t=None):
    """``(name, PASS|FAIL|N/A, detail)`` rows of the exact checks for a configuration."""
    n_points = n_points or cfg.check.get("n_points", 11)
    t = cfg.check.get("t", 0) if t is None else t
    rows = []
    try:
        grid = dg.configuration_grid(system.n_individuals, system.n_actions, n_points)
        res = dg.wberhr_check_exact(system, env, grid=grid, t=t)
        bad = [g for g in res if not g.holds]
        delta = _delta(system, env, t)
        theta = dg._theta(system, t, dg.info_for(system.rule, system.initial.rows))
        detail = f"{len(res)} points, delta_t={delta:.6g}"
        if theta != 1.0:
            detail += f", theta_t={theta:.6g}"
        detail += f", tightest observed hazard {_tightest(res):.6g}"
        if bad:
            worst = min(bad, key=lambda g: g.slack)
            detail += f"; {len(bad)} violations, worst at {np.round(worst.rows, 6).tolist()} slack {worst.slack:.3g}"
        rows.append(("wberhr_exact", "FAIL" if bad else "PASS", detail))
    except (UnsupportedError, PreconditionError) as exc:
        rows.append(("wberhr_exact", "N/A", f"enumeration infeasible: {exc}"))
        delta = None
    if delta is not None:
        base = system.with_schedule(None)
        d0 = _delta(base, env, t)
        gammas = dg.gamma_grid(d0) or [min(1.0, d0)]
        try:
            n_bad, n_tot = 0, 0
            for sig in grid:
                if not dg.admissible(base.rule, sig):
                    continue
                for g in gammas:
                    r = dg.supermartingale_check(base, env, sig, 1.0, g, t=t, delta=d0)
                    n_tot += 1
                    n_bad += not r.holds
            rows.append(
                ("supermartingale", "FAIL" if n_bad else "PASS", f"{n_tot} (sigma, gamma) pairs, {n_bad} violations")
            )
        except (UnsupportedError, PreconditionError) as exc:
            rows.append(("supermartingale", "N/A", f"enumeration infeasible: {exc}"))
    return rows


def cmd_check(args, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg = load_config(args.config)
    except (BerhrError, ValueError, OSError) as exc:
        return _config_error(exc, err)
    rows = []
    if cfg.model == "full_info" and cfg.model_params.get("switch") == "custom":
        try:
            g = build_switch(cfg.model_params, strict=False)
        except ConfigurationError as exc:
            return _config_error(exc, err)
        problems = g.validate()
        rows.append(("switch_function", "FAIL" if problems else "PASS", "; ".join(problems) or "symmetric-switch"))
        if problems:
            _rows_check(out, rows)
            return EXIT_OK
    try:
        _, system, env = _load(args.config, args.seed)
    except (BerhrError, ValueError) as exc:
        return _config_error(exc, err)
    rows.extend(run_checks(cfg, system, env))
    mask = system.optimal.mask()
    out.write(f"model={cfg.model} P0={float(aggregate_rows(system.initial.rows, mask)):.6g}\n")
    _rows_check(out, rows)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="berhr", description="Simulate and check learning systems with bounded expected relative hazard rates.")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb, helptext in (("run", "run a replication experiment"), ("check", "run the exact property checks")):
        s = sub.add_parser(verb, help=helptext)
        s.add_argument("config", help="INI experiment file")
        s.add_argument("--seed", type=lambda x: int(x, 0), default=None, help="master seed (overrides the file)")
        s.add_argument("--workers", type=int, default=1, help="worker processes")
        s.add_argument("--out", default=None, help="output directory (overrides [output] dir)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        sys.stderr.write("configuration error [--seed]: seed must be an unsigned 64-bit integer\n")
        return EXIT_CONFIG
    if args.workers < 1:
        sys.stderr.write("configuration error [--workers]: need at least one worker\n")
        return EXIT_CONFIG
    if args.verb == "run":
        return cmd_run(args)
    return cmd_check(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
