"""Pilot runs that calibrate the finite-horizon acceptance thresholds.

Run ``python3 tests/pilot_calibration.py`` to regenerate
``tests/fixtures/pilot.json``.  Pilot seeds differ from the acceptance seeds.
"""

import json
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))

import setups  # noqa: E402
from berhr import diagnostics as dg  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "fixtures", "pilot.json")


def pilot_means(build, horizon, replications, probes=()):
    system, env = build()
    means, extra = [], []
    for seed in setups.PILOT_SEEDS:
        t0 = time.time()
        s = dg.estimate_optimality(system, env, horizon, replications, seed, probes=probes)
        means.append(float(s.terminal.mean()))
        extra.append(s)
        print(f"  seed {seed}: mean P_T {means[-1]:.6f} ({time.time() - t0:.1f} s)", flush=True)
    return np.array(means), extra


def threshold(means):
    return float(means.mean() - 5.0 * means.std(ddof=1))


def main():
    out = {}
    print("harmonic VN")
    m, _ = pilot_means(setups.harmonic_vn, setups.HARMONIC_VN_T, setups.HARMONIC_VN_R)
    out["harmonic_vn"] = {"pilot_means": m.tolist(), "threshold": threshold(m)}
    print("Roth-Erev")
    m, runs = pilot_means(setups.roth_erev, setups.ROTH_EREV_T, setups.ROTH_EREV_R, probes=[dg.TerminalInfoProbe()])
    frac = [float(np.mean(setups.optimal_attraction(s) > 0.5 * 0.9 * setups.ROTH_EREV_T)) for s in runs]
    ratio = [float(np.min(setups.optimal_attraction(s)) / setups.ROTH_EREV_T) for s in runs]
    out["roth_erev"] = {
        "pilot_means": m.tolist(),
        "attraction_fraction_above": frac,
        "min_attraction_over_T": ratio,
    }
    print("social")
    m, _ = pilot_means(setups.social, setups.SOCIAL_T, setups.SOCIAL_R)
    out["social"] = {"pilot_means": m.tolist(), "threshold": threshold(m)}
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
