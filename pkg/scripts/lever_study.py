#!/usr/bin/env python3
"""Intervention-lever study on the shipped on-the-fence scenario.

Prints how far each lever (publication speed via B, de-anonymisation cost
via I, trust via w) has to move before the source decides to leak, then the
full flip-point table for w, y, z, and I.
"""

from pathlib import Path

from wbgame.analysis import find_threshold, lever_report
from wbgame.scenario import load_scenario

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def main():
    scn = load_scenario(str(SCENARIOS / "baseline_noleak.scn"))
    p = scn.parameters

    print(f"scenario: {scn.name}")
    print()
    print("lever report (minimal move that flips the leak decision)")
    print(f"{'lever':22s} {'param':6s} {'from':>8s} {'to':>8s} {'critical':>12s}")
    for f in lever_report(p):
        crit = f"{f.critical:.6f}" if f.critical is not None else "no flip"
        print(f"{f.lever:22s} {f.param:6s} {f.start:8.3f} {f.end:8.1f} {crit:>12s}")

    print()
    print("equilibrium flip points (outcome support changes)")
    print(f"{'param':6s} {'bracket':>16s} {'critical':>12s} {'single flip':>12s}")
    for param, lo, hi in [("w", 0.0, 1.0), ("y", 0.0, 0.8), ("z", 0.0, 1.0), ("I", -5.0, -1.7)]:
        rep = find_threshold(p, param, lo, hi, tol=1e-6)
        print(f"{param:6s} [{lo:6.2f},{hi:6.2f}] {rep.critical:12.6f} {str(rep.monotone):>12s}")


if __name__ == "__main__":
    main()
