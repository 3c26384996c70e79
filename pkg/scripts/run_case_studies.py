#!/usr/bin/env python3
"""Solve every shipped scenario, print the equilibrium walkthroughs, and
certify each against the brute-force oracle."""

from pathlib import Path

from wbgame.analysis import class_distribution
from wbgame.model import build_game
from wbgame.oracle import brute_force_spe
from wbgame.scenario import load_scenario, render_result
from wbgame.solver import solve

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def main():
    for path in sorted(SCENARIOS.glob("*.scn")):
        scn = load_scenario(str(path))
        tree = build_game(scn.parameters)
        result = solve(tree, scn.risk, scn.ties)
        certified = brute_force_spe(tree, scn.risk, scn.ties)
        agrees = certified.canonical == result.profile

        print("=" * 72)
        print(f"{scn.name or path.stem}  ({path.name})")
        print("=" * 72)
        print(render_result(result, tree, "text"), end="")
        dist = class_distribution(tree, result)
        modal = max(dist, key=dist.get)
        print(f"modal outcome: {modal.value}" + (
            f"  (file expects {scn.expected_outcome.value})" if scn.expected_outcome else ""))
        print(f"oracle: {'agrees' if agrees else 'DISAGREES'} "
              f"({len(certified.spe_profiles)} subgame-perfect profile(s))")
        print()
        assert agrees


if __name__ == "__main__":
    main()
