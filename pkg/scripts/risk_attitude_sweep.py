#!/usr/bin/env python3
"""How risk attitudes move the baseline equilibrium.

Sweeps the shared risk coefficient from seeking (-1) to averse (+1) for each
player separately and prints the root values and Alice's decision. Output is
CSV on stdout.
"""

from pathlib import Path

from wbgame.model import build_game
from wbgame.scenario import load_scenario
from wbgame.solver import RiskProfile, solve
from wbgame.tree import Player

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def main():
    scn = load_scenario(str(SCENARIOS / "baseline.scn"))
    tree = build_game(scn.parameters)
    grid = [round(-1.0 + 0.1 * i, 1) for i in range(21)]

    print("tilted_player,alpha,alice_leaks,root_alice,root_tom")
    for player in ("alice", "tom"):
        for alpha in grid:
            risk = RiskProfile(**{player: alpha})
            result = solve(tree, risk, scn.ties)
            leaks = result.profile[""] == "leak"
            print(
                f"{player},{alpha!r},{str(leaks).lower()},"
                f"{result.root_value[Player.ALICE]!r},{result.root_value[Player.TOM]!r}"
            )


if __name__ == "__main__":
    main()
