"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import math
import random
import time
from contextlib import contextmanager
from dataclasses import replace

import pytest

from conftest import sample_parameters, scenario_path
from wbgame.analysis import (
    OutcomeClass,
    class_distribution,
    find_threshold,
    grid_scan_flip,
    simulate,
)
from wbgame.cli import main
from wbgame.model import (
    BLOCK_NODE_ID,
    CENSOR_NODE_ID,
    CENSORED_NODE_IDS,
    alice_to_harry,
    build_game,
    duncan_to_harry,
    prune_zero,
    tom_pursues_censored,
)
from wbgame.oracle import brute_force_spe
from wbgame.scenario import load_scenario
from wbgame.solver import RiskProfile, one_shot_violations, solve
from wbgame.tree import NEG_INF, Player, count_nodes, terminals, validate_tree

SAMPLE_SEED = 20240 + 814  # fixed so the suite is reproducible
N_SAMPLES = 1000


@contextmanager
def criterion(num, text):
    try:
        yield
    except BaseException:
        print(f"[criterion {num:2d}] FAIL - {text}")
        raise
    print(f"[criterion {num:2d}] PASS - {text}")


@pytest.fixture(scope="module")
def samples():
    rng = random.Random(SAMPLE_SEED)
    return [sample_parameters(rng) for _ in range(N_SAMPLES)]


@pytest.fixture(scope="module")
def solved_samples(samples):
    out = []
    for p in samples:
        tree = build_game(p)
        out.append((p, tree, solve(tree)))
    return out


def test_criterion_1_oracle_equivalence(solved_samples):
    with criterion(1, "solver matches brute-force oracle on 1000 random games"):
        start = time.perf_counter()
        agreements = 0
        for p, tree, result in solved_samples:
            certified = brute_force_spe(tree)
            assert certified.canonical == result.profile, p
            for player in (Player.ALICE, Player.TOM):
                a = certified.canonical_root_value[player]
                b = result.root_value[player]
                if a == NEG_INF or b == NEG_INF:
                    assert a == b, p
                else:
                    assert abs(a - b) <= 1e-9, p
            agreements += 1
        elapsed = time.perf_counter() - start
        assert agreements == N_SAMPLES
        assert elapsed < 60.0, f"oracle sweep took {elapsed:.1f}s"


def test_criterion_2_tree_shape(solved_samples):
    with criterion(2, "standard tree is 9 decisions / 9 chance / 21 terminals, always valid"):
        for p, tree, _ in solved_samples:
            assert count_nodes(tree) == (9, 9, 21)
            assert validate_tree(tree) == []


def test_criterion_3_censored_pursuit_rule(solved_samples):
    with criterion(3, "censored-pursuit rule C + I >= D matches the solver, tie acts"):
        for p, tree, result in solved_samples:
            want = "pursue" if tom_pursues_censored(p) else "drop"
            for nid in CENSORED_NODE_IDS:
                assert result.profile[nid] == want, p

        # flip point probed at C + I = D exactly and one 1e-9 step either
        # side; dyadic values keep the comparison exact in floats
        from test_model import params

        base = params(C=4.0, D=1.0, H=-0.5)
        for i_value, want in ((-3.0, "pursue"), (-3.0 - 1e-9, "drop"), (-3.0 + 1e-9, "pursue")):
            p = replace(base, I=i_value)
            result = solve(build_game(p))
            assert tom_pursues_censored(p) == (want == "pursue")
            for nid in CENSORED_NODE_IDS:
                assert result.profile[nid] == want, i_value


def test_criterion_4_one_shot_deviations(solved_samples):
    with criterion(4, "no single-node deviation improves any owner anywhere"):
        for p, tree, result in solved_samples:
            assert one_shot_violations(tree, result.profile) == [], p


def test_criterion_5_monte_carlo(baseline):
    with criterion(5, "100k seeded playouts sit within 3 standard errors of the solution"):
        tree = build_game(baseline.parameters)
        result = solve(tree, baseline.risk, baseline.ties)
        sim = simulate(tree, result.profile, 100_000, seed=42)

        for player in (Player.ALICE, Player.TOM):
            se = sim.payoff_standard_errors[player]
            assert se > 0
            assert abs(sim.mean_payoffs[player] - result.root_value[player]) <= 3 * se

        solved = class_distribution(tree, result)
        for cls in OutcomeClass:
            expected = solved[cls]
            if expected in (0.0, 1.0):
                assert sim.class_frequencies[cls] == expected
                continue
            se = math.sqrt(expected * (1.0 - expected) / sim.n)
            assert abs(sim.class_frequencies[cls] - expected) <= 3 * se, cls


def test_criterion_6_variant_semantics(samples):
    with criterion(6, "duncan-to-harry prunes cleanly; alice-to-harry never blocks"):
        for p in samples[:200]:
            v = duncan_to_harry(p)
            tree = build_game(v)
            result = solve(tree)
            for nid, prob in result.outcome_distribution.items():
                if "world-tom" in nid or "world-neutral" in nid:
                    assert prob == 0.0
            pruned = prune_zero(tree)
            small = solve(pruned)
            for player in (Player.ALICE, Player.TOM):
                assert abs(small.root_value[player] - result.root_value[player]) <= 1e-12

        for p in samples:
            result = solve(build_game(alice_to_harry(p)))
            assert result.profile[BLOCK_NODE_ID] == "proceed", p


def test_criterion_7_case_studies():
    with criterion(7, "shipped case studies reproduce their qualitative outcomes"):
        snowden = load_scenario(scenario_path("snowden"))
        tree = build_game(snowden.parameters)
        result = solve(tree, snowden.risk, snowden.ties)
        assert result.profile[""] == "leak"
        assert result.profile[BLOCK_NODE_ID] == "proceed"
        assert result.profile[CENSOR_NODE_ID] == "hold"
        for nid in ("leak/trust/proceed/hold/world-duncan", "leak/trust/proceed/hold/world-neutral"):
            assert result.profile[nid] == "pursue"
        dist = class_distribution(tree, result)
        # conditional on a pursued uncensored broadcast, impunity happens
        # with exactly Harry's probability z
        pursued = dist[OutcomeClass.UNCENSORED_IMPUNITY] + dist[OutcomeClass.UNCENSORED_JAILED]
        assert pursued > 0
        assert dist[OutcomeClass.UNCENSORED_IMPUNITY] / pursued == pytest.approx(
            snowden.parameters.z, abs=1e-9
        )
        assert max(dist, key=dist.get) is OutcomeClass.UNCENSORED_IMPUNITY

        pre = load_scenario(scenario_path("weinstein_pre"))
        tree = build_game(pre.parameters)
        result = solve(tree, pre.risk, pre.ties)
        assert result.profile[""] == "leak"
        assert result.profile[BLOCK_NODE_ID] == "block"
        dist = class_distribution(tree, result)
        assert max(dist, key=dist.get) is OutcomeClass.BLOCKED

        post = load_scenario(scenario_path("weinstein_post"))
        tree = build_game(post.parameters)
        result = solve(tree, post.risk, post.ties)
        assert result.profile[""] == "leak"
        dist = class_distribution(tree, result)
        assert dist[OutcomeClass.CENSORED_JAILED] == 0.0
        assert dist[OutcomeClass.CENSORED_ANONYMOUS] == 0.0
        assert dist[OutcomeClass.BLOCKED] == 0.0
        assert max(dist, key=dist.get) is OutcomeClass.UNCENSORED_ANONYMOUS

        # every shipped expected_outcome matches the solved modal class
        for name in ("baseline", "baseline_noleak", "snowden", "weinstein_pre", "weinstein_post"):
            scn = load_scenario(scenario_path(name))
            tree = build_game(scn.parameters)
            dist = class_distribution(tree, solve(tree, scn.risk, scn.ties))
            assert max(dist, key=dist.get) is scn.expected_outcome, name


def test_criterion_8_risk_continuity(baseline):
    with criterion(8, "risk transform is continuous at 0 and exactly identity there"):
        tree = build_game(baseline.parameters)
        neutral = solve(tree, RiskProfile(0.0, 0.0), baseline.ties)
        for alpha in (1e-6, -1e-6):
            tilted = solve(tree, RiskProfile(alpha, alpha), baseline.ties)
            for player in (Player.ALICE, Player.TOM):
                assert abs(tilted.root_value[player] - neutral.root_value[player]) < 1e-4

        # alpha = 0 leaves terminal payoffs bitwise untouched
        for nid, node in terminals(tree):
            for player in (Player.ALICE, Player.TOM):
                assert neutral.node_values[nid][player] == node.payoffs[player]
                assert math.copysign(1.0, neutral.node_values[nid][player]) == math.copysign(
                    1.0, node.payoffs[player]
                )


def test_criterion_9_threshold_analysis(baseline_noleak):
    with criterion(9, "bisection agrees with a 10^4-point scan; closed-form case matches"):
        tol = 1e-6
        brackets = {"w": (0.0, 1.0), "y": (0.0, 0.8), "z": (0.0, 1.0), "I": (-5.0, -1.7)}
        for param, (lo, hi) in brackets.items():
            direct = find_threshold(baseline_noleak.parameters, param, lo, hi, tol=tol)
            segments = grid_scan_flip(baseline_noleak.parameters, param, lo, hi, 10_001)
            assert segments, param
            seg_lo, seg_hi = segments[0]
            rescued = find_threshold(baseline_noleak.parameters, param, seg_lo, seg_hi, tol=tol)
            assert abs(direct.critical - rescued.critical) <= 2 * tol, param

        # passive Tom: the flip solves (1-w)a + w*e = 0, i.e. w* = -a/(e-a)
        from test_analysis import passive_tom

        p = passive_tom(a=-1.0, e=5.0)
        report = find_threshold(p, "w", 0.0, 1.0, tol=tol)
        assert abs(report.critical - (-p.a / (p.e - p.a))) <= 1e-6


CLI_COMMANDS = [
    ["solve", "--scenario", scenario_path("baseline"), "--format", "text"],
    ["solve", "--scenario", scenario_path("baseline"), "--format", "json"],
    ["solve", "--scenario", scenario_path("baseline"), "--format", "csv"],
    ["sweep", "--scenario", scenario_path("baseline"), "--param", "w",
     "--from", "0", "--to", "1", "--steps", "11"],
    ["threshold", "--scenario", scenario_path("baseline_noleak"), "--param", "y",
     "--lo", "0", "--hi", "0.8"],
    ["levers", "--scenario", scenario_path("baseline_noleak")],
    ["simulate", "--scenario", scenario_path("baseline"), "--n", "5000", "--seed", "42"],
    ["validate", "--scenario", scenario_path("snowden")],
    ["export-tree", "--scenario", scenario_path("baseline"), "--with-solution"],
    ["export-tree", "--scenario", scenario_path("weinstein_post"), "--pruned"],
]


def test_criterion_10_cli_determinism(capsys):
    with criterion(10, "every CLI command is byte-identical across runs with --no-meta"):
        for argv in CLI_COMMANDS:
            full = argv + ["--no-meta"]
            assert main(list(full)) == 0
            first = capsys.readouterr().out
            assert main(list(full)) == 0
            second = capsys.readouterr().out
            assert first.encode() == second.encode(), argv[0]
