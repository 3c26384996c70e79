"""Comparative statics and validation over the whistleblowing game.

Sweeps re-solve the game along a parameter grid; threshold search bisects on
the point where the equilibrium's outcome support changes; the lever report
asks how far each of the three intervention levers (making publication too
fast to block, raising the price of unmasking Alice, building Alice-Duncan
trust) must move before a quiet Alice decides to leak; and ``simulate`` plays
the solved strategy forward with a seeded generator to validate the solver's
probability arithmetic empirically.
"""

from __future__ import annotations

import math
import os
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

from . import model
from .model import GameParameters, build_game
from .solver import (
    PAPER_TIES,
    RISK_NEUTRAL,
    RiskProfile,
    SolveResult,
    TiePolicy,
    solve,
)
from .tree import Decision, Node, Player, StrategyProfile, Terminal, node_id, terminals


class AnalysisError(ValueError):
    """A precondition of an analysis operation failed (bad bracket, etc.)."""


class OutcomeClass(Enum):
    NO_LEAK = model.NO_LEAK
    NO_TRUST = model.NO_TRUST
    BLOCKED = model.BLOCKED
    CENSORED_JAILED = model.CENSORED_JAILED
    CENSORED_ANONYMOUS = model.CENSORED_ANONYMOUS
    UNCENSORED_ANONYMOUS = model.UNCENSORED_ANONYMOUS
    UNCENSORED_IMPUNITY = model.UNCENSORED_IMPUNITY
    UNCENSORED_JAILED = model.UNCENSORED_JAILED


def classify_terminal(label: str) -> OutcomeClass:
    try:
        return OutcomeClass(label)
    except ValueError:
        raise ValueError(f"terminal label {label!r} is not an outcome class") from None


def class_distribution(tree: Node, result: SolveResult) -> dict[OutcomeClass, float]:
    """Aggregate the solved outcome distribution by outcome class."""
    dist = {cls: 0.0 for cls in OutcomeClass}
    for nid, node in terminals(tree):
        dist[classify_terminal(node.label)] += result.outcome_distribution[nid]
    return dist


def outcome_support(tree: Node, result: SolveResult) -> frozenset[OutcomeClass]:
    """Classes realized with strictly positive probability."""
    return frozenset(
        cls for cls, prob in class_distribution(tree, result).items() if prob > 0.0
    )


def alice_leaks(result: SolveResult) -> bool:
    return result.profile.get(model.ROOT_NODE_ID) == "leak"


SWEEPABLE = (
    "w", "x", "y", "z",
    "a", "b", "c", "d", "e", "f", "g",
    "B", "C", "D", "E", "F", "G", "H", "I",
)


def _with_param(base: GameParameters, param: str, value: float) -> GameParameters:
    if param not in SWEEPABLE:
        raise AnalysisError(f"unknown parameter {param!r}; expected one of {SWEEPABLE}")
    return replace(base, **{param: value})


def _solve_point(base: GameParameters, param: str, value: float,
                 risk: RiskProfile, ties: TiePolicy) -> tuple[Node, SolveResult]:
    p = _with_param(base, param, value)
    problems = model.validate_parameters(p)
    if problems:
        raise ValueError("; ".join(problems))
    tree = build_game(p)
    return tree, solve(tree, risk, ties)


def _worker_count() -> int:
    raw = os.environ.get("WBGAME_THREADS", "").strip()
    if raw:
        n = int(raw)
        if n > 0:
            return n
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class SweepRow:
    value: float
    valid: bool
    error: str | None
    alice_leaks: bool | None
    root_alice: float | None
    root_tom: float | None
    class_probabilities: dict[OutcomeClass, float] | None


@dataclass(frozen=True)
class SweepTable:
    param: str
    rows: tuple[SweepRow, ...]


def sweep(
    base: GameParameters,
    param: str,
    grid: list[float],
    risk: RiskProfile = RISK_NEUTRAL,
    ties: TiePolicy = PAPER_TIES,
) -> SweepTable:
    """Solve once per grid point; invalid points become error rows.

    The grid must be strictly increasing. Rows are computed independently
    (possibly on several threads, capped by WBGAME_THREADS) and reported in
    grid order, so output never depends on scheduling.
    """
    if param not in SWEEPABLE:
        raise AnalysisError(f"unknown parameter {param!r}; expected one of {SWEEPABLE}")
    if len(grid) == 0:
        raise AnalysisError("empty grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise AnalysisError("grid values must be strictly increasing")

    def point(value: float) -> SweepRow:
        try:
            tree, result = _solve_point(base, param, value, risk, ties)
        except ValueError as exc:
            return SweepRow(value, False, str(exc), None, None, None, None)
        return SweepRow(
            value,
            True,
            None,
            alice_leaks(result),
            result.root_value[Player.ALICE],
            result.root_value[Player.TOM],
            class_distribution(tree, result),
        )

    workers = _worker_count()
    if workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(point, grid))
    else:
        rows = tuple(point(v) for v in grid)
    return SweepTable(param, rows)


@dataclass(frozen=True)
class ThresholdReport:
    param: str
    lo: float
    hi: float
    critical: float
    tol: float
    below_classes: frozenset[OutcomeClass]
    above_classes: frozenset[OutcomeClass]
    monotone: bool


def _support_at(base: GameParameters, param: str, value: float,
                risk: RiskProfile, ties: TiePolicy) -> frozenset[OutcomeClass]:
    tree, result = _solve_point(base, param, value, risk, ties)
    return outcome_support(tree, result)


def grid_scan_flip(
    base: GameParameters,
    param: str,
    lo: float,
    hi: float,
    points: int,
    risk: RiskProfile = RISK_NEUTRAL,
    ties: TiePolicy = PAPER_TIES,
) -> list[tuple[float, float]]:
    """Consecutive grid segments whose endpoints have different outcome support."""
    if points < 2:
        raise AnalysisError(f"need at least 2 scan points, got {points}")
    xs = [lo + i * (hi - lo) / (points - 1) for i in range(points)]
    sigs = [_support_at(base, param, x, risk, ties) for x in xs]
    return [
        (xs[i], xs[i + 1]) for i in range(points - 1) if sigs[i] != sigs[i + 1]
    ]


def find_threshold(
    base: GameParameters,
    param: str,
    lo: float,
    hi: float,
    tol: float = 1e-6,
    risk: RiskProfile = RISK_NEUTRAL,
    ties: TiePolicy = PAPER_TIES,
    prescan: int = 64,
) -> ThresholdReport:
    """Bisect to the parameter value where the outcome support flips.

    Requires different outcome support at ``lo`` and ``hi``. A ``prescan``-
    point scan guards against several flips in the bracket: if more than one
    is detected, the first is reported and ``monotone`` is False.
    """
    if tol <= 0:
        raise AnalysisError(f"tol must be positive, got {tol!r}")
    if not lo < hi:
        raise AnalysisError(f"invalid bracket [{lo!r}, {hi!r}]")
    sig_lo = _support_at(base, param, lo, risk, ties)
    sig_hi = _support_at(base, param, hi, risk, ties)
    if sig_lo == sig_hi:
        raise AnalysisError(
            f"outcome classes match at both ends of [{lo!r}, {hi!r}]; nothing to bracket"
        )

    flips = grid_scan_flip(base, param, lo, hi, prescan, risk, ties)
    monotone = len(flips) <= 1
    a, b = flips[0] if flips else (lo, hi)
    sig_a = _support_at(base, param, a, risk, ties)

    while b - a > tol:
        mid = (a + b) / 2.0
        if _support_at(base, param, mid, risk, ties) == sig_a:
            a = mid
        else:
            b = mid
    critical = (a + b) / 2.0

    below = _support_at(base, param, max(lo, critical - tol), risk, ties)
    above = _support_at(base, param, min(hi, critical + tol), risk, ties)
    return ThresholdReport(param, lo, hi, critical, tol, below, above, monotone)


LEVER_PUBLISH_FASTER = "publish-faster"
LEVER_RAISE_DEANON_COST = "raise-deanon-cost"
LEVER_BUILD_TRUST = "build-trust"


@dataclass(frozen=True)
class LeverFinding:
    lever: str
    param: str
    start: float
    end: float
    critical: float | None  # None: no flip inside [start, end]


def _leak_flip(
    base: GameParameters,
    param: str,
    start: float,
    end: float,
    tol: float,
    risk: RiskProfile,
    ties: TiePolicy,
    prescan: int = 64,
) -> float | None:
    """First point between start and end where Alice's leak decision flips."""

    def leaks_at(v: float) -> bool:
        _, result = _solve_point(base, param, v, risk, ties)
        return alice_leaks(result)

    if start == end:
        return None
    xs = [start + i * (end - start) / (prescan - 1) for i in range(prescan)]
    flags = [leaks_at(x) for x in xs]
    segment = next(
        ((xs[i], xs[i + 1]) for i in range(prescan - 1) if flags[i] != flags[i + 1]),
        None,
    )
    if segment is None:
        return None
    a, b = segment
    flag_a = leaks_at(a)
    while abs(b - a) > tol:
        mid = (a + b) / 2.0
        if leaks_at(mid) == flag_a:
            a = mid
        else:
            b = mid
    return (a + b) / 2.0


def lever_report(
    base: GameParameters,
    risk: RiskProfile = RISK_NEUTRAL,
    ties: TiePolicy = PAPER_TIES,
    tol: float = 1e-6,
    block_floor: float = -1000.0,
    pursuit_floor: float = -1000.0,
) -> list[LeverFinding]:
    """Smallest move of each lever that flips Alice from staying quiet to leaking.

    Lever 1 pushes Tom's blocking payoff B toward -inf (publication too fast
    to block), lever 2 pushes the de-anonymisation adjustment I downward
    (unmasking Alice gets pricier), lever 3 raises trust w toward 1. The base
    must currently solve to no leak.
    """
    _, base_result = _solve_point(base, "w", base.w, risk, ties)
    if alice_leaks(base_result):
        raise AnalysisError("base scenario already solves to a leak; no lever needed")

    searches = [
        (LEVER_PUBLISH_FASTER, "B", base.B, block_floor),
        (LEVER_RAISE_DEANON_COST, "I", base.I, pursuit_floor),
        (LEVER_BUILD_TRUST, "w", base.w, 1.0),
    ]
    report = []
    for lever, param, start, end in searches:
        critical = _leak_flip(base, param, start, end, tol, risk, ties)
        report.append(LeverFinding(lever, param, start, end, critical))
    return report


GENERATOR_NAME = "random.Random (Mersenne Twister)"


@dataclass(frozen=True)
class SimulationResult:
    n: int
    seed: int
    generator: str
    terminal_counts: dict[str, int]
    class_frequencies: dict[OutcomeClass, float]
    class_standard_errors: dict[OutcomeClass, float]
    mean_payoffs: dict[Player, float]
    payoff_standard_errors: dict[Player, float]


def simulate(tree: Node, profile: StrategyProfile, n: int, seed: int) -> SimulationResult:
    """Play ``profile`` forward ``n`` times, sampling every chance node.

    Fully determined by (tree, profile, n, seed): playouts run sequentially
    off one seeded generator. Payoffs are reported untransformed.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    from .tree import check_profile

    check_profile(tree, profile)
    rng = random.Random(seed)

    payoff_table = {nid: node.payoffs for nid, node in terminals(tree)}
    label_table = {nid: node.label for nid, node in terminals(tree)}
    counts: Counter[str] = Counter()
    sums = {p: 0.0 for p in (Player.ALICE, Player.TOM)}
    sumsq = {p: 0.0 for p in (Player.ALICE, Player.TOM)}

    for _ in range(n):
        node: Node = tree
        path: tuple[str, ...] = ()
        while not isinstance(node, Terminal):
            if isinstance(node, Decision):
                step = profile[node_id(path)]
                node = dict(node.actions)[step]
            else:
                u = rng.random()
                acc = 0.0
                step = None
                for label, prob, child in node.branches:
                    if prob <= 0.0:
                        continue
                    acc += prob
                    if u < acc:
                        step, node = label, child
                        break
                if step is None:  # float round-off at the top of the CDF
                    step, _, node = [b for b in node.branches if b[1] > 0.0][-1]
            path = path + (step,)
        nid = node_id(path)
        counts[nid] += 1
        for p, v in payoff_table[nid].items():
            sums[p] += v
            sumsq[p] += v * v

    class_freq = {cls: 0.0 for cls in OutcomeClass}
    for nid, k in counts.items():
        try:
            cls = classify_terminal(label_table[nid])
        except ValueError:
            continue  # generic tree without class labels
        class_freq[cls] += k / n
    class_se = {
        cls: math.sqrt(freq * (1.0 - freq) / n) for cls, freq in class_freq.items()
    }

    means = {p: sums[p] / n for p in sums}
    ses = {}
    for p in sums:
        if n > 1 and math.isfinite(means[p]):
            var = max(0.0, (sumsq[p] / n - means[p] ** 2) * n / (n - 1))
            ses[p] = math.sqrt(var / n)
        else:
            ses[p] = float("nan")
    return SimulationResult(
        n=n,
        seed=seed,
        generator=GENERATOR_NAME,
        terminal_counts=dict(sorted(counts.items())),
        class_frequencies=class_freq,
        class_standard_errors=class_se,
        mean_payoffs=means,
        payoff_standard_errors=ses,
    )
