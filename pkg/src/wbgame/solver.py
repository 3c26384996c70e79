"""Subgame-perfect equilibrium by backward induction.

The solver works leaves-to-root: terminal payoffs are passed through the
owner's risk transform, chance nodes take probability-weighted averages
(skipping zero-probability branches so -inf terminals behind dead branches
cannot poison the average), and each decision node picks the action
maximising its owner's value, with exact ties resolved by a per-player
:class:`TiePolicy`.

Risk attitudes use the constant-absolute-risk-aversion family

    u_a(v) = (1 - exp(-a * v)) / a        (a != 0)
    u_0(v) = v                            (exact identity, no limit taken)

``a > 0`` is risk-averse, ``a < 0`` risk-seeking. ``u_a(0) = 0`` for every
``a``, which preserves the root decision's "strictly better than staying
quiet" semantics. ``u_a(-inf) = -inf`` by definition for all ``a``, keeping
negative infinity absorbing and dominated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .tree import (
    NEG_INF,
    PLAYERS,
    Chance,
    Node,
    Player,
    StrategyProfile,
    Terminal,
    check_profile,
    decisions,
    find_node,
    node_id,
    terminal_reach_probabilities,
    validate_tree,
)


class TieRule(Enum):
    ACT_ON_TIE = "act"
    REFRAIN_ON_TIE = "refrain"


@dataclass(frozen=True)
class TiePolicy:
    """Per-player tie rule. Defaults: Tom acts on ties, Alice refrains."""

    alice: TieRule = TieRule.REFRAIN_ON_TIE
    tom: TieRule = TieRule.ACT_ON_TIE

    def rule_for(self, player: Player) -> TieRule:
        return self.alice if player is Player.ALICE else self.tom


@dataclass(frozen=True)
class RiskProfile:
    """Per-player risk coefficient; 0 = neutral, > 0 averse, < 0 seeking."""

    alice: float = 0.0
    tom: float = 0.0

    def coefficient(self, player: Player) -> float:
        return self.alice if player is Player.ALICE else self.tom


RISK_NEUTRAL = RiskProfile()
PAPER_TIES = TiePolicy()


@dataclass(frozen=True)
class SolveResult:
    """Equilibrium profile plus per-node expected values and outcome odds.

    ``node_values`` covers every node (terminals hold their transformed
    payoffs); ``outcome_distribution`` maps every terminal identifier to its
    reach probability under ``profile``, zero entries included.
    """

    profile: StrategyProfile
    node_values: dict[str, dict[Player, float]]
    root_value: dict[Player, float]
    outcome_distribution: dict[str, float]


def risk_transform(v: float, alpha: float) -> float:
    """Apply u_a to one extended-real payoff.

    Saturates to -inf when that is the mathematical limit (a > 0 with v very
    negative); raises OverflowError when the true value would exceed the
    float range upward (a < 0 with v very positive), since +inf is not a
    legal payoff.
    """
    if math.isnan(alpha) or math.isinf(alpha):
        raise ValueError(f"risk coefficient must be finite, got {alpha!r}")
    if alpha == 0.0:
        return v
    if v == NEG_INF:
        return NEG_INF
    try:
        e = math.exp(-alpha * v)
    except OverflowError:
        if alpha > 0:
            return NEG_INF
        raise OverflowError(
            f"risk transform overflows for v={v!r}, alpha={alpha!r}"
        ) from None
    u = (1.0 - e) / alpha
    if u == math.inf or math.isnan(u):
        raise OverflowError(f"risk transform out of range for v={v!r}, alpha={alpha!r}")
    return u


def preferred_on_tie(candidates: list[str], rule: TieRule, active: str | None) -> str:
    """Canonical choice among equally-good actions.

    ActOnTie prefers the flagged active action when it is among the
    candidates; RefrainOnTie prefers the first candidate that is not the
    active action. Either way the fallback is the first-listed candidate.
    """
    if rule is TieRule.ACT_ON_TIE:
        if active is not None and active in candidates:
            return active
        return candidates[0]
    passive = [c for c in candidates if c != active]
    return passive[0] if passive else candidates[0]


def _check_risk(risk: RiskProfile) -> None:
    for alpha in (risk.alice, risk.tom):
        if math.isnan(alpha) or math.isinf(alpha):
            raise ValueError(f"risk coefficient must be finite, got {alpha!r}")


def solve(root: Node, risk: RiskProfile = RISK_NEUTRAL, ties: TiePolicy = PAPER_TIES) -> SolveResult:
    """Backward-induction SPE for a valid tree.

    Deterministic: identical inputs give identical results, including tie
    resolution.
    """
    problems = validate_tree(root)
    if problems:
        raise ValueError("invalid tree: " + "; ".join(problems))
    _check_risk(risk)

    node_values: dict[str, dict[Player, float]] = {}
    profile: StrategyProfile = {}

    def visit(node: Node, path: tuple[str, ...]) -> dict[Player, float]:
        nid = node_id(path)
        if isinstance(node, Terminal):
            vals = {
                p: risk_transform(node.payoffs[p], risk.coefficient(p)) for p in PLAYERS
            }
        elif isinstance(node, Chance):
            children = [
                (prob, visit(child, path + (label,))) for label, prob, child in node.branches
            ]
            vals = {}
            for p in PLAYERS:
                acc = 0.0
                for prob, cv in children:
                    if prob > 0.0:  # 0 * -inf would be NaN
                        acc += prob * cv[p]
                vals[p] = acc
        else:
            acted = [(label, visit(child, path + (label,))) for label, child in node.actions]
            best = max(v[node.owner] for _, v in acted)
            winners = [label for label, v in acted if v[node.owner] == best]
            choice = preferred_on_tie(winners, ties.rule_for(node.owner), node.active_action)
            profile[nid] = choice
            vals = dict(next(v for label, v in acted if label == choice))
        node_values[nid] = vals
        return vals

    root_value = visit(root, ())
    distribution = terminal_reach_probabilities(root, profile)
    return SolveResult(profile, node_values, root_value, distribution)


def _eu_walk(
    node: Node,
    path: tuple[str, ...],
    prob: float,
    profile: StrategyProfile,
    risk: RiskProfile,
    totals: dict[Player, float],
) -> None:
    if prob == 0.0:
        return
    if isinstance(node, Terminal):
        for p in PLAYERS:
            totals[p] += prob * risk_transform(node.payoffs[p], risk.coefficient(p))
    elif isinstance(node, Chance):
        for label, q, child in node.branches:
            _eu_walk(child, path + (label,), prob * q, profile, risk, totals)
    else:
        chosen = profile[node_id(path)]
        for label, child in node.actions:
            if label == chosen:
                _eu_walk(child, path + (label,), prob, profile, risk, totals)


def expected_utility(
    root: Node, profile: StrategyProfile, risk: RiskProfile = RISK_NEUTRAL
) -> dict[Player, float]:
    """Probability-weighted transformed payoff per player under ``profile``.

    Computed by direct summation over root-to-terminal paths, so this is an
    independent route to the same number ``solve`` assigns to the root.
    """
    check_profile(root, profile)
    _check_risk(risk)
    totals = {p: 0.0 for p in PLAYERS}
    _eu_walk(root, (), 1.0, profile, risk, totals)
    return totals


def subgame_expected_utility(
    root: Node, nid: str, profile: StrategyProfile, risk: RiskProfile = RISK_NEUTRAL
) -> dict[Player, float]:
    """Expected utility of the subgame rooted at ``nid`` under ``profile``."""
    node, path = find_node(root, nid)
    totals = {p: 0.0 for p in PLAYERS}
    _eu_walk(node, path, 1.0, profile, risk, totals)
    return totals


def one_shot_violations(
    root: Node,
    profile: StrategyProfile,
    risk: RiskProfile = RISK_NEUTRAL,
    atol: float = 0.0,
) -> list[str]:
    """Single-node deviations that strictly improve the deviating owner.

    Empty for a subgame-perfect profile: in a finite perfect-information tree
    a profile is subgame-perfect exactly when no one-shot deviation helps.
    Both sides of each comparison are recomputed by path summation, so the
    check does not reuse the solver's own arithmetic.
    """
    violations = []
    for nid, node in decisions(root):
        base = subgame_expected_utility(root, nid, profile, risk)[node.owner]
        for label, _ in node.actions:
            if label == profile[nid]:
                continue
            deviated = dict(profile)
            deviated[nid] = label
            dev = subgame_expected_utility(root, nid, deviated, risk)[node.owner]
            if dev > base + atol:
                violations.append(
                    f"{nid or '(root)'}: switching to {label!r} raises "
                    f"{node.owner.value} from {base!r} to {dev!r}"
                )
    return violations
