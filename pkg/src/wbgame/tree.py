"""Generic extensive-form game trees: two strategic players plus chance nodes.

Trees are immutable after construction and all operations here are pure
functions, so trees can be shared freely across threads. Node identifiers are
path strings (action/branch labels joined by "/", root = ""), which stay
stable across refactors of the builders.

Payoffs are extended reals: any finite float, or negative infinity
(``float("-inf")``). Positive infinity and NaN are rejected by validation.
IEEE semantics give exactly the arithmetic we need (-inf + finite = -inf,
-inf < every finite value), with one caveat handled throughout this package:
0 * -inf is NaN, so zero-probability branches are always skipped when
averaging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Union

NEG_INF = float("-inf")

#: absolute tolerance for chance-branch probabilities summing to 1
PROB_SUM_TOL = 1e-9


class Player(Enum):
    ALICE = "alice"
    TOM = "tom"


PLAYERS = (Player.ALICE, Player.TOM)


@dataclass(frozen=True)
class Terminal:
    """Leaf node holding one payoff per player."""

    label: str
    payoffs: dict[Player, float]


@dataclass(frozen=True)
class Decision:
    """Node owned by a strategic player.

    ``actions`` is an ordered tuple of (action label, child). ``active_action``
    optionally flags the "do something" action for tie-breaking; see
    :mod:`wbgame.solver`.
    """

    owner: Player
    label: str
    actions: tuple[tuple[str, "Node"], ...]
    active_action: str | None = None


@dataclass(frozen=True)
class Chance:
    """Node resolved by a known distribution.

    ``branches`` is an ordered tuple of (branch label, probability, child).
    Branch labels participate in node identifiers, so they must be unique
    within a node.
    """

    label: str
    branches: tuple[tuple[str, float, "Node"], ...]


Node = Union[Terminal, Decision, Chance]

#: pure strategy: decision-node identifier -> chosen action label
StrategyProfile = dict[str, str]


def terminal(label: str, alice: float, tom: float) -> Terminal:
    return Terminal(label, {Player.ALICE: alice, Player.TOM: tom})


def decision(
    owner: Player,
    label: str,
    actions: list[tuple[str, Node]] | tuple[tuple[str, Node], ...],
    active: str | None = None,
) -> Decision:
    return Decision(owner, label, tuple(actions), active)


def chance(
    label: str,
    branches: list[tuple[str, float, Node]] | tuple[tuple[str, float, Node], ...],
) -> Chance:
    return Chance(label, tuple(branches))


def node_id(path: tuple[str, ...]) -> str:
    return "/".join(path)


def iter_nodes(root: Node) -> Iterator[tuple[str, Node]]:
    """Yield (identifier, node) pairs in preorder."""

    def walk(node: Node, path: tuple[str, ...]) -> Iterator[tuple[str, Node]]:
        yield node_id(path), node
        if isinstance(node, Decision):
            for label, child in node.actions:
                yield from walk(child, path + (label,))
        elif isinstance(node, Chance):
            for label, _, child in node.branches:
                yield from walk(child, path + (label,))

    yield from walk(root, ())


def decisions(root: Node) -> list[tuple[str, Decision]]:
    return [(nid, n) for nid, n in iter_nodes(root) if isinstance(n, Decision)]


def terminals(root: Node) -> list[tuple[str, Terminal]]:
    return [(nid, n) for nid, n in iter_nodes(root) if isinstance(n, Terminal)]


def find_node(root: Node, target: str) -> tuple[Node, tuple[str, ...]]:
    """Return (node, path) for ``target``; raises KeyError if absent."""
    for nid, node in iter_nodes(root):
        if nid == target:
            return node, tuple(target.split("/")) if target else ()
    raise KeyError(f"no node with identifier {target!r}")


class NodeCounts(NamedTuple):
    decision: int
    chance: int
    terminal: int


def count_nodes(root: Node) -> NodeCounts:
    """Exact node counts by kind."""
    dec = cha = ter = 0
    for _, node in iter_nodes(root):
        if isinstance(node, Decision):
            dec += 1
        elif isinstance(node, Chance):
            cha += 1
        else:
            ter += 1
    return NodeCounts(dec, cha, ter)


def _payoff_ok(v: float) -> bool:
    # finite or -inf; +inf and NaN are not legal payoffs
    return not math.isnan(v) and v != math.inf


def validate_tree(root: Node) -> list[str]:
    """Collect every structural violation; an empty list means the tree is valid.

    Checks: chance probabilities lie in [0, 1] and sum to 1 (within
    PROB_SUM_TOL), decision nodes have >= 2 uniquely-labelled actions,
    terminals carry a payoff for both players with no +inf/NaN, labels on
    outgoing edges are unique and non-empty, and no node object appears twice
    (which would make a node have two parents, or a cycle).
    """
    violations: list[str] = []
    seen: set[int] = set()

    def walk(node: Node, path: tuple[str, ...]) -> None:
        nid = node_id(path) or "(root)"
        if id(node) in seen:
            violations.append(f"{nid}: node object reachable by more than one path")
            return
        seen.add(id(node))

        if isinstance(node, Terminal):
            for p in PLAYERS:
                if p not in node.payoffs:
                    violations.append(f"{nid}: terminal is missing a payoff for {p.value}")
                elif not _payoff_ok(node.payoffs[p]):
                    violations.append(
                        f"{nid}: payoff for {p.value} is {node.payoffs[p]!r} "
                        "(must be finite or -inf)"
                    )
            return

        if isinstance(node, Decision):
            if len(node.actions) < 2:
                violations.append(f"{nid}: decision node has {len(node.actions)} action(s), needs >= 2")
            labels = [label for label, _ in node.actions]
            if len(set(labels)) != len(labels):
                violations.append(f"{nid}: duplicate action labels {labels}")
            if any(not label for label in labels):
                violations.append(f"{nid}: empty action label")
            if node.active_action is not None and node.active_action not in labels:
                violations.append(
                    f"{nid}: active_action {node.active_action!r} is not one of {labels}"
                )
            for label, child in node.actions:
                walk(child, path + (label,))
            return

        # Chance
        labels = [label for label, _, _ in node.branches]
        if len(set(labels)) != len(labels):
            violations.append(f"{nid}: duplicate branch labels {labels}")
        if any(not label for label in labels):
            violations.append(f"{nid}: empty branch label")
        total = 0.0
        for label, prob, _ in node.branches:
            if math.isnan(prob) or prob < 0.0 or prob > 1.0:
                violations.append(f"{nid}: branch {label!r} probability {prob!r} outside [0, 1]")
            else:
                total += prob
        if abs(total - 1.0) > PROB_SUM_TOL:
            violations.append(f"{nid}: probabilities sum to {total!r}, not 1")
        for label, _, child in node.branches:
            walk(child, path + (label,))

    walk(root, ())
    return violations


def check_profile(root: Node, profile: StrategyProfile) -> None:
    """Raise ValueError unless ``profile``'s domain is exactly the decision nodes."""
    wanted: dict[str, Decision] = dict(decisions(root))
    extra = set(profile) - set(wanted)
    missing = set(wanted) - set(profile)
    if extra or missing:
        raise ValueError(
            f"profile does not match tree (missing {sorted(missing)}, extra {sorted(extra)})"
        )
    for nid, node in wanted.items():
        labels = {label for label, _ in node.actions}
        if profile[nid] not in labels:
            raise ValueError(f"profile chooses unknown action {profile[nid]!r} at {nid!r}")


def terminal_reach_probabilities(root: Node, profile: StrategyProfile) -> dict[str, float]:
    """Probability of reaching each terminal under ``profile``, zero entries included."""
    check_profile(root, profile)
    out: dict[str, float] = {}

    def walk(node: Node, path: tuple[str, ...], prob: float) -> None:
        if isinstance(node, Terminal):
            out[node_id(path)] = prob
        elif isinstance(node, Decision):
            chosen = profile[node_id(path)]
            for label, child in node.actions:
                walk(child, path + (label,), prob if label == chosen else 0.0)
        else:
            for label, p, child in node.branches:
                walk(child, path + (label,), prob * p)

    walk(root, (), 1.0)
    return out


def reachable_probability(root: Node, profile: StrategyProfile, target: str) -> float:
    """Product of chance probabilities along the path to ``target``.

    Zero if any decision on the path contradicts the profile. Raises KeyError
    for an unknown identifier.
    """
    check_profile(root, profile)
    find_node(root, target)  # raises KeyError if absent

    prob = 1.0
    node: Node = root
    path: tuple[str, ...] = ()
    while node_id(path) != target:
        remaining = target[len(node_id(path)):].lstrip("/")
        step = remaining.split("/")[0]
        if isinstance(node, Decision):
            if profile[node_id(path)] != step:
                prob = 0.0
            node = dict(node.actions)[step]
        else:
            assert isinstance(node, Chance)
            for label, p, child in node.branches:
                if label == step:
                    prob *= p
                    node = child
                    break
        path = path + (step,)
    return prob
