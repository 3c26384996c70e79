"""Brute-force certification of subgame perfection.

Enumerates every pure strategy profile and keeps those for which no
single-node deviation improves the deviating owner's value in the subgame
rooted at that node -- in a finite perfect-information tree that condition is
exactly subgame perfection. Ties are then filtered with the same tie policy
the solver uses, leaving one canonical profile that must match ``solve``.

Per-subtree expected utilities are tabulated once per call (keyed by the
restriction of a profile to the subtree's decisions), so checking all
profiles of the standard 9-decision tree costs a few thousand lookups rather
than millions of tree walks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .solver import RISK_NEUTRAL, PAPER_TIES, RiskProfile, TiePolicy, preferred_on_tie, risk_transform
from .tree import (
    Chance,
    Decision,
    Node,
    Player,
    StrategyProfile,
    Terminal,
    node_id,
    validate_tree,
)

DEFAULT_PROFILE_CAP = 2**20

_PLAYER_INDEX = {Player.ALICE: 0, Player.TOM: 1}


class EnumerationCapError(ValueError):
    """Raised when a tree has more pure profiles than the configured cap."""


@dataclass
class OracleResult:
    """All subgame-perfect profiles plus the tie-canonical one.

    ``root_values[i]`` belongs to ``spe_profiles[i]``. ``canonical`` is the
    unique profile surviving the tie filter; it is what ``solve`` must match.
    """

    spe_profiles: list[StrategyProfile]
    root_values: list[dict[Player, float]]
    canonical: StrategyProfile
    canonical_root_value: dict[Player, float]


def _decision_list(root: Node) -> list[tuple[str, Decision]]:
    out: list[tuple[str, Decision]] = []

    def walk(node: Node, path: tuple[str, ...]) -> None:
        if isinstance(node, Decision):
            out.append((node_id(path), node))
            for label, child in node.actions:
                walk(child, path + (label,))
        elif isinstance(node, Chance):
            for label, _, child in node.branches:
                walk(child, path + (label,))

    walk(root, ())
    return out


def enumerate_profiles(root: Node, cap: int = DEFAULT_PROFILE_CAP):
    """Yield every pure strategy profile, in deterministic preorder digits.

    Raises EnumerationCapError if the profile count exceeds ``cap``.
    """
    decs = _decision_list(root)
    total = 1
    for _, node in decs:
        total *= len(node.actions)
    if total > cap:
        raise EnumerationCapError(f"{total} profiles exceed the cap of {cap}")
    ids = [nid for nid, _ in decs]
    label_sets = [[label for label, _ in node.actions] for _, node in decs]
    for combo in itertools.product(*label_sets):
        yield dict(zip(ids, combo))


def _build_tables(
    root: Node, risk: RiskProfile
) -> dict[str, tuple[tuple[str, ...], dict[tuple[str, ...], tuple[float, float]]]]:
    """Per node: (decision ids in its subtree, sub-profile -> (alice, tom) EU)."""
    tables: dict[str, tuple[tuple[str, ...], dict[tuple[str, ...], tuple[float, float]]]] = {}

    def walk(node: Node, path: tuple[str, ...]):
        nid = node_id(path)
        if isinstance(node, Terminal):
            value = (
                risk_transform(node.payoffs[Player.ALICE], risk.alice),
                risk_transform(node.payoffs[Player.TOM], risk.tom),
            )
            entry = ((), {(): value})
        elif isinstance(node, Chance):
            kids = [(prob, walk(child, path + (label,))) for label, prob, child in node.branches]
            ids: tuple[str, ...] = tuple(i for _, (kid_ids, _) in kids for i in kid_ids)
            table: dict[tuple[str, ...], tuple[float, float]] = {}
            for rows in itertools.product(*[kid_table.items() for _, (_, kid_table) in kids]):
                key = tuple(k for kid_key, _ in rows for k in kid_key)
                alice = tom = 0.0
                for (prob, _), (_, kid_value) in zip(kids, rows):
                    if prob > 0.0:  # 0 * -inf would be NaN
                        alice += prob * kid_value[0]
                        tom += prob * kid_value[1]
                table[key] = (alice, tom)
            entry = (ids, table)
        else:
            kids = [(label, walk(child, path + (label,))) for label, child in node.actions]
            ids = (nid,) + tuple(i for _, (kid_ids, _) in kids for i in kid_ids)
            table = {}
            for rows in itertools.product(*[kid_table.items() for _, (_, kid_table) in kids]):
                key_rest = tuple(k for kid_key, _ in rows for k in kid_key)
                for idx, (label, _) in enumerate(kids):
                    table[(label,) + key_rest] = rows[idx][1]
            entry = (ids, table)
        tables[nid] = entry
        return entry

    walk(root, ())
    return tables


def brute_force_spe(
    root: Node,
    risk: RiskProfile = RISK_NEUTRAL,
    ties: TiePolicy = PAPER_TIES,
    cap: int = DEFAULT_PROFILE_CAP,
) -> OracleResult:
    """Enumerate profiles and certify subgame perfection by deviation checks."""
    problems = validate_tree(root)
    if problems:
        raise ValueError("invalid tree: " + "; ".join(problems))

    decs = _decision_list(root)
    total = 1
    for _, node in decs:
        total *= len(node.actions)
    if total > cap:
        raise EnumerationCapError(f"{total} profiles exceed the cap of {cap}")

    tables = _build_tables(root, risk)
    ids = [nid for nid, _ in decs]
    index_of = {nid: i for i, nid in enumerate(ids)}
    label_sets = [[label for label, _ in node.actions] for _, node in decs]

    # precompute, per decision node: positions of its subtree ids in a full
    # combo, same for each child, plus the owner's value index
    checks = []
    for nid, node in decs:
        own_ids, own_table = tables[nid]
        own_pos = tuple(index_of[i] for i in own_ids)
        kids = []
        for label, child in node.actions:
            child_id = f"{nid}/{label}" if nid else label
            kid_ids, kid_table = tables[child_id]
            kids.append((label, tuple(index_of[i] for i in kid_ids), kid_table))
        checks.append(
            (nid, _PLAYER_INDEX[node.owner], own_pos, own_table, kids, node.active_action)
        )

    spe_profiles: list[StrategyProfile] = []
    root_values: list[dict[Player, float]] = []
    canonical: list[StrategyProfile] = []
    canonical_values: list[dict[Player, float]] = []
    root_ids, root_table = tables[""]
    root_pos = tuple(index_of[i] for i in root_ids)

    for combo in itertools.product(*label_sets):
        is_spe = True
        is_canonical = True
        for nid, owner_idx, own_pos, own_table, kids, active in checks:
            base = own_table[tuple(combo[i] for i in own_pos)][owner_idx]
            chosen = combo[index_of[nid]]
            best = base
            winners = []
            for label, kid_pos, kid_table in kids:
                val = kid_table[tuple(combo[i] for i in kid_pos)][owner_idx]
                if val > base:
                    is_spe = False
                    break
                if val == best:
                    winners.append(label)
            if not is_spe:
                break
            if len(winners) > 1:
                rule = ties.rule_for(Player.ALICE if owner_idx == 0 else Player.TOM)
                if chosen != preferred_on_tie(winners, rule, active):
                    is_canonical = False
        if not is_spe:
            continue
        profile = dict(zip(ids, combo))
        value_pair = root_table[tuple(combo[i] for i in root_pos)]
        value = {Player.ALICE: value_pair[0], Player.TOM: value_pair[1]}
        spe_profiles.append(profile)
        root_values.append(value)
        if is_canonical:
            canonical.append(profile)
            canonical_values.append(value)

    if len(canonical) != 1:
        raise AssertionError(
            f"tie filtering left {len(canonical)} canonical profiles, expected exactly 1"
        )
    return OracleResult(spe_profiles, root_values, canonical[0], canonical_values[0])
