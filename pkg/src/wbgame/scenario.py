"""Scenario files, result serialization, and DOT export.

Scenario grammar (``.scn``): one ``key = value`` per line, ``#`` starts a
comment, blank lines are ignored. The 19 numeric keys are required::

    w x y z            probabilities (x + y <= 1)
    a b c d e f g      Alice's payoffs
    B C D E F G        Tom's payoffs
    H I                attempt-cost adjustments (warn when positive)

Optional keys: ``name`` (free text), ``variant`` (standard |
duncan-to-harry | alice-to-harry), ``risk_alice`` / ``risk_tom`` (finite
reals, default 0), ``tie_alice`` / ``tie_tom`` (act | refrain, defaults
refrain / act), ``expected_outcome`` (an outcome-class name asserting the
modal class of the solved game, for golden tests).

The token ``-inf`` is legal only for ``B``. Unknown and duplicate keys are
errors. ``parse_scenario(render_scenario(s)) == s`` for every valid ``s``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .analysis import OutcomeClass
from .model import GameParameters, Variant
from .solver import RiskProfile, SolveResult, TiePolicy, TieRule
from .tree import NEG_INF, Chance, Decision, Node, Player, iter_nodes, terminals
from . import model


NUMERIC_KEYS = (
    "w", "x", "y", "z",
    "a", "b", "c", "d", "e", "f", "g",
    "B", "C", "D", "E", "F", "G", "H", "I",
)
OPTION_KEYS = (
    "name", "variant", "risk_alice", "risk_tom", "tie_alice", "tie_tom",
    "expected_outcome",
)


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class Scenario:
    name: str
    parameters: GameParameters
    risk: RiskProfile
    ties: TiePolicy
    expected_outcome: OutcomeClass | None
    warnings: tuple[str, ...]


_TIE_TOKENS = {"act": TieRule.ACT_ON_TIE, "refrain": TieRule.REFRAIN_ON_TIE}


def _parse_number(key: str, raw: str, line_no: int, column: int) -> float:
    if raw == "-inf":
        if key != "B":
            raise ScenarioError(f"-inf is only legal for B, not {key}", line_no, column)
        return NEG_INF
    try:
        value = float(raw)
    except ValueError:
        raise ScenarioError(f"cannot parse number {raw!r} for {key}", line_no, column) from None
    if math.isnan(value) or math.isinf(value):
        raise ScenarioError(f"{key} = {raw!r} is not a finite number", line_no, column)
    return value


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate one scenario file."""
    seen: dict[str, tuple[str, int, int]] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "=" not in line:
            raise ScenarioError("expected 'key = value'", line_no, 1)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        value = value_part.strip()
        column = raw_line.index("=") + 2
        if key not in NUMERIC_KEYS and key not in OPTION_KEYS:
            raise ScenarioError(f"unknown key {key!r}", line_no, 1)
        if key in seen:
            raise ScenarioError(f"duplicate key {key!r}", line_no, 1)
        if not value:
            raise ScenarioError(f"missing value for {key!r}", line_no, column)
        seen[key] = (value, line_no, column)

    missing = [k for k in NUMERIC_KEYS if k not in seen]
    if missing:
        raise ScenarioError(f"missing required keys: {', '.join(missing)}")

    numbers = {
        key: _parse_number(key, *seen[key]) for key in NUMERIC_KEYS
    }

    variant = Variant.STANDARD
    if "variant" in seen:
        raw, line_no, column = seen["variant"]
        try:
            variant = Variant(raw)
        except ValueError:
            options = ", ".join(v.value for v in Variant)
            raise ScenarioError(
                f"unknown variant {raw!r} (options: {options})", line_no, column
            ) from None

    risk_values = {}
    for field in ("risk_alice", "risk_tom"):
        risk_values[field] = 0.0
        if field in seen:
            raw, line_no, column = seen[field]
            try:
                value = float(raw)
            except ValueError:
                raise ScenarioError(f"cannot parse number {raw!r} for {field}", line_no, column) from None
            if not math.isfinite(value):
                raise ScenarioError(f"{field} must be finite", line_no, column)
            risk_values[field] = value

    ties = {"tie_alice": TieRule.REFRAIN_ON_TIE, "tie_tom": TieRule.ACT_ON_TIE}
    for field in ("tie_alice", "tie_tom"):
        if field in seen:
            raw, line_no, column = seen[field]
            if raw not in _TIE_TOKENS:
                raise ScenarioError(f"{field} must be 'act' or 'refrain', got {raw!r}", line_no, column)
            ties[field] = _TIE_TOKENS[raw]

    expected = None
    if "expected_outcome" in seen:
        raw, line_no, column = seen["expected_outcome"]
        try:
            expected = OutcomeClass(raw)
        except ValueError:
            options = ", ".join(c.value for c in OutcomeClass)
            raise ScenarioError(
                f"unknown outcome class {raw!r} (options: {options})", line_no, column
            ) from None

    name = seen["name"][0] if "name" in seen else ""

    parameters = GameParameters(variant=variant, **numbers)
    problems = model.validate_parameters(parameters)
    if problems:
        raise ScenarioError("; ".join(problems))

    return Scenario(
        name=name,
        parameters=parameters,
        risk=RiskProfile(alice=risk_values["risk_alice"], tom=risk_values["risk_tom"]),
        ties=TiePolicy(alice=ties["tie_alice"], tom=ties["tie_tom"]),
        expected_outcome=expected,
        warnings=tuple(model.parameter_warnings(parameters)),
    )


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _format_number(v: float) -> str:
    if v == NEG_INF:
        return "-inf"
    return repr(v)


def render_scenario(s: Scenario) -> str:
    """Canonical text for a scenario; parse(render(s)) == s."""
    lines = []
    if s.name:
        lines.append(f"name = {s.name}")
    for key in NUMERIC_KEYS:
        lines.append(f"{key} = {_format_number(getattr(s.parameters, key))}")
    if s.parameters.variant is not Variant.STANDARD:
        lines.append(f"variant = {s.parameters.variant.value}")
    if s.risk.alice != 0.0:
        lines.append(f"risk_alice = {_format_number(s.risk.alice)}")
    if s.risk.tom != 0.0:
        lines.append(f"risk_tom = {_format_number(s.risk.tom)}")
    if s.ties.alice is not TieRule.REFRAIN_ON_TIE:
        lines.append(f"tie_alice = {s.ties.alice.value}")
    if s.ties.tom is not TieRule.ACT_ON_TIE:
        lines.append(f"tie_tom = {s.ties.tom.value}")
    if s.expected_outcome is not None:
        lines.append(f"expected_outcome = {s.expected_outcome.value}")
    return "\n".join(lines) + "\n"


# --- result rendering -------------------------------------------------------


def _json_ready(value):
    """Recursively make a structure JSON-safe; -inf becomes the string "-inf"."""
    if isinstance(value, float):
        return "-inf" if value == NEG_INF else value
    if isinstance(value, dict):
        return {
            (k.value if isinstance(k, (Player, OutcomeClass)) else k): _json_ready(v)
            for k, v in value.items()
        }
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return value


def _terminal_rows(tree: Node, result: SolveResult) -> list[tuple[str, str, float, float, float]]:
    rows = []
    for nid, node in terminals(tree):
        rows.append(
            (
                nid,
                node.label,
                result.outcome_distribution[nid],
                node.payoffs[Player.ALICE],
                node.payoffs[Player.TOM],
            )
        )
    return rows


def render_result(
    result: SolveResult,
    tree: Node,
    fmt: str = "text",
    meta: dict | None = None,
) -> str:
    """Serialize a solve result as text, json, or csv (deterministic)."""
    if fmt == "json":
        payload: dict = {}
        if meta:
            payload["meta"] = _json_ready(meta)
        payload["root_value"] = _json_ready(result.root_value)
        payload["profile"] = dict(result.profile)
        payload["node_values"] = _json_ready(result.node_values)
        payload["outcome_distribution"] = _json_ready(result.outcome_distribution)
        payload["outcomes"] = [
            {
                "terminal": nid,
                "class": label,
                "probability": _json_ready(prob),
                "alice": _json_ready(alice),
                "tom": _json_ready(tom),
            }
            for nid, label, prob, alice, tom in _terminal_rows(tree, result)
        ]
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"

    if fmt == "csv":
        lines = []
        if meta:
            for k, v in meta.items():
                lines.append(f"# {k}: {v}")
        lines.append("terminal,class,probability,alice_payoff,tom_payoff")
        for nid, label, prob, alice, tom in _terminal_rows(tree, result):
            lines.append(f"{nid},{label},{prob!r},{_format_number(alice)},{_format_number(tom)}")
        return "\n".join(lines) + "\n"

    if fmt == "text":
        return _render_text(result, tree, meta)

    raise ValueError(f"unknown format {fmt!r} (expected text, json, or csv)")


_WALK_PHRASES = {
    ("", "leak"): "alice leaks",
    ("", "stay"): "alice stays quiet",
    ("leak/trust", "block"): "tom blocks duncan before the broadcast",
    ("leak/trust", "proceed"): "tom lets duncan proceed",
    ("leak/trust/proceed", "censor"): "tom attempts censorship",
    ("leak/trust/proceed", "hold"): "tom holds (no censorship attempt)",
}


def _decision_phrase(nid: str, action: str) -> str:
    phrase = _WALK_PHRASES.get((nid, action))
    if phrase:
        return phrase
    if action == "pursue":
        return "tom pursues de-anonymisation"
    if action == "drop":
        return "tom drops the pursuit"
    return f"{nid or '(root)'} -> {action}"


def _render_text(result: SolveResult, tree: Node, meta: dict | None) -> str:
    lines = []
    if meta:
        for k, v in meta.items():
            lines.append(f"# {k}: {v}")
    ra = result.root_value[Player.ALICE]
    rt = result.root_value[Player.TOM]
    lines.append(f"root value: alice={_format_number(ra)} tom={_format_number(rt)}")
    lines.append("equilibrium decisions:")
    for nid, action in sorted(result.profile.items()):
        lines.append(f"  {nid or '(root)'}: {action}  ({_decision_phrase(nid, action)})")
    lines.append("realized outcomes:")
    any_reached = False
    for nid, label, prob, alice, tom in _terminal_rows(tree, result):
        if prob <= 0.0:
            continue
        any_reached = True
        extra = ""
        if "harry-strong" in nid:
            extra = "  [harry strong]"
        elif "harry-weak" in nid:
            extra = "  [harry weak]"
        lines.append(
            f"  {label}: p={prob!r} alice={_format_number(alice)} "
            f"tom={_format_number(tom)}{extra}  ({nid})"
        )
    if not any_reached:
        lines.append("  (none)")
    return "\n".join(lines) + "\n"


# --- DOT export --------------------------------------------------------------

_OUTCOME_LETTERS = {
    model.NO_LEAK: ("0", "0"),
    model.NO_TRUST: ("a", "0"),
    model.BLOCKED: ("b", "B"),
    model.CENSORED_JAILED: ("c", "C"),
    model.CENSORED_ANONYMOUS: ("d", "D"),
    model.UNCENSORED_ANONYMOUS: ("e", "E"),
    model.UNCENSORED_IMPUNITY: ("f", "F"),
    model.UNCENSORED_JAILED: ("g", "G"),
}


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(tree: Node, result: SolveResult | None = None) -> str:
    """DOT digraph of the tree; solved decisions drawn bold when given.

    Decisions are boxes, chance nodes ellipses, terminals notes labelled with
    their payoffs (and outcome letters when the terminal is one of the
    whistleblowing outcomes).
    """
    lines = ["digraph game {", "  rankdir=LR;"]
    ids: dict[str, str] = {}
    for i, (nid, _) in enumerate(iter_nodes(tree)):
        ids[nid] = f"n{i}"

    for nid, node in iter_nodes(tree):
        name = ids[nid]
        if isinstance(node, Decision):
            lines.append(
                f'  {name} [shape=box, label="{_dot_escape(node.label)}"];'
            )
        elif isinstance(node, Chance):
            lines.append(
                f'  {name} [shape=ellipse, label="{_dot_escape(node.label)}"];'
            )
        else:
            alice = _format_number(node.payoffs[Player.ALICE])
            tom = _format_number(node.payoffs[Player.TOM])
            letters = _OUTCOME_LETTERS.get(node.label)
            tag = f" [{letters[0]}, {letters[1]}]" if letters else ""
            lines.append(
                f'  {name} [shape=note, label="{_dot_escape(node.label)}{tag}\\n'
                f'alice={alice} tom={tom}"];'
            )

    for nid, node in iter_nodes(tree):
        if isinstance(node, Decision):
            chosen = result.profile.get(nid) if result else None
            for label, child in node.actions:
                child_id = f"{nid}/{label}" if nid else label
                style = ' penwidth=2.5 color="red"' if label == chosen else ""
                lines.append(
                    f'  {ids[nid]} -> {ids[child_id]} [label="{_dot_escape(label)}"{style}];'
                )
        elif isinstance(node, Chance):
            for label, prob, child in node.branches:
                child_id = f"{nid}/{label}" if nid else label
                lines.append(
                    f'  {ids[nid]} -> {ids[child_id]} '
                    f'[label="{_dot_escape(label)} {prob!r}", style=dashed];'
                )
    lines.append("}")
    return "\n".join(lines) + "\n"
