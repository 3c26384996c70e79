"""Command-line interface.

Exit codes: 0 success, 2 scenario/option validation failure, 3 analysis
failure (e.g. a threshold bracket whose ends share an outcome class),
4 solver/oracle disagreement from ``validate``.

Every output embeds the effective parameter set and tool version in a
metadata header (a ``meta`` object in json, ``# key: value`` lines
otherwise); ``--no-meta`` suppresses the header entirely, which also removes
the only timestamp, making repeated runs byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone

from . import __version__, analysis, model, oracle, scenario
from .analysis import AnalysisError, OutcomeClass
from .model import build_game, prune_zero
from .solver import solve
from .tree import Player
from .scenario import ScenarioError, Scenario

OK, USAGE_ERROR, ANALYSIS_ERROR, DISAGREEMENT = 0, 2, 3, 4


def _fmt(v: float) -> str:
    return scenario._format_number(v)


def _meta(args, scn: Scenario, command: str, extra: dict | None = None) -> dict | None:
    if args.no_meta:
        return None
    meta = {
        "tool": f"wbgame {__version__}",
        "command": command,
        "generated": datetime.now(timezone.utc).isoformat(),
        "scenario": scn.name or args.scenario,
    }
    params = {k: _fmt(getattr(scn.parameters, k)) for k in scenario.NUMERIC_KEYS}
    params["variant"] = scn.parameters.variant.value
    meta["parameters"] = " ".join(f"{k}={v}" for k, v in params.items())
    meta["risk"] = f"alice={_fmt(scn.risk.alice)} tom={_fmt(scn.risk.tom)}"
    meta["ties"] = f"alice={scn.ties.alice.value} tom={scn.ties.tom.value}"
    if extra:
        meta.update(extra)
    return meta


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args) -> Scenario:
    scn = scenario.load_scenario(args.scenario)
    for warning in scn.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return scn


def _meta_lines(meta: dict | None) -> str:
    if not meta:
        return ""
    return "".join(f"# {k}: {v}\n" for k, v in meta.items())


def cmd_solve(args) -> int:
    scn = _load(args)
    tree = build_game(scn.parameters)
    result = solve(tree, scn.risk, scn.ties)
    text = scenario.render_result(result, tree, args.format, _meta(args, scn, "solve"))
    _emit(text, args.out)
    return OK


def cmd_sweep(args) -> int:
    scn = _load(args)
    if args.steps < 2:
        print("error: --steps must be >= 2", file=sys.stderr)
        return USAGE_ERROR
    grid = [
        args.start + i * (args.stop - args.start) / (args.steps - 1)
        for i in range(args.steps)
    ]
    try:
        table = analysis.sweep(scn.parameters, args.param, grid, scn.risk, scn.ties)
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    lines = [_meta_lines(_meta(args, scn, "sweep", {"param": args.param}))]
    classes = [c.value for c in OutcomeClass]
    lines.append(
        f"{args.param},valid,error,alice_leaks,root_alice,root_tom,"
        + ",".join(f"p_{c}" for c in classes)
        + "\n"
    )
    for row in table.rows:
        if not row.valid:
            err = (row.error or "").replace(",", ";")
            lines.append(f"{row.value!r},false,{err},,,," + "," * (len(classes) - 1) + "\n")
            continue
        probs = ",".join(repr(row.class_probabilities[c]) for c in OutcomeClass)
        lines.append(
            f"{row.value!r},true,,{str(row.alice_leaks).lower()},"
            f"{_fmt(row.root_alice)},{_fmt(row.root_tom)},{probs}\n"
        )
    _emit("".join(lines), args.out)
    return OK


def cmd_threshold(args) -> int:
    scn = _load(args)
    if not args.lo < args.hi:
        print(f"error: invalid bracket [--lo {args.lo}, --hi {args.hi}]", file=sys.stderr)
        return USAGE_ERROR
    if args.tol <= 0:
        print(f"error: --tol must be positive, got {args.tol}", file=sys.stderr)
        return USAGE_ERROR
    try:
        report = analysis.find_threshold(
            scn.parameters, args.param, args.lo, args.hi, args.tol, scn.risk, scn.ties
        )
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ANALYSIS_ERROR
    lines = [_meta_lines(_meta(args, scn, "threshold"))]
    lines.append(f"param: {report.param}\n")
    lines.append(f"bracket: [{report.lo!r}, {report.hi!r}]\n")
    lines.append(f"critical: {report.critical!r} +/- {report.tol!r}\n")
    lines.append(f"below: {', '.join(sorted(c.value for c in report.below_classes))}\n")
    lines.append(f"above: {', '.join(sorted(c.value for c in report.above_classes))}\n")
    lines.append(f"single_flip: {str(report.monotone).lower()}\n")
    _emit("".join(lines), args.out)
    return OK


def cmd_levers(args) -> int:
    scn = _load(args)
    try:
        findings = analysis.lever_report(scn.parameters, scn.risk, scn.ties, args.tol)
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ANALYSIS_ERROR
    lines = [_meta_lines(_meta(args, scn, "levers"))]
    lines.append("lever,param,search_from,search_to,critical\n")
    for f in findings:
        crit = repr(f.critical) if f.critical is not None else "no flip in range"
        lines.append(f"{f.lever},{f.param},{f.start!r},{f.end!r},{crit}\n")
    _emit("".join(lines), args.out)
    return OK


def cmd_simulate(args) -> int:
    scn = _load(args)
    if args.n < 1:
        print("error: --n must be >= 1", file=sys.stderr)
        return USAGE_ERROR
    tree = build_game(scn.parameters)
    result = solve(tree, scn.risk, scn.ties)
    sim = analysis.simulate(tree, result.profile, args.n, args.seed)
    meta = _meta(
        args, scn, "simulate",
        {"n": args.n, "seed": args.seed, "generator": sim.generator},
    )
    lines = [_meta_lines(meta)]
    lines.append(f"playouts: {sim.n}\n")
    lines.append("class,frequency,stderr,solved_probability\n")
    solved = analysis.class_distribution(tree, result)
    for cls in OutcomeClass:
        lines.append(
            f"{cls.value},{sim.class_frequencies[cls]!r},"
            f"{sim.class_standard_errors[cls]!r},{solved[cls]!r}\n"
        )
    lines.append("player,mean_payoff,stderr,solved_value\n")
    for player in (Player.ALICE, Player.TOM):
        lines.append(
            f"{player.value},{sim.mean_payoffs[player]!r},"
            f"{sim.payoff_standard_errors[player]!r},{_fmt(result.root_value[player])}\n"
        )
    _emit("".join(lines), args.out)
    return OK


def cmd_validate(args) -> int:
    scn = _load(args)
    tree = build_game(scn.parameters)
    result = solve(tree, scn.risk, scn.ties)
    certified = oracle.brute_force_spe(tree, scn.risk, scn.ties)
    profile_ok = certified.canonical == result.profile
    value_ok = all(
        (
            certified.canonical_root_value[p] == result.root_value[p]
            if certified.canonical_root_value[p] == float("-inf")
            else abs(certified.canonical_root_value[p] - result.root_value[p]) <= 1e-9
        )
        for p in (Player.ALICE, Player.TOM)
    )
    if not (profile_ok and value_ok):
        print("solver/oracle disagreement:", file=sys.stderr)
        print(f"  solver profile: {result.profile}", file=sys.stderr)
        print(f"  oracle profile: {certified.canonical}", file=sys.stderr)
        print(f"  solver value:   {result.root_value}", file=sys.stderr)
        print(f"  oracle value:   {certified.canonical_root_value}", file=sys.stderr)
        return DISAGREEMENT
    lines = [_meta_lines(_meta(args, scn, "validate"))]
    lines.append(
        f"oracle agrees: canonical profile matches across "
        f"{len(certified.spe_profiles)} subgame-perfect profile(s)\n"
    )
    lines.append(
        f"root value: alice={_fmt(result.root_value[Player.ALICE])} "
        f"tom={_fmt(result.root_value[Player.TOM])}\n"
    )
    _emit("".join(lines), args.out)
    return OK


def cmd_export_tree(args) -> int:
    scn = _load(args)
    tree = build_game(scn.parameters)
    result = solve(tree, scn.risk, scn.ties) if args.with_solution else None
    if args.pruned:
        tree = prune_zero(tree)
        if result is not None:
            result = solve(tree, scn.risk, scn.ties)
    text = scenario.export_dot(tree, result)
    meta = _meta(args, scn, "export-tree")
    if meta:
        header = "".join(f"// {k}: {v}\n" for k, v in meta.items())
        text = header + text
    _emit(text, args.out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wbgame",
        description="Solve and analyse the sequential-move whistleblowing game.",
    )
    parser.add_argument("--version", action="version", version=f"wbgame {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="path to a .scn scenario file")
        p.add_argument("--out", help="write output to this path instead of stdout")
        p.add_argument(
            "--no-meta", action="store_true",
            help="suppress the metadata header (makes output byte-reproducible)",
        )

    p = sub.add_parser("solve", help="solve the scenario and print the equilibrium")
    common(p)
    p.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="re-solve along a parameter grid")
    common(p)
    p.add_argument("--param", required=True, help="parameter name (w x y z a..g B..G H I)")
    p.add_argument("--from", dest="start", type=float, required=True, help="grid start")
    p.add_argument("--to", dest="stop", type=float, required=True, help="grid end")
    p.add_argument("--steps", type=int, required=True, help="number of grid points (>= 2)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", help="bisect to an equilibrium flip point")
    common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser(
        "levers", help="minimal change per intervention lever that makes alice leak"
    )
    common(p)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_levers)

    p = sub.add_parser("simulate", help="Monte Carlo playouts of the solved strategy")
    common(p)
    p.add_argument("--n", type=int, required=True, help="number of playouts")
    p.add_argument("--seed", type=int, required=True, help="generator seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="check the solver against brute-force enumeration")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("export-tree", help="emit the game tree as DOT")
    common(p)
    p.add_argument("--pruned", action="store_true", help="drop zero-probability branches")
    p.add_argument("--with-solution", action="store_true", help="highlight chosen actions")
    p.set_defaults(func=cmd_export_tree)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad options, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ANALYSIS_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
