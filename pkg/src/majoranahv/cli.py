"""Command-line front end.

Exit codes: ``run`` 2 on a bad scenario and 3 when the branch guard trips;
``compare`` 1 on any mismatch; ``hierarchy`` 1 when the table deviates from
the expected one; ``calibrate`` 1 without a unique convention.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import Scenario, ScenarioError, dumps, parse_scenario, round_sig
from .evaluate import ENGINE_NAMES, EvaluationGuardError, compare, evaluate
from .scenarios import (
    ORACLES,
    CalibrationError,
    builtin_names,
    calibrate,
    get_builtin,
    hierarchy_suite,
    render_calibration,
)

CLASSES = ("fusion", "braiding", "joint")
EXPECTED_HIERARCHY = {
    "hv1": {"fusion": True, "braiding": False, "joint": False},
    "hv2": {"fusion": True, "braiding": True, "joint": False},
    "stab": {"fusion": True, "braiding": True, "joint": True},
    "quantum": {"fusion": True, "braiding": True, "joint": True},
}


def load_scenario(ref: str) -> tuple[Scenario, str]:
    """A built-in name or a scenario file path; returns the scenario and its postselect prefix."""
    if ref in builtin_names():
        b = get_builtin(ref)
        return b.scenario, b.postselect
    path = Path(ref)
    if not path.exists():
        # also covers reserved names
        get_builtin(ref)
    return parse_scenario(path.read_text(), path.stem), ""


def _emit(doc, out: str | None) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _mode(args) -> str:
    return "sampled" if args.shots is not None else "exact"


def cmd_run(args) -> int:
    try:
        scenario, _ = load_scenario(args.scenario)
    except (ScenarioError, KeyError, NotImplementedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        dist = evaluate(args.engine, scenario, _mode(args), args.shots or 0, args.seed)
    except EvaluationGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    doc = dist.to_json()
    doc["mode"] = _mode(args)
    if args.shots is not None:
        doc["shots"] = args.shots
        doc["seed"] = args.seed
    _emit(doc, args.out)
    return 0


def _markdown_tv(report) -> str:
    names = report.engines
    lines = ["| | " + " | ".join(names) + " |", "|---" * (len(names) + 1) + "|"]
    for i, a in enumerate(names):
        lines.append(f"| {a} | " + " | ".join(f"{round_sig(x):g}" for x in report.tv_matrix[i]) + " |")
    for pair, ok in report.verdicts.items():
        lines.append(f"\n{pair}: {'match' if ok else 'mismatch'}")
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    try:
        scenario, post = load_scenario(args.scenario)
    except (ScenarioError, KeyError, NotImplementedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    bad = [e for e in engines if e not in ENGINE_NAMES]
    if bad or len(engines) < 2:
        print(f"error: need two or more engines from {', '.join(ENGINE_NAMES)}", file=sys.stderr)
        return 2
    if args.postselect is not None:
        post = args.postselect
    try:
        report = compare(
            scenario, engines, _mode(args), args.tol, shots=args.shots or 0, seed=args.seed, postselect=post
        )
    except EvaluationGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if args.out:
        _emit(report.to_json(), args.out)
        sys.stdout.write(_markdown_tv(report))
    else:
        _emit(report.to_json(), None)
    return 0 if report.all_match else 1


def hierarchy(tol: float | None = None) -> dict:
    """Verdict per engine and test class against the reference engine.

    Each engine is compared with quantum; quantum itself is compared with stab.
    """
    suite = hierarchy_suite()
    table: dict = {}
    for engine in EXPECTED_HIERARCHY:
        ref = "stab" if engine == "quantum" else "quantum"
        row = {}
        for cls in CLASSES:
            cells = []
            for b in suite[cls]:
                report = compare(b.scenario, [engine, ref], "exact", tol, postselect=b.postselect)
                cells.append({"scenario": b.name, "tv": round_sig(report.tv(engine, ref)), "match": report.all_match})
            row[cls] = {"match": all(c["match"] for c in cells), "reference": ref, "scenarios": cells}
        table[engine] = row
    return table


def render_hierarchy(table: dict) -> str:
    lines = ["| engine | " + " | ".join(CLASSES) + " |", "|---" * (len(CLASSES) + 1) + "|"]
    for engine, row in table.items():
        marks = ["✓" if row[c]["match"] else "✗" for c in CLASSES]
        lines.append(f"| {engine} | " + " | ".join(marks) + " |")
    return "\n".join(lines) + "\n"


def hierarchy_diff(table: dict) -> list[str]:
    diffs = []
    for engine, expected in EXPECTED_HIERARCHY.items():
        for cls, want in expected.items():
            got = table[engine][cls]["match"]
            if got != want:
                worst = max(table[engine][cls]["scenarios"], key=lambda c: c["tv"])
                diffs.append(
                    f"{engine}/{cls}: expected {'match' if want else 'mismatch'}, got "
                    f"{'match' if got else 'mismatch'} (largest TV {worst['tv']} on {worst['scenario']})"
                )
    return diffs


def cmd_hierarchy(args) -> int:
    table = hierarchy(args.tol)
    sys.stdout.write(render_hierarchy(table))
    diffs = hierarchy_diff(table)
    doc = {"tol": args.tol, "table": table, "expected": EXPECTED_HIERARCHY, "matches_expected": not diffs}
    if args.out:
        _emit(doc, args.out)
    for d in diffs:
        print(d, file=sys.stderr)
    return 1 if diffs else 0


def cmd_calibrate(args) -> int:
    try:
        result = calibrate(args.oracle)
    except CalibrationError as exc:
        sys.stdout.write(render_calibration(exc.table, args.oracle))
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render_calibration(result))
    if args.out:
        doc = result.to_json()
        for row in doc["table"]:
            row["tv"] = round_sig(row["tv"])
        _emit(doc, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majoranahv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def evaluation_flags(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--exact", action="store_true", help="enumerate every branch (default)")
        group.add_argument("--shots", type=int, help="sample this many trajectories instead")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write JSON here instead of standard output")

    run = sub.add_parser("run", help="evaluate one scenario on one engine")
    run.add_argument("scenario", help="built-in name or scenario file")
    run.add_argument("--engine", choices=ENGINE_NAMES, default="quantum")
    evaluation_flags(run)
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="TV distances between engines")
    cmp_.add_argument("scenario")
    cmp_.add_argument("--engines", default=",".join(ENGINE_NAMES), help="comma-separated engine ids")
    cmp_.add_argument("--tol", type=float, help="default: 0 between exact engines, 1e-6 otherwise")
    cmp_.add_argument("--postselect", help="condition on this outcome prefix, e.g. 'e' or 'even,odd'")
    evaluation_flags(cmp_)
    cmp_.set_defaults(func=cmd_compare)

    hier = sub.add_parser("hierarchy", help="test-class table over the built-in suite")
    hier.add_argument("--tol", type=float)
    hier.add_argument("--out")
    hier.set_defaults(func=cmd_hierarchy)

    cal = sub.add_parser("calibrate", help="fix the hv2 crossing convention against an oracle")
    cal.add_argument("--oracle", choices=ORACLES, default="stab")
    cal.add_argument("--out")
    cal.set_defaults(func=cmd_calibrate)
    return parser


def _postselect(text: str | None):
    if text is None:
        return None
    parts = [p for p in text.replace(",", " ").split()]
    if len(parts) == 1 and all(c in "eo" for c in parts[0]):
        return parts[0]
    return parts


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "shots", None) is not None and args.shots <= 0:
        print("error: --shots must be positive", file=sys.stderr)
        return 2
    if hasattr(args, "postselect"):
        args.postselect = _postselect(args.postselect)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
