"""Command-line front end: validation, cut-set analysis, probability, export.

Exit codes: 0 success, 1 findings (validation violations; an active TLE in
``eval``), 2 usage or input errors.  Machine output goes to stdout,
diagnostics to stderr.  Output is deterministic for identical inputs and
flags; ``--format json`` is available on every subcommand.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from . import analysis, quant
from .analysis import CutSet, ImpactEntry, McsFamily
from .dsl import ParseFailure, read_model_file, to_dot
from .errors import AfdtError
from .model import Model, Violation, evaluate, validate

_CROSS = "✗"  # eliminated-cut marker
_EMPTY = "∅"  # empty defense family marker


class _InvalidInput(Exception):
    """Internal: model failed validation before an analysis command."""

    def __init__(self, violations: list[Violation]):
        super().__init__(f"{len(violations)} validation finding(s)")
        self.violations = violations


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ParseFailure as exc:
        for error in exc.errors:
            print(
                f"{error.span.line}:{error.span.column} {error.code} {error.message}",
                file=sys.stderr,
            )
        return 2
    except _InvalidInput as exc:
        for violation in exc.violations:
            print(_violation_line(violation), file=sys.stderr)
        print("error: model failed validation", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: bad JSON input: {exc}", file=sys.stderr)
        return 2
    except AfdtError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afdt",
        description="Attack-fault-defense tree analysis over .afdt / .afdt.json files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, formats: tuple[str, ...]) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("model", help="model file (.afdt DSL or .afdt.json)")
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument(
            "--ascii", action="store_true", help="7-bit output: - instead of ✗ and ∅"
        )
        return p

    add("validate", "check structural rules", ("table", "json")).set_defaults(run=_cmd_validate)

    p = add("mcs", "minimal cut sets under a defense configuration", ("table", "json", "csv"))
    p.add_argument("--defenses", default="", help="comma-separated deployed BDS ids")
    p.set_defaults(run=_cmd_mcs)

    add("table", "cut sets per defense subset, one column each", ("table", "json", "csv")).set_defaults(
        run=_cmd_table
    )

    add("impact", "per-cut neutralizing/eradicating/hardening defenses", ("table", "json")).set_defaults(
        run=_cmd_impact
    )

    p = add("eval", "evaluate the TLE for one assignment", ("table", "json"))
    p.add_argument("--active", default="", help="comma-separated active leaf ids")
    p.set_defaults(run=_cmd_eval)

    p = add("prob", "TLE probability (exact, or --mc for Monte-Carlo)", ("table", "json"))
    p.add_argument("--probs", required=True, help="JSON file: {leaf id: probability}")
    p.add_argument("--defenses", default="", help="comma-separated deployed BDS ids")
    p.add_argument("--mc", type=int, metavar="SAMPLES", help="Monte-Carlo sample count")
    p.add_argument("--seed", type=int, default=0, help="Monte-Carlo seed (default 0)")
    p.set_defaults(run=_cmd_prob)

    add("dot", "Graphviz DOT export", ("table", "json")).set_defaults(run=_cmd_dot)
    return parser


# ---------------------------------------------------------------------------
# Shared plumbing

def _load(path: str) -> Model:
    return read_model_file(path)


def _load_valid(path: str) -> Model:
    model = _load(path)
    violations = validate(model)
    if violations:
        raise _InvalidInput(violations)
    return model


def _split_ids(raw: str) -> list[str]:
    return [part.strip() for part in raw.split(",") if part.strip()]


def _max_cuts() -> int:
    raw = os.environ.get("AFDT_MAX_CUTS")
    if raw is None:
        return analysis.DEFAULT_MAX_CUTS
    try:
        return int(raw)
    except ValueError:
        raise AfdtError(f"AFDT_MAX_CUTS is not an integer: {raw!r}") from None


def _violation_line(violation: Violation) -> str:
    return f"{violation.code} {violation.node or '-'} {violation.message}"


def _fmt_cut(model: Model, cut: CutSet) -> str:
    return "{" + ", ".join(model.display(m) for m in cut.members) + "}"


def _fmt_subset(model: Model, subset: tuple[str, ...], empty: str) -> str:
    if not subset:
        return empty
    return "{" + ", ".join(model.display(m) for m in subset) + "}"


def _render_grid(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    for row in [headers] + rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def _write_csv(headers: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_validate(args: argparse.Namespace) -> int:
    model = _load(args.model)
    violations = validate(model)
    if args.format == "json":
        print(json.dumps({"violations": [v.as_dict() for v in violations]}, indent=2))
    else:
        for violation in violations:
            print(_violation_line(violation))
    return 1 if violations else 0


def _cmd_mcs(args: argparse.Namespace) -> int:
    model = _load_valid(args.model)
    family = analysis.minimal_cut_sets(model, _split_ids(args.defenses), max_cuts=_max_cuts())
    if args.format == "json":
        print(json.dumps(family.as_dict(), indent=2))
    elif args.format == "csv":
        rows = [[str(len(cut)), ";".join(cut.members)] for cut in family.cuts]
        sys.stdout.write(_write_csv(["size", "members"], rows))
    else:
        for cut in family.cuts:
            print(_fmt_cut(model, cut))
    return 0


def _table_cells(
    model: Model, families: list[McsFamily]
) -> tuple[list[str], list[list[str]], McsFamily]:
    """Pivot families into the per-baseline-cut grid used by `table`."""
    baseline = families[0]
    headers = ["No defense"] + [
        _fmt_subset(model, fam.defense, empty="{}") for fam in families[1:]
    ]
    rows = []
    for cut in baseline.cuts:
        row = []
        for fam in families:
            hits = [c for c in fam.cuts if c.as_set() >= cut.as_set()]
            row.append("; ".join(_fmt_cut(model, c) for c in hits))
        rows.append(row)
    return headers, rows, baseline


def _cmd_table(args: argparse.Namespace) -> int:
    model = _load_valid(args.model)
    families = analysis.mcs_table(model, max_cuts=_max_cuts())
    if args.format == "json":
        print(json.dumps({"families": [f.as_dict() for f in families]}, indent=2))
        return 0
    cross = "-" if args.ascii else _CROSS
    headers, rows, _ = _table_cells(model, families)
    rows = [[cell or cross for cell in row] for row in rows]
    if args.format == "csv":
        sys.stdout.write(_write_csv(headers, rows))
    else:
        sys.stdout.write(_render_grid(headers, rows))
    return 0


def _cmd_impact(args: argparse.Namespace) -> int:
    model = _load_valid(args.model)
    entries = analysis.defense_impact(model, max_cuts=_max_cuts())
    if args.format == "json":
        print(json.dumps({"entries": [e.as_dict() for e in entries]}, indent=2))
        return 0
    empty = "-" if args.ascii else _EMPTY
    rows = [
        [
            _fmt_cut(model, entry.mcs),
            ", ".join(_fmt_subset(model, s, empty) for s in entry.eradicating) or empty,
        ]
        for entry in entries
    ]
    sys.stdout.write(_render_grid(["MCS", "Effective defenses"], rows))
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    model = _load_valid(args.model)
    active = _split_ids(args.active)
    tle = evaluate(model, active)
    if args.format == "json":
        print(json.dumps({"tle": tle, "active": sorted(set(active))}))
    else:
        print(f"TLE: {'active' if tle else 'inactive'}")
    return 1 if tle else 0


def _cmd_prob(args: argparse.Namespace) -> int:
    model = _load_valid(args.model)
    with open(args.probs, encoding="utf-8") as handle:
        probs = json.load(handle)
    if not isinstance(probs, dict):
        print("error: probability file must be a JSON object", file=sys.stderr)
        return 2
    defense = _split_ids(args.defenses)
    if args.mc is not None:
        result = quant.tle_probability_mc(model, probs, defense, samples=args.mc, seed=args.seed)
    else:
        result = quant.tle_probability_exact(model, probs, defense)
    if args.format == "json":
        print(json.dumps(result.as_dict()))
    elif result.method is quant.Method.EXACT:
        print(f"{result.value} exact")
    else:
        print(
            f"{result.value} monte_carlo samples={result.samples} "
            f"std_error={result.std_error:.6g} seed={result.seed}"
        )
    return 0


def _cmd_dot(args: argparse.Namespace) -> int:
    model = _load_valid(args.model)
    text = to_dot(model)
    if args.format == "json":
        print(json.dumps({"dot": text}))
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
