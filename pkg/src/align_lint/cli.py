"""``align-lint`` command line.

Exit codes: 0 clean, 1 findings under ``--strict`` (or ``fmt --check``
mismatch), 2 syntax/validation/usage error, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import TextIO

from .dsl import format_model, parse_with_errors
from .interchange import check_interchange
from .metrics import Thresholds, UnknownMetric, evaluate_all, get_metric, list_metrics
from .model import Model, Severity, check
from .report import build_report, render_dot, render_interchange, render_text

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INVALID = 2
EXIT_IO = 3


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


def _read(path: str, err: TextIO) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        print(f"{path}: cannot read input: {exc}", file=err)
        raise _Exit(EXIT_IO) from None


def _load(path: str, err: TextIO) -> Model:
    """Parse and resolve ``path``, printing every diagnostic to ``err``."""
    text = _read(path, err)
    if path.endswith(".json"):
        model, issues = check_interchange(text)
    else:
        raw, syntax = parse_with_errors(text)
        if raw is None:
            for e in syntax:
                print(e.format(path), file=err)
            raise _Exit(EXIT_INVALID)
        model, issues = check(raw)
    for issue in sorted(issues, key=lambda i: (i.pos is None, i.pos or (0, 0))):
        print(issue.format(path), file=err)
    if model is None:
        raise _Exit(EXIT_INVALID)
    return model


def _metric_filter(text: str | None) -> list[str] | None:
    if text is None:
        return None
    ids = [part.strip() for part in text.split(",") if part.strip()]
    for metric_id in ids:
        get_metric(metric_id)
    return ids


def cmd_validate(args, out: TextIO, err: TextIO) -> int:
    model = _load(args.input, err)
    print(f"{args.input}: ok, {sum(1 for _ in model.index)} elements", file=err)
    return EXIT_OK


def cmd_assess(args, out: TextIO, err: TextIO) -> int:
    try:
        thresholds = Thresholds(
            args.m9_threshold if args.m9_threshold is not None else Thresholds.m9_runs_on,
            args.m11_threshold if args.m11_threshold is not None else Thresholds.m11_quality,
        )
        selected = _metric_filter(args.metrics)
    except ValueError as exc:
        print(f"align-lint: {exc}", file=err)
        return EXIT_INVALID
    except UnknownMetric as exc:
        print(f"align-lint: unknown metric {exc.args[0]!r}", file=err)
        return EXIT_INVALID
    model = _load(args.input, err)
    report = build_report(model, evaluate_all(model, thresholds), selected)
    if args.format == "text":
        out.write(render_text(report))
    else:
        out.write(render_interchange(report))
    if args.dot:
        try:
            Path(args.dot).write_text(render_dot(model, report), encoding="utf-8")
        except OSError as exc:
            print(f"{args.dot}: cannot write DOT output: {exc}", file=err)
            return EXIT_IO
    if args.strict and report.has_findings:
        return EXIT_FINDINGS
    return EXIT_OK


def cmd_explain(args, out: TextIO, err: TextIO) -> int:
    try:
        desc = get_metric(args.metric)
    except UnknownMetric:
        known = ", ".join(d.id for d in list_metrics())
        print(f"align-lint: unknown metric {args.metric!r} (known: {known})", file=err)
        return EXIT_INVALID
    out.write(
        f"{desc.id}: {desc.name}\n"
        f"  link:        {desc.link.value}\n"
        f"  origin:      {desc.origin.value}\n"
        f"  definition:  {desc.description}\n"
        f"  rationale:   {desc.rationale}\n"
        f"  remediation: {desc.remediation_template}\n"
    )
    return EXIT_OK


def cmd_fmt(args, out: TextIO, err: TextIO) -> int:
    model = _load(args.input, err)
    canonical = format_model(model)
    if args.check:
        if _read(args.input, err) != canonical:
            print(f"{args.input}: not in canonical form", file=err)
            return EXIT_FINDINGS
        return EXIT_OK
    out.write(canonical)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="align-lint",
        description="Strategic-alignment linter for four-layer enterprise architecture models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and resolve a model, report issues")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("assess", help="compute metrics, maturity and findings")
    p.add_argument("input")
    p.add_argument("--format", choices=("text", "interchange", "json"), default="text")
    p.add_argument("--dot", metavar="PATH", help="also write a DOT graph with offenders in red")
    p.add_argument("--strict", action="store_true", help="exit 1 when any finding exists")
    p.add_argument("--metrics", metavar="ID[,ID...]", help="restrict findings to these metrics")
    p.add_argument("--m9-threshold", type=int, metavar="N", help="platform count flagged by M9 (default 3)")
    p.add_argument("--m11-threshold", type=float, metavar="X", help="mean quality floor for M11 (default 0.5)")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("explain", help="describe a metric")
    p.add_argument("metric")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("fmt", help="print the canonical form of a model")
    p.add_argument("input")
    p.add_argument("--check", action="store_true", help="exit 1 if the file is not canonical")
    p.set_defaults(func=cmd_fmt)
    return parser


def main(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out, err)
    except _Exit as exc:
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
