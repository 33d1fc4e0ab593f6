"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 data or validation error. All
diagnostics go to standard error; results go to files and standard
output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from simcleaner import __version__
from simcleaner.bench import DEFAULT_SIZES, run_benchmark
from simcleaner.dictionary import (
    BuildConfig,
    InvalidDictionaryError,
    MetricKind,
    build_dictionary,
    load_dictionary_file,
    save_dictionary,
)
from simcleaner.errors import SimCleanerError
from simcleaner.pipeline import Workspace, append_log, apply_dictionary
from simcleaner.profiling import detect_outliers, profile_column, quarantine
from simcleaner.tableio import open_delimited


class _UsageError(Exception):
    def __init__(self, parser: argparse.ArgumentParser, message: str):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise _UsageError(self, message)


def _add_workspace_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--workspace",
        type=Path,
        default=None,
        help="workspace directory (default: $SIMCLEANER_WORKSPACE or ~/simcleanerFiles)",
    )


def _workspace(args) -> Workspace:
    ws = Workspace(args.workspace) if args.workspace else Workspace.default()
    return ws.ensure()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simcleaner", description=__doc__)
    parser.add_argument("--version", action="version", version=f"simcleaner {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("profile", help="histogram a column and report outliers")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--column", required=True)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("build-dict", help="cluster a column into a dictionary")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--column", required=True)
    p.add_argument(
        "--metric",
        choices=[m.value for m in MetricKind],
        default=MetricKind.JARO_WINKLER.value,
    )
    p.add_argument("--auto", type=float, default=0.92, help="auto-accept threshold")
    p.add_argument("--review", type=float, default=0.80, help="review-band threshold")
    p.add_argument(
        "--no-blocking",
        action="store_true",
        help="score every candidate against every key (exhaustive mode)",
    )
    _add_workspace_flag(p)
    p.set_defaults(func=cmd_build_dict)

    p = sub.add_parser("validate-dict", help="check a dictionary file's invariants")
    p.add_argument("dictionary", type=Path)
    p.set_defaults(func=cmd_validate_dict)

    p = sub.add_parser("apply", help="rewrite a column through a dictionary")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--column", required=True)
    p.add_argument("--dict", required=True, type=Path, dest="dictionary")
    _add_workspace_flag(p)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("bench", help="time dictionary creation and filtering")
    p.add_argument(
        "--sizes",
        default=",".join(str(s) for s in DEFAULT_SIZES),
        help="comma-separated instance counts",
    )
    p.add_argument("--seed", type=int, default=1)
    _add_workspace_flag(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="serve the review API and UI")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui", type=Path, default=None, help="directory of built UI assets")
    _add_workspace_flag(p)
    p.set_defaults(func=cmd_serve)

    return parser


def cmd_profile(args) -> int:
    source = open_delimited(args.input)
    histogram = profile_column(source, args.column)
    report = detect_outliers(histogram)
    print(f"rows: {histogram.total_rows}")
    print(f"distinct values: {len(histogram.entries)}")
    print("top values:")
    for value, count in histogram.entries[:20]:
        print(f"  {count:>8}  {value}")
    if report:
        print(f"outliers ({len(report.entries)}):")
        for value, count, reason in report.entries:
            print(f"  {count:>8}  {value!r}  [{reason}]")
    else:
        print("outliers: none")
    return 0


def cmd_build_dict(args) -> int:
    config = BuildConfig(
        metric=MetricKind(args.metric),
        tau_auto=args.auto,
        tau_review=args.review,
        blocking=not args.no_blocking,
    )
    workspace = _workspace(args)
    source = open_delimited(args.input)
    histogram = profile_column(source, args.column)
    report = detect_outliers(histogram)
    cleaned = quarantine(histogram, report)

    # carry over vetoes from any previous session in this workspace
    rejected = set()
    if workspace.dictionary_path.is_file():
        rejected = load_dictionary_file(workspace.dictionary_path).rejected_pairs

    dictionary, review = build_dictionary(cleaned, config, rejected_pairs=rejected)
    session = {
        "source_path": str(args.input.resolve()),
        "column": args.column,
        "total_rows": histogram.total_rows,
        "value_counts": dict(histogram.entries),
        "quarantined": sorted(report.flagged_values()),
        "outliers": [list(entry) for entry in report.entries],
    }
    save_dictionary(
        dictionary,
        workspace.dictionary_path,
        review_items=review,
        rejected_pairs=rejected,
        session=session,
    )
    append_log(
        workspace,
        "build-dict",
        [
            f"input: {args.input}",
            f"column: {args.column}",
            f"metric: {config.metric.value} (auto={config.tau_auto}, review={config.tau_review}, "
            f"blocking={config.blocking})",
            f"distinct values: {len(histogram.entries)}",
            f"quarantined outliers: {len(report.entries)}",
            f"clusters: {len(dictionary.clusters)}",
            f"pending review items: {len(review)}",
        ],
    )
    print(f"dictionary: {workspace.dictionary_path}")
    print(f"clusters: {len(dictionary.clusters)}")
    print(f"variants: {sum(len(c.variants) for c in dictionary.clusters)}")
    print(f"review items: {len(review)}")
    print(f"quarantined outliers: {len(report.entries)}")
    return 0


def cmd_validate_dict(args) -> int:
    load_dictionary_file(args.dictionary)  # raises InvalidDictionaryError on violations
    return 0


def cmd_apply(args) -> int:
    workspace = _workspace(args)
    loaded = load_dictionary_file(args.dictionary)
    source = open_delimited(args.input)
    quarantined = loaded.session.get("quarantined", [])
    out_path, log = apply_dictionary(
        source, args.column, loaded.dictionary, workspace, quarantined=quarantined
    )
    print(f"output: {out_path}")
    print(f"rows scanned: {log.rows_scanned}")
    print(f"cells replaced: {log.cells_replaced}")
    print(f"outliers skipped: {log.outliers_skipped}")
    print(f"change log: {workspace.changes_path}")
    return 0


def cmd_bench(args) -> int:
    try:
        sizes = tuple(int(s) for s in args.sizes.split(",") if s.strip())
    except ValueError:
        raise SimCleanerError(f"--sizes must be comma-separated integers, got {args.sizes!r}")
    if not sizes:
        raise SimCleanerError("--sizes must name at least one instance count")
    workspace = _workspace(args)
    report = run_benchmark(sizes=sizes, workspace=workspace, seed=args.seed)
    print(report.to_text(), end="")
    print(f"report files: {workspace.bench_text_path}, {workspace.bench_csv_path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from simcleaner.service import ReviewSession, create_app

    workspace = _workspace(args)
    session = ReviewSession.load(workspace)
    app = create_app(session, ui_dir=args.ui)
    print(
        f"serving workspace {workspace.root} on http://{args.host}:{args.port}",
        file=sys.stderr,
    )
    # generous keep-alive: review sessions poke the API at human pace
    uvicorn.run(
        app, host=args.host, port=args.port, log_level="warning", timeout_keep_alive=75
    )
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        exc.parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InvalidDictionaryError as exc:
        print("error: dictionary failed validation", file=sys.stderr)
        for violation in exc.violations:
            print(f"  {violation}", file=sys.stderr)
        return 2
    except SimCleanerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
