"""Benchmark harness: times dictionary creation and filtering over
synthetic corpora of requested sizes and reports both as text and CSV.

Timings are wall-clock (monotonic) and hardware-bound; the report exists
to show the shape of the cost, not to reproduce anyone else's numbers.
"""

from __future__ import annotations

import platform
import time
from dataclasses import dataclass

from simcleaner.corpus import DEFAULT_PROFILE, DefectProfile, generate_corpus
from simcleaner.dictionary import BuildConfig, build_dictionary
from simcleaner.pipeline import Workspace, append_log, apply_dictionary
from simcleaner.profiling import detect_outliers, profile_column, quarantine
from simcleaner.tableio import open_delimited

SUPPORTED_FORMATS = ("csv",)
DEFAULT_SIZES = (3098, 17782)


@dataclass(frozen=True)
class TimingRow:
    source_format: str
    instances: int
    dictionary_seconds: float
    filtering_seconds: float


@dataclass
class TimingReport:
    rows: list[TimingRow]
    machine: str

    def to_text(self) -> str:
        sizes = sorted({r.instances for r in self.rows})
        by_key = {(r.source_format, r.instances): r for r in self.rows}
        formats = list(dict.fromkeys(r.source_format for r in self.rows))

        col = 12
        size_cells = "".join(f"{s:>{col},}" for s in sizes)
        lines = [
            f"machine: {self.machine}",
            "",
            f"{'':<10}{'Dictionary creation (s)':^{col * len(sizes)}}"
            f"{'Filtering (s)':^{col * len(sizes)}}",
            f"{'format':<10}{size_cells}{size_cells}",
        ]
        for fmt in formats:
            cells = []
            for section in ("dictionary_seconds", "filtering_seconds"):
                for size in sizes:
                    row = by_key.get((fmt, size))
                    cells.append(
                        f"{getattr(row, section):>{col}.3f}" if row else f"{'-':>{col}}"
                    )
            lines.append(f"{fmt:<10}" + "".join(cells))
        return "\n".join(lines) + "\n"

    def to_csv_rows(self) -> list[list[str]]:
        return [
            [
                r.source_format,
                str(r.instances),
                f"{r.dictionary_seconds:.6f}",
                f"{r.filtering_seconds:.6f}",
            ]
            for r in self.rows
        ]


def machine_descriptor() -> str:
    processor = platform.processor() or platform.machine()
    return f"{platform.platform()} ({processor})"


def run_benchmark(
    sizes: tuple[int, ...] = DEFAULT_SIZES,
    formats: tuple[str, ...] = ("csv",),
    workspace: Workspace | None = None,
    seed: int = 1,
    profile: DefectProfile = DEFAULT_PROFILE,
    config: BuildConfig = BuildConfig(),
) -> TimingReport:
    """Generate, build and filter one corpus per (format, size) pair.

    Writes ``bench_report.txt`` and ``bench_report.csv`` into the
    workspace and returns the report.
    """
    if any(n < 1 for n in sizes):
        raise ValueError("instance counts must be positive")
    for fmt in formats:
        if fmt not in SUPPORTED_FORMATS:
            raise ValueError(
                f"unsupported format {fmt!r}; supported: {', '.join(SUPPORTED_FORMATS)}"
            )
    workspace = (workspace or Workspace.default()).ensure()
    data_dir = workspace.root / "bench_data"

    rows = []
    for fmt in formats:
        for n in sizes:
            paths = generate_corpus(n, seed=seed, profile=profile, out_dir=data_dir)
            run_ws = Workspace(workspace.root / f"bench_run_{fmt}_{n}").ensure()

            start = time.perf_counter()
            histogram = profile_column(open_delimited(paths.data), "street")
            cleaned = quarantine(histogram, detect_outliers(histogram))
            dictionary, _review = build_dictionary(cleaned, config)
            build_seconds = time.perf_counter() - start

            start = time.perf_counter()
            apply_dictionary(
                open_delimited(paths.data), "street", dictionary, run_ws
            )
            filter_seconds = time.perf_counter() - start

            rows.append(TimingRow(fmt, n, build_seconds, filter_seconds))

    report = TimingReport(rows=rows, machine=machine_descriptor())
    workspace.bench_text_path.write_text(report.to_text(), encoding="utf-8")
    csv_lines = ["format,instances,dictionary_creation_seconds,filtering_seconds"]
    csv_lines += [",".join(r) for r in report.to_csv_rows()]
    workspace.bench_csv_path.write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    append_log(
        workspace,
        "bench",
        [f"sizes: {', '.join(str(s) for s in sizes)}", f"formats: {', '.join(formats)}"],
    )
    return report
