"""Applying a dictionary to a table: workspace layout, change log, run log.

All outputs of a run land inside one workspace directory and the input
file is never touched. Replacement is exact raw-string lookup: cells that
are a variant become their cluster key, cells already equal to a key are
fixed points, everything else passes through byte-identical. Because no
variant is ever also a key, applying twice equals applying once.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from simcleaner.dictionary import (
    Dictionary,
    InvalidDictionaryError,
    dictionary_file_bytes,
    validate_dictionary,
)
from simcleaner.errors import SimCleanerError
from simcleaner.tableio import (
    DelimitedTextConfig,
    TableSource,
    column_index,
    write_delimited,
)

WORKSPACE_ENV_VAR = "SIMCLEANER_WORKSPACE"
DEFAULT_WORKSPACE_NAME = "simcleanerFiles"


class PipelineError(SimCleanerError):
    pass


@dataclass(frozen=True)
class Workspace:
    """Directory holding every artifact of a run."""

    root: Path

    @classmethod
    def default(cls) -> "Workspace":
        override = os.environ.get(WORKSPACE_ENV_VAR)
        if override:
            return cls(Path(override))
        return cls(Path.home() / DEFAULT_WORKSPACE_NAME)

    def ensure(self) -> "Workspace":
        self.root.mkdir(parents=True, exist_ok=True)
        return self

    @property
    def output_path(self) -> Path:
        return self.root / "output.csv"

    @property
    def dictionary_path(self) -> Path:
        return self.root / "dictionary.json"

    @property
    def sidecar_path(self) -> Path:
        return self.root / "dictionary.meta.json"

    @property
    def log_path(self) -> Path:
        return self.root / "run.log"

    @property
    def changes_path(self) -> Path:
        return self.root / "changes.csv"

    @property
    def bench_text_path(self) -> Path:
        return self.root / "bench_report.txt"

    @property
    def bench_csv_path(self) -> Path:
        return self.root / "bench_report.csv"


@dataclass(frozen=True)
class ChangeEntry:
    row: int  # 1-based data row index
    column: str
    old: str
    new: str


@dataclass
class ChangeLog:
    """Audit trail of one apply run: per-cell substitutions plus totals."""

    timestamp: str
    input_path: str
    column: str
    dictionary_fingerprint: str
    entries: list[ChangeEntry] = field(default_factory=list)
    rows_scanned: int = 0
    cells_replaced: int = 0
    outliers_skipped: int = 0

    def summary(self) -> dict:
        return {
            "rows_scanned": self.rows_scanned,
            "cells_replaced": self.cells_replaced,
            "outliers_skipped": self.outliers_skipped,
        }


def dictionary_fingerprint(dictionary: Dictionary) -> str:
    """Short content hash of the canonical dictionary file form."""
    return hashlib.sha256(dictionary_file_bytes(dictionary)).hexdigest()[:16]


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def append_log(workspace: Workspace, section: str, lines: Iterable[str]) -> None:
    """Append a timestamped section to the workspace run log."""
    with open(workspace.log_path, "a", encoding="utf-8") as handle:
        handle.write(f"[{utc_now()}] {section}\n")
        for line in lines:
            handle.write(f"  {line}\n")


def apply_dictionary(
    source: TableSource,
    column: str,
    dictionary: Dictionary,
    workspace: Workspace,
    quarantined: Iterable[str] = (),
) -> tuple[Path, ChangeLog]:
    """Rewrite ``column`` through the dictionary in one streaming pass.

    Returns the output path and the complete change log; also writes
    ``changes.csv`` and appends to ``run.log`` in the workspace. Refuses
    dictionaries that fail validation, and refuses to overwrite the input.
    """
    violations = validate_dictionary(dictionary)
    if violations:
        raise InvalidDictionaryError("dictionary failed validation; not applying", violations)

    workspace.ensure()
    header = source.header()
    try:
        idx = column_index(header, column)
    except KeyError:
        raise PipelineError(
            f"column {column!r} not found; available columns: {', '.join(header)}"
        ) from None

    input_path = getattr(source, "path", None)
    out_path = workspace.output_path
    if input_path is not None and Path(input_path).resolve() == out_path.resolve():
        raise PipelineError(f"refusing to overwrite the input file {input_path}")

    mapping = dictionary.variant_map()
    skip = set(quarantined)
    log = ChangeLog(
        timestamp=utc_now(),
        input_path=str(input_path) if input_path is not None else "<stream>",
        column=column,
        dictionary_fingerprint=dictionary_fingerprint(dictionary),
    )

    def rewritten() -> Iterable[list[str]]:
        for row in source.rows():
            log.rows_scanned += 1
            value = row[idx]
            replacement = mapping.get(value)
            if replacement is not None:
                row = list(row)
                row[idx] = replacement
                log.entries.append(
                    ChangeEntry(log.rows_scanned, column, value, replacement)
                )
                log.cells_replaced += 1
            elif value in skip:
                log.outliers_skipped += 1
            yield row

    out_config = getattr(source, "config", DelimitedTextConfig())
    write_delimited(rewritten(), header, out_path, out_config)

    write_delimited(
        ([str(e.row), e.column, e.old, e.new] for e in log.entries),
        ["row", "column", "old_value", "new_value"],
        workspace.changes_path,
    )

    defects = getattr(source, "defects", [])
    lines = [
        f"input: {log.input_path}",
        f"column: {column}",
        f"dictionary: {log.dictionary_fingerprint} "
        f"({len(dictionary.clusters)} keys, {sum(len(c.variants) for c in dictionary.clusters)} variants)",
        f"output: {out_path}",
        f"rows scanned: {log.rows_scanned}",
        f"cells replaced: {log.cells_replaced}",
        f"outliers skipped: {log.outliers_skipped}",
        f"parse defects: {len(defects)}",
    ]
    lines.extend(f"defect at {d}" for d in defects)
    if skip:
        lines.append(f"quarantined values left untouched ({len(skip)}):")
        lines.extend(f"  {v!r}" for v in sorted(skip))
    append_log(workspace, "apply", lines)
    return out_path, log
