"""Column profiling: distinct-value histograms and junk-value detection.

The histogram is keyed on raw strings; normalization only happens later,
inside clustering. Junk values (repeated-character runs, missing-data
placeholders) are flagged here and quarantined before clustering so they
never become merge candidates.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import groupby

from simcleaner.errors import SimCleanerError
from simcleaner.tableio import TableSource, column_index

REASON_REPEATED_RUN = "repeated-run"
REASON_MISSING_PLACEHOLDER = "missing-placeholder"


class ColumnNotFoundError(SimCleanerError):
    pass


@dataclass(frozen=True)
class ValueHistogram:
    """Distinct raw values of one column with occurrence counts.

    Entries are ordered by count descending, then value ascending; this
    canonical order makes every downstream step independent of row order.
    Blank (empty-string) cells count toward ``total_rows`` but produce no
    entry, so counts may sum to less than ``total_rows``.
    """

    column: str
    entries: tuple[tuple[str, int], ...]
    total_rows: int

    def values(self) -> list[str]:
        return [value for value, _ in self.entries]

    def count_of(self, value: str) -> int:
        for v, c in self.entries:
            if v == value:
                return c
        return 0


@dataclass(frozen=True)
class OutlierRule:
    """Criteria for flagging junk values.

    A value is a repeated-run outlier when its longest run of one code
    point reaches ``max_repeat_run``; it is a missing-data placeholder
    when, after trimming, it equals one of ``missing_placeholders``.
    """

    max_repeat_run: int = 4
    missing_placeholders: frozenset[str] = frozenset({""})

    def __post_init__(self) -> None:
        if self.max_repeat_run < 2:
            raise ValueError(f"max_repeat_run must be >= 2, got {self.max_repeat_run}")


@dataclass(frozen=True)
class OutlierReport:
    """Flagged values with their counts and the reason each was flagged."""

    entries: tuple[tuple[str, int, str], ...] = field(default_factory=tuple)

    def flagged_values(self) -> set[str]:
        return {value for value, _, _ in self.entries}

    def __bool__(self) -> bool:
        return bool(self.entries)


def longest_run(s: str) -> int:
    """Length of the longest run of a single repeated code point."""
    if not s:
        return 0
    return max(sum(1 for _ in group) for _, group in groupby(s))


def profile_column(source: TableSource, column: str) -> ValueHistogram:
    """Stream the source once and histogram the distinct raw values of
    ``column``.

    Memory is proportional to the number of distinct values, not rows.
    Raises ColumnNotFoundError naming the available headers when the
    column does not exist.
    """
    header = source.header()
    try:
        idx = column_index(header, column)
    except KeyError:
        raise ColumnNotFoundError(
            f"column {column!r} not found; available columns: {', '.join(header)}"
        ) from None

    counts: Counter[str] = Counter()
    total = 0
    for row in source.rows():
        total += 1
        value = row[idx]
        if value == "":
            continue
        counts[value] += 1

    ordered = tuple(sorted(counts.items(), key=lambda item: (-item[1], item[0])))
    return ValueHistogram(column=column, entries=ordered, total_rows=total)


def detect_outliers(histogram: ValueHistogram, rule: OutlierRule = OutlierRule()) -> OutlierReport:
    """Flag histogram values matching the outlier rule.

    Placeholder matching wins when both reasons apply.
    """
    flagged = []
    for value, count in histogram.entries:
        if value.strip() in rule.missing_placeholders:
            flagged.append((value, count, REASON_MISSING_PLACEHOLDER))
        elif longest_run(value) >= rule.max_repeat_run:
            flagged.append((value, count, REASON_REPEATED_RUN))
    return OutlierReport(entries=tuple(flagged))


def quarantine(histogram: ValueHistogram, report: OutlierReport) -> ValueHistogram:
    """Return a copy of the histogram without the flagged values.

    Canonical ordering is preserved; the input histogram is unchanged.
    """
    excluded = report.flagged_values()
    kept = tuple(entry for entry in histogram.entries if entry[0] not in excluded)
    return ValueHistogram(
        column=histogram.column, entries=kept, total_rows=histogram.total_rows
    )
