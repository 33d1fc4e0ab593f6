"""Streaming delimited-text tables behind a pluggable source contract.

Parsing follows RFC-4180 conventions: quoted fields may contain the
delimiter and newlines, a doubled quote escapes a quote, and both CRLF
and LF line endings are accepted. Rows shorter than the header are
right-padded with empty cells (recorded as defects); longer rows abort
with the offending row number. Files are always UTF-8.
"""

from __future__ import annotations

import codecs
import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Protocol, Sequence, runtime_checkable

from simcleaner.errors import SimCleanerError

_CHUNK_SIZE = 1 << 16


class DelimitedTextError(SimCleanerError):
    pass


@runtime_checkable
class TableSource(Protocol):
    """Forward-streaming table: a header plus rows of cell strings.

    Every yielded row has exactly ``len(header())`` cells. Adapters for
    other storage formats implement this same contract.
    """

    def header(self) -> list[str]: ...

    def rows(self) -> Iterator[list[str]]: ...


def column_index(header: Sequence[str], name: str) -> int:
    """Resolve a column name to its index.

    Raises KeyError when the name is missing, and DelimitedTextError when
    it is ambiguous (duplicate header names are tolerated until someone
    refers to one).
    """
    positions = [i for i, h in enumerate(header) if h == name]
    if not positions:
        raise KeyError(name)
    if len(positions) > 1:
        raise DelimitedTextError(
            f"column name {name!r} is ambiguous: appears {len(positions)} times in the header"
        )
    return positions[0]


@dataclass(frozen=True)
class DelimitedTextConfig:
    """Dialect of a delimited text file. Encoding is fixed to UTF-8."""

    delimiter: str = ","
    quote: str = '"'
    has_header: bool = True

    def __post_init__(self) -> None:
        if len(self.delimiter) != 1:
            raise ValueError(f"delimiter must be a single code point, got {self.delimiter!r}")
        if len(self.quote) != 1:
            raise ValueError(f"quote must be a single code point, got {self.quote!r}")
        if self.delimiter == self.quote:
            raise ValueError("delimiter and quote must differ")


@dataclass
class RowDefect:
    """A recoverable parsing defect, reported into the run log."""

    row: int
    message: str

    def __str__(self) -> str:
        return f"row {self.row}: {self.message}"


def _decoded_lines(path: Path) -> Iterator[str]:
    """Yield text lines (LF terminators kept) from a UTF-8 file, failing
    with the exact byte offset on undecodable input.

    Splitting happens on LF only, so CRLF endings and any other control
    characters pass through intact for the parser to interpret.
    """
    decoder = codecs.getincrementaldecoder("utf-8")()
    consumed = 0  # bytes handed to the decoder before the current chunk
    buffer = ""
    with open(path, "rb") as handle:
        while True:
            chunk = handle.read(_CHUNK_SIZE)
            carried = len(decoder.getstate()[0])
            try:
                buffer += decoder.decode(chunk, final=not chunk)
            except UnicodeDecodeError as exc:
                offset = consumed - carried + exc.start
                raise DelimitedTextError(
                    f"{path}: invalid UTF-8 at byte offset {offset}"
                ) from None
            consumed += len(chunk)
            if not chunk:
                break
            parts = buffer.split("\n")
            buffer = parts.pop()
            for line in parts:
                yield line + "\n"
    if buffer:
        yield buffer


class DelimitedTextSource:
    """Streaming reader for one delimited text file.

    Single-consumer: ``rows()`` may be iterated once per source instance.
    Padding defects accumulate in ``defects`` as rows stream.
    """

    def __init__(self, path: str | Path, config: DelimitedTextConfig = DelimitedTextConfig()):
        self.path = Path(path)
        self.config = config
        self.defects: list[RowDefect] = []
        self._lines = _decoded_lines(self.path)
        self._reader = csv.reader(
            self._lines, delimiter=config.delimiter, quotechar=config.quote
        )
        self._records_read = 0
        first = self._next_record()
        if first is None:
            raise DelimitedTextError(f"{self.path}: file is empty")
        if config.has_header:
            self._header = list(first)
            self._first_data_row: list[str] | None = None
        else:
            self._header = [f"column_{i + 1}" for i in range(len(first))]
            self._first_data_row = list(first)

    def _next_record(self) -> list[str] | None:
        try:
            record = next(self._reader)
        except StopIteration:
            return None
        self._records_read += 1
        return record

    def header(self) -> list[str]:
        return list(self._header)

    def rows(self) -> Iterator[list[str]]:
        width = len(self._header)
        if self._first_data_row is not None:
            yield self._shape(self._first_data_row, 1, width)
            self._first_data_row = None
        while (record := self._next_record()) is not None:
            yield self._shape(record, self._records_read, width)

    def _shape(self, record: list[str], row_number: int, width: int) -> list[str]:
        if len(record) > width:
            raise DelimitedTextError(
                f"{self.path}: row {row_number} has {len(record)} cells, header has {width}"
            )
        if len(record) < width:
            self.defects.append(
                RowDefect(row_number, f"padded from {len(record)} to {width} cells")
            )
            record = record + [""] * (width - len(record))
        return record


def open_delimited(
    path: str | Path, config: DelimitedTextConfig = DelimitedTextConfig()
) -> DelimitedTextSource:
    """Open a delimited text file for streaming."""
    path = Path(path)
    if not path.is_file():
        raise DelimitedTextError(f"{path}: no such file")
    return DelimitedTextSource(path, config)


def _format_row(row: Sequence[str], config: DelimitedTextConfig) -> str:
    # csv.writer cannot combine LF line endings with quoting of bare-CR
    # fields, so the (small) writing side is done by hand
    quote = config.quote
    needs_quote = (config.delimiter, quote, "\r", "\n")
    fields = []
    for cell in row:
        if any(c in cell for c in needs_quote):
            cell = quote + cell.replace(quote, quote + quote) + quote
        fields.append(cell)
    return config.delimiter.join(fields) + "\n"


def write_delimited(
    rows: Iterable[Sequence[str]],
    header: Sequence[str],
    path: str | Path,
    config: DelimitedTextConfig = DelimitedTextConfig(),
) -> None:
    """Write a table so that re-parsing reproduces the cells exactly.

    Fields containing the delimiter, the quote, CR or LF are quoted;
    quotes are doubled; lines end with LF.
    """
    path = Path(path)
    width = len(header)
    try:
        handle = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise DelimitedTextError(f"{path}: cannot write: {exc}") from exc
    with handle:
        if config.has_header:
            handle.write(_format_row(header, config))
        for i, row in enumerate(rows, start=1):
            if len(row) != width:
                raise DelimitedTextError(
                    f"{path}: data row {i} has {len(row)} cells, header has {width}"
                )
            if any("\x00" in cell for cell in row):
                # the csv dialect has no representation for NUL
                raise DelimitedTextError(f"{path}: data row {i} contains a NUL character")
            handle.write(_format_row(row, config))
