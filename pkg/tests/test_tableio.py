"""Tests for streaming delimited-text reading and writing."""

from __future__ import annotations

import tracemalloc

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simcleaner.tableio import (
    DelimitedTextConfig,
    DelimitedTextError,
    column_index,
    open_delimited,
    write_delimited,
)


def read_all(path, config=DelimitedTextConfig()):
    source = open_delimited(path, config)
    return source.header(), list(source.rows()), source.defects


class TestParsing:
    def test_quoted_field_contains_delimiter(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text('a,b\n1,"x,y"\n', encoding="utf-8")
        header, rows, defects = read_all(f)
        assert header == ["a", "b"]
        assert rows == [["1", "x,y"]]
        assert not defects

    def test_short_row_padded_and_logged(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("a,b\n1\n", encoding="utf-8")
        _, rows, defects = read_all(f)
        assert rows == [["1", ""]]
        assert len(defects) == 1
        assert defects[0].row == 2

    def test_long_row_is_an_error_with_row_number(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("a,b\n1,2,3\n", encoding="utf-8")
        source = open_delimited(f)
        with pytest.raises(DelimitedTextError, match="row 2"):
            list(source.rows())

    def test_quote_doubling(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text('a\n"x""y"\n', encoding="utf-8")
        _, rows, _ = read_all(f)
        assert rows == [['x"y']]

    def test_crlf_and_lf_both_accepted(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_bytes(b"a,b\r\n1,2\r\n3,4\n")
        _, rows, _ = read_all(f)
        assert rows == [["1", "2"], ["3", "4"]]

    def test_newline_inside_quoted_field(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text('a,b\n1,"x\ny"\n', encoding="utf-8")
        _, rows, _ = read_all(f)
        assert rows == [["1", "x\ny"]]

    def test_invalid_utf8_reports_byte_offset(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_bytes(b"a,b\n1,\xff\n")
        with pytest.raises(DelimitedTextError, match="byte offset 6"):
            read_all(f)

    def test_empty_file_is_an_error(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("", encoding="utf-8")
        with pytest.raises(DelimitedTextError, match="empty"):
            open_delimited(f)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DelimitedTextError, match="no such file"):
            open_delimited(tmp_path / "nope.csv")

    def test_header_only_file(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("a,b\n", encoding="utf-8")
        header, rows, _ = read_all(f)
        assert header == ["a", "b"]
        assert rows == []

    def test_headerless_mode_synthesizes_names(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("1,2\n3,4\n", encoding="utf-8")
        cfg = DelimitedTextConfig(has_header=False)
        header, rows, _ = read_all(f, cfg)
        assert header == ["column_1", "column_2"]
        assert rows == [["1", "2"], ["3", "4"]]

    def test_custom_delimiter(self, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("a;b\n1;2\n", encoding="utf-8")
        _, rows, _ = read_all(f, DelimitedTextConfig(delimiter=";"))
        assert rows == [["1", "2"]]


class TestConfig:
    def test_delimiter_must_differ_from_quote(self):
        with pytest.raises(ValueError):
            DelimitedTextConfig(delimiter='"')

    def test_single_code_point(self):
        with pytest.raises(ValueError):
            DelimitedTextConfig(delimiter=",,")


class TestColumnIndex:
    def test_resolves(self):
        assert column_index(["a", "b"], "b") == 1

    def test_missing(self):
        with pytest.raises(KeyError):
            column_index(["a"], "b")

    def test_duplicate_is_rejected(self):
        with pytest.raises(DelimitedTextError, match="ambiguous"):
            column_index(["a", "b", "a"], "a")


class TestWriting:
    def test_quote_doubling_on_write(self, tmp_path):
        f = tmp_path / "t.csv"
        write_delimited([['x"y']], ["a"], f)
        assert f.read_text(encoding="utf-8") == 'a\n"x""y"\n'

    def test_empty_table_writes_header_only(self, tmp_path):
        f = tmp_path / "t.csv"
        write_delimited([], ["a", "b"], f)
        assert f.read_text(encoding="utf-8") == "a,b\n"

    def test_width_mismatch_is_an_error(self, tmp_path):
        with pytest.raises(DelimitedTextError, match="data row 1"):
            write_delimited([["1", "2"]], ["a"], tmp_path / "t.csv")

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(DelimitedTextError, match="cannot write"):
            write_delimited([], ["a"], tmp_path / "missing" / "t.csv")

    def test_nul_in_cell_is_an_error(self, tmp_path):
        with pytest.raises(DelimitedTextError, match="NUL"):
            write_delimited([["\x00"]], ["a"], tmp_path / "t.csv")


cell = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
    max_size=12,
)


@given(
    header_width=st.integers(min_value=1, max_value=4),
    body=st.lists(st.lists(cell, min_size=1, max_size=4), max_size=8),
)
@settings(max_examples=150, deadline=None)
def test_round_trip_property(tmp_path_factory, header_width, body):
    """parse(write(T)) == T cell-for-cell, including nasty cell content."""
    tmp = tmp_path_factory.mktemp("rt")
    rows = [[(r[i] if i < len(r) else "") for i in range(header_width)] for r in body]
    header = [f"h{i}" for i in range(header_width)]
    path = tmp / "t.csv"
    write_delimited(rows, header, path)
    got_header, got_rows, defects = read_all(path)
    assert got_header == header
    assert got_rows == rows


def test_streaming_memory_bound(tmp_path):
    """Memory stays proportional to distinct structure, not row count."""
    path = tmp_path / "big.csv"
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("id,street\n")
        for i in range(100_000):
            f.write(f"{i},Value {i % 50}\n")
    source = open_delimited(path)
    tracemalloc.start()
    n = sum(1 for _ in source.rows())
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    assert n == 100_000
    assert peak < 8 * 1024 * 1024
