#!/usr/bin/env python3
"""
Tests for matrix file reading and writing.
"""
import os
import sys
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from gds_core.errors import MatrixFileError
from gds_utils.matrix_io import infer_format, read_matrix, write_matrix


def _awkward_matrix():
    a = np.random.default_rng(12).standard_normal((4, 3))
    a[0, 0] = 5e-324
    a[1, 1] = -1.7976931348623157e308
    a[2, 2] = 0.1 + 0.2
    a[3, 0] = -0.0
    return a


# ============ Format selection ============

def test_infer_format():
    """Test extension inference and explicit override."""
    assert infer_format("m.csv") == "csv"
    assert infer_format("m.CSV") == "csv"
    assert infer_format("m.json") == "json"
    assert infer_format("m.txt") == "json"
    assert infer_format("m.json", "csv") == "csv"
    with pytest.raises(MatrixFileError, match="unknown matrix format"):
        infer_format("m.json", "xml")


# ============ Exact storage ============

@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_entries_survive_storage(tmp_path, fmt):
    """Test every float64 entry, subnormals and extremes included, is stored exactly."""
    a = _awkward_matrix()
    path = str(tmp_path / "nested" / f"a.{fmt}")
    write_matrix(a, path)
    b = read_matrix(path)
    assert b.shape == a.shape
    assert_array_equal(b, a)
    assert not b.flags.writeable


def test_json_layout(tmp_path):
    """Test the JSON object keys and row-major data."""
    path = tmp_path / "m.json"
    write_matrix([[1.0, 2.0], [3.0, 4.0]], str(path))
    assert path.read_text().strip() == '{"rows": 2, "cols": 2, "data": [1.0, 2.0, 3.0, 4.0]}'


# ============ JSON errors ============

@pytest.mark.parametrize("text,message", [
    ('{"rows": 2, "cols": 2,\n "data": [1, 2, 3,]}', r"line 2, column"),
    ('[1, 2]', "top-level value must be an object"),
    ('{"rows": 2, "data": []}', "missing key 'cols'"),
    ('{"rows": 0, "cols": 2, "data": []}', "'rows' must be a positive integer"),
    ('{"rows": 2, "cols": 2, "data": [1, 2, 3]}', "expected rows\\*cols = 4"),
    ('{"rows": 1, "cols": 2, "data": [1, "x"]}', r"data\[1\] \(row 1, column 2\)"),
    ('{"rows": 1, "cols": 2, "data": [1, NaN]}', "not a finite number"),
    ('{"rows": 1, "cols": 1, "data": [true]}', "not a finite number"),
])
def test_json_errors(tmp_path, text, message):
    """Test malformed JSON files name what is wrong and where."""
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(MatrixFileError, match=message):
        read_matrix(str(path))


# ============ CSV errors ============

@pytest.mark.parametrize("text,message", [
    ("", "empty file"),
    ("1,2\n3,abc\n", r"line 2, field 2: not a number"),
    ("1,2,3\n4,5\n", r"line 2, field 3: missing value"),
    ("1,2\n3,4,5\n", r"line 2"),
    ("1,inf\n", r"line 1, field 2: non-finite"),
    ("1,2\n\n3,4\n", r"line 2: blank line"),
    ("1,2\n3,4\n   \n5,6\n", r"line 3: blank line"),
])
def test_csv_errors(tmp_path, text, message):
    """Test malformed CSV files name the offending line and field."""
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(MatrixFileError, match=message):
        read_matrix(str(path))


def test_missing_file(tmp_path):
    """Test unreadable paths."""
    with pytest.raises(MatrixFileError, match="cannot read file"):
        read_matrix(str(tmp_path / "absent.json"))


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_invalid_utf8(tmp_path, fmt):
    """Test undecodable bytes are reported with their byte offset."""
    path = tmp_path / f"bad.{fmt}"
    path.write_bytes(b'{"rows":1,"cols":1,"data":[1.0]}\xff\xfe')
    with pytest.raises(MatrixFileError, match="byte offset 32"):
        read_matrix(str(path))
