"""
Matrix file reading and writing.

Two formats:
  - json: {"rows": r, "cols": c, "data": [row-major floats]}
  - csv:  one matrix row per line, comma separated, 17 significant digits

Both reproduce every float64 entry exactly on a write/read round trip.
"""
import io
import json
import logging
import math
import os
from typing import Optional

import numpy as np
import pandas as pd

from gds_core.dense import as_matrix, frozen
from gds_core.errors import MatrixFileError

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv')
CSV_FLOAT_FORMAT = '%.16e'


def infer_format(path: str, fmt: Optional[str] = None) -> str:
    """Explicit format wins; otherwise the file extension decides, defaulting to json."""
    if fmt:
        if fmt not in FORMATS:
            raise MatrixFileError(f"unknown matrix format '{fmt}'; expected one of {', '.join(FORMATS)}")
        return fmt
    ext = os.path.splitext(path)[1].lower().lstrip('.')
    return ext if ext in FORMATS else 'json'


def write_matrix(a, path: str, fmt: Optional[str] = None):
    """
    Write a matrix file.

    Args:
        a: Matrix to store
        path: Destination path (parent directories are created)
        fmt: 'json' or 'csv'; inferred from the extension when omitted
    """
    m = as_matrix(a)
    fmt = infer_format(path, fmt)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    if fmt == 'json':
        payload = {'rows': m.shape[0], 'cols': m.shape[1], 'data': [float(v) for v in m.ravel()]}
        with open(path, 'w') as f:
            json.dump(payload, f)
            f.write('\n')
    else:
        pd.DataFrame(m).to_csv(path, header=False, index=False,
                               float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    logger.debug(f"wrote {m.shape[0]}x{m.shape[1]} matrix to {path} ({fmt})")


def read_matrix(path: str, fmt: Optional[str] = None) -> np.ndarray:
    """
    Read a matrix file.

    Raises:
        MatrixFileError: Unreadable or malformed file; the message names the line/offset
    """
    fmt = infer_format(path, fmt)
    try:
        with open(path, "rb") as f:
            text = f.read().decode("utf-8")
    except UnicodeDecodeError as e:
        raise MatrixFileError(f"{path}: byte offset {e.start}: not valid UTF-8 text") from None
    except OSError as e:
        raise MatrixFileError(f"{path}: cannot read file: {e}") from None
    if fmt == 'json':
        return _parse_json(text, path)
    return _parse_csv(text, path)


def _parse_json(text: str, path: str) -> np.ndarray:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixFileError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None

    if not isinstance(payload, dict):
        raise MatrixFileError(f"{path}: top-level value must be an object")
    for key in ('rows', 'cols', 'data'):
        if key not in payload:
            raise MatrixFileError(f"{path}: missing key '{key}'")
    rows, cols, data = payload['rows'], payload['cols'], payload['data']
    for key, value in (('rows', rows), ('cols', cols)):
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise MatrixFileError(f"{path}: '{key}' must be a positive integer, got {value!r}")
    if not isinstance(data, list):
        raise MatrixFileError(f"{path}: 'data' must be an array")
    if len(data) != rows * cols:
        raise MatrixFileError(f"{path}: 'data' holds {len(data)} entries, expected rows*cols = {rows * cols}")
    for k, value in enumerate(data):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise MatrixFileError(f"{path}: data[{k}] (row {k // cols + 1}, column {k % cols + 1}) "
                                  f"is not a finite number: {value!r}")
    return frozen(np.array(data, dtype=np.float64).reshape(rows, cols))


def _parse_csv(text: str, path: str) -> np.ndarray:
    if not text.strip():
        raise MatrixFileError(f"{path}: empty file")
    try:
        df = pd.read_csv(io.StringIO(text), header=None, dtype=str,
                         keep_default_na=False, skip_blank_lines=False)
    except pd.errors.ParserError as e:
        # pandas reports e.g. "Expected 3 fields in line 4, saw 4"
        raise MatrixFileError(f"{path}: {e}") from None

    raw = df.to_numpy()
    numeric = np.empty(raw.shape)
    # rows map one-to-one onto file lines, blank ones included
    for i, row in enumerate(raw):
        if all(not isinstance(cell, str) or not cell.strip() for cell in row):
            raise MatrixFileError(f"{path}: line {i + 1}: blank line")
    for (i, j), cell in np.ndenumerate(raw):
        # short lines are padded by pandas with a float NaN
        cell = cell.strip() if isinstance(cell, str) else ''
        if cell == '':
            raise MatrixFileError(f"{path}: line {i + 1}, field {j + 1}: missing value "
                                  f"(expected {raw.shape[1]} fields per line)")
        try:
            value = float(cell)
        except ValueError:
            raise MatrixFileError(f"{path}: line {i + 1}, field {j + 1}: not a number: {cell!r}") from None
        if not math.isfinite(value):
            raise MatrixFileError(f"{path}: line {i + 1}, field {j + 1}: non-finite value {cell!r}")
        numeric[i, j] = value
    return frozen(numeric)
