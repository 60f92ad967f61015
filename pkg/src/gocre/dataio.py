"""CSV ingestion and emission.

Files must carry a header row. Cells are parsed as decimal floats; the
writer emits shortest round-trip decimals so a write/read cycle reproduces
the matrix bit for bit.
"""

from __future__ import annotations

import csv

import numpy as np

from .engine import Dataset
from .errors import DataFormatError, DataParseError


def _read_table(path):
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty, expected a header row")
        header = [name.strip() for name in header]
        if any(not name for name in header):
            raise DataFormatError(f"{path}: header contains an empty column name")
        width = len(header)
        rows = []
        for i, row in enumerate(reader, start=1):
            if len(row) != width:
                raise DataFormatError(
                    f"{path}: data row {i} has {len(row)} fields, expected {width}"
                )
            parsed = np.empty(width)
            for j, cell in enumerate(row):
                try:
                    parsed[j] = float(cell)
                except ValueError:
                    raise DataParseError(i, header[j], cell) from None
            rows.append(parsed)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return header, np.vstack(rows)


def _resolve_column(header, response):
    """Find the response column by name, falling back to a 0-based index."""
    if isinstance(response, str):
        if response in header:
            return header.index(response)
        try:
            index = int(response)
        except ValueError:
            raise ValueError(
                f"response column {response!r} not found; available: {', '.join(header)}"
            ) from None
    else:
        index = int(response)
    if not 0 <= index < len(header):
        raise ValueError(
            f"response column index {index} out of range for {len(header)} columns"
        )
    return index


def load_csv(path, response):
    """Load a dataset from CSV, splitting off the named response column.

    ``response`` may be a column name or a 0-based column index (as an int,
    or a string holding one when no column has that literal name).
    """
    header, table = _read_table(path)
    idx = _resolve_column(header, response)
    if len(header) < 2:
        raise ValueError("the file needs at least one feature column besides the response")
    mask = np.ones(len(header), dtype=bool)
    mask[idx] = False
    return Dataset(
        X=table[:, mask],
        y=table[:, idx],
        feature_names=[name for j, name in enumerate(header) if j != idx],
        response_name=header[idx],
    )


def load_matrix_csv(path):
    """Load a plain numeric matrix with a header; returns (names, matrix)."""
    return _read_table(path)


def save_csv(dataset, path):
    """Write a dataset as CSV (response first) at full precision."""
    names = dataset.feature_names or [f"x{j}" for j in range(dataset.p)]
    response = dataset.response_name or "y"
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([response, *names])
        for i in range(dataset.n):
            writer.writerow(
                [repr(float(dataset.y[i])), *(repr(float(v)) for v in dataset.X[i])]
            )
