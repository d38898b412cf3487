"""CSV interchange for observation panels.

First row: variable names.  Following rows: one time point each, comma
delimited, decimal points, no thousands separators.
"""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from .estimators import ObservationMatrix


def read_observations(path) -> ObservationMatrix:
    with open(path, "r", newline="") as fh:
        return parse_observations(fh)


def parse_observations(fh) -> ObservationMatrix:
    reader = csv.reader(fh)
    try:
        names = next(reader)
    except StopIteration:
        raise ValueError("empty observation file") from None
    names = [n.strip() for n in names]
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(names):
            raise ValueError(
                f"line {lineno}: {len(row)} fields, header has {len(names)}"
            )
        try:
            rows.append([float(v) for v in row])
        except ValueError as err:
            raise ValueError(f"line {lineno}: {err}") from None
    return ObservationMatrix(tuple(names), np.array(rows, dtype=float))


def write_observations(path, obs: ObservationMatrix):
    Path(path).write_text(format_observations(obs))


def format_observations(obs: ObservationMatrix) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(obs.names)
    for row in obs.data:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
