"""CSV ingestion, synthetic series generation and plot-data export."""
from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .calibration import TimeSeries
from .errors import DataError
from .growth_core import SolutionSpec, closed_form

__all__ = [
    "Dataset",
    "default_seed",
    "file_checksum",
    "load_csv",
    "load_dataset",
    "generate",
    "series_to_csv",
    "write_plot_tsv",
]

SEED_ENV = "SATGROWTH_SEED"


def default_seed(explicit: Optional[int] = None) -> int:
    """Seed precedence: explicit value, then ``$SATGROWTH_SEED``, then 0."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(SEED_ENV, "").strip()
    if env:
        try:
            return int(env)
        except ValueError:
            raise DataError(f"{SEED_ENV}={env!r} is not an integer") from None
    return 0


def file_checksum(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _read_rows(path):
    """Header and ``(line_number, row)`` pairs, skipping blanks and ``#`` comments."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [(i, ln) for i, ln in enumerate(fh, start=1) if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DataError(f"{path}: no header row")
    reader = csv.reader(io.StringIO("".join(ln for _, ln in lines)))
    rows = list(reader)
    header = [h.strip() for h in rows[0]]
    return header, [(lines[k][0], row) for k, row in enumerate(rows[1:], start=1)]


def _column_index(header, column, default, path):
    if column is None:
        if default >= len(header):
            raise DataError(f"{path}: expected at least {default + 1} columns, header has {len(header)}")
        return default
    if isinstance(column, int):
        if not 0 <= column < len(header):
            raise DataError(f"{path}: column index {column} out of range")
        return column
    if column not in header:
        raise DataError(f"{path}: missing column {column!r} (header: {header})")
    return header.index(column)


def _parse_columns(path, header, rows, t_idx, value_idxs):
    years, values = [], [[] for _ in value_idxs]
    lines = []
    for line_no, row in rows:
        needed = max([t_idx, *value_idxs])
        if len(row) <= needed:
            raise DataError(f"{path}: line {line_no}: expected {needed + 1} columns, got {len(row)}")
        try:
            years.append(float(row[t_idx]))
        except ValueError:
            raise DataError(f"{path}: line {line_no}: non-numeric time {row[t_idx]!r}") from None
        for k, j in enumerate(value_idxs):
            try:
                values[k].append(float(row[j]))
            except ValueError:
                raise DataError(f"{path}: line {line_no}: non-numeric value {row[j]!r} in column {header[j]!r}") from None
        lines.append(line_no)
    if not years:
        raise DataError(f"{path}: no data rows")
    for k in range(1, len(years)):
        if years[k] == years[k - 1]:
            raise DataError(f"{path}: line {lines[k]}: duplicate time {years[k]:g}")
        if years[k] < years[k - 1]:
            raise DataError(f"{path}: line {lines[k]}: time {years[k]:g} is out of order")
    bad = [lines[k] for k, y in enumerate(years) if not math.isfinite(y)]
    if bad:
        raise DataError(f"{path}: non-finite time on lines {bad}")
    return np.array(years), [np.array(v) for v in values], lines


def load_csv(
    path,
    t_column=None,
    value_column=None,
    t_origin: Optional[float] = None,
    label: str = "other",
    units: str = "",
    require_positive: Optional[bool] = None,
) -> TimeSeries:
    """Read one ``(year, value)`` series from a CSV file with a header row.

    Columns default to the first two. Calendar years are shifted so that
    ``t = 0`` at ``t_origin`` (default: the first row's year). Values must
    be positive unless ``require_positive`` is False; by default net
    earnings, which can be negative, are exempt.
    """
    header, rows = _read_rows(path)
    t_idx = _column_index(header, t_column, 0, path)
    v_idx = _column_index(header, value_column, 1, path)
    years, (values,), lines = _parse_columns(path, header, rows, t_idx, [v_idx])
    if require_positive is None:
        require_positive = label != "net-earnings"
    if require_positive:
        bad = [lines[k] for k in np.flatnonzero(~(values > 0))]
        if bad:
            raise DataError(f"{path}: non-positive values on lines {bad}")
    origin = float(years[0]) if t_origin is None else float(t_origin)
    return TimeSeries(t=years - origin, values=values, label=label, t_origin=origin, units=units)


@dataclass
class Dataset:
    series: dict
    provenance: dict
    units: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = [s.label for s in self.series.values()]
        if len(set(labels)) != len(labels):
            raise DataError(f"series labels must be unique, got {labels}")


def load_dataset(path, columns: dict, t_column=None, t_origin=None, units: Optional[dict] = None) -> Dataset:
    """Load several value columns sharing one time column.

    ``columns`` maps a CSV column name to its series label.
    """
    header, rows = _read_rows(path)
    t_idx = _column_index(header, t_column, 0, path)
    names = list(columns)
    idxs = [_column_index(header, name, None, path) for name in names]
    years, values, lines = _parse_columns(path, header, rows, t_idx, idxs)
    origin = float(years[0]) if t_origin is None else float(t_origin)
    units = units or {}
    series = {}
    for name, vals in zip(names, values):
        label = columns[name]
        if label != "net-earnings":
            bad = [lines[k] for k in np.flatnonzero(~(vals > 0))]
            if bad:
                raise DataError(f"{path}: column {name!r}: non-positive values on lines {bad}")
        series[label] = TimeSeries(years - origin, vals, label=label, t_origin=origin, units=units.get(label, ""))
    return Dataset(
        series=series,
        provenance={"path": str(path), "sha256": file_checksum(path)},
        units={lbl: units.get(lbl, "") for lbl in series},
    )


def generate(
    spec: SolutionSpec,
    t_grid: Sequence[float],
    sigma_log: float = 0.0,
    seed: Optional[int] = None,
    label: str = "other",
    units: str = "",
) -> TimeSeries:
    """Sample the closed form on ``t_grid`` with optional multiplicative
    log-normal noise of log-scale ``sigma_log``."""
    t = np.asarray(t_grid, dtype=float).reshape(-1)
    if t.size == 0 or not np.all(np.isfinite(t)) or (t.size > 1 and np.any(np.diff(t) <= 0)):
        raise DataError("t_grid must be a non-empty, finite, strictly increasing grid")
    if sigma_log < 0 or not math.isfinite(sigma_log):
        raise DataError("sigma_log must be a finite non-negative number")
    values = np.asarray(closed_form(spec, t), dtype=float).reshape(-1)
    if sigma_log > 0:
        rng = np.random.default_rng(default_seed(seed))
        values = values * np.exp(rng.normal(0.0, sigma_log, t.size))
    return TimeSeries(t=t, values=values, label=label, t_origin=spec.t_origin, units=units)


def series_to_csv(series: TimeSeries, comments: Sequence[str] = (), t_header="year", value_header="value") -> str:
    """Render a series as CSV text with calendar years in the first column."""
    out = io.StringIO()
    for line in comments:
        out.write(f"# {line}\n")
    out.write(f"{t_header},{value_header}\n")
    for t, v in zip(series.t, series.values):
        year = series.t_origin + float(t)
        year_text = str(int(year)) if year.is_integer() else repr(year)
        out.write(f"{year_text},{float(v)!r}\n")
    return out.getvalue()


def write_plot_tsv(path, t, columns: dict):
    """Write a tab-separated table: ``t`` then one column per entry of
    ``columns`` (``None`` entries become empty cells)."""
    names = list(columns)
    n = len(t)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(["t", *names]) + "\n")
        for i in range(n):
            cells = [repr(float(t[i]))]
            for name in names:
                col = columns[name]
                cells.append("" if col is None else repr(float(col[i])))
            fh.write("\t".join(cells) + "\n")
