"""Time series container, CSV ingestion, differencing and fit scoring.

Observations are indexed by their position ``t = 1, 2, ..., N`` (months in the
S&P application).  Calendar labels, when present, ride along as metadata.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class SeriesError(ValueError):
    """Raised for invalid or unreadable series input."""


@dataclass(frozen=True)
class TimeSeries:
    """Ordered observations on a uniform index grid.

    Parameters
    ----------
    values : array_like
        Finite real observations.
    t : array_like, optional
        Time index of each observation.  Defaults to ``1..N``.  First
        differences sit at the midpoints of the two samples they span.
    labels : tuple of str, optional
        Calendar tags, informational only.
    """

    values: np.ndarray
    t: np.ndarray = None
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise SeriesError("series values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise SeriesError("series contains non-finite values")
        if self.t is None:
            t = np.arange(1, values.size + 1, dtype=float)
        else:
            t = np.array(self.t, dtype=float)
            if t.shape != values.shape:
                raise SeriesError("time index and values differ in length")
        values.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self):
        return self.values.size

    def head(self, n):
        """First ``n`` observations."""
        return TimeSeries(self.values[:n], self.t[:n], self.labels[:n])


@dataclass(frozen=True)
class FitReport:
    r_squared: float
    rmse: float
    residuals: np.ndarray

    def to_dict(self, include_residuals=False):
        """JSON-ready fields; an undefined R^2 (constant data) becomes None."""
        r2 = float(self.r_squared)
        out = {"r_squared": None if np.isnan(r2) else r2, "rmse": float(self.rmse)}
        if include_residuals:
            out["residuals"] = [float(r) for r in self.residuals]
        return out


def ingest_csv(path, column=1):
    """Read one numeric column of a headed CSV file into a `TimeSeries`.

    Parameters
    ----------
    path : str or Path
        UTF-8 CSV with a header row.
    column : str or int
        Header name of the value column, or its zero-based position.  The
        first column is taken as the calendar label when it is not the value
        column.

    Returns
    -------
    TimeSeries
        Rows in file order, the first row mapped to ``t = 1``.

    Raises
    ------
    SeriesError
        Missing file, unknown column, unparseable or blank cell (the message
        names the 1-based data row), or fewer than two rows.
    """
    path = Path(path)
    if not path.is_file():
        raise SeriesError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SeriesError(f"{path}: empty file") from None
        if isinstance(column, str) and not column.isdigit():
            if column not in header:
                raise SeriesError(f"{path}: no column named {column!r}")
            col = header.index(column)
        else:
            col = int(column)
            if not 0 <= col < len(header):
                raise SeriesError(f"{path}: column index {col} out of range")
        label_col = 0 if col != 0 else None

        values, labels = [], []
        for row_no, row in enumerate(reader, start=1):
            if not row:
                continue
            cell = row[col].strip() if col < len(row) else ""
            if not cell:
                raise SeriesError(f"{path}: blank value at row {row_no}")
            try:
                value = float(cell)
            except ValueError:
                raise SeriesError(
                    f"{path}: cannot parse {cell!r} at row {row_no}") from None
            if not np.isfinite(value):
                raise SeriesError(f"{path}: non-finite value at row {row_no}")
            values.append(value)
            labels.append(row[label_col] if label_col is not None else "")

    if not values:
        raise SeriesError(f"{path}: empty series")
    if len(values) < 2:
        raise SeriesError(f"{path}: series too short ({len(values)} row)")
    return TimeSeries(np.array(values), labels=tuple(labels))


def write_csv(series, path, value_name="value"):
    """Write ``series`` as ``label,value`` rows; floats keep 17 significant digits."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", value_name])
        labels = series.labels or tuple(f"{t:g}" for t in series.t)
        for label, value in zip(labels, series.values):
            writer.writerow([label, format(float(value), ".17g")])
    return path


def first_difference(s):
    """``x[k+1] - x[k]``, stamped at the midpoint of the two samples."""
    if len(s) < 2:
        raise SeriesError("first difference needs at least two observations")
    values = np.diff(s.values)
    t = 0.5 * (s.t[1:] + s.t[:-1])
    return TimeSeries(values, t)


def cumulative(s):
    """Running sum ``y_n = x_1 + ... + x_n`` on the same time index."""
    return TimeSeries(np.cumsum(s.values), s.t, s.labels)


def fit_metrics(observed, predicted):
    """Coefficient of determination and RMSE of ``predicted`` against ``observed``.

    Accepts `TimeSeries` or plain arrays.
    """
    obs = np.asarray(getattr(observed, "values", observed), dtype=float)
    pred = np.asarray(getattr(predicted, "values", predicted), dtype=float)
    if obs.shape != pred.shape:
        raise SeriesError(
            f"length mismatch: observed {obs.size}, predicted {pred.size}")
    if obs.size < 2:
        raise SeriesError("fit metrics need at least two observations")
    resid = obs - pred
    # the mean of equal values can differ from them by an ulp, so test directly
    if np.all(obs == obs[0]):
        raise SeriesError("observed series is constant; R^2 undefined")
    ss_tot = np.sum((obs - obs.mean()) ** 2)
    ss_res = np.sum(resid ** 2)
    return FitReport(
        r_squared=float(1.0 - ss_res / ss_tot),
        rmse=float(np.sqrt(np.mean(resid ** 2))),
        residuals=resid,
    )
