"""Daily rate ingestion, weekly averaging and spread construction."""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from itertools import groupby
from pathlib import Path

import numpy as np

from comove.exceptions import IngestionError, PanelError

__all__ = [
    "DAILY_COLUMNS",
    "PANEL_COLUMNS",
    "RATE_NAMES",
    "SPREAD_LABELS",
    "DailyRateTable",
    "SpreadPanel",
    "WeeklyRates",
    "build_spreads",
    "load_daily",
    "load_panel",
    "weekly_average",
    "write_daily",
    "write_panel",
]

RATE_NAMES = ("shibor_1m", "ir_1m", "er_1m", "cp_1m", "pfb_1m", "tb_1m")
DAILY_COLUMNS = ("date",) + RATE_NAMES
SPREAD_LABELS = ("x1_shibor_tb", "x2_ir_tb", "x3_er_tb", "x4_cp_tb", "x5_pfb_tb")
PANEL_COLUMNS = ("week_end",) + SPREAD_LABELS + ("b_tb_yield",)


def _validate_dates(dates: tuple[dt.date, ...], what: str) -> None:
    for prev, cur in zip(dates, dates[1:]):
        if cur <= prev:
            raise ValueError(f"{what} must be strictly increasing ({prev} then {cur})")


@dataclass(frozen=True)
class DailyRateTable:
    """Six daily 1-month rates in percent per annum.

    ``rates`` has shape (n_days, 6) with columns ordered as ``RATE_NAMES``.
    """

    dates: tuple[dt.date, ...]
    rates: np.ndarray

    def __post_init__(self) -> None:
        rates = np.asarray(self.rates, dtype=float)
        if rates.ndim != 2 or rates.shape != (len(self.dates), len(RATE_NAMES)):
            raise ValueError("rates must have shape (n_days, 6)")
        if not np.all(np.isfinite(rates)):
            raise ValueError("rates must be finite")
        if np.any(rates < 0):
            raise ValueError("rates must be non-negative")
        _validate_dates(self.dates, "dates")
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class WeeklyRates:
    """Per-ISO-week mean of each daily rate; ``week_end`` is the last trading day."""

    week_end: tuple[dt.date, ...]
    rates: np.ndarray
    n_days: np.ndarray


@dataclass(frozen=True)
class SpreadPanel:
    """Weekly spreads ``x`` (T, 5) in percentage points and TB yield ``b`` (T,)."""

    week_end: tuple[dt.date, ...]
    x: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if x.ndim != 2 or x.shape[1] != len(SPREAD_LABELS):
            raise PanelError("spread panel needs exactly 5 spread columns")
        if b.shape != (x.shape[0],) or len(self.week_end) != x.shape[0]:
            raise PanelError("panel columns have mismatched lengths")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(b))):
            raise PanelError("panel values must be finite")
        try:
            _validate_dates(self.week_end, "week_end")
        except ValueError as exc:
            raise PanelError(str(exc)) from None
        x = np.ascontiguousarray(x)
        b = np.ascontiguousarray(b)
        x.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "b", b)

    def __len__(self) -> int:
        return self.x.shape[0]

    def slice(self, start: int | None = None, stop: int | None = None) -> "SpreadPanel":
        return SpreadPanel(self.week_end[start:stop], self.x[start:stop], self.b[start:stop])


def _parse_date(text: str, lineno: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise IngestionError(f"line {lineno}: bad date {text!r}") from None


def _parse_rate(text: str, column: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise IngestionError(f"line {lineno}: bad value {text!r} in {column}") from None
    if not math.isfinite(value):
        raise IngestionError(f"line {lineno}: non-finite value {text!r} in {column}")
    if value < 0:
        raise IngestionError(f"line {lineno}: negative rate {value} in {column}")
    return value


def _read_rows(path: Path, columns: tuple[str, ...]) -> list[tuple[int, list[str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != columns:
            raise IngestionError(
                f"{path}: header must be {','.join(columns)}, got {','.join(header)}"
            )
        rows = []
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(columns):
                raise IngestionError(
                    f"line {reader.line_num}: expected {len(columns)} fields, got {len(row)}"
                )
            rows.append((reader.line_num, row))
    return rows


def load_daily(path: str | Path) -> DailyRateTable:
    """Read and validate a daily rate CSV.

    A blank cell marks a rate that was not published that day; such a day is
    dropped entirely so that all six weekly means use the same trading days.
    Any other unparsable or non-finite cell is an error.
    """
    parsed: dict[dt.date, tuple[int, list[float]]] = {}
    for lineno, row in _read_rows(Path(path), DAILY_COLUMNS):
        day = _parse_date(row[0], lineno)
        if day in parsed:
            raise IngestionError(
                f"line {lineno}: duplicate date {day} (first seen on line {parsed[day][0]})"
            )
        cells = [c.strip() for c in row[1:]]
        if any(c == "" for c in cells):
            parsed[day] = (lineno, [])
            continue
        parsed[day] = (
            lineno,
            [_parse_rate(c, name, lineno) for c, name in zip(cells, RATE_NAMES)],
        )
    days = sorted(d for d, (_, vals) in parsed.items() if vals)
    rates = np.array([parsed[d][1] for d in days], dtype=float).reshape(-1, len(RATE_NAMES))
    return DailyRateTable(tuple(days), rates)


def weekly_average(table: DailyRateTable) -> WeeklyRates:
    """Average each rate over the trading days of every ISO (Mon-Sun) week."""
    if len(table) == 0:
        raise PanelError("daily table is empty")
    week_end, means, counts = [], [], []
    indices = range(len(table))
    for _, group in groupby(indices, key=lambda i: table.dates[i].isocalendar()[:2]):
        idx = list(group)
        week_end.append(table.dates[idx[-1]])
        means.append(table.rates[idx].mean(axis=0))
        counts.append(len(idx))
    return WeeklyRates(tuple(week_end), np.array(means), np.array(counts))


def build_spreads(weekly: WeeklyRates) -> SpreadPanel:
    """Subtract the TB yield from the other five weekly rates."""
    rates = np.asarray(weekly.rates, dtype=float)
    if rates.ndim != 2 or rates.shape[1] != len(RATE_NAMES):
        raise PanelError("weekly rates must carry all six series")
    if rates.shape[0] != len(weekly.week_end):
        raise PanelError("weekly rates and week_end have different lengths")
    if not np.all(np.isfinite(rates)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(rates), axis=1))[0])
        raise PanelError(f"missing rate in week ending {weekly.week_end[bad]}")
    tb = rates[:, -1]
    return SpreadPanel(weekly.week_end, rates[:, :-1] - tb[:, None], tb.copy())


def write_daily(table: DailyRateTable, path: str | Path, decimals: int = 6) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DAILY_COLUMNS)
        for day, row in zip(table.dates, table.rates):
            writer.writerow([day.isoformat()] + [f"{v:.{decimals}f}" for v in row])


def write_panel(panel: SpreadPanel, path: str | Path) -> None:
    """Write a panel CSV; floats use ``repr`` so a reload is exact."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PANEL_COLUMNS)
        for day, xs, b in zip(panel.week_end, panel.x, panel.b):
            writer.writerow([day.isoformat()] + [repr(float(v)) for v in xs] + [repr(float(b))])


def load_panel(path: str | Path) -> SpreadPanel:
    dates, rows = [], []
    for lineno, row in _read_rows(Path(path), PANEL_COLUMNS):
        dates.append(_parse_date(row[0], lineno))
        values = []
        for cell, name in zip(row[1:], PANEL_COLUMNS[1:]):
            try:
                v = float(cell)
            except ValueError:
                raise IngestionError(f"line {lineno}: bad value {cell!r} in {name}") from None
            if not math.isfinite(v):
                raise IngestionError(f"line {lineno}: non-finite value in {name}")
            values.append(v)
        rows.append(values)
    arr = np.array(rows, dtype=float).reshape(-1, len(PANEL_COLUMNS) - 1)
    try:
        return SpreadPanel(tuple(dates), arr[:, :5], arr[:, 5])
    except PanelError as exc:
        raise IngestionError(f"{path}: {exc}") from None
