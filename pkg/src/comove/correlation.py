"""DCC(1,1) pseudo-correlation recursion and the six named co-movement series."""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from comove._backend import kernels
from comove.exceptions import ComoveError

__all__ = [
    "COMOVEMENT_PAIRS",
    "ComovementSeries",
    "CorrelationPath",
    "DccParams",
    "dcc_filter",
    "extract_comovements",
    "normalize_q",
    "read_comovements",
    "write_comovements",
]

# name -> zero-based (row, col) in the 5x5 correlation matrix
COMOVEMENT_PAIRS = {
    "rho_1a": (0, 2),  # Shibor-TB vs ER-TB
    "rho_1b": (1, 2),  # IR-TB vs ER-TB
    "rho_2a": (0, 4),  # Shibor-TB vs PFB-TB
    "rho_2b": (0, 3),  # Shibor-TB vs CP-TB
    "rho_2c": (1, 4),  # IR-TB vs PFB-TB
    "rho_2d": (1, 3),  # IR-TB vs CP-TB
}


def _check_correlation_matrix(S: np.ndarray, name: str = "S") -> None:
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"{name} must be square")
    if not np.allclose(S, S.T, rtol=0.0, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")
    if not np.allclose(np.diag(S), 1.0, rtol=0.0, atol=1e-12):
        raise ValueError(f"{name} must have a unit diagonal")
    if np.linalg.eigvalsh(S)[0] <= 0.0:
        raise ValueError(f"{name} must be positive definite")


@dataclass(frozen=True)
class DccParams:
    alpha: float
    beta: float
    S: np.ndarray
    nu: float

    def __post_init__(self) -> None:
        alpha, beta, nu = float(self.alpha), float(self.beta), float(self.nu)
        if alpha < 0 or beta < 0 or alpha + beta >= 1.0:
            raise ValueError("DCC parameters need alpha, beta >= 0 and alpha + beta < 1")
        if not nu > 2.0:
            raise ValueError("Student-t shape needs nu > 2")
        S = np.array(self.S, dtype=float)
        _check_correlation_matrix(S)
        S = 0.5 * (S + S.T)
        S.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "S", S)


@dataclass(frozen=True)
class CorrelationPath:
    Q: np.ndarray  # (n, k, k)
    R: np.ndarray  # (n, k, k)

    def __len__(self) -> int:
        return self.R.shape[0]


@dataclass(frozen=True)
class ComovementSeries:
    week_end: tuple[dt.date, ...]
    values: np.ndarray  # (n, 6), columns ordered as COMOVEMENT_PAIRS

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[:, list(COMOVEMENT_PAIRS).index(name)]

    def __len__(self) -> int:
        return len(self.week_end)


def normalize_q(Q) -> np.ndarray:
    """Rescale a positive-diagonal matrix to unit diagonal."""
    Q = np.asarray(Q, dtype=float)
    d = np.diag(Q)
    if np.any(~(d > 0)):
        raise ValueError("Q must have a strictly positive diagonal")
    sd = np.sqrt(d)
    R = Q / np.outer(sd, sd)
    np.fill_diagonal(R, 1.0)
    return R


def dcc_filter(eps, params: DccParams, q_init=None) -> CorrelationPath:
    """Run the DCC recursion over standardized residuals.

    ``Q[0]`` is ``q_init`` (default ``S``); ``Q[t]`` uses ``eps[t-1]``.
    """
    eps = np.ascontiguousarray(eps, dtype=float)
    n, k = eps.shape
    if params.S.shape != (k, k):
        raise ValueError("S does not match the number of series")
    q0 = params.S if q_init is None else np.asarray(q_init, dtype=float)
    Q = np.empty((n, k, k))
    R = np.empty((n, k, k))
    bad = kernels.dcc_recursion(
        eps, params.alpha, params.beta, np.ascontiguousarray(params.S),
        np.ascontiguousarray(q0), Q, R,
    )
    if bad:
        raise ComoveError(f"pseudo-correlation lost a positive diagonal at row {bad - 1}")
    return CorrelationPath(Q, R)


def extract_comovements(path: CorrelationPath, week_end) -> ComovementSeries:
    week_end = tuple(week_end)
    if len(week_end) != len(path):
        raise ValueError(f"{len(week_end)} dates for a path of length {len(path)}")
    cols = [path.R[:, i, j] for i, j in COMOVEMENT_PAIRS.values()]
    return ComovementSeries(week_end, np.column_stack(cols))


def write_comovements(series: ComovementSeries, path: str | Path,
                      full_path: CorrelationPath | None = None) -> None:
    """CSV of the six series; with ``full_path`` also every lower-triangle entry."""
    header = ["week_end"] + list(COMOVEMENT_PAIRS)
    extra = []
    if full_path is not None:
        k = full_path.R.shape[1]
        extra = [(i, j) for i in range(k) for j in range(i)]
        header += [f"r{i + 1}{j + 1}" for i, j in extra]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for t, day in enumerate(series.week_end):
            row = [day.isoformat()] + [repr(float(v)) for v in series.values[t]]
            if extra:
                row += [repr(float(full_path.R[t, i, j])) for i, j in extra]
            writer.writerow(row)


def read_comovements(path: str | Path) -> ComovementSeries:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[: 1 + len(COMOVEMENT_PAIRS)] != ["week_end"] + list(COMOVEMENT_PAIRS):
            raise ValueError(f"{path}: not a co-movement CSV")
        dates, rows = [], []
        for row in reader:
            dates.append(dt.date.fromisoformat(row[0]))
            rows.append([float(v) for v in row[1 : 1 + len(COMOVEMENT_PAIRS)]])
    return ComovementSeries(tuple(dates), np.array(rows).reshape(-1, len(COMOVEMENT_PAIRS)))
