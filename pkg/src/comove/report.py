"""Fit report serialization and text tables."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from comove.estimation import FitReport, significance_stars
from comove.kvfile import read_kv, write_kv
from comove.likelihood import SystemParams
from comove.transforms import PARAM_NAMES, pack, unpack

__all__ = ["LoadedReport", "format_estimates", "read_fit_report", "write_fit_report"]

HEADER = (
    "comove fit report\n"
    "AR(1)-DCC(1,1)-GARCH(1,1), multivariate Student-t innovations\n"
    "keys: <param> estimate, se.<param> standard error, stars.<param> significance,\n"
    "S.i.j targeted unconditional correlation (i < j)"
)


def _series_columns():
    return ("Shibor-TB", "IR-TB", "ER-TB", "CP-TB", "PFB-TB")


def write_fit_report(report: FitReport, path: str | Path, comovements_csv: str = "comovements.csv",
                     panel_file: str = "") -> None:
    est = pack(report.params)
    items = [
        ("panel", panel_file),
        ("n_weeks", report.n_weeks),
        ("first_week", report.comovements.week_end[0].isoformat()),
        ("last_week", report.comovements.week_end[-1].isoformat()),
        ("loglik", float(report.loglik)),
        ("init_loglik", float(report.init_loglik)),
        ("converged", bool(report.converged)),
        ("iterations", int(report.iterations)),
        ("gradient_norm", float(report.gradient_norm)),
        ("message", report.message),
        ("se_error", report.se_error),
    ]
    items += [(f"config.{k}", v) for k, v in report.config.items()]
    stars = report.stars
    for name, value, se in zip(PARAM_NAMES, est, report.std_errors):
        items.append((name, float(value)))
        items.append((f"se.{name}", float(se)))
        items.append((f"stars.{name}", stars[name]))
    S = report.params.correlation.S
    for i in range(5):
        for j in range(i + 1, 5):
            items.append((f"S.{i + 1}.{j + 1}", float(S[i, j])))
    items.append(("comovements_csv", comovements_csv))
    write_kv(path, items, HEADER)


@dataclass(frozen=True)
class LoadedReport:
    raw: dict[str, str]
    params: SystemParams
    std_errors: np.ndarray

    @property
    def comovements_csv(self) -> str:
        return self.raw.get("comovements_csv", "comovements.csv")


def read_fit_report(path: str | Path) -> LoadedReport:
    raw = read_kv(path)
    try:
        est = np.array([float(raw[name]) for name in PARAM_NAMES])
        se = np.array([float(raw[f"se.{name}"]) for name in PARAM_NAMES])
        S = np.eye(5)
        for i in range(5):
            for j in range(i + 1, 5):
                S[i, j] = S[j, i] = float(raw[f"S.{i + 1}.{j + 1}"])
    except KeyError as exc:
        raise ValueError(f"{path}: missing key {exc.args[0]}") from None
    return LoadedReport(raw, unpack(est, S), se)


def _cell(value: float, se: float) -> str:
    stars = significance_stars(value, se)
    se_txt = f"({se:.3f})" if math.isfinite(se) else "(n/a)"
    return f"{value:.3f}{stars:<3} {se_txt}"


def format_estimates(params: SystemParams, std_errors) -> str:
    """Table of estimates in the published layout: one column per spread."""
    est = dict(zip(PARAM_NAMES, pack(params)))
    se = dict(zip(PARAM_NAMES, np.asarray(std_errors, dtype=float)))
    width = 18
    lines = [" " * 8 + "".join(f"{c:>{width}}" for c in _series_columns())]

    def row(label, names):
        cells = [_cell(est[n], se[n]) if n else "" for n in names]
        lines.append(f"{label:<8}" + "".join(f"{c:>{width}}" for c in cells))

    lines.append("Conditional mean: AR(1)")
    row("mu", [f"mu{i}" for i in range(1, 6)])
    row("phi", [f"phi{i}" for i in range(1, 6)])
    row("tau", ["", "", "", "", "tau"])
    lines.append("Conditional variance: GARCH(1,1)")
    row("omega", [f"omega{i}" for i in range(1, 6)])
    row("kappa", [f"kappa{i}" for i in range(1, 6)])
    row("lambda", [f"lambda{i}" for i in range(1, 6)])
    lines.append("Conditional correlation: DCC(1,1)")
    row("alpha", ["alpha"])
    row("beta", ["beta"])
    row("nu", ["nu"])
    lines.append("*: 10%, **: 5%, ***: 1% (two-sided)")
    return "\n".join(lines)
