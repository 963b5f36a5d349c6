"""Command-line interface: ``comove {spreads,test,fit,simulate,report}``."""

from __future__ import annotations

import argparse
import datetime as dt
import logging
import sys
from pathlib import Path

import numpy as np

from comove import __version__
from comove.correlation import read_comovements, write_comovements
from comove.data import SPREAD_LABELS, build_spreads, load_daily, load_panel, weekly_average, write_panel
from comove.estimation import MIN_WEEKS, FitConfig, fit
from comove.exceptions import ComoveError, IngestionError, PreconditionError
from comove.kvfile import read_kv
from comove.report import format_estimates, read_fit_report, write_fit_report
from comove.simulation import FIXTURE_SEED, SimSpec, daily_from_panel, make_fixture, simulate
from comove.stationarity import adf_test, pp_test
from comove.svgplot import render_comovements

logger = logging.getLogger("comove")


class UsageError(Exception):
    """Bad invocation: exit status 2."""


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p


def _load_panel(path: str):
    try:
        return load_panel(_require_file(path))
    except IngestionError as exc:
        raise UsageError(str(exc)) from None


def _unit_root_rows(panel):
    reports = []
    for i, label in enumerate(SPREAD_LABELS):
        reports.append(adf_test(panel.x[:, i], label=label))
        reports.append(pp_test(panel.x[:, i], label=label))
    return reports


def _print_unit_roots(reports, stream) -> None:
    head = f"{'series':<14}{'test':<6}{'stat':>10}{'lag/bw':>8}{'1%':>9}{'5%':>9}{'10%':>9}  reject5%"
    print(head, file=stream)
    for r in reports:
        cv = r.critical_values
        print(
            f"{r.series_label:<14}{r.test_name:<6}{r.statistic:>10.4f}{r.lags_or_bandwidth:>8d}"
            f"{cv['1%']:>9.4f}{cv['5%']:>9.4f}{cv['10%']:>9.4f}  {'yes' if r.reject_at_5pct else 'no'}",
            file=stream,
        )


def _warn_unit_roots(reports) -> None:
    for r in reports:
        if not r.reject_at_5pct:
            print(
                f"warning: {r.test_name} does not reject a unit root at 5% for {r.series_label}",
                file=sys.stderr,
            )


def _write_unit_root_csv(reports, path: Path) -> None:
    lines = ["series,test,statistic,lags_or_bandwidth,cv_1pct,cv_5pct,cv_10pct,reject_at_5pct"]
    for r in reports:
        cv = r.critical_values
        lines.append(
            f"{r.series_label},{r.test_name},{r.statistic!r},{r.lags_or_bandwidth},"
            f"{cv['1%']!r},{cv['5%']!r},{cv['10%']!r},{'true' if r.reject_at_5pct else 'false'}"
        )
    path.write_text("\n".join(lines) + "\n")


def cmd_spreads(args) -> int:
    try:
        table = load_daily(_require_file(args.daily))
    except IngestionError as exc:
        raise UsageError(str(exc)) from None
    panel = build_spreads(weekly_average(table))
    write_panel(panel, args.output)
    print(f"wrote {len(panel)} weeks to {args.output}")
    return 0


def cmd_test(args) -> int:
    panel = _load_panel(args.panel)
    reports = _unit_root_rows(panel)
    _print_unit_roots(reports, sys.stdout)
    _warn_unit_roots(reports)
    if args.csv:
        _write_unit_root_csv(reports, Path(args.csv))
    return 0


def _load_config(path: str | None) -> FitConfig:
    if path is None:
        return FitConfig()
    try:
        return FitConfig.from_mapping(read_kv(_require_file(path)))
    except ValueError as exc:
        raise UsageError(f"bad config: {exc}") from None


def cmd_fit(args) -> int:
    panel = _load_panel(args.panel)
    config = _load_config(args.config)
    if len(panel) < MIN_WEEKS:
        raise PreconditionError(f"panel has {len(panel)} weeks; fitting needs at least {MIN_WEEKS}")
    reports = _unit_root_rows(panel)
    _warn_unit_roots(reports)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = fit(panel, config)
    write_comovements(report.comovements, out / "comovements.csv",
                      full_path=report.path if args.full_dump else None)
    write_fit_report(report, out / "fit.out", "comovements.csv", panel_file=Path(args.panel).name)
    render_comovements(report.comovements, out / "comovements.svg")
    print(format_estimates(report.params, report.std_errors))
    print(f"loglik = {report.loglik:.6f}  converged = {report.converged}  iterations = {report.iterations}")
    if not report.converged:
        print(f"warning: {report.message}", file=sys.stderr)
    if report.se_error:
        print(f"warning: standard errors unavailable: {report.se_error}", file=sys.stderr)
    return 0


_SPEC_KEYS = {
    "T": int, "seed": int, "burn_in": int, "covariate": str, "b_mean": float,
    "b_phi": float, "b_sigma": float, "nu": float, "alpha": float, "beta": float,
    "tau": float, "start": dt.date.fromisoformat, "daily": str, "fixture": str,
}


def _read_spec(path: str) -> dict:
    raw = read_kv(_require_file(path))
    spec = {}
    for key, value in raw.items():
        if key not in _SPEC_KEYS:
            raise UsageError(f"unknown simulation key {key!r}")
        try:
            spec[key] = _SPEC_KEYS[key](value)
        except ValueError:
            raise UsageError(f"bad value for {key}: {value!r}") from None
    return spec


def cmd_simulate(args) -> int:
    from comove.reference import reference_params

    spec = _read_spec(args.spec) if args.spec else {}
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.fixture or spec.get("fixture", "false").lower() == "true":
        path, seed = make_fixture(out / "fixture_daily.csv", seed=spec.get("seed", FIXTURE_SEED))
        print(f"wrote {path} (seed {seed})")
        return 0
    if not args.spec:
        raise UsageError("simulate needs --spec <file> or --fixture")
    overrides = {k: spec[k] for k in ("alpha", "beta", "tau") if k in spec}
    try:
        params = reference_params(nu=spec.get("nu", 8.0), **overrides)
        sim = SimSpec(
            params,
            T=spec.get("T", 252),
            seed=spec.get("seed", 0),
            covariate=spec.get("covariate", "ar1"),
            b_mean=spec.get("b_mean", 3.0),
            b_phi=spec.get("b_phi", 0.95),
            b_sigma=spec.get("b_sigma", 0.1),
            burn_in=spec.get("burn_in", 100),
            start=spec.get("start", dt.date(2011, 6, 17)),
        )
    except ValueError as exc:
        raise UsageError(f"bad simulation spec: {exc}") from None
    panel = simulate(sim)
    write_panel(panel, out / "panel.csv")
    print(f"wrote {len(panel)} weeks to {out / 'panel.csv'}")
    if spec.get("daily", "false").lower() == "true":
        from comove.data import write_daily

        write_daily(daily_from_panel(panel, seed=sim.seed), out / "daily.csv")
        print(f"wrote {out / 'daily.csv'}")
    return 0


def cmd_report(args) -> int:
    path = _require_file(args.fit_out)
    try:
        loaded = read_fit_report(path)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(format_estimates(loaded.params, loaded.std_errors))
    for key in ("loglik", "converged", "iterations", "gradient_norm"):
        if key in loaded.raw:
            print(f"{key} = {loaded.raw[key]}")
    csv_path = path.parent / loaded.comovements_csv
    if csv_path.is_file():
        series = read_comovements(csv_path)
        svg = Path(args.svg) if args.svg else path.parent / "comovements.svg"
        render_comovements(series, svg)
        summary = series.values
        print(f"{'series':<8}{'min':>9}{'mean':>9}{'max':>9}")
        from comove.correlation import COMOVEMENT_PAIRS

        for k, name in enumerate(COMOVEMENT_PAIRS):
            col = summary[:, k]
            print(f"{name:<8}{np.min(col):>9.4f}{np.mean(col):>9.4f}{np.max(col):>9.4f}")
        print(f"wrote {svg}")
    else:
        print(f"warning: {csv_path} not found; plots not rendered", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="comove",
        description="Liquidity co-movements from weekly money-market spreads (AR-DCC-GARCH, Student-t QML).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spreads", help="daily rate CSV -> weekly spread panel CSV")
    p.add_argument("daily")
    p.add_argument("-o", "--output", default="panel.csv")
    p.set_defaults(func=cmd_spreads)

    p = sub.add_parser("test", help="ADF and Phillips-Perron tests on each spread")
    p.add_argument("panel")
    p.add_argument("--csv", help="also write the reports to this CSV")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("fit", help="QML fit; writes fit.out, comovements.csv, comovements.svg")
    p.add_argument("panel")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--full-dump", action="store_true",
                   help="append all 10 lower-triangle correlations to the CSV")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="synthetic panel from the reference parameters")
    p.add_argument("--spec", help="flat key = value simulation spec")
    p.add_argument("--fixture", action="store_true", help="write the bundled daily fixture")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="re-render tables and plots from fit.out")
    p.add_argument("fit_out")
    p.add_argument("--svg", help="output SVG path (default: next to fit.out)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"comove: error: {exc}", file=sys.stderr)
        return 2
    except ComoveError as exc:
        print(f"comove: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
