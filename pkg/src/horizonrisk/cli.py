"""
Command-line front end.

    horizonrisk simulate --model sv --length 2000 --seed 1 --out runs/sim
    horizonrisk forecast --input returns.csv --horizon 10 --levels 0.01,0.05 --out runs/fc
    horizonrisk backtest --input returns.csv --horizon 10 --levels 0.05 --out runs/bt

Settings may also come from ``--config FILE`` (a JSON object keyed by the
long flag names with dashes replaced by underscores); explicit flags win.

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
from pathlib import Path
import sys
import tempfile

import numpy as np

from horizonrisk.backtest import rolling_backtest_levels
from horizonrisk.errors import (
    DataError,
    DegeneracyError,
    HorizonRiskError,
    InsufficientDataError,
    ParameterError,
    RangeError,
)
from horizonrisk.horizon import ForecastConfig, forecast_distribution
from horizonrisk.model_sim import (
    GarchParams,
    ReturnSeries,
    SVParams,
    simulate_garch,
    simulate_sv,
)
from horizonrisk.risk import risk_report
from horizonrisk.serial import forecast_correlated_distribution

__all__ = ["RunConfig", "ingest_returns", "main"]

log = logging.getLogger("horizonrisk")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DEGENERATE = 4

FLOAT_FMT = "%.17g"


def ingest_returns(
    path, column: str | int | None = None, as_prices: bool = False, fmt: str = "csv"
) -> ReturnSeries:
    """
    Read one column of a headed CSV file as returns.

    ``column`` is a header name or a 0-based index (default: the last
    column).  With ``as_prices`` the column holds prices and log returns
    ``ln(P_t / P_{t-1})`` are returned.  When the value column is not the
    first one, the first column is kept as timestamps.  Rows are numbered
    from 1 after the header.

    Raises
    ------
    DataError
        Missing file, malformed or non-numeric rows, non-finite or
        non-positive (prices) values, or no data rows.
    """
    if fmt != "csv":
        raise ParameterError(f"unsupported input format {fmt!r}")
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: file not found")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or not any(cell.strip() for cell in header):
            raise DataError(f"{path}: missing header row")
        header = [cell.strip() for cell in header]
        idx = _column_index(header, column, path)
        label = header[idx]
        values, stamps = [], []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {row_no} (line {row_no + 1}) has {len(row)} fields, "
                    f"expected {len(header)}"
                )
            cell = row[idx].strip()
            try:
                value = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {row_no} (line {row_no + 1}): non-numeric value "
                    f"{cell!r} in column {label!r}"
                ) from None
            if not math.isfinite(value):
                raise DataError(
                    f"{path}: row {row_no} (line {row_no + 1}): non-finite value "
                    f"{cell!r} in column {label!r}"
                )
            if as_prices and value <= 0.0:
                raise DataError(
                    f"{path}: row {row_no} (line {row_no + 1}): price {cell!r} is not positive"
                )
            values.append(value)
            stamps.append(row[0].strip())
    if not values:
        raise DataError(f"{path}: column {label!r} has no data rows")
    arr = np.array(values)
    keep_stamps = idx != 0
    if as_prices:
        if arr.size < 2:
            raise DataError(f"{path}: need at least 2 prices to form a return")
        arr = np.log(arr[1:] / arr[:-1])
        stamps = stamps[1:]
    return ReturnSeries(arr, tuple(stamps) if keep_stamps else None)


def _column_index(header: list[str], column, path: Path) -> int:
    if column is None:
        return len(header) - 1
    if isinstance(column, int) or (isinstance(column, str) and column.lstrip("-").isdigit()):
        idx = int(column)
        if not 0 <= idx < len(header):
            raise DataError(f"{path}: column index {idx} outside 0..{len(header) - 1}")
        return idx
    if column not in header:
        raise DataError(f"{path}: no column named {column!r}; header is {header}")
    return header.index(column)


# --------------------------------------------------------------------------
# configuration

DEFAULTS = {
    "input": None,
    "column": None,
    "as_prices": False,
    "mode": "whitenoise",
    "n": None,
    "horizon": 10,
    "draws": 10000,
    "seed": 0,
    "levels": [0.01, 0.05],
    "sign": "symmetric",
    "lambda": None,
    "out": None,
    "stride": None,
    "start": None,
    "workers": 1,
    "no_clip": False,
    # simulate
    "model": "sv",
    "length": 2000,
    "burnin": 1000,
    "shocks": "normal",
    "shape": None,
    "mu": 0.0,
    "delta0": 0.01,
    "phi": 0.9,
    "sigma_eta": 0.3,
    "trunc": 200,
    "alpha0": 1e-6,
    "alpha": [0.9],
    "beta": [0.05],
}


class RunConfig(dict):
    """Merged settings of one command: defaults, then config file, then flags."""

    @classmethod
    def build(cls, command: str, args: argparse.Namespace) -> RunConfig:
        cfg = cls(DEFAULTS)
        if args.config:
            cfg.update(_read_config(args.config))
        for key, value in vars(args).items():
            if key in ("command", "config") or value is None:
                continue
            cfg[key] = value
        cfg["command"] = command
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self["mode"] not in ("whitenoise", "correlated"):
            raise ParameterError(f"unknown mode {self['mode']!r}")
        if self["sign"] not in ("symmetric", "asymmetric"):
            raise ParameterError(f"unknown sign model {self['sign']!r}")
        if self["model"] not in ("sv", "garch"):
            raise ParameterError(f"unknown model {self['model']!r}")
        self["levels"] = _float_list(self["levels"], "levels")
        self["alpha"] = _float_list(self["alpha"], "alpha", allow_empty=True)
        self["beta"] = _float_list(self["beta"], "beta", allow_empty=True)
        for p in self["levels"]:
            if not 0.0 < p < 1.0:
                raise ParameterError(f"risk level {p} outside (0, 1)")
        for key in ("horizon", "draws", "length"):
            if int(self[key]) != self[key] or self[key] < 1:
                raise ParameterError(f"{key} must be a positive integer")
        if self["command"] in ("forecast", "backtest") and not self["input"]:
            raise ParameterError("--input is required")
        if not self["out"]:
            raise ParameterError("--out is required")

    def forecast_config(self) -> ForecastConfig:
        return ForecastConfig(
            horizon=int(self["horizon"]),
            n=None if self["n"] is None else int(self["n"]),
            draws=int(self["draws"]),
            seed=int(self["seed"]),
            clip_nonneg=not self["no_clip"],
            sign_model=self["sign"],
            sign_lambda=self["lambda"],
        )


def _float_list(value, name: str, allow_empty: bool = False) -> list[float]:
    if isinstance(value, str):
        parts = [v for v in value.split(",") if v.strip()]
    elif isinstance(value, (int, float)):
        parts = [value]
    else:
        parts = list(value)
    try:
        out = [float(v) for v in parts]
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a comma-separated list of numbers") from None
    if not out and not allow_empty:
        raise ParameterError(f"{name} must not be empty")
    return out


def _read_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ParameterError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParameterError("config file must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise ParameterError(f"unknown config keys: {', '.join(unknown)}")
    return data


# --------------------------------------------------------------------------
# output


def _format_csv_rows(rows) -> str:
    return "".join(",".join(cells) + "\n" for cells in rows)


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def _write_outputs(out_dir: Path, files: dict[str, str]) -> None:
    """Write all files or none: stage to temporaries, then rename."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((tmp, out_dir / name))
        for tmp, final in staged:
            os.replace(tmp, final)
    except BaseException:
        for tmp, final in staged:
            for p in (tmp, final):
                if os.path.exists(p):
                    os.remove(p)
        raise


def _dumps(summary: dict) -> str:
    return json.dumps(summary, indent=2) + "\n"


# --------------------------------------------------------------------------
# commands


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg["model"] == "sv":
        params = SVParams(
            mu=float(cfg["mu"]),
            delta0=float(cfg["delta0"]),
            phi=float(cfg["phi"]),
            sigma_eta=float(cfg["sigma_eta"]),
            trunc=int(cfg["trunc"]),
        )
        series = simulate_sv(params, int(cfg["length"]), int(cfg["seed"]), cfg["shocks"], cfg["shape"])
    else:
        params = GarchParams(
            mu=float(cfg["mu"]),
            alpha0=float(cfg["alpha0"]),
            alpha=tuple(cfg["alpha"]),
            beta=tuple(cfg["beta"]),
        )
        series = simulate_garch(
            params, int(cfg["length"]), int(cfg["seed"]), int(cfg["burnin"]), cfg["shocks"], cfg["shape"]
        )
    text = "return\n" + "".join(_fmt(v) + "\n" for v in series.values)
    _write_outputs(Path(cfg["out"]), {"series.csv": text})
    log.info("wrote %d simulated returns to %s", len(series), cfg["out"])
    return EXIT_OK


def _load(cfg: RunConfig) -> ReturnSeries:
    return ingest_returns(cfg["input"], cfg["column"], bool(cfg["as_prices"]))


def forecast_summary(cfg: RunConfig, series: ReturnSeries, workers: int = 1) -> tuple[dict, np.ndarray]:
    fcfg = cfg.forecast_config()
    run = forecast_distribution if cfg["mode"] == "whitenoise" else forecast_correlated_distribution
    dist = run(series, fcfg, workers=workers)
    info = dist.info
    summary = {
        "mode": cfg["mode"],
        "observations": len(series),
        "mu_hat": info["mu_hat"],
        "horizon": info["horizon"],
        "n": info["n"],
        "draws": info["draws"],
        "seed": info["seed"],
        "sign": cfg["sign"],
        "location": info["location"],
    }
    if "linear_forecast" in info:
        summary["linear_forecast"] = info["linear_forecast"]
    for rep in risk_report(dist, cfg["levels"]):
        key = f"{rep.level:g}"
        summary[f"var_{key}"] = rep.var
        summary[f"cte_{key}"] = rep.cte
        summary[f"n_tail_{key}"] = rep.n_tail
    return summary, dist.samples


def cmd_forecast(cfg: RunConfig) -> int:
    series = _load(cfg)
    summary, samples = forecast_summary(cfg, series, workers=int(cfg["workers"]))
    files = {
        "samples.csv": "".join(_fmt(v) + "\n" for v in samples),
        "summary.json": _dumps(summary),
    }
    _write_outputs(Path(cfg["out"]), files)
    log.info("forecast of %d draws written to %s", len(samples), cfg["out"])
    return EXIT_OK


def cmd_backtest(cfg: RunConfig) -> int:
    series = _load(cfg)
    results = rolling_backtest_levels(
        series,
        cfg.forecast_config(),
        cfg["levels"],
        stride=cfg["stride"],
        mode=cfg["mode"],
        start=cfg["start"],
        workers=int(cfg["workers"]),
    )
    first = results[cfg["levels"][0]]
    header = ["origin", "realized"]
    for p in cfg["levels"]:
        header += [f"var_{p:g}", f"hit_{p:g}"]
    rows = [header]
    for i, t0 in enumerate(first.origins):
        row = [str(int(t0)), _fmt(first.realized[i])]
        for p in cfg["levels"]:
            res = results[p]
            row += [_fmt(res.var[i]), str(int(res.hits[i]))]
        rows.append(row)
    summary = {
        "mode": cfg["mode"],
        "horizon": int(cfg["horizon"]),
        "stride": int(cfg["stride"] or cfg["horizon"]),
        "seed": int(cfg["seed"]),
        "draws": int(cfg["draws"]),
    }
    for p in cfg["levels"]:
        for key, value in results[p].summary().items():
            if key != "level":
                summary[f"{key}_{p:g}"] = value
    files = {"backtest.csv": _format_csv_rows(rows), "backtest_summary.json": _dumps(summary)}
    _write_outputs(Path(cfg["out"]), files)
    log.info("backtest over %d origins written to %s", first.n_origins, cfg["out"])
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "forecast": cmd_forecast, "backtest": cmd_backtest}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horizonrisk",
        description="Bootstrap forecasts of long-horizon return distributions, with VaR and CTE.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with settings; flags override it")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", help="CSV file with a header row")
    data.add_argument("--column", help="column name or 0-based index (default: last)")
    data.add_argument("--as-prices", action="store_true", default=None, help="column holds prices")
    data.add_argument("--mode", choices=["whitenoise", "correlated"])
    data.add_argument("--n", type=int, help="predictor window (default min(N/4, 50))")
    data.add_argument("--horizon", type=int, help="forecast horizon T")
    data.add_argument("--draws", type=int, help="bootstrap draws B")
    data.add_argument("--levels", help="comma-separated VaR/CTE levels, e.g. 0.01,0.05")
    data.add_argument("--sign", choices=["symmetric", "asymmetric"])
    data.add_argument("--lambda", type=float, help="bin width of the asymmetric sign model")
    data.add_argument("--no-clip", action="store_true", default=None,
                      help="do not clip magnitude forecasts at zero")
    data.add_argument("--workers", type=int, help="threads for the bootstrap draws")

    sim = sub.add_parser("simulate", parents=[common], help="write a synthetic return series")
    sim.add_argument("--model", choices=["sv", "garch"])
    sim.add_argument("--length", type=int)
    sim.add_argument("--burnin", type=int)
    sim.add_argument("--shocks", choices=["normal", "t", "skewnormal"])
    sim.add_argument("--shape", type=float, help="t degrees of freedom or skew-normal slant")
    sim.add_argument("--mu", type=float)
    sim.add_argument("--delta0", type=float)
    sim.add_argument("--phi", type=float)
    sim.add_argument("--sigma-eta", type=float)
    sim.add_argument("--trunc", type=int)
    sim.add_argument("--alpha0", type=float)
    sim.add_argument("--alpha", help="comma-separated coefficients on lagged variances")
    sim.add_argument("--beta", help="comma-separated coefficients on lagged squared deviations")

    sub.add_parser("forecast", parents=[common, data], help="forecast the T-period return distribution")

    bt = sub.add_parser("backtest", parents=[common, data], help="rolling-origin VaR backtest")
    bt.add_argument("--stride", type=int, help="distance between origins (default T)")
    bt.add_argument("--start", type=int, help="first origin")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    verbose = args.verbose
    del args.verbose
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = RunConfig.build(args.command, args)
        return COMMANDS[args.command](cfg)
    except DegeneracyError as exc:
        print(f"horizonrisk: numerical error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DataError, InsufficientDataError) as exc:
        print(f"horizonrisk: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ParameterError, RangeError) as exc:
        print(f"horizonrisk: configuration error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except HorizonRiskError as exc:
        print(f"horizonrisk: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
