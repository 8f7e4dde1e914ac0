"""Command line tools: estimation, simulation, bandwidth selection, oracle.

Every subcommand writes one table (CSV by default, JSON on request)
plus a ``<out>.meta.json`` sidecar holding the resolved configuration,
the package version, and a run summary.  The sidecar contains nothing
volatile, so rerunning a subcommand with the same configuration and
seed produces byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 data error,
4 estimation failure, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, log_grid, mise_star
from .cure import latency_estimate, latency_estimate_two_bw
from .exceptions import ConfigError, DataError, EstimationError
from .experiments import ExperimentConfig, true_mise, true_mise_two_bw
from .io_utils import DatasetSchema, ingest, write_meta, write_table
from .models import generate, model1, model2, trial_rng
from .oracle import amse, population_from_model

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_ESTIMATION = 4

_OUTDIR_ENV = "NPMIXCURE_OUTDIR"


# ---------------------------------------------------------------------------
# configuration plumbing

def _load_config(path):
    """Flat JSON object whose keys mirror the long flag names."""
    if path is None:
        return {}
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a flat JSON object")
    for key, value in raw.items():
        if isinstance(value, dict):
            raise ConfigError(f"config field {key!r}: nested objects not allowed")
    return raw


def _check_config_keys(config, allowed, command):
    unknown = sorted(set(config) - set(allowed))
    if unknown:
        raise ConfigError(
            f"config field(s) not understood by {command}: {', '.join(unknown)}"
        )


def _pick(args, config, name, default=None):
    """Effective value: explicit flag, then config file, then default."""
    value = getattr(args, name, None)
    if value is None:
        value = config.get(name, default)
    return value


def _flag(args, config, name):
    value = getattr(args, name, None)
    if value is None:
        value = config.get(name, False)
    return bool(value)


def _require(value, flag):
    if value is None:
        raise ConfigError(f"missing required setting {flag}")
    return value


def _as_int(value, flag):
    if isinstance(value, bool):
        raise ConfigError(f"{flag} must be an integer, got {value!r}")
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{flag} must be an integer, got {value!r}") from None
    if isinstance(value, float) and value != out:
        raise ConfigError(f"{flag} must be an integer, got {value!r}")
    return out


def _as_float(value, flag):
    if isinstance(value, bool):
        raise ConfigError(f"{flag} must be a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{flag} must be a number, got {value!r}") from None


def _float_list(args, config, name, flag):
    value = _pick(args, config, name)
    if value is None:
        return None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)]
    try:
        return [_as_float(v, flag) for v in value]
    except TypeError:
        raise ConfigError(f"{flag} must be a number or list of numbers") from None


def _str_list(args, config, name):
    value = _pick(args, config, name)
    if value is None:
        return None
    if isinstance(value, (str, int, float)):
        return [str(value)]
    return [str(v) for v in value]


def _parse_grid(value, flag):
    """A bandwidth grid given as ``lo:hi:count`` (log spaced)."""
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{flag} must look like lo:hi:count, got {value!r}")
        lo_s, hi_s, count_s = parts
    elif isinstance(value, (list, tuple)) and len(value) == 3:
        lo_s, hi_s, count_s = value
    else:
        raise ConfigError(f"{flag} must look like lo:hi:count, got {value!r}")
    lo = _as_float(lo_s, flag)
    hi = _as_float(hi_s, flag)
    count = _as_int(count_s, flag)
    try:
        return log_grid(lo, hi, count)
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from exc


def _model_spec(mid):
    if mid == 1:
        return model1()
    if mid == 2:
        return model2()
    raise ConfigError(f"--model must be 1 or 2, got {mid!r}")


def _format(args, config):
    fmt = _pick(args, config, "format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"--format must be csv or json, got {fmt!r}")
    return fmt


def _out_path(args, config, default_name):
    out = _pick(args, config, "out")
    base = Path(os.environ.get(_OUTDIR_ENV, "."))
    if out is None:
        return base / default_name
    out = Path(out)
    return out if out.is_absolute() else base / out


def _covariate_seed(seed: int, index: int) -> int:
    """Independent bootstrap seed per covariate value, reproducibly."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(index, 2))
    return int(seq.generate_state(1)[0])


def _emit(out_path: Path, fmt, columns, rows, command, config_used, summary):
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_table(out_path, fmt, columns, rows)
    meta = {
        "command": command,
        "config": config_used,
        "summary": summary,
        "version": __version__,
    }
    write_meta(Path(str(out_path) + ".meta.json"), meta)


# ---------------------------------------------------------------------------
# data sources

_SCHEMA_KEYS = (
    "data", "covariate_col", "time_col", "delta_col", "group_col",
    "delimiter", "no_header", "group",
)
_SOURCE_KEYS = _SCHEMA_KEYS + ("model", "n", "seed")


def _resolve_sample(args, config):
    """Sample from ``--data`` (ingested file) or ``--model`` (generated)."""
    data = _pick(args, config, "data")
    if data is not None:
        schema = DatasetSchema(
            covariate=str(_pick(args, config, "covariate_col", "age")),
            time=str(_pick(args, config, "time_col", "time")),
            delta=str(_pick(args, config, "delta_col", "delta")),
            group=_pick(args, config, "group_col"),
            delimiter=str(_pick(args, config, "delimiter", ",")),
            header=not _flag(args, config, "no_header"),
        )
        groups = _str_list(args, config, "group")
        report = ingest(data, schema, groups)
        source = {
            "data": str(data),
            "group": groups,
            "rows_read": report.rows_read,
            "rows_kept": report.rows_kept,
            "n_censored": report.n_censored,
            "censoring_fraction": report.censoring_fraction,
        }
        return report.sample, source

    mid = _pick(args, config, "model")
    if mid is None:
        raise ConfigError("need a data source: --data FILE or --model {1,2}")
    spec = _model_spec(_as_int(mid, "--model"))
    n = _as_int(_require(_pick(args, config, "n"), "--n"), "--n")
    if n < 1:
        raise ConfigError("--n must be positive")
    seed = _as_int(_pick(args, config, "seed", 1), "--seed")
    sample = generate(spec, n, trial_rng(seed, 0))
    source = {
        "model": spec.model_id,
        "n": n,
        "seed": seed,
        "n_censored": int(np.sum(sample.delta == 0)),
    }
    return sample, source


# ---------------------------------------------------------------------------
# subcommands

_SIMULATE_KEYS = ("model", "n", "seed", "out", "format")


def _cmd_simulate(args, config):
    _check_config_keys(config, _SIMULATE_KEYS, "simulate")
    mid = _as_int(_require(_pick(args, config, "model"), "--model"), "--model")
    spec = _model_spec(mid)
    n = _as_int(_require(_pick(args, config, "n"), "--n"), "--n")
    if n < 1:
        raise ConfigError("--n must be positive")
    seed = _as_int(_pick(args, config, "seed", 1), "--seed")
    fmt = _format(args, config)

    sample = generate(spec, n, trial_rng(seed, 0))
    n_censored = int(np.sum(sample.delta == 0))
    out = _out_path(args, config, f"simulate_model{mid}.{fmt}")
    config_used = {
        "model": mid, "n": n, "seed": seed, "format": fmt, "out": str(out),
    }
    summary = {
        "n": n,
        "n_censored": n_censored,
        "censoring_fraction": n_censored / n,
    }
    rows = zip(sample.x, sample.t, sample.delta)
    _emit(out, fmt, ("x", "t", "delta"), rows, "simulate", config_used, summary)
    print(f"wrote {out}: {n} rows, {n_censored} censored")
    return EXIT_OK


_ESTIMATE_KEYS = _SOURCE_KEYS + (
    "x", "h", "h2", "clamp", "grid", "B", "pilot_c", "time_points",
    "out", "format",
)


def _cmd_estimate(args, config):
    _check_config_keys(config, _ESTIMATE_KEYS, "estimate")
    sample, source = _resolve_sample(args, config)
    xs = _float_list(args, config, "x", "--x")
    if not xs:
        raise ConfigError("missing required setting --x")
    fmt = _format(args, config)
    h_raw = _pick(args, config, "h", "auto")
    h2_raw = _pick(args, config, "h2")
    clamp = _flag(args, config, "clamp")
    time_points = _as_int(_pick(args, config, "time_points", 200), "--time-points")
    if time_points < 2:
        raise ConfigError("--time-points must be at least 2")

    auto = isinstance(h_raw, str) and h_raw.lower() == "auto"
    grid = bootstrap_b = pilot_c = seed = h_fixed = None
    if auto:
        if h2_raw is not None:
            raise ConfigError("--h2 requires a fixed --h, not auto selection")
        grid = _parse_grid(
            _require(_pick(args, config, "grid"), "--grid (required with --h auto)"),
            "--grid",
        )
        bootstrap_b = _as_int(_pick(args, config, "B", 100), "--B")
        pilot_c = _as_float(_pick(args, config, "pilot_c", 0.75), "--pilot-c")
        seed = _as_int(_pick(args, config, "seed", 1), "--seed")
    else:
        h_fixed = _as_float(h_raw, "--h")
        if h_fixed <= 0.0:
            raise ConfigError("--h must be positive")
        if h2_raw is not None and _as_float(h2_raw, "--h2") <= 0.0:
            raise ConfigError("--h2 must be positive")

    rows = []
    failures = []
    selections = []
    for i, xv in enumerate(xs):
        try:
            if auto:
                bcfg = BootstrapConfig(
                    B=bootstrap_b, grid=grid,
                    seed=_covariate_seed(seed, i), pilot_c=pilot_c,
                )
                curve = mise_star(sample, xv, bcfg)
                h_used = curve.selected
                selections.append({
                    "x": xv,
                    "h_star": h_used,
                    "pilot_bandwidth": curve.pilot_bandwidth,
                    "resample_failures": int(curve.failures.sum()),
                })
            else:
                h_used = h_fixed
            if h2_raw is not None:
                fit = latency_estimate_two_bw(
                    sample, xv, h_used, _as_float(h2_raw, "--h2"), clamp=clamp,
                )
            else:
                fit = latency_estimate(sample, xv, h_used)
            tgrid = np.linspace(0.0, fit.t_max_uncensored, time_points)
            latency = fit.latency.evaluate(tgrid)
            h2_used = fit.h2 if fit.h2 is not None else h_used
            rows.extend(
                (xv, h_used, h2_used, fit.incidence, tv, lv)
                for tv, lv in zip(tgrid, latency)
            )
        except EstimationError as exc:
            failures.append({"x": xv, "error": str(exc)})
    if not rows:
        raise EstimationError(
            "estimation failed at every covariate value: "
            + "; ".join(f"x={f['x']}: {f['error']}" for f in failures)
        )

    out = _out_path(args, config, f"estimate.{fmt}")
    config_used = {
        "x": xs, "h": h_raw, "h2": h2_raw, "clamp": clamp,
        "grid": None if grid is None else str(
            _pick(args, config, "grid")),
        "B": bootstrap_b, "pilot_c": pilot_c, "seed": seed,
        "time_points": time_points, "format": fmt, "out": str(out),
        "source": source,
    }
    summary = {"failures": failures, "selections": selections}
    _emit(
        out, fmt, ("x", "h", "h2", "incidence", "t", "latency"), rows,
        "estimate", config_used, summary,
    )
    print(
        f"wrote {out}: {len(xs) - len(failures)} of {len(xs)} covariate values"
    )
    return EXIT_OK


_SELECTBW_KEYS = _SOURCE_KEYS + (
    "x", "grid", "B", "pilot_c", "out", "format",
)


def _cmd_selectbw(args, config):
    _check_config_keys(config, _SELECTBW_KEYS, "selectbw")
    sample, source = _resolve_sample(args, config)
    xs = _float_list(args, config, "x", "--x")
    if not xs:
        raise ConfigError("missing required setting --x")
    fmt = _format(args, config)
    grid = _parse_grid(_require(_pick(args, config, "grid"), "--grid"), "--grid")
    bootstrap_b = _as_int(_pick(args, config, "B", 100), "--B")
    pilot_c = _as_float(_pick(args, config, "pilot_c", 0.75), "--pilot-c")
    seed = _as_int(_pick(args, config, "seed", 1), "--seed")

    rows = []
    failures = []
    selections = []
    for i, xv in enumerate(xs):
        try:
            bcfg = BootstrapConfig(
                B=bootstrap_b, grid=grid,
                seed=_covariate_seed(seed, i), pilot_c=pilot_c,
            )
            curve = mise_star(sample, xv, bcfg)
        except EstimationError as exc:
            failures.append({"x": xv, "error": str(exc)})
            continue
        selections.append({
            "x": xv,
            "h_star": curve.selected,
            "pilot_bandwidth": curve.pilot_bandwidth,
            "weight_upper": curve.weight_upper,
        })
        rows.extend(
            (xv, h, v, int(f))
            for h, v, f in zip(grid.values, curve.values, curve.failures)
        )
    if not rows:
        raise EstimationError(
            "selection failed at every covariate value: "
            + "; ".join(f"x={f['x']}: {f['error']}" for f in failures)
        )

    out = _out_path(args, config, f"selectbw.{fmt}")
    config_used = {
        "x": xs, "grid": str(_pick(args, config, "grid")), "B": bootstrap_b,
        "pilot_c": pilot_c, "seed": seed, "format": fmt, "out": str(out),
        "source": source,
    }
    summary = {"failures": failures, "selections": selections}
    _emit(
        out, fmt, ("x", "h", "mise_star", "failures"), rows,
        "selectbw", config_used, summary,
    )
    for sel in selections:
        print(f"x={sel['x']}: h_star={sel['h_star']}")
    return EXIT_OK


_MISE_KEYS = (
    "model", "n", "m", "x", "grid", "grid2", "surface", "seed",
    "weight_upper", "time_grid_size", "out", "format",
)


def _cmd_mise(args, config):
    _check_config_keys(config, _MISE_KEYS, "mise")
    mid = _as_int(_require(_pick(args, config, "model"), "--model"), "--model")
    spec = _model_spec(mid)
    n = _as_int(_require(_pick(args, config, "n"), "--n"), "--n")
    m = _as_int(_require(_pick(args, config, "m"), "--m"), "--m")
    if n < 1 or m < 1:
        raise ConfigError("--n and --m must be positive")
    xs = _float_list(args, config, "x", "--x")
    if not xs:
        raise ConfigError("missing required setting --x")
    grid = _parse_grid(_require(_pick(args, config, "grid"), "--grid"), "--grid")
    grid2_raw = _pick(args, config, "grid2")
    surface = _flag(args, config, "surface") or grid2_raw is not None
    grid2 = grid if grid2_raw is None else _parse_grid(grid2_raw, "--grid2")
    seed = _as_int(_pick(args, config, "seed", 1), "--seed")
    weight_upper = _pick(args, config, "weight_upper")
    if weight_upper is not None:
        weight_upper = _as_float(weight_upper, "--weight-upper")
    time_grid_size = _as_int(
        _pick(args, config, "time_grid_size", 100), "--time-grid-size")
    fmt = _format(args, config)
    try:
        ecfg = ExperimentConfig(
            seed=seed, weight_upper=weight_upper, time_grid_size=time_grid_size,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    rows = []
    minima = []
    if surface:
        for xv in xs:
            surf = true_mise_two_bw(spec, n, m, xv, grid, grid2, ecfg)
            i1, i2 = surf.argmin_pair()
            minima.append({
                "x": xv,
                "h1_star": float(grid.values[i1]),
                "h2_star": float(grid2.values[i2]),
            })
            for a, h1 in enumerate(grid.values):
                for b, h2 in enumerate(grid2.values):
                    rows.append(
                        (xv, h1, h2, surf.values[a, b], int(surf.trials_used[a, b]))
                    )
        columns = ("x", "h1", "h2", "mise", "trials_used")
    else:
        for xv in xs:
            curve = true_mise(spec, n, m, xv, grid, ecfg)
            minima.append({"x": xv, "h_star": curve.selected})
            rows.extend(
                (xv, h, v, int(m - f))
                for h, v, f in zip(grid.values, curve.values, curve.failures)
            )
        columns = ("x", "h", "mise", "trials_used")

    out = _out_path(args, config, f"mise_model{mid}.{fmt}")
    config_used = {
        "model": mid, "n": n, "m": m, "x": xs,
        "grid": str(_pick(args, config, "grid")),
        "grid2": None if grid2_raw is None else str(grid2_raw),
        "surface": surface, "seed": seed, "weight_upper": weight_upper,
        "time_grid_size": time_grid_size, "format": fmt, "out": str(out),
    }
    _emit(out, fmt, columns, rows, "mise", config_used, {"minima": minima})
    print(f"wrote {out}: {len(rows)} rows")
    return EXIT_OK


_ORACLE_KEYS = ("model", "t", "x", "h", "n", "out", "format")


def _cmd_oracle(args, config):
    _check_config_keys(config, _ORACLE_KEYS, "oracle")
    mid = _as_int(_require(_pick(args, config, "model"), "--model"), "--model")
    spec = _model_spec(mid)
    ts = _float_list(args, config, "t", "--t")
    xs = _float_list(args, config, "x", "--x")
    if not ts or not xs:
        raise ConfigError("missing required setting --t / --x")
    h = _as_float(_require(_pick(args, config, "h"), "--h"), "--h")
    n = _as_int(_require(_pick(args, config, "n"), "--n"), "--n")
    if h <= 0.0 or n < 1:
        raise ConfigError("--h must be positive and --n at least 1")
    fmt = _format(args, config)

    pop = population_from_model(spec)
    rows = []
    failures = []
    for xv in xs:
        for tv in ts:
            try:
                report = amse(pop, tv, xv, h, n)
            except EstimationError as exc:
                failures.append({"t": tv, "x": xv, "error": str(exc)})
                continue
            terms = report.terms
            rows.append((
                tv, xv, h, n,
                terms.b1, terms.b2, terms.v1, terms.v2, terms.v3,
                report.bias_term, report.variance_term, report.amse,
            ))
    if not rows:
        raise EstimationError(
            "oracle evaluation failed at every point: "
            + "; ".join(
                f"(t={f['t']}, x={f['x']}): {f['error']}" for f in failures
            )
        )

    out = _out_path(args, config, f"oracle_model{mid}.{fmt}")
    config_used = {
        "model": mid, "t": ts, "x": xs, "h": h, "n": n,
        "format": fmt, "out": str(out),
    }
    columns = (
        "t", "x", "h", "n", "b1", "b2", "v1", "v2", "v3",
        "bias_term", "variance_term", "amse",
    )
    _emit(out, fmt, columns, rows, "oracle", config_used, {"failures": failures})
    print(f"wrote {out}: {len(rows)} rows")
    return EXIT_OK


_SYNTH_KEYS = ("seed", "out", "format")

_SYNTH_STAGES = (1, 2, 3, 4)
_SYNTH_TOTALS = (62, 167, 133, 52)
_SYNTH_CENSORED = (44, 92, 53, 16)
_SYNTH_TIME_SCALE = {1: 60.0, 2: 45.0, 3: 25.0, 4: 12.0}


def _cmd_synth_data(args, config):
    """A synthetic clinical-shaped file with fixed per-group marginals.

    Row counts and censored counts per group are fixed by construction
    (414 rows, 205 censored overall); ages and times vary with the
    seed.  Times are in months, later groups having worse prognosis.
    """
    _check_config_keys(config, _SYNTH_KEYS, "synth-data")
    seed = _as_int(_pick(args, config, "seed", 1), "--seed")
    fmt = _format(args, config)
    rng = np.random.default_rng(seed)

    rows = []
    for stage, total, censored in zip(
        _SYNTH_STAGES, _SYNTH_TOTALS, _SYNTH_CENSORED
    ):
        ages = rng.integers(23, 104, size=total)
        scale = _SYNTH_TIME_SCALE[stage]
        n_event = total - censored
        times = np.concatenate([
            np.round(rng.exponential(scale, size=n_event) + 0.1, 2),
            np.round(rng.uniform(1.0, 120.0, size=censored), 2),
        ])
        deltas = np.concatenate([
            np.ones(n_event, dtype=int), np.zeros(censored, dtype=int),
        ])
        order = rng.permutation(total)
        rows.extend(
            (stage, int(ages[i]), float(times[i]), int(deltas[i]))
            for i in order
        )

    total_rows = sum(_SYNTH_TOTALS)
    total_censored = sum(_SYNTH_CENSORED)
    out = _out_path(args, config, f"synthetic_cancer.{fmt}")
    config_used = {"seed": seed, "format": fmt, "out": str(out)}
    summary = {
        "rows": total_rows,
        "n_censored": total_censored,
        "censoring_fraction": total_censored / total_rows,
        "per_group": [
            {"stage": s, "patients": t, "censored": c}
            for s, t, c in zip(_SYNTH_STAGES, _SYNTH_TOTALS, _SYNTH_CENSORED)
        ],
    }
    _emit(
        out, fmt, ("stage", "age", "time", "delta"), rows,
        "synth-data", config_used, summary,
    )
    print(
        f"wrote {out}: {total_rows} rows, {total_censored} censored "
        f"({100.0 * total_censored / total_rows:.2f}%)"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_common(sub):
    sub.add_argument("--seed", type=int, help="master random seed")
    sub.add_argument("--out", help="output file (relative paths resolve "
                     f"against ${_OUTDIR_ENV} or the working directory)")
    sub.add_argument("--format", choices=("csv", "json"),
                     help="table format (default csv)")
    sub.add_argument("--config", help="flat JSON file with defaults for any "
                     "flag of this subcommand (explicit flags win)")


def _add_source(sub):
    sub.add_argument("--data", help="delimited data file to ingest")
    sub.add_argument("--covariate-col", dest="covariate_col",
                     help="covariate column (default: age)")
    sub.add_argument("--time-col", dest="time_col",
                     help="time column (default: time)")
    sub.add_argument("--delta-col", dest="delta_col",
                     help="event indicator column (default: delta)")
    sub.add_argument("--group-col", dest="group_col",
                     help="grouping column used by --group")
    sub.add_argument("--delimiter", help="field delimiter (default: comma)")
    sub.add_argument("--no-header", dest="no_header", action="store_true",
                     default=None,
                     help="file has no header; address columns by index")
    sub.add_argument("--group", action="append",
                     help="keep only rows with this group label (repeatable)")
    sub.add_argument("--model", type=int, help="generate from model 1 or 2 "
                     "instead of reading a file")
    sub.add_argument("--n", type=int, help="generated sample size")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="npmixcure",
        description="Nonparametric mixture cure model estimation: "
        "kernel incidence and latency estimators, bootstrap bandwidth "
        "selection, Monte Carlo MISE experiments, and the asymptotic "
        "bias/variance oracle.",
    )
    sub = parser.add_subparsers(dest="command")

    est = sub.add_parser(
        "estimate",
        help="incidence and latency curves at covariate values",
    )
    _add_source(est)
    est.add_argument("--x", action="append", type=float,
                     help="covariate value to estimate at (repeatable)")
    est.add_argument("--h", help="bandwidth, or 'auto' for the bootstrap "
                     "selector (default auto)")
    est.add_argument("--h2", type=float,
                     help="separate incidence bandwidth (fixed --h only)")
    est.add_argument("--clamp", action="store_true", default=None,
                     help="clip two-bandwidth latency into [0, 1], monotone")
    est.add_argument("--grid", help="bandwidth grid lo:hi:count (log spaced)")
    est.add_argument("--B", type=int, help="bootstrap resamples (default 100)")
    est.add_argument("--pilot-c", dest="pilot_c", type=float,
                     help="pilot bandwidth constant (default 0.75)")
    est.add_argument("--time-points", dest="time_points", type=int,
                     help="curve export grid size (default 200)")
    _add_common(est)
    est.set_defaults(func=_cmd_estimate)

    sim = sub.add_parser("simulate", help="draw one sample from a model")
    sim.add_argument("--model", type=int, help="model 1 or 2")
    sim.add_argument("--n", type=int, help="sample size")
    _add_common(sim)
    sim.set_defaults(func=_cmd_simulate)

    sel = sub.add_parser(
        "selectbw", help="bootstrap MISE curve and selected bandwidth",
    )
    _add_source(sel)
    sel.add_argument("--x", action="append", type=float,
                     help="covariate value (repeatable)")
    sel.add_argument("--grid", help="bandwidth grid lo:hi:count (log spaced)")
    sel.add_argument("--B", type=int, help="bootstrap resamples (default 100)")
    sel.add_argument("--pilot-c", dest="pilot_c", type=float,
                     help="pilot bandwidth constant (default 0.75)")
    _add_common(sel)
    sel.set_defaults(func=_cmd_selectbw)

    mise = sub.add_parser(
        "mise", help="Monte Carlo MISE of the latency estimate over a grid",
    )
    mise.add_argument("--model", type=int, help="model 1 or 2")
    mise.add_argument("--n", type=int, help="sample size per trial")
    mise.add_argument("--m", type=int, help="number of trials")
    mise.add_argument("--x", action="append", type=float,
                      help="covariate value (repeatable)")
    mise.add_argument("--grid", help="bandwidth grid lo:hi:count (log spaced)")
    mise.add_argument("--grid2", help="second grid for the two-bandwidth "
                      "surface (defaults to --grid)")
    mise.add_argument("--surface", action="store_true", default=None,
                      help="compute the two-bandwidth MISE surface")
    mise.add_argument("--weight-upper", dest="weight_upper", type=float,
                      help="upper end of the MISE integration window")
    mise.add_argument("--time-grid-size", dest="time_grid_size", type=int,
                      help="integration grid size (default 100)")
    _add_common(mise)
    mise.set_defaults(func=_cmd_mise)

    orc = sub.add_parser(
        "oracle", help="asymptotic bias/variance components and AMSE",
    )
    orc.add_argument("--model", type=int, help="model 1 or 2")
    orc.add_argument("--t", action="append", type=float,
                     help="time point (repeatable)")
    orc.add_argument("--x", action="append", type=float,
                     help="covariate value (repeatable)")
    orc.add_argument("--h", type=float, help="bandwidth")
    orc.add_argument("--n", type=int, help="sample size in the variance term")
    _add_common(orc)
    orc.set_defaults(func=_cmd_oracle)

    synth = sub.add_parser(
        "synth-data",
        help="write a synthetic clinical-shaped data file with fixed "
        "group marginals",
    )
    _add_common(synth)
    synth.set_defaults(func=_cmd_synth_data)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except Exception as exc:  # anything else is a bug, not a user error
        print(f"unexpected error: {exc!r}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
