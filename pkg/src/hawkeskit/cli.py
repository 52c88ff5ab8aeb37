"""Command-line entry point: ``hawkeskit {simulate,fit,gof,spectrum,intensity}``.

Exit codes: 0 success, 1 usage error, 2 data or validation error, 3 fit did
not converge under ``--strict``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .estimate import fit_mle
from .exceptions import HawkesError
from .gof import bm_path, goodness_of_fit, residual_transform
from .intensity import (
    EventSequence,
    HawkesModel,
    MultivariateHawkesModel,
    compensator,
    conditional_intensity,
    intensity_after,
)
from .io import (
    events_to_json,
    read_events,
    sidecar_path,
    table_to_string,
    write_events,
    write_multivariate_events,
    write_table,
)
from .simulate import ALGORITHMS, hawkes_by_clusters, multivariate_by_thinning, simulate
from .spectral import covariance_density, empirical_covariance_density, power_spectral_density

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_CONVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def intensity_trace(model: HawkesModel, events: EventSequence, grid_step: float) -> dict:
    """Tabulate ``(t, lambda*(t-), lambda*(t+), Lambda(t))`` on a grid plus every arrival.

    Grid rows have equal left and right values unless they coincide with an
    arrival. Rows are sorted by time; ``is_event`` marks arrival instants.
    """
    if not grid_step > 0:
        raise ValueError("grid_step must be > 0")
    T = events.horizon
    grid = np.arange(0.0, T + 0.5 * grid_step, grid_step)
    grid = grid[grid <= T]
    t = np.concatenate([grid, events.times])
    flag = np.concatenate([np.zeros(grid.size, bool), np.ones(events.times.size, bool)])
    order = np.lexsort((~flag, t))
    t, flag = t[order], flag[order]
    return {
        "t": t,
        "intensity_left": conditional_intensity(model, events, t),
        "intensity_right": intensity_after(model, events, t),
        "compensator": compensator(model, events, t),
        "is_event": flag,
    }


def _load_json_arg(value: str) -> dict:
    """Accept inline JSON or a path to a JSON file."""
    if os.path.exists(value):
        with open(value) as fh:
            return json.load(fh)
    try:
        return json.loads(value)
    except json.JSONDecodeError as exc:
        raise HawkesError(f"--params is neither a file nor valid JSON: {exc}") from None


def _open_out(path):
    if path in (None, "-"):
        return _Stdout()
    return open(path, "w", newline="")


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()
        return False


def _emit(payload: dict, fmt: str, out_path):
    with _open_out(out_path) as out:
        if fmt == "json":
            out.write(json.dumps(payload, indent=2, default=_json_default) + "\n")
        else:
            write_table({"key": list(payload), "value": [_flat(v) for v in payload.values()]}, out)


def _flat(v):
    return json.dumps(v, default=_json_default) if isinstance(v, (dict, list)) else v


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def cmd_simulate(args) -> int:
    params = _load_json_arg(args.params)
    seeds = np.random.SeedSequence(args.seed)
    multivariate = "baselines" in params
    model = MultivariateHawkesModel.from_dict(params) if multivariate else HawkesModel.from_dict(params)

    def run_one(seed):
        if multivariate:
            return multivariate_by_thinning(args.horizon, model, np.random.default_rng(seed))
        rng = np.random.default_rng(seed)
        if args.algo == "cluster":
            return hawkes_by_clusters(args.horizon, model, rng, recursive=args.generations == "all")
        return simulate(model, args.horizon, args.algo, rng)

    if args.replicates > 1:
        paths = [run_one(s) for s in seeds.spawn(args.replicates)]
        if multivariate:
            counts = np.array([[len(s) for s in p] for p in paths])
        else:
            counts = np.array([len(p) for p in paths])
        summary = {
            "replicates": args.replicates,
            "horizon": args.horizon,
            "counts": counts.tolist(),
            "mean": counts.mean(axis=0).tolist(),
            "var": counts.var(axis=0, ddof=1).tolist(),
        }
        if args.format == "json":
            _emit(summary, "json", args.out)
        else:
            cols = {"replicate": list(range(args.replicates))}
            if multivariate:
                for c in range(model.dim):
                    cols[f"count_{c}"] = counts[:, c].tolist()
            else:
                cols["count"] = counts.tolist()
            with _open_out(args.out) as out:
                write_table(cols, out)
        return EXIT_OK

    path = run_one(seeds)
    with _open_out(args.out) as out:
        if args.format == "json":
            if multivariate:
                payload = {"horizon": args.horizon, "streams": [s.times.tolist() for s in path]}
                out.write(json.dumps(payload) + "\n")
            else:
                out.write(events_to_json(path) + "\n")
        elif multivariate:
            write_multivariate_events(path, out)
        else:
            write_events(path.times, out)
    if args.out not in (None, "-"):
        with open(sidecar_path(args.out), "w") as fh:
            json.dump({"horizon": args.horizon}, fh)
    return EXIT_OK


def cmd_fit(args) -> int:
    events = read_events(args.events, args.horizon)
    result = fit_mle(events)
    _emit(result.to_dict(), args.format, args.out)
    if args.strict and not result.converged:
        print("fit did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_gof(args) -> int:
    events = read_events(args.events, args.horizon)
    model = HawkesModel.from_dict(_load_json_arg(args.params))
    report = goodness_of_fit(model, events, args.level, durbin=args.durbin)
    _emit(report.to_dict(), args.format, args.out)
    if args.emit_qq:
        with open(args.emit_qq, "w", newline="") as fh:
            write_table({"empirical": report.qq_points[:, 0], "theoretical": report.qq_points[:, 1]}, fh)
    if args.emit_autocorr:
        with open(args.emit_autocorr, "w", newline="") as fh:
            pts = report.autocorr_points
            write_table({"u_k": pts[:, 0], "u_k1": pts[:, 1]}, fh)
    if args.emit_bm_path:
        path = bm_path(residual_transform(model, events))
        with open(args.emit_bm_path, "w", newline="") as fh:
            write_table({"u": path[:, 0], "m": path[:, 1]}, fh)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    model = HawkesModel.from_dict(_load_json_arg(args.params))
    lags = np.arange(1, int(round(args.max_lag / args.lag_step)) + 1) * args.lag_step
    freqs = np.arange(0, int(round(args.max_freq / args.freq_step)) + 1) * args.freq_step
    cov = {"tau": lags, "R": covariance_density(model, lags)}
    if args.empirical:
        if not args.events:
            raise UsageError("--empirical needs --events")
        events = read_events(args.events, args.horizon)
        burn_in = args.burn_in
        if burn_in is None:
            burn_in = 10.0 / (model.kernel.beta - model.kernel.alpha)
        emp = empirical_covariance_density(events, args.lag_step, args.max_lag, burn_in=burn_in)
        n = min(emp.lag_grid.size, lags.size)
        cov = {key: val[:n] for key, val in cov.items()}
        cov["R_empirical"] = emp.covariance_values[:n]
        cov["R_se"] = emp.covariance_se[:n]
    psd = {"omega": freqs, "S": power_spectral_density(model, freqs)}
    if args.format == "json":
        _emit({"covariance": cov, "psd": psd}, "json", args.out)
        return EXIT_OK
    with _open_out(args.out) as out:
        write_table(cov, out)
        if args.psd_out:
            Path(args.psd_out).write_text(table_to_string(psd))
        else:
            out.write("\n")
            write_table(psd, out)
    return EXIT_OK


def cmd_intensity(args) -> int:
    model = HawkesModel.from_dict(_load_json_arg(args.params))
    events = read_events(args.events, args.horizon)
    table = intensity_trace(model, events, args.step)
    if args.format == "json":
        _emit(table, "json", args.out)
    else:
        with _open_out(args.out) as out:
            write_table(table, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hawkeskit", description="Hawkes process simulation, fitting and diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate event times")
    p.add_argument("--algo", choices=ALGORITHMS, default="thinning")
    p.add_argument("--params", required=True, help="model JSON (inline or file path)")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument(
        "--generations",
        choices=("all", "first"),
        default="all",
        help="cluster algorithm: full offspring recursion or first generation only",
    )
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="maximum-likelihood fit of an exponential-kernel model")
    p.add_argument("--events", required=True)
    p.add_argument("--horizon", type=float)
    p.add_argument("--strict", action="store_true", help="exit 3 if the optimiser did not converge")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("gof", help="residual-analysis goodness-of-fit battery")
    p.add_argument("--events", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--horizon", type=float)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--durbin", action="store_true", help="apply Durbin's transform in the Lewis test")
    p.add_argument("--emit-qq")
    p.add_argument("--emit-autocorr")
    p.add_argument("--emit-bm-path")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("spectrum", help="covariance density and power spectral density tables")
    p.add_argument("--params", required=True)
    p.add_argument("--max-lag", type=float, default=10.0)
    p.add_argument("--lag-step", type=float, default=0.1)
    p.add_argument("--max-freq", type=float, default=10.0)
    p.add_argument("--freq-step", type=float, default=0.1)
    p.add_argument("--empirical", action="store_true")
    p.add_argument("--events")
    p.add_argument("--horizon", type=float)
    p.add_argument("--burn-in", type=float)
    p.add_argument("--psd-out")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("intensity", help="intensity and compensator trace")
    p.add_argument("--params", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--horizon", type=float)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_intensity)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help exits 0 through argparse
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except BrokenPipeError:
        # downstream reader closed early, e.g. piped into head
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (HawkesError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"hawkeskit: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
