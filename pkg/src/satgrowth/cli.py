"""Command-line interface: ``satgrowth <command> ...``.

Every command prints a JSON report on stdout. Errors are printed as a
single JSON line on stderr; the exit status is 1 for validation or domain
errors and 2 for I/O errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import reports
from .calibration import cumulative, fit_logistic
from .dataio import default_seed, file_checksum, generate, load_csv, series_to_csv, write_plot_tsv
from .errors import SatGrowthError
from .growth_core import (
    GrowthParams,
    SaturationReport,
    SolutionSpec,
    closed_form,
    constant_from_initial,
    growth_rate,
    saturation_report,
    saturation_value,
)
from .integrator import AutonomousSystem, integrate
from .phase_dynamics import (
    CoupledLogisticSystem,
    beta_theoretical,
    power_law_fit,
    power_law_transform,
    stability_report,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text, n=None, what="values"):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"could not parse {what} from {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} comma-separated {what}, got {text!r}")
    return vals


def _params(text) -> GrowthParams:
    return GrowthParams(*_floats(text, 3, "alpha,lam,eta"))


def _alpha_option(text):
    return "free" if text == "free" else float(text)


def _load(args, path, label=None):
    return load_csv(
        path,
        t_column=args.t_column,
        value_column=args.value_column,
        t_origin=args.t_origin,
        label=label or args.label,
        units=args.units,
    )


def _csv_inputs(path):
    return {"path": str(path), "sha256": file_checksum(path)}


def _fit_series(args, series, seed):
    if args.cumulative:
        series = cumulative(series)
    fit = fit_logistic(series, alpha=args.alpha, starts=args.starts, seed=seed)
    return series, fit


def _plot_fit(path, series, spec):
    write_plot_tsv(path, series.t, {"observed": series.values, "model": closed_form(spec, series.t)})


def cmd_fit(args, seed):
    series = _load(args, args.csv)
    series, fit = _fit_series(args, series, seed)
    if args.plot:
        _plot_fit(args.plot, series, fit.spec)
    inputs = {
        "csv": _csv_inputs(args.csv),
        "alpha": args.alpha,
        "starts": args.starts,
        "cumulative": args.cumulative,
        "label": series.label,
    }
    return reports.make_report("fit", inputs, reports.fit_to_dict(fit), seed)


def cmd_predict(args, seed):
    fit_dict = None
    inputs = {}
    if args.source is not None and args.source.endswith(".json"):
        report = reports.loads(Path(args.source).read_text(encoding="utf-8"))
        spec = reports.spec_from_report(report)
        inputs["report"] = _csv_inputs(args.source)
    elif args.source is not None:
        series = _load(args, args.source)
        series, fit = _fit_series(args, series, seed)
        spec = fit.spec
        fit_dict = reports.fit_to_dict(fit)
        inputs.update(csv=_csv_inputs(args.source), alpha=args.alpha, starts=args.starts, cumulative=args.cumulative)
        if args.plot:
            _plot_fit(args.plot, series, spec)
    elif args.params is not None:
        params = _params(args.params)
        inputs["params"] = reports.params_to_dict(params)
        if args.c is None:
            result = reports.saturation_to_dict(params, SaturationReport(saturation_value(params), None))
            return reports.make_report("predict", inputs, result, seed)
        spec = SolutionSpec(params, args.c, args.t_origin or 0.0)
        inputs["c"] = args.c
    else:
        raise UsageError("predict needs a CSV file, a fit report (.json) or --params")
    result = reports.saturation_to_dict(spec.params, saturation_report(spec), spec)
    if fit_dict is not None:
        result["fit"] = fit_dict
    return reports.make_report("predict", inputs, result, seed)


def cmd_stability(args, seed):
    system = CoupledLogisticSystem(_params(args.r_params), _params(args.h_params))
    point = _floats(args.point, 2, "R,H") if args.point else None
    rep = stability_report(system, point)
    inputs = {"r_params": args.r_params, "h_params": args.h_params, "point": point}
    return reports.make_report("stability", inputs, reports.stability_to_dict(rep, system.r_params, system.h_params), seed)


def cmd_powerlaw(args, seed):
    r_series = _load(args, args.r_csv, label="annual-revenue" if args.cumulative else "cumulative-revenue")
    h_series = _load(args, args.h_csv, label="headcount")
    if args.cumulative:
        r_series = cumulative(r_series)
    r_years = r_series.t + r_series.t_origin
    h_years = h_series.t + h_series.t_origin
    years, ir, ih = np.intersect1d(r_years, h_years, return_indices=True)
    if years.size < 2:
        raise UsageError("the two series share fewer than 2 time points")
    if args.r_params:
        r_params = _params(args.r_params)
    else:
        r_params = fit_logistic(r_series, alpha=1.0, starts=args.starts, seed=seed).params
    if args.h_params:
        h_params = _params(args.h_params)
    else:
        h_params = fit_logistic(h_series, alpha=1.0, starts=args.starts, seed=seed).params
    system = CoupledLogisticSystem(r_params, h_params)
    points = power_law_transform(r_series.values[ir], h_series.values[ih], system)
    line = power_law_fit(points)
    beta = beta_theoretical(system)
    if args.plot:
        ok = np.array([p.usable for p in points])
        lu = np.array([np.log(p.u) if p.usable else np.nan for p in points])
        lv = np.array([np.log(p.v) if p.usable else np.nan for p in points])
        write_plot_tsv(args.plot, years[ok], {"ln_u": lu[ok], "ln_v": lv[ok], "model_ln_v": line.intercept + line.slope * lu[ok]})
    result = {
        "kind": "powerlaw",
        "r_params": reports.params_to_dict(r_params),
        "h_params": reports.params_to_dict(h_params),
        "points": [{"t": float(y), "u": p.u, "v": p.v, "usable": p.usable} for y, p in zip(years, points)],
        "line_fit": reports.line_fit_to_dict(line),
        "beta_theoretical": beta,
        "relative_difference": (line.slope - beta) / beta,
    }
    inputs = {
        "r_csv": _csv_inputs(args.r_csv),
        "h_csv": _csv_inputs(args.h_csv),
        "cumulative": args.cumulative,
        "r_params": args.r_params,
        "h_params": args.h_params,
    }
    return reports.make_report("powerlaw", inputs, result, seed)


def cmd_simulate(args, seed):
    if args.system == "logistic":
        if args.params is None or args.x0 is None:
            raise UsageError("--system logistic needs --params and --x0")
        params = _params(args.params)
        system = AutonomousSystem(
            1,
            lambda y: [growth_rate(params, y[0])],
            labels=("phi",),
            domain=lambda y: y[0] >= 0.0 or float(params.alpha).is_integer(),
        )
        y0 = [args.x0]
        inputs = {"params": reports.params_to_dict(params), "x0": args.x0}
    else:
        if None in (args.r_params, args.h_params, args.r0, args.h0):
            raise UsageError("--system coupled needs --r-params, --h-params, --r0 and --h0")
        coupled = CoupledLogisticSystem(_params(args.r_params), _params(args.h_params))
        system = coupled.as_autonomous()
        y0 = [args.r0, args.h0]
        inputs = {
            "r_params": reports.params_to_dict(coupled.r_params),
            "h_params": reports.params_to_dict(coupled.h_params),
            "r0": args.r0,
            "h0": args.h0,
        }
    t_eval = np.linspace(args.t0, args.t1, args.n_out) if args.n_out else None
    traj = integrate(
        system, y0, (args.t0, args.t1), method=args.method, step=args.step, rtol=args.rtol, atol=args.atol, t_eval=t_eval
    )
    if args.plot:
        cols = {"observed": None}
        for k, name in enumerate(traj.labels):
            cols["model" if traj.states.shape[1] == 1 else f"model_{name}"] = traj.states[:, k]
        write_plot_tsv(args.plot, traj.times, cols)
    inputs.update(method=args.method, step=args.step, rtol=args.rtol, atol=args.atol)
    result = {
        "kind": "trajectory",
        "system": args.system,
        "labels": list(traj.labels),
        "method": traj.method,
        "t0": args.t0,
        "t1": args.t1,
        "initial_state": [float(x) for x in y0],
        "final_state": [float(x) for x in traj.states[-1]],
        "n_points": int(traj.times.size),
        "step_stats": traj.step_stats,
    }
    return reports.make_report("simulate", inputs, result, seed)


def cmd_generate(args, seed):
    params = _params(args.params)
    if (args.c is None) == (args.phi0 is None):
        raise UsageError("give exactly one of --c or --phi0")
    c = args.c if args.c is not None else constant_from_initial(params, args.phi0, 0.0)
    spec = SolutionSpec(params, c, args.origin)
    n = int(round((args.t1 - args.t0) / args.dt)) + 1
    if n < 1 or args.dt <= 0:
        raise UsageError("grid needs dt > 0 and t1 >= t0")
    grid = args.t0 + args.dt * np.arange(n)
    series = generate(spec, grid, sigma_log=args.sigma, seed=seed, label=args.label, units=args.units)
    header = [
        f"satgrowth {reports.__version__} generate seed={seed} sigma_log={args.sigma!r}",
        f"alpha={params.alpha!r} lam={params.lam!r} eta={params.eta!r} c={c!r} t_origin={spec.t_origin!r}",
    ]
    text = series_to_csv(series, comments=header)
    if args.output is None:
        sys.stdout.write(text)
        return None
    Path(args.output).write_text(text, encoding="utf-8")
    result = {
        "kind": "generate",
        "params": reports.params_to_dict(params),
        "c": c,
        "t_origin": spec.t_origin,
        "n_points": int(n),
        "sigma_log": args.sigma,
        "output": str(args.output),
    }
    inputs = {"t0": args.t0, "t1": args.t1, "dt": args.dt, "label": args.label}
    return reports.make_report("generate", inputs, result, seed)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default: $SATGROWTH_SEED or 0)")
    common.add_argument("--plot", default=None, help="write plot-ready TSV data to this path")

    csvopts = _Parser(add_help=False)
    csvopts.add_argument("--t-column", default=None, help="time column name (default: first column)")
    csvopts.add_argument("--value-column", default=None, help="value column name (default: second column)")
    csvopts.add_argument("--t-origin", type=float, default=None, help="calendar year mapped to t = 0")
    csvopts.add_argument("--label", default="other", help="series role tag")
    csvopts.add_argument("--units", default="", help="units annotation (metadata only)")

    fitopts = _Parser(add_help=False)
    fitopts.add_argument("--alpha", type=_alpha_option, default=1.0, help="fixed alpha or 'free'")
    fitopts.add_argument("--starts", type=int, default=16, help="multistart count")
    fitopts.add_argument("--cumulative", action="store_true", help="fit the running sum of the series")

    parser = _Parser(prog="satgrowth", description="Saturating-growth modelling with a generalized logistic law.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common, csvopts, fitopts], help="calibrate the closed form to a CSV series")
    p.add_argument("csv")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", parents=[common, csvopts, fitopts], help="saturation ceiling and onset timescale")
    p.add_argument("source", nargs="?", default=None, help="CSV series or fit report (.json)")
    p.add_argument("--params", default=None, help="alpha,lam,eta")
    p.add_argument("--c", type=float, default=None, help="integration constant")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("stability", parents=[common], help="linear stability of the revenue/headcount system")
    p.add_argument("--r-params", required=True, help="alpha,lam,eta for R")
    p.add_argument("--h-params", required=True, help="alpha,lam,eta for H")
    p.add_argument("--point", default=None, help="R,H evaluation point (default: equilibrium)")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("powerlaw", parents=[common, csvopts], help="u-v power-law check on two series")
    p.add_argument("r_csv")
    p.add_argument("h_csv")
    p.add_argument("--r-params", default=None, help="alpha,lam,eta for R (default: fitted)")
    p.add_argument("--h-params", default=None, help="alpha,lam,eta for H (default: fitted)")
    p.add_argument("--cumulative", action="store_true", help="accumulate the R series first")
    p.add_argument("--starts", type=int, default=16)
    p.set_defaults(func=cmd_powerlaw)

    p = sub.add_parser("simulate", parents=[common], help="integrate the logistic or coupled system")
    p.add_argument("--system", choices=["logistic", "coupled"], default="coupled")
    p.add_argument("--params", default=None, help="alpha,lam,eta (logistic system)")
    p.add_argument("--x0", type=float, default=None, help="initial value (logistic system)")
    p.add_argument("--r-params", default=None)
    p.add_argument("--h-params", default=None)
    p.add_argument("--r0", type=float, default=None)
    p.add_argument("--h0", type=float, default=None)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--method", choices=["rk4", "rk45"], default="rk45")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--atol", type=float, default=1e-10)
    p.add_argument("--n-out", type=int, default=None, help="number of evenly spaced output times")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", parents=[common], help="synthetic closed-form series as CSV")
    p.add_argument("--params", required=True, help="alpha,lam,eta")
    p.add_argument("--c", type=float, default=None, help="integration constant")
    p.add_argument("--phi0", type=float, default=None, help="value at t = 0 (alternative to --c)")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=95.0)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--origin", type=float, default=0.0, help="calendar year of t = 0")
    p.add_argument("--sigma", type=float, default=0.0, help="log-scale of multiplicative noise")
    p.add_argument("--label", default="other")
    p.add_argument("--units", default="")
    p.add_argument("-o", "--output", default=None, help="CSV path (default: stdout, no report)")
    p.set_defaults(func=cmd_generate)
    return parser


def _fail(kind, exc, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc).replace("\n", " ")}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        seed = default_seed(args.seed)
        report = args.func(args, seed)
    except UsageError as exc:
        return _fail("usage", exc, 1)
    except (SatGrowthError, ValueError, jsonschema.ValidationError) as exc:
        return _fail(type(exc).__name__, exc, 1)
    except OSError as exc:
        return _fail(type(exc).__name__, exc, 2)
    if report is not None:
        sys.stdout.write(reports.dumps(report) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
