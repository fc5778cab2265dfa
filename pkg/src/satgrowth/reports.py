"""JSON reports: conversion of result objects, schema validation, round trip."""
from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources
from typing import Optional

import jsonschema
import numpy as np

from . import __version__
from .calibration import FitResult, LineFit
from .growth_core import GrowthParams, SaturationReport, SolutionSpec, bracket_terms
from .phase_dynamics import StabilityReport

__all__ = [
    "schema",
    "validate",
    "make_report",
    "dumps",
    "loads",
    "params_to_dict",
    "params_from_dict",
    "fit_to_dict",
    "saturation_to_dict",
    "stability_to_dict",
    "line_fit_to_dict",
    "spec_from_report",
]


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("satgrowth").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``report`` does not conform."""
    jsonschema.validate(report, schema(), cls=jsonschema.Draft202012Validator)


def _num(x) -> Optional[float]:
    x = float(x)
    return x if math.isfinite(x) else None


def params_to_dict(p: GrowthParams) -> dict:
    return {"alpha": p.alpha, "lam": p.lam, "eta": p.eta}


def params_from_dict(d: dict) -> GrowthParams:
    return GrowthParams(d["alpha"], d["lam"], d["eta"])


def fit_to_dict(fit: FitResult) -> dict:
    return {
        "kind": "fit",
        "params": params_to_dict(fit.params),
        "c": fit.c,
        "t_origin": fit.t_origin,
        "alpha_fixed": fit.alpha_fixed,
        "residual_rms_log": fit.residual_rms_log,
        "residuals": [float(r) for r in fit.residuals],
        "objective": fit.objective,
        "initial_objective": fit.initial_objective,
        "n_evaluations": fit.n_evaluations,
        "converged": fit.converged,
        "weakly_identified": list(fit.weakly_identified),
        "starts": [
            {
                "start": int(s["start"]),
                "objective": _num(s["objective"]),
                "iterations": int(s["iterations"]),
                "converged": bool(s["converged"]),
            }
            for s in fit.starts
        ],
    }


def saturation_to_dict(params: GrowthParams, sat: SaturationReport, spec: Optional[SolutionSpec] = None) -> dict:
    t_origin = spec.t_origin if spec is not None else 0.0
    equip = None
    if spec is not None and sat.t_nl is not None:
        eta_term, transient = bracket_terms(spec, sat.t_nl)
        equip = {"eta_term": eta_term, "transient_term": transient}
    return {
        "kind": "saturation",
        "params": params_to_dict(params),
        "c": None if spec is None else _num(spec.c),
        "t_origin": t_origin,
        "phi_sat": _num(sat.phi_sat),
        "unbounded": sat.unbounded,
        "t_nl": sat.t_nl,
        "t_nl_calendar": None if sat.t_nl is None else t_origin + sat.t_nl,
        "equipartition": equip,
    }


def _complex(w: complex) -> dict:
    return {"re": float(w.real), "im": float(w.imag)}


def stability_to_dict(rep: StabilityReport, r_params: GrowthParams, h_params: GrowthParams) -> dict:
    c = rep.coeffs
    return {
        "kind": "stability",
        "r_params": params_to_dict(r_params),
        "h_params": params_to_dict(h_params),
        "equilibrium": [float(x) for x in rep.equilibrium],
        "coeffs": {"a": c.a, "b": c.b, "c_coef": c.c_coef, "d": c.d},
        "omega1": _complex(rep.omega1),
        "omega2": _complex(rep.omega2),
        "classification": rep.classification,
    }


def line_fit_to_dict(fit: LineFit) -> dict:
    return {"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared, "n_points": fit.n_points}


def make_report(command: str, inputs: dict, result: dict, seed: Optional[int] = None) -> dict:
    report = {
        "tool_version": __version__,
        "command": command,
        "inputs": inputs,
        "result": result,
        "seed": seed,
    }
    validate(report)
    return report


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps(report: dict, indent: Optional[int] = 2) -> str:
    # float repr is the shortest string that round-trips the double exactly
    return json.dumps(report, indent=indent, default=_default, allow_nan=False)


def loads(text: str) -> dict:
    report = json.loads(text)
    validate(report)
    return report


def spec_from_report(report: dict) -> SolutionSpec:
    """Rebuild the fitted :class:`SolutionSpec` from a ``fit`` report, or
    from a ``predict`` report that embeds one."""
    result = report["result"]
    if result.get("kind") == "saturation" and "fit" in result:
        result = result["fit"]
    if result.get("kind") != "fit":
        raise ValueError(f"expected a fit report, got kind {result.get('kind')!r}")
    return SolutionSpec(params_from_dict(result["params"]), result["c"], result["t_origin"])
