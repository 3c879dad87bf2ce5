"""Scenario-file-driven command line front end.

Subcommands: characteristics, density, velocity, shock, collapse, analyze,
verify, schema.  Scenario files are JSON (see ``shelldyn schema``); outputs
are CSV/JSON with fixed 17-significant-digit formatting so identical inputs
produce byte-identical files.

Exit codes: 0 success, 1 invalid configuration, 2 numeric-domain failure,
3 shock/collapse reached before the requested time (report on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, characteristics, density, kernels, model, oracle
from .errors import (DomainError, NotApplicableError, NumericDomainError,
                     PastCollapseError, PastShockError, QuasiRelativismError,
                     ShellDynError, SingularityError, ToleranceNotMetError)

_NUMBER_POS = {"type": "number", "exclusiveMinimum": 0}

SCENARIO_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "shelldyn scenario file",
    "type": "object",
    "required": ["scenario", "profile", "run"],
    "additionalProperties": False,
    "properties": {
        "scenario": {
            "type": "object",
            "required": ["interaction", "symmetry", "regime"],
            "additionalProperties": False,
            "properties": {
                "interaction": {"enum": ["em", "gravity"]},
                "symmetry": {"enum": ["sphere", "cylinder"]},
                "regime": {"enum": ["relativistic", "classical"]},
                "q": {"type": "number"},
                "m": _NUMBER_POS,
                "c": _NUMBER_POS,
                "eps0": _NUMBER_POS,
                "G": _NUMBER_POS,
                "slab_height_ell": _NUMBER_POS,
            },
        },
        "profile": {
            "type": "object",
            "required": ["variant"],
            "oneOf": [
                {
                    "properties": {
                        "variant": {"const": "uniform"},
                        "rho0": {"type": "number", "minimum": 0},
                        "r_max": _NUMBER_POS,
                    },
                    "required": ["variant", "rho0", "r_max"],
                    "additionalProperties": False,
                },
                {
                    "properties": {
                        "variant": {"const": "log_normal_shell"},
                        "f0": _NUMBER_POS,
                        "tau": _NUMBER_POS,
                        "mu_r": {"type": "number"},
                        "sigma_r": _NUMBER_POS,
                    },
                    "required": ["variant", "f0", "tau"],
                    "additionalProperties": False,
                },
                {
                    "properties": {
                        "variant": {"const": "tabulated"},
                        "nodes": {
                            "type": "array",
                            "minItems": 2,
                            "items": {
                                "type": "array",
                                "minItems": 2,
                                "maxItems": 2,
                                "items": {"type": "number"},
                            },
                        },
                        "r_max": _NUMBER_POS,
                    },
                    "required": ["variant", "nodes", "r_max"],
                    "additionalProperties": False,
                },
            ],
        },
        "run": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_max": _NUMBER_POS,
                "n_layers": {"type": "integer", "minimum": 2},
                "n_time_samples": {"type": "integer", "minimum": 2},
                "r_grid": {
                    "type": "object",
                    "required": ["lo", "hi"],
                    "additionalProperties": False,
                    "properties": {"lo": _NUMBER_POS, "hi": _NUMBER_POS},
                },
                "hbar": _NUMBER_POS,
                "tolerances": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "ode": _NUMBER_POS,
                        "quadrature": _NUMBER_POS,
                        "inverse": _NUMBER_POS,
                    },
                },
                "nondimensionalize": {"type": "boolean"},
            },
        },
    },
}

_SI_DEFAULTS = {
    "q": model.ELECTRON_CHARGE_SI,
    "m": model.ELECTRON_MASS_SI,
    "c": model.C_LIGHT_SI,
    "eps0": model.EPS0_SI,
    "G": model.G_SI,
}


def fmt(x) -> str:
    """Fixed 17-significant-digit, locale-independent number formatting."""
    return "%.17g" % float(x)


def load_scenario_file(path, regime_override=None):
    import jsonschema

    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}")
    try:
        jsonschema.validate(raw, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"scenario file invalid: {exc.message}")

    sc = dict(raw["scenario"])
    run = dict(raw.get("run", {}))
    nondim = run.get("nondimensionalize", True)
    if not nondim:
        needed = ["m", "c", "eps0", "G"]
        if sc["interaction"] == "em":
            needed.append("q")
        missing = [k for k in needed if k not in sc]
        if missing:
            raise ConfigError(f"dimensional mode requires explicit constants, missing {missing}")
        for k, v in _SI_DEFAULTS.items():
            sc.setdefault(k, v)
    if regime_override:
        sc["regime"] = {"rel": "relativistic", "classical": "classical"}[regime_override]
    try:
        scenario = model.Scenario(
            interaction=model.Interaction(sc["interaction"]),
            symmetry=model.Symmetry(sc["symmetry"]),
            regime=model.Regime(sc["regime"]),
            q=float(sc.get("q", 1.0)),
            m=float(sc.get("m", 1.0)),
            c=float(sc.get("c", 1.0)),
            eps0=float(sc.get("eps0", 1.0)),
            G=float(sc.get("G", 1.0)),
            slab_height_ell=float(sc.get("slab_height_ell", 1.0)),
        )
        profile = _build_profile(raw["profile"])
    except (DomainError, ValueError) as exc:
        raise ConfigError(str(exc))
    return scenario, profile, run


def _build_profile(p):
    variant = p["variant"]
    if variant == "uniform":
        return model.UniformProfile(rho0=float(p["rho0"]), r_max=float(p["r_max"]))
    if variant == "log_normal_shell":
        return model.LogNormalShellProfile(
            f0=float(p["f0"]), tau=float(p["tau"]),
            mu_r=float(p.get("mu_r", 0.0)), sigma_r=float(p.get("sigma_r", 0.2)))
    return model.TabulatedProfile(
        nodes=tuple((float(r), float(v)) for r, v in p["nodes"]),
        r_max=float(p["r_max"]))


class ConfigError(Exception):
    pass


def _layer_grid(profile, run, n_layers):
    spec = run.get("r_grid")
    if spec:
        return np.geomspace(spec["lo"], spec["hi"], n_layers)
    return model.default_layer_grid(profile, n_layers)


def _open_out(out):
    if out is None:
        return sys.stdout, False
    return open(out, "w", newline=""), True


def _write_csv(out, header, rows):
    fh, close = _open_out(out)
    try:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if not isinstance(v, str) else v for v in row) + "\n")
    finally:
        if close:
            fh.close()


def _write_json(out, payload):
    text = json.dumps(payload, indent=2) + "\n"
    fh, close = _open_out(out)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _shock_report_payload(report):
    payload = {"kind": report.kind}
    if report.kind == "caustic":
        payload.update(t_c=report.t_c, R_c=report.R_c, r_star=report.r_star)
    elif report.kind == "central_collapse":
        payload.update(t_first=report.t_first, simultaneous=report.simultaneous)
    payload["scan"] = [[r, None if math.isnan(t) else t] for r, t in report.scan]
    return payload


def _emit_shock_and_exit(profile, scenario, grid, t_max):
    report = characteristics.shock_time(profile, scenario, r_grid=grid, t_max=t_max,
                                        n_time_steps=200, refine=False)
    print(json.dumps(_shock_report_payload(report)), file=sys.stderr)
    return 3


def cmd_characteristics(args):
    scenario, profile, run = load_scenario_file(args.scenario, args.regime)
    t_max = args.t_max or run.get("t_max")
    if not t_max:
        raise ConfigError("t_max required (run.t_max or --t-max)")
    n_layers = args.layers or run.get("n_layers", 64)
    n_samples = args.samples or run.get("n_time_samples", 50)
    grid = _layer_grid(profile, run, n_layers)
    kind = kernels.kernel_kind(scenario)
    times = np.linspace(0.0, t_max, n_samples)
    rows = []
    collapsed = False
    for t in times:
        for r in grid:
            coeffs = model.layer_coefficients(profile, scenario, float(r))
            try:
                x = characteristics.layer_ratio(coeffs, kind, float(t))
            except PastCollapseError:
                collapsed = True
                continue
            beta = characteristics.beta_from_ratio(coeffs, kind, x)
            rows.append((t, r, coeffs.r * x, beta))
    _write_csv(args.out, ["t", "r0", "R", "beta"], rows)
    if collapsed:
        return _emit_shock_and_exit(profile, scenario, grid, t_max)
    return 0


def cmd_velocity(args):
    scenario, profile, run = load_scenario_file(args.scenario, args.regime)
    t_max = args.t_max or run.get("t_max")
    if not t_max:
        raise ConfigError("t_max required (run.t_max or --t-max)")
    n_layers = args.layers or run.get("n_layers", 64)
    n_samples = args.samples or run.get("n_time_samples", 50)
    grid = _layer_grid(profile, run, n_layers)
    kind = kernels.kernel_kind(scenario)
    times = np.linspace(0.0, t_max, n_samples)
    rows = []
    collapsed = False
    for t in times:
        for r in grid:
            coeffs = model.layer_coefficients(profile, scenario, float(r))
            try:
                speed = characteristics.layer_speed(coeffs, kind, float(t))
            except PastCollapseError:
                collapsed = True
                continue
            if kind.expanding:
                beta_inf = characteristics.speed_asymptote(coeffs, kind) / scenario.c
            else:
                beta_inf = math.nan
            rows.append((t, r, speed.beta, beta_inf))
    _write_csv(args.out, ["t", "r0", "beta", "beta_inf"], rows)
    if collapsed:
        return _emit_shock_and_exit(profile, scenario, grid, t_max)
    return 0


def cmd_density(args):
    scenario, profile, run = load_scenario_file(args.scenario, args.regime)
    t_max = args.t_max or run.get("t_max")
    if not t_max:
        raise ConfigError("t_max required (run.t_max or --t-max)")
    n_layers = args.layers or run.get("n_layers", 64)
    n_samples = args.samples or run.get("n_time_samples", 50)
    grid = _layer_grid(profile, run, n_layers)
    kind = kernels.kernel_kind(scenario)
    times = np.linspace(0.0, t_max, n_samples)
    rows = []
    shocked = False
    for t in times:
        snap = density.snapshot(profile, scenario, kind, grid, float(t))
        for p in snap.points:
            if not math.isfinite(p.jac) or p.jac <= 0.0:
                shocked = True
            rows.append((t, p.r0, p.R, p.rho, p.jac, "1" if p.near_caustic else "0"))
    _write_csv(args.out, ["t", "r0", "R", "rho", "jac", "near_caustic"], rows)
    if shocked:
        return _emit_shock_and_exit(profile, scenario, grid, t_max)
    return 0


def cmd_shock(args):
    scenario, profile, run = load_scenario_file(args.scenario, args.regime)
    t_max = args.t_max or run.get("t_max")
    if not t_max:
        raise ConfigError("t_max required (run.t_max or --t-max)")
    n_layers = args.layers or run.get("n_layers", 64)
    grid = _layer_grid(profile, run, n_layers)
    report = characteristics.shock_time(profile, scenario, r_grid=grid, t_max=t_max)
    _write_json(args.out, _shock_report_payload(report))
    return 0


def cmd_collapse(args):
    scenario, profile, run = load_scenario_file(args.scenario, args.regime)
    times = characteristics.collapse_times(profile, scenario)
    _write_json(args.out, {"T_s": times.T_sphere, "T_c": times.T_cylinder,
                           "ratio": times.ratio})
    return 0


def cmd_analyze(args):
    scenario, profile, run = load_scenario_file(args.scenario, args.regime)
    t_max = args.t_max or run.get("t_max")
    if not t_max:
        raise ConfigError("t_max required (run.t_max or --t-max)")
    n_layers = args.layers or run.get("n_layers", 64)
    n_samples = args.samples or run.get("n_time_samples", 50)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = _layer_grid(profile, run, n_layers)
    kind = kernels.kernel_kind(scenario)
    hbar = run.get("hbar", 1.0 if run.get("nondimensionalize", True) else model.HBAR_SI)

    snap = density.snapshot(profile, scenario, kind, grid, t_max)
    prof_q = analysis.quantum_potential(snap, scenario.m, hbar)
    _write_csv(out_dir / "analyze_quantum_potential.csv", ["R", "Q"],
               list(zip(prof_q.radii, prof_q.values)))

    try:
        times = np.linspace(0.0, t_max, n_samples)
        rows = [(t, analysis.effective_velocity_coefficient(profile, scenario, float(t))[0])
                for t in times]
        _write_csv(out_dir / "analyze_velocity_coefficient.csv", ["t", "b"], rows)
    except NotApplicableError as exc:
        print(f"velocity coefficient skipped: {exc}", file=sys.stderr)
    return 0


_ODE_TOL_LIMIT = 1e-6   # verify passes iff max ODE deviation stays below this
_QUAD_TOL_LIMIT = 1e-9


def _verify_one_kind(profile, scenario, ode_tol):
    kind = kernels.kernel_kind(scenario)
    lo, hi = model.support_radii(profile)
    layers = np.geomspace(max(lo, 0.05 * hi), hi, 3)
    max_ode = 0.0
    max_quad = 0.0
    for r in layers:
        coeffs = model.layer_coefficients(profile, scenario, float(r))
        if coeffs.lam == 0.0:
            continue
        if kind.expanding:
            t_end = 3.0 / coeffs.lam
        else:
            t_end = 0.95 * characteristics.arrival_time(coeffs, kind)

        def closed_form(t, _c=coeffs, _k=kind):
            return characteristics.layer_radius(_c, _k, t)

        res = oracle.integrate_layer_ode(coeffs, kind, t_end, tol=ode_tol)
        stride = max(1, len(res.samples) // 33)
        for t, radius, _v in res.samples[::stride]:
            max_ode = max(max_ode, abs(radius - closed_form(t)) / coeffs.r)
        for frac in (0.25, 0.5, 0.75, 1.0):
            t = frac * t_end
            radius = closed_form(t)
            t_quad = oracle.time_of_flight(coeffs, kind, radius)
            speed = abs(oracle.first_integral_speed(coeffs, kind, radius))
            max_quad = max(max_quad, abs(t_quad - t) * speed / coeffs.r)
    return {"kind": str(kind), "max_ode_rel_err": max_ode,
            "max_quadrature_rel_err": max_quad,
            "pass": bool(max_ode <= _ODE_TOL_LIMIT and max_quad <= _QUAD_TOL_LIMIT)}


def cmd_verify(args):
    scenario, profile, run = load_scenario_file(args.scenario, args.regime)
    ode_tol = run.get("tolerances", {}).get("ode", 1e-10)
    reports = []
    if args.all_kinds:
        for interaction in model.Interaction:
            for symmetry in model.Symmetry:
                for regime in model.Regime:
                    sc = model.Scenario(interaction, symmetry, regime,
                                        q=scenario.q, m=scenario.m, c=scenario.c,
                                        eps0=scenario.eps0, G=scenario.G,
                                        slab_height_ell=scenario.slab_height_ell)
                    reports.append(_verify_one_kind(profile, sc, ode_tol))
    else:
        reports.append(_verify_one_kind(profile, scenario, ode_tol))
    ok = all(r["pass"] for r in reports)
    _write_json(args.out, {"pass": ok, "kinds": reports})
    return 0 if ok else 2


def cmd_schema(args):
    _write_json(args.out, SCENARIO_SCHEMA)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="shelldyn",
        description="Exact self-consistent expansion/collapse of radial layers")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "characteristics": (cmd_characteristics, "layer trajectories CSV (t, r0, R, beta)"),
        "density": (cmd_density, "density snapshots CSV (t, r0, R, rho, jac, near_caustic)"),
        "velocity": (cmd_velocity, "layer speeds CSV (t, r0, beta, beta_inf)"),
        "shock": (cmd_shock, "caustic / collapse report JSON"),
        "collapse": (cmd_collapse, "uniform classical collapse times JSON"),
        "analyze": (cmd_analyze, "quantum potential and velocity-coefficient CSVs"),
        "verify": (cmd_verify, "oracle three-way agreement report JSON"),
        "schema": (cmd_schema, "print the scenario-file JSON schema"),
    }
    for name, (func, help_text) in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if name != "schema":
            p.add_argument("--scenario", required=True, help="scenario JSON file")
            p.add_argument("--t-max", type=float, default=None, dest="t_max")
            p.add_argument("--layers", type=int, default=None)
            p.add_argument("--samples", type=int, default=None)
            p.add_argument("--regime", choices=["rel", "classical"], default=None)
            p.add_argument("--seed", type=int, default=None,
                           help="reserved; all algorithms are deterministic")
        p.add_argument("--out", default=None, help="output path (analyze: directory)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PastShockError, PastCollapseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, NumericDomainError, QuasiRelativismError, SingularityError,
            ToleranceNotMetError, NotApplicableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ShellDynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
