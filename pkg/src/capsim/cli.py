"""Command-line surface.

Subcommands: simulate, slowflow, averaged, fixed-points, sweep, compare and
plot.  All but plot take a scenario config file.  Exit codes: 0 on success,
1 on domain/config errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import averaged as averaged_mod
from . import slowflow as slowflow_mod
from . import sweeps
from .config import load_config
from .errors import ConfigError, DivergenceError, DomainError
from .integrator import integrate_full, mean_steady_velocity, running_average
from .svgfig import Series, plot_region_map, plot_series
from .tables import ResultTable, emit_csv, read_csv

_BRANCH_CODE = {slowflow_mod.BRANCH_TRIVIAL: 0.0, slowflow_mod.BRANCH_UPPER: 1.0,
                slowflow_mod.BRANCH_LOWER: 2.0}
_STAB_CODE = {"stable": 1.0, "unstable": 0.0, "marginal": 0.5}


def _ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require_mode(cfg, expected: str) -> None:
    if cfg.mode != expected:
        raise ConfigError(f"config mode is {cfg.mode!r} but the {expected!r} "
                          "subcommand was invoked")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    _require_mode(cfg, "simulate")
    out = _ensure_dir(args.out or cfg.out_dir)
    params = cfg.nondim_params()
    ic = cfg.initial_full()
    opts = cfg.integrator_options(params.omega)
    traj = integrate_full(params, ic, opts)
    avg = running_average(traj)
    table = ResultTable(
        columns=["t", "x", "v", "theta", "theta_dot", "v_running_avg"],
        data=np.column_stack([traj.t, traj.y, avg]),
        provenance=cfg.provenance())
    csv_path = os.path.join(out, f"{cfg.label}_trajectory.csv")
    emit_csv(table, csv_path)

    regime, stats = sweeps.classify_regime(traj, params.omega, cfg.discard)
    pred = sweeps.predicted_velocity(params, regime)
    abs_err = abs(stats["mean_velocity"] - pred)
    summary = {
        "label": cfg.label, "config_hash": cfg.hash, "regime": regime,
        "mean_velocity": stats["mean_velocity"], "predicted_velocity": pred,
        "relative_error": abs_err / abs(pred) if pred != 0.0 else abs_err,
        "tail_theta_amplitude": stats["theta_amplitude"],
        "tail_rotation_rate": stats["rotation_rate"],
    }
    json_path = os.path.join(out, f"{cfg.label}_summary.json")
    _write_json(json_path, summary)
    print(csv_path)
    print(json_path)
    return 0


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    _require_mode(cfg, "compare")
    out = _ensure_dir(args.out or cfg.out_dir)
    params = cfg.nondim_params()
    kind = cfg.kind or ("rotatory" if params.amp >= 1.0 else "oscillatory")
    spec = sweeps.CaseSpec(cfg.label, params, cfg.initial_full(),
                           cfg.sections["integrator"]["t_end"], kind)
    report = sweeps.run_case(
        spec, cfg.sections["integrator"]["steps_per_period"],
        cfg.sections["integrator"]["samples_per_period"], cfg.discard)
    summary = {
        "label": report.label, "config_hash": cfg.hash, "kind": kind,
        "regime": report.regime, "mean_velocity": report.mean_velocity,
        "predicted_velocity": report.predicted_velocity,
        "abs_error": report.abs_error, "relative_error": report.relative_error,
        "tail_theta_amplitude": report.tail_theta_amplitude,
        "tail_rotation_rate": report.tail_rotation_rate,
        "tail_rotations": report.tail_rotations,
    }
    json_path = os.path.join(out, f"{cfg.label}_compare.json")
    _write_json(json_path, summary)
    print(json_path)
    return 0


def cmd_slowflow(args) -> int:
    cfg = load_config(args.config)
    _require_mode(cfg, "slowflow")
    out = _ensure_dir(args.out or cfg.out_dir)
    p = cfg.slowflow_params()
    init = cfg.sections["initial"]
    phi0 = complex(init.get("phi_re", 0.0), init.get("phi_im", 0.0))
    # t_end is slow time here; dt defaults to 0.01 slow-time units.
    t1_end = cfg.sections["integrator"]["t_end"]
    dt = cfg.sections["integrator"].get("dt", 0.01)
    series = slowflow_mod.integrate_slowflow(phi0, init.get("D", 0.0), p, t1_end, dt)
    table = ResultTable(
        columns=["t1", "phi_re", "phi_im", "phi_abs", "drift"],
        data=np.column_stack([series.t1, series.phi.real, series.phi.imag,
                              np.abs(series.phi), series.drift]),
        provenance=cfg.provenance())
    csv_path = os.path.join(out, f"{cfg.label}_slowflow.csv")
    emit_csv(table, csv_path)
    env = slowflow_mod.reconstruct_envelopes(series)
    env_table = ResultTable(
        columns=["t", "angle_amplitude", "velocity_upper", "velocity_lower",
                 "velocity_mean"],
        data=np.column_stack([env.t, env.angle_amplitude, env.velocity_upper,
                              env.velocity_lower, env.velocity_mean]),
        provenance=cfg.provenance())
    env_path = os.path.join(out, f"{cfg.label}_envelopes.csv")
    emit_csv(env_table, env_path)
    summary = _slowflow_summary(p)
    summary.update({"label": cfg.label, "config_hash": cfg.hash,
                    "final_phi_abs": float(abs(series.phi[-1])),
                    "final_drift": float(series.drift[-1])})
    json_path = os.path.join(out, f"{cfg.label}_summary.json")
    _write_json(json_path, summary)
    print(csv_path)
    print(env_path)
    print(json_path)
    return 0


def _slowflow_summary(p) -> dict:
    sigmas = slowflow_mod.bifurcation_sigmas(p.P, p.xi)
    info = {
        "P": p.P, "xi": p.xi, "sigma": p.sigma,
        "sigma_b1": sigmas[0] if sigmas else None,
        "sigma_b2": sigmas[1] if sigmas else None,
        "region": slowflow_mod.classify_region(p.P, p.sigma, p.xi).value,
        "fixed_points": [
            {"branch": fp.branch, "amplitude": fp.amplitude, "drift": fp.drift,
             "stability": fp.stability}
            for fp in slowflow_mod.fixed_points(p)],
    }
    return info


def cmd_averaged(args) -> int:
    cfg = load_config(args.config)
    _require_mode(cfg, "averaged")
    out = _ensure_dir(args.out or cfg.out_dir)
    p = cfg.averaged_params()
    init = cfg.sections["initial"]
    if "theta_a" in init:
        ic = (init["theta_a"], init.get("theta_a_dot", 0.0), init.get("D", 0.0))
    elif "theta" in init:
        ic = averaged_mod.map_initial_conditions(init["theta"],
                                                 init.get("theta_dot", 0.0), p)
    else:
        raise ConfigError("[initial] needs theta_a (averaged phase) or theta")
    t_end = cfg.sections["integrator"]["t_end"]
    dt = cfg.sections["integrator"].get("dt", 0.01)
    series = averaged_mod.integrate_averaged(ic, p, t_end, dt)
    table = ResultTable(
        columns=["t", "theta_a", "theta_a_dot", "drift"],
        data=np.column_stack([series.t, series.theta_a, series.theta_a_dot,
                              series.drift]),
        provenance=cfg.provenance())
    csv_path = os.path.join(out, f"{cfg.label}_averaged.csv")
    emit_csv(table, csv_path)
    summary = {
        "label": cfg.label, "config_hash": cfg.hash, "eta": p.eta,
        "fixed_points": [
            {"family": fp.family, "theta": fp.theta, "drift": fp.drift,
             "osc_amplitude": fp.osc_amplitude, "stability": fp.stability}
            for fp in averaged_mod.fixed_points(p)],
        "final_theta_a": float(series.theta_a[-1]),
        "final_drift": float(series.drift[-1]),
    }
    json_path = os.path.join(out, f"{cfg.label}_summary.json")
    _write_json(json_path, summary)
    print(csv_path)
    print(json_path)
    return 0


def cmd_fixed_points(args) -> int:
    cfg = load_config(args.config)
    _require_mode(cfg, "fixed-points")
    out = _ensure_dir(args.out or cfg.out_dir)
    if "averaged" in cfg.sections:
        p = cfg.averaged_params()
        rows = [[float(fp.family), fp.theta, fp.drift, fp.osc_amplitude,
                 _STAB_CODE[fp.stability]]
                for fp in averaged_mod.fixed_points(p)]
        table = ResultTable(
            columns=["family", "theta", "drift", "osc_amplitude", "stability"],
            data=rows, provenance=cfg.provenance())
        summary = {"label": cfg.label, "config_hash": cfg.hash, "eta": p.eta,
                   "n_fixed_points": len(rows)}
    else:
        p = cfg.slowflow_params()
        rows = [[_BRANCH_CODE[fp.branch], fp.amplitude, fp.drift,
                 _STAB_CODE[fp.stability], fp.eigenvalues_phi[0].real,
                 fp.eigenvalues_phi[1].real, fp.eigenvalue_drift]
                for fp in slowflow_mod.fixed_points(p)]
        table = ResultTable(
            columns=["branch", "amplitude", "drift", "stability",
                     "eig_phi_re_1", "eig_phi_re_2", "eig_drift"],
            data=rows, provenance=cfg.provenance())
        summary = _slowflow_summary(p)
        summary.update({"label": cfg.label, "config_hash": cfg.hash})
    csv_path = os.path.join(out, f"{cfg.label}_fixed_points.csv")
    emit_csv(table, csv_path)
    json_path = os.path.join(out, f"{cfg.label}_summary.json")
    _write_json(json_path, summary)
    print(csv_path)
    print(json_path)
    return 0


def _branch_plot_series(sigma, amp, stab, label, color):
    amp = np.asarray(amp)
    stab = np.asarray(stab)
    stable = np.where(stab == 1.0, amp, np.nan)
    unstable = np.where(np.isfinite(amp) & (stab != 1.0), amp, np.nan)
    out = []
    if np.any(np.isfinite(stable)):
        out.append(Series(sigma, stable, f"{label} (stable)", color))
    if np.any(np.isfinite(unstable)):
        out.append(Series(sigma, unstable, f"{label} (unstable)", color, dashed=True))
    return out


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    _require_mode(cfg, "sweep")
    out = _ensure_dir(args.out or cfg.out_dir)
    sw = cfg.sections.get("sweep", {})
    workers = args.workers

    def need(key):
        if key not in sw:
            raise ConfigError(f"[sweep] missing key {key!r} for kind {cfg.kind!r}")
        return sw[key]

    def block(section, key, default=None):
        body = cfg.sections.get(section, {})
        if key in body:
            return body[key]
        if default is None:
            raise ConfigError(f"[{section}] missing key {key!r} for kind {cfg.kind!r}")
        return default

    if cfg.kind == "bifurcation":
        p = cfg.slowflow_params()
        grid = sweeps.bifurcation_sweep_21(
            p.P, p.xi, p.mu1, p.mu2, need("sigma_min"), need("sigma_max"),
            need("sigma_count"), verify_sigmas=sw.get("verify_sigmas", ()),
            verify_eps=p.eps, verify_theta0=sw.get("theta0", 2.0),
            horizon=sw.get("horizon", 3000.0), workers=workers)
        table = ResultTable(grid.columns, grid.rows, cfg.provenance())
        csv_path = os.path.join(out, f"{cfg.label}_bifurcation.csv")
        emit_csv(table, csv_path)
        paths = [csv_path]
        if "verification" in grid.overlays:
            cols, rows = grid.overlays["verification"]
            dots_path = os.path.join(out, f"{cfg.label}_verification.csv")
            emit_csv(ResultTable(cols, rows, cfg.provenance()), dots_path)
            paths.append(dots_path)
        svg_path = os.path.join(out, f"{cfg.label}_bifurcation.svg")
        _plot_bifurcation_table(table, grid.overlays.get("verification"), svg_path,
                                cfg.provenance())
        paths.append(svg_path)
    elif cfg.kind == "region":
        grid = sweeps.region_map(
            need("P_min"), need("P_max"), need("P_count"),
            need("sigma_min"), need("sigma_max"), need("sigma_count"),
            xi=block("slowflow", "xi"), mu1=block("slowflow", "mu1"),
            mu2=block("slowflow", "mu2"), empirical=sw.get("empirical", False),
            eps=block("slowflow", "epsilon", 0.01),
            horizon=sw.get("horizon", 3000.0), workers=workers)
        table = ResultTable(grid.columns, grid.rows, cfg.provenance())
        csv_path = os.path.join(out, f"{cfg.label}_region.csv")
        emit_csv(table, csv_path)
        svg_path = os.path.join(out, f"{cfg.label}_region.svg")
        _plot_region_table(table, grid.axes, svg_path, cfg.provenance())
        paths = [csv_path, svg_path]
    elif cfg.kind == "rotatory":
        grid = sweeps.rotatory_sweep_11(
            block("averaged", "A"), block("averaged", "zeta"),
            block("averaged", "mu1"), block("averaged", "mu2"),
            block("averaged", "epsilon", 0.01),
            need("eta_min"), need("eta_max"), need("eta_count"))
        table = ResultTable(grid.columns, grid.rows, cfg.provenance())
        csv_path = os.path.join(out, f"{cfg.label}_rotatory.csv")
        emit_csv(table, csv_path)
        svg_path = os.path.join(out, f"{cfg.label}_rotatory.svg")
        eta = table.column("eta")
        plot_series(
            [Series(eta, table.column("theta_stable"), "locked phase (stable)"),
             Series(eta, table.column("theta_unstable"), "locked phase (unstable)",
                    dashed=True)],
            svg_path, title="rotatory fixed points", xlabel="eta",
            ylabel="locked phase", provenance=cfg.provenance())
        drift_path = os.path.join(out, f"{cfg.label}_drift.svg")
        plot_series([Series(eta, table.column("drift"), "steady drift")],
                    drift_path, title="rotatory steady drift", xlabel="eta",
                    ylabel="drift", provenance=cfg.provenance())
        paths = [csv_path, svg_path, drift_path]
    else:  # pragma: no cover - parse_config already validates
        raise ConfigError(f"unknown sweep kind {cfg.kind!r}")
    for path in paths:
        print(path)
    return 0


def _plot_bifurcation_table(table, overlay, path, provenance):
    sigma = table.column("sigma")
    series = []
    for branch, color in (("trivial", "#1f77b4"), ("upper", "#d62728"),
                          ("lower", "#2ca02c")):
        series += _branch_plot_series(sigma, table.column(f"amp_{branch}"),
                                      table.column(f"stab_{branch}"), branch, color)
    if overlay is not None:
        cols, rows = overlay
        arr = np.asarray(rows, dtype=float)
        if arr.size:
            series.append(Series(arr[:, cols.index("sigma")],
                                 arr[:, cols.index("amp_scaled")],
                                 "full model", "#9467bd", scatter=True))
    plot_series(series, path, title="oscillatory branch amplitudes",
                xlabel="sigma", ylabel="|phi|", provenance=provenance)


def _plot_region_table(table, axes, path, provenance):
    p_axis, s_axis = axes
    codes = table.column("region").reshape(p_axis.count, s_axis.count)
    plot_region_map(p_axis.values(), s_axis.values(), codes, path,
                    title="response regions", xlabel="P", ylabel="sigma",
                    labels={1: "I trivial only", 2: "II progressive",
                            3: "III bistable"}, provenance=provenance)


def cmd_plot(args) -> int:
    out = _ensure_dir(args.out)
    try:
        table = read_csv(args.csv)
    except OSError as exc:
        raise DomainError(f"cannot read {args.csv}: {exc}") from None
    stem = os.path.splitext(os.path.basename(args.csv))[0]
    path = os.path.join(out, f"{stem}.svg")
    cols = set(table.columns)
    kind = args.kind
    if kind is None:
        if {"t", "v", "v_running_avg"} <= cols:
            kind = "trajectory"
        elif {"P", "sigma", "region"} <= cols:
            kind = "region"
        elif {"sigma", "amp_upper"} <= cols:
            kind = "bifurcation"
        elif {"t1", "phi_abs"} <= cols:
            kind = "slowflow"
        elif {"eta", "theta_stable"} <= cols:
            kind = "rotatory"
        else:
            raise DomainError(f"cannot infer plot kind from columns {sorted(cols)}")
    if kind == "trajectory":
        plot_series([Series(table.column("t"), table.column("v"), "velocity"),
                     Series(table.column("t"), table.column("v_running_avg"),
                            "running average")],
                    path, title="capsule velocity", xlabel="t", ylabel="v",
                    provenance=table.provenance)
    elif kind == "region":
        n_p = len(np.unique(table.column("P")))
        n_s = len(np.unique(table.column("sigma")))
        codes = table.column("region").reshape(n_p, n_s)
        plot_region_map(np.unique(table.column("P")), np.unique(table.column("sigma")),
                        codes, path, title="response regions", xlabel="P",
                        ylabel="sigma", labels={1: "I trivial only",
                                                2: "II progressive", 3: "III bistable"},
                        provenance=table.provenance)
    elif kind == "bifurcation":
        _plot_bifurcation_table(table, None, path, table.provenance)
    elif kind == "slowflow":
        plot_series([Series(table.column("t1"), table.column("phi_abs"), "|phi|"),
                     Series(table.column("t1"), table.column("drift"), "drift")],
                    path, title="slow flow", xlabel="t1", ylabel="amplitude",
                    provenance=table.provenance)
    elif kind == "rotatory":
        plot_series([Series(table.column("eta"), table.column("theta_stable"),
                            "locked phase (stable)"),
                     Series(table.column("eta"), table.column("theta_unstable"),
                            "locked phase (unstable)", dashed=True)],
                    path, title="rotatory fixed points", xlabel="eta",
                    ylabel="phase", provenance=table.provenance)
    else:
        raise DomainError(f"unknown plot kind {kind!r}")
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capsim",
        description="Simulate and analyze passive vibration-driven capsule locomotion.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        return p

    for name, fn, help_text in (
            ("simulate", cmd_simulate, "integrate the full model"),
            ("slowflow", cmd_slowflow, "integrate the oscillatory reduced model"),
            ("averaged", cmd_averaged, "integrate the rotatory reduced model"),
            ("fixed-points", cmd_fixed_points, "tabulate steady states"),
            ("compare", cmd_compare, "full model versus reduced prediction"),
            ("sweep", cmd_sweep, "run a parameter sweep")):
        p = add(name, fn, help_text)
        p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--out", default=None, help="output directory")
        if name == "sweep":
            p.add_argument("--workers", type=int, default=1,
                           help="process pool size for sweep points")
    p = add("plot", cmd_plot, "render a result CSV as SVG")
    p.add_argument("csv", help="result CSV to render")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--kind", default=None,
                   choices=["trajectory", "region", "bifurcation", "slowflow",
                            "rotatory"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (DomainError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"error: {exc} (last finite time t = {exc.t_last})", file=sys.stderr)
        return 1


def entry() -> None:  # console-script hook
    sys.exit(main())


if __name__ == "__main__":
    entry()
