"""Reproduction harness: case studies, bifurcation and region sweeps, and
full-model versus reduced-model agreement.

Grid evaluations are independent per point; `workers` > 1 fans them out over
a process pool and results are merged back in grid order, so reports are
deterministic for identical inputs.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from . import averaged, slowflow
from .errors import DomainError
from .integrator import IntegratorOptions, integrate_full, mean_steady_velocity
from .model import FullState, NondimParams

# Regime classifier thresholds, applied uniformly to every case and sweep point.
TRIVIAL_MEAN_V = 1e-4
TRIVIAL_THETA_AMP = 1e-2
ROTATORY_RATE_TOL = 0.10

REGIME_TRIVIAL = "trivial"
REGIME_PROGRESSIVE = "progressive"
REGIME_ROTATORY = "rotatory"


@dataclass(frozen=True)
class CaseSpec:
    """One full-model scenario: parameters, initial state and horizon.

    kind names the reduced model the case is meant to probe ("oscillatory"
    or "rotatory"); the regime classifier itself is agnostic to it.
    """

    label: str
    params: NondimParams
    initial: FullState
    horizon: float
    kind: str = "oscillatory"

    def __post_init__(self):
        if not self.horizon > 0.0:
            raise DomainError("horizon must be positive")
        if self.kind not in ("oscillatory", "rotatory"):
            raise DomainError(f"unknown case kind {self.kind!r}")


def builtin_cases() -> dict[str, CaseSpec]:
    """The five reference scenarios exercised throughout the test-suite."""
    osc = dict(eps=0.01, zeta=0.01, mu1=0.01, mu2=0.02)
    return {
        "case1": CaseSpec("case1", NondimParams(omega=2.0, amp=0.01, **osc),
                          FullState(theta=2.0), 3000.0, "oscillatory"),
        "case2": CaseSpec("case2", NondimParams(omega=2.0, amp=0.08, **osc),
                          FullState(theta=0.001), 3000.0, "oscillatory"),
        "case3": CaseSpec("case3", NondimParams(omega=1.94, amp=0.08, **osc),
                          FullState(theta=2.0), 3000.0, "oscillatory"),
        "case4": CaseSpec("case4", NondimParams(omega=1.94, amp=0.08, **osc),
                          FullState(theta=0.5), 3000.0, "oscillatory"),
        "rotatory": CaseSpec("rotatory",
                             NondimParams(eps=0.01, omega=2.0, amp=8.0, zeta=1.0,
                                          mu1=0.01, mu2=0.02),
                             FullState(theta=2.0), 1500.0, "rotatory"),
    }


@dataclass(frozen=True)
class ComparisonReport:
    """Full-model tail statistics against the matching reduced prediction."""

    label: str
    regime: str
    mean_velocity: float
    predicted_velocity: float
    abs_error: float
    relative_error: float
    tail_theta_amplitude: float
    tail_rotation_rate: float  # tail mean of theta_dot
    tail_rotations: float  # net pendulum turns over the tail


def classify_regime(traj, omega: float, discard: float = 0.5) -> tuple[str, dict]:
    """Label a full-model trajectory as trivial, progressive or rotatory.

    trivial:    tail |mean v| < 1e-4 and tail angle amplitude < 1e-2
    rotatory:   tail mean rotation rate within 10% of +/- omega
    progressive otherwise
    """
    v_stats = mean_steady_velocity(traj, discard, component=1)
    start = int(math.floor(discard * len(traj)))
    theta_tail = traj.theta[start:]
    theta_amp = 0.5 * (np.max(theta_tail) - np.min(theta_tail))
    rate = float(np.mean(traj.theta_dot[start:]))
    rotations = float((theta_tail[-1] - theta_tail[0]) / (2.0 * math.pi))
    stats = {"mean_velocity": v_stats.mean, "velocity_amplitude": v_stats.amplitude,
             "theta_amplitude": float(theta_amp), "rotation_rate": rate,
             "rotations": rotations}
    if abs(v_stats.mean) < TRIVIAL_MEAN_V and theta_amp < TRIVIAL_THETA_AMP:
        return REGIME_TRIVIAL, stats
    if abs(abs(rate) - omega) < ROTATORY_RATE_TOL * omega:
        return REGIME_ROTATORY, stats
    return REGIME_PROGRESSIVE, stats


def predicted_velocity(params: NondimParams, regime: str) -> float:
    """Reduced-model mean-velocity prediction for an observed regime."""
    if regime == REGIME_TRIVIAL:
        return 0.0
    if regime == REGIME_ROTATORY:
        points = averaged.fixed_points(averaged.to_averaged_params(params))
        stable = [fp for fp in points if fp.stability == "stable"]
        return stable[0].drift if stable else 0.0
    sp = slowflow.to_slowflow_params(params)
    upper = next((b for b in slowflow.amplitude_branches(sp)
                  if b.branch == slowflow.BRANCH_UPPER and b.exists), None)
    if upper is None:
        return 0.0
    return params.eps**1.5 * slowflow.solve_drift(upper.amplitude, sp.mu1, sp.mu2)


def run_case(spec: CaseSpec, steps_per_period: int = 200,
             samples_per_period: int = 200, discard: float = 0.5,
             use_numba: bool | None = None) -> ComparisonReport:
    """Integrate one case and compare against the reduced-model prediction."""
    opts = IntegratorOptions.for_forcing(spec.params.omega, spec.horizon,
                                         steps_per_period, samples_per_period)
    traj = integrate_full(spec.params, spec.initial, opts, use_numba=use_numba)
    regime, stats = classify_regime(traj, spec.params.omega, discard)
    pred = predicted_velocity(spec.params, regime)
    abs_err = abs(stats["mean_velocity"] - pred)
    rel_err = abs_err / abs(pred) if pred != 0.0 else abs_err
    return ComparisonReport(label=spec.label, regime=regime,
                            mean_velocity=stats["mean_velocity"],
                            predicted_velocity=pred, abs_error=abs_err,
                            relative_error=rel_err,
                            tail_theta_amplitude=stats["theta_amplitude"],
                            tail_rotation_rate=stats["rotation_rate"],
                            tail_rotations=stats["rotations"])


@dataclass(frozen=True)
class SweepAxis:
    name: str
    minimum: float
    maximum: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise DomainError("sweep axes need at least 2 points")
        if not self.maximum > self.minimum:
            raise DomainError("sweep axis must have maximum > minimum")

    def values(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.count)


@dataclass
class SweepGrid:
    """Rectangular sweep result: axis definitions plus per-point rows."""

    axes: tuple[SweepAxis, ...]
    columns: list[str]
    rows: list[list[float]]
    overlays: dict = field(default_factory=dict)  # name -> (columns, rows)


def _pool_map(fn, items, workers: int):
    if workers <= 1:
        return [fn(item) for item in items]
    ctx = multiprocessing.get_context("spawn")
    with ctx.Pool(workers) as pool:
        return pool.map(fn, items)


_STABILITY_CODE = {"stable": 1.0, "unstable": 0.0, "marginal": 0.5}


def bifurcation_sweep_21(P: float, xi: float, mu1: float, mu2: float,
                         sigma_min: float, sigma_max: float, count: int,
                         verify_sigmas=(), verify_eps: float = 0.01,
                         verify_theta0: float = 2.0, horizon: float = 3000.0,
                         workers: int = 1) -> SweepGrid:
    """Branch amplitudes, drifts and stability across a detuning range.

    Optional verification points rerun the full model at chosen detunings and
    record the measured tail statistics in slow-flow units as an overlay.
    """
    axis = SweepAxis("sigma", sigma_min, sigma_max, count)
    columns = ["sigma",
               "amp_trivial", "drift_trivial", "stab_trivial",
               "amp_upper", "drift_upper", "stab_upper",
               "amp_lower", "drift_lower", "stab_lower"]
    rows = []
    for sigma in axis.values():
        p = slowflow.SlowFlowParams21(P=P, xi=xi, sigma=float(sigma),
                                      mu1=mu1, mu2=mu2, eps=verify_eps)
        by_branch = {fp.branch: fp for fp in slowflow.fixed_points(p)}
        row = [float(sigma)]
        for branch in (slowflow.BRANCH_TRIVIAL, slowflow.BRANCH_UPPER,
                       slowflow.BRANCH_LOWER):
            fp = by_branch.get(branch)
            if fp is None:
                row += [math.nan, math.nan, math.nan]
            else:
                row += [fp.amplitude, fp.drift, _STABILITY_CODE[fp.stability]]
        rows.append(row)
    grid = SweepGrid((axis,), columns, rows)
    if verify_sigmas:
        items = [(float(s), P, xi, mu1, mu2, verify_eps, verify_theta0, horizon)
                 for s in verify_sigmas]
        dots = _pool_map(_bifurcation_verify_point, items, workers)
        grid.overlays["verification"] = (
            ["sigma", "eps", "mean_velocity", "amp_scaled", "drift_scaled"], dots)
    return grid


def _bifurcation_verify_point(item):
    sigma, P, xi, mu1, mu2, eps, theta0, horizon = item
    params = NondimParams(eps=eps, omega=2.0 + eps * sigma, amp=eps * P,
                          zeta=eps * xi, mu1=eps * mu1, mu2=eps * mu2)
    opts = IntegratorOptions.for_forcing(params.omega, horizon)
    traj = integrate_full(params, FullState(theta=theta0), opts)
    _, stats = classify_regime(traj, params.omega)
    return [sigma, eps, stats["mean_velocity"],
            stats["theta_amplitude"] / math.sqrt(eps),
            stats["mean_velocity"] / eps**1.5]


_REGION_CODE = {slowflow.Region.I: 1.0, slowflow.Region.II: 2.0, slowflow.Region.III: 3.0}


def region_map(P_min: float, P_max: float, n_P: int,
               sigma_min: float, sigma_max: float, n_sigma: int,
               xi: float, mu1: float = 1.0, mu2: float = 2.0,
               empirical: bool = False, eps: float = 0.01,
               probe_angles: tuple[float, float] = (0.1, 2.0),
               horizon: float = 3000.0, workers: int = 1) -> SweepGrid:
    """Analytic region labels over a (P, sigma) grid, optionally double-checked
    by probing each point with a small and a large pendulum release.

    Empirical labels: both probes trivial -> I, both nontrivial -> II,
    split -> III (bistable).
    """
    p_axis = SweepAxis("P", P_min, P_max, n_P)
    s_axis = SweepAxis("sigma", sigma_min, sigma_max, n_sigma)
    points = [(float(P), float(sigma)) for P in p_axis.values()
              for sigma in s_axis.values()]
    columns = ["P", "sigma", "region"]
    rows = [[P, sigma, _REGION_CODE[slowflow.classify_region(P, sigma, xi)]]
            for P, sigma in points]
    if empirical:
        items = [(P, sigma, xi, mu1, mu2, eps, probe_angles, horizon)
                 for P, sigma in points]
        emp = _pool_map(_region_probe_point, items, workers)
        columns = columns + ["region_empirical"]
        rows = [row + [code] for row, code in zip(rows, emp)]
    return SweepGrid((p_axis, s_axis), columns, rows)


def _region_probe_point(item):
    P, sigma, xi, mu1, mu2, eps, probe_angles, horizon = item
    params = NondimParams(eps=eps, omega=2.0 + eps * sigma, amp=eps * P,
                          zeta=eps * xi, mu1=eps * mu1, mu2=eps * mu2)
    opts = IntegratorOptions.for_forcing(params.omega, horizon)
    outcomes = []
    for theta0 in probe_angles:
        traj = integrate_full(params, FullState(theta=theta0), opts)
        regime, _ = classify_regime(traj, params.omega)
        outcomes.append(regime == REGIME_TRIVIAL)
    small_trivial, large_trivial = outcomes
    if small_trivial and large_trivial:
        return 1.0
    if not small_trivial and not large_trivial:
        return 2.0
    return 3.0


def rotatory_sweep_11(amp: float, zeta: float, mu1: float, mu2: float,
                      eps: float, eta_min: float, eta_max: float,
                      count: int) -> SweepGrid:
    """Phase-locked families and drift across a range of eta = amp/(2*zeta*omega),
    sweeping the forcing frequency omega = amp / (2 * zeta * eta)."""
    axis = SweepAxis("eta", eta_min, eta_max, count)
    columns = ["eta", "omega", "theta_stable", "theta_unstable", "drift", "exists"]
    rows = []
    for eta in axis.values():
        omega = amp / (2.0 * zeta * float(eta))
        p = averaged.AveragedParams11(amp=amp, zeta=zeta, omega=omega,
                                      mu1=mu1, mu2=mu2, eps=eps)
        points = averaged.fixed_points(p)
        if not points:
            rows.append([float(eta), omega, math.nan, math.nan, math.nan, 0.0])
            continue
        stable = next((fp.theta for fp in points if fp.stability == "stable"), math.nan)
        unstable = next((fp.theta for fp in points if fp.stability == "unstable"), math.nan)
        rows.append([float(eta), omega, stable, unstable, points[0].drift, 1.0])
    return SweepGrid((axis,), columns, rows)


@dataclass(frozen=True)
class ErrorScalingResult:
    """Full-versus-reduced velocity error at several mass ratios.

    relative_error divides out the predicted velocity, which removes the
    eps^(3/2) amplitude scaling and leaves the reduced-model discrepancy
    itself; that is the quantity expected to shrink linearly with eps, so
    the slope is fitted on it.
    """

    rows: list  # (eps, full_mean, predicted, abs_error, relative_error)
    slope: float  # fitted log(relative_error) vs log(eps) slope


def error_scaling(P: float, xi: float, sigma: float, mu1: float, mu2: float,
                  eps_values, theta0: float = 0.001,
                  horizon: float | None = None, workers: int = 1) -> ErrorScalingResult:
    """Measure how the reduced-model velocity error shrinks with eps.

    Each eps keeps (P, xi, sigma, mu1, mu2) fixed by rescaling the
    dimensionless parameters; the horizon defaults to max(3000, 25/eps) so
    the slow transient settles at every eps.
    """
    upper = next((b for b in slowflow.amplitude_branches(
        slowflow.SlowFlowParams21(P=P, xi=xi, sigma=sigma, mu1=mu1, mu2=mu2, eps=1e-2))
        if b.branch == slowflow.BRANCH_UPPER and b.exists), None)
    if upper is None:
        raise DomainError("no progressive branch exists at these slow-flow parameters")
    drift = slowflow.solve_drift(upper.amplitude, mu1, mu2)
    items = [(float(e), P, xi, sigma, mu1, mu2, theta0, horizon, drift)
             for e in eps_values]
    rows = _pool_map(_error_scaling_point, items, workers)
    rel = np.array([r[4] for r in rows])
    eps_arr = np.array([r[0] for r in rows])
    if len(rows) >= 2 and np.all(rel > 0.0):
        slope = float(np.polyfit(np.log(eps_arr), np.log(rel), 1)[0])
    else:
        slope = math.nan
    return ErrorScalingResult(rows=rows, slope=slope)


def _error_scaling_point(item):
    eps, P, xi, sigma, mu1, mu2, theta0, horizon, drift = item
    if horizon is None:
        horizon = max(3000.0, 25.0 / eps)
    params = NondimParams(eps=eps, omega=2.0 + eps * sigma, amp=eps * P,
                          zeta=eps * xi, mu1=eps * mu1, mu2=eps * mu2)
    opts = IntegratorOptions.for_forcing(params.omega, horizon)
    traj = integrate_full(params, FullState(theta=theta0), opts)
    stats = mean_steady_velocity(traj)
    predicted = eps**1.5 * drift
    abs_err = abs(stats.mean - predicted)
    return [eps, stats.mean, predicted, abs_err, abs_err / abs(predicted)]


@dataclass(frozen=True)
class AsymmetryReport:
    """Steady capsule speed for counter-rotating pendulum launches.

    capture_failed flags runs where no sustained rotation was detected, in
    which case the corresponding mean is still reported as measured.
    """

    forward_mean: float  # launch theta_dot(0) = +omega
    backward_mean: float  # launch theta_dot(0) = -omega
    difference: float
    forward_captured: bool
    backward_captured: bool

    @property
    def capture_failed(self) -> bool:
        return not (self.forward_captured and self.backward_captured)


def clockwise_asymmetry_probe(params: NondimParams, horizon: float = 1500.0,
                              discard: float = 0.5) -> AsymmetryReport:
    """Compare steady capsule speeds for the two pendulum rotation senses.

    No averaged prediction is asserted for the reversed launch; both speeds
    are measured from the full model and reported.
    """
    opts = IntegratorOptions.for_forcing(params.omega, horizon)
    means = []
    captured = []
    for sign in (+1.0, -1.0):
        traj = integrate_full(params, FullState(theta_dot=sign * params.omega), opts)
        regime, stats = classify_regime(traj, params.omega, discard)
        means.append(stats["mean_velocity"])
        captured.append(regime == REGIME_ROTATORY)
    return AsymmetryReport(forward_mean=means[0], backward_mean=means[1],
                           difference=means[0] - means[1],
                           forward_captured=captured[0], backward_captured=captured[1])
