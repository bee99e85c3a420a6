"""Time integration and trajectory statistics.

`integrate` is a generic fixed-step RK4 driver for smooth systems, with
optional bisection-located step splitting when a designated state component
(the capsule velocity) changes sign.  `integrate_full` runs the full
capsule-pendulum model through the dedicated kernel, compiled with numba
when enabled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError
from .kernels import integrate_capsule_kernel
from .model import FullState, NondimParams, Trajectory


@dataclass(frozen=True)
class IntegratorOptions:
    """Fixed-step integration settings.

    sample_stride records every k-th grid point; use `for_forcing` to derive
    dt and the stride from a forcing frequency (steps and samples per forcing
    period).
    """

    dt: float
    t_end: float
    tol_event: float = 1e-10
    sample_stride: int = 1
    events: bool = True

    def __post_init__(self):
        if not self.dt > 0.0:
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if not self.t_end > 0.0:
            raise DomainError(f"t_end must be positive, got {self.t_end!r}")
        if not self.tol_event > 0.0:
            raise DomainError(f"tol_event must be positive, got {self.tol_event!r}")
        if self.sample_stride < 1:
            raise DomainError("sample_stride must be at least 1")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))

    @staticmethod
    def for_forcing(omega: float, t_end: float, steps_per_period: int = 200,
                    samples_per_period: int = 200, tol_event: float = 1e-10,
                    events: bool = True) -> "IntegratorOptions":
        if omega <= 0.0:
            raise DomainError("omega must be positive")
        dt = (2.0 * math.pi / omega) / steps_per_period
        stride = max(1, steps_per_period // samples_per_period)
        return IntegratorOptions(dt=dt, t_end=t_end, tol_event=tol_event,
                                 sample_stride=stride, events=events)


@dataclass(frozen=True)
class SeriesStats:
    """Tail statistics of a sampled series."""

    mean: float
    amplitude: float  # half of the tail's peak-to-trough excursion
    discard: float

    def __post_init__(self):
        if not 0.0 <= self.discard < 1.0:
            raise DomainError("discard fraction must lie in [0, 1)")


def integrate(rhs, ic, opts: IntegratorOptions, t0: float = 0.0,
              event_component: int | None = None, params=None) -> Trajectory:
    """Fixed-step RK4 for an arbitrary rhs(t, y) -> dy/dt.

    When event_component is given (and opts.events is set), any sign change of
    that state component within a step is located by bisection to
    opts.tol_event and the step is split there, keeping the sign-dependent
    branch of the rhs constant within each sub-step.
    """
    y = np.asarray(ic, dtype=float).astype(float).copy()
    if y.ndim != 1:
        raise DomainError("initial condition must be a flat vector")

    def rk4(t, h, y):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    n_steps = opts.n_steps
    watch = event_component if (opts.events and event_component is not None) else None
    n_samples = n_steps // opts.sample_stride + 1
    t_out = np.empty(n_samples)
    y_out = np.empty((n_samples, y.size))
    t_out[0] = t0
    y_out[0] = y
    rows = 1
    for k in range(n_steps):
        t_step = t0 + k * opts.dt
        elapsed = 0.0
        remaining = opts.dt
        splits = 0
        while True:
            y_new = rk4(t_step + elapsed, remaining, y)
            crossing = (watch is not None and splits < 64 and remaining > opts.tol_event
                        and (y_new[watch] > 0.0) != (y[watch] > 0.0))
            if not crossing:
                y = y_new
                break
            side = y[watch] > 0.0
            lo, hi = 0.0, remaining
            for _ in range(128):
                if hi - lo <= opts.tol_event:
                    break
                mid = 0.5 * (lo + hi)
                if (rk4(t_step + elapsed, mid, y)[watch] > 0.0) == side:
                    lo = mid
                else:
                    hi = mid
            y = rk4(t_step + elapsed, hi, y)
            elapsed += hi
            remaining -= hi
            splits += 1
            if remaining <= 0.0:
                break
        if not np.all(np.isfinite(y)):
            raise DivergenceError(
                f"state became non-finite after t = {t_step}", t_last=t_step)
        if (k + 1) % opts.sample_stride == 0:
            t_out[rows] = t0 + (k + 1) * opts.dt
            y_out[rows] = y
            rows += 1
    return Trajectory(t_out[:rows], y_out[:rows], params=params, initial=np.asarray(ic, float))


def integrate_full(params: NondimParams, ic, opts: IntegratorOptions,
                   t0: float = 0.0, use_numba: bool | None = None) -> Trajectory:
    """Integrate the full capsule-pendulum model via the dedicated kernel."""
    if isinstance(ic, FullState):
        y0 = ic.as_array()
    else:
        y0 = np.asarray(ic, dtype=float)
    if y0.shape != (4,):
        raise DomainError("full-model initial condition must have 4 components")
    n_steps = opts.n_steps
    n_samples = n_steps // opts.sample_stride + 1
    out = np.empty((n_samples, 6))
    rows, status, t_last = integrate_capsule_kernel(
        float(y0[0]), float(y0[1]), float(y0[2]), float(y0[3]), float(t0),
        float(opts.dt), n_steps, opts.sample_stride,
        params.eps, params.amp, params.omega, params.zeta, params.mu1, params.mu2,
        float(opts.tol_event), bool(opts.events), out,
        use_numba=use_numba)
    if status != 0:
        raise DivergenceError(
            f"full model diverged; last finite state at t = {t_last}", t_last=t_last)
    return Trajectory(out[:rows, 0], out[:rows, 1:5], params=params,
                      initial=y0, work=out[:rows, 5])


def running_average(traj: Trajectory, window: float | None = None,
                    component: int = 1) -> np.ndarray:
    """Centered moving average of one state component.

    The window defaults to one forcing period 2*pi/omega of the trajectory's
    parameters.  Trapezoid weighting makes the average of a periodic signal
    over exactly its own period vanish to rounding error; windows shrink
    symmetrically near the ends of the record.
    """
    if window is None:
        if traj.params is None or not hasattr(traj.params, "omega"):
            raise DomainError("no window given and trajectory carries no forcing frequency")
        window = 2.0 * math.pi / traj.params.omega
    if not window > 0.0:
        raise DomainError("window must be positive")
    if window > traj.span:
        raise DomainError(f"window {window} exceeds trajectory span {traj.span}")
    series = traj.y[:, component]
    half = max(1, int(round(window / (2.0 * traj.stride))))
    n = series.size
    idx = np.arange(n)
    lo = np.maximum(0, idx - half)
    hi = np.minimum(n - 1, idx + half)
    csum = np.concatenate(([0.0], np.cumsum(series)))
    inner = csum[hi] - csum[lo + 1]  # sum of series[lo+1 : hi]
    total = 0.5 * series[lo] + 0.5 * series[hi] + inner
    return total / (hi - lo)


def mean_steady_velocity(traj: Trajectory, discard: float = 0.5,
                         component: int = 1) -> SeriesStats:
    """Tail mean and oscillation amplitude after discarding the transient."""
    if not 0.0 <= discard < 1.0:
        raise DomainError("discard fraction must lie in [0, 1)")
    start = int(math.floor(discard * len(traj)))
    tail = traj.y[start:, component]
    if tail.size == 0:
        raise DomainError("discard fraction leaves an empty tail")
    return SeriesStats(mean=float(np.mean(tail)),
                       amplitude=float(0.5 * (np.max(tail) - np.min(tail))),
                       discard=discard)
