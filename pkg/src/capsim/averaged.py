"""Averaged model for the rotatory response near the 1:1 resonance.

For strong forcing the pendulum is captured into full rotation,
theta = omega * t + vartheta, and the cycle-averaged resonance phase
vartheta_a obeys a damped motion in the tilted potential

    U(vartheta_a) = zeta * omega * vartheta_a + (amp / 2) * cos(vartheta_a),

whose minima (present only when eta = amp / (2 * zeta * omega) exceeds one)
are the phase-locked states.  The capsule velocity splits into a zero-mean
oscillation, with amplitude B and phase carried by :class:`OscComponent`,
plus a drift D_a whose cycle-averaged evolution rectifies the asymmetric
damping into net motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .integrator import IntegratorOptions, integrate
from .model import NondimParams


@dataclass(frozen=True)
class AveragedParams11:
    """Order-one parameters of the averaged flow.

    amp and zeta stay order one in this regime; mu1 and mu2 are the rescaled
    capsule damping coefficients (dimensionless values divided by eps).
    zeta = 0 is admitted as the frictionless-hinge limit (eta is then
    infinite and phase locking is unconditional).
    """

    amp: float
    zeta: float
    omega: float
    mu1: float
    mu2: float
    eps: float

    def __post_init__(self):
        if not (self.amp > 0.0 and self.omega > 0.0):
            raise DomainError("amp and omega must be positive")
        if self.zeta < 0.0:
            raise DomainError("zeta must be non-negative")
        if not (self.mu1 > 0.0 and self.mu2 > 0.0):
            raise DomainError("mu1 and mu2 must be positive")
        if not self.eps > 0.0:
            raise DomainError("eps must be positive")

    @property
    def eta(self) -> float:
        """Phase-locking parameter amp / (2 * zeta * omega)."""
        if self.zeta == 0.0:
            return math.inf
        return self.amp / (2.0 * self.zeta * self.omega)


@dataclass(frozen=True)
class AveragedState11:
    """Averaged resonance phase, its rate, and the capsule velocity drift."""

    theta_a: float
    theta_a_dot: float
    drift: float = 0.0


@dataclass(frozen=True)
class OscComponent:
    """Zero-mean oscillatory part of the capsule velocity,
    u(t) = -eps * amplitude * cos(omega * t + phase)."""

    amplitude: float
    phase: float


@dataclass(frozen=True)
class FixedPoint11:
    """Phase-locked steady state of the averaged flow.

    family is the integer index n of the phase family theta_ss + 2*pi*k;
    odd families sit at potential minima (stable), even ones at maxima.
    """

    family: int
    theta: float
    drift: float
    osc_amplitude: float  # equals omega at every phase-locked state
    stability: str


def to_averaged_params(q: NondimParams) -> AveragedParams11:
    """Rescale dimensionless parameters into the averaged-flow set."""
    return AveragedParams11(amp=q.amp, zeta=q.zeta, omega=q.omega,
                            mu1=q.mu1 / q.eps, mu2=q.mu2 / q.eps, eps=q.eps)


def phase_rhs(theta_a: float, theta_a_dot: float, p: AveragedParams11) -> float:
    """Angular acceleration of the averaged resonance phase."""
    return -p.zeta * (p.omega + theta_a_dot) + 0.5 * p.amp * math.sin(theta_a)


def potential(theta_a: float, p: AveragedParams11) -> tuple[float, float]:
    """Tilted potential U and its gradient dU/dtheta_a.

    phase_rhs equals -dU/dtheta_a - zeta * theta_a_dot; minima of U exist
    exactly when eta >= 1.
    """
    u = p.zeta * p.omega * theta_a + 0.5 * p.amp * math.cos(theta_a)
    du = p.zeta * p.omega - 0.5 * p.amp * math.sin(theta_a)
    return u, du


def osc_amplitude(theta_a: float, theta_a_dot: float, p: AveragedParams11) -> float:
    """Amplitude B of the oscillatory capsule-velocity component; defined for
    every averaged state (only the phase degenerates when the net rotation
    rate omega + theta_a_dot vanishes)."""
    w = p.omega + theta_a_dot
    return math.hypot(w * w, p.zeta * w - 0.5 * p.amp * math.sin(theta_a)) / p.omega


def osc_component(theta_a: float, theta_a_dot: float, p: AveragedParams11) -> OscComponent:
    """Amplitude and phase of the oscillatory capsule-velocity component with
    the averaged phase frozen at (theta_a, theta_a_dot)."""
    w = p.omega + theta_a_dot
    if w * w == 0.0:
        raise DomainError("degenerate rotation: omega + theta_a_dot vanishes")
    damp_term = p.zeta * w - 0.5 * p.amp * math.sin(theta_a)
    amplitude = math.hypot(w * w, damp_term) / p.omega
    phase = theta_a + math.atan(damp_term / (w * w))
    return OscComponent(amplitude=amplitude, phase=phase)


def osc_velocity(t, comp: OscComponent, p: AveragedParams11):
    """Evaluate the oscillatory velocity component at fast time t."""
    return -p.eps * comp.amplitude * np.cos(p.omega * np.asarray(t, float) + comp.phase)


def drift_rhs(drift: float, osc_amplitude: float, p: AveragedParams11) -> float:
    """Cycle-averaged evolution of the capsule velocity drift.

    Inside the band |drift| < eps * B the damping sign-switches during the
    cycle and rectification pushes the drift forward; outside it the velocity
    keeps one sign and the drift decays on a single damping branch.
    """
    cap = p.eps * osc_amplitude
    if drift >= cap:
        return -p.eps * p.mu1 * drift
    if drift <= -cap:
        return -p.eps * p.mu2 * drift
    root = math.sqrt(cap * cap - drift * drift)
    return -(p.eps / math.pi) * ((p.mu1 - p.mu2) * (drift * math.asin(drift / cap) + root)
                                 + 0.5 * math.pi * (p.mu1 + p.mu2) * drift)


def _averaged_rhs(t, y, p: AveragedParams11):
    theta_a, theta_a_dot, drift = y
    return np.array([theta_a_dot,
                     phase_rhs(theta_a, theta_a_dot, p),
                     drift_rhs(drift, osc_amplitude(theta_a, theta_a_dot, p), p)])


@dataclass(frozen=True)
class AveragedSeries:
    """Solution record of the averaged flow in fast time."""

    t: np.ndarray
    theta_a: np.ndarray
    theta_a_dot: np.ndarray
    drift: np.ndarray
    params: AveragedParams11


def integrate_averaged(ic, p: AveragedParams11, t_end: float,
                       dt: float = 0.01) -> AveragedSeries:
    """Integrate the coupled averaged flow (theta_a, theta_a_dot, drift)."""
    if isinstance(ic, AveragedState11):
        y0 = [ic.theta_a, ic.theta_a_dot, ic.drift]
    else:
        y0 = list(ic)
    opts = IntegratorOptions(dt=dt, t_end=t_end, events=False)
    traj = integrate(lambda t, y: _averaged_rhs(t, y, p), y0, opts, params=p)
    return AveragedSeries(t=traj.t, theta_a=traj.y[:, 0], theta_a_dot=traj.y[:, 1],
                          drift=traj.y[:, 2], params=p)


def _solve_drift_rotatory(p: AveragedParams11, osc_amplitude: float) -> float:
    """Root of the stationary drift balance in (0, eps*B) (mirrored bracket
    when the forward damping dominates)."""
    cap = p.eps * osc_amplitude
    if p.mu1 == p.mu2:
        return 0.0

    def residual(d):
        return ((p.mu1 - p.mu2) * (d * math.asin(max(-1.0, min(1.0, d / cap)))
                                   + math.sqrt(max(cap * cap - d * d, 0.0)))
                + 0.5 * math.pi * (p.mu1 + p.mu2) * d)

    lo, hi = (0.0, cap) if p.mu2 > p.mu1 else (-cap, 0.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        r = residual(mid)
        if r == 0.0:
            return mid
        if r < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fixed_points(p: AveragedParams11, n_values=(0, 1)) -> list[FixedPoint11]:
    """Phase-locked steady states, empty when eta < 1.

    Families follow theta_ss = asin(2*zeta*omega/amp) + n*pi for even n and
    theta_ss = n*pi - asin(2*zeta*omega/amp) for odd n; each repeats mod
    2*pi.  The oscillation amplitude at any locked state equals omega, and
    the drift root is shared by all families.
    """
    s = 2.0 * p.zeta * p.omega / p.amp  # = 1 / eta
    if s > 1.0:
        return []
    base = math.asin(s)
    drift = _solve_drift_rotatory(p, p.omega)
    if s == 1.0:
        # Saddle-node point: the stable and unstable families coincide.
        return [FixedPoint11(family=0, theta=0.5 * math.pi, drift=drift,
                             osc_amplitude=p.omega, stability="marginal")]
    points = []
    for n in n_values:
        if n % 2 == 0:
            theta = base + n * math.pi
            stability = "unstable"
        else:
            theta = n * math.pi - base
            stability = "stable"
        points.append(FixedPoint11(family=n, theta=theta, drift=drift,
                                   osc_amplitude=p.omega, stability=stability))
    return points


def map_initial_conditions(theta0: float, theta_dot0: float,
                           p: AveragedParams11) -> tuple[float, float, float]:
    """Averaged-flow initial state matching pendulum initial conditions with
    the capsule starting from rest.

    The drift starts at eps * B(0) * cos(phase(0)) so that the total initial
    velocity drift + oscillation vanishes exactly.
    """
    theta_a0 = theta0
    theta_a_dot0 = theta_dot0 - p.omega
    comp = osc_component(theta_a0, theta_a_dot0, p)
    drift0 = p.eps * comp.amplitude * math.cos(comp.phase)
    return theta_a0, theta_a_dot0, drift0
