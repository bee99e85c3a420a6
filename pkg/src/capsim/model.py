"""Capsule-pendulum model: parameter types, state types and equations of motion.

The rig is a capsule (mass M) free to slide horizontally while its base is
shaken vertically; an internal pendulum (tip mass m, length l) hangs from a
hinge inside it.  Horizontal drag on the capsule is direction dependent
(forward coefficient differs from backward), which rectifies the pendulum's
oscillation into net capsule motion.

All dynamics are integrated in nondimensional variables: positions in units
of the pendulum length and time in units of the pendulum period scale
sqrt(l/g).  The nondimensional state is (x, v, theta, theta_dot) with
v = dx/dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional rig parameters (SI units)."""

    capsule_mass: float  # M, kg
    pendulum_mass: float  # m, kg
    pendulum_length: float  # l, m
    gravity: float  # g, m/s^2
    base_amplitude: float  # vertical shake amplitude, m
    base_frequency: float  # vertical shake frequency, rad/s
    damping_forward: float  # capsule drag while moving forward, N s/m
    damping_backward: float  # capsule drag while moving backward, N s/m
    hinge_damping: float  # pendulum hinge friction, N m s

    def __post_init__(self):
        for name, value in vars(self).items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
                raise DomainError(f"PhysicalParams.{name} must be strictly positive, got {value!r}")
        if not self.pendulum_mass < self.capsule_mass:
            raise DomainError("pendulum mass must be small compared to the capsule mass")


@dataclass(frozen=True)
class NondimParams:
    """Dimensionless model parameters.

    eps    mass ratio m / (M + m), the small parameter of the model
    omega  forcing frequency in units of sqrt(g/l)
    amp    forcing amplitude Omega^2 A0 / g
    zeta   hinge damping
    mu1    capsule damping while v > 0
    mu2    capsule damping while v <= 0
    """

    eps: float
    omega: float
    amp: float
    zeta: float
    mu1: float
    mu2: float

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise DomainError(f"mass ratio eps must lie in (0, 1), got {self.eps!r}")
        if not self.omega > 0.0:
            raise DomainError(f"omega must be positive, got {self.omega!r}")
        if not self.amp > 0.0:
            raise DomainError(f"amp must be positive, got {self.amp!r}")
        if self.zeta < 0.0:
            raise DomainError(f"zeta must be non-negative, got {self.zeta!r}")
        if not (self.mu1 > 0.0 and self.mu2 > 0.0):
            raise DomainError("mu1 and mu2 must be positive")

    @property
    def forcing_period(self) -> float:
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class FullState:
    """State of the full model: capsule position/velocity, pendulum angle/rate.

    theta is kept unwrapped (no mod 2*pi) so full rotations stay countable.
    """

    x: float = 0.0
    v: float = 0.0
    theta: float = 0.0
    theta_dot: float = 0.0

    def __post_init__(self):
        for name, value in vars(self).items():
            if not math.isfinite(value):
                raise DomainError(f"FullState.{name} must be finite, got {value!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.v, self.theta, self.theta_dot], dtype=float)

    def reflected(self) -> "FullState":
        return FullState(-self.x, -self.v, -self.theta, -self.theta_dot)


class Trajectory:
    """Uniformly sampled solution record.

    t is strictly increasing with constant stride; y holds one state per row.
    For the full model the columns are (x, v, theta, theta_dot) and `work`
    carries the running integral of mu(v) * v when the integrator provides it.
    """

    def __init__(self, t, y, params=None, initial=None, work=None):
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        if t.ndim != 1 or y.ndim != 2 or y.shape[0] != t.shape[0]:
            raise DomainError("trajectory arrays must be (n,) and (n, k) with matching n")
        if t.shape[0] < 2:
            raise DomainError("a trajectory needs at least two samples")
        strides = np.diff(t)
        if np.any(strides <= 0.0):
            raise DomainError("trajectory times must be strictly increasing")
        if not np.allclose(strides, strides[0], rtol=1e-9, atol=1e-12):
            raise DomainError("trajectory sampling stride must be constant")
        self.t = t
        self.y = y
        self.params = params
        self.initial = initial
        self.work = None if work is None else np.asarray(work, dtype=float)

    @property
    def stride(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def span(self) -> float:
        return float(self.t[-1] - self.t[0])

    def __len__(self) -> int:
        return self.t.shape[0]

    # Column views for the full-model layout.
    @property
    def x(self):
        return self.y[:, 0]

    @property
    def v(self):
        return self.y[:, 1]

    @property
    def theta(self):
        return self.y[:, 2]

    @property
    def theta_dot(self):
        return self.y[:, 3]


def nondimensionalize(p: PhysicalParams) -> NondimParams:
    """Map dimensional rig parameters onto the dimensionless set."""
    time_scale = math.sqrt(p.pendulum_length / p.gravity)  # 1 / sqrt(g/l)
    total = p.capsule_mass + p.pendulum_mass
    return NondimParams(
        eps=p.pendulum_mass / total,
        omega=p.base_frequency * time_scale,
        amp=p.base_frequency**2 * p.base_amplitude / p.gravity,
        zeta=p.hinge_damping / (p.pendulum_mass * p.pendulum_length**2) * time_scale,
        mu1=time_scale * p.damping_forward / total,
        mu2=time_scale * p.damping_backward / total,
    )


def redimensionalize(q: NondimParams, total_mass: float, pendulum_length: float,
                     gravity: float) -> PhysicalParams:
    """Inverse of :func:`nondimensionalize` given the three free anchors."""
    if total_mass <= 0.0 or pendulum_length <= 0.0 or gravity <= 0.0:
        raise DomainError("anchors must be strictly positive")
    rate_scale = math.sqrt(gravity / pendulum_length)  # sqrt(g/l)
    m = q.eps * total_mass
    base_frequency = q.omega * rate_scale
    return PhysicalParams(
        capsule_mass=total_mass - m,
        pendulum_mass=m,
        pendulum_length=pendulum_length,
        gravity=gravity,
        base_amplitude=q.amp * gravity / base_frequency**2,
        base_frequency=base_frequency,
        damping_forward=q.mu1 * total_mass * rate_scale,
        damping_backward=q.mu2 * total_mass * rate_scale,
        hinge_damping=q.zeta * m * pendulum_length**2 * rate_scale,
    )


def damping_coefficient(v: float, mu1: float, mu2: float) -> float:
    """Direction-dependent capsule damping: mu1 while v > 0, mu2 while v <= 0."""
    return mu1 if v > 0.0 else mu2


def rhs_full(state, t: float, p: NondimParams) -> np.ndarray:
    """Time derivative of (x, v, theta, theta_dot) for the full model.

    The accelerations solve the 2x2 linear system with mass matrix
    [[1, eps*cos(theta)], [cos(theta), 1]] and right-hand sides
    (eps*theta_dot^2*sin(theta) - mu(v)*v,
     -(1 - amp*cos(omega*t))*sin(theta) - zeta*theta_dot).
    """
    if isinstance(state, FullState):
        x, v, theta, theta_dot = state.x, state.v, state.theta, state.theta_dot
    else:
        x, v, theta, theta_dot = (float(s) for s in state)
    s = math.sin(theta)
    c = math.cos(theta)
    det = 1.0 - p.eps * c * c
    if det <= 0.0:
        raise DomainError(f"singular mass matrix (determinant {det}); requires eps < 1")
    mu = damping_coefficient(v, p.mu1, p.mu2)
    b1 = p.eps * theta_dot * theta_dot * s - mu * v
    b2 = -(1.0 - p.amp * math.cos(p.omega * t)) * s - p.zeta * theta_dot
    a_x = (b1 - p.eps * c * b2) / det
    a_theta = (b2 - c * b1) / det
    return np.array([v, a_x, theta_dot, a_theta])
