"""Reduced model for the oscillatory response near the 2:1 parametric resonance.

The pendulum amplitude is tracked by a complex slow amplitude phi and the
capsule drift by a scalar D, both evolving in slow time t1 = eps * t:

    dphi/dt1 = (i/2)(1 - sigma) phi + (i/4) P conj(phi)
               - (i/16) |phi|^2 phi - (xi/2) phi
    dD/dt1   = -d0(|phi|, D)

where d0 is the cycle mean of mu(s) * s over one oscillation of the capsule
velocity s = D - |phi| cos(psi) under the sign-switching damping law.  The
module provides the rectification coefficients, closed-form amplitude
branches, drift roots, stability, bifurcation boundaries, the region map of
the (P, sigma) plane, and reconstruction of fast-time envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .integrator import IntegratorOptions, integrate
from .model import NondimParams

BRANCH_TRIVIAL = "trivial"
BRANCH_UPPER = "upper"  # larger-amplitude nontrivial branch
BRANCH_LOWER = "lower"  # smaller-amplitude nontrivial branch


@dataclass(frozen=True)
class SlowFlowParams21:
    """Order-one parameters of the slow flow.

    P      rescaled forcing amplitude amp / eps
    xi     rescaled hinge damping zeta / eps
    sigma  frequency detuning (omega - 2) / eps
    mu1    rescaled forward capsule damping
    mu2    rescaled backward capsule damping
    eps    retained mass ratio, used only to reconstruct fast-time envelopes
    """

    P: float
    xi: float
    sigma: float
    mu1: float
    mu2: float
    eps: float

    def __post_init__(self):
        if not (self.P > 0.0 and self.xi > 0.0 and self.mu1 > 0.0 and self.mu2 > 0.0):
            raise DomainError("P, xi, mu1 and mu2 must be positive")
        if not self.eps > 0.0:
            raise DomainError("eps must be positive")


@dataclass(frozen=True)
class SlowFlowState21:
    """Slow-flow state: complex pendulum amplitude and capsule drift."""

    phi: complex
    drift: float
    t1: float = 0.0


@dataclass(frozen=True)
class FourierCoeffs:
    """Harmonics of mu(s) * s over one cycle of s = drift - amplitude * cos(psi).

    d1 vanishes identically by symmetry of the cycle.  Two values are carried
    for the first cosine harmonic: `d2_printed` evaluates the closed form as
    printed in the source material, `d2_quadrature` the defining integral;
    they are known to disagree and both are reported rather than silently
    reconciling them.  Only d0 feeds the slow flow.
    """

    d0: float
    d1: float
    d2_printed: float
    d2_quadrature: float

    @property
    def d2_discrepancy(self) -> float:
        if math.isnan(self.d2_printed):
            return math.nan
        return abs(self.d2_printed - self.d2_quadrature)


@dataclass(frozen=True)
class BranchAmplitude:
    branch: str
    amplitude: float  # nan when the branch does not exist
    exists: bool


@dataclass(frozen=True)
class StabilityResult:
    label: str  # "stable" | "unstable" | "marginal"
    eigenvalues_phi: tuple[complex, complex]
    eigenvalue_drift: float
    marginal: bool


@dataclass(frozen=True)
class FixedPoint21:
    """Steady state of the slow flow with its linearization.

    Fixed points come in +/- phi pairs; one representative per branch is
    reported, with phase in [0, pi).
    """

    branch: str
    phi: complex
    amplitude: float
    drift: float
    stability: str
    eigenvalues_phi: tuple[complex, complex]
    eigenvalue_drift: float


class Region(str, Enum):
    """Qualitative regimes in the (P, sigma) plane.

    I   only the trivial state is stable
    II  a unique progressive state attracts everything
    III trivial and progressive states are both stable (bistable)
    """

    I = "I"
    II = "II"
    III = "III"


def to_slowflow_params(q: NondimParams) -> SlowFlowParams21:
    """Rescale dimensionless parameters into the order-one slow-flow set."""
    return SlowFlowParams21(P=q.amp / q.eps, xi=q.zeta / q.eps,
                            sigma=(q.omega - 2.0) / q.eps,
                            mu1=q.mu1 / q.eps, mu2=q.mu2 / q.eps, eps=q.eps)


def fourier_d0(amplitude: float, drift: float, mu1: float, mu2: float) -> float:
    """Cycle mean of mu(s) * s for s = drift - amplitude * cos(psi).

    Outside the band |drift| <= amplitude the velocity never changes sign and
    the mean reduces to the single-branch values mu1 * drift or mu2 * drift.
    """
    a = abs(amplitude)
    if drift >= a:
        return mu1 * drift
    if drift <= -a:
        return mu2 * drift
    root = math.sqrt(a * a - drift * drift)
    return ((mu1 - mu2) * root
            + drift * ((mu2 - mu1) * math.acos(drift / a) + math.pi * mu1)) / math.pi


def fourier_d1(amplitude: float, drift: float, mu1: float, mu2: float) -> float:
    """First sine harmonic of mu(s) * s; identically zero (the cycle is even
    about its turning points)."""
    return 0.0


def _cycle_harmonic_quadrature(amplitude, drift, mu1, mu2, harmonic):
    """Fourier coefficient of mu(s)*s by composite Simpson on the exact
    switch-split segments; harmonic 0 is the mean, 1/2 the cos/sin terms."""
    a = abs(amplitude)
    two_pi = 2.0 * math.pi
    if a > 0.0 and abs(drift) < a:
        psi_sw = math.acos(drift / a)
        breaks = [0.0, psi_sw, two_pi - psi_sw, two_pi]
    else:
        breaks = [0.0, two_pi]
    total = 0.0
    for left, right in zip(breaks[:-1], breaks[1:]):
        if right - left <= 0.0:
            continue
        psi = np.linspace(left, right, 4097)
        s = drift - a * np.cos(psi)
        f = np.where(s > 0.0, mu1, mu2) * s
        if harmonic == 1:
            f = f * np.cos(psi)
        elif harmonic == 2:
            f = f * np.sin(psi)
        h = psi[1] - psi[0]
        total += (h / 3.0) * (f[0] + f[-1] + 4.0 * f[1::2].sum() + 2.0 * f[2:-1:2].sum())
    return total / two_pi if harmonic == 0 else total / math.pi


def fourier_d2_printed(amplitude: float, drift: float, mu1: float, mu2: float) -> float:
    """First cosine harmonic, closed form exactly as printed in the source
    material.  Known to disagree with the defining integral; see
    :class:`FourierCoeffs`."""
    a = abs(amplitude)
    if a <= 0.0:
        raise DomainError("amplitude must be positive for the first harmonic")
    if abs(drift) > a:
        raise DomainError("printed first-harmonic form requires |drift| <= amplitude")
    root = math.sqrt(a * a - drift * drift)
    return (drift * (mu2 - mu1) * root
            + a * a * ((2.0 * mu1 - mu2) * math.acos(drift / a))
            - 2.0 * math.pi * a * a * mu1) / (a * math.pi)


def fourier_d2_quadrature(amplitude: float, drift: float, mu1: float, mu2: float) -> float:
    """First cosine harmonic of mu(s) * s by direct quadrature."""
    if abs(amplitude) <= 0.0:
        raise DomainError("amplitude must be positive for the first harmonic")
    return _cycle_harmonic_quadrature(amplitude, drift, mu1, mu2, 1)


def fourier_coefficients(amplitude: float, drift: float, mu1: float, mu2: float) -> FourierCoeffs:
    """All rectification harmonics, reporting both first-harmonic values."""
    a = abs(amplitude)
    if a > 0.0 and abs(drift) <= a:
        printed = fourier_d2_printed(amplitude, drift, mu1, mu2)
    else:
        printed = math.nan
    quad = fourier_d2_quadrature(amplitude, drift, mu1, mu2) if a > 0.0 else math.nan
    return FourierCoeffs(d0=fourier_d0(amplitude, drift, mu1, mu2),
                         d1=0.0, d2_printed=printed, d2_quadrature=quad)


def slowflow_rhs(phi: complex, drift: float, p: SlowFlowParams21) -> tuple[complex, float]:
    """Slow-time derivatives (dphi/dt1, dD/dt1)."""
    dphi = (0.5j * (1.0 - p.sigma) * phi + 0.25j * p.P * phi.conjugate()
            - 0.0625j * abs(phi) ** 2 * phi - 0.5 * p.xi * phi)
    return dphi, -fourier_d0(abs(phi), drift, p.mu1, p.mu2)


def amplitude_branches(p: SlowFlowParams21) -> list[BranchAmplitude]:
    """Steady amplitude branches |phi| of the slow flow.

    The trivial branch always exists.  For P > 2*xi the nontrivial branches
    |phi|^2 = 8(1 - sigma) +/- 4*sqrt(P^2 - 4*xi^2) exist wherever the square
    is non-negative, i.e. below sigma_B1 (upper) and sigma_B2 (lower).
    """
    branches = [BranchAmplitude(BRANCH_TRIVIAL, 0.0, True)]
    disc = p.P * p.P - 4.0 * p.xi * p.xi
    for branch, sign in ((BRANCH_UPPER, 1.0), (BRANCH_LOWER, -1.0)):
        if disc > 0.0:
            square = 8.0 * (1.0 - p.sigma) + sign * 4.0 * math.sqrt(disc)
            if square >= 0.0:
                branches.append(BranchAmplitude(branch, math.sqrt(square), True))
                continue
        branches.append(BranchAmplitude(branch, math.nan, False))
    return branches


def equilibrium_phase(branch: str, p: SlowFlowParams21) -> float:
    """Phase of phi at the fixed point, the representative in [0, pi).

    At equilibrium sin(2*delta) = 2*xi/P with cos(2*delta) positive on the
    upper branch and negative on the lower one.
    """
    if branch == BRANCH_TRIVIAL:
        return 0.0
    if p.P < 2.0 * p.xi:
        raise DomainError("nontrivial equilibria require P > 2*xi")
    half = 0.5 * math.asin(2.0 * p.xi / p.P)
    if branch == BRANCH_UPPER:
        return half
    if branch == BRANCH_LOWER:
        return 0.5 * math.pi - half
    raise DomainError(f"unknown branch {branch!r}")


def solve_drift(amplitude: float, mu1: float, mu2: float) -> float:
    """Unique drift root D of the rectification balance d0(|phi|, D) = 0.

    For mu2 > mu1 the root lies in (0, amplitude): the residual is negative
    at D = 0 and positive at D = amplitude, so bisection is safe.  For
    mu1 > mu2 the mirrored bracket (-amplitude, 0) applies.  Equal damping
    gives exactly zero drift.
    """
    if amplitude < 0.0:
        raise DomainError("amplitude must be non-negative")
    if mu1 == mu2 or amplitude == 0.0:
        return 0.0
    a = amplitude

    def residual(d):
        return ((mu1 - mu2) * math.sqrt(max(a * a - d * d, 0.0))
                + d * ((mu2 - mu1) * math.acos(max(-1.0, min(1.0, d / a))) + math.pi * mu1))

    lo, hi = (0.0, a) if mu2 > mu1 else (-a, 0.0)
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


def bifurcation_sigmas(P: float, xi: float) -> tuple[float, float] | None:
    """Detuning values of the two pitchforks, or None when P <= 2*xi."""
    if P <= 2.0 * xi:
        return None
    half_root = 0.5 * math.sqrt(P * P - 4.0 * xi * xi)
    return 1.0 + half_root, 1.0 - half_root


def classify_region(P: float, sigma: float, xi: float) -> Region:
    """Region of the (P, sigma) plane; boundaries belong to the lower region
    index (sigma = sigma_B1 is already in II, sigma = sigma_B2 in III)."""
    sigmas = bifurcation_sigmas(P, xi)
    if sigmas is None:
        return Region.I
    sigma_b1, sigma_b2 = sigmas
    if sigma > sigma_b1:
        return Region.I
    if sigma > sigma_b2:
        return Region.II
    return Region.III


def classify_stability(phi: complex, drift: float, p: SlowFlowParams21,
                       fd_step: float = 1e-6) -> StabilityResult:
    """Linear stability of a slow-flow fixed point.

    The Jacobian of the phi equation in real coordinates (Re phi, Im phi) is
    formed by central finite differences; the drift direction decouples and
    contributes the single eigenvalue -d(d0)/dD.  Eigenvalue real parts
    within 1e-8 of zero are flagged marginal instead of being forced into a
    stable/unstable call.
    """
    dphi, dd = slowflow_rhs(phi, drift, p)
    if max(abs(dphi), abs(dd)) > 1e-8:
        raise DomainError("not a fixed point: slow-flow residual exceeds 1e-8")
    u, v = phi.real, phi.imag
    h = fd_step

    def f(a, b):
        return slowflow_rhs(complex(a, b), drift, p)[0]

    fu = (f(u + h, v) - f(u - h, v)) / (2.0 * h)
    fv = (f(u, v + h) - f(u, v - h)) / (2.0 * h)
    jac = np.array([[fu.real, fv.real], [fu.imag, fv.imag]])
    eig = np.linalg.eigvals(jac)
    amp = abs(phi)
    drift_eig = -(fourier_d0(amp, drift + h, p.mu1, p.mu2)
                  - fourier_d0(amp, drift - h, p.mu1, p.mu2)) / (2.0 * h)
    reals = [eig[0].real, eig[1].real, drift_eig]
    marginal = any(abs(r) <= 1e-8 for r in reals)
    if marginal:
        label = "marginal"
    elif all(r < 0.0 for r in reals):
        label = "stable"
    else:
        label = "unstable"
    return StabilityResult(label=label,
                           eigenvalues_phi=(complex(eig[0]), complex(eig[1])),
                           eigenvalue_drift=float(drift_eig), marginal=marginal)


def fixed_points(p: SlowFlowParams21) -> list[FixedPoint21]:
    """All steady states (one representative per +/- phi pair) with their
    drift roots and stability classification."""
    points = []
    for ba in amplitude_branches(p):
        if not ba.exists:
            continue
        phase = equilibrium_phase(ba.branch, p)
        phi = ba.amplitude * complex(math.cos(phase), math.sin(phase))
        drift = solve_drift(ba.amplitude, p.mu1, p.mu2)
        st = classify_stability(phi, drift, p)
        points.append(FixedPoint21(branch=ba.branch, phi=phi, amplitude=ba.amplitude,
                                   drift=drift, stability=st.label,
                                   eigenvalues_phi=st.eigenvalues_phi,
                                   eigenvalue_drift=st.eigenvalue_drift))
    return points


@dataclass(frozen=True)
class SlowFlowSeries:
    """Slow-time solution record of the slow flow."""

    t1: np.ndarray
    phi: np.ndarray  # complex
    drift: np.ndarray
    params: SlowFlowParams21


def integrate_slowflow(phi0: complex, drift0: float, p: SlowFlowParams21,
                       t1_end: float, dt: float = 0.01) -> SlowFlowSeries:
    """Integrate the slow flow from (phi0, drift0) over slow time t1."""

    def rhs(t, y):
        dphi, dd = slowflow_rhs(complex(y[0], y[1]), y[2], p)
        return np.array([dphi.real, dphi.imag, dd])

    opts = IntegratorOptions(dt=dt, t_end=t1_end, events=False)
    traj = integrate(rhs, [phi0.real, phi0.imag, drift0], opts, params=p)
    return SlowFlowSeries(t1=traj.t, phi=traj.y[:, 0] + 1j * traj.y[:, 1],
                          drift=traj.y[:, 2], params=p)


@dataclass(frozen=True)
class Envelopes:
    """Fast-time envelopes reconstructed from a slow-flow solution.

    angle_amplitude bounds the pendulum angle, velocity_upper/lower bound the
    capsule velocity and velocity_mean is its predicted running average.
    """

    t: np.ndarray
    angle_amplitude: np.ndarray
    velocity_upper: np.ndarray
    velocity_lower: np.ndarray
    velocity_mean: np.ndarray


def reconstruct_envelopes(series: SlowFlowSeries, eps: float | None = None) -> Envelopes:
    """Map a slow-flow record onto fast-time envelopes.

    The slow state is evaluated at slow time t1 = eps * t, so a record over
    t1 in [0, T1] describes fast times t in [0, T1 / eps]:
        angle amplitude  sqrt(eps) * |phi|
        velocity bounds  eps^(3/2) * (D +/- |phi|)
        mean velocity    eps^(3/2) * D
    """
    if eps is None:
        eps = series.params.eps
    if not eps > 0.0:
        raise DomainError("eps must be positive")
    amp = np.abs(series.phi)
    scale = eps**1.5
    return Envelopes(t=series.t1 / eps,
                     angle_amplitude=math.sqrt(eps) * amp,
                     velocity_upper=scale * (series.drift + amp),
                     velocity_lower=scale * (series.drift - amp),
                     velocity_mean=scale * series.drift)
