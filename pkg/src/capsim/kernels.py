"""Fixed-step integration kernel for the full capsule-pendulum model.

One source function implements classical RK4 with bisection-located splits at
capsule-velocity sign changes, so the damping branch stays constant inside
each sub-step.  It is compiled with numba when enabled and runs interpreted
as the pure-python fallback otherwise (see `_numba`).

State layout inside the kernel: x, v, theta, theta_dot, plus a fifth slot
accumulating the damping-work integral of mu(v) * v along the trajectory.
"""

import math

from ._numba import NUMBA_AVAILABLE, njit, numba_enabled


def _integrate_capsule_impl(x0, v0, th0, thd0, t0, dt, n_steps, sample_stride,
                            eps, amp, omega, zeta, mu1, mu2,
                            tol_event, events_on, out):
    """Fill `out` rows (t, x, v, theta, theta_dot, work) every sample_stride steps.

    Returns (rows_written, status, t_last); status 1 means the state went
    non-finite and t_last is the last time it was still finite.
    """

    def accel(t, v, th, thd):
        mu = mu1 if v > 0.0 else mu2
        s = math.sin(th)
        c = math.cos(th)
        b1 = eps * thd * thd * s - mu * v
        b2 = -(1.0 - amp * math.cos(omega * t)) * s - zeta * thd
        det = 1.0 - eps * c * c
        return (b1 - eps * c * b2) / det, (b2 - c * b1) / det

    def step(t, h, x, v, th, thd, w):
        a1x, a1t = accel(t, v, th, thd)
        g1 = (mu1 if v > 0.0 else mu2) * v

        v2 = v + 0.5 * h * a1x
        th2 = th + 0.5 * h * thd
        thd2 = thd + 0.5 * h * a1t
        a2x, a2t = accel(t + 0.5 * h, v2, th2, thd2)
        g2 = (mu1 if v2 > 0.0 else mu2) * v2

        v3 = v + 0.5 * h * a2x
        th3 = th + 0.5 * h * thd2
        thd3 = thd + 0.5 * h * a2t
        a3x, a3t = accel(t + 0.5 * h, v3, th3, thd3)
        g3 = (mu1 if v3 > 0.0 else mu2) * v3

        v4 = v + h * a3x
        th4 = th + h * thd3
        thd4 = thd + h * a3t
        a4x, a4t = accel(t + h, v4, th4, thd4)
        g4 = (mu1 if v4 > 0.0 else mu2) * v4

        c6 = h / 6.0
        return (x + c6 * (v + 2.0 * v2 + 2.0 * v3 + v4),
                v + c6 * (a1x + 2.0 * a2x + 2.0 * a3x + a4x),
                th + c6 * (thd + 2.0 * thd2 + 2.0 * thd3 + thd4),
                thd + c6 * (a1t + 2.0 * a2t + 2.0 * a3t + a4t),
                w + c6 * (g1 + 2.0 * g2 + 2.0 * g3 + g4))

    x = x0
    v = v0
    th = th0
    thd = thd0
    w = 0.0
    out[0, 0] = t0
    out[0, 1] = x
    out[0, 2] = v
    out[0, 3] = th
    out[0, 4] = thd
    out[0, 5] = 0.0
    rows = 1
    status = 0
    t_last = t0
    for k in range(n_steps):
        t_step = t0 + k * dt
        elapsed = 0.0
        remaining = dt
        splits = 0
        while True:
            xn, vn, thn, thdn, wn = step(t_step + elapsed, remaining, x, v, th, thd, w)
            crossing = (events_on and splits < 64 and remaining > tol_event
                        and (vn > 0.0) != (v > 0.0))
            if not crossing:
                x, v, th, thd, w = xn, vn, thn, thdn, wn
                break
            # Bisect the sub-step length for the v sign change, then step just
            # past it so the next sub-step starts on the new damping branch.
            lo = 0.0
            hi = remaining
            for _ in range(128):
                if hi - lo <= tol_event:
                    break
                mid = 0.5 * (lo + hi)
                _, vm, _, _, _ = step(t_step + elapsed, mid, x, v, th, thd, w)
                if (vm > 0.0) == (v > 0.0):
                    lo = mid
                else:
                    hi = mid
            x, v, th, thd, w = step(t_step + elapsed, hi, x, v, th, thd, w)
            elapsed += hi
            remaining -= hi
            splits += 1
            if remaining <= 0.0:
                break
        if not (math.isfinite(x) and math.isfinite(v)
                and math.isfinite(th) and math.isfinite(thd)):
            status = 1
            t_last = t_step
            break
        t_last = t0 + (k + 1) * dt
        if (k + 1) % sample_stride == 0:
            out[rows, 0] = t_last
            out[rows, 1] = x
            out[rows, 2] = v
            out[rows, 3] = th
            out[rows, 4] = thd
            out[rows, 5] = w
            rows += 1
    return rows, status, t_last


_integrate_capsule_jit = (njit(cache=True)(_integrate_capsule_impl)
                          if NUMBA_AVAILABLE else None)


def integrate_capsule_kernel(*args, use_numba=None):
    """Dispatch between the compiled kernel and the interpreted fallback.

    use_numba: True forces the compiled path, False the fallback, None follows
    the CAPSIM_DISABLE_NUMBA environment flag.
    """
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba:
        if _integrate_capsule_jit is None:
            raise RuntimeError("numba kernel requested but numba is not importable")
        return _integrate_capsule_jit(*args)
    return _integrate_capsule_impl(*args)
