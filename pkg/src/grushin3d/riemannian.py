"""Geodesics from Riemannian (off-axis) points for general profiles.

Off the axis the flow separates into an orbiting regime (K != 0), where the
centrifugal barrier keeps the radius positive and a reflected covector
produces a symmetric partner geodesic, and a planar regime (K = 0) that can
reach the axis.  The candidate cut time for the orbiting regime is the first
time the accumulated angular sweep reaches pi; it is certified only for the
linear weight, so searches here label their output accordingly.

Conjugacy is monitored through reduced 2x2 determinants of the endpoint map
in charts on the unit-energy shell, evaluated by finite differences of
re-integrated trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import (DEFAULT_OPTS, Covector, IntegratorOptions, Trajectory,
                       _solve, angular_momentum, energy, integrate_planar,
                       locate_events, radial_momentum)
from .errors import InputFault, NumericalFault
from .profile import Profile
from .quadrature import tanh_sinh
from .singular import period

_UNIT_ENERGY_TOL = 1e-9


def _require_unit_energy(profile: Profile, q0, lam: Covector):
    two_e = 2.0 * energy(profile, q0, lam)
    if abs(two_e - 1.0) > _UNIT_ENERGY_TOL:
        raise InputFault(f"covector must lie on the unit-energy shell, 2E={two_e}")


# -- cylindrical integration ----------------------------------------------------

@dataclass(frozen=True)
class CylindricalGeodesic:
    """Orbiting geodesic in (r, theta, z) with its conserved quantities."""

    trajectory: Trajectory
    K: float
    L: float
    w0: float
    E: float
    r0: float
    theta0: float
    z0: float

    def __call__(self, t):
        return self.trajectory(t)

    def position(self, t):
        r, _rd, th, z, _sw = self.trajectory(t)
        return np.array([r * math.cos(th), r * math.sin(th), z])


def integrate_cylindrical(profile: Profile, q0: Sequence[float], lam: Covector,
                          t_max: float,
                          opts: IntegratorOptions = DEFAULT_OPTS) -> CylindricalGeodesic:
    """Integrate r'' = -w0^2 f f'(r) + K^2/r^3 with the angle and sweep carried along.

    The angle is kept as a continuous real (no wrapping); ``sweep`` is the
    accumulated |K|/r^2 integral used for the candidate cut time.
    """
    x0, y0, z0 = float(q0[0]), float(q0[1]), float(q0[2])
    r0 = math.hypot(x0, y0)
    if r0 <= 0.0:
        raise InputFault("cylindrical integration requires an off-axis base point")
    K = angular_momentum(q0, lam)
    L = radial_momentum(q0, lam)
    w0 = lam.w0
    theta0 = math.atan2(y0, x0)
    E = energy(profile, q0, lam)

    def rhs(t, s):
        r, rd, _th, _z, _sw = s
        inv_r2 = 1.0 / (r * r)
        return (rd,
                -w0 * w0 * profile.eval(r) * profile.deriv1(r) + K * K * inv_r2 / r,
                K * inv_r2,
                w0 * profile.eval(r) ** 2,
                abs(K) * inv_r2)

    sol = _solve(rhs, (r0, L / r0, theta0, z0, 0.0), t_max, opts,
                 "integrate_cylindrical")
    ts = np.linspace(0.0, sol.t[-1], max(64, 4 * len(sol.t)))
    R, RD, _TH, _Z, _SW = sol.sol(ts)
    H = 0.5 * (RD ** 2 + (K / R) ** 2 + profile.eval(R) ** 2 * w0 ** 2)
    drift = {"H": float(np.max(np.abs(H - E)))}
    if opts.check_drift and drift["H"] > opts.drift_tol * (1.0 + 2.0 * E):
        raise NumericalFault("energy drift above tolerance in cylindrical flow",
                             {"drift": drift["H"]})
    traj = Trajectory("cylindrical", sol.t, sol.y.T, sol.sol, drift,
                      meta={"profile": profile, "w0": w0, "E": E, "K": K, "L": L})
    return CylindricalGeodesic(trajectory=traj, K=K, L=L, w0=w0, E=E,
                               r0=r0, theta0=theta0, z0=z0)


# -- symmetry and candidate cut times --------------------------------------------

def symmetrize_covector(q0: Sequence[float], lam: Covector) -> Covector:
    """Reflect the planar momentum across the radial direction at q0.

    Flips K, preserves L and the energy; applying it twice returns the
    original covector.
    """
    x0, y0 = float(q0[0]), float(q0[1])
    r2 = x0 * x0 + y0 * y0
    if r2 <= 0.0:
        raise InputFault("symmetrize_covector requires an off-axis base point")
    a = (x0 * x0 - y0 * y0) / r2
    b = 2.0 * x0 * y0 / r2
    return Covector(a * lam.u0 + b * lam.v0, b * lam.u0 - a * lam.v0, lam.w0)


def conjectured_cut_time(profile: Profile, q0: Sequence[float], lam: Covector,
                         t_max: float,
                         opts: IntegratorOptions = DEFAULT_OPTS) -> float:
    """First time the angular sweep integral reaches pi, or +inf by t_max.

    This is where the geodesic meets its reflected partner; it upper-bounds
    the cut time but is certified equal to it only for the linear weight.
    """
    K = angular_momentum(q0, lam)
    if K == 0.0:
        raise InputFault("candidate cut time needs K != 0; use sigma_hitting_time")
    _require_unit_energy(profile, q0, lam)
    geo = integrate_cylindrical(profile, q0, lam, t_max, opts)
    sol = geo.trajectory
    hits = locate_events(sol, lambda t: float(sol(t)[4]) - math.pi,
                         opts.dense_factor)
    return hits[0] if hits else math.inf


def sigma_hitting_time(profile: Profile, q0: Sequence[float], lam: Covector,
                       opts: IntegratorOptions = DEFAULT_OPTS) -> float:
    """First time a K = 0 geodesic reaches the axis, +inf if it never does.

    The geodesic is minimizing up to this time.  With w0 = 0 the planar
    motion is a straight line (hits only if aimed inward); with w0 != 0 the
    radial oscillation crosses the axis within one period.
    """
    x0, y0, z0 = float(q0[0]), float(q0[1]), float(q0[2])
    r0 = math.hypot(x0, y0)
    if r0 <= 0.0:
        raise InputFault("base point already on the axis")
    K = angular_momentum(q0, lam)
    scale = max(1.0, r0) * max(1.0, abs(lam.u0) + abs(lam.v0))
    if abs(K) > 1e-12 * scale:
        raise InputFault(f"sigma_hitting_time requires K = 0, got K={K}")
    L = radial_momentum(q0, lam)
    rhodot0 = L / r0
    E = energy(profile, q0, lam)
    if lam.w0 == 0.0:
        if rhodot0 >= 0.0:
            return math.inf
        return r0 / abs(rhodot0)
    horizon = 1.3 * period(profile, E, lam.w0, opts=opts).T + 1e-6
    traj = integrate_planar(profile, r0, rhodot0, z0, lam.w0, E, horizon, opts)
    zeros = traj.events["rho_zero"]
    if not zeros:
        raise NumericalFault("oscillating trajectory failed to reach the axis",
                             {"horizon": horizon})
    return zeros[0]


# -- reduced Jacobian determinants -----------------------------------------------

_CHARTS = ("KW", "LW", "KL")


def _shell_covector(q0, K: float, L: float, w0: float) -> Covector:
    x0, y0 = float(q0[0]), float(q0[1])
    r2 = x0 * x0 + y0 * y0
    return Covector((x0 * L - y0 * K) / r2, (y0 * L + x0 * K) / r2, w0)


def _chart_point(profile: Profile, q0, lam: Covector, chart: str):
    """Current chart coordinates and the reconstruction closure."""
    K0 = angular_momentum(q0, lam)
    L0 = radial_momentum(q0, lam)
    w00 = lam.w0
    r0 = math.hypot(q0[0], q0[1])
    fr0 = profile.eval(r0)

    if chart == "KW":
        if w00 == 0.0 or L0 == 0.0:
            raise InputFault("chart KW needs w0 != 0 and L != 0")

        def rebuild(c1, c2):
            s2 = r0 * r0 * (1.0 - fr0 * fr0 * c2 * c2) - c1 * c1
            if s2 <= 0.0:
                raise NumericalFault("left the energy shell in chart KW", {})
            return _shell_covector(q0, c1, math.copysign(math.sqrt(s2), L0), c2)

        return (K0, w00), rebuild
    if chart == "LW":
        if w00 == 0.0 or K0 == 0.0:
            raise InputFault("chart LW needs w0 != 0 and K != 0")

        def rebuild(c1, c2):
            s2 = r0 * r0 * (1.0 - fr0 * fr0 * c2 * c2) - c1 * c1
            if s2 <= 0.0:
                raise NumericalFault("left the energy shell in chart LW", {})
            return _shell_covector(q0, math.copysign(math.sqrt(s2), K0), c1, c2)

        return (L0, w00), rebuild
    if chart == "KL":
        if w00 == 0.0:
            raise InputFault("chart KL needs w0 != 0")

        def rebuild(c1, c2):
            s2 = (1.0 - (c1 * c1 + c2 * c2) / (r0 * r0)) / (fr0 * fr0)
            if s2 <= 0.0:
                raise NumericalFault("left the energy shell in chart KL", {})
            return _shell_covector(q0, c1, c2, math.copysign(math.sqrt(s2), w00))

        return (K0, L0), rebuild
    raise InputFault(f"unknown chart {chart!r}; expected one of {_CHARTS}")


def _fd_partials(profile, q0, rebuild, coords, t_hi, opts):
    """Dense (r, theta) partial-derivative curves for both chart coordinates.

    Central differences with steps 1e-5 (1 + |coord|); a half-step pass adds
    a Richardson correction when the two estimates disagree.
    """
    sols = {}

    def traj_for(c1, c2):
        key = (c1, c2)
        if key not in sols:
            lam = rebuild(c1, c2)
            geo = integrate_cylindrical(profile, q0, lam, t_hi, opts)
            sols[key] = geo.trajectory
        return sols[key]

    def partial(i, ts, h):
        c = list(coords)
        c[i] = coords[i] + h
        plus = traj_for(*c)
        c[i] = coords[i] - h
        minus = traj_for(*c)
        dp = np.stack([plus(t) for t in np.atleast_1d(ts)])
        dm = np.stack([minus(t) for t in np.atleast_1d(ts)])
        return (dp[:, [0, 2]] - dm[:, [0, 2]]) / (2.0 * h)   # columns r, theta

    def partial_refined(i, ts):
        h = 1e-5 * (1.0 + abs(coords[i]))
        full = partial(i, ts, h)
        half = partial(i, ts, 0.5 * h)
        scale = np.maximum(np.abs(half), 1e-300)
        if np.any(np.abs(full - half) / scale > 1e-3):
            return (4.0 * half - full) / 3.0
        return half

    return partial_refined


def jacobian_reduced(profile: Profile, chart: str, q0: Sequence[float],
                     lam: Covector, t: float,
                     opts: IntegratorOptions = DEFAULT_OPTS) -> float:
    """Reduced endpoint-map determinant (1/w0)(r_a theta_b - r_b theta_a).

    ``chart`` selects the shell coordinates (a, b): KW -> (K, w0),
    LW -> (L, w0), KL -> (K, L).  Equals the full 3x3 determinant of
    (r, theta, z) with respect to (t, a, b) on the unit-energy shell.
    """
    if t < 0.0:
        raise InputFault("t must be nonnegative")
    _require_unit_energy(profile, q0, lam)
    coords, rebuild = _chart_point(profile, q0, lam, chart)
    if t == 0.0:
        return 0.0
    partial = _fd_partials(profile, q0, rebuild, coords, t, opts)
    p1 = partial(0, t)[0]
    p2 = partial(1, t)[0]
    w0 = lam.w0
    return float((p1[0] * p2[1] - p2[0] * p1[1]) / w0)


def full_jacobian_fd(profile: Profile, chart: str, q0: Sequence[float],
                     lam: Covector, t: float,
                     opts: IntegratorOptions = DEFAULT_OPTS) -> float:
    """Full 3x3 determinant of (r, theta, z) w.r.t. (t, chart coords) by FD."""
    _require_unit_energy(profile, q0, lam)
    coords, rebuild = _chart_point(profile, q0, lam, chart)
    geo = integrate_cylindrical(profile, q0, lam, max(t, 1e-9), opts)
    r, rd, _th, _z, _sw = geo.trajectory(t)
    K = geo.K
    w0 = lam.w0
    tcol = np.array([rd, K / r ** 2, w0 * profile.eval(r) ** 2])

    def col(i):
        h = 1e-5 * (1.0 + abs(coords[i]))

        def endpoint(c1, c2):
            g = integrate_cylindrical(profile, q0, rebuild(c1, c2), t, opts)
            rr, _rdd, th, z, _ = g.trajectory(t)
            return np.array([rr, th, z])

        c = list(coords)
        c[i] = coords[i] + h
        plus = endpoint(*c)
        c[i] = coords[i] - h
        minus = endpoint(*c)
        return (plus - minus) / (2.0 * h)

    M = np.column_stack([tcol, col(0), col(1)])
    return float(np.linalg.det(M))


def straight_line_determinant_fd(profile: Profile, q0: Sequence[float],
                                 lam: Covector, t: float,
                                 opts: IntegratorOptions = DEFAULT_OPTS) -> float:
    """FD determinant of the Euclidean endpoint map in the (u0, w0) chart at w0 = 0."""
    if lam.w0 != 0.0:
        raise InputFault("straight-line chart requires w0 = 0")
    if lam.v0 == 0.0:
        raise InputFault("chart (u0, w0) requires v0 != 0")
    _require_unit_energy(profile, q0, lam)
    from .dynamics import integrate_cartesian
    x0, y0 = float(q0[0]), float(q0[1])
    r0 = math.hypot(x0, y0)
    fr0 = profile.eval(r0)
    sv = math.copysign(1.0, lam.v0)

    def rebuild(u0, w0):
        s2 = 1.0 - fr0 * fr0 * w0 * w0 - u0 * u0
        if s2 <= 0.0:
            raise NumericalFault("left the energy shell", {})
        return Covector(u0, sv * math.sqrt(s2), w0)

    def endpoint(u0, w0):
        tr = integrate_cartesian(profile, q0, rebuild(u0, w0), t, opts)
        return np.asarray(tr(t)[:3])

    tcol = np.array([lam.u0, lam.v0, 0.0])
    cols = [tcol]
    for i, base in enumerate((lam.u0, 0.0)):
        h = 1e-5 * (1.0 + abs(base))
        args_p = (base + h, 0.0) if i == 0 else (lam.u0, base + h)
        args_m = (base - h, 0.0) if i == 0 else (lam.u0, base - h)
        cols.append((endpoint(*args_p) - endpoint(*args_m)) / (2.0 * h))
    return float(np.linalg.det(np.column_stack(cols)))


def straight_line_determinant_exact(profile: Profile, q0: Sequence[float],
                                    lam: Covector, t: float) -> float:
    """Closed form -(t / v0) * int_0^t f(r(s))^2 ds along the straight line."""
    if lam.v0 == 0.0:
        raise InputFault("closed form requires v0 != 0")
    x0, y0 = float(q0[0]), float(q0[1])

    def f2(s):
        r = np.hypot(x0 + lam.u0 * s, y0 + lam.v0 * s)
        return profile.eval(r) ** 2

    integral = tanh_sinh(f2, 0.0, t, tol=1e-13)
    return -(t / lam.v0) * integral


def experimental_conjugate_search(profile: Profile, q0: Sequence[float],
                                  lam: Covector, t_max: float,
                                  n_scan: int = 400, chart: Optional[str] = None,
                                  opts: IntegratorOptions = DEFAULT_OPTS):
    """Bracketed sign changes of the reduced determinant on (0, t_max].

    Output entries are dicts {"t_lo", "t_hi", "certified": False}; the
    determinant zeros are conjugate-time candidates only, nothing here is a
    certified cut or conjugate time for general weights.
    """
    if lam.w0 == 0.0:
        raise InputFault("conjugate search requires w0 != 0 (straight lines have none)")
    _require_unit_energy(profile, q0, lam)
    if chart is None:
        L0 = radial_momentum(q0, lam)
        K0 = angular_momentum(q0, lam)
        chart = "KW" if L0 != 0.0 else ("LW" if K0 != 0.0 else "KL")
    coords, rebuild = _chart_point(profile, q0, lam, chart)
    partial = _fd_partials(profile, q0, rebuild, coords, t_max, opts)
    ts = np.linspace(t_max / n_scan, t_max, n_scan)
    p1 = partial(0, ts)
    p2 = partial(1, ts)
    det = (p1[:, 0] * p2[:, 1] - p2[:, 0] * p1[:, 1]) / lam.w0
    out = []
    for i in range(len(ts) - 1):
        if det[i] == 0.0:
            continue
        if det[i] * det[i + 1] < 0.0:
            out.append({"t_lo": float(ts[i]), "t_hi": float(ts[i + 1]),
                        "certified": False})
    return out
