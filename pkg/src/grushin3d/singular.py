"""Optimal synthesis from points on the singular axis.

A geodesic leaving the axis with vertical momentum w0 != 0 stays in a
vertical plane, swings out to the turning radius rho* where
f(rho*)^2 = 2E / w0^2, and returns to the axis at the period

    T(w0, E) = 2 * int_0^{rho*} dr / sqrt(2E - w0^2 f(r)^2).

It stops being minimizing exactly at T, where it meets every rotated copy
of itself; distances from the axis therefore reduce to one-dimensional
shooting over w0 along two monotone branches.  The same machinery yields
metric-ball boundaries and two-sided distance bounds for arbitrary
endpoint pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .dynamics import DEFAULT_OPTS, IntegratorOptions, integrate_planar, Trajectory
from .errors import InputFault, NumericalFault
from .profile import Profile, f_inverse, h_inverse
from .quadrature import tanh_sinh

AXIS_TOL = 1e-12
_QUAD_TOL = 1e-12

# Empirical two-sided comparison constant between the distance and the
# closed-form quasi-norm, calibrated on builtin profiles over [-2, 2]^3
# (see calibrate_ball_box_constant); not asserted universal.
DEFAULT_BALL_BOX_CONSTANT = 10.0


# -- singular radial integrals -----------------------------------------------

def _turning_integrand(profile: Profile, w0: float, rho_star: float,
                       weight: Optional[Callable] = None):
    """Integrand of int weight(r) dr / sqrt(2E - w0^2 f(r)^2) after r = rho* - v^2.

    The radicand is evaluated as w0^2 (f(rho*) - f(r)) (f(rho*) + f(r)) with
    the difference quotient (f(rho*) - f(rho* - d))/d switched to a Taylor
    form for tiny d, so no catastrophic cancellation occurs near the turning
    point and the transformed integrand is smooth and bounded.
    """
    fb = profile.eval(rho_star)
    f1b = profile.deriv1(rho_star)
    f2b = profile.deriv2(rho_star)
    cut = 1e-5 * max(rho_star, 1e-300)

    def integrand(v):
        v = np.asarray(v, dtype=float)
        d = v * v
        r = np.maximum(rho_star - d, 0.0)
        fr = profile.eval(r)
        small = d < cut
        safe_d = np.where(small, 1.0, d)
        q = np.where(small, f1b - 0.5 * f2b * d, (fb - fr) / safe_d)
        base = 2.0 / (abs(w0) * np.sqrt(q * (fb + fr)))
        if weight is not None:
            base = base * weight(r)
        return base

    return integrand


def _radial_integral(profile: Profile, w0: float, rho_star: float,
                     lo: float = 0.0, weight: Optional[Callable] = None) -> float:
    """int_lo^{rho*} weight(r) dr / sqrt(2E - w0^2 f(r)^2), turning point at rho*."""
    if rho_star <= lo:
        return 0.0
    integrand = _turning_integrand(profile, w0, rho_star, weight)
    v_hi = math.sqrt(rho_star - lo)
    return tanh_sinh(integrand, 0.0, v_hi, tol=_QUAD_TOL)


@dataclass(frozen=True)
class TurningPointData:
    """Turning radius and first return time of an axis-started geodesic."""

    rho_star: float
    T: float
    w0: float
    E: float
    t_ode: Optional[float] = None   # cross-check value when requested


def period(profile: Profile, E: float, w0: float, *,
           crosscheck: bool = False,
           opts: IntegratorOptions = DEFAULT_OPTS) -> TurningPointData:
    """Turning point and first return time to the axis.

    Raises for E <= 0 (only the stationary trajectory exists) and w0 = 0
    (no return).  With ``crosscheck`` the return time is re-derived from the
    integrated flow's first axis crossing and attached as ``t_ode``.
    """
    if E <= 0.0:
        raise InputFault("period requires E > 0; E = 0 is the stationary trajectory")
    if w0 == 0.0:
        raise InputFault("period requires w0 != 0")
    rho_star = f_inverse(profile, math.sqrt(2.0 * E) / abs(w0))
    T = 2.0 * _radial_integral(profile, w0, rho_star)
    t_ode = None
    if crosscheck:
        traj = integrate_planar(profile, 0.0, math.sqrt(2.0 * E), 0.0,
                                w0, E, 1.25 * T, opts)
        zeros = traj.events["rho_zero"]
        if not zeros:
            raise NumericalFault("no axis return located by the flow",
                                 {"T_quadrature": T})
        t_ode = zeros[0]
        if abs(t_ode - T) > 1e-6 * (1.0 + T):
            raise NumericalFault("quadrature and flow disagree on the period",
                                 {"T_quadrature": T, "t_ode": t_ode})
    return TurningPointData(rho_star=rho_star, T=T, w0=w0, E=E, t_ode=t_ode)


def _z_rise(profile: Profile, w0: float, rho_star: float, lo: float = 0.0) -> float:
    """Vertical displacement accumulated while r runs over [lo, rho*]."""
    return abs(w0) * _radial_integral(profile, w0, rho_star, lo=lo,
                                      weight=lambda r: profile.eval(r) ** 2)


# -- synthesis results ---------------------------------------------------------

@dataclass(frozen=True)
class SynthesisResult:
    t_cut: float
    cut_point: Optional[tuple]
    length: float
    meta: dict


@dataclass(frozen=True)
class DistanceResult:
    """Either an exact distance (lower == value == upper) or certified bounds."""

    value: Optional[float]
    lower: float
    upper: float
    witness: str
    tol: float

    def to_dict(self):
        return {"value": self.value, "lower": self.lower, "upper": self.upper,
                "witness": self.witness, "tol": self.tol}


def _exact(value: float, witness: str, tol: float) -> DistanceResult:
    return DistanceResult(value=value, lower=value, upper=value,
                          witness=witness, tol=tol)


# -- geodesics and cut points from the axis ------------------------------------

def geodesic_from_sigma(profile: Profile, z0: float, theta0: float, E: float,
                        w0: float, t_max: float,
                        opts: IntegratorOptions = DEFAULT_OPTS) -> Trajectory:
    """Geodesic from (0, 0, z0) launched at plane angle theta0.

    Returned as a 3D Cartesian trajectory; for w0 = 0 this is the straight
    ray of speed sqrt(2E).
    """
    if E <= 0.0:
        raise InputFault("geodesic_from_sigma requires E > 0")
    from .dynamics import integrate_cartesian, Covector
    s = math.sqrt(2.0 * E)
    lam = Covector(s * math.cos(theta0), s * math.sin(theta0), w0)
    return integrate_cartesian(profile, (0.0, 0.0, z0), lam, t_max, opts)


def cut_from_sigma(profile: Profile, E: float, w0: float, z0: float = 0.0,
                   opts: IntegratorOptions = DEFAULT_OPTS) -> SynthesisResult:
    """Cut time and cut point of an axis-started geodesic.

    For w0 = 0 the straight rays never stop minimizing (t_cut infinite);
    otherwise the cut happens at the first axis return, back on the axis.
    """
    if E <= 0.0:
        raise InputFault("cut_from_sigma requires E > 0")
    if w0 == 0.0:
        return SynthesisResult(t_cut=math.inf, cut_point=None, length=math.inf,
                               meta={"kind": "straight ray"})
    tp = period(profile, E, w0, opts=opts)
    dz = math.copysign(2.0 * _z_rise(profile, w0, tp.rho_star), w0)
    return SynthesisResult(t_cut=tp.T, cut_point=(0.0, 0.0, z0 + dz),
                           length=math.sqrt(2.0 * E) * tp.T,
                           meta={"kind": "axis return", "w0": w0, "E": E,
                                 "rho_star": tp.rho_star})


# -- exact distances from the axis ----------------------------------------------

def _bisect_on_w0(fn: Callable[[float], float], target: float, w_lo: float,
                  w_hi: float, increasing: bool, what: str) -> float:
    """Solve fn(w0) = target on [w_lo, w_hi] for monotone fn."""
    for _ in range(200):
        mid = 0.5 * (w_lo + w_hi)
        if mid <= w_lo or mid >= w_hi:
            break
        high = fn(mid) > target
        if high == increasing:
            w_hi = mid
        else:
            w_lo = mid
        if w_hi - w_lo <= 1e-13 * w_hi:
            break
    return 0.5 * (w_lo + w_hi)


def distance_from_sigma(profile: Profile, q0: Sequence[float],
                        target: Sequence[float],
                        opts: IntegratorOptions = DEFAULT_OPTS) -> DistanceResult:
    """Exact distance from an axis point to an arbitrary target.

    All shooting runs at unit speed (2E = 1).  Targets in the base plane are
    reached by the straight ray; axis targets by the unique symmetric return;
    everything else by bisection over w0 on the two monotone branches of
    the vertical coordinate, split at the turning-point junction.
    """
    x0, y0, z0 = float(q0[0]), float(q0[1]), float(q0[2])
    if math.hypot(x0, y0) > AXIS_TOL:
        raise InputFault("distance_from_sigma requires a base point on the axis")
    rho_bar = math.hypot(float(target[0]), float(target[1]))
    dz = float(target[2]) - z0
    if rho_bar <= AXIS_TOL and abs(dz) <= AXIS_TOL:
        raise InputFault("target coincides with the base point")

    E = 0.5
    if abs(dz) == 0.0:
        return _exact(rho_bar, "straight ray in the base plane", 1e-14 * (1.0 + rho_bar))

    adz = abs(dz)

    def z_total(w):
        rs = f_inverse(profile, 1.0 / w)
        return 2.0 * _z_rise(profile, w, rs)

    tol_rel = 1e-12

    if rho_bar < 1e-8:
        # axis target: z_total is strictly decreasing in w0
        w = 1.0
        n = 0
        while z_total(w) < adz:
            w *= 0.5
            n += 1
            if n > 60:
                raise NumericalFault("axis-return bracket expansion failed",
                                     {"dz": dz, "w": w})
        w_lo = w
        w_hi = w if n else 1.0
        n = 0
        while z_total(w_hi) > adz:
            w_hi *= 2.0
            n += 1
            if n > 60:
                raise NumericalFault("axis-return bracket expansion failed",
                                     {"dz": dz, "w": w_hi})
        w = _bisect_on_w0(z_total, adz, w_lo, w_hi, increasing=False,
                          what="axis return")
        value = period(profile, E, w).T
        return _exact(value, f"axis return, w0={math.copysign(w, dz):.6g}",
                      tol_rel * (1.0 + value))

    # off-axis target: shoot over w0 with the plane fixed by the target
    w_star = 1.0 / profile.eval(rho_bar)   # turning point exactly at rho_bar

    def branch_values(w):
        rs = f_inverse(profile, 1.0 / w)
        t_half = _radial_integral(profile, w, rs)
        t_tail = _radial_integral(profile, w, rs, lo=rho_bar)
        z_half = _z_rise(profile, w, rs)
        z_tail = _z_rise(profile, w, rs, lo=rho_bar)
        # rising passage: time/height to reach rho_bar on the way out
        return (t_half, t_tail, z_half, z_tail)

    t_half, _tt, z_half, _zt = branch_values(w_star)
    z_junction = z_half  # both branches meet at the turning point

    if adz <= z_junction:
        def z1(w):
            _th, _tt, zh, zt = branch_values(w)
            return zh - zt
        w_lo, n = w_star, 0
        while z1(w_lo) > adz:
            w_lo *= 0.5
            n += 1
            if n > 60:
                raise NumericalFault("rising-branch bracket expansion failed",
                                     {"dz": dz})
        w = _bisect_on_w0(z1, adz, w_lo, w_star, increasing=True,
                          what="rising branch")
        th, tt, _zh, _zt = branch_values(w)
        value = th - tt
        witness = f"rising branch, w0={math.copysign(w, dz):.6g}"
    else:
        def z2(w):
            _th, _tt, zh, zt = branch_values(w)
            return zh + zt
        w_lo, n = w_star, 0
        while z2(w_lo) < adz:
            w_lo *= 0.5
            n += 1
            if n > 60:
                raise NumericalFault(
                    "falling-branch bracket expansion failed; the vertical "
                    "branch must diverge as w0 -> 0",
                    {"dz": dz, "w_lo": w_lo, "z2": z2(w_lo)})
        w = _bisect_on_w0(z2, adz, w_lo, w_star, increasing=False,
                          what="falling branch")
        th, tt, _zh, _zt = branch_values(w)
        value = th + tt
        witness = f"falling branch, w0={math.copysign(w, dz):.6g}"
    return _exact(value, witness, tol_rel * (1.0 + value))


# -- ball boundary and ball-box bounds -------------------------------------------

def ball_boundary_from_sigma(profile: Profile, q0: Sequence[float], radius: float,
                             n_samples: int = 100,
                             opts: IntegratorOptions = DEFAULT_OPTS):
    """Sample the boundary of the metric ball around an axis point.

    Rows are (w0, t, rho, z) with t = min(radius, T(w0)), swept over a
    symmetric log grid of w0 plus the straight ray w0 = 0; suitable for a
    surface-of-revolution rendering.
    """
    if radius <= 0.0:
        raise InputFault("radius must be positive")
    x0, y0, z0 = float(q0[0]), float(q0[1]), float(q0[2])
    if math.hypot(x0, y0) > AXIS_TOL:
        raise InputFault("ball boundary is computed for axis centers")
    E = 0.5

    def period_of(w):
        return period(profile, E, w).T

    # w_c: the momentum whose full return takes exactly the radius
    w_hi, n = 1.0, 0
    while period_of(w_hi) > radius:
        w_hi *= 2.0
        n += 1
        if n > 60:
            raise NumericalFault("period bracket expansion failed", {})
    w_lo = w_hi / 2.0 if n else 1.0
    n = 0
    while period_of(w_lo) < radius:
        w_lo *= 0.5
        n += 1
        if n > 60:
            raise NumericalFault("period bracket expansion failed", {})
    w_c = _bisect_on_w0(period_of, radius, w_lo, w_hi, increasing=False,
                        what="ball boundary")

    n_half = max(2, (max(n_samples, 3) - 1) // 2)
    mags = np.geomspace(1e-3 * w_c, w_c, n_half)
    rows = []
    for sgn in (-1.0, 1.0):
        for m in mags:
            w = sgn * m
            t_end = min(radius, period_of(abs(w)))
            traj = integrate_planar(profile, 0.0, 1.0, z0, w, E, t_end, opts)
            rho, _rd, z = traj(t_end)
            rows.append((w, t_end, abs(float(rho)), float(z)))
    rows.append((0.0, radius, radius, z0))
    rows.sort(key=lambda r: r[0])
    return rows


def ball_box_bounds(profile: Profile, q: Sequence[float], qp: Sequence[float],
                    comparison_constant: Optional[float] = None,
                    opts: IntegratorOptions = DEFAULT_OPTS) -> DistanceResult:
    """Two-sided distance bounds from the closed-form quasi-norm.

    The lower bound divides the quasi-norm by the comparison constant; the
    upper bound is the length of the better of two genuinely admissible
    competitor curves, one moving horizontally then vertically, the other
    routed through the axis at intermediate radius h(|dz|).
    """
    C = comparison_constant if comparison_constant is not None else DEFAULT_BALL_BOX_CONSTANT
    if C < 1.0:
        raise InputFault("comparison constant must be >= 1")
    x, y, z = (float(q[0]), float(q[1]), float(q[2]))
    xp, yp, zp = (float(qp[0]), float(qp[1]), float(qp[2]))
    A = math.hypot(x - xp, y - yp)
    dz = abs(z - zp)
    r = math.hypot(x, y)
    rp = math.hypot(xp, yp)

    hterm = h_inverse(profile, dz)
    fr = profile.eval(r)
    vterm = dz / fr if fr > 0.0 else math.inf
    formula = A + min(hterm, vterm)

    if dz == 0.0 and A == 0.0:
        return DistanceResult(value=None, lower=0.0, upper=0.0,
                              witness="coincident points", tol=0.0)

    fmax = max(fr, profile.eval(rp))
    comp1 = A + (dz / fmax if fmax > 0.0 else (math.inf if dz > 0.0 else 0.0))

    if dz > 0.0:
        d_axis = distance_from_sigma(profile, (0.0, 0.0, z), (0.0, 0.0, zp),
                                     opts).value
    else:
        d_axis = 0.0
    rho = hterm
    comp2 = abs(r - rho) + 2.0 * rho + d_axis + abs(rp - rho)

    upper = min(comp1, comp2)
    witness = ("horizontal+vertical competitor" if comp1 <= comp2
               else "through-axis competitor")
    return DistanceResult(value=None, lower=formula / C, upper=upper,
                          witness=f"{witness}; quasi-norm {formula:.6g}, C={C:g}",
                          tol=1e-10 * (1.0 + upper))


def calibrate_ball_box_constant(profile: Profile, box: float = 2.0,
                                n_pairs: int = 100, seed: int = 7,
                                opts: IntegratorOptions = DEFAULT_OPTS) -> float:
    """Empirical two-sided comparison constant on pairs with one axis endpoint.

    Returns max over sampled pairs of max(d / quasi-norm, quasi-norm / d),
    the smallest C making d lie in [quasi-norm / C, C * quasi-norm] on the
    sample.
    """
    rng = np.random.default_rng(seed)
    C = 1.0
    for _ in range(n_pairs):
        z0 = rng.uniform(-box, box)
        while True:
            xt, yt = rng.uniform(-box, box, size=2)
            if math.hypot(xt, yt) > 1e-3:
                break
        zt = rng.uniform(-box, box)
        q0 = (0.0, 0.0, z0)
        qt = (xt, yt, zt)
        exact = distance_from_sigma(profile, q0, qt, opts).value
        A = math.hypot(xt, yt)
        dz = abs(zt - z0)
        formula = A + min(h_inverse(profile, dz), math.inf)
        if formula <= 0.0 or exact <= 0.0:
            continue
        C = max(C, exact / formula, formula / exact)
    return C
