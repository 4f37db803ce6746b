"""Hamiltonian geodesic flow in Cartesian, planar and variational form.

The flow of H = (u^2 + v^2 + f(r)^2 w^2)/2 conserves H, the vertical
momentum w, and the angular momentum K = x v - y u.  Trajectories with
K = 0 stay in a vertical plane and are integrated there in signed-radius
coordinates (rho, z), which keeps the vector field differentiable through
the singular axis.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InputFault, NumericalFault
from .profile import Profile

R_FLOOR = 1e-10          # an orbiting trajectory may never get this close to the axis
K_PLANAR_TOL = 1e-12     # |K| below this (scaled) routes through the planar form


@dataclass(frozen=True)
class Covector:
    """Initial momentum (u0, v0, w0) attached to a base point elsewhere."""

    u0: float
    v0: float
    w0: float

    def as_array(self):
        return np.array([self.u0, self.v0, self.w0], dtype=float)


def angular_momentum(q0: Sequence[float], lam: Covector) -> float:
    """K = x0 v0 - y0 u0, a constant of motion."""
    return q0[0] * lam.v0 - q0[1] * lam.u0


def radial_momentum(q0: Sequence[float], lam: Covector) -> float:
    """L = x0 u0 + y0 v0; the initial radial velocity is L / r0."""
    return q0[0] * lam.u0 + q0[1] * lam.v0


def energy(profile: Profile, q0: Sequence[float], lam: Covector) -> float:
    """H at the base point; 2E = 1 is the unit-speed normalization."""
    r0 = math.hypot(q0[0], q0[1])
    return 0.5 * (lam.u0 ** 2 + lam.v0 ** 2 + profile.eval(r0) ** 2 * lam.w0 ** 2)


@dataclass(frozen=True)
class IntegratorOptions:
    # tolerances sized so conserved-quantity drift stays below 1e-9 over
    # several radial periods
    rtol: float = 1e-11
    atol: float = 1e-13
    drift_tol: float = 1e-8
    dense_factor: int = 4          # sub-samples per solver step for event scans
    force_cartesian: bool = False  # disable the K=0 planar hand-off (testing)
    check_drift: bool = True


DEFAULT_OPTS = IntegratorOptions()

_FIELDS = {
    "cartesian": ("x", "y", "z", "u", "v"),
    "planar": ("rho", "rhodot", "z"),
    "variational": ("rho", "rhodot", "z", "rho_w", "rhodot_w"),
    "cylindrical": ("r", "rdot", "theta", "z", "sweep"),
}


class Trajectory:
    """Densely evaluable solution of one of the geodesic systems.

    ``samples``/``t`` hold the accepted solver steps; calling the object
    evaluates the dense interpolant.  ``drift`` reports the worst violation
    of each monitored conserved quantity.
    """

    def __init__(self, kind, t, y, dense, drift, events=None, meta=None):
        self.kind = kind
        self.fields = _FIELDS[kind]
        self.t = np.asarray(t, dtype=float)
        self.y = np.asarray(y, dtype=float)      # shape (n_samples, n_fields)
        self._dense = dense
        self.drift = dict(drift)
        self.events = {k: list(v) for k, v in (events or {}).items()}
        self.meta = dict(meta or {})

    def __call__(self, t):
        tt = np.asarray(t, dtype=float)
        out = self._dense(tt)
        return out if tt.ndim else out

    @property
    def t_final(self) -> float:
        return float(self.t[-1])

    def column(self, name: str, t=None):
        i = self.fields.index(name)
        if t is None:
            return self.y[:, i]
        vals = self.__call__(t)
        return vals[i] if np.asarray(t).ndim == 0 else vals[i, :]

    # -- conversion and export ---------------------------------------------

    def sample_grid(self, n: int):
        ts = np.linspace(self.t[0], self.t[-1], n)
        return ts, np.stack([self.__call__(t) for t in ts])

    def export_rows(self, n: Optional[int] = None):
        """Rows for the documented CSV/JSON schemas."""
        if n is None:
            ts, ys = self.t, self.y
        else:
            ts, ys = self.sample_grid(n)
        prof: Profile = self.meta["profile"]
        w0 = self.meta["w0"]
        rows = []
        if self.kind == "cartesian":
            header = ("t", "x", "y", "z", "u", "v", "w0", "H", "K")
            for t, (x, y, z, u, v) in zip(ts, ys):
                r = math.hypot(x, y)
                H = 0.5 * (u * u + v * v + prof.eval(r) ** 2 * w0 * w0)
                K = x * v - y * u
                rows.append((t, x, y, z, u, v, w0, H, K))
        elif self.kind in ("planar", "variational"):
            header = ("t", "rho", "rhodot", "z")
            for t, vals in zip(ts, ys):
                rows.append((t, vals[0], vals[1], vals[2]))
        else:
            header = ("t", "r", "theta", "z", "rdot")
            for t, (r, rd, th, z, _sw) in zip(ts, ys):
                rows.append((t, r, th, z, rd))
        return header, rows

    def to_csv(self, n: Optional[int] = None) -> str:
        header, rows = self.export_rows(n)
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(f"{v:.17g}" for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self, n: Optional[int] = None) -> str:
        header, rows = self.export_rows(n)
        obj = {"fields": list(header), "rows": [list(map(float, r)) for r in rows]}
        return json.dumps(obj) + "\n"


# -- event location ----------------------------------------------------------

def _refine_zero(g: Callable[[float], float], t_lo: float, t_hi: float) -> float:
    """Bisection on a bracketing interval, to ~1e-12 relative in time."""
    g_lo = g(t_lo)
    for _ in range(200):
        mid = 0.5 * (t_lo + t_hi)
        if mid <= t_lo or mid >= t_hi:
            break
        if (g(mid) < 0.0) == (g_lo < 0.0):
            t_lo, g_lo = mid, g(mid)
        else:
            t_hi = mid
        if t_hi - t_lo <= 1e-13 * max(1.0, t_hi):
            break
    return 0.5 * (t_lo + t_hi)


def locate_events(traj: Trajectory, g: Callable[[float], float],
                  dense_factor: int = 4, t_min: float = 0.0):
    """All sign-change times of g on the trajectory, refined by bisection."""
    grid = []
    for a, b in zip(traj.t[:-1], traj.t[1:]):
        grid.extend(np.linspace(a, b, dense_factor + 1)[:-1])
    grid.append(traj.t[-1])
    grid = np.asarray(grid)
    vals = np.array([g(t) for t in grid])
    hits = []
    for i in range(len(grid) - 1):
        if grid[i + 1] <= t_min:
            continue
        a, b = vals[i], vals[i + 1]
        if a == 0.0 and grid[i] > t_min:
            hits.append(float(grid[i]))
        elif a * b < 0.0:
            hits.append(_refine_zero(g, float(grid[i]), float(grid[i + 1])))
    return [t for t in hits if t > t_min]


# -- solver core --------------------------------------------------------------

def _solve(rhs, y0, t_max, opts: IntegratorOptions, what: str):
    sol = solve_ivp(rhs, (0.0, float(t_max)), np.asarray(y0, dtype=float),
                    method="DOP853", rtol=opts.rtol, atol=opts.atol,
                    dense_output=True)
    if not sol.success:
        raise NumericalFault(f"{what}: integrator failed: {sol.message}",
                             {"t_reached": float(sol.t[-1])})
    return sol


def _drift_grid(sol, factor: int):
    ts = []
    for a, b in zip(sol.t[:-1], sol.t[1:]):
        ts.extend(np.linspace(a, b, factor + 1)[:-1])
    ts.append(sol.t[-1])
    return np.asarray(ts)


# -- planar form --------------------------------------------------------------

def integrate_planar(profile: Profile, rho0: float, rhodot0: float, z0: float,
                     w0: float, E: float, t_max: float,
                     opts: IntegratorOptions = DEFAULT_OPTS) -> Trajectory:
    """Integrate the in-plane system rho'' = -w0^2 g g'(rho), z' = w0 g(rho)^2.

    The energy identity rhodot^2 + w0^2 g(rho)^2 = 2E must hold at entry and
    is monitored along the flow.  Crossings of rho = 0 and turning points
    are located as events.
    """
    if t_max <= 0.0:
        raise InputFault("t_max must be positive")
    two_e = 2.0 * E
    ident0 = rhodot0 ** 2 + w0 ** 2 * profile.eval(abs(rho0)) ** 2
    if abs(ident0 - two_e) > 1e-9 * (1.0 + abs(two_e)):
        raise InputFault(f"energy identity violated at entry: {ident0} != {two_e}")

    def rhs(t, s):
        rho, rhodot, _z = s
        c = profile.ffp_over_r(abs(rho))
        return (rhodot, -w0 * w0 * c * rho, w0 * profile.eval(abs(rho)) ** 2)

    sol = _solve(rhs, (rho0, rhodot0, z0), t_max, opts, "integrate_planar")

    ts = _drift_grid(sol, opts.dense_factor)
    states = sol.sol(ts)
    ident = states[1] ** 2 + w0 ** 2 * profile.eval(np.abs(states[0])) ** 2
    drift = {"energy_identity": float(np.max(np.abs(ident - two_e)))}
    if opts.check_drift and drift["energy_identity"] > opts.drift_tol * (1.0 + two_e):
        raise NumericalFault("planar energy-identity drift above tolerance",
                             {"drift": drift["energy_identity"], "tol": opts.drift_tol})

    traj = Trajectory("planar", sol.t, sol.y.T, sol.sol, drift,
                      meta={"profile": profile, "w0": w0, "E": E,
                            "rho0": rho0, "rhodot0": rhodot0, "z0": z0})
    traj.events["rho_zero"] = locate_events(
        traj, lambda t: float(sol.sol(t)[0]), opts.dense_factor, t_min=1e-14)
    traj.events["turning"] = locate_events(
        traj, lambda t: float(sol.sol(t)[1]), opts.dense_factor, t_min=1e-14)
    return traj


def integrate_variational(profile: Profile, rho0: float, rhodot0: float,
                          w0: float, E: float, t_max: float,
                          opts: IntegratorOptions = DEFAULT_OPTS) -> Trajectory:
    """Co-integrate the derivative of the planar flow with respect to w0.

    States are (rho, rhodot, z, rho_w, rhodot_w) with rho_w(0) = rhodot_w(0)
    = 0; rho_w'' = -2 w0 g g'(rho) - w0^2 (g g')'(rho) rho_w, where
    (g g')' = (g^2)''/2.  The coefficient is pinned by the finite-difference
    oracle in the test suite.
    """
    if w0 == 0.0:
        raise InputFault("variational system requires w0 != 0")
    odd = profile.odd_extension()
    two_e = 2.0 * E
    ident0 = rhodot0 ** 2 + w0 ** 2 * profile.eval(abs(rho0)) ** 2
    if abs(ident0 - two_e) > 1e-9 * (1.0 + abs(two_e)):
        raise InputFault("energy identity violated at entry")

    def rhs(t, s):
        rho, rhodot, _z, rw, rwd = s
        ggp = odd.g_gprime(rho)
        return (rhodot,
                -w0 * w0 * ggp,
                w0 * profile.eval(abs(rho)) ** 2,
                rwd,
                -2.0 * w0 * ggp - w0 * w0 * 0.5 * odd.gsq_deriv2(rho) * rw)

    sol = _solve(rhs, (rho0, rhodot0, 0.0, 0.0, 0.0), t_max, opts,
                 "integrate_variational")
    ts = _drift_grid(sol, opts.dense_factor)
    states = sol.sol(ts)
    ident = states[1] ** 2 + w0 ** 2 * profile.eval(np.abs(states[0])) ** 2
    drift = {"energy_identity": float(np.max(np.abs(ident - two_e)))}
    return Trajectory("variational", sol.t, sol.y.T, sol.sol, drift,
                      meta={"profile": profile, "w0": w0, "E": E,
                            "rho0": rho0, "rhodot0": rhodot0, "z0": 0.0})


def z_w0_identity_check(profile: Profile, w0: float, E: float, t: float,
                        opts: IntegratorOptions = DEFAULT_OPTS,
                        fd_step: Optional[float] = None) -> float:
    """Residual of z_w0 = -sign(w0)/w0 * rhodot * rho_w for a singular start.

    The left side is estimated by central finite differences over two
    re-integrated trajectories, the right side from the co-integrated
    variational solution.
    """
    if w0 == 0.0:
        raise InputFault("identity requires w0 != 0")
    if t <= 0.0:
        raise InputFault("t must be positive")
    rhodot0 = math.sqrt(2.0 * E)
    h = fd_step if fd_step is not None else 1e-6 * (1.0 + abs(w0))

    def z_at(w):
        traj = integrate_planar(profile, 0.0, rhodot0, 0.0, w, E, t, opts)
        return float(traj(t)[2])

    z_w = (z_at(w0 + h) - z_at(w0 - h)) / (2.0 * h)
    var = integrate_variational(profile, 0.0, rhodot0, w0, E, t, opts)
    _, rhodot, _, rho_w, _ = var(t)
    rhs = -math.copysign(1.0, w0) / w0 * rhodot * rho_w
    return abs(z_w - rhs)


# -- Cartesian form ------------------------------------------------------------

def _embed_planar(planar: Trajectory, theta0: float) -> Trajectory:
    """View a planar trajectory as a 3D Cartesian one at plane angle theta0."""
    ct, st = math.cos(theta0), math.sin(theta0)
    base = planar._dense

    def dense(t):
        vals = base(t)
        rho, rhodot, z = vals[0], vals[1], vals[2]
        return np.stack([rho * ct, rho * st, z, rhodot * ct, rhodot * st])

    y = np.stack([dense(t) for t in planar.t])
    meta = dict(planar.meta)
    meta["theta0"] = theta0
    meta["planar"] = planar
    traj = Trajectory("cartesian", planar.t, y, dense,
                      drift={"H": 0.5 * planar.drift["energy_identity"], "K": 0.0},
                      events=planar.events, meta=meta)
    return traj


def integrate_cartesian(profile: Profile, q0: Sequence[float], lam: Covector,
                        t_max: float,
                        opts: IntegratorOptions = DEFAULT_OPTS) -> Trajectory:
    """Integrate the full 3D system from q0 with initial covector lam.

    Data with K = 0 (all singular starts included) are routed through the
    planar form and embedded back at the plane angle, unless
    ``opts.force_cartesian`` is set.  Orbiting trajectories (K != 0) must
    stay away from the axis; reaching ``R_FLOOR`` is reported as a fault.
    """
    if t_max <= 0.0:
        raise InputFault("t_max must be positive")
    x0, y0, z0 = (float(q0[0]), float(q0[1]), float(q0[2]))
    r0 = math.hypot(x0, y0)
    K = angular_momentum(q0, lam)
    L = radial_momentum(q0, lam)
    w0 = lam.w0
    scale = max(1.0, r0) * max(1.0, abs(lam.u0) + abs(lam.v0))

    if abs(K) <= K_PLANAR_TOL * scale and not opts.force_cartesian:
        if r0 <= R_FLOOR:
            theta0 = math.atan2(lam.v0, lam.u0)
            rho0, rhodot0 = 0.0, math.hypot(lam.u0, lam.v0)
        else:
            theta0 = math.atan2(y0, x0)
            rho0, rhodot0 = r0, L / r0
        E = 0.5 * (rhodot0 ** 2 + w0 ** 2 * profile.eval(abs(rho0)) ** 2)
        planar = integrate_planar(profile, rho0, rhodot0, z0, w0, E, t_max, opts)
        return _embed_planar(planar, theta0)

    def rhs(t, s):
        x, y, _z, u, v = s
        r = math.hypot(x, y)
        c = profile.ffp_over_r(r)
        w2c = w0 * w0 * c
        return (u, v, w0 * profile.eval(r) ** 2, -w2c * x, -w2c * y)

    sol = _solve(rhs, (x0, y0, z0, lam.u0, lam.v0), t_max, opts,
                 "integrate_cartesian")

    ts = _drift_grid(sol, opts.dense_factor)
    X, Y, _Z, U, V = sol.sol(ts)
    R = np.hypot(X, Y)
    H = 0.5 * (U ** 2 + V ** 2 + profile.eval(R) ** 2 * w0 ** 2)
    Kt = X * V - Y * U
    H0 = 0.5 * (lam.u0 ** 2 + lam.v0 ** 2 + profile.eval(r0) ** 2 * w0 ** 2)
    drift = {"H": float(np.max(np.abs(H - H0))), "K": float(np.max(np.abs(Kt - K)))}
    if abs(K) > K_PLANAR_TOL * scale and float(np.min(R)) < R_FLOOR:
        raise NumericalFault("orbiting trajectory reached the axis",
                             {"min_r": float(np.min(R)), "K": K})
    if opts.check_drift and max(drift["H"], drift["K"]) > opts.drift_tol * (1.0 + 2.0 * H0):
        raise NumericalFault("conserved-quantity drift above tolerance",
                             {"drift": drift, "tol": opts.drift_tol})
    return Trajectory("cartesian", sol.t, sol.y.T, sol.sol, drift,
                      meta={"profile": profile, "w0": w0, "E": H0, "K": K, "L": L,
                            "q0": (x0, y0, z0)})
