"""Command-line front end.

Subcommands wrap the library operations and write byte-stable CSV/JSON
exports (17 significant digits in CSV, shortest round-trip floats in JSON,
LF line endings).  Exit codes: 0 success, 2 input fault, 3 numerical fault;
faults also emit a one-line JSON diagnostic on stderr.

The environment variable GRUSHIN_TOL overrides the integrator's relative
tolerance (absolute tolerance follows at 1/100 of it).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

import numpy as np

from .dynamics import (Covector, IntegratorOptions, angular_momentum,
                       energy, integrate_cartesian, radial_momentum)
from .errors import GrushinError, InputFault, NumericalFault
from .grushin_r import (closed_form_geodesic, conjugate_time, cut_time_and_locus,
                        distance_r)
from .profile import Profile, builtin_profiles, parse_profile_spec, validate
from .riemannian import (conjectured_cut_time, experimental_conjugate_search,
                         integrate_cylindrical, sigma_hitting_time,
                         symmetrize_covector)
from .singular import (ball_box_bounds, cut_from_sigma, distance_from_sigma,
                       period)

AXIS_TOL = 1e-12


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # accept comma-separated coordinate values starting with a minus sign
        self._negative_number_matcher = re.compile(r"^-\d+([\d.,eE+-]*)$")

    def error(self, message):
        sys.stderr.write(json.dumps({"error": message, "kind": "input"}) + "\n")
        raise SystemExit(2)


def _fmt_csv(rows, header) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{float(v):.17g}" for v in row))
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path):
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _parse_triple(s: str, what: str):
    parts = s.split(",")
    if len(parts) != 3:
        raise InputFault(f"{what} needs exactly three comma-separated numbers, got {s!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise InputFault(f"{what}: bad number in {s!r}") from exc


def _options() -> IntegratorOptions:
    tol = os.environ.get("GRUSHIN_TOL")
    if tol is None:
        return IntegratorOptions()
    try:
        rtol = float(tol)
    except ValueError as exc:
        raise InputFault(f"GRUSHIN_TOL is not a number: {tol!r}") from exc
    if rtol <= 0.0:
        raise InputFault("GRUSHIN_TOL must be positive")
    return IntegratorOptions(rtol=rtol, atol=rtol * 1e-2)


def _is_linear(profile: Profile) -> bool:
    return profile.kind == "monomial" and profile.alpha == 1.0


# -- subcommands ---------------------------------------------------------------

def cmd_geodesic(args) -> int:
    profile = parse_profile_spec(args.profile)
    q0 = _parse_triple(args.q0, "--q0")
    lam = Covector(*_parse_triple(args.lam, "--lam"))
    if args.t_max <= 0.0:
        raise InputFault("--t-max must be positive")
    opts = _options()
    if args.mode == "cylindrical":
        if math.hypot(q0[0], q0[1]) <= AXIS_TOL:
            raise InputFault("cylindrical export needs an off-axis start")
        geo = integrate_cylindrical(profile, q0, lam, args.t_max, opts)
        traj = geo.trajectory
    else:
        traj = integrate_cartesian(profile, q0, lam, args.t_max, opts)
    text = traj.to_csv(args.samples) if args.format == "csv" else traj.to_json(args.samples)
    _emit(text, args.out)
    return 0


def cmd_cut_time(args) -> int:
    profile = parse_profile_spec(args.profile)
    q0 = _parse_triple(args.q0, "--q0")
    lam = Covector(*_parse_triple(args.lam, "--lam"))
    opts = _options()
    r0 = math.hypot(q0[0], q0[1])
    K = angular_momentum(q0, lam)

    if r0 <= AXIS_TOL:
        E = energy(profile, q0, lam)
        res = cut_from_sigma(profile, E, lam.w0, z0=q0[2], opts=opts)
        payload = {"t_cut": res.t_cut, "cut_point": list(res.cut_point) if res.cut_point else None,
                   "certified": True, "method": "axis synthesis"}
    elif _is_linear(profile):
        res = cut_time_and_locus(q0, lam)
        payload = {"t_cut": res.t_cut,
                   "cut_point": list(res.cut_point) if res.cut_point else None,
                   "certified": True, "method": "linear-weight synthesis"}
    else:
        scale = max(1.0, r0)
        if abs(K) <= 1e-12 * scale:
            t = sigma_hitting_time(profile, q0, lam, opts)
            payload = {"t_cut": t, "cut_point": None, "certified": False,
                       "method": "axis-hitting time (minimizing up to it)"}
        else:
            t = conjectured_cut_time(profile, q0, lam, args.t_max, opts)
            payload = {"t_cut": t, "cut_point": None, "certified": False,
                       "method": "angular-sweep candidate (upper bound)"}
    if math.isinf(payload["t_cut"]):
        payload["t_cut"] = None
    _emit(json.dumps(payload) + "\n", args.out)
    return 0


def cmd_distance(args) -> int:
    profile = parse_profile_spec(args.profile)
    qa = _parse_triple(args.frm, "--from")
    qb = _parse_triple(args.to, "--to")
    opts = _options()
    ra = math.hypot(qa[0], qa[1])
    rb = math.hypot(qb[0], qb[1])
    if _is_linear(profile):
        res = distance_r(qa, qb)
    elif ra <= AXIS_TOL:
        res = distance_from_sigma(profile, qa, qb, opts)
    elif rb <= AXIS_TOL:
        res = distance_from_sigma(profile, qb, qa, opts)
    else:
        res = ball_box_bounds(profile, qa, qb, opts=opts)
    _emit(json.dumps(res.to_dict()) + "\n", args.out)
    return 0


def cmd_period(args) -> int:
    profile = parse_profile_spec(args.profile)
    tp = period(profile, args.E, args.w0, crosscheck=args.crosscheck,
                opts=_options())
    payload = {"rho_star": tp.rho_star, "T": tp.T, "w0": tp.w0, "E": tp.E}
    if tp.t_ode is not None:
        payload["t_ode"] = tp.t_ode
    _emit(json.dumps(payload) + "\n", args.out)
    return 0


def cmd_ball(args) -> int:
    from .singular import ball_boundary_from_sigma
    profile = parse_profile_spec(args.profile)
    center = _parse_triple(args.center, "--center")
    rows = ball_boundary_from_sigma(profile, center, args.radius,
                                    n_samples=args.samples, opts=_options())
    _emit(_fmt_csv(rows, ("w0", "t", "rho", "z")), args.out)
    if args.mesh_out:
        thetas = np.linspace(0.0, 2.0 * math.pi, args.mesh_theta, endpoint=False)
        verts = []
        for _w, _t, rho, z in rows:
            for th in thetas:
                verts.append([rho * math.cos(th), rho * math.sin(th), z])
        mesh = {"n_profile": len(rows), "n_theta": int(args.mesh_theta),
                "vertices": verts}
        _emit(json.dumps(mesh) + "\n", args.mesh_out)
    return 0


def cmd_conjugate(args) -> int:
    profile = parse_profile_spec(args.profile)
    q0 = _parse_triple(args.q0, "--q0")
    lam = Covector(*_parse_triple(args.lam, "--lam"))
    if _is_linear(profile):
        t = conjugate_time(q0, lam)
        payload = {"t_con": None if math.isinf(t) else t, "certified": True}
        _emit(json.dumps(payload) + "\n", args.out)
        return 0
    if not args.experimental:
        raise InputFault("conjugate-time search for general profiles is "
                         "exploratory; pass --experimental to run it")
    brackets = experimental_conjugate_search(profile, q0, lam, args.t_max,
                                             opts=_options())
    _emit(json.dumps(brackets) + "\n", args.out)
    return 0


def cmd_fan(args) -> int:
    """Sweep of unit-speed geodesics sharing one w0 through their common cut point."""
    profile = parse_profile_spec(args.profile)
    if not _is_linear(profile):
        raise InputFault("the geodesic fan export is defined for the linear weight")
    q0 = _parse_triple(args.q0, "--q0")
    r0 = math.hypot(q0[0], q0[1])
    if r0 <= AXIS_TOL:
        raise InputFault("fan export needs an off-axis base point")
    w0 = args.w0
    if abs(w0) >= 1.0 / r0:
        raise InputFault("need |w0| < 1/r0 on the unit-energy shell")
    th0 = math.atan2(q0[1], q0[0])
    p = math.sqrt(1.0 - (r0 * w0) ** 2)
    t_star = math.pi / abs(w0)
    rows = []
    for beta in np.linspace(0.0, 2.0 * math.pi, args.fans, endpoint=False):
        ur, ut = p * math.cos(beta), p * math.sin(beta)
        lam = Covector(ur * math.cos(th0) - ut * math.sin(th0),
                       ur * math.sin(th0) + ut * math.cos(th0), w0)
        cf = closed_form_geodesic(q0, lam)
        for t in np.linspace(0.0, t_star, args.points):
            x, y, z = cf.position(t)
            rows.append((w0, beta, t, x, y, z))
    _emit(_fmt_csv(rows, ("w0", "phi", "t", "x", "y", "z")), args.out)
    return 0


def cmd_verify(args) -> int:
    profiles = ([parse_profile_spec(args.profile)] if args.profile
                else builtin_profiles())
    opts = _options()
    failures = 0
    lines = []

    def check(name, ok, detail=""):
        nonlocal failures
        if not ok:
            failures += 1
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")

    rng = np.random.default_rng(2024)
    for prof in profiles:
        tag = prof.spec_string()
        rep = validate(prof)
        check(f"{tag}: membership conditions", rep.ok)

        for r in (1e-3, 0.1, 7.0, 250.0):
            from .profile import f_inverse, h_inverse
            check(f"{tag}: h roundtrip r={r:g}",
                  abs(h_inverse(prof, r * prof.eval(r)) - r) <= 1e-10 * r)
            check(f"{tag}: f roundtrip r={r:g}",
                  abs(f_inverse(prof, prof.eval(r)) - r) <= 1e-10 * r)

        tp = period(prof, 0.5, 1.0, crosscheck=True, opts=opts)
        check(f"{tag}: period quadrature vs flow",
              abs(tp.T - tp.t_ode) <= 1e-8 * (1.0 + tp.T),
              f"T={tp.T:.12g}")

        drift_ok = True
        for _ in range(5):
            r0 = rng.uniform(0.3, 1.5)
            w0 = rng.uniform(0.3, 0.9) / prof.eval(r0)
            beta = rng.uniform(0.1, math.pi - 0.1)
            pm = math.sqrt(1.0 - prof.eval(r0) ** 2 * w0 ** 2)
            lam = Covector(pm * math.cos(beta), pm * math.sin(beta), w0)
            horizon = min(3.0 * period(prof, 0.5, w0, opts=opts).T, 60.0)
            tr = integrate_cartesian(prof, (r0, 0.0, 0.0), lam, horizon, opts)
            if max(tr.drift["H"], tr.drift["K"]) > 1e-9:
                drift_ok = False
        check(f"{tag}: conservation (5 covectors, 3 periods)", drift_ok)

        d = distance_from_sigma(prof, (0.0, 0.0, 0.0), (1.5, 0.0, 0.0), opts)
        check(f"{tag}: base-plane ray distance", abs(d.value - 1.5) <= 1e-12)

        if _is_linear(prof):
            d = distance_r((1.0, 0.0, 0.0), (-1.0, 0.0, math.pi / 2))
            check(f"{tag}: cut-point distance", abs(d.value - math.pi) <= 1e-10)

    text = "\n".join(lines) + f"\n{'OK' if failures == 0 else 'FAILED'}: " \
        f"{len(lines) - failures}/{len(lines)} checks passed\n"
    _emit(text, args.out)
    return 0 if failures == 0 else 1


# -- parser ----------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="grushin3d",
                     description="Geodesics and distances for radial Grushin "
                                 "structures on R^3")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--profile", required=True,
                       help="monomial:alpha=A or monolog:alpha=A,beta=B")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("geodesic", help="integrate and export one geodesic")
    add_common(p)
    p.add_argument("--q0", required=True, help="base point x,y,z")
    p.add_argument("--lam", required=True, help="initial covector u,v,w")
    p.add_argument("--t-max", type=float, required=True, dest="t_max")
    p.add_argument("--mode", choices=("auto", "cylindrical"), default="auto")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("cut-time", help="cut time (certified where known)")
    add_common(p)
    p.add_argument("--q0", required=True)
    p.add_argument("--lam", required=True)
    p.add_argument("--t-max", type=float, default=200.0, dest="t_max")
    p.set_defaults(func=cmd_cut_time)

    p = sub.add_parser("distance", help="exact distance or certified bounds")
    add_common(p)
    p.add_argument("--from", required=True, dest="frm")
    p.add_argument("--to", required=True)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("period", help="turning point and first axis return")
    add_common(p)
    p.add_argument("--E", type=float, default=0.5)
    p.add_argument("--w0", type=float, required=True)
    p.add_argument("--crosscheck", action="store_true")
    p.set_defaults(func=cmd_period)

    p = sub.add_parser("ball", help="metric-ball boundary around an axis point")
    add_common(p)
    p.add_argument("--center", default="0,0,0")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--mesh-out", default=None, dest="mesh_out")
    p.add_argument("--mesh-theta", type=int, default=64, dest="mesh_theta")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("conjugate", help="conjugate time (linear weight) or "
                                         "experimental determinant search")
    add_common(p)
    p.add_argument("--q0", required=True)
    p.add_argument("--lam", required=True)
    p.add_argument("--t-max", type=float, default=20.0, dest="t_max")
    p.add_argument("--experimental", action="store_true")
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("fan", help="geodesic fan through a shared cut point "
                                   "(linear weight)")
    add_common(p)
    p.add_argument("--q0", required=True)
    p.add_argument("--w0", type=float, required=True)
    p.add_argument("--fans", type=int, default=16)
    p.add_argument("--points", type=int, default=120)
    p.set_defaults(func=cmd_fan)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--profile", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except InputFault as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "kind": "input"}) + "\n")
        return 2
    except NumericalFault as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "kind": "numerical",
                                     "diagnostics": exc.diagnostics}) + "\n")
        return 3
    except GrushinError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "kind": "error"}) + "\n")
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
