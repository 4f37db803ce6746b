"""Admissible radial weight functions.

A weight ``f`` multiplies vertical motion in the metric; membership in the
admissible family requires, on ``[0, inf)``:

  1. f(0) = 0 and f > 0 elsewhere,
  2. f twice continuously differentiable away from 0,
  3. f(r) f'(r) / r extends continuously to r = 0,
  4. f strictly increasing with f(r) -> +inf,
  5. f(r)^2 / f'(r) -> +inf.

Two parametric families are built in: pure powers ``r**alpha`` (alpha >= 1)
and log-weighted powers ``r**alpha * log(r+1)**beta`` (beta >= 0).  Both are
validated against the conditions above on sample grids by :func:`validate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InputFault, NumericalFault

# Below this radius the combination f(r) f'(r)/r switches to its analytic
# limit; the raw quotient is 0/0 at the axis.
SMALL_RADIUS = 1e-8


def _as_float_or_array(x, values):
    if np.isscalar(x) or (isinstance(x, np.ndarray) and x.ndim == 0):
        return float(values)
    return values


@dataclass(frozen=True)
class Profile:
    """A built-in admissible weight with analytic derivatives.

    Parameters
    ----------
    kind : str
        ``"monomial"`` for r**alpha or ``"monolog"`` for
        r**alpha * log(r+1)**beta.
    alpha : float
        Power of r, must be >= 1.
    beta : float
        Power of log(r+1) (monolog only), must be >= 0.
    """

    kind: str
    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("monomial", "monolog"):
            raise InputFault(f"unknown profile kind {self.kind!r}")
        if not self.alpha >= 1.0:
            raise InputFault("profile requires alpha >= 1")
        if self.kind == "monolog" and not self.beta >= 0.0:
            raise InputFault("monolog profile requires beta >= 0")
        if self.kind == "monomial" and self.beta != 0.0:
            raise InputFault("monomial profile takes no beta")

    # -- evaluation ---------------------------------------------------------

    def __call__(self, r):
        return self.eval(r)

    def eval(self, r):
        """f(r) for scalar or array r >= 0."""
        rr = np.asarray(r, dtype=float)
        a, b = self.alpha, self.beta
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "monomial":
                out = np.where(rr > 0.0, rr ** a, 0.0)
            else:
                out = np.where(rr > 0.0, rr ** a * np.log1p(rr) ** b, 0.0)
        return _as_float_or_array(r, out)

    def deriv1(self, r):
        """f'(r) on (0, inf); returns the r -> 0+ limit at r = 0."""
        rr = np.asarray(r, dtype=float)
        a, b = self.alpha, self.beta
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "monomial":
                out = np.where(rr > 0.0, a * rr ** (a - 1.0), 1.0 if a == 1.0 else 0.0)
            else:
                L = np.log1p(rr)
                main = a * rr ** (a - 1.0) * L ** b
                extra = b * rr ** a * L ** (b - 1.0) / (1.0 + rr) if b != 0.0 else 0.0
                lim0 = 1.0 if (a == 1.0 and b == 0.0) else 0.0
                out = np.where(rr > 0.0, main + extra, lim0)
        return _as_float_or_array(r, out)

    def deriv2(self, r):
        """f''(r) on (0, inf).  Not defined at r = 0 for alpha < 2."""
        rr = np.asarray(r, dtype=float)
        a, b = self.alpha, self.beta
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "monomial":
                out = np.where(rr > 0.0, a * (a - 1.0) * rr ** (a - 2.0), 0.0)
            else:
                L = np.log1p(rr)
                t1 = a * (a - 1.0) * rr ** (a - 2.0) * L ** b
                if b != 0.0:
                    t2 = 2.0 * a * b * rr ** (a - 1.0) * L ** (b - 1.0) / (1.0 + rr)
                    t3 = b * (b - 1.0) * rr ** a * L ** (b - 2.0) / (1.0 + rr) ** 2 if b != 1.0 else 0.0
                    t4 = -b * rr ** a * L ** (b - 1.0) / (1.0 + rr) ** 2
                else:
                    t2 = t3 = t4 = 0.0
                out = np.where(rr > 0.0, t1 + t2 + t3 + t4, 0.0)
        return _as_float_or_array(r, out)

    # -- axis limits --------------------------------------------------------

    @property
    def ffprime_over_r_at_0(self) -> float:
        """Continuous extension of f(r) f'(r) / r at r = 0.

        Supplied analytically per family to avoid a 0/0 evaluation: it is 1
        exactly when the weight is asymptotically linear (alpha = 1 and, for
        the log family, beta = 0), otherwise 0.
        """
        if self.alpha == 1.0 and (self.kind == "monomial" or self.beta == 0.0):
            return 1.0
        return 0.0

    def ffp_over_r(self, r):
        """f(r) f'(r) / r, using the analytic limit below ``SMALL_RADIUS``."""
        rr = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            raw = np.where(rr > SMALL_RADIUS,
                           self.eval(rr) * self.deriv1(rr) / np.where(rr > 0, rr, 1.0),
                           self.ffprime_over_r_at_0)
        return _as_float_or_array(r, raw)

    def spec_string(self) -> str:
        if self.kind == "monomial":
            return f"monomial:alpha={self.alpha:g}"
        return f"monolog:alpha={self.alpha:g},beta={self.beta:g}"

    def odd_extension(self) -> "OddExtension":
        return OddExtension(profile=self)


@dataclass(frozen=True)
class OddExtension:
    """Odd extension g(rho) = sign(rho) f(|rho|) and its square.

    ``g**2`` is twice differentiable through 0 with
    (g^2)''(0) = 2 * lim f(r) f'(r) / r.
    """

    profile: Profile

    def g(self, rho):
        rr = np.asarray(rho, dtype=float)
        out = np.sign(rr) * self.profile.eval(np.abs(rr))
        return _as_float_or_array(rho, out)

    def gsq(self, rho):
        rr = np.asarray(rho, dtype=float)
        out = self.profile.eval(np.abs(rr)) ** 2
        return _as_float_or_array(rho, out)

    def g_gprime(self, rho):
        """g(rho) g'(rho) = (f f'/r)(|rho|) * rho; continuous through 0."""
        rr = np.asarray(rho, dtype=float)
        out = self.profile.ffp_over_r(np.abs(rr)) * rr
        return _as_float_or_array(rho, out)

    def gsq_deriv2(self, rho):
        """Second derivative of g**2, continuous at 0."""
        rr = np.asarray(rho, dtype=float)
        ar = np.abs(rr)
        p = self.profile
        with np.errstate(divide="ignore", invalid="ignore"):
            away = 2.0 * (p.deriv1(ar) ** 2 + p.eval(ar) * p.deriv2(ar))
            out = np.where(ar > SMALL_RADIUS, away, 2.0 * p.ffprime_over_r_at_0)
        return _as_float_or_array(rho, out)


# -- inverse maps -----------------------------------------------------------

_BISECT_TOL = 1e-12
_MAX_DOUBLINGS = 60


def _invert_increasing(fn: Callable[[float], float], target: float, what: str) -> float:
    """Solve fn(r) = target for fn strictly increasing with fn(0) = 0."""
    if target < 0.0:
        raise InputFault(f"{what}: target must be nonnegative, got {target}")
    if target == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    n = 0
    while fn(hi) < target:
        hi *= 2.0
        n += 1
        if n > _MAX_DOUBLINGS:
            raise NumericalFault(
                f"{what}: bracket expansion failed after {_MAX_DOUBLINGS} doublings",
                {"target": target, "hi": hi})
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * (1.0 + hi):
            break
    r = 0.5 * (lo + hi)
    if abs(fn(r) - target) > _BISECT_TOL * (1.0 + abs(target)):
        raise NumericalFault(f"{what}: residual above tolerance",
                             {"target": target, "r": r, "residual": fn(r) - target})
    return r


def h_inverse(profile: Profile, s: float) -> float:
    """Inverse of the strictly increasing map r -> r * f(r).

    ``h(0) = 0``; the result r satisfies |r f(r) - s| <= 1e-12 (1 + s).
    """
    return _invert_increasing(lambda r: r * profile.eval(r), float(s), "h_inverse")


def f_inverse(profile: Profile, y: float) -> float:
    """Inverse of f itself (strictly increasing, f(0) = 0)."""
    return _invert_increasing(profile.eval, float(y), "f_inverse")


# -- validation -------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Sample grids used by :func:`validate`.

    ``near_*`` is a geometric grid approaching 0, ``tail_*`` a log grid for
    asymptotic checks.  ``mid_count`` points on [1e-3, 1e3] support the
    derivative-consistency check.
    """

    near_lo: float = 1e-8
    near_hi: float = 1.0
    near_count: int = 60
    tail_lo: float = 1.0
    tail_hi: float = 1e6
    tail_count: int = 60
    mid_count: int = 40

    def near_grid(self):
        return np.geomspace(self.near_lo, self.near_hi, self.near_count)

    def tail_grid(self):
        return np.geomspace(self.tail_lo, self.tail_hi, self.tail_count)

    def mid_grid(self):
        return np.geomspace(1e-3, 1e3, self.mid_count)


@dataclass(frozen=True)
class AxiomCheck:
    index: int
    name: str
    status: str            # "pass" | "fail" | "consistent"
    witness: Optional[float] = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"


@dataclass(frozen=True)
class ValidationReport:
    profile: Profile
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def summary(self) -> str:
        lines = [f"profile {self.profile.spec_string()}"]
        for c in self.checks:
            mark = {"pass": "PASS", "consistent": "CONSISTENT", "fail": "FAIL"}[c.status]
            w = "" if c.witness is None else f"  witness r={c.witness:.3e}"
            lines.append(f"  [{c.index}] {mark:10s} {c.name}{w}  {c.detail}")
        return "\n".join(lines)


def validate(profile: Profile, grid: GridSpec = GridSpec()) -> ValidationReport:
    """Check the five membership conditions on sample grids.

    Failures are recorded in the report with a witness sample; nothing is
    raised.  Asymptotic growth conditions cannot be decided from finitely
    many samples, so they report "consistent" rather than "pass" when the
    sampled behaviour agrees.
    """
    checks = []
    near = grid.near_grid()
    tail = grid.tail_grid()
    mid = grid.mid_grid()

    # 1: vanishes only at the axis
    f0 = profile.eval(0.0)
    fa = profile.eval(np.concatenate([near, tail]))
    if f0 != 0.0:
        checks.append(AxiomCheck(1, "f(0)=0, f>0 elsewhere", "fail", 0.0, f"f(0)={f0}"))
    elif np.any(fa <= 0.0):
        bad = float(np.concatenate([near, tail])[np.argmax(fa <= 0.0)])
        checks.append(AxiomCheck(1, "f(0)=0, f>0 elsewhere", "fail", bad, "nonpositive sample"))
    else:
        checks.append(AxiomCheck(1, "f(0)=0, f>0 elsewhere", "pass"))

    # 2: C^2 away from 0, checked as finite-difference consistency of the
    # supplied derivatives
    h = 1e-6 * (1.0 + mid)
    fd1 = (profile.eval(mid + h) - profile.eval(mid - h)) / (2.0 * h)
    fd2 = (profile.deriv1(mid + h) - profile.deriv1(mid - h)) / (2.0 * h)
    e1 = np.max(np.abs(fd1 - profile.deriv1(mid)) / (1.0 + np.abs(profile.deriv1(mid))))
    e2 = np.max(np.abs(fd2 - profile.deriv2(mid)) / (1.0 + np.abs(profile.deriv2(mid))))
    if e1 > 1e-4 or e2 > 1e-3 or not np.all(np.isfinite(fd1)) or not np.all(np.isfinite(fd2)):
        checks.append(AxiomCheck(2, "C2 regularity away from 0", "fail", None,
                                 f"derivative mismatch e1={e1:.2e} e2={e2:.2e}"))
    else:
        checks.append(AxiomCheck(2, "C2 regularity away from 0", "pass"))

    # 3: f f'/r extends continuously to 0
    c0 = profile.ffprime_over_r_at_0
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = profile.eval(near) * profile.deriv1(near) / near
    dev = np.abs(vals - c0)
    if dev[0] <= 1e-6 * (1.0 + abs(c0)) and np.all(dev[:10] <= dev[9] + 1e-12):
        checks.append(AxiomCheck(3, "f f'/r continuous at 0", "pass"))
    elif dev[0] > 10.0 * (dev[min(10, len(dev) - 1)] + 1e-300) and dev[0] > 1.0:
        checks.append(AxiomCheck(3, "f f'/r continuous at 0", "fail", float(near[0]),
                                 f"diverges: value {vals[0]:.3e} vs declared limit {c0:g}"))
    else:
        checks.append(AxiomCheck(3, "f f'/r continuous at 0", "consistent", None,
                                 f"slow approach to {c0:g}, deviation {dev[0]:.2e} at r={near[0]:.1e}"))

    # 4: strictly increasing and unbounded
    allg = np.unique(np.concatenate([near, tail]))
    fv = profile.eval(allg)
    inc = np.all(np.diff(fv) > 0.0)
    if not inc:
        j = int(np.argmax(np.diff(fv) <= 0.0))
        checks.append(AxiomCheck(4, "strictly increasing, unbounded", "fail",
                                 float(allg[j]), "not increasing"))
    elif fv[-1] > 1e3 * max(fv[len(near)], 1e-300):
        checks.append(AxiomCheck(4, "strictly increasing, unbounded", "pass"))
    else:
        checks.append(AxiomCheck(4, "strictly increasing, unbounded", "consistent",
                                 None, "growth present but slow on sampled tail"))

    # 5: f^2/f' grows without bound (asymptotic; reported as consistent)
    ratio = profile.eval(tail) ** 2 / profile.deriv1(tail)
    if np.any(np.diff(ratio) <= 0.0):
        j = int(np.argmax(np.diff(ratio) <= 0.0))
        checks.append(AxiomCheck(5, "f^2/f' -> inf", "fail", float(tail[j]),
                                 "ratio not increasing on tail grid"))
    elif ratio[-1] > 10.0 * ratio[0]:
        checks.append(AxiomCheck(5, "f^2/f' -> inf", "consistent", None,
                                 f"monotone growth, {ratio[0]:.3e} -> {ratio[-1]:.3e}"))
    else:
        checks.append(AxiomCheck(5, "f^2/f' -> inf", "consistent", None,
                                 "monotone but slow growth on sampled tail"))

    return ValidationReport(profile=profile, checks=tuple(checks))


# -- spec strings and builtins ----------------------------------------------

def parse_profile_spec(spec: str) -> Profile:
    """Parse ``monomial:alpha=A`` or ``monolog:alpha=A,beta=B`` (case-insensitive)."""
    s = spec.strip().lower()
    head, sep, rest = s.partition(":")
    if not sep or head not in ("monomial", "monolog"):
        raise InputFault(f"malformed profile spec {spec!r}")
    params = {}
    for item in rest.split(","):
        if not item:
            continue
        key, eq, val = item.partition("=")
        if not eq:
            raise InputFault(f"malformed profile parameter {item!r} in {spec!r}")
        try:
            params[key.strip()] = float(val)
        except ValueError as exc:
            raise InputFault(f"bad numeric value in profile spec {spec!r}") from exc
    try:
        if head == "monomial":
            if set(params) != {"alpha"}:
                raise InputFault(f"monomial spec takes exactly alpha=, got {spec!r}")
            return Profile("monomial", params["alpha"])
        if set(params) != {"alpha", "beta"}:
            raise InputFault(f"monolog spec takes alpha= and beta=, got {spec!r}")
        return Profile("monolog", params["alpha"], params["beta"])
    except KeyError as exc:
        raise InputFault(f"missing parameter in profile spec {spec!r}") from exc


def builtin_profiles():
    """The canonical profile list exercised by verification suites."""
    return [
        Profile("monomial", 1.0),
        Profile("monomial", 2.0),
        Profile("monomial", 3.0),
        Profile("monolog", 1.0, 2.0),
    ]
