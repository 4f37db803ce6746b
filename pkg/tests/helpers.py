"""Shared construction helpers for the test suite."""

import math

from grushin3d.dynamics import Covector
from grushin3d.profile import Profile


def unit_covector(profile: Profile, q0, w0: float, beta: float) -> Covector:
    """Unit-energy covector at q0; beta is measured from the outward radial
    direction, so beta = 0 is purely radial and beta = pi/2 purely angular."""
    r0 = math.hypot(q0[0], q0[1])
    p2 = 1.0 - profile.eval(r0) ** 2 * w0 ** 2
    if p2 < 0.0:
        raise ValueError("w0 too large for the unit-energy shell at this radius")
    p = math.sqrt(p2)
    th = math.atan2(q0[1], q0[0])
    ur, ut = p * math.cos(beta), p * math.sin(beta)
    return Covector(ur * math.cos(th) - ut * math.sin(th),
                    ur * math.sin(th) + ut * math.cos(th), w0)


def random_unit_covector(rng, profile: Profile, q0, w_lo=0.25, w_hi=0.9):
    """Random unit-energy covector with |w0| bounded away from 0 and the pole."""
    r0 = math.hypot(q0[0], q0[1])
    w0 = rng.uniform(w_lo, w_hi) / profile.eval(r0) * rng.choice([-1.0, 1.0])
    beta = rng.uniform(0.05, math.pi - 0.05) * rng.choice([-1.0, 1.0])
    return unit_covector(profile, q0, w0, beta)
