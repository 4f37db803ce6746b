import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_unit_covector, unit_covector

from grushin3d.dynamics import Covector, angular_momentum, energy, radial_momentum
from grushin3d.errors import InputFault
from grushin3d.riemannian import (conjectured_cut_time,
                                  experimental_conjugate_search, full_jacobian_fd,
                                  integrate_cylindrical, jacobian_reduced,
                                  sigma_hitting_time,
                                  straight_line_determinant_exact,
                                  straight_line_determinant_fd,
                                  symmetrize_covector)


class TestSymmetrize:
    def test_reflection_at_positive_x(self):
        lam = Covector(0.3, -0.8, 0.5)
        hat = symmetrize_covector((1.0, 0.0, 2.0), lam)
        assert (hat.u0, hat.v0, hat.w0) == pytest.approx((0.3, 0.8, 0.5))

    @settings(max_examples=80, deadline=None)
    @given(x0=st.floats(-3, 3), y0=st.floats(-3, 3),
           u0=st.floats(-2, 2), v0=st.floats(-2, 2), w0=st.floats(-2, 2))
    def test_momentum_algebra(self, x0, y0, u0, v0, w0):
        if math.hypot(x0, y0) < 1e-3:
            return
        q0 = (x0, y0, 0.0)
        lam = Covector(u0, v0, w0)
        hat = symmetrize_covector(q0, lam)
        assert angular_momentum(q0, hat) == pytest.approx(-angular_momentum(q0, lam),
                                                          abs=1e-12)
        assert radial_momentum(q0, hat) == pytest.approx(radial_momentum(q0, lam),
                                                         abs=1e-12)
        again = symmetrize_covector(q0, hat)
        assert (again.u0, again.v0) == pytest.approx((lam.u0, lam.v0), abs=1e-12)

    def test_rejects_axis_base(self):
        with pytest.raises(InputFault):
            symmetrize_covector((0.0, 0.0, 1.0), Covector(1, 0, 0))


class TestConjecturedCutTime:
    def test_linear_weight_reduces_to_pi_over_w0(self, linear):
        q0 = (1.0, 0.0, 0.0)
        for w0, beta in ((0.5, 1.0), (0.8, 2.0), (-0.6, 0.7)):
            lam = unit_covector(linear, q0, w0, beta)
            T = conjectured_cut_time(linear, q0, lam, 3.0 * math.pi / abs(w0))
            assert T == pytest.approx(math.pi / abs(w0), abs=1e-8)

    def test_straight_line_never_sweeps_pi(self, linear):
        q0 = (1.0, 0.0, 0.0)
        T = conjectured_cut_time(linear, q0, Covector(0.0, 1.0, 0.0), 80.0)
        assert math.isinf(T)

    def test_symmetrizing_geodesics_meet(self, quadratic):
        q0 = (1.0, 0.0, 0.0)
        lam = unit_covector(quadratic, q0, 0.5, 0.9)
        T = conjectured_cut_time(quadratic, q0, lam, 60.0)
        geo = integrate_cylindrical(quadratic, q0, lam, 1.01 * T)
        hat = integrate_cylindrical(quadratic, q0, symmetrize_covector(q0, lam),
                                    1.01 * T)
        assert np.linalg.norm(geo.position(T) - hat.position(T)) < 1e-7

    def test_same_radius_opposing_angles(self, monolog):
        q0 = (0.8, 0.3, -0.2)
        rng = np.random.default_rng(9)
        lam = random_unit_covector(rng, monolog, q0)
        geo = integrate_cylindrical(monolog, q0, lam, 4.0)
        hat = integrate_cylindrical(monolog, q0, symmetrize_covector(q0, lam), 4.0)
        th0 = geo.theta0
        for t in np.linspace(0.2, 4.0, 9):
            r1, _rd1, a1, _z1, _s1 = geo(t)
            r2, _rd2, a2, _z2, _s2 = hat(t)
            assert r1 == pytest.approx(r2, abs=1e-8)
            assert (a1 - th0) == pytest.approx(-(a2 - th0), abs=1e-8)

    def test_requires_nonzero_K(self, linear):
        with pytest.raises(InputFault):
            conjectured_cut_time(linear, (1.0, 0.0, 0.0), Covector(1.0, 0.0, 0.0), 5.0)


class TestSigmaHitting:
    def test_inward_ray(self, linear):
        assert sigma_hitting_time(linear, (1, 0, 0), Covector(-1, 0, 0)) == \
            pytest.approx(1.0, abs=1e-12)

    def test_outward_ray_never(self, linear):
        assert math.isinf(sigma_hitting_time(linear, (1, 0, 0), Covector(1, 0, 0)))

    def test_quarter_oscillation(self, linear):
        t = sigma_hitting_time(linear, (1, 0, 0), Covector(0, 0, 1))
        assert t == pytest.approx(math.pi / 2, abs=1e-10)

    def test_oscillation_always_hits_and_transversal(self, builtins):
        rng = np.random.default_rng(21)
        from grushin3d.dynamics import integrate_planar
        for p in builtins:
            r0 = rng.uniform(0.4, 1.2)
            w0 = rng.uniform(0.3, 0.8) / p.eval(r0)
            s = math.sqrt(1.0 - p.eval(r0) ** 2 * w0 ** 2)
            lam = Covector(s * rng.choice([-1, 1]), 0.0, w0)
            q0 = (r0, 0.0, 0.0)
            t = sigma_hitting_time(p, q0, lam)
            assert math.isfinite(t)
            E = energy(p, q0, lam)
            tr = integrate_planar(p, r0, lam.u0, 0.0, w0, E, 1.01 * t)
            assert abs(tr(t)[1]) > 1e-3     # transversal crossing

    def test_rejects_orbiting_data(self, linear):
        with pytest.raises(InputFault):
            sigma_hitting_time(linear, (1, 0, 0), Covector(0, 1, 0))


class TestJacobians:
    def test_zero_at_t0(self, quadratic):
        q0 = (1.0, 0.0, 0.0)
        lam = unit_covector(quadratic, q0, 0.6, 0.7)
        assert jacobian_reduced(quadratic, "KW", q0, lam, 0.0) == 0.0

    @pytest.mark.parametrize("chart", ["KW", "LW", "KL"])
    def test_reduced_matches_full(self, quadratic, chart):
        q0 = (1.0, 0.0, 0.0)
        lam = unit_covector(quadratic, q0, 0.6, 0.7)
        red = jacobian_reduced(quadratic, chart, q0, lam, 0.7)
        full = full_jacobian_fd(quadratic, chart, q0, lam, 0.7)
        assert red == pytest.approx(full, rel=1e-4)

    def test_linear_weight_no_premature_zero(self, linear):
        q0 = (1.0, 0.0, 0.0)
        lam = unit_covector(linear, q0, 0.7, 0.9)
        for chart in ("KW", "LW", "KL"):
            val = jacobian_reduced(linear, chart, q0, lam, 0.4)
            assert abs(val) > 1e-6

    def test_chart_preconditions(self, quadratic):
        q0 = (1.0, 0.0, 0.0)
        radial = Covector(0.6, 0.0, 0.8)     # K = 0
        with pytest.raises(InputFault):
            jacobian_reduced(quadratic, "LW", q0, radial, 0.5)
        with pytest.raises(InputFault):
            jacobian_reduced(quadratic, "BAD", q0, radial, 0.5)


class TestStraightLineDeterminant:
    @pytest.mark.parametrize("t", [0.5, 2.0, 7.0])
    def test_matches_closed_form(self, quadratic, t):
        q0 = (1.0, 0.0, 0.0)
        lam = Covector(0.0, 1.0, 0.0)
        fd = straight_line_determinant_fd(quadratic, q0, lam, t)
        exact = straight_line_determinant_exact(quadratic, q0, lam, t)
        assert fd == pytest.approx(exact, rel=1e-6)

    def test_never_zero(self, linear):
        q0 = (0.7, 0.2, 0.0)
        v0 = math.sqrt(1 - 0.3 ** 2)
        lam = Covector(0.3, v0, 0.0)
        for t in np.linspace(0.25, 10.0, 14):
            assert abs(straight_line_determinant_exact(linear, q0, lam, t)) > 1e-9


class TestConjugateSearch:
    def test_linear_first_bracket_contains_pi_over_w0(self, linear):
        q0 = (1.0, 0.0, 0.0)
        lam = unit_covector(linear, q0, 0.7, 0.8)
        brackets = experimental_conjugate_search(linear, q0, lam,
                                                 1.2 * math.pi / 0.7, n_scan=150)
        assert brackets
        b = brackets[0]
        assert b["t_lo"] <= math.pi / 0.7 <= b["t_hi"]
        assert b["certified"] is False

    def test_straight_lines_rejected(self, quadratic):
        with pytest.raises(InputFault):
            experimental_conjugate_search(quadratic, (1, 0, 0),
                                          Covector(0, 1, 0), 5.0)

    def test_quadratic_weight_finds_candidates(self, quadratic):
        q0 = (1.0, 0.0, 0.0)
        lam = unit_covector(quadratic, q0, 0.5, 0.55)
        brackets = experimental_conjugate_search(quadratic, q0, lam, 12.0,
                                                 n_scan=200)
        assert brackets          # recorded as regression data, values not pinned
        assert all(not b["certified"] for b in brackets)
