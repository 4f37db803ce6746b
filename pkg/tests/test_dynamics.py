import math

import numpy as np
import pytest

from helpers import random_unit_covector, unit_covector

from grushin3d.dynamics import (Covector, IntegratorOptions, angular_momentum,
                                energy, integrate_cartesian, integrate_planar,
                                integrate_variational, radial_momentum,
                                z_w0_identity_check)
from grushin3d.errors import InputFault


class TestCovector:
    def test_invariants(self, linear):
        q0 = (1.0, 0.0, 0.0)
        lam = Covector(0.0, 1.0, 1.0)
        assert angular_momentum(q0, lam) == 1.0
        assert radial_momentum(q0, lam) == 0.0
        assert 2.0 * energy(linear, q0, lam) == pytest.approx(2.0)


class TestCartesian:
    def test_straight_line(self, linear):
        tr = integrate_cartesian(linear, (1.0, 0.0, 0.0), Covector(1.0, 0.0, 0.0), 3.0)
        x, y, z, u, v = tr(3.0)
        assert (x, y, z) == pytest.approx((4.0, 0.0, 0.0), abs=1e-12)
        assert tr.drift["H"] < 1e-12

    def test_constant_radius_orbit(self, linear):
        # at r = 1 with K = w0 = 1 the centrifugal and metric forces balance
        tr = integrate_cartesian(linear, (1.0, 0.0, 0.0), Covector(0.0, 1.0, 1.0),
                                 2.0 * math.pi)
        ts = np.linspace(0.0, 2.0 * math.pi, 251)
        r = np.hypot(*tr(ts)[:2])
        assert np.max(np.abs(r - 1.0)) < 1e-9
        assert tr.drift["H"] < 1e-9 and tr.drift["K"] < 1e-9

    def test_k_conservation_generic(self, monolog):
        rng = np.random.default_rng(5)
        q0 = (0.9, -0.4, 0.2)
        lam = random_unit_covector(rng, monolog, q0)
        tr = integrate_cartesian(monolog, q0, lam, 3.0)
        assert tr.drift["K"] < 1e-9

    def test_planar_handoff_through_axis(self, linear):
        # K = 0 data crosses the axis; the Cartesian entry point must route
        # through the plane and keep going smoothly
        tr = integrate_cartesian(linear, (1.0, 0.0, 0.0), Covector(0.0, 0.0, 1.0),
                                 3.0)
        x, y, _z, _u, _v = tr(math.pi / 2)
        assert math.hypot(x, y) < 1e-9
        x1, y1 = tr(2.0)[:2]
        assert x1 < 0.0 and abs(y1) < 1e-12

    def test_cartesian_planar_agreement(self, quadratic):
        # forcing the 3D form must reproduce the planar solution before the
        # first axis crossing
        q0 = (1.0, 0.0, 0.0)
        lam = Covector(-0.6, 0.0, 0.8)
        opts = IntegratorOptions(force_cartesian=True)
        tr3 = integrate_cartesian(quadratic, q0, lam, 1.0, opts)
        E = energy(quadratic, q0, lam)
        trp = integrate_planar(quadratic, 1.0, -0.6, 0.0, 0.8, E, 1.0)
        for t in np.linspace(0.05, 0.95, 10):
            x, y, z, u, v = tr3(t)
            rho, rhodot, zp = trp(t)
            assert math.hypot(x, y) == pytest.approx(abs(rho), abs=1e-8)
            assert z == pytest.approx(zp, abs=1e-8)

    def test_rejects_bad_horizon(self, linear):
        with pytest.raises(InputFault):
            integrate_cartesian(linear, (1, 0, 0), Covector(1, 0, 0), -1.0)


class TestPlanar:
    def test_zero_potential(self, linear):
        tr = integrate_planar(linear, 0.0, 1.0, 0.5, 0.0, 0.5, 2.0)
        rho, rhodot, z = tr(2.0)
        assert rho == pytest.approx(2.0, abs=1e-12)
        assert z == pytest.approx(0.5, abs=1e-14)

    def test_first_return_linear(self, linear):
        tr = integrate_planar(linear, 0.0, 1.0, 0.0, 2.0, 0.5, 2.0)
        assert tr.events["rho_zero"][0] == pytest.approx(math.pi / 2, abs=1e-10)

    def test_symmetry_about_half_period(self, monolog):
        tr = integrate_planar(monolog, 0.0, 1.0, 0.0, 1.3, 0.5, 5.0)
        T = tr.events["rho_zero"][0]
        for s in np.linspace(0.01, 0.45 * T, 9):
            left = tr(T / 2 - s)[0]
            right = tr(T / 2 + s)[0]
            assert abs(left - right) < 1e-8

    def test_energy_identity_pointwise(self, cubic):
        E = 0.5
        tr = integrate_planar(cubic, 0.0, 1.0, 0.0, 1.0, E, 4.0)
        ts = np.linspace(0.0, 4.0, 300)
        rho, rhodot, _z = tr(ts)
        ident = rhodot ** 2 + 1.0 * cubic.eval(np.abs(rho)) ** 2
        assert np.max(np.abs(ident - 1.0)) < 1e-9

    def test_entry_identity_enforced(self, linear):
        with pytest.raises(InputFault):
            integrate_planar(linear, 0.0, 1.0, 0.0, 1.0, 2.0, 1.0)


class TestVariational:
    @pytest.mark.parametrize("w0,sign", [(1.0, -1.0), (-1.0, 1.0)])
    def test_sign_on_first_arch(self, linear, w0, sign):
        from grushin3d.singular import period
        T = period(linear, 0.5, w0).T
        var = integrate_variational(linear, 0.0, 1.0, w0, 0.5, 0.999 * T)
        for t in np.linspace(0.02 * T, 0.98 * T, 25):
            assert sign * var(t)[3] > 0.0

    def test_matches_finite_differences(self, builtins):
        h = 1e-6
        for p in builtins:
            w0, E, t = 1.0, 0.5, 0.8
            var = integrate_variational(p, 0.0, 1.0, w0, E, t)
            plus = integrate_planar(p, 0.0, 1.0, 0.0, w0 + h, E, t)
            minus = integrate_planar(p, 0.0, 1.0, 0.0, w0 - h, E, t)
            fd = (plus(t)[0] - minus(t)[0]) / (2.0 * h)
            assert var(t)[3] == pytest.approx(fd, rel=1e-4)

    def test_z_identity_examples(self, linear, quadratic):
        assert z_w0_identity_check(linear, 1.0, 0.5, 1.0) < 1e-5
        from grushin3d.singular import period
        T = period(quadratic, 0.5, 2.0).T
        assert z_w0_identity_check(quadratic, 2.0, 0.5, T / 4.0) < 1e-5

    def test_z_identity_vanishes_at_origin(self, linear):
        assert z_w0_identity_check(linear, 1.0, 0.5, 1e-4) < 1e-10


class TestTrajectoryExports:
    def test_cartesian_csv_schema(self, linear):
        tr = integrate_cartesian(linear, (1, 0, 0), Covector(0, 1, 0.5), 1.0)
        text = tr.to_csv(5)
        lines = text.strip().split("\n")
        assert lines[0] == "t,x,y,z,u,v,w0,H,K"
        assert len(lines) == 6

    def test_planar_csv_schema(self, linear):
        tr = integrate_planar(linear, 0.0, 1.0, 0.0, 1.0, 0.5, 1.0)
        assert tr.to_csv(4).splitlines()[0] == "t,rho,rhodot,z"

    def test_json_mirror(self, linear):
        import json
        tr = integrate_planar(linear, 0.0, 1.0, 0.0, 1.0, 0.5, 1.0)
        obj = json.loads(tr.to_json(4))
        assert obj["fields"] == ["t", "rho", "rhodot", "z"]
        assert len(obj["rows"]) == 4

    def test_dense_matches_samples(self, linear):
        tr = integrate_planar(linear, 0.0, 1.0, 0.0, 1.0, 0.5, 2.0)
        for i in range(len(tr.t)):
            assert np.allclose(tr(tr.t[i]), tr.y[i], atol=1e-12)
        assert np.all(np.diff(tr.t) > 0)
