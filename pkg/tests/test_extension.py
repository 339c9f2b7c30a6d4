"""Half-space extension: kernel mass, trace recovery, flux, profiles, barrier."""

import math

import numpy as np
import pytest

from hardyhenon.cylinder import CylinderGrid, psi_nodes
from hardyhenon.extension import (
    ExtensionField,
    FowlerField,
    exact_extension_field,
    exact_sphere_profile,
    fowler_map,
    fowler_unmap,
    neumann_flux,
    poisson_extend_radial,
    verify_barrier_identity,
    verify_sphere_ode,
)
from hardyhenon.fraclap import RadialProfile, constant_profile, power_profile
from hardyhenon.params import derive_exponents, validate_params
from hardyhenon.specialfn import singular_constant

P352 = validate_params(3, 0.5, 0.0, 2.0)


def exact_trace(params):
    beta = derive_exponents(params).beta
    amp = singular_constant(params)
    return RadialProfile(
        evaluate=lambda r: amp * np.asarray(r, float) ** (-beta),
        inner_exponent=beta,
        outer_exponent=beta,
    )


class TestPoissonExtension:
    def test_constant_trace_extends_to_one(self):
        for n, sigma in ((2, 0.3), (3, 0.5), (4, 0.75)):
            for point in ((1.0, 0.3), (0.5, 1.2), (1.0, math.pi / 2.0), (1.0, 1e-3)):
                u = poisson_extend_radial(constant_profile(1.0), point, n, sigma)
                assert u == pytest.approx(1.0, abs=1e-10)

    def test_homogeneity(self):
        prof = power_profile(1.0)
        a = poisson_extend_radial(prof, (1.0, 0.4), 3, 0.5)
        b = poisson_extend_radial(prof, (2.0, 0.4), 3, 0.5)
        assert b == pytest.approx(a / 2.0, rel=1e-8)

    def test_trace_recovery_monotone(self):
        prof = power_profile(1.0)
        errors = []
        for psi in (1e-1, 1e-2, 1e-3):
            u = poisson_extend_radial(prof, (1.0, psi), 3, 0.5)
            errors.append(abs(u - 1.0))
        assert errors[0] > errors[1] > errors[2]
        # rate sin(psi)^{2 sigma}: ratios approach 10 for sigma = 1/2
        assert errors[1] / errors[2] == pytest.approx(10.0, rel=0.05)

    def test_boundary_angle_rejected(self):
        with pytest.raises(ValueError, match="psi = 0"):
            poisson_extend_radial(constant_profile(), (1.0, 0.0), 3, 0.5)

    def test_convergence_report(self):
        from hardyhenon.fraclap import QuadratureError

        value = poisson_extend_radial(
            power_profile(1.0), (1.0, 0.4), 3, 0.5, convergence_tol=1e-6
        )
        assert value > 0.0
        with pytest.raises(QuadratureError) as err:
            poisson_extend_radial(power_profile(1.0), (1.0, 0.4), 3, 0.5, convergence_tol=1e-17)
        assert err.value.estimate > 1e-17


class TestNeumannFlux:
    def test_exact_trace_reference(self):
        flux = neumann_flux(exact_trace(P352), 1.0, P352)
        assert flux.value == pytest.approx((2.0 / math.pi) ** 2, rel=1e-4)

    def test_constant_trace_has_no_flux(self):
        flux = neumann_flux(constant_profile(1.0), 1.0, P352)
        assert abs(flux.value) < 1e-8

    def test_flux_scales_homogeneously(self):
        params = P352
        d = derive_exponents(params)
        f1 = neumann_flux(exact_trace(params), 1.0, params)
        f2 = neumann_flux(exact_trace(params), 2.0, params)
        want = 2.0 ** (params.alpha - d.beta * params.p)
        assert f2.value / f1.value == pytest.approx(want, rel=1e-5)


class TestFowler:
    def _field(self):
        rng = np.random.default_rng(3)
        r = np.exp(np.linspace(-1.0, 1.0, 21))
        psi = np.linspace(0.0, math.pi / 2.0, 17)
        vals = 1.0 + rng.random((21, 17))
        return ExtensionField(r, psi, vals, P352, "poisson_evaluated")

    def test_round_trip(self):
        field = self._field()
        back = fowler_unmap(fowler_map(field), tag="poisson_evaluated")
        assert np.max(np.abs(back.values - field.values) / field.values) < 1e-12
        assert np.max(np.abs(back.r_grid - field.r_grid)) < 1e-14

    def test_exact_field_is_axially_constant(self):
        grid = CylinderGrid(n_s=33, n_psi=33)
        psi = psi_nodes(grid)
        r = np.exp(np.linspace(-1.0, 1.0, 33))
        fow = fowler_map(exact_extension_field(P352, r, psi))
        drift = np.max(np.abs(fow.values - fow.values[0, None, :]))
        assert drift < 1e-10 * np.max(fow.values)

    def test_axially_constant_maps_to_power_times_profile(self):
        beta = derive_exponents(P352).beta
        psi = np.linspace(0.0, math.pi / 2.0, 9)
        s = np.linspace(-1.0, 1.0, 11)
        phi = 1.0 + np.cos(psi)
        fow = FowlerField(s, psi, np.tile(phi, (11, 1)), P352)
        back = fowler_unmap(fow)
        want = np.exp(s)[:, None] ** (-beta) * phi[None, :]
        assert np.max(np.abs(back.values - want)) < 1e-12

    def test_field_validation(self):
        with pytest.raises(ValueError, match="tag"):
            ExtensionField(np.ones(2), np.ones(3), np.ones((2, 3)), P352, "bogus")
        with pytest.raises(ValueError, match="nonnegative"):
            ExtensionField(np.ones(2), np.ones(3), -np.ones((2, 3)), P352, "exact_homogeneous")


@pytest.fixture(scope="module")
def profile():
    return exact_sphere_profile(P352, psi_nodes(CylinderGrid()))


class TestSphereProfile:

    def test_boundary_value_matches_amplitude(self, profile):
        C = singular_constant(P352)
        assert profile.boundary_value == pytest.approx(C, rel=1e-4)

    def test_positive_and_bounded(self, profile):
        assert profile.phi.min() > 0.0
        assert np.isfinite(profile.phi).all()

    def test_finite_on_the_axis(self, profile):
        assert np.isfinite(profile.phi[-1])
        assert profile.psi_grid[-1] == pytest.approx(math.pi / 2.0)

    def test_interior_residual_second_order(self, profile):
        res_coarse = verify_sphere_ode(profile, P352)
        fine = exact_sphere_profile(P352, psi_nodes(CylinderGrid().refined()))
        res_fine = verify_sphere_ode(fine, P352)
        assert res_coarse.interior_max / res_fine.interior_max > 3.0

    def test_boundary_residual(self, profile):
        res = verify_sphere_ode(profile, P352)
        assert res.boundary_rel < 1e-3

    def test_constant_profile_residual_is_mass_term(self):
        from hardyhenon.extension import SphereProfile

        psi = psi_nodes(CylinderGrid(n_psi=33))
        prof = SphereProfile(psi_grid=psi, phi=np.full_like(psi, 2.0), boundary_value=2.0)
        J2 = derive_exponents(P352).J2
        res = verify_sphere_ode(prof, P352)
        assert res.interior_max == pytest.approx(J2 * 2.0, rel=1e-12)


class TestBarrier:
    POINT = (math.cos(0.5), math.sin(0.5))

    def test_interior_second_order(self):
        seq = []
        for k in range(3):
            res = verify_barrier_identity(0.8, 0.3, self.POINT, P352, h=1e-2 * 0.5 ** k)
            seq.append(res.interior)
        assert seq[0] / seq[1] == pytest.approx(4.0, rel=0.1)
        assert seq[1] / seq[2] == pytest.approx(4.0, rel=0.1)

    def test_no_tilt_means_no_flux(self):
        # the weighted derivative is O(t^{2-2s}) with no constant term; what
        # remains in the extrapolated limit is cubic leakage beyond the fit
        res = verify_barrier_identity(0.8, 0.0, self.POINT, P352, t0=0.01)
        assert res.neumann < 1e-7

    def test_parameter_ranges_enforced(self):
        with pytest.raises(ValueError, match="mu"):
            verify_barrier_identity(2.5, 0.3, self.POINT, P352)
        with pytest.raises(ValueError, match="delta"):
            verify_barrier_identity(0.8, 0.7, self.POINT, P352)
