import numpy as np
import pytest

from emdk.exterior import PForm, coframe, hodge, interior, wedge
from emdk.fields import (
    FieldDecomp,
    SpacetimeField,
    Velocity,
    boost_matrix,
    coulomb_field,
    decompose_F,
    decompose_G,
    exterior_derivative,
    field_from_vectors,
    maxwell_residuals,
    plane_wave,
    polarization_split,
    poynting_s,
    random_lorentz,
    reconstruct_F,
    uniform_field,
)
from emdk.media import ConstitutiveZ, build_isotropic, random_self_adjoint


def rand_velocity(rng, r=1.0):
    return Velocity.from_rapidity(rng.uniform(-r, r, 3))


class TestVelocity:
    def test_rapidity_round_trip(self):
        w = np.array([0.3, -1.2, 0.5])
        V = Velocity.from_rapidity(w)
        assert abs(V.components @ np.diag([-1, 1, 1, 1]) @ V.components + 1) < 1e-12
        np.testing.assert_allclose(V.rapidity(), w, atol=1e-12)

    def test_rejects_non_unit_and_past_pointing(self):
        with pytest.raises(ValueError):
            Velocity([2.0, 0, 0, 0])
        with pytest.raises(ValueError):
            Velocity([-1.0, 0, 0, 0])
        with pytest.raises(ValueError):
            Velocity.from_rapidity([np.inf, 0, 0])

    def test_boost_takes_rest_to_velocity(self):
        w = [0.4, 0.1, -0.7]
        np.testing.assert_allclose(boost_matrix(w) @ [1, 0, 0, 0], Velocity.from_rapidity(w).components,
                                   atol=1e-14)

    def test_random_lorentz_preserves_eta(self):
        eta = np.diag([-1.0, 1, 1, 1])
        L = random_lorentz(np.random.default_rng(0))
        np.testing.assert_allclose(L.T @ eta @ L, eta, atol=1e-12)
        assert L[0, 0] > 0 and np.linalg.det(L) > 0


class TestDecompose:
    def test_basis_examples(self):
        X0 = Velocity.rest()
        dec = decompose_F(PForm.basis(0, 1), X0)
        assert dec.e.allclose(coframe(1)) and dec.b.max_abs() == 0
        dec = decompose_F(PForm.basis(2, 3), X0)
        assert dec.e.max_abs() == 0 and dec.b.allclose(coframe(1))

    def test_reconstruct_examples(self):
        X0 = Velocity.rest()
        F = reconstruct_F(FieldDecomp(coframe(1), PForm.zero(1)), X0)
        assert F.allclose(PForm.basis(0, 1))
        assert reconstruct_F(FieldDecomp(PForm.zero(1), PForm.zero(1)), X0).max_abs() == 0

    def test_round_trip_and_spatiality(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            F, U = PForm(2, rng.uniform(-1, 1, 6)), rand_velocity(rng)
            dec = decompose_F(F, U)
            assert abs(interior(U, dec.e).components[0]) < 1e-12
            assert abs(interior(U, dec.b).components[0]) < 1e-12
            assert (reconstruct_F(dec, U) - F).max_abs() < 1e-12

    def test_rejects_non_spatial(self):
        with pytest.raises(ValueError):
            reconstruct_F(FieldDecomp(coframe(0), PForm.zero(1)), Velocity.rest())
        with pytest.raises(ValueError):
            decompose_F(PForm.basis(0), Velocity.rest())

    def test_vacuum_g_equals_f(self):
        F = PForm(2, np.arange(1.0, 7.0))
        U = Velocity.from_rapidity([0.2, 0.3, 0.1])
        dF, dG = decompose_F(F, U), decompose_G(F, U)
        assert dF.e.allclose(dG.e) and dF.b.allclose(dG.b)

    def test_field_from_vectors(self):
        E, B = np.array([1.0, -2, 3]), np.array([0.5, 0.25, -1])
        dec = decompose_F(field_from_vectors(E, B), Velocity.rest())
        np.testing.assert_allclose(dec.e.components[1:], E)
        np.testing.assert_allclose(dec.b.components[1:], B)


class TestPoynting:
    def test_static_electric_field_has_no_flux(self):
        V = Velocity.rest()
        F = field_from_vectors([1, 2, 3], [0, 0, 0])
        assert poynting_s(F, build_isotropic(3.0, 1.0, V)(F), V).max_abs() == 0

    def test_crossed_fields(self):
        # e = e^1, h = e^2 with d = e and b = h; the d, b terms cancel the e, h terms
        V = Velocity.rest()
        F = field_from_vectors([1, 0, 0], [0, 1, 0])
        assert poynting_s(F, F, V).max_abs() == 0
        flux = hodge(wedge(wedge(V.dual, coframe(1)), coframe(2)))
        np.testing.assert_allclose(flux.components, [0, 0, 0, 1], atol=1e-15)

    def test_spatial_and_bilinear(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            F1, F2, G = (PForm(2, rng.uniform(-1, 1, 6)) for _ in range(3))
            V = rand_velocity(rng)
            s = poynting_s(F1, G, V)
            assert abs(interior(V, s).components[0]) < 1e-12
            lin = poynting_s(2 * F1 + F2, G, V) - (2 * s + poynting_s(F2, G, V))
            assert lin.max_abs() < 1e-12

    def test_star_s_from_drive_combination(self):
        # *s and i_V F ^ *G - i_V G ^ *F agree after contraction with V
        rng = np.random.default_rng(4)
        for _ in range(30):
            F, V = PForm(2, rng.uniform(-1, 1, 6)), rand_velocity(rng)
            G = random_self_adjoint(rng)(F)
            lhs = wedge(interior(V, F), hodge(G)) - wedge(interior(V, G), hodge(F))
            ss = hodge(poynting_s(F, G, V))
            assert (interior(V, lhs) - interior(V, ss)).max_abs() < 1e-12


class TestPolarization:
    def test_vacuum(self):
        F = PForm(2, np.arange(6.0))
        pol = polarization_split(F, F, Velocity.rest())
        assert pol.p.max_abs() == 0 and pol.m.max_abs() == 0 and pol.P.max_abs() == 0

    def test_isotropic_dielectric(self):
        V = Velocity.from_rapidity([0.3, 0, 0.2])
        F = PForm(2, np.random.default_rng(5).uniform(-1, 1, 6))
        pol = polarization_split(F, build_isotropic(2.0, 1.0, V)(F), V)
        assert (pol.p - interior(V, F)).max_abs() < 1e-12
        assert pol.m.max_abs() < 1e-12

    def test_g_equals_f_plus_p(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            F, V = PForm(2, rng.uniform(-1, 1, 6)), rand_velocity(rng)
            G = random_self_adjoint(rng)(F)
            assert (F + polarization_split(F, G, V).P - G).max_abs() < 1e-12


class TestDerivative:
    def test_constant_and_monomial(self):
        F = uniform_field(PForm(2, np.arange(6.0)))
        assert exterior_derivative(F, np.zeros(4)).max_abs() <= 1e-10
        f = SpacetimeField(lambda x: x[1] * coframe(2), 1)
        d = exterior_derivative(f, np.array([0.3, 0.1, -0.2, 0.5]))
        assert (d - PForm.basis(1, 2)).max_abs() <= 1e-10

    def test_plane_wave_solves_vacuum_maxwell(self):
        wave = plane_wave([1, 0, 0], [0, 1, 0], amplitude=1.3, phase=0.2)
        x = np.array([0.1, 0.2, -0.3, 0.4])
        res = maxwell_residuals(wave, lambda f: f, None, x)
        assert res.dF.max_abs() <= 1e-6 and res.source_residual <= 1e-6

    def test_coulomb_off_axis(self):
        q = coulomb_field(1.0)
        res = maxwell_residuals(q, lambda f: f, None, np.array([0.0, 0.7, -0.4, 0.9]))
        assert res.dF.max_abs() <= 1e-6 and res.source_residual <= 1e-6

    def test_broken_field_reports_residual(self):
        f = SpacetimeField(lambda x: x[1] * PForm.basis(2, 3), 2)
        res = maxwell_residuals(f, lambda g: g, None, np.zeros(4))
        assert res.dF.max_abs() > 0.5

    def test_dd_is_small(self):
        # potential of a plane wave; d(dA) vanishes up to stencil error
        pol = PForm(1, [0.0, 0.0, 1.0, 1.0])
        A = SpacetimeField(lambda y: np.sin(y[0] - y[1] + 0.3 * y[2]) * pol, 1)
        dA = SpacetimeField(lambda y: exterior_derivative(A, y), 2)
        x = np.array([0.3, 0.2, 0.1, -0.1])
        assert exterior_derivative(dA, x).max_abs() <= 1e-4
        assert exterior_derivative(A, x).max_abs() > 0.1

    def test_non_finite_sample_raises(self):
        f = SpacetimeField(lambda x: PForm(1, [np.nan, 0, 0, 0]), 1)
        with pytest.raises(ValueError):
            exterior_derivative(f, np.zeros(4))

    def test_bad_step(self):
        with pytest.raises(ValueError):
            exterior_derivative(uniform_field(PForm.zero(1)), np.zeros(4), h=0.0)


def test_constant_z_constant_field_no_residual():
    Z = ConstitutiveZ(np.diag(np.arange(1.0, 7.0)))
    res = maxwell_residuals(uniform_field(PForm(2, np.ones(6))), Z, None, np.zeros(4))
    assert res.dF.max_abs() == 0 and res.source_residual == 0
