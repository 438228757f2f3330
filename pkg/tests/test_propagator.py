import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfspace_qed import (ConvergenceError, DegenerateError, DomainError, LorentzMedium,
                           boundary_residuals, boundary_value_amplitudes, bulk_propagator_q,
                           contour_integrals, convergence_check, dyson_factor_numeric,
                           free_propagator_q, fresnel_imag_axis, fresnel_right,
                           medium_kz, medium_source_propagator_q, permittivity,
                           reflected_equal_point, reflected_equal_point_imag_axis,
                           reflected_propagator_q, retarded_green_reflected,
                           transmitted_propagator_q, vacuum_kz, xi)
from halfspace_qed.quadrature import integrate_semi_infinite


def _k(q, kz):
    return np.array([q[0], q[1], kz])


@pytest.mark.parametrize("w,q", [(1.0, (0.3, 0.4)), (0.5, (1.2, -0.7)), (-0.8, (0.1, 0.0))])
def test_free_transversality(w, q):
    kz = complex(vacuum_kz(w, math.hypot(*q)))
    up = np.asarray(free_propagator_q(w, q, 0.7))
    dn = np.asarray(free_propagator_q(w, q, -0.7))
    assert np.max(np.abs(_k(q, kz) @ up)) < 1e-14
    assert np.max(np.abs(up @ _k(q, kz))) < 1e-14
    assert np.max(np.abs(_k(q, -kz) @ dn)) < 1e-14


def test_free_small_omega():
    m = np.asarray(free_propagator_q(1e-6, (0.5e-6, 0.0), 0.3))
    assert np.max(np.abs(m)) < 1e-5


def test_free_mirror_symmetry():
    # D(-dz) equals D(dz) with the z axis mirrored
    q, w, dz = (0.3, 0.2), 0.9, 0.6
    P = np.diag([1.0, 1.0, -1.0])
    a = np.asarray(free_propagator_q(w, q, dz))
    b = np.asarray(free_propagator_q(w, q, -dz))
    np.testing.assert_allclose(P @ a @ P, b, atol=1e-15)


def test_free_rejects_equal_points():
    with pytest.raises(DomainError):
        free_propagator_q(1.0, 0.2, 0.0)
    with pytest.raises(DomainError):
        free_propagator_q(0.0, 0.2, 1.0)


def test_bulk_vacuum_is_free(vacuum):
    np.testing.assert_allclose(np.asarray(bulk_propagator_q(vacuum, 0.7, (0.2, 0.1), 0.4)),
                               np.asarray(free_propagator_q(0.7, (0.2, 0.1), 0.4)), rtol=1e-15)


def test_bulk_transversality_and_decay(medium):
    w, q = 0.8, (0.5, 0.0)
    kzd = complex(medium_kz(xi(medium, w), w, 0.5))
    m = np.asarray(bulk_propagator_q(medium, w, q, 0.4))
    assert np.max(np.abs(_k(q, kzd) @ m)) < 1e-14
    mags = [np.max(np.abs(np.asarray(bulk_propagator_q(medium, w, q, d)))) for d in (0.5, 1, 2, 4)]
    assert all(x > y for x, y in zip(mags, mags[1:]))


def test_transmitted_vacuum_is_free(vacuum):
    q, w = (0.4, 0.2), 1.1
    np.testing.assert_allclose(np.asarray(transmitted_propagator_q(vacuum, w, q, -0.3, 0.5)),
                               np.asarray(free_propagator_q(w, q, -0.8)), rtol=1e-14)


def test_transmitted_deep_decay(medium):
    mags = [np.max(np.abs(np.asarray(transmitted_propagator_q(medium, 0.9, 0.3, z, 0.2))))
            for z in (-1, -5, -25)]
    assert mags[0] > mags[1] > mags[2]
    assert mags[2] < 1e-2 * mags[0]


def test_transmitted_domain(medium):
    with pytest.raises(DomainError):
        transmitted_propagator_q(medium, 0.9, 0.3, 0.1, 0.2)


def test_reflected_vacuum_zero(vacuum):
    assert np.all(np.asarray(reflected_propagator_q(vacuum, 0.9, 0.3, 0.2, 0.4)) == 0)


def test_reflected_depends_on_sum(medium):
    a = np.asarray(reflected_propagator_q(medium, 0.9, (0.3, 0.1), 0.2, 0.5))
    b = np.asarray(reflected_propagator_q(medium, 0.9, (0.3, 0.1), 0.6, 0.1))
    np.testing.assert_allclose(a, b, rtol=1e-14)


def test_reflected_perfect_reflector_trend():
    w, q, z = 0.6, 0.3, 0.4
    kz = complex(vacuum_kz(w, q))
    # perfect mirror: r_TE = -1, r_TM = +1
    ref = np.asarray(reflected_propagator_q(LorentzMedium(1.0, 1.0, 0.1), w, q, z, z))
    errs = []
    for wp in (10.0, 100.0, 1000.0):
        m = LorentzMedium(1.0, wp, 0.1)
        fr = fresnel_right(m, w, q)
        errs.append(abs(fr.r_TE + 1) + abs(fr.r_TM - 1))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-2
    assert np.max(np.abs(ref)) > 0 and kz.real > 0


def test_medium_source_transversality(medium):
    w, q = 0.8, (0.4, 0.0)
    x = complex(xi(medium, w))
    kzd = complex(medium_kz(x, w, 0.4))
    kz = complex(vacuum_kz(w, 0.4))
    up = np.asarray(medium_source_propagator_q(medium, w, q, 0.5, -0.3))
    assert np.max(np.abs(_k(q, kz) @ up)) < 1e-13


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(-2.5, 2.5), st.floats(-2.5, 2.5), st.floats(0.05, 2.0),
       st.floats(0.1, 3.0), st.floats(1e-3, 0.9))
def test_boundary_conditions(w, qx, qy, zp, wp, g):
    m = LorentzMedium(1.0, wp, g)
    if abs(math.hypot(qx, qy) - w) < 1e-6:
        return
    for source, z in (("vacuum", zp), ("medium", -zp)):
        res = boundary_residuals(m, w, (qx, qy), z, source=source)
        assert max(res.values()) < 1e-8, (source, res)


def test_boundary_normal_incidence(medium):
    res = boundary_residuals(medium, 0.7, (0.0, 0.0), 0.3)
    assert max(res.values()) < 1e-12


def test_boundary_corrupted_branch_fails(medium):
    res = boundary_residuals(medium, 0.7, (0.4, 0.1), 0.3, corrupt_branch=True)
    assert max(res.values()) > 1e-2


def test_boundary_domain(medium):
    with pytest.raises(DomainError):
        boundary_residuals(medium, 0.7, 0.2, -0.3, source="vacuum")
    with pytest.raises(DomainError):
        boundary_residuals(medium, 0.7, 0.2, 0.3, source="medium")


@pytest.mark.parametrize("lam", ["TE", "TM"])
def test_dyson_factor_example(lam):
    m = LorentzMedium(1.0, 1.0, 0.5)
    fr = fresnel_right(m, 0.7, 0.2)
    r = fr.r_TE if lam == "TE" else fr.r_TM
    num = dyson_factor_numeric(m, 0.7, 0.2, lam)
    assert abs(num - r * r / (1 - r * r)) <= 1e-6 * abs(r * r / (1 - r * r))


def test_dyson_factor_evanescent():
    m = LorentzMedium(1.0, 1.5, 0.4)
    fr = fresnel_right(m, 0.6, 1.2)
    num = dyson_factor_numeric(m, 0.6, 1.2, "TM")
    assert abs(num - fr.r_TM ** 2 / (1 - fr.r_TM ** 2)) <= 1e-6 * abs(fr.r_TM ** 2)


def test_dyson_factor_vanishes_with_coupling():
    # r ~ wP^2 for weak coupling, so the factor scales as wP^4
    vals = [dyson_factor_numeric(LorentzMedium(1.0, wp, 0.5), 0.7, 0.2, "TE") / wp ** 4
            for wp in (1e-1, 3e-2, 1e-2)]
    assert abs(vals[2] - vals[1]) < 2e-3 * abs(vals[2])
    assert abs(vals[1] - vals[0]) < 2e-2 * abs(vals[2])
    assert dyson_factor_numeric(LorentzMedium(1.0, 0.0, 0.5), 0.7, 0.2, "TE") == 0


def test_dyson_factor_errors():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lossless = LorentzMedium(1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        dyson_factor_numeric(lossless, 0.7, 0.2, "TE")
    with pytest.raises(DomainError):
        dyson_factor_numeric(LorentzMedium(), 0.7, 0.2, "XX")
    with pytest.raises(DegenerateError):
        dyson_factor_numeric(LorentzMedium(), 0.7, 0.7, "TE")
    # tiny damping far below the light cone leaves Im(kz + kzd) ~ 0
    with pytest.raises(ConvergenceError):
        dyson_factor_numeric(LorentzMedium(1.0, 1.0, 1e-13), 0.3, 0.1, "TE")


def test_convergence_check(vacuum):
    rep = convergence_check(vacuum, 0.7, 0.3)
    assert rep.convergent and rep.magnitude_TE == 0 and rep.magnitude_TM == 0
    rep = convergence_check(LorentzMedium(1.0, 30.0, 0.3), 0.7, 0.3)
    assert not rep.convergent
    # the closed-form propagator keeps satisfying the interface conditions
    res = boundary_residuals(LorentzMedium(1.0, 30.0, 0.3), 0.7, 0.3, 0.4)
    assert max(res.values()) < 1e-8


def test_contour_integrals_vacuum():
    b, a = contour_integrals(1.0 + 0j, 1.0)
    assert np.all(b == 0) and np.all(a == 0)


def test_equal_point_vacuum_and_zero_frequency(vacuum, medium):
    assert np.all(reflected_equal_point(vacuum, 1.0, 0.5).as_array() == 0)
    assert np.all(reflected_equal_point(medium, 1.0, 0.0).as_array() == 0)
    assert np.all(reflected_equal_point_imag_axis(vacuum, 1.0, 0.5) == 0)


@pytest.mark.parametrize("Z,w", [(1.0, 0.5), (0.3, 1.3), (2.0, 2.2)])
def test_equal_point_even_and_isotropic_in_plane(medium, Z, w):
    d = reflected_equal_point(medium, Z, w)
    e = reflected_equal_point(medium, Z, -w)
    assert d.d_xx == d.d_yy
    np.testing.assert_array_equal(d.as_array(), e.as_array())


@pytest.mark.parametrize("Z,w", [(1.0, 0.5), (2.0, 0.6), (0.4, 1.7)])
def test_green_relation(medium, Z, w):
    d = reflected_equal_point(medium, Z, w).as_array()
    g = retarded_green_reflected(medium, Z, w)
    assert np.max(np.abs(d + w * w * g)) <= 1e-8 * np.max(np.abs(d))


def test_green_vacuum(vacuum):
    assert np.all(retarded_green_reflected(vacuum, 1.0, 0.5) == 0)


def test_boundary_value_solution(medium):
    eps = complex(permittivity(medium, 0.8))
    for q in (0.0, 0.5, 1.5):
        R, T, res = boundary_value_amplitudes(eps, 0.8, q)
        assert res < 1e-12
        kz = complex(vacuum_kz(0.8, q))
        kzd = np.sqrt(eps * 0.64 - q * q)
        kzd = kzd if kzd.imag >= 0 else -kzd
        # transversality of reflected and transmitted waves
        assert np.max(np.abs(np.array([q, 0, kz]) @ R)) < 1e-12
        assert np.max(np.abs(np.array([q, 0, -kzd]) @ T)) < 1e-12
    # the TE element reproduces the Fresnel coefficient
    R, _, _ = boundary_value_amplitudes(eps, 0.8, 0.5)
    fr = fresnel_right(medium, 0.8, 0.5)
    kz = complex(vacuum_kz(0.8, 0.5))
    assert R[1, 1] == pytest.approx(fr.r_TE * 1j / (2 * kz), rel=1e-12)


def test_imag_axis_static_limit(medium):
    # w = 0: image-type integrals with r_TM = (eps0 - 1)/(eps0 + 1)
    Z = 0.7
    r0 = (medium.static_permittivity - 1) / (medium.static_permittivity + 1)
    d = reflected_equal_point_imag_axis(medium, Z, 0.0)
    assert d[2] == pytest.approx(-r0 / (16 * math.pi * Z ** 3), rel=1e-10)
    assert d[0] == pytest.approx(-r0 / (32 * math.pi * Z ** 3), rel=1e-10)
    assert d[0] == d[1]


@pytest.mark.parametrize("w", [0.2, 1.0, 3.0])
def test_imag_axis_direct_q_integral(medium, w):
    # independent path: integrate over q instead of kappa = sqrt(w^2 + q^2)
    Z = 0.5

    def f(q):
        kap = np.sqrt(w * w + q * q)
        r_te, r_tm = fresnel_imag_axis(medium, np.full_like(q, w), q)
        base = q / kap * np.exp(-2 * kap * Z)
        return np.stack([base * (kap ** 2 * r_tm - w * w * r_te),
                         base * 2 * q * q * r_tm], axis=-1)

    ref = -1 / (8 * math.pi) * integrate_semi_infinite(f, 0.0, 1 / (2 * Z)).value
    d = reflected_equal_point_imag_axis(medium, Z, w)
    np.testing.assert_allclose(d, [ref[0], ref[0], ref[1]], rtol=1e-9)
