import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from halfspace_qed import (refractive_index, C4_VARIANTS, AtomModel, DegenerateTransitionWarning, DomainError,
                           LorentzMedium, ZeroRateError, c4_coefficients, c5_coefficients,
                           excited_residue, excited_residue_nonretarded, excited_residue_retarded,
                           ground_shift_nonretarded, ground_shift_retarded_asymptotic,
                           nonresidue_shift, normalized_lifetime, permittivity,
                           rate_change_nonretarded, rate_change_retarded,
                           reflected_equal_point_imag_axis, reflected_propagator_q,
                           total_shift_and_rate, two_level)

PRE = -3 / (64 * math.pi ** 2)


def lossless(wT, wP):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return LorentzMedium(wT, wP, 0.0)


def nondispersive(n):
    # resonance far above every frequency that matters: eps ~ n^2
    return lossless(100.0, 100.0 * math.sqrt(n * n - 1))


def test_vacuum_gives_zero(vacuum):
    atom = two_level(1.0, 0.6, 0.4)
    assert nonresidue_shift(vacuum, atom, "g", 0.5) == 0
    assert ground_shift_nonretarded(vacuum, atom, 0.5) == 0
    assert ground_shift_retarded_asymptotic(vacuum, atom, 50.0) == 0
    assert excited_residue(vacuum, atom, "e", 0.5) == 0
    assert excited_residue_nonretarded(vacuum, atom, "e", 0.5) == 0
    assert excited_residue_retarded(vacuum, atom, "e", 0.5) == 0
    assert normalized_lifetime(vacuum, atom, "e", "g", 0.5) == 0


def test_distance_validation(medium):
    with pytest.raises(DomainError):
        nonresidue_shift(medium, two_level(), "g", 0.0)
    with pytest.raises(DomainError):
        excited_residue(medium, two_level(), "e", -1.0)


def test_nonresidue_against_imaginary_axis_propagator(medium):
    # independent route: frequency integral of the imaginary-axis propagator
    atom = two_level(1.0, 0.7, 0.4)
    Z = 0.8

    def f(w):
        d = reflected_equal_point_imag_axis(medium, Z, w)
        return (d[0] * 0.7 + d[2] * 0.4) / (w * w + 1.0)

    ref = integrate.quad(f, 0, np.inf, epsrel=1e-11, limit=200)[0] / math.pi
    assert nonresidue_shift(medium, atom, "g", Z) == pytest.approx(ref, rel=1e-8)


def test_residue_against_q_integral(medium):
    # the residue equals sum_k D_kk(Z, |w|) mu_k^2, here from the q-space block
    W, Z = 1.2, 0.8
    atom = two_level(W, 0.7, 0.4)

    def avg(q):
        M = np.asarray(reflected_propagator_q(medium, W, q, Z, Z))
        return np.array([0.5 * (M[0, 0] + M[1, 1]), M[2, 2]])

    p, _ = integrate.quad_vec(lambda t: avg(W * math.sin(t)) * W * W * math.sin(t) * math.cos(t),
                              0, math.pi / 2, epsrel=1e-12)
    e, _ = integrate.quad_vec(lambda u: avg(W * math.cosh(u)) * W * W * math.cosh(u) * math.sinh(u),
                              1e-300, math.asinh(40 / (2 * W * Z) + 1), epsrel=1e-12)
    D = (p + e) / (2 * math.pi)
    ref = D[0] * 0.7 + D[1] * 0.4
    assert abs(excited_residue(medium, atom, "e", Z) - ref) <= 1e-10 * abs(ref)


def test_ground_state_residue_zero(medium):
    assert excited_residue(medium, two_level(), "g", 0.3) == 0
    b = total_shift_and_rate(medium, two_level(), "g", 0.3)
    assert b.rate_change == 0 and b.residue == 0


def test_breakdown_consistency(medium):
    atom = AtomModel((("g", 0.0), ("e", 1.0), ("f", 2.2)),
                     {("g", "e"): (1.0, 0.3), ("e", "f"): (0.4, 0.9)})
    b = total_shift_and_rate(medium, atom, "e", 0.4)
    assert b.total_shift == b.nonresidue + b.residue.real
    assert b.rate_change == -2 * b.residue.imag
    assert [r["partner"] for r in b.per_transition] == ["g", "f"]
    assert sum(r["nonresidue"] for r in b.per_transition) == pytest.approx(b.nonresidue, rel=1e-15)
    assert b.per_transition[1]["residue"] == 0


def test_degenerate_transition_skipped(medium):
    atom = AtomModel((("g", 0.0), ("g2", 0.0), ("e", 1.0)),
                     {("g", "g2"): (1.0, 1.0), ("g", "e"): (1.0, 0.0)})
    with pytest.warns(DegenerateTransitionWarning):
        s = nonresidue_shift(medium, atom, "g", 0.5)
    assert s == pytest.approx(nonresidue_shift(medium, two_level(), "g", 0.5), rel=1e-15)


def test_perfect_mirror_nonretarded():
    m = LorentzMedium(1.0, 1e3, 0.1)
    atom = two_level(1.0, 0.6, 0.4)
    Z = 1e-4
    expected = -(0.6 + 2 * 0.4) / (64 * math.pi * Z ** 3)
    assert ground_shift_nonretarded(m, atom, Z) == pytest.approx(expected, rel=1e-2)


def test_fig3_plateau():
    # lossless non-dispersive n(0) = sqrt(2): Delta E Z^4 w tends to -3 c4/(64 pi^2)
    m = lossless(1.0, 1.0)
    atom = two_level(1.0, 1.0, 0.0)
    plateau = PRE * c4_coefficients(math.sqrt(2))[0]
    vals = [nonresidue_shift(m, atom, "g", Z) * Z ** 4 for Z in (25.0, 50.0, 100.0)]
    errs = [abs(v / plateau - 1) for v in vals]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_large_index_limit():
    par, perp = c4_coefficients(1e3)
    assert par == pytest.approx(4 / 3, rel=2e-3)
    assert perp == pytest.approx(4 / 3, rel=2e-3)
    m = nondispersive(1e3)
    Z = 400.0
    full = nonresidue_shift(m, two_level(1.0, 1.0, 0.0), "g", Z) * Z ** 4 / PRE
    assert full == pytest.approx(par, rel=1e-3)


@pytest.mark.parametrize("n", [1.2, math.sqrt(2), 2.0, 3.5])
def test_c4_against_full_integral(n):
    m = nondispersive(n)
    Z = 400.0
    par = nonresidue_shift(m, two_level(1.0, 1.0, 0.0), "g", Z) * Z ** 4 / PRE
    perp = nonresidue_shift(m, two_level(1.0, 0.0, 1.0), "g", Z) * Z ** 4 / PRE
    c = c4_coefficients(n)
    assert par == pytest.approx(c[0], rel=1e-3)
    assert perp == pytest.approx(c[1], rel=1e-3)


def test_c4_variants_differ():
    vals = {v: c4_coefficients(2.0, v) for v in C4_VARIANTS}
    assert vals["consistent"][1] == vals["printed"][1]
    assert vals["printed"][0] != vals["consistent"][0]
    with pytest.raises(DomainError):
        c4_coefficients(2.0, "other")
    with pytest.raises(DomainError):
        c4_coefficients(1.0)
    with pytest.raises(DomainError):
        c5_coefficients(0.9)


def _c5_oracle(n):
    # (n^2 - 1) int_0^1 y d/d(eps)[bracket] dy at eps = n^2, by finite differences
    def bracket(eps, y):
        s = np.sqrt(y * y * (eps - 1) + 1)
        r_te, r_tm = (1 - s) / (1 + s), (eps - s) / (eps + s)
        return np.array([r_tm - y * y * r_te, 2 * (1 - y * y) * r_tm])

    h = 1e-5 * n * n
    f = lambda y: y * (bracket(n * n + h, y) - bracket(n * n - h, y)) / (2 * h)  # noqa: E731
    val, _ = integrate.quad_vec(f, 0, 1, epsrel=1e-10)
    return (n * n - 1) * val


@pytest.mark.parametrize("n", [1.1, 1.5, 2.0, 4.0, 9.0])
def test_c5_closed_form_against_oracle(n):
    np.testing.assert_allclose(c5_coefficients(n), _c5_oracle(n), rtol=1e-6)


def test_c5_reduces_retarded_residual():
    m = LorentzMedium(1.0, 1.0, 0.1)
    atom = two_level(1.0, 1.0, 0.0)
    Z = 40.0
    full = nonresidue_shift(m, atom, "g", Z)
    r4 = abs(full - ground_shift_retarded_asymptotic(m, atom, Z, include_c5=False))
    r5 = abs(full - ground_shift_retarded_asymptotic(m, atom, Z))
    assert r5 < 0.5 * r4


def test_lossless_asymptote_is_pure_c4():
    m = lossless(1.0, 1.0)
    atom = two_level(1.0, 1.0, 0.0)
    a = ground_shift_retarded_asymptotic(m, atom, 30.0)
    assert a == PRE * c4_coefficients(math.sqrt(2))[0] / 30.0 ** 4


def test_absorption_reduces_retarded_magnitude():
    atom = two_level(1.0, 1.0, 0.0)
    vals = [abs(nonresidue_shift(LorentzMedium(1.0, 1.0, g), atom, "g", 25.0))
            for g in (0.0, 0.05, 0.1, 0.2, 0.4)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_retarded_residue_parallel_is_one_over_z(medium):
    atom = two_level(1.0, 1.0, 0.0)
    vals = [abs(excited_residue_retarded(medium, atom, "e", Z)) * Z for Z in (10.0, 20.0, 40.0)]
    np.testing.assert_allclose(vals, vals[0], rtol=1e-14)


def test_envelope_residual_window(medium):
    # residual of the far-zone form falls off faster than Z^-2 over 2|w|Z in [30, 100]
    W = 1.2
    atom = two_level(W, 0.7, 0.4)
    Zs = np.array([30.0, 50.0, 70.0, 100.0]) / (2 * W)
    res = [abs(excited_residue(medium, atom, "e", Z) - excited_residue_retarded(medium, atom, "e", Z))
           for Z in Zs]
    slope = np.polyfit(np.log(Zs), np.log(res), 1)[0]
    assert slope < -2.0


def test_lossless_retarded_rate_limit():
    # gamma -> 0: the full rate approaches the far-zone form with real n
    m = lossless(2.0, 1.0)
    atom = two_level(1.0, 1.0, 0.0)
    Z = 25.0
    full = -2 * excited_residue(m, atom, "e", Z).imag
    closed = rate_change_retarded(m, atom, "e", Z)
    envelope = 2 * abs(excited_residue_retarded(m, atom, "e", Z))
    assert abs(full - closed) < 0.05 * envelope


def test_lossless_nonretarded_rate_zero():
    m = lossless(1.0, 1.0)
    assert rate_change_nonretarded(m, two_level(0.5, 1.0, 1.0), "e", 1e-3) == 0.0
    assert excited_residue_nonretarded(m, two_level(0.5), "e", 1e-3).imag == 0.0


def test_nonretarded_rate_formula(medium):
    atom = two_level(1.3, 0.5, 0.5)
    eps = permittivity(medium, 1.3)
    Z = 0.01
    expected = eps.imag / abs(eps + 1) ** 2 * 1.5 / (8 * math.pi * Z ** 3)
    assert rate_change_nonretarded(medium, atom, "e", Z) == pytest.approx(expected, rel=1e-14)


def test_normalized_lifetime_errors(medium):
    with pytest.raises(DomainError):
        normalized_lifetime(medium, two_level(), "g", "e", 0.5)
    with pytest.raises(ZeroRateError):
        normalized_lifetime(medium, two_level(1.0, 0.0, 0.0), "e", "g", 0.5)


def test_normalized_lifetime_matches_rate(medium):
    atom = two_level(1.1, 1.0, 0.0)
    tau = normalized_lifetime(medium, atom, "e", "g", 0.3)
    b = total_shift_and_rate(medium, atom, "e", 0.3)
    assert tau == pytest.approx(b.rate_change / (1.1 ** 3 / (3 * math.pi)), rel=1e-13)


def test_excited_state_signed_weight(medium):
    # the nonresidue part of the upper level is the negative of the lower one
    atom = two_level(1.0, 0.8, 0.5)
    assert nonresidue_shift(medium, atom, "e", 0.6) == pytest.approx(
        -nonresidue_shift(medium, atom, "g", 0.6), rel=1e-14)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_linear_in_dipole_squares(s, par, perp):
    m = LorentzMedium(1.0, 1.0, 0.1)
    base = total_shift_and_rate(m, two_level(1.3, par, perp), "e", 0.4)
    scaled = total_shift_and_rate(m, two_level(1.3, par, perp).scaled(s), "e", 0.4)
    assert scaled.nonresidue == pytest.approx(s * base.nonresidue, rel=1e-13, abs=1e-300)
    assert abs(scaled.residue - s * base.residue) <= 1e-13 * abs(s * base.residue)


def test_determinism(medium):
    atom = two_level(1.3, 0.6, 0.2)
    runs = [total_shift_and_rate(medium, atom, "e", 0.7) for _ in range(3)]
    assert len({(r.nonresidue, r.residue) for r in runs}) == 1


def test_retarded_residue_error_coefficients():
    # endpoint expansion at kz = |w|: perpendicular error is |1 + 4/n| / a
    m = LorentzMedium(1.0, 1.0, 0.1)
    n = complex(refractive_index(m, 1.0))
    for a in (100.0, 200.0):
        atom = two_level(1.0, 0.0, 1.0)
        full = excited_residue(m, atom, "e", a / 2)
        ret = excited_residue_retarded(m, atom, "e", a / 2)
        assert abs(full - ret) / abs(ret) * a == pytest.approx(abs(1 + 4 / n), rel=2e-2)
    # parallel: O(1/a) without the extra term, O(1/a^2) with it
    atom = two_level(1.0, 1.0, 0.0)
    for a in (100.0, 200.0):
        full = excited_residue(m, atom, "e", a / 2)
        plain = excited_residue_retarded(m, atom, "e", a / 2)
        fixed = excited_residue_retarded(m, atom, "e", a / 2, parallel_correction=True)
        assert abs(full - plain) / abs(plain) * a == pytest.approx(1.0, rel=3e-2)
        assert abs(full - fixed) / abs(fixed) * a * a < 3.0
