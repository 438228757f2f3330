"""Photon propagator of the vacuum/dielectric half-space.

The propagator is handled in the mixed ``(q_par, z)`` representation, where
it is a 3x3 matrix per transverse wave vector.  Besides the closed forms,
this module carries three independent checks of them: the numerical Dyson
factor, interface boundary-condition residuals, and the reflected retarded
Green tensor obtained from a plane-wave boundary-value solve.

Conventions: vacuum for ``z > 0``, medium for ``z < 0``; hbar = c = eps0 = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate as sp_integrate

from .errors import ConvergenceError, DegenerateError, DomainError
from .medium import LorentzMedium, permittivity, xi
from .optics import (fresnel_imag_axis, fresnel_left, fresnel_right, medium_kz,
                     polarization_vectors, upper_sqrt, vacuum_kz)
from .quadrature import (QuadratureConfig, DEFAULT_CONFIG,
                         integrate_oscillatory, integrate_semi_infinite)

__all__ = [
    "PropagatorMatrix",
    "ReflectedPropagatorDiag",
    "free_propagator_q",
    "bulk_propagator_q",
    "transmitted_propagator_q",
    "reflected_propagator_q",
    "medium_source_propagator_q",
    "contour_integrals",
    "reflected_equal_point",
    "reflected_equal_point_imag_axis",
    "dyson_factor_numeric",
    "convergence_check",
    "boundary_residuals",
    "retarded_green_reflected",
    "boundary_value_amplitudes",
]

POLARIZATIONS = ("TE", "TM")


@dataclass(frozen=True)
class PropagatorMatrix:
    """A 3x3 propagator block at fixed ``(q_par, z, z', omega)``."""

    matrix: np.ndarray
    kind: str
    q_vec: tuple
    z: float
    zprime: float
    omega: float

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class ReflectedPropagatorDiag:
    """Diagonal of the reflected propagator at the atom position."""

    d_xx: complex
    d_yy: complex
    d_zz: complex
    z_atom: float
    omega: float

    def as_array(self) -> np.ndarray:
        return np.array([self.d_xx, self.d_yy, self.d_zz])


class ConvergenceReport(NamedTuple):
    convergent: bool
    magnitude_TE: float
    magnitude_TM: float


def _qvec(q_par):
    q = np.atleast_1d(np.asarray(q_par, dtype=float))
    if q.size == 1:
        q = np.array([q[0], 0.0])
    if q.shape != (2,):
        raise DomainError("q_par must be a scalar or a 2-vector")
    if q[0] < 0 and q[1] == 0:
        raise DomainError("scalar q_par must be non-negative")
    return q


def _dyad(u, v):
    return np.outer(u, v)


def _pol(q, kz, omega, xi_value=1.0):
    pv = polarization_vectors(q, kz, omega, xi_value, azimuth=0.0)
    return {"TE": pv.e_TE, "TM": pv.e_TM}


def _free_parts(omega, q, dz):
    kz = complex(vacuum_kz(omega, np.hypot(*q)))
    s = 1.0 if dz > 0 else -1.0
    e = _pol(q, s * kz, omega)
    pref = -1j * omega ** 2 / (2 * kz) * np.exp(1j * kz * abs(dz))
    return {lam: pref * _dyad(e[lam], e[lam]) for lam in POLARIZATIONS}


def _bulk_parts(medium, omega, q, dz):
    x = complex(xi(medium, omega))
    kzd = complex(medium_kz(x, omega, np.hypot(*q)))
    s = 1.0 if dz > 0 else -1.0
    e = _pol(q, s * kzd, omega, x)
    pref = -1j * x ** 2 * omega ** 2 / (2 * kzd) * np.exp(1j * kzd * abs(dz))
    return {lam: pref * _dyad(e[lam], e[lam]) for lam in POLARIZATIONS}


def _check_omega(omega):
    if omega == 0:
        raise DomainError("the (q, z) propagator blocks need omega != 0")


def free_propagator_q(omega: float, q_par, z_minus_zprime: float) -> PropagatorMatrix:
    """Free-space propagator block, valid for ``z != z'`` (contact terms excluded)."""
    _check_omega(omega)
    if z_minus_zprime == 0:
        raise DomainError("free propagator block is undefined at z = z'")
    q = _qvec(q_par)
    parts = _free_parts(omega, q, z_minus_zprime)
    return PropagatorMatrix(sum(parts.values()), "free", tuple(q), z_minus_zprime, 0.0, omega)


def bulk_propagator_q(medium: LorentzMedium, omega: float, q_par, z_minus_zprime: float) -> PropagatorMatrix:
    """Propagator block of the unbounded medium (``xi**2`` prefactor, medium wave number)."""
    _check_omega(omega)
    if z_minus_zprime == 0:
        raise DomainError("bulk propagator block is undefined at z = z'")
    q = _qvec(q_par)
    parts = _bulk_parts(medium, omega, q, z_minus_zprime)
    return PropagatorMatrix(sum(parts.values()), "bulk", tuple(q), z_minus_zprime, 0.0, omega)


def _transmitted_parts(medium, omega, q, z, zprime, branch=1.0):
    qa = np.hypot(*q)
    x = complex(xi(medium, omega))
    kz = complex(vacuum_kz(omega, qa))
    kzd = branch * complex(medium_kz(x, omega, qa))
    fr = fresnel_right(medium, omega, qa)
    t = {"TE": fr.t_TE, "TM": fr.t_TM}
    em = _pol(q, -kzd, omega, x)
    ev = _pol(q, -kz, omega)
    pref = -1j * omega ** 2 / (2 * kz) * np.exp(-1j * kzd * z + 1j * kz * zprime)
    return {lam: pref * x * t[lam] * _dyad(em[lam], ev[lam]) for lam in POLARIZATIONS}, kzd


def transmitted_propagator_q(medium: LorentzMedium, omega: float, q_par, z: float, zprime: float) -> PropagatorMatrix:
    """Block for an observation point in the medium and a source in vacuum (``z < 0 < z'``).

    ``z = 0`` is accepted and gives the interface limit from the medium side.
    """
    _check_omega(omega)
    if not (z <= 0 < zprime):
        raise DomainError("transmitted block needs z <= 0 < z'")
    q = _qvec(q_par)
    parts, _ = _transmitted_parts(medium, omega, q, z, zprime)
    return PropagatorMatrix(sum(parts.values()), "transmitted", tuple(q), z, zprime, omega)


def _reflected_parts(medium, omega, q, z, zprime):
    qa = np.hypot(*q)
    kz = complex(vacuum_kz(omega, qa))
    fr = fresnel_right(medium, omega, qa)
    r = {"TE": fr.r_TE, "TM": fr.r_TM}
    ep = _pol(q, kz, omega)
    em = _pol(q, -kz, omega)
    pref = -1j * omega ** 2 / (2 * kz) * np.exp(1j * kz * (z + zprime))
    return {lam: pref * r[lam] * _dyad(ep[lam], em[lam]) for lam in POLARIZATIONS}


def reflected_propagator_q(medium: LorentzMedium, omega: float, q_par, z: float, zprime: float) -> PropagatorMatrix:
    """Reflected part of the block for ``z, z' >= 0`` (depends on ``z + z'`` only)."""
    _check_omega(omega)
    if z < 0 or zprime < 0:
        raise DomainError("reflected block needs z, z' >= 0")
    q = _qvec(q_par)
    parts = _reflected_parts(medium, omega, q, z, zprime)
    return PropagatorMatrix(sum(parts.values()), "reflected", tuple(q), z, zprime, omega)


def _medium_source_parts(medium, omega, q, z, zprime, upper=None):
    qa = np.hypot(*q)
    x = complex(xi(medium, omega))
    kz = complex(vacuum_kz(omega, qa))
    kzd = complex(medium_kz(x, omega, qa))
    fl = fresnel_left(medium, omega, qa)
    pref = -1j * x * omega ** 2 / (2 * kzd)
    em_up = _pol(q, kzd, omega, x)
    out = {}
    if upper is None:
        upper = z > 0
    if not upper:
        em_dn = _pol(q, -kzd, omega, x)
        r = {"TE": fl.r_TE, "TM": fl.r_TM}
        ph = np.exp(-1j * kzd * (z + zprime))
        bulk = _bulk_parts(medium, omega, q, z - zprime) if z != zprime else None
        for lam in POLARIZATIONS:
            m = pref * x * r[lam] * ph * _dyad(em_dn[lam], em_up[lam])
            out[lam] = m + (bulk[lam] if bulk is not None else 0)
    else:
        ev = _pol(q, kz, omega)
        t = {"TE": fl.t_TE, "TM": fl.t_TM}
        ph = np.exp(1j * kz * z - 1j * kzd * zprime)
        for lam in POLARIZATIONS:
            out[lam] = pref * t[lam] * ph * _dyad(ev[lam], em_up[lam])
    return out, kz, kzd


def medium_source_propagator_q(medium: LorentzMedium, omega: float, q_par, z: float, zprime: float) -> PropagatorMatrix:
    """Full block for a source inside the medium (``z' < 0``), for any ``z != z'``.

    Only used to test interface conditions and transversality; no observable
    needs it.
    """
    _check_omega(omega)
    if not zprime < 0 or z == zprime:
        raise DomainError("medium-source block needs z' < 0 and z != z'")
    q = _qvec(q_par)
    parts, _, _ = _medium_source_parts(medium, omega, q, z, zprime)
    return PropagatorMatrix(sum(parts.values()), "medium_source", tuple(q), z, zprime, omega)


# ---------------------------------------------------------------------------
# equal-point reflected propagator

def _kz_reflection(eps, k):
    root = upper_sqrt(eps - 1.0 + k * k)
    r_te = (k - root) / (k + root)
    r_tm = (eps * k - root) / (eps * k + root)
    return r_te, r_tm


def _contour_points(eps):
    """Break points of the scaled integrands on [0, 1] and on the imaginary axis."""
    real_pts, imag_pts = [], []
    em1 = complex(eps) - 1.0
    # branch point of sqrt(eps - 1 + k^2)
    b = upper_sqrt(-em1)
    if 0 < b.real < 1:
        real_pts.append(b.real)
    b = upper_sqrt(em1)
    if b.real > 0:
        imag_pts.append(b.real)
    # surface-polariton pole of r_TM, on the imaginary axis when Re eps < -1
    if abs(complex(eps) + 1) > 0:
        p = upper_sqrt(-1.0 / (complex(eps) + 1.0))
        if abs(p.imag) < 0.5 * abs(p.real):
            imag_pts.append(p.real)
    return real_pts, imag_pts


def contour_integrals(eps: complex, a: float, config: QuadratureConfig | None = None):
    """Scaled contour integrals shared by the real-frequency propagator and the residue term.

    With ``k = kz/|omega|`` and ``a = 2 |omega| Z`` returns ``(B, A)``::

        B = int_0^1   dk   exp(i a k)    F(k)
        A = int_0^inf dkap exp(-a kap)   F(i kap)

    where ``F = (r_TE - k^2 r_TM, 2 (1 - k^2) r_TM)`` with the reflection
    coefficients taken at permittivity ``eps``.  Both are length-2 complex
    arrays (parallel-type, perpendicular-type).
    """
    config = config or DEFAULT_CONFIG
    if not a > 0:
        raise DomainError("contour_integrals needs a = 2|omega|Z > 0")
    eps = complex(eps)
    if eps == 1.0:
        return np.zeros(2, complex), np.zeros(2, complex)

    def f_real(k):
        k = k.astype(complex)
        r_te, r_tm = _kz_reflection(eps, k)
        return np.stack([r_te - k * k * r_tm, 2.0 * (1.0 - k * k) * r_tm], axis=-1)

    def f_imag(kap):
        k = 1j * kap
        r_te, r_tm = _kz_reflection(eps, k)
        damp = np.exp(-a * kap)[:, None]
        return damp * np.stack([r_te + kap * kap * r_tm, 2.0 * (1.0 + kap * kap) * r_tm], axis=-1)

    real_pts, imag_pts = _contour_points(eps)
    B = integrate_oscillatory(f_real, a, 0.0, 1.0, config, points=real_pts).value
    A = integrate_semi_infinite(f_imag, 0.0, 1.0 / a, config, points=imag_pts).value
    return np.asarray(B), np.asarray(A)


def _lossy(medium):
    return medium.nudged()


def reflected_equal_point(medium: LorentzMedium, z_atom: float, omega: float,
                          quad: QuadratureConfig | None = None) -> ReflectedPropagatorDiag:
    """Reflected propagator at coincident points ``(0, 0, Z)``, real frequency.

    The transverse wave-number integral is split at the light cone.  On the
    propagating side the variable ``kz`` itself is used (``q dq / kz = -dkz``),
    which removes the ``1/kz`` endpoint singularity and makes the phase
    ``exp(2 i kz Z)`` linear, so the Filon rule applies.  On the evanescent side
    ``kz = i kappa`` gives a real exponential damping.
    """
    if not z_atom > 0:
        raise DomainError("z_atom must be positive")
    w = abs(float(omega))
    if w == 0.0 or medium.is_vacuum:
        return ReflectedPropagatorDiag(0j, 0j, 0j, z_atom, omega)
    eps = complex(xi(_lossy(medium), w))
    B, A = contour_integrals(eps, 2.0 * w * z_atom, quad)
    d = -1j / (8 * np.pi) * w ** 3 * (B - 1j * A)
    return ReflectedPropagatorDiag(complex(d[0]), complex(d[0]), complex(d[1]), z_atom, omega)


def reflected_equal_point_imag_axis(medium: LorentzMedium, z_atom: float, w: float,
                                    quad: QuadratureConfig | None = None) -> np.ndarray:
    """Reflected equal-point diagonal ``(xx, yy, zz)`` at imaginary frequency ``i w``.

    Expressed through ``kappa = sqrt(q^2 + w^2)`` (``q dq / kappa = dkappa``),
    the integrand is real and decays like ``exp(-2 kappa Z)``.
    """
    quad = quad or DEFAULT_CONFIG
    if not z_atom > 0:
        raise DomainError("z_atom must be positive")
    if w < 0:
        raise DomainError("w must be >= 0")
    if medium.is_vacuum:
        return np.zeros(3)
    w = float(w)

    def f(kap):
        q = np.sqrt(np.maximum(kap * kap - w * w, 0.0))
        r_te, r_tm = fresnel_imag_axis(medium, np.full_like(kap, w), q)
        damp = np.exp(-2.0 * z_atom * (kap - w))
        return damp[:, None] * np.stack([kap * kap * r_tm - w * w * r_te,
                                         2.0 * (kap * kap - w * w) * r_tm], axis=-1)

    res = integrate_semi_infinite(f, w, 1.0 / (2.0 * z_atom), quad)
    d = -np.exp(-2.0 * z_atom * w) / (8 * np.pi) * res.value
    return np.array([d[0], d[0], d[1]])


# ---------------------------------------------------------------------------
# verification paths

def convergence_check(medium: LorentzMedium, omega: float, q_par: float) -> ConvergenceReport:
    """Magnitudes ``|r^2 / (1 - r^2)|`` of the Dyson geometric series and whether both are < 1."""
    fr = fresnel_right(medium, omega, q_par)
    m = [abs(r * r / d) if (d := 1 - r * r) != 0 else math.inf for r in (fr.r_TE, fr.r_TM)]
    return ConvergenceReport(bool(m[0] < 1 and m[1] < 1), float(m[0]), float(m[1]))


def dyson_factor_numeric(medium: LorentzMedium, omega: float, q_par: float, polarization: str,
                         quad: QuadratureConfig | None = None, *, z: float = -0.3,
                         zprime: float = 0.2) -> complex:
    """Numerically evaluate the double z-integral of the Dyson iteration.

    Computes ``int_0^inf dz1 int_-inf^0 dz2 D_eps(z - z1) D_0(z1 - z2) D_eps(z2 - z')``
    by iterated quadrature, projects the resulting matrix onto the bulk block
    ``D_eps,lambda(z - z')`` and multiplies by ``K^2`` with ``K = 1/xi - 1``.
    The closed form predicts ``r_lambda^2 / (1 - r_lambda^2)``.

    Both integrals are truncated at the depth where the integrand has decayed
    by ``1e-12``; this needs ``gamma > 0``.
    """
    quad = quad or DEFAULT_CONFIG
    if polarization not in POLARIZATIONS:
        raise DomainError(f"polarization must be one of {POLARIZATIONS}")
    if not medium.gamma > 0:
        raise DomainError("the numeric Dyson factor needs gamma > 0")
    if not (z < 0 < zprime):
        raise DomainError("need z < 0 < z'")
    _check_omega(omega)
    if medium.is_vacuum:
        return 0j
    q = _qvec(q_par)
    qa = np.hypot(*q)
    x = complex(xi(medium, omega))
    kz = complex(vacuum_kz(omega, qa))
    kzd = complex(medium_kz(x, omega, qa))
    if kz == 0:
        raise DegenerateError("the Dyson factor is singular on the light cone q_par = |omega|")
    ksum = kz + kzd
    if not ksum.imag > 1e-8 * abs(ksum):
        raise ConvergenceError(f"Im(kz + kzd) = {ksum.imag:.3g} is too small for truncation")
    depth = math.log(1e12) / ksum.imag

    # constant amplitude matrices; the z dependence is carried by phases
    e_dn = _pol(q, -kzd, omega, x)
    e_up = _pol(q, kz, omega)
    amp_eps = sum(_dyad(e_dn[l], e_dn[l]) for l in POLARIZATIONS) * (-1j * x ** 2 * omega ** 2 / (2 * kzd))
    amp_0 = sum(_dyad(e_up[l], e_up[l]) for l in POLARIZATIONS) * (-1j * omega ** 2 / (2 * kz))
    left = amp_eps @ amp_0  # D_eps(z - z1) D_0(z1 - z2), z - z1 < 0, z1 - z2 > 0
    total = left @ amp_eps
    inner_cfg = quad.tightened()

    def inner(z1):
        # phases: exp(-i kzd (z - z1)) exp(i kz (z1 - z2)) exp(-i kzd (z2 - z'))
        def f2(z2):
            ph = np.exp(-1j * ksum * z2[:, None]) * np.exp(1j * ksum * z1[None, :])
            # strip the oscillation handled by the Filon rule
            return ph * np.exp(1j * ksum.real * z2[:, None])
        res = integrate_oscillatory(f2, -ksum.real, -depth, 0.0, inner_cfg)
        return res.value * np.exp(-1j * ksum.real * z1)

    res = integrate_oscillatory(inner, ksum.real, 0.0, depth, quad)
    scalar = res.value * np.exp(-1j * kzd * z + 1j * kzd * zprime)
    integral = scalar * total

    lam_parts = _bulk_parts(medium, omega, q, z - zprime)
    target = lam_parts[polarization]
    K = 1.0 / x - 1.0
    coeff = np.vdot(target, integral) / np.vdot(target, target)
    return complex(K * K * coeff)


def _interface_values(medium, omega, q, zprime, source, branch):
    """Rows of the propagator and its z derivative just below and above z = 0."""
    qa = np.hypot(*q)
    x = complex(xi(medium, omega))
    kz = complex(vacuum_kz(omega, qa))
    if source == "vacuum":
        tparts, kzd = _transmitted_parts(medium, omega, q, 0.0, zprime, branch)
        lower = sum(tparts.values())
        dlower = -1j * kzd * lower
        free = sum(_free_parts(omega, q, -zprime).values())
        refl = sum(_reflected_parts(medium, omega, q, 0.0, zprime).values())
        upper = free + refl
        dupper = -1j * kz * free + 1j * kz * refl
    else:
        parts, kz_, kzd = _medium_source_parts(medium, omega, q, 0.0, zprime)
        kzd = branch * kzd
        bulk = sum(_bulk_parts(medium, omega, q, -zprime).values())
        lower = sum(parts.values())
        refl = lower - bulk
        dlower = 1j * kzd * bulk - 1j * kzd * refl
        up, _, _ = _medium_source_parts(medium, omega, q, 0.0, zprime, upper=True)
        upper = sum(up.values())
        dupper = 1j * kz * upper
    return x, lower, dlower, upper, dupper


def _rel(a, b):
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def boundary_residuals(medium: LorentzMedium, omega: float, q_par, zprime: float, *,
                       source: str = "vacuum", corrupt_branch: bool = False) -> dict:
    """Relative residuals of the interface conditions at ``z = 0``.

    Checks continuity of ``E_par`` (``D_par / xi``), of ``D_z`` and of the
    tangential magnetic field.  The latter is the tangential part of
    ``curl E`` with ``E = D / xi`` below the interface; the ``grad_par E_z``
    piece matters because ``E_z`` itself jumps.

    Parameters
    ----------
    source : {"vacuum", "medium"}
        Where the source point ``zprime`` lies (sign of ``zprime`` must match).
    corrupt_branch : bool
        Test hook: flip the sign of the medium wave number in the medium-side
        field.  The residuals must then become large.
    """
    _check_omega(omega)
    q = _qvec(q_par)
    if source == "vacuum" and not zprime > 0:
        raise DomainError("vacuum source needs zprime > 0")
    if source == "medium" and not zprime < 0:
        raise DomainError("medium source needs zprime < 0")
    if source not in ("vacuum", "medium"):
        raise DomainError(f"unknown source side {source!r}")
    branch = -1.0 if corrupt_branch else 1.0
    x, lo, dlo, up, dup = _interface_values(medium, omega, q, zprime, source, branch)
    def curl_par(e, de):
        return np.array([1j * q[1] * e[2] - de[1], de[0] - 1j * q[0] * e[2]])

    return {
        "E_par": _rel(lo[:2] / x, up[:2]),
        "D_z": _rel(lo[2], up[2]),
        "B_par": _rel(curl_par(lo / x, dlo / x), curl_par(up, dup)),
    }


def boundary_value_amplitudes(eps: complex, omega: float, q: float, *, corrupt_branch: bool = False):
    """Solve the interface problem for unit incident plane waves, ``q`` along x.

    For each Cartesian column ``j`` of the incident dyad ``(i/2kz)(I - k k / w^2)``
    (downward wave ``k = (q, 0, -kz)``) the reflected amplitude ``R`` (upward,
    ``(q, 0, kz)``) and transmitted amplitude ``T`` (``(q, 0, -kzd)``) are found
    from continuity of ``E_x, E_y, eps E_z, B_x, B_y`` with ``B = k x E / w``,
    plus transversality of both waves.  Solved as a 7x6 least-squares system.

    Returns
    -------
    R, T : (3, 3) complex arrays (column j = response to column j)
    residual : float
        Largest relative least-squares residual, a consistency measure.
    """
    kz = complex(vacuum_kz(omega, q))
    kzd = upper_sqrt(eps * omega * omega - q * q)
    if corrupt_branch:
        kzd = -kzd
    k_in = np.array([q, 0.0, -kz])
    k_r = np.array([q, 0.0, kz])
    k_t = np.array([q, 0.0, -kzd])
    inc = 1j / (2 * kz) * (np.eye(3) - np.outer(k_in, k_in) / omega ** 2)

    def cross_mat(k):
        return np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]], dtype=complex)

    Cr, Ct, Ci = cross_mat(k_r) / omega, cross_mat(k_t) / omega, cross_mat(k_in) / omega
    M = np.zeros((7, 6), dtype=complex)
    # rows: Ex, Ey, Dz, Bx, By, k_r.R, k_t.T  ; unknowns [R, T]
    M[0, 0], M[0, 3] = 1, -1
    M[1, 1], M[1, 4] = 1, -1
    M[2, 2], M[2, 5] = 1, -eps
    M[3, :3], M[3, 3:] = Cr[0], -Ct[0]
    M[4, :3], M[4, 3:] = Cr[1], -Ct[1]
    M[5, :3] = k_r
    M[6, 3:] = k_t
    R = np.zeros((3, 3), dtype=complex)
    T = np.zeros((3, 3), dtype=complex)
    worst = 0.0
    for j in range(3):
        e_in = inc[:, j]
        b_in = Ci @ e_in
        rhs = -np.array([e_in[0], e_in[1], e_in[2], b_in[0], b_in[1], 0, 0], dtype=complex)
        sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        scale = max(np.linalg.norm(rhs), 1e-300)
        worst = max(worst, float(np.linalg.norm(M @ sol - rhs) / scale))
        R[:, j] = sol[:3]
        T[:, j] = sol[3:]
    return R, T, worst


def retarded_green_reflected(medium: LorentzMedium, z_atom: float, omega: float,
                             quad: QuadratureConfig | None = None) -> np.ndarray:
    """Reflected retarded Green tensor ``(xx, yy, zz)`` at coincident points ``(0, 0, Z)``.

    Built independently of the closed-form propagator: per transverse wave
    number the interface problem is solved numerically
    (:func:`boundary_value_amplitudes`), azimuthally averaged, and integrated
    with SciPy's adaptive vector quadrature.  The propagating range uses
    ``q = w sin(theta)`` and the evanescent range ``q = w cosh(u)``.

    The two constructions are related by ``D_refl = -w^2 G_refl(|w|)``.
    """
    quad = quad or DEFAULT_CONFIG
    if not z_atom > 0:
        raise DomainError("z_atom must be positive")
    if not omega > 0:
        raise DomainError("retarded Green tensor needs omega > 0")
    if medium.is_vacuum:
        return np.zeros(3, dtype=complex)
    eps = complex(permittivity(_lossy(medium), float(omega)))
    w = float(omega)
    Z = float(z_atom)

    def avg(q):
        R, _, _ = boundary_value_amplitudes(eps, w, q)
        kz = complex(vacuum_kz(w, q))
        g = R * np.exp(1j * kz * Z) * np.exp(1j * kz * Z)
        return np.array([0.5 * (g[0, 0] + g[1, 1]), g[2, 2]])

    def prop(theta):
        q = w * math.sin(theta)
        return avg(q) * q * w * math.cos(theta)

    def evan(u):
        q = w * math.cosh(u)
        return avg(q) * q * w * math.sinh(u)

    u_max = math.asinh(math.log(1.0 / quad.tail_cut) / (2.0 * w * Z) + 1.0)
    tol = dict(epsabs=0.0, epsrel=min(quad.rel_tol, 1e-10), limit=400)
    p, _ = sp_integrate.quad_vec(prop, 0.0, 0.5 * math.pi, **tol)
    e, _ = sp_integrate.quad_vec(evan, 0.0, u_max, **tol)
    g = (p + e) / (2 * np.pi)
    return np.array([g[0], g[0], g[1]])
