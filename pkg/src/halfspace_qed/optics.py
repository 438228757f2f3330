"""Wave numbers, Fresnel coefficients and polarization vectors for a half-space.

Geometry: vacuum fills ``z > 0``, the dielectric fills ``z < 0``.  "Right
incident" coefficients describe a wave coming from the vacuum side.  All
functions broadcast over numpy arrays unless stated otherwise.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BranchPointWarning, DegenerateError, DomainError
from .medium import LorentzMedium, permittivity, permittivity_imag_axis, xi

__all__ = [
    "WaveContext",
    "FresnelSet",
    "PolarizationVectors",
    "vacuum_kz",
    "medium_kz",
    "upper_sqrt",
    "wave_context",
    "fresnel_right",
    "fresnel_left",
    "fresnel_imag_axis",
    "fresnel_scaled",
    "fresnel_kz",
    "polarization_vectors",
    "f_tm",
]

BRANCH_TOL = 1e-12
_DEN_TOL = 1e-300


def _scalar(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def upper_sqrt(z):
    """Square root on the branch with non-negative imaginary part.

    Handles signed zeros: ``upper_sqrt(-1 - 0j)`` is ``+1j``.
    """
    r = np.sqrt(np.asarray(z, dtype=complex))
    return _scalar(np.where(r.imag < 0, -r, r))


def vacuum_kz(omega, q_par):
    """Vacuum z wave number, real and positive for ``q < |w|``, positive imaginary otherwise.

    The branch is chosen by sign rule rather than by adding ``i*eta``, which
    keeps full relative precision close to the light cone.
    """
    w2 = np.asarray(omega, dtype=float) ** 2
    q2 = np.asarray(q_par, dtype=float) ** 2
    d = w2 - q2
    out = np.where(d >= 0, np.sqrt(np.abs(d)) + 0j, 1j * np.sqrt(np.abs(d)))
    return _scalar(out)


def medium_kz(xi_value, omega, q_par):
    """Medium z wave number ``sqrt(xi w^2 - q^2)`` with ``Im >= 0``."""
    w = np.asarray(omega, dtype=float)
    q = np.asarray(q_par, dtype=float)
    return upper_sqrt(np.asarray(xi_value) * w * w - q * q)


class FresnelSet(NamedTuple):
    r_TE: complex
    r_TM: complex
    t_TE: complex
    t_TM: complex


@dataclass(frozen=True)
class WaveContext:
    """A frequency and transverse wave number with both z wave numbers."""

    omega: float
    q_par: float
    kz: complex
    kzd: complex
    xi: complex


@dataclass(frozen=True)
class PolarizationVectors:
    e_TE: np.ndarray
    e_TM: np.ndarray


def _check_q(q_par):
    q = np.asarray(q_par, dtype=float)
    if np.any(q < 0) or np.any(np.isnan(q)):
        raise DomainError("q_par must be non-negative")
    return q


def wave_context(medium: LorentzMedium, omega: float, q_par: float) -> WaveContext:
    """Build the wave context at real ``omega`` and ``q_par >= 0``.

    Emits :class:`BranchPointWarning` when ``q_par`` is within
    ``1e-12 * max(1, |omega|)`` of the light cone, where ``kz`` is set to zero
    (the common limit of both branches).
    """
    q = float(_check_q(q_par))
    w = float(omega)
    x = complex(xi(medium, w))
    if abs(q - abs(w)) < BRANCH_TOL * max(1.0, abs(w)):
        warnings.warn(f"q_par={q} sits on the light cone of omega={w}",
                      BranchPointWarning, stacklevel=2)
        kz = 0j
    else:
        kz = complex(vacuum_kz(w, q))
    return WaveContext(w, q, kz, complex(medium_kz(x, w, q)), x)


def _ratio(num, den, what):
    den = np.asarray(den)
    if np.any(np.abs(den) <= _DEN_TOL):
        raise DegenerateError(f"vanishing {what} denominator")
    return num / den


def _coefficients(kz, kzd, x):
    s_te = kz + kzd
    s_tm = x * kz + kzd
    sqx = upper_sqrt(x)
    r_te = _ratio(kz - kzd, s_te, "TE")
    r_tm = _ratio(x * kz - kzd, s_tm, "TM")
    return r_te, r_tm, s_te, s_tm, sqx


def fresnel_right(medium: LorentzMedium, omega, q_par) -> FresnelSet:
    """Reflection and transmission for a wave incident from the vacuum side."""
    q = _check_q(q_par)
    x = xi(medium, omega)
    kz = vacuum_kz(omega, q)
    kzd = medium_kz(x, omega, q)
    r_te, r_tm, s_te, s_tm, sqx = _coefficients(kz, kzd, x)
    return FresnelSet(_scalar(r_te), _scalar(r_tm),
                      _scalar(2 * kz / s_te), _scalar(2 * sqx * kz / s_tm))


def fresnel_left(medium: LorentzMedium, omega, q_par) -> FresnelSet:
    """Reflection and transmission for a wave incident from inside the medium."""
    q = _check_q(q_par)
    x = xi(medium, omega)
    kz = vacuum_kz(omega, q)
    kzd = medium_kz(x, omega, q)
    r_te, r_tm, s_te, s_tm, sqx = _coefficients(kz, kzd, x)
    return FresnelSet(_scalar(-r_te), _scalar(-r_tm),
                      _scalar(2 * kzd / s_te), _scalar(2 * sqx * kzd / s_tm))


def fresnel_imag_axis(medium: LorentzMedium, w, q_par):
    """Reflection coefficients ``(r_TE, r_TM)`` at imaginary frequency ``i w``.

    Both are real.  At ``w = q_par = 0`` the limit values ``0`` and
    ``(eps0 - 1)/(eps0 + 1)`` are returned.
    """
    q = _check_q(q_par)
    eps = permittivity_imag_axis(medium, w)
    w = np.asarray(w, dtype=float)
    a = np.hypot(w, q)
    b = np.hypot(np.sqrt(eps) * w, q)
    zero = a == 0
    a_ = np.where(zero, 1.0, a)
    b_ = np.where(zero, 1.0, b)
    r_te = np.where(zero, 0.0, (a_ - b_) / (a_ + b_))
    r_tm = (eps * a_ - b_) / (eps * a_ + b_)
    return _scalar(r_te), _scalar(r_tm)


def fresnel_scaled(medium: LorentzMedium, omega_mg, x, y):
    """Reflection coefficients in the scaled polar variables of the ground-state integral.

    Parameters
    ----------
    omega_mg : float
        Transition frequency, > 0.
    x : array_like
        Radial variable, >= 0 (photon "energy" in units of ``omega_mg``).
    y : array_like
        Cosine of the polar angle, in [0, 1].

    Returns
    -------
    (r_TE, r_TM) with the permittivity evaluated at ``i * omega_mg * x * y``.
    """
    if not omega_mg > 0:
        raise DomainError("omega_mg must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0) or np.any(y > 1):
        raise DomainError("need x >= 0 and 0 <= y <= 1")
    eps = permittivity_imag_axis(medium, omega_mg * x * y)
    return _scaled_from_eps(eps, y)


def _scaled_from_eps(eps, y):
    s = np.sqrt(y * y * (eps - 1.0) + 1.0)
    return _scalar((1.0 - s) / (1.0 + s)), _scalar((eps - s) / (eps + s))


def fresnel_kz(medium: LorentzMedium, omega_abs, kz_scaled):
    """Reflection coefficients as functions of the scaled z wave number.

    ``kz_scaled = kz / |omega|`` lives on the contour made of the real segment
    [0, 1] and the positive imaginary axis; the permittivity is taken at the
    real frequency ``|omega|``.
    """
    if not omega_abs > 0:
        raise DomainError("omega_abs must be positive")
    return _kz_coefficients(permittivity(medium, omega_abs), kz_scaled)


def _kz_coefficients(eps, k):
    k = np.asarray(k, dtype=complex)
    root = upper_sqrt(eps - 1.0 + k * k)
    r_te = _ratio(k - root, k + root, "TE")
    r_tm = _ratio(eps * k - root, eps * k + root, "TM")
    return _scalar(r_te), _scalar(r_tm)


def polarization_vectors(q_vec, z_wavenumber, omega, xi_value=1.0, azimuth=None) -> PolarizationVectors:
    """TE and TM polarization vectors for the wave vector ``(q_x, q_y, k_z)``.

    Parameters
    ----------
    q_vec : sequence of 2 floats
        Transverse wave vector.
    z_wavenumber : complex
        ``kz`` on the vacuum side or ``kzd`` on the medium side (either sign).
    omega : float
        Frequency.
    xi_value : complex, optional
        Permittivity factor; the TM vector on the medium side carries an extra
        ``xi**-0.5`` in its normalization.  Use 1 for the vacuum side.
    azimuth : float, optional
        Direction used to orient the vectors when ``q_vec`` is zero.  Without
        it, normal incidence raises :class:`DegenerateError`.

    Returns
    -------
    PolarizationVectors
    """
    qx, qy = (float(c) for c in q_vec)
    q = np.hypot(qx, qy)
    if q == 0:
        if azimuth is None:
            raise DegenerateError("polarization vectors need an azimuth at q_par = 0")
        ux, uy = np.cos(azimuth), np.sin(azimuth)
    else:
        ux, uy = qx / q, qy / q
    if omega == 0:
        raise DegenerateError("polarization vectors are undefined at omega = 0")
    kz = complex(z_wavenumber)
    e_te = np.array([-uy, ux, 0.0], dtype=complex)
    e_tm = np.array([ux * kz, uy * kz, -q], dtype=complex) / (omega * upper_sqrt(xi_value))
    return PolarizationVectors(e_te, e_tm)


def f_tm(q_z, p_z, q_par):
    """Overlap of two TM vectors sharing a transverse wave vector.

    ``(q_z p_z + q^2) / (sqrt(q^2 + q_z^2) sqrt(q^2 + p_z^2))``; the roots are
    taken with non-negative imaginary part.
    """
    q = np.asarray(q_par, dtype=float)
    if np.any(q <= 0):
        raise DomainError("f_tm needs q_par > 0")
    qz = np.asarray(q_z, dtype=complex)
    pz = np.asarray(p_z, dtype=complex)
    den = upper_sqrt(q * q + qz * qz) * upper_sqrt(q * q + pz * pz)
    return _scalar(_ratio(qz * pz + q * q, den, "normalization"))
