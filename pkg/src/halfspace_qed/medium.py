"""Lorentz-oscillator model of an absorbing, dispersive dielectric.

Frequencies are dimensionless, measured in a reference unit (by default the
resonance frequency ``omega_T``), with hbar = c = eps0 = 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError, UnderdampedWarning

__all__ = [
    "LorentzMedium",
    "permittivity",
    "permittivity_imag_axis",
    "xi",
    "refractive_index",
    "static_index",
]

_POLE_TOL = 1e-14


@dataclass(frozen=True)
class LorentzMedium:
    """Single-resonance absorbing dielectric.

    Parameters
    ----------
    omega_T : float
        Transverse resonance frequency, > 0.
    omega_P : float
        Coupling ("plasma") frequency, >= 0.  Zero means vacuum.
    gamma : float
        Damping constant, >= 0.
    """

    omega_T: float = 1.0
    omega_P: float = 1.0
    gamma: float = 0.1

    def __post_init__(self):
        for name in ("omega_T", "omega_P", "gamma"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
        if not self.omega_T > 0:
            raise DomainError(f"omega_T must be positive, got {self.omega_T}")
        if self.omega_P < 0 or self.gamma < 0:
            raise DomainError("omega_P and gamma must be non-negative")
        if self.gamma >= self.omega_T:
            warnings.warn(
                f"gamma={self.gamma} >= omega_T={self.omega_T}: the oscillators are not "
                "underdamped and the model's bath elimination is questionable",
                UnderdampedWarning, stacklevel=3)

    @property
    def is_vacuum(self) -> bool:
        return self.omega_P == 0.0

    @property
    def static_permittivity(self) -> float:
        return 1.0 + (self.omega_P / self.omega_T) ** 2

    @property
    def oscillator_mass(self) -> float:
        """Oscillator inertia ``M = 1/omega_P**2`` (infinite for vacuum)."""
        return math.inf if self.is_vacuum else 1.0 / self.omega_P ** 2

    def bath_coupling(self, nu):
        """Frequency-independent bath spectral weight ``4 M gamma / (pi nu**2)``."""
        nu = np.asarray(nu, dtype=float)
        return 4.0 * self.oscillator_mass * self.gamma / (np.pi * nu ** 2)

    def with_gamma(self, gamma: float) -> "LorentzMedium":
        return LorentzMedium(self.omega_T, self.omega_P, gamma)

    def nudged(self) -> "LorentzMedium":
        """Copy with ``gamma = 0`` replaced by ``1e-12 * omega_T``.

        Integrals that rely on a strictly positive imaginary part of the medium
        wave number use this to approach the lossless limit.
        """
        if self.gamma > 0:
            return self
        return LorentzMedium(self.omega_T, self.omega_P, 1e-12 * self.omega_T)


def permittivity(medium: LorentzMedium, omega):
    """Relative permittivity ``1 + wP^2 / (wT^2 - w^2 - 2 i gamma w)``.

    Accepts real or complex frequencies (scalar or array).

    Raises
    ------
    PoleError
        If the Lorentz denominator vanishes.
    """
    w = np.asarray(omega, dtype=complex)
    denom = medium.omega_T ** 2 - w * w - 2j * medium.gamma * w
    scale = medium.omega_T ** 2 + np.abs(w) ** 2
    if medium.is_vacuum:
        out = np.ones_like(w)
    else:
        if np.any(np.abs(denom) <= _POLE_TOL * scale):
            raise PoleError(f"permittivity pole at omega={omega!r}")
        out = 1.0 + medium.omega_P ** 2 / denom
    return out[()] if out.ndim == 0 else out


def permittivity_imag_axis(medium: LorentzMedium, w):
    """Permittivity at imaginary frequency ``i w``, real and >= 1 for ``w >= 0``."""
    w = np.asarray(w, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise DomainError("imaginary-axis frequency must be >= 0")
    with np.errstate(over="ignore"):
        out = 1.0 + medium.omega_P ** 2 / (medium.omega_T ** 2 + w * w + 2.0 * medium.gamma * w)
    return out[()] if out.ndim == 0 else out


def xi(medium: LorentzMedium, omega):
    """Even continuation of the permittivity used inside the photon propagator.

    Only defined for real frequencies, where it equals ``permittivity(|omega|)``.
    """
    w = np.asarray(omega)
    if np.iscomplexobj(w) and np.any(np.imag(w) != 0):
        raise DomainError("xi is only defined on the real frequency axis")
    return permittivity(medium, np.abs(np.real(w)))


def refractive_index(medium: LorentzMedium, omega):
    """Square root of the permittivity on the branch with ``Im n >= 0``."""
    n = np.sqrt(np.asarray(permittivity(medium, omega), dtype=complex))
    n = np.where(n.imag < 0, -n, n)
    return n[()] if n.ndim == 0 else n


def static_index(medium: LorentzMedium) -> float:
    """Static refractive index ``sqrt(1 + (omega_P/omega_T)**2)``."""
    return math.sqrt(medium.static_permittivity)
