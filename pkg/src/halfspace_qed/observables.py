"""Level shifts and decay-rate changes of an atom near the half-space.

Every quantity is a sum over dipole partners ``m`` of the state ``i``.  Each
partner contributes ``U_par * mu_par_sq + U_perp * mu_perp_sq`` where the unit
weights ``U`` depend only on the medium, the distance and ``omega_mi``; this
keeps all outputs exactly linear in the squared dipole elements.

Natural units hbar = c = eps0 = 1.  Shifts are energies (= frequencies),
rates are inverse times.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .atom import AtomModel, free_space_rate, transition_frequency
from .errors import DegenerateTransitionWarning, DomainError, ZeroRateError
from .medium import (LorentzMedium, permittivity, permittivity_imag_axis, refractive_index,
                     static_index)
from .optics import _scaled_from_eps
from .propagator import contour_integrals
from .quadrature import (DEFAULT_CONFIG, QuadratureConfig, integrate_finite,
                         integrate_semi_infinite)

__all__ = [
    "ShiftBreakdown",
    "nonresidue_shift",
    "ground_shift_nonretarded",
    "c4_coefficients",
    "c5_coefficients",
    "ground_shift_retarded_asymptotic",
    "excited_residue",
    "excited_residue_nonretarded",
    "excited_residue_retarded",
    "rate_change_nonretarded",
    "rate_change_retarded",
    "total_shift_and_rate",
    "normalized_lifetime",
    "C4_VARIANTS",
]


@dataclass(frozen=True)
class ShiftBreakdown:
    """Shift of one level split into its two self-energy parts.

    ``total_shift = nonresidue + residue.real`` and
    ``rate_change = -2 * residue.imag``.
    """

    state: str
    z_atom: float
    nonresidue: float
    residue: complex
    total_shift: float
    rate_change: float
    per_transition: list = field(default_factory=list)


def _check_z(Z):
    if not (Z > 0 and math.isfinite(Z)):
        raise DomainError(f"distance must be positive and finite, got {Z}")


def _live_partners(atom, i):
    for p in atom.partners(i):
        if p.omega_mi == 0.0:
            warnings.warn(f"transition {i}<->{p.label} has zero frequency; skipped",
                          DegenerateTransitionWarning, stacklevel=3)
            continue
        yield p


# ---------------------------------------------------------------------------
# non-residue part

def _polar_unit_integrals(medium, omega_abs, Z, config):
    """``int dx x^3 e^{-2 w Z x} int dy [bracket] / (1 + x^2 y^2)`` for unit dipoles.

    The inner variable is changed to ``s`` with ``x y = tan(s * atan(x))``,
    which turns ``dy / (1 + x^2 y^2)`` into the constant ``atan(x)/x ds`` and
    resolves the narrow ``y ~ 1/x`` peak at large ``x``.
    """
    a = 2.0 * omega_abs * Z
    inner_cfg = config.tightened()

    def outer(x):
        theta = np.arctan(x)
        small = x < 1e-8
        xs = np.where(small, 1.0, x)
        jac = np.where(small, 1.0, theta / xs)

        def inner(s):
            xy = np.tan(s[:, None] * theta[None, :])
            y = np.where(small[None, :], s[:, None], np.minimum(xy / xs[None, :], 1.0))
            eps = permittivity_imag_axis(medium, omega_abs * xy)
            r_te, r_tm = _scaled_from_eps(eps, y)
            y2 = y * y
            return np.stack([r_tm - y2 * r_te, 2.0 * (1.0 - y2) * r_tm], axis=-1)

        val = integrate_finite(inner, 0.0, 1.0, inner_cfg).value
        w = x ** 3 * np.exp(-a * x) * jac
        return w[:, None] * val

    return np.asarray(integrate_semi_infinite(outer, 0.0, 1.0 / a, config).value, dtype=float)


def _nonresidue_units(medium, omega_mi, Z, config):
    if medium.is_vacuum:
        return np.zeros(2)
    w = abs(omega_mi)
    unit = _polar_unit_integrals(medium, w, Z, config)
    return -omega_mi * w * w / (8.0 * math.pi ** 2) * unit


def nonresidue_shift(medium: LorentzMedium, atom: AtomModel, state: str, Z: float,
                     quad: QuadratureConfig | None = None, *, details: list | None = None) -> float:
    """Non-residue (imaginary-frequency) part of the shift of ``state`` at distance ``Z``.

    The signed ``omega_mi`` is kept in the frequency weight, so partners below
    the state contribute with the opposite sign.
    """
    quad = quad or DEFAULT_CONFIG
    _check_z(Z)
    total = 0.0
    for p in _live_partners(atom, state):
        u = _nonresidue_units(medium, p.omega_mi, Z, quad)
        v = float(u[0] * p.mu_par_sq + u[1] * p.mu_perp_sq)
        if details is not None:
            details.append((p, v))
        total += v
    return total


def ground_shift_nonretarded(medium: LorentzMedium, atom: AtomModel, Z: float,
                             quad: QuadratureConfig | None = None, state: str | None = None) -> float:
    """Van der Waals (``Z^-3``) limit of the non-residue shift.

    ``-1/(32 pi^2 Z^3) sum_m int_0^inf dw w_m/(w^2 + w_m^2) (eps(iw)-1)/(eps(iw)+1)
    (mu_par^2 + 2 mu_perp^2)``.
    """
    quad = quad or DEFAULT_CONFIG
    _check_z(Z)
    state = atom.ground if state is None else state
    if medium.is_vacuum:
        return 0.0
    total = 0.0
    for p in _live_partners(atom, state):
        wm = p.omega_mi

        def f(w):
            eps = permittivity_imag_axis(medium, w)
            return wm / (w * w + wm * wm) * (eps - 1.0) / (eps + 1.0)

        scale = max(abs(wm), medium.omega_T)
        pts = sorted({abs(wm), medium.omega_T})
        I = float(integrate_semi_infinite(f, 0.0, scale, quad, points=pts).value)
        total += -I / (32.0 * math.pi ** 2 * Z ** 3) * (p.mu_par_sq + 2.0 * p.mu_perp_sq)
    return total


# ---------------------------------------------------------------------------
# retarded asymptotics of the ground state

C4_VARIANTS = ("consistent", "printed", "sibling")


def c4_coefficients(n: float, variant: str = "consistent") -> tuple:
    """Coefficients of the ``Z^-4`` ground-state asymptote for static index ``n``.

    Both closed forms end with a term ``A(n) ln(sqrt(n^2 +/- 1) + n) / (n^2-1)^1.5``.

    variant
        ``"consistent"`` (default) uses ``sqrt(n^2 - 1)`` in both, the form
        that agrees with direct quadrature of the defining y-integrals;
        ``"printed"`` uses ``sqrt(n^2 + 1)`` for the parallel and
        ``sqrt(n^2 - 1)`` for the perpendicular coefficient; ``"sibling"``
        uses ``sqrt(n^2 + 1)`` in both.  The last two are kept for comparison.
    """
    if variant not in C4_VARIANTS:
        raise DomainError(f"unknown c4 variant {variant!r}")
    n = float(n)
    if not n > 1:
        raise DomainError("c4 coefficients need n > 1")
    n2 = n * n
    m = n2 - 1.0
    sp = math.sqrt(n2 + 1.0)
    sm = math.sqrt(m)
    shared = math.log((sp + 1.0) / (n * (sp + n)))
    log_minus = math.log(sm + n)
    log_plus = math.log(sp + n)
    last_par = log_plus if variant in ("printed", "sibling") else log_minus
    last_perp = log_plus if variant == "sibling" else log_minus
    par = (-(2.0 / 3.0 * n2 + n - 8.0 / 3.0) / m
           + 2.0 * n2 * n2 / (m * sp) * shared
           + (2.0 * n2 * n2 - 2.0 * n2 - 1.0) / m ** 1.5 * last_par)
    perp = ((4.0 * n2 * n2 - 2.0 * n2 * n - 4.0 / 3.0 * n2 + 4.0 / 3.0) / m
            - 4.0 * n2 ** 3 / (m * sp) * shared
            - 2.0 * n2 * (2.0 * n2 * n2 - 2.0 * n2 + 1.0) / m ** 1.5 * last_perp)
    return par, perp


def c5_coefficients(n: float) -> tuple:
    """Coefficients of the absorption correction ``~ gamma Z^-5``; both positive for ``n > 1``."""
    n = float(n)
    if not n > 1:
        raise DomainError("c5 coefficients need n > 1")
    L = math.log(n * (n + 1.0) / (n * n + 1.0))
    pre = 1.0 / (3.0 * (n - 1.0) * (n + 1.0) ** 2 * (n * n + 1.0))
    par = pre * (6 * n**6 - 3 * n**5 - 11 * n**4 + 4 * n**3 + 2 * n**2 - 5 * n + 7
                 - 6 * n**2 * (n**5 + n**4 - n**3 - n**2 - 2 * n - 2) * L)
    perp = 4 * pre * (-6 * n**8 + 3 * n**7 + 10 * n**6 - 5 * n**5 + 3 * n**4 - n**3 - 6 * n**2 + n + 1
                      + 3 * n**4 * (2 * n**5 + 2 * n**4 - n**3 - n**2 - 3 * n - 3) * L)
    return par, perp


def ground_shift_retarded_asymptotic(medium: LorentzMedium, atom: AtomModel, Z: float, *,
                                     include_c5: bool = True, c4_variant: str = "consistent",
                                     state: str | None = None) -> float:
    """Large-distance expansion ``-3/(64 pi^2) sum (c4/Z^4 - 4 gamma c5/(wT^2 Z^5)) mu^2 / w_m``."""
    _check_z(Z)
    state = atom.ground if state is None else state
    if medium.is_vacuum:
        return 0.0
    n = static_index(medium)
    c4 = c4_coefficients(n, c4_variant)
    c5 = c5_coefficients(n) if include_c5 else (0.0, 0.0)
    k5 = 4.0 * medium.gamma / medium.omega_T ** 2
    total = 0.0
    for p in _live_partners(atom, state):
        par = (c4[0] / Z ** 4 - k5 * c5[0] / Z ** 5) * p.mu_par_sq
        perp = (c4[1] / Z ** 4 - k5 * c5[1] / Z ** 5) * p.mu_perp_sq
        total += -3.0 / (64.0 * math.pi ** 2) * (par + perp) / p.omega_mi
    return total


# ---------------------------------------------------------------------------
# residue part (excited states)

def _residue_units(medium, omega_abs, Z, config):
    if medium.is_vacuum:
        return np.zeros(2, dtype=complex)
    eps = complex(permittivity(medium.nudged(), omega_abs))
    B, A = contour_integrals(eps, 2.0 * omega_abs * Z, config)
    return 1j * omega_abs ** 3 / (8.0 * math.pi) * (1j * A - B)


def _lower(atom, state):
    return [p for p in _live_partners(atom, state) if p.omega_mi < 0]


def excited_residue(medium: LorentzMedium, atom: AtomModel, state: str, Z: float,
                    quad: QuadratureConfig | None = None, *, details: list | None = None) -> complex:
    """Pole contribution to the self-energy of ``state`` (zero for the ground state).

    For each lower partner the ``kz`` contour from 1 to 0 and on up the
    imaginary axis is split into a damped integral along ``kz = i kappa`` and
    an oscillatory one on [0, 1].
    """
    quad = quad or DEFAULT_CONFIG
    _check_z(Z)
    total = 0j
    for p in _lower(atom, state):
        u = _residue_units(medium, -p.omega_mi, Z, quad)
        v = complex(u[0] * p.mu_par_sq + u[1] * p.mu_perp_sq)
        if details is not None:
            details.append((p, v))
        total += v
    return total


def excited_residue_nonretarded(medium: LorentzMedium, atom: AtomModel, state: str, Z: float) -> complex:
    """``Z^-3`` limit ``-1/(32 pi Z^3) sum (eps-1)/(eps+1) (mu_par^2 + 2 mu_perp^2)``, complex."""
    _check_z(Z)
    total = 0j
    for p in _lower(atom, state):
        eps = complex(permittivity(medium, -p.omega_mi))
        total += -(eps - 1.0) / (eps + 1.0) * (p.mu_par_sq + 2.0 * p.mu_perp_sq)
    return total / (32.0 * math.pi * Z ** 3)


def excited_residue_retarded(medium: LorentzMedium, atom: AtomModel, state: str, Z: float, *,
                             parallel_correction: bool = False) -> complex:
    """Far-zone form with ``1/Z`` parallel and ``1/Z^2`` perpendicular terms.

    With ``a = 2 |w| Z`` each lower partner contributes
    ``w^3 (n-1)/(n+1) e^{ia} [mu_par^2 / a + 2i mu_perp^2 / a^2] / (4 pi)``.
    The relative error is O(1/a) for both components; for the perpendicular
    term its coefficient is ``|1 + 4/n|``.

    parallel_correction
        Also keep the ``i mu_par^2 / a^2`` term that the integration by parts
        at ``kz = |w|`` produces at the same order as the perpendicular term.
        The parallel error then drops to O(1/a^2).
    """
    _check_z(Z)
    total = 0j
    for p in _lower(atom, state):
        w = -p.omega_mi
        n = complex(refractive_index(medium, w))
        a = 2.0 * w * Z
        bracket = p.mu_par_sq / a + 2j * p.mu_perp_sq / a ** 2
        if parallel_correction:
            bracket += 1j * p.mu_par_sq / a ** 2
        total += w ** 3 * (n - 1.0) / (n + 1.0) * np.exp(1j * a) * bracket
    return total / (4.0 * math.pi)


def rate_change_nonretarded(medium: LorentzMedium, atom: AtomModel, state: str, Z: float) -> float:
    """``1/(8 pi Z^3) sum Im eps / |eps + 1|^2 (mu_par^2 + 2 mu_perp^2)``."""
    _check_z(Z)
    total = 0.0
    for p in _lower(atom, state):
        eps = complex(permittivity(medium, -p.omega_mi))
        total += eps.imag / abs(eps + 1.0) ** 2 * (p.mu_par_sq + 2.0 * p.mu_perp_sq)
    return total / (8.0 * math.pi * Z ** 3)


def rate_change_retarded(medium: LorentzMedium, atom: AtomModel, state: str, Z: float) -> float:
    """Far-zone rate change, the imaginary part of the retarded residue times -2."""
    return -2.0 * excited_residue_retarded(medium, atom, state, Z).imag


def total_shift_and_rate(medium: LorentzMedium, atom: AtomModel, state: str, Z: float,
                         quad: QuadratureConfig | None = None) -> ShiftBreakdown:
    """Assemble both self-energy parts for ``state`` at distance ``Z``."""
    quad = quad or DEFAULT_CONFIG
    nd, rd = [], []
    nonres = nonresidue_shift(medium, atom, state, Z, quad, details=nd)
    res = excited_residue(medium, atom, state, Z, quad, details=rd)
    resmap = {p.label: v for p, v in rd}
    rows = [{"partner": p.label, "omega_mi": p.omega_mi, "nonresidue": v,
             "residue": resmap.get(p.label, 0j)} for p, v in nd]
    return ShiftBreakdown(state, Z, nonres, res, nonres + res.real, -2.0 * res.imag, rows)


def normalized_lifetime(medium: LorentzMedium, atom: AtomModel, state: str, lower: str, Z: float,
                        quad: QuadratureConfig | None = None) -> float:
    """Inverse normalized lifetime ``Delta Gamma / Gamma_0`` for the decay ``state -> lower``."""
    quad = quad or DEFAULT_CONFIG
    _check_z(Z)
    w = transition_frequency(atom, state, lower)
    if not w < 0:
        raise DomainError(f"{lower} does not lie below {state}")
    g0 = free_space_rate(atom, state, lower)
    if g0 == 0.0:
        raise ZeroRateError(f"free-space rate of {state}->{lower} vanishes")
    par, perp = atom.dipole(state, lower)
    u = _residue_units(medium, -w, Z, quad)
    res = u[0] * par + u[1] * perp
    return float(-2.0 * res.imag / g0)
