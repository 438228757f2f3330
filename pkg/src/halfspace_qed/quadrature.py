"""Adaptive one-dimensional quadrature engines.

All engines share a single global-adaptive driver that bisects panels until
the summed error estimate meets ``max(abs_tol, rel_tol * |value|)``.  Two
panel rules are available: a 21-point Gauss-Kronrod pair with QUADPACK-style
error scaling, and a Filon-Legendre rule for integrands of the form
``g(x) * exp(i*w*x)`` whose envelope ``g`` is smooth.

Integrands are vectorised: they receive a 1-D array of abscissae and return an
array whose leading axis matches it.  Any trailing axes are integrated
component-wise, which is how iterated double integrals are done cheaply
(the inner integral is computed for every outer node in one call).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import spherical_jn

from .errors import DecayMisdeclaredError, DomainError, NonConvergenceError

__all__ = [
    "QuadratureConfig",
    "QuadResult",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_oscillatory",
]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny

# Kronrod 21-point abscissae on [0, 1] (symmetric), with the embedded
# 10-point Gauss rule living on the odd-indexed nodes.
_XK_HALF = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WK_HALF = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208640061116,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG_HALF = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

_XK = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
_WK = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
_WG = np.zeros(21)
_WG[1:10:2] = _WG_HALF
_WG[11:20:2] = _WG_HALF[::-1]

_FILON_ORDER = 24
_FL_NODES, _FL_WEIGHTS = np.polynomial.legendre.leggauss(_FILON_ORDER)
_FL_K = np.arange(_FILON_ORDER)
# Legendre values P_k(t_j), shape (order, nodes)
_FL_P = np.polynomial.legendre.legvander(_FL_NODES, _FILON_ORDER - 1).T
_FL_PROJ = (2 * _FL_K[:, None] + 1) / 2.0 * _FL_P * _FL_WEIGHTS[None, :]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits shared by all integration engines.

    Attributes
    ----------
    rel_tol, abs_tol : float
        Convergence target ``err <= max(abs_tol, rel_tol * |value|)``.
    max_subdivisions : int
        Upper bound on the number of panels held by the adaptive driver.
    tail_cut : float
        For semi-infinite integrals, the far tail starts where ``exp(-x/s)``
        drops below this value (``s`` being the declared decay scale).
    oscillatory_threshold : float
        Number of phase cycles above which the Filon path is used.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    tail_cut: float = 1e-16
    oscillatory_threshold: float = 10.0

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        for name in ("abs_tol", "tail_cut", "oscillatory_threshold"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be >= 1")

    def replace(self, **changes) -> "QuadratureConfig":
        return dataclasses.replace(self, **changes)

    def tightened(self, factor: float = 10.0) -> "QuadratureConfig":
        """Config for an inner integral nested inside an outer one."""
        return self.replace(rel_tol=max(self.rel_tol / factor, 50 * _EPS),
                            abs_tol=self.abs_tol / factor)


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class QuadResult:
    """Outcome of an integration.

    ``value`` and ``error_estimate`` are scalars for scalar integrands and
    arrays (matching the trailing shape of the integrand) otherwise.
    """

    value: complex | np.ndarray
    error_estimate: float | np.ndarray
    evaluations: int
    converged: bool

    def __complex__(self):
        return complex(self.value)


def _as_config(config):
    return DEFAULT_CONFIG if config is None else config


def _evaluate(f, x):
    y = np.asarray(f(x))
    if y.shape[:1] != x.shape[:1]:
        raise ValueError("integrand must return an array whose first axis "
                         "matches the abscissae")
    return y


def _gk21_rule(f):
    def rule(a, b):
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        x = (c[:, None] + h[:, None] * _XK[None, :]).ravel()
        y = _evaluate(f, x)
        tail = y.shape[1:]
        y = y.reshape((a.size, 21) + tail)
        hh = h.reshape((-1,) + (1,) * len(tail))
        w = _WK.reshape((1, 21) + (1,) * len(tail))
        wg = _WG.reshape((1, 21) + (1,) * len(tail))
        kron = hh * np.sum(w * y, axis=1)
        gauss = hh * np.sum(wg * y, axis=1)
        resabs = np.abs(hh) * np.sum(w * np.abs(y), axis=1)
        mean = kron / np.where(hh == 0, 1, 2 * hh)
        resasc = np.abs(hh) * np.sum(w * np.abs(y - mean[:, None]), axis=1)
        err = np.abs(kron - gauss)
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
        err = np.where((resasc != 0) & (err != 0), scaled, err)
        err = np.where(resabs > _TINY / (50 * _EPS),
                       np.maximum(50 * _EPS * resabs, err), err)
        return kron, err, x.size
    return rule


def _filon_rule(g, omega):
    """Filon-Legendre panel rule for ``g(x) exp(i omega x)``.

    On each panel the envelope is expanded in Legendre polynomials from its
    Gauss-Legendre samples; the moments of ``P_k(t) exp(i kappa t)`` over
    [-1, 1] are ``2 i^k j_k(kappa)``, which are exact and stable.
    """
    ik = (1j) ** _FL_K

    def rule(a, b):
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        x = (c[:, None] + h[:, None] * _FL_NODES[None, :]).ravel()
        y = _evaluate(g, x)
        tail = y.shape[1:]
        y = y.reshape((a.size, _FILON_ORDER) + tail)
        coef = np.einsum("kj,nj...->nk...", _FL_PROJ, y)
        kappa = omega * h
        moments = 2.0 * ik[None, :] * spherical_jn(_FL_K[None, :], np.abs(kappa)[:, None])
        # j_k is even/odd in its argument like P_k
        moments = moments * np.where(kappa[:, None] < 0, (-1.0) ** _FL_K[None, :], 1.0)
        phase = np.exp(1j * omega * c)
        shape = (-1,) + (1,) * len(tail)
        val = (h * phase).reshape(shape) * np.einsum("nk,nk...->n...", moments, coef)
        abscoef = np.abs(coef)
        err = 2.0 * np.abs(h).reshape(shape) * (abscoef[:, -1] + abscoef[:, -2] + abscoef[:, -3])
        # roundoff floor from the terms actually summed; the oscillation
        # cancels inside the exact moments, not between samples
        termabs = np.abs(h).reshape(shape) * np.einsum("nk,nk...->n...", np.abs(moments), abscoef)
        err = np.maximum(err, 50 * _EPS * termabs)
        return val, err, x.size
    return rule


def _adaptive(rule, edges, config, what="integral", panels=None):
    edges = np.asarray(edges, dtype=float)
    a = edges[:-1].copy()
    b = edges[1:].copy()
    vals, errs, nev = rule(a, b)
    frozen = np.zeros(a.size, dtype=bool)
    limit = int(config.max_subdivisions)
    while True:
        total = np.sum(vals, axis=0)
        err = np.sum(errs, axis=0)
        tol = np.maximum(config.abs_tol, config.rel_tol * np.abs(total))
        if np.all(err <= tol):
            if panels is not None:
                panels.extend([a, vals])
            return QuadResult(total[()], err[()], nev, True)
        ratio = errs / tol
        score = ratio.reshape(a.size, -1).max(axis=1) if ratio.ndim > 1 else ratio
        score = np.where(frozen, -np.inf, score)
        pick = score > 1.0 / a.size
        pick[np.argmax(score)] = True
        pick &= ~frozen
        room = limit - a.size
        if room <= 0 or not pick.any():
            res = QuadResult(total[()], err[()], nev, False)
            raise NonConvergenceError(
                f"{what} failed to converge with {a.size} panels "
                f"(error {np.max(err):.3e} > tolerance {np.min(tol):.3e})", res)
        idx = np.flatnonzero(pick)
        if idx.size > room:
            idx = idx[np.argsort(-score[idx], kind="stable")[:room]]
            idx.sort()
        mid = 0.5 * (a[idx] + b[idx])
        # panels too narrow to split are frozen rather than bisected
        narrow = (mid <= a[idx]) | (mid >= b[idx]) | (
            (b[idx] - a[idx]) <= 8 * _EPS * np.maximum(np.abs(a[idx]), np.abs(b[idx])))
        if narrow.any():
            frozen[idx[narrow]] = True
            idx = idx[~narrow]
            mid = mid[~narrow]
            if idx.size == 0:
                continue
        na = np.concatenate([a[idx], mid])
        nb = np.concatenate([mid, b[idx]])
        nv, ne, k = rule(na, nb)
        nev += k
        keep = np.ones(a.size, dtype=bool)
        keep[idx] = False
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        frozen = np.concatenate([frozen[keep], np.zeros(na.size, dtype=bool)])
        order = np.argsort(a, kind="stable")
        a, b, vals, errs, frozen = a[order], b[order], vals[order], errs[order], frozen[order]


def _edges(lo, hi, points):
    inner = sorted(float(p) for p in points if lo < p < hi)
    return np.array([lo] + inner + [hi])


def integrate_finite(f: Callable, a: float, b: float, config: QuadratureConfig | None = None,
                     *, singular: str | None = None, points: Sequence[float] = ()) -> QuadResult:
    """Integrate ``f`` over the finite interval ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand.
    a, b : float
        Limits with ``a < b``.
    singular : {None, "left", "right", "both"}
        Declares an integrable endpoint singularity (up to inverse square-root
        strength).  It is removed by the substitution ``x = a + (b-a) t**2``
        (mirrored for the right end, ``(1 - cos(pi t))/2`` for both ends).
    points : sequence of float
        Interior break points where ``f`` is not smooth.
    """
    config = _as_config(config)
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError(f"integrate_finite needs a < b, got [{a}, {b}]")
    L = b - a
    if singular is None:
        return _adaptive(_gk21_rule(f), _edges(a, b, points), config)

    if singular == "left":
        def xmap(t): return a + L * t * t
        def jac(t): return 2.0 * L * t
        def tmap(x): return np.sqrt((x - a) / L)
    elif singular == "right":
        def xmap(t): return b - L * t * t
        def jac(t): return 2.0 * L * t
        def tmap(x): return np.sqrt((b - x) / L)
    elif singular == "both":
        def xmap(t): return a + 0.5 * L * (1.0 - np.cos(np.pi * t))
        def jac(t): return 0.5 * L * np.pi * np.sin(np.pi * t)
        def tmap(x): return np.arccos(1.0 - 2.0 * (x - a) / L) / np.pi
    else:
        raise DomainError(f"unknown singularity declaration {singular!r}")

    def g(t):
        y = _evaluate(f, xmap(t))
        return y * jac(t).reshape((-1,) + (1,) * (y.ndim - 1))

    tpoints = [float(tmap(p)) for p in points if a < p < b]
    return _adaptive(_gk21_rule(g), _edges(0.0, 1.0, tpoints), config)


def integrate_semi_infinite(f: Callable, a: float, decay_scale: float,
                            config: QuadratureConfig | None = None, *,
                            points: Sequence[float] = ()) -> QuadResult:
    """Integrate ``f`` over ``[a, inf)``.

    The range is mapped onto [0, 1) by ``x = a + s t / (1 - t)`` with ``s`` the
    declared decay scale, which turns exponential as well as algebraic decay
    into a bounded integrand.  The far tail, beyond the point where
    ``exp(-(x - a)/s)`` falls below ``tail_cut``, is integrated as its own
    panel; if it carries more than half of the result the decay scale was
    misdeclared and :class:`DecayMisdeclaredError` is raised.
    """
    config = _as_config(config)
    s = float(decay_scale)
    if not s > 0:
        raise DomainError("decay_scale must be positive")
    a = float(a)

    def g(t):
        one_minus = 1.0 - t
        x = a + s * t / one_minus
        y = _evaluate(f, x)
        return y * (s / one_minus ** 2).reshape((-1,) + (1,) * (y.ndim - 1))

    x_cut = a + s * np.log(1.0 / config.tail_cut)
    t_cut = (x_cut - a) / (s + x_cut - a)
    tpoints = [(p - a) / (s + p - a) for p in points if p > a]
    edges = _edges(0.0, 1.0, tpoints + [t_cut])
    panels = []
    res = _adaptive(_gk21_rule(g), edges, config, panels=panels)
    left, vals = panels
    tail = np.sum(vals[left >= t_cut * (1 - 1e-15)], axis=0)
    big = np.abs(res.value) > config.abs_tol
    if np.any(big & (np.abs(tail) > 0.5 * np.abs(res.value))):
        raise DecayMisdeclaredError(
            f"more than half of the integral lies beyond x = {x_cut:.4g}; "
            f"decay scale {s:.4g} is too small", res)
    return res


def integrate_oscillatory(f_envelope: Callable, phase_rate: float, a: float, b: float,
                          config: QuadratureConfig | None = None, *,
                          points: Sequence[float] = ()) -> QuadResult:
    """Integrate ``f_envelope(x) * exp(i * phase_rate * x)`` over ``[a, b]``.

    When the range spans more than ``oscillatory_threshold`` phase cycles the
    Filon-Legendre rule is used, so the cost is governed by the smoothness of
    the envelope and not by the number of oscillations.  Otherwise the full
    integrand goes through the Gauss-Kronrod path.
    """
    config = _as_config(config)
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError(f"integrate_oscillatory needs a < b, got [{a}, {b}]")
    w = float(phase_rate)
    cycles = abs(w) * (b - a) / (2 * np.pi)
    edges = _edges(a, b, points)
    if cycles > config.oscillatory_threshold:
        return _adaptive(_filon_rule(f_envelope, w), edges, config, "oscillatory integral")

    def full(x):
        y = _evaluate(f_envelope, x)
        return y * np.exp(1j * w * x).reshape((-1,) + (1,) * (y.ndim - 1))

    return _adaptive(_gk21_rule(full), edges, config, "oscillatory integral")
