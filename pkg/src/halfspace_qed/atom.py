"""Atomic level scheme and squared dipole matrix elements."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import ConfigError, DomainError, ResonanceError, UnknownStateError

__all__ = [
    "AtomModel",
    "Partner",
    "two_level",
    "transition_frequency",
    "static_polarizability",
    "free_space_rate",
]


@dataclass(frozen=True)
class Partner:
    """A dipole partner ``m`` of a state ``i``."""

    label: str
    omega_mi: float
    mu_par_sq: float
    mu_perp_sq: float


@dataclass(frozen=True)
class AtomModel:
    """Levels (label, frequency) and squared dipole elements per transition.

    ``dipole_sq`` maps an unordered pair of labels to ``(mu_par_sq, mu_perp_sq)``
    where ``mu_par_sq = |mu_x|^2 + |mu_y|^2`` and ``mu_perp_sq = |mu_z|^2``.
    Either ordering of the pair may be used as key; lookups are symmetric.
    """

    levels: tuple
    dipole_sq: Mapping = field(default_factory=dict)

    def __post_init__(self):
        levels = tuple((str(lab), float(f)) for lab, f in self.levels)
        labels = [lab for lab, _ in levels]
        if not levels:
            raise ConfigError("an atom needs at least one level")
        if len(set(labels)) != len(labels):
            raise ConfigError("level labels must be unique")
        table = {}
        for key, val in dict(self.dipole_sq).items():
            a, b = (str(k) for k in key)
            for lab in (a, b):
                if lab not in labels:
                    raise UnknownStateError(lab)
            if a == b:
                raise ConfigError(f"diagonal dipole element ({a}, {a}) is not a transition")
            par, perp = (float(v) for v in val)
            if par < 0 or perp < 0 or not (math.isfinite(par) and math.isfinite(perp)):
                raise ConfigError("squared dipole elements must be finite and >= 0")
            pair = frozenset((a, b))
            if pair in table and table[pair] != (par, perp):
                raise ConfigError(f"conflicting dipole entries for {a}<->{b}")
            table[pair] = (par, perp)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "dipole_sq", table)

    @property
    def labels(self) -> list:
        return [lab for lab, _ in self.levels]

    @property
    def ground(self) -> str:
        return min(self.levels, key=lambda lv: lv[1])[0]

    def frequency(self, label: str) -> float:
        for lab, f in self.levels:
            if lab == label:
                return f
        raise UnknownStateError(label)

    def dipole(self, i: str, m: str) -> tuple:
        self.frequency(i)
        self.frequency(m)
        return self.dipole_sq.get(frozenset((i, m)), (0.0, 0.0))

    def partners(self, i: str) -> list:
        """Dipole partners of ``i`` in level order (fixed summation order)."""
        wi = self.frequency(i)
        out = []
        for lab, f in self.levels:
            if lab == i:
                continue
            pair = frozenset((i, lab))
            if pair in self.dipole_sq:
                par, perp = self.dipole_sq[pair]
                out.append(Partner(lab, f - wi, par, perp))
        return out

    def scaled(self, s: float) -> "AtomModel":
        """Copy with every squared dipole element multiplied by ``s``."""
        return AtomModel(self.levels, {tuple(k): (s * v[0], s * v[1])
                                       for k, v in self.dipole_sq.items()})

    @classmethod
    def from_dict(cls, spec: dict) -> "AtomModel":
        """Build from ``{"levels": [[label, freq], ...], "transitions": [...]}``.

        Each transition is ``{"pair": [a, b], "mu_par_sq": ..., "mu_perp_sq": ...}``.
        """
        try:
            levels = [(lv[0], lv[1]) if not isinstance(lv, dict) else (lv["label"], lv["frequency"])
                      for lv in spec["levels"]]
            trans = {}
            for t in spec.get("transitions", []):
                a, b = t["pair"]
                trans[(a, b)] = (t.get("mu_par_sq", 0.0), t.get("mu_perp_sq", 0.0))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"malformed atom specification: {exc}") from exc
        return cls(tuple(levels), trans)

    def to_dict(self) -> dict:
        trans = []
        order = {lab: k for k, lab in enumerate(self.labels)}
        for pair, (par, perp) in sorted(self.dipole_sq.items(),
                                        key=lambda kv: sorted(order[x] for x in kv[0])):
            a, b = sorted(pair, key=order.get)
            trans.append({"pair": [a, b], "mu_par_sq": par, "mu_perp_sq": perp})
        return {"levels": [[lab, f] for lab, f in self.levels], "transitions": trans}


def two_level(omega: float = 1.0, mu_par_sq: float = 1.0, mu_perp_sq: float = 0.0,
              labels: Iterable[str] = ("g", "e")) -> AtomModel:
    """Two-level atom with ground state at 0 and excited state at ``omega``."""
    g, e = labels
    return AtomModel(((g, 0.0), (e, float(omega))), {(g, e): (mu_par_sq, mu_perp_sq)})


def transition_frequency(atom: AtomModel, i: str, m: str) -> float:
    """``omega_mi = omega_m - omega_i``."""
    return atom.frequency(m) - atom.frequency(i)


_AXES = {"x": 0.5, "y": 0.5, "par": 1.0}


def static_polarizability(atom: AtomModel, i: str, axis: str = "z") -> float:
    """Static polarizability ``2 sum_j |<j|mu_axis|i>|^2 / omega_ji``.

    ``axis`` is ``"z"`` (normal to the surface), ``"x"`` or ``"y"`` (each half
    of the stored parallel square, assuming azimuthal symmetry), or
    ``"par"`` for the sum over both tangential axes.

    Raises
    ------
    ResonanceError
        If a dipole partner does not lie above ``i``.
    """
    if axis not in ("x", "y", "z", "par"):
        raise DomainError(f"unknown axis {axis!r}")
    total = 0.0
    for p in atom.partners(i):
        sq = p.mu_perp_sq if axis == "z" else _AXES[axis] * p.mu_par_sq
        if sq == 0.0:
            continue
        if not p.omega_mi > 0:
            raise ResonanceError(f"partner {p.label} of {i} is not above it")
        total += 2.0 * sq / p.omega_mi
    return total


def free_space_rate(atom: AtomModel, i: str, m: str) -> float:
    """Free-space rate ``|omega_mi|^3 |mu_mi|^2 / (3 pi)`` for the pair ``(i, m)``."""
    par, perp = atom.dipole(i, m)
    return abs(transition_frequency(atom, i, m)) ** 3 * (par + perp) / (3.0 * math.pi)
