"""Command-line front end.

Usage::

    halfspace-qed SUBCOMMAND [--config PATH] [--out PATH] [--format csv|json]
                             [--tol REL] [--jobs N]

Subcommands: ``medium``, ``shift``, ``rates``, ``verify``, ``coefficients``,
``dyson``.  Exit codes: 0 success, 2 configuration error, 3 numerical
non-convergence, 4 verification failure.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

from . import __version__
from .atom import AtomModel, two_level
from .errors import ConfigError, DomainError, HalfspaceError, QuadratureError
from .medium import LorentzMedium, permittivity, permittivity_imag_axis
from .observables import (c4_coefficients, c5_coefficients, excited_residue_nonretarded,
                          excited_residue_retarded, ground_shift_nonretarded,
                          ground_shift_retarded_asymptotic, normalized_lifetime,
                          rate_change_nonretarded, total_shift_and_rate)
from .optics import fresnel_left, fresnel_right
from .propagator import (boundary_residuals, convergence_check, dyson_factor_numeric,
                         reflected_equal_point, retarded_green_reflected)
from .quadrature import QuadratureConfig

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4

DEFAULTS = {
    "medium": {"omega_T": 1.0, "omega_P": 1.0, "gamma": 0.1},
    "atom": {"levels": [["g", 0.0], ["e", 1.0]],
             "transitions": [{"pair": ["g", "e"], "mu_par_sq": 1.0, "mu_perp_sq": 0.0}]},
    "state": None,
    "distances": {"min": 0.01, "max": 10.0, "count": 25, "spacing": "log"},
    "frequencies": {"min": 0.1, "max": 3.0, "count": 30, "spacing": "linear"},
    "gammas": [0.05, 0.5, 5.0],
    "rate_distances": [0.1, 1.0],
    "n_grid": {"min": 1.001, "max": 10.0, "count": 40, "spacing": "log"},
    "dyson_q": [0.0, 0.2, 0.5, 1.5],
    "quadrature": {},
    "verify": {"samples": 1000, "points": 20, "seed": 12345, "corrupt_branch": False},
}


# ---------------------------------------------------------------------------
# configuration

def _grid(spec, name):
    try:
        lo, hi, count = float(spec["min"]), float(spec["max"]), int(spec["count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"grid {name!r} needs min, max and count") from exc
    spacing = spec.get("spacing", "linear")
    if count < 1:
        raise ConfigError(f"grid {name!r}: count must be >= 1")
    if count > 1 and not lo < hi:
        raise ConfigError(f"grid {name!r}: need min < max")
    if spacing == "log":
        if lo <= 0:
            raise ConfigError(f"grid {name!r}: log spacing needs min > 0")
        return np.geomspace(lo, hi, count) if count > 1 else np.array([lo])
    if spacing != "linear":
        raise ConfigError(f"grid {name!r}: spacing must be 'linear' or 'log'")
    return np.linspace(lo, hi, count) if count > 1 else np.array([lo])


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


@dataclass
class RunConfig:
    """Fully resolved run configuration (defaults merged with the user file)."""

    raw: dict
    medium: LorentzMedium
    atom: AtomModel
    state: str
    quad: QuadratureConfig
    fmt: str = "csv"
    jobs: int = 1
    extras: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path=None, *, fmt=None, tol=None, jobs=1):
        user = {}
        if path is not None:
            try:
                with open(path) as fh:
                    user = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
            if isinstance(user, dict) and "meta" in user and "rows" in user:
                user = user["meta"].get("config", {})
            if not isinstance(user, dict):
                raise ConfigError("config must be a JSON object")
        raw = _merge(DEFAULTS, user)
        if tol is not None:
            raw["quadrature"] = dict(raw["quadrature"], rel_tol=tol)
        if fmt is not None:
            raw["format"] = fmt
        raw.setdefault("format", "csv")
        return cls.from_dict(raw, jobs=jobs)

    @classmethod
    def from_dict(cls, raw, jobs=1):
        try:
            med = raw["medium"]
            medium = LorentzMedium(float(med["omega_T"]), float(med["omega_P"]), float(med["gamma"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"medium needs omega_T, omega_P, gamma: {exc}") from exc
        atom = AtomModel.from_dict(raw["atom"])
        state = raw.get("state") or atom.ground
        atom.frequency(state)
        try:
            quad = QuadratureConfig(**raw.get("quadrature", {}))
        except (TypeError, DomainError) as exc:
            raise ConfigError(f"bad quadrature settings: {exc}") from exc
        fmt = raw.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        raw = copy.deepcopy(raw)
        raw["state"] = state
        return cls(raw, medium, atom, state, quad, fmt, jobs)

    def grid(self, name):
        return _grid(self.raw[name], name)


def natural_dipole_sq(mu_si: float, omega_ref: float) -> float:
    """Squared dipole (C m) in natural units for reference frequency ``omega_ref`` (rad/s).

    ``mu^2 omega_ref^2 / (eps0 hbar c^3)``: with frequencies in units of
    ``omega_ref`` and lengths in ``c / omega_ref`` this makes the free-space
    rate ``omega^3 mu^2 / (3 pi)`` come out in units of ``omega_ref``.
    """
    return mu_si ** 2 * omega_ref ** 2 / (constants.epsilon_0 * constants.hbar * constants.c ** 3)


def natural_distance(z_si: float, omega_ref: float) -> float:
    """Distance (m) in units of ``c / omega_ref``."""
    return z_si * omega_ref / constants.c


# ---------------------------------------------------------------------------
# commands; each returns (columns, rows, extra_meta, ok)

def _pmap(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def cmd_medium(cfg: RunConfig):
    cols = ["omega", "eps_re", "eps_im", "eps_imag_axis"]
    rows = []
    for w in cfg.grid("frequencies"):
        e = complex(permittivity(cfg.medium, w))
        rows.append([float(w), e.real, e.imag, float(permittivity_imag_axis(cfg.medium, abs(w)))])
    return cols, rows, {}, True


def _dominant(cfg):
    ps = cfg.atom.partners(cfg.state)
    if not ps:
        return 1.0
    p = max(ps, key=lambda p: p.mu_par_sq + p.mu_perp_sq)
    return abs(p.omega_mi)


def _shift_row(args):
    raw, Z = args
    cfg = RunConfig.from_dict(raw)
    b = total_shift_and_rate(cfg.medium, cfg.atom, cfg.state, Z, cfg.quad)
    nonret = ground_shift_nonretarded(cfg.medium, cfg.atom, Z, cfg.quad, state=cfg.state)
    nonret += excited_residue_nonretarded(cfg.medium, cfg.atom, cfg.state, Z).real
    try:
        ret = ground_shift_retarded_asymptotic(cfg.medium, cfg.atom, Z, state=cfg.state)
    except DomainError:
        ret = math.nan
    ret += excited_residue_retarded(cfg.medium, cfg.atom, cfg.state, Z).real
    w = _dominant(cfg)
    return [Z, b.nonresidue, b.residue.real, b.residue.imag, b.total_shift, b.rate_change,
            nonret, ret, b.total_shift * Z ** 4 * w, abs(b.total_shift - ret)]


def cmd_shift(cfg: RunConfig):
    cols = ["z", "nonresidue", "residue_re", "residue_im", "total_shift", "rate_change",
            "nonretarded", "retarded", "shift_z4_w", "retarded_residual"]
    zs = [float(z) for z in cfg.grid("distances")]
    rows = _pmap(_shift_row, [(cfg.raw, z) for z in zs], cfg.jobs)
    return cols, rows, {"state": cfg.state, "omega_dominant": _dominant(cfg)}, True


def _rates_row(args):
    raw, gamma, Z, w = args
    cfg = RunConfig.from_dict(raw)
    med = cfg.medium.with_gamma(gamma)
    par, perp = _rate_dipoles(cfg)
    atom = two_level(w, par, perp)
    tau = normalized_lifetime(med, atom, "e", "g", Z, cfg.quad)
    g0 = w ** 3 * (par + perp) / (3 * math.pi)
    return [gamma, Z, w / cfg.medium.omega_T, tau, rate_change_nonretarded(med, atom, "e", Z) / g0]


def _rate_dipoles(cfg):
    spec = cfg.raw.get("rate_dipole", {"mu_par_sq": 1.0, "mu_perp_sq": 0.0})
    return float(spec.get("mu_par_sq", 1.0)), float(spec.get("mu_perp_sq", 0.0))


def cmd_rates(cfg: RunConfig):
    cols = ["gamma", "z", "omega_over_omega_T", "tau_inv", "tau_inv_nonretarded"]
    items = [(cfg.raw, float(g), float(z), float(w) * cfg.medium.omega_T)
             for g in cfg.raw["gammas"] for z in cfg.raw["rate_distances"]
             for w in cfg.grid("frequencies")]
    rows = _pmap(_rates_row, items, cfg.jobs)
    return cols, rows, {"dipole": dict(zip(("mu_par_sq", "mu_perp_sq"), _rate_dipoles(cfg)))}, True


def cmd_coefficients(cfg: RunConfig):
    cols = ["n", "c4_par", "c4_perp", "c5_par", "c5_perp"]
    rows, skipped = [], []
    for n in cfg.grid("n_grid"):
        if not n > 1:
            skipped.append(float(n))
            continue
        rows.append([float(n), *c4_coefficients(n), *c5_coefficients(n)])
    return cols, rows, {"skipped_n": skipped, "c4_variant": "consistent"}, True


def cmd_dyson(cfg: RunConfig):
    cols = ["omega", "q", "polarization", "numeric_re", "numeric_im", "closed_re", "closed_im",
            "rel_error", "convergent"]
    rows, skipped = [], []
    for w in cfg.grid("frequencies"):
        for q in cfg.raw["dyson_q"]:
            if abs(abs(w) - q) <= 1e-9 * max(1.0, abs(w)):
                skipped.append([float(w), float(q)])
                continue
            fr = fresnel_right(cfg.medium, w, q)
            conv = convergence_check(cfg.medium, w, q).convergent
            for lam, r in (("TE", fr.r_TE), ("TM", fr.r_TM)):
                closed = r * r / (1 - r * r)
                num = dyson_factor_numeric(cfg.medium, w, q, lam, cfg.quad)
                err = abs(num - closed) / max(abs(closed), 1e-300)
                rows.append([float(w), float(q), lam, num.real, num.imag, closed.real, closed.imag,
                             err, conv])
    return cols, rows, {"skipped_light_cone": skipped}, True


# verification suites ---------------------------------------------------------

def _random_media(rng, count, gamma_min=0.0):
    out = []
    for _ in range(count):
        out.append(LorentzMedium(float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.0, 3.0)),
                                 float(rng.uniform(gamma_min, 0.9))))
    return out


def suite_fresnel(samples, rng, tol=1e-12):
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        media = _random_media(rng, samples, 1e-3)
    for med in media:
        w = float(rng.uniform(0.05, 4.0)) * rng.choice([-1, 1])
        q = float(rng.uniform(0.0, 6.0))
        fr, fl = fresnel_right(med, w, q), fresnel_left(med, w, q)
        for r, t, rl, tl in ((fr.r_TE, fr.t_TE, fl.r_TE, fl.t_TE), (fr.r_TM, fr.t_TM, fl.r_TM, fl.t_TM)):
            lhs = 1 - r * r
            worst = max(worst, abs(lhs - t * tl) / max(abs(lhs), abs(t * tl)), abs(rl + r) / abs(r) if r else 0)
    return worst, tol


def _dyson_points(rng, count):
    pts = []
    while len(pts) < count:
        med = LorentzMedium(1.0, float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.2, 0.9)))
        w = float(rng.uniform(0.2, 2.0))
        q = float(rng.uniform(0.0, 2.5))
        if abs(q - w) < 1e-3:
            continue
        if convergence_check(med, w, q).convergent:
            pts.append((med, w, q))
    return pts


def suite_dyson(points, rng, quad, tol=1e-6):
    worst = 0.0
    for med, w, q in _dyson_points(rng, points):
        fr = fresnel_right(med, w, q)
        for lam, r in (("TE", fr.r_TE), ("TM", fr.r_TM)):
            closed = r * r / (1 - r * r)
            num = dyson_factor_numeric(med, w, q, lam, quad)
            worst = max(worst, abs(num - closed) / abs(closed))
    return worst, tol


def suite_boundary(points, rng, corrupt=False, tol=1e-8):
    worst = 0.0
    for med in _random_media(rng, points, 1e-3):
        w = float(rng.uniform(0.1, 3.0))
        qv = rng.uniform(-2.0, 2.0, size=2)
        for source, zp in (("vacuum", float(rng.uniform(0.1, 2.0))), ("medium", -float(rng.uniform(0.1, 2.0)))):
            res = boundary_residuals(med, w, qv, zp, source=source, corrupt_branch=corrupt)
            worst = max(worst, *res.values())
    return worst, tol


def suite_green(points, rng, quad, tol=1e-8):
    worst = 0.0
    for med in _random_media(rng, points, 0.01):
        w = float(rng.uniform(0.2, 2.0))
        Z = float(rng.uniform(0.2, 3.0))
        d = reflected_equal_point(med, Z, w, quad).as_array()
        g = retarded_green_reflected(med, Z, w, quad)
        worst = max(worst, float(np.max(np.abs(d + w * w * g)) / max(np.max(np.abs(d)), 1e-300)))
    return worst, tol


def cmd_verify(cfg: RunConfig):
    v = cfg.raw["verify"]
    seed = int(v.get("seed", 12345))
    n_pts = int(v.get("points", 20))
    corrupt = bool(v.get("corrupt_branch", False))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = [
            ("fresnel_identity", *suite_fresnel(int(v.get("samples", 1000)), np.random.default_rng(seed))),
            ("dyson_factor", *suite_dyson(n_pts, np.random.default_rng(seed + 1), cfg.quad)),
            ("boundary_conditions", *suite_boundary(n_pts, np.random.default_rng(seed + 2), corrupt)),
            ("green_relation", *suite_green(n_pts, np.random.default_rng(seed + 3), cfg.quad)),
        ]
        # points of the configured medium where the Dyson series itself diverges
        divergent = 0
        for w in cfg.grid("frequencies"):
            for q in cfg.raw["dyson_q"]:
                if not convergence_check(cfg.medium, w, q).convergent:
                    divergent += 1
    rows = [[name, worst, tol, bool(worst <= tol)] for name, worst, tol in results]
    ok = all(r[3] for r in rows)
    return ["suite", "max_residual", "tolerance", "passed"], rows, {"divergent_series_points": divergent,
                                                                   "corrupt_branch": corrupt}, ok


COMMANDS = {
    "medium": cmd_medium,
    "shift": cmd_shift,
    "rates": cmd_rates,
    "verify": cmd_verify,
    "coefficients": cmd_coefficients,
    "dyson": cmd_dyson,
}


# ---------------------------------------------------------------------------
# output

def _meta(cfg, command, extra):
    return {
        "command": command,
        "version": __version__,
        "units": "hbar = c = eps0 = 1; frequencies in reference units, distances in c/omega_ref",
        "gamma_nudge": "gamma = 0 replaced by 1e-12 * omega_T inside real-frequency integrals",
        "config": cfg.raw,
        **extra,
    }


def _plain(x):
    if isinstance(x, np.generic):
        x = x.item()
    return x


def render(cols, rows, meta, fmt):
    rows = [[_plain(x) for x in r] for r in rows]
    if fmt == "json":
        return json.dumps({"meta": meta, "rows": [dict(zip(cols, r)) for r in rows]}, indent=2) + "\n"
    buf = io.StringIO()
    for key, val in meta.items():
        buf.write(f"# {key}: {json.dumps(val, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def build_parser():
    p = argparse.ArgumentParser(prog="halfspace-qed",
                                description="Casimir-Polder shifts and decay rates near an absorbing half-space.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run configuration (or a previous JSON output)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--tol", type=float, default=None, help="relative quadrature tolerance")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--corrupt-branch", action="store_true", help=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config, fmt=args.format, tol=args.tol, jobs=args.jobs)
        if args.corrupt_branch:
            cfg.raw["verify"]["corrupt_branch"] = True
        cols, rows, extra, ok = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (HalfspaceError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = render(cols, rows, _meta(cfg, args.command, extra), cfg.fmt)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not ok:
        print("verification failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
