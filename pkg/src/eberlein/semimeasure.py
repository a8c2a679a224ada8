"""Fourier transformable semi-measures, stored through their dual measure.

A semi-measure ``theta`` on ``G`` with Fourier transform ``nu`` acts on
``f in K2(G)`` by ``theta(f) = int f check d nu``.  Every operation here works
on the dual side; the primal definitions (translation, reflection,
convolution ``(theta * f)(t) = theta(T_t f_dagger)``) are used as
cross-checks in the test suite.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import funcspace as fs
from .group import GroupSpec, character_eval, dual, grid_transform, transform_at
from .measure import (
    ConcreteMeasure,
    fourier_transform_measure,
    jordan_hahn,
    pair,
    weak_admissibility_probe,
)
from .report import ProbeReport

__all__ = [
    "SemiMeasure",
    "NotWeaklyAdmissible",
    "ConvergenceError",
    "from_dual",
    "lift",
    "evaluate",
    "convolve",
    "convolve_primal",
    "translate",
    "tilde",
    "dagger",
    "is_positive_definite",
    "split_positive_definite",
    "standard_battery",
    "random_battery",
]

CONSTRUCTED = "constructed_from_dual"
LIFTED = "lifted_from_measure"


class NotWeaklyAdmissible(ValueError):
    def __init__(self, report: ProbeReport):
        self.report = report
        super().__init__(f"not weakly admissible (witness: {report.witnesses[:1]})")


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SemiMeasure:
    group: GroupSpec
    dual_measure: ConcreteMeasure
    provenance: str = CONSTRUCTED
    original: ConcreteMeasure | None = None

    def __add__(self, other: "SemiMeasure") -> "SemiMeasure":
        _same(self, other)
        return SemiMeasure(self.group, self.dual_measure + other.dual_measure)

    def __mul__(self, c) -> "SemiMeasure":
        return SemiMeasure(self.group, self.dual_measure * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __call__(self, f) -> complex:
        return evaluate(self, f)


def _same(a: SemiMeasure, b: SemiMeasure):
    if a.group != b.group:
        raise ValueError("semi-measures live on different groups")


@functools.lru_cache(maxsize=32)
def standard_battery(group: GroupSpec) -> tuple:
    """Smooth K2 functions used to certify weak admissibility.

    Line: ``g * g~`` for smooth bumps, so ``f check`` decays like the square of a
    bump transform.  Finite: point masses (any finite battery is decisive).
    """
    if group.is_finite:
        return (fs.k2_from_pair(fs.delta(group, [0] * group.ndim), fs.delta(group, [0] * group.ndim)),)
    # wide enough that f check has decayed well inside the dual window |xi| <= 1/(2h)
    r = min(max(1.0, 320.0 * group.h), group.L / 8.0)
    out = []
    for c, rad in ((0.0, r), (r, r / 2), (-r / 2, r / 2)):
        g = fs.smooth_bump(group, rad / 2, center=c)
        out.append(fs.k2_from_pair(g, fs.tilde_compact(g)))
    return tuple(out)


def from_dual(nu: ConcreteMeasure, check: bool = True, provenance: str = CONSTRUCTED,
              original: ConcreteMeasure | None = None) -> SemiMeasure:
    """The semi-measure ``f -> int f check d nu``; ``nu`` must be weakly admissible."""
    G = dual(nu.group)
    if check:
        rep = weak_admissibility_probe(nu, standard_battery(G))
        if not rep.passed:
            raise NotWeaklyAdmissible(rep)
    return SemiMeasure(G, nu, provenance, original)


def lift(mu: ConcreteMeasure) -> SemiMeasure:
    """A measure viewed as a semi-measure, via its Fourier transform."""
    return from_dual(fourier_transform_measure(mu), provenance=LIFTED, original=mu)


def _check_values(sm: SemiMeasure, f):
    G = sm.group
    samples = f.samples if hasattr(f, "samples") else np.asarray(f)
    nu = sm.dual_measure
    dens = grid_transform(G, samples, +1) if nu.density is not None else None
    return samples, dens


def evaluate_with_tail(sm: SemiMeasure, f) -> tuple[complex, float]:
    """``theta(f)`` and the share of ``int |f check| d|nu|`` beyond half the dual window."""
    G = sm.group
    nu = sm.dual_measure
    samples, dens = _check_values(sm, f)
    at = lambda pts: transform_at(G, samples, pts, +1)
    value = 0j
    total = tail = 0.0
    gd = nu.group
    if dens is not None:
        w = gd.haar_weights()
        value += np.sum(nu.density * dens * w)
        a = np.abs(nu.density * dens) * w
        total += float(a.sum())
        if not gd.is_finite:
            tail += float(a[np.abs(gd.grid()) > gd.L / 2].sum())
    for pts, wts in ((nu.atom_points, nu.atom_weights), (nu.sc_points, nu.sc_weights)):
        if wts is None or not len(wts):
            continue
        vals = at(pts)
        value += np.dot(wts, vals)
        a = np.abs(wts * vals)
        total += float(a.sum())
        if not gd.is_finite:
            tail += float(a[np.abs(pts[:, 0]) > gd.L / 2].sum())
    return complex(value), (tail / total if total > 0 else 0.0)


def evaluate(sm: SemiMeasure, f, rtol: float | None = 1e-2) -> complex:
    """``theta(f) = int f check d nu``.

    On the line, raises ``ConvergenceError`` when more than ``rtol`` of
    ``int |f check| d|nu|`` sits in the outer half of the dual window.
    """
    value, tail = evaluate_with_tail(sm, f)
    if rtol is not None and tail > rtol:
        raise ConvergenceError(f"evaluation did not converge (tail share {tail:.3g})")
    return value


def convolve(sm: SemiMeasure, f, t_grid=None) -> np.ndarray:
    """``(theta * f)(t) = int chi(t) f^(chi) d nu(chi)``.

    Returns samples on the whole grid of ``G`` when ``t_grid`` is None, else
    values at the given points.
    """
    G = sm.group
    nu = sm.dual_measure
    gd = nu.group
    samples = f.samples if hasattr(f, "samples") else np.asarray(f)
    if t_grid is None:
        out = np.zeros(G.shape, dtype=complex)
        if nu.density is not None:
            fhat = grid_transform(G, samples, -1)
            out += grid_transform(gd, nu.density * fhat, +1)
        t = G.points()
    else:
        t = np.asarray(t_grid, dtype=float).reshape(-1, G.ndim)
        out = np.zeros(len(t), dtype=complex)
        if nu.density is not None:
            fhat = grid_transform(G, samples, -1)
            out += transform_at(gd, nu.density * fhat, t, +1)
    flat = out.reshape(-1)
    for pts, wts in ((nu.atom_points, nu.atom_weights), (nu.sc_points, nu.sc_weights)):
        if wts is None or not len(wts):
            continue
        coef = wts * transform_at(G, samples, pts, -1)
        for s in range(0, len(t), 2048):
            chars = character_eval(G, pts[None, :, :] if G.is_finite else pts[None, :, 0],
                                   t[s:s + 2048, None, :] if G.is_finite else t[s:s + 2048, None, 0])
            flat[s:s + 2048] += chars @ coef
    return out


def convolve_primal(sm: SemiMeasure, f: fs.K2Function, t) -> complex:
    """``theta(T_t f_dagger)``, the defining formula of ``theta * f`` at one point."""
    return evaluate(sm, fs.translate(fs.dagger(f), t), rtol=None)


# -- symmetries -----------------------------------------------------------------


def translate(sm: SemiMeasure, t) -> SemiMeasure:
    """``T_t theta``: the dual measure is modulated by ``conj(chi(t))``."""
    nu = sm.dual_measure
    G = sm.group
    gd = nu.group
    tt = np.asarray(t, dtype=float)

    def mod(pts):
        if G.is_finite:
            return np.conj(character_eval(G, pts, tt))
        return np.conj(character_eval(G, pts[:, 0], float(tt)))

    dens = None
    if nu.density is not None:
        chis = gd.grid() if not gd.is_finite else gd.grid()
        dens = nu.density * (np.conj(character_eval(G, chis, tt)) if G.is_finite
                             else np.conj(character_eval(G, chis, float(tt))))
    new = nu.replace(
        atom_weights=nu.atom_weights * mod(nu.atom_points) if len(nu.atom_weights) else nu.atom_weights,
        density=dens,
        sc_weights=None if nu.sc_weights is None else nu.sc_weights * mod(nu.sc_points),
    )
    return SemiMeasure(G, new)


def tilde(sm: SemiMeasure) -> SemiMeasure:
    """``theta~(g) = conj(theta(g~))``: conjugate dual weights, same support."""
    return SemiMeasure(sm.group, sm.dual_measure.map_values(np.conj))


def dagger(sm: SemiMeasure) -> SemiMeasure:
    """``theta_dagger(g) = theta(g_dagger)``: the dual measure is reflected."""
    nu = sm.dual_measure
    gd = nu.group
    dens = None
    if nu.density is not None:
        dens = fs._reflect(gd, nu.density)
    new = nu.replace(
        atom_points=-nu.atom_points,
        density=dens,
        sc_points=None if nu.sc_points is None else -nu.sc_points,
    )
    return SemiMeasure(sm.group, new)


# -- positivity -------------------------------------------------------------------


def random_battery(group: GroupSpec, size: int = 64, seed: int = 0, max_pieces: int = 4,
                   U: float | None = None) -> list[fs.CompactFunction]:
    """Deterministic random test functions built from at most ``max_pieces`` atoms/bumps."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        k = int(rng.integers(1, max_pieces + 1))
        if group.is_finite:
            s = np.zeros(group.order, dtype=complex)
            idx = rng.integers(0, group.order, size=k)
            s[idx] += rng.normal(size=k) + 1j * rng.normal(size=k)
            out.append(fs.CompactFunction(group, s.reshape(group.shape)))
        else:
            span = U if U is not None else min(2.0, group.L / 4)
            f = None
            for _ in range(k):
                rad = float(rng.uniform(0.2, 0.5)) * span
                c = float(rng.uniform(-span + rad, span - rad)) if span > rad else 0.0
                c = round(c / group.h) * group.h
                b = fs.smooth_bump(group, rad, center=c, height=float(rng.normal()))
                f = b if f is None else f + b
            out.append(f)
    return out


def _dual_sign_check(nu: ConcreteMeasure, tol: float):
    bad = []
    for name, pts, vals in (("atom", nu.atom_points, nu.atom_weights),
                            ("sc", nu.sc_points, nu.sc_weights)):
        if vals is None:
            continue
        m = (vals.real < -tol) | (np.abs(vals.imag) > tol)
        for p, v in zip(pts[m], vals[m]):
            bad.append({"kind": name, "point": p.tolist(), "weight": complex(v)})
    if nu.density is not None:
        d = nu.density.reshape(-1)
        m = (d.real < -tol) | (np.abs(d.imag) > tol)
        pts = nu.group.points()[m]
        for p, v in list(zip(pts, d[m]))[:16]:
            bad.append({"kind": "density", "point": p.tolist(), "value": complex(v)})
    return bad


def exhaustive_gram(sm: SemiMeasure) -> np.ndarray:
    """``A[x, y] = theta(delta_x * delta_y~) = theta(delta_{x-y})`` on a finite group."""
    G = sm.group
    pts = G.points()
    c = np.array([evaluate(sm, fs.delta(G, p), rtol=None) for p in pts])
    diff = G.index_of(pts[:, None, :] - pts[None, :, :])
    return c[diff.reshape(len(pts), len(pts))]


def is_positive_definite(sm: SemiMeasure, size: int = 64, seed: int = 0, tol: float | None = None) -> ProbeReport:
    """Bochner: positive definite iff the dual measure is positive.

    The verdict is the dual-side sign check.  Independently the primal form
    ``theta(f * f~)`` is checked: exhaustively through the Gram matrix on
    finite groups, over a seeded random battery on the line.
    """
    nu = sm.dual_measure
    G = sm.group
    if tol is None:
        if G.is_finite:
            tol = 1e-12
        else:
            scale = max(1.0, float(np.max(np.abs(nu.density)))) if nu.density is not None else 1.0
            tol = 1e-6 * scale
    bad = _dual_sign_check(nu, tol)
    dual_ok = not bad
    details = {"dual_side": "positive" if dual_ok else "not positive"}
    direct_witnesses = []
    if G.is_finite:
        A = exhaustive_gram(sm)
        herm = float(np.max(np.abs(A - A.conj().T)))
        evals, evecs = np.linalg.eigh(0.5 * (A + A.conj().T))
        scale = max(1.0, float(np.max(np.abs(A))))
        details.update(gram_min_eigenvalue=float(evals[0]), gram_hermitian_gap=herm)
        direct_ok = herm <= 1e-9 * scale and evals[0] >= -1e-9 * scale
        if not direct_ok:
            direct_witnesses.append({"f": evecs[:, 0].reshape(G.shape),
                                     "theta(f*f~)": complex(evecs[:, 0].conj() @ A @ evecs[:, 0])})
    else:
        direct_ok = True
        worst = np.inf
        for i, f in enumerate(random_battery(G, size, seed)):
            q = evaluate(sm, fs.k2_from_pair(f, fs.tilde_compact(f)), rtol=None)
            mass = _quadratic_mass(sm, f)
            worst = min(worst, q.real / max(mass, 1e-300))
            if q.real < -tol * max(mass, 1.0) or abs(q.imag) > tol * max(mass, 1.0):
                direct_ok = False
                direct_witnesses.append({"battery_index": i, "theta(f*f~)": q})
        details["min_normalised_form"] = float(worst)
    details["direct_check"] = "nonnegative" if direct_ok else "negative witness found"
    if dual_ok and not direct_ok:
        verdict = "inconclusive"
    else:
        verdict = "pass" if dual_ok else "fail"
    witnesses = bad + direct_witnesses
    if verdict == "fail" and not witnesses:
        witnesses = [{"kind": "dual", "note": "negative dual mass"}]
    return ProbeReport(verdict, "dual positivity + direct theta(f*f~) >= 0", trace=[],
                       witnesses=witnesses, tolerances={"dual_tol": tol, "direct_tol": 1e-9 if G.is_finite else tol},
                       notes="positive definite" if verdict == "pass" else "", details=details)


def _quadratic_mass(sm: SemiMeasure, f: fs.CompactFunction) -> float:
    from .measure import abs_check_integral, total_variation

    f2 = fs.k2_from_pair(f, fs.tilde_compact(f))
    return abs_check_integral(total_variation(sm.dual_measure), f2)


def split_positive_definite(sm: SemiMeasure):
    """``theta = theta1 - theta2 + i(theta3 - theta4)`` with positive definite parts.

    Weak admissibility passes to each part since ``|rho_j| <= |nu|``.
    """
    return tuple(from_dual(r, check=False) for r in jordan_hahn(sm.dual_measure))


def combine_split(parts) -> SemiMeasure:
    s1, s2, s3, s4 = parts
    return s1 - s2 + 1j * (s3 - s4)
