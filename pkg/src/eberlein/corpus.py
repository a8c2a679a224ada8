"""Named semi-measures and measures with known structure.

Each entry of :data:`CORPUS` records the properties the test suite asserts
against the live implementation: positive definiteness, whether the
semi-measure is a measure, its Fourier-Bohr atoms and which Lebesgue parts
of the dual are present.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import funcspace as fs
from .group import GroupSpec, RealLine, Finite, dual
from .measure import ConcreteMeasure
from .semimeasure import SemiMeasure, from_dual, lift

__all__ = [
    "DEFAULT_LINE",
    "CorpusEntry",
    "CORPUS",
    "heaviside",
    "delta_t",
    "delta_t_split",
    "dirac_comb",
    "finite_comb",
    "weighted_comb",
    "weighted_comb_semimeasure",
    "sc_approximant_thue_morse",
    "thue_morse_riesz",
    "principal_value",
    "build",
    "GOLDEN",
]

DEFAULT_LINE = RealLine(16.0, 1.0 / 256)
WEIGHTED_COMB_LINE = RealLine(1100.0, 1.0 / 8)


def _line(group):
    g = DEFAULT_LINE if group is None else group
    if g.is_finite:
        raise ValueError("this corpus entry lives on the real line")
    return g


def heaviside(group: GroupSpec | None = None) -> SemiMeasure:
    """``theta(f) = int_0^inf f check``: dual Lebesgue measure on ``[0, inf)``.

    The jump at 0 gets the value 1/2, the trapezoid weight of a half line.
    """
    G = _line(group)
    gd = dual(G)
    xi = gd.grid()
    dens = np.where(xi > 0, 1.0, np.where(xi == 0, 0.5, 0.0))
    return from_dual(ConcreteMeasure.from_density(gd, dens), provenance="corpus:heaviside")


def delta_t(t: float, group: GroupSpec | None = None) -> SemiMeasure:
    """``delta_t`` through its dual density ``exp(-2 pi i t xi)``."""
    G = _line(group)
    gd = dual(G)
    dens = np.exp(-2j * np.pi * t * gd.grid())
    return from_dual(ConcreteMeasure.from_density(gd, dens), provenance=f"corpus:delta_t({t})")


def delta_t_split(t: float, group: GroupSpec | None = None):
    """Closed-form four-way split of ``delta_t``'s dual density.

    ``exp(-2 pi i t xi) = cos_+ - cos_- + i (sin_- - sin_+)`` with
    ``cos = cos(2 pi t xi)`` and ``sin = sin(2 pi t xi)``; returned as the
    densities ``(cos_+, cos_-, sin_-, sin_+)``.
    """
    gd = dual(_line(group))
    ang = 2 * np.pi * t * gd.grid()
    c, s = np.cos(ang), np.sin(ang)
    return (np.maximum(c, 0), np.maximum(-c, 0), np.maximum(-s, 0), np.maximum(s, 0))


def dirac_comb(a: float = 1.0, group: GroupSpec | None = None) -> SemiMeasure:
    """``sum_n delta_{na}``; by Poisson summation its dual is ``(1/a) sum_k delta_{k/a}``.

    Atoms landing exactly on both window edges ``+-L'`` are the same point of
    the cyclic dual grid, so each gets half the mass.
    """
    G = _line(group)
    gd = dual(G)
    kmax = int(np.floor(gd.L * a + 1e-9))
    k = np.arange(-kmax, kmax + 1)
    pts = k / a
    w = np.full(len(k), 1.0 / a)
    edge = np.isclose(np.abs(pts), gd.L, rtol=0, atol=1e-9 * gd.h)
    w[edge] *= 0.5
    return from_dual(ConcreteMeasure.from_atoms(gd, pts, w), provenance=f"corpus:dirac_comb({a})")


def finite_comb(n: int, m: int) -> ConcreteMeasure:
    """Counting measure on the subgroup ``m Z_n`` of ``Z_n`` (``m`` divides ``n``)."""
    if n % m:
        raise ValueError("the subgroup index must divide the group order")
    G = Finite([n])
    pts = np.arange(0, n, m)
    return ConcreteMeasure.from_atoms(G, pts, np.ones(len(pts)))


def weighted_comb(alpha: float, N: int, group: GroupSpec | None = None) -> ConcreteMeasure:
    """``sum_{|n| <= N} exp(2 pi i alpha n) delta_n``."""
    G = WEIGHTED_COMB_LINE if group is None else _line(group)
    if N > G.L:
        raise fs.WindowError()
    n = np.arange(-N, N + 1)
    return ConcreteMeasure.from_atoms(G, n.astype(float), np.exp(2j * np.pi * alpha * n))


def weighted_comb_semimeasure(alpha: float, N: int, group: GroupSpec | None = None) -> SemiMeasure:
    """The lifted comb; its dual density is the shifted Dirichlet kernel ``D_N(xi - alpha)``."""
    return lift(weighted_comb(alpha, N, group))


def thue_morse_riesz(level: int, xi) -> np.ndarray:
    """``P_n(xi) = prod_{k < n} (1 - cos(2 pi 2^k xi))``."""
    xi = np.asarray(xi, dtype=float)
    out = np.ones_like(xi)
    for k in range(level):
        out = out * (1.0 - np.cos(2 * np.pi * 2 ** k * xi))
    return out


def sc_approximant_thue_morse(level: int, group: GroupSpec | None = None) -> ConcreteMeasure:
    """Atomic approximant of the Thue-Morse Riesz product on ``[0, 1)``.

    Atoms at ``j / 2^(n+1)`` carry ``P_n(j / 2^(n+1)) / 2^(n+1)``.  ``P_n`` is a
    trigonometric polynomial of degree below ``2^n``, so this grid integrates
    it exactly and the masses sum to its mean, 1.  The result is tagged sc.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    g = dual(DEFAULT_LINE) if group is None else group
    q = 2 ** (level + 1)
    pts = np.arange(q) / q
    w = thue_morse_riesz(level, pts) / q
    keep = w > 0
    return ConcreteMeasure.sc_approximant(g, pts[keep], w[keep], level)


# -- principal values ---------------------------------------------------------------


def principal_value(f, k_min: int = 2, k_max: int = 6) -> complex:
    """``p.v. int f(t)/t dt`` for a function sampled on a line grid.

    The excised integral ``I(delta) = int_{|t| > delta} f(t)/t dt`` is computed
    with trapezoid weights for ``delta = h 2^k`` and extrapolated to
    ``delta = 0``.  For smooth ``f``, ``I(delta) = I(0) - 2 f'(0) delta + O(delta^2)``,
    so a Richardson table in ``delta`` removes the error term by term.
    """
    g = f.group
    if g.is_finite:
        raise ValueError("principal values are taken on the line")
    x = g.grid()
    vals = f.samples if hasattr(f, "samples") else np.asarray(f)
    w = g.haar_weights()
    est = []
    for k in range(k_max, k_min - 1, -1):
        d = g.h * 2 ** k
        m = np.abs(x) >= d - 1e-9 * g.h
        wk = w.copy()
        wk[np.isclose(np.abs(x), d, rtol=0, atol=1e-9 * g.h)] *= 0.5
        est.append(np.sum(vals[m] / x[m] * wk[m]))
    # est[i] uses delta_i = h 2^(k_max - i); Richardson for a series in powers of delta
    table = [np.array(est, dtype=complex)]
    for j in range(1, len(est)):
        prev = table[-1]
        table.append((2 ** j * prev[1:] - prev[:-1]) / (2 ** j - 1))
    return complex(table[-1][-1])


# -- registry ----------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusEntry:
    """A named builder with the structure it is known to have.

    ``expected`` keys: ``positive_definite``, ``is_measure``, ``fb_atoms``
    (mapping frequency to coefficient, or None when not tabulated),
    ``parts`` (the nonempty Lebesgue parts of the dual measure) and optional
    ``fb_average`` (frequencies with the van Hove means they should give).
    """

    name: str
    builder: Callable
    params: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    kind: str = "semimeasure"

    def build(self, **overrides):
        return self.builder(**{**self.params, **overrides})


GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

CORPUS: dict[str, CorpusEntry] = {
    e.name: e
    for e in [
        CorpusEntry("heaviside", heaviside, {},
                    {"positive_definite": True, "is_measure": False, "fb_atoms": {}, "parts": {"ac"}}),
        CorpusEntry("delta_0", delta_t, {"t": 0.0},
                    {"positive_definite": True, "is_measure": True, "fb_atoms": {}, "parts": {"ac"}}),
        CorpusEntry("delta_quarter", delta_t, {"t": 0.25},
                    {"positive_definite": False, "is_measure": True, "fb_atoms": {}, "parts": {"ac"}}),
        CorpusEntry("dirac_comb", dirac_comb, {"a": 1.0},
                    {"positive_definite": True, "is_measure": True, "fb_atoms": {0.0: 1.0, 1.0: 1.0, -2.0: 1.0},
                     "parts": {"pp"}}),
        CorpusEntry("dirac_comb_half", dirac_comb, {"a": 0.5},
                    {"positive_definite": True, "is_measure": True, "fb_atoms": {0.0: 2.0, 2.0: 2.0, -4.0: 2.0},
                     "parts": {"pp"}}),
        CorpusEntry("weighted_comb", weighted_comb_semimeasure, {"alpha": GOLDEN, "N": 1000},
                    {"positive_definite": False, "is_measure": True, "fb_atoms": {}, "parts": {"ac"},
                     "fb_average": {GOLDEN: 1.0, GOLDEN + 0.1: 0.0}}),
        CorpusEntry("thue_morse", lambda level: from_dual(sc_approximant_thue_morse(level),
                                                          provenance=f"corpus:thue_morse({level})"),
                    {"level": 6},
                    {"positive_definite": True, "is_measure": True, "fb_atoms": {}, "parts": {"sc"}}),
        CorpusEntry("finite_comb", finite_comb, {"n": 12, "m": 3},
                    {"positive_definite": True, "is_measure": True,
                     "fb_atoms": {0: 1 / 3, 4: 1 / 3, 8: 1 / 3}, "parts": {"pp"}},
                    kind="measure"),
    ]
}


def build(name: str, **overrides):
    try:
        entry = CORPUS[name]
    except KeyError:
        raise KeyError(f"unknown corpus entry {name!r}; known: {sorted(CORPUS)}") from None
    return entry.build(**overrides)
