"""Test functions: compactly supported samples and the convolution span K2.

A ``K2Function`` is stored as its defining term list ``sum_k c_k (g_k * h_k)``
with compactly supported ``g_k, h_k``.  Membership in K2 therefore holds by
construction; the realized samples are recomputed from the terms.

Fourier convention: ``fourier(f, chi) = int conj(chi(t)) f(t) dt`` and
``fourier_inverse(f, chi) = int chi(t) f(t) dt``, both against the Haar weights
of the group.  On a finite group of order ``N`` the forward transform is the
plain DFT and Parseval reads ``sum |f|^2 = (1/N) sum |f^|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .group import GroupSpec, dual, grid_transform, transform_at

__all__ = [
    "CompactFunction",
    "K2Function",
    "WindowError",
    "ResolutionError",
    "k2_from_pair",
    "convolve",
    "tilde",
    "dagger",
    "translate",
    "fourier",
    "fourier_inverse",
    "fourier_grid",
    "fourier_inverse_grid",
    "approximate_identity",
    "box",
    "smooth_bump",
    "delta",
    "sup_norm",
    "lp_norm",
]


class WindowError(ValueError):
    """A support left the sampling window; enlarge ``L``."""

    def __init__(self, msg="window too small"):
        super().__init__(msg)


class ResolutionError(ValueError):
    """The grid cannot resolve the requested approximate-identity step."""

    def __init__(self, msg="resolution exhausted"):
        super().__init__(msg)


Support = tuple  # (a, b) on the line; None on finite groups (whole group)


def _hull(*supports):
    supports = [s for s in supports if s is not None]
    if not supports:
        return None
    return (min(s[0] for s in supports), max(s[1] for s in supports))


def _check_window(group: GroupSpec, support):
    if group.is_finite or support is None:
        return
    tol = 1e-9 * group.h
    if support[0] < -group.L - tol or support[1] > group.L + tol:
        raise WindowError()


@dataclass(frozen=True, eq=False)
class CompactFunction:
    """Grid samples of a compactly supported function.

    On the line ``support`` is a closed interval ``(a, b)`` outside of which
    the samples vanish.  On finite groups the support is the whole group.
    """

    group: GroupSpec
    samples: np.ndarray
    support: Support | None = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.shape != self.group.shape:
            raise ValueError(f"samples of shape {s.shape} do not match grid {self.group.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        if self.group.is_finite:
            object.__setattr__(self, "support", None)
            return
        g = self.group
        if self.support is None:
            nz = np.nonzero(s)[0]
            if len(nz):
                sup = ((nz[0] - g.M) * g.h, (nz[-1] - g.M) * g.h)
            else:
                sup = (0.0, 0.0)
            object.__setattr__(self, "support", sup)
        sup = (float(self.support[0]), float(self.support[1]))
        _check_window(g, sup)
        x = g.grid()
        outside = (x < sup[0] - 1e-9 * g.h) | (x > sup[1] + 1e-9 * g.h)
        if np.any(s[outside] != 0):
            raise ValueError("samples do not vanish outside the declared support")
        object.__setattr__(self, "support", sup)

    @classmethod
    def from_callable(cls, group: GroupSpec, fn: Callable, support=None) -> "CompactFunction":
        x = group.grid()
        vals = np.asarray(fn(x), dtype=complex)
        if group.is_finite:
            return cls(group, vals)
        a, b = support
        inside = (x >= a - 1e-9 * group.h) & (x <= b + 1e-9 * group.h)
        return cls(group, np.where(inside, vals, 0), (a, b))

    def __call__(self, points) -> np.ndarray:
        """Values at arbitrary points; linear interpolation between line nodes."""
        g = self.group
        pts = np.asarray(points, dtype=float).reshape(-1, g.ndim)
        if g.is_finite:
            return self.samples.reshape(-1)[g.index_of(pts)]
        x = pts[:, 0]
        if np.any(np.abs(x) > g.L + 1e-12):
            raise ValueError("point outside the window: function not evaluable there")
        grid = g.grid()
        return np.interp(x, grid, self.samples.real) + 1j * np.interp(x, grid, self.samples.imag)

    def scale(self, c) -> "CompactFunction":
        return CompactFunction(self.group, self.samples * c, self.support)

    def __add__(self, other: "CompactFunction") -> "CompactFunction":
        _same_group(self, other)
        return CompactFunction(self.group, self.samples + other.samples, _hull(self.support, other.support))

    def to_json(self) -> dict:
        vals = [[float(v.real), float(v.imag)] for v in self.samples.reshape(-1)]
        if self.group.is_finite:
            return {"shape": list(self.group.shape), "values": vals}
        g = self.group
        a, b = self.support
        ia, ib = int(round(a / g.h)) + g.M, int(round(b / g.h)) + g.M
        return {"support": [a, b], "step": g.h, "values": vals[ia:ib + 1]}

    @classmethod
    def from_json(cls, group: GroupSpec, d: dict) -> "CompactFunction":
        vals = np.array([complex(re, im) for re, im in d["values"]], dtype=complex)
        if group.is_finite:
            return cls(group, vals.reshape(group.shape))
        if abs(float(d["step"]) - group.h) > 1e-12 * group.h:
            raise ValueError("compact function step does not match the group grid")
        a, b = d["support"]
        ia = int(round(a / group.h)) + group.M
        full = np.zeros(group.shape, dtype=complex)
        full[ia:ia + len(vals)] = vals
        return cls(group, full, (a, b))


def _same_group(*fs):
    g = fs[0].group
    for f in fs[1:]:
        if f.group != g:
            raise ValueError("functions live on different groups")


def _conv_samples(group: GroupSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Haar-weighted convolution of grid samples (cyclic on finite groups)."""
    if group.is_finite:
        return np.fft.ifftn(np.fft.fftn(a) * np.fft.fftn(b)) * group.haar_weight
    M = group.M
    full = fftconvolve(a, b) * group.h
    return full[M:M + 2 * M + 1]


def conv_compact(f: CompactFunction, g: CompactFunction) -> CompactFunction:
    _same_group(f, g)
    group = f.group
    if group.is_finite:
        return CompactFunction(group, _conv_samples(group, f.samples, g.samples))
    sup = (f.support[0] + g.support[0], f.support[1] + g.support[1])
    _check_window(group, sup)
    vals = _conv_samples(group, f.samples, g.samples)
    x = group.grid()
    vals = np.where((x >= sup[0] - 1e-9 * group.h) & (x <= sup[1] + 1e-9 * group.h), vals, 0)
    return CompactFunction(group, vals, sup)


def _tilde_samples(group: GroupSpec, s: np.ndarray) -> np.ndarray:
    return np.conj(_reflect(group, s))


def _reflect(group: GroupSpec, s: np.ndarray) -> np.ndarray:
    if group.is_finite:
        out = s
        for ax in range(s.ndim):
            out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
        return out
    return s[::-1]


def _shift_samples(group: GroupSpec, s: np.ndarray, t) -> np.ndarray:
    if group.is_finite:
        shift = tuple(int(round(v)) for v in np.atleast_1d(t))
        return np.roll(s, shift, axis=tuple(range(s.ndim)))
    k = t / group.h
    if abs(k - round(k)) > 1e-9 * max(1.0, abs(k)):
        raise ValueError("translation must be a multiple of the grid step")
    k = int(round(k))
    out = np.zeros_like(s)
    if k >= 0:
        out[k:] = s[:len(s) - k]
    else:
        out[:k] = s[-k:]
    return out


def tilde_compact(f: CompactFunction) -> CompactFunction:
    sup = None if f.support is None else (-f.support[1], -f.support[0])
    return CompactFunction(f.group, _tilde_samples(f.group, f.samples), sup)


def dagger_compact(f: CompactFunction) -> CompactFunction:
    sup = None if f.support is None else (-f.support[1], -f.support[0])
    return CompactFunction(f.group, _reflect(f.group, f.samples), sup)


def translate_compact(f: CompactFunction, t) -> CompactFunction:
    if f.group.is_finite:
        return CompactFunction(f.group, _shift_samples(f.group, f.samples, t))
    t = float(t)
    sup = (f.support[0] + t, f.support[1] + t)
    _check_window(f.group, sup)
    return CompactFunction(f.group, _shift_samples(f.group, f.samples, t), sup)


@dataclass(frozen=True)
class Term:
    coef: complex
    left: CompactFunction
    right: CompactFunction


@dataclass(frozen=True, eq=False)
class K2Function:
    """``sum_k coef_k * (left_k * right_k)`` with compactly supported factors."""

    group: GroupSpec
    terms: tuple[Term, ...]
    samples: np.ndarray = field(init=False, repr=False)
    support: Support | None = field(init=False)

    def __post_init__(self):
        terms = tuple(self.terms)
        for t in terms:
            if t.left.group != self.group or t.right.group != self.group:
                raise ValueError("term factors live on a different group")
        object.__setattr__(self, "terms", terms)
        vals = np.zeros(self.group.shape, dtype=complex)
        sups = []
        for t in terms:
            c = conv_compact(t.left, t.right)
            vals = vals + complex(t.coef) * c.samples
            sups.append(c.support)
        vals.setflags(write=False)
        object.__setattr__(self, "samples", vals)
        object.__setattr__(self, "support", _hull(*sups) if not self.group.is_finite else None)

    def __call__(self, points) -> np.ndarray:
        return CompactFunction(self.group, self.samples, self.support if self.support else None)(points)

    def as_compact(self) -> CompactFunction:
        if self.group.is_finite:
            return CompactFunction(self.group, self.samples)
        sup = self.support if self.support is not None else (0.0, 0.0)
        return CompactFunction(self.group, self.samples, sup)

    def __add__(self, other: "K2Function") -> "K2Function":
        if other.group != self.group:
            raise ValueError("functions live on different groups")
        return K2Function(self.group, self.terms + other.terms)

    def __mul__(self, c) -> "K2Function":
        return K2Function(self.group, tuple(Term(t.coef * c, t.left, t.right) for t in self.terms))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def to_json(self) -> dict:
        return {
            "terms": [
                {"coef": [complex(t.coef).real, complex(t.coef).imag],
                 "left": t.left.to_json(), "right": t.right.to_json()}
                for t in self.terms
            ]
        }

    @classmethod
    def from_json(cls, group: GroupSpec, d: dict) -> "K2Function":
        terms = tuple(
            Term(complex(*t["coef"]), CompactFunction.from_json(group, t["left"]),
                 CompactFunction.from_json(group, t["right"]))
            for t in d["terms"]
        )
        return cls(group, terms)


def k2_from_pair(g: CompactFunction, h: CompactFunction, coef: complex = 1.0) -> K2Function:
    _same_group(g, h)
    return K2Function(g.group, (Term(coef, g, h),))


def convolve(f: K2Function, g: K2Function) -> K2Function:
    """``f * g`` as a K2 term list: ``(a*b)*(c*d) = ((a*b)*c) * d``."""
    if f.group != g.group:
        raise ValueError("functions live on different groups")
    terms = []
    for s in f.terms:
        ab = conv_compact(s.left, s.right)
        for t in g.terms:
            terms.append(Term(s.coef * t.coef, conv_compact(ab, t.left), t.right))
    return K2Function(f.group, tuple(terms))


def tilde(f: K2Function) -> K2Function:
    return K2Function(f.group, tuple(
        Term(np.conj(t.coef), tilde_compact(t.left), tilde_compact(t.right)) for t in f.terms))


def dagger(f: K2Function) -> K2Function:
    return K2Function(f.group, tuple(
        Term(t.coef, dagger_compact(t.left), dagger_compact(t.right)) for t in f.terms))


def translate(f: K2Function, t) -> K2Function:
    """``T_t f(x) = f(x - t)``."""
    return K2Function(f.group, tuple(
        Term(s.coef, translate_compact(s.left, t), s.right) for s in f.terms))


def _samples(f) -> np.ndarray:
    return f.samples if hasattr(f, "samples") else np.asarray(f)


def fourier(f, chi) -> complex | np.ndarray:
    """``f^(chi) = int conj(chi(t)) f(t) dt`` at one or several dual points."""
    group = f.group
    chis = np.asarray(chi, dtype=float)
    out = transform_at(group, _samples(f), chis, -1)
    return complex(out[0]) if chis.size == group.ndim else out


def fourier_inverse(f, chi) -> complex | np.ndarray:
    """``f check(chi) = f^(conj chi) = int chi(t) f(t) dt``."""
    group = f.group
    chis = np.asarray(chi, dtype=float)
    out = transform_at(group, _samples(f), chis, +1)
    return complex(out[0]) if chis.size == group.ndim else out


def fourier_grid(f) -> np.ndarray:
    """``f^`` on the whole dual grid."""
    return grid_transform(f.group, _samples(f), -1)


def fourier_inverse_grid(f) -> np.ndarray:
    """``f check`` on the whole dual grid."""
    return grid_transform(f.group, _samples(f), +1)


def sup_norm(f) -> float:
    return float(np.max(np.abs(_samples(f))))


def lp_norm(f, p: float) -> float:
    w = f.group.haar_weights()
    return float(np.sum(w * np.abs(_samples(f)) ** p) ** (1.0 / p))


# -- standard building blocks ----------------------------------------------


def delta(group: GroupSpec, point=0) -> CompactFunction:
    """Unit point mass as a function: 1/w at ``point`` so that its integral is 1."""
    s = np.zeros(group.shape, dtype=complex)
    idx = group.index_of(np.atleast_1d(point))
    s.reshape(-1)[idx] = 1.0 / group.haar_weight
    if group.is_finite:
        return CompactFunction(group, s)
    x = float(np.atleast_1d(point)[0])
    return CompactFunction(group, s, (x, x))


def box(group: GroupSpec, halfwidth: float, center: float = 0.0, height: float = 1.0) -> CompactFunction:
    """Indicator of ``[center - halfwidth, center + halfwidth]`` (grid nodes inclusive)."""
    if group.is_finite:
        raise ValueError("use indicator_finite on finite groups")
    return CompactFunction.from_callable(
        group, lambda x: np.full(x.shape, height), (center - halfwidth, center + halfwidth))


def smooth_bump(group: GroupSpec, radius: float, center: float = 0.0, height: float = 1.0) -> CompactFunction:
    """``height * exp(1 - 1/(1 - u^2))`` with ``u = (x - center)/radius``; peak ``height``."""

    def fn(x):
        u = (x - center) / radius
        out = np.zeros(x.shape)
        m = np.abs(u) < 1
        out[m] = np.exp(1.0 - 1.0 / (1.0 - u[m] ** 2))
        return height * out

    return CompactFunction.from_callable(group, fn, (center - radius, center + radius))


def indicator_finite(group: GroupSpec, halfwidths: Sequence[int], height: float = 1.0) -> CompactFunction:
    """Symmetric box ``{x : |x_j| <= m_j}`` (cyclic distance) on a finite group."""
    idx = group.grid()
    n = np.asarray(group.orders)
    dist = np.minimum(idx, n - idx)
    inside = np.all(dist <= np.asarray(halfwidths), axis=-1)
    return CompactFunction(group, np.where(inside, height, 0.0).astype(complex))


def approximate_identity(group: GroupSpec, U, n: int) -> K2Function:
    """``K_n = g_n * tilde(g_n)`` with ``g_n`` a normalised box of halving width.

    ``U`` is the half-width of the neighbourhood of 0 (a float on the line, one
    integer per coordinate on a finite group).  ``K_n >= 0``, ``int K_n = 1`` and
    ``supp K_n`` lies inside ``U``.  On a finite group the boxes bottom out at the
    point mass, which is an exact identity.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if group.is_finite:
        u = np.broadcast_to(np.asarray(U, dtype=int), (group.ndim,))
        m1 = np.array([_largest_pow2_below(ui / 2.0) if ui >= 1 else 0 for ui in u])
        m = m1 // (2 ** (n - 1))
        g = indicator_finite(group, m)
        g = g.scale(1.0 / (np.sum(g.samples.real) * group.haar_weight))
        return k2_from_pair(g, tilde_compact(g))
    u = float(U)
    if u <= 0 or u > group.L:
        raise ValueError("U must be a neighbourhood of 0 inside the window")
    m1 = _largest_pow2_below(u / group.h / 2.0)
    if m1 < 1 or m1 % (2 ** (n - 1)):
        raise ResolutionError()
    m = m1 // 2 ** (n - 1)
    r = m * group.h
    g = box(group, r)
    g = g.scale(1.0 / (np.sum(g.samples.real) * group.h))
    return k2_from_pair(g, tilde_compact(g))


def _largest_pow2_below(x: float) -> int:
    """Largest power of two strictly below ``x`` (0 if ``x <= 1``)."""
    if x <= 1:
        return 0
    p = 1
    while 2 * p < x:
        p *= 2
    return p


def max_identity_level(group: GroupSpec, U) -> int:
    """Largest ``n`` accepted by :func:`approximate_identity` on the line."""
    m1 = _largest_pow2_below(float(U) / group.h / 2.0)
    return int(np.log2(m1)) + 1 if m1 >= 1 else 0


def dual_group(f) -> GroupSpec:
    return dual(f.group)
