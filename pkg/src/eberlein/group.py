"""Concrete abelian groups: finite products of cyclic groups and a windowed real line.

A ``GroupSpec`` fixes the sample grid, the Haar weights and the dual group.
The real line is modelled as the window ``[-L, L]`` sampled with step ``h``;
the two endpoints are identified, so the grid is the cyclic group of
``2L/h`` points scaled by ``h``.  With the reciprocal dual grid
(``L' = 1/(2h)``, ``h' = 1/(2L)``) grid-to-grid Fourier sums are exact
length-``2M`` DFTs, which keeps the two backends on the same footing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

FINITE = "finite"
REAL_LINE = "real_line"


def _clean(x: float) -> float:
    # 12 significant digits; makes dual(dual(g)) == g exact despite reciprocals
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group ``Z_n1 x ... x Z_nk`` or the windowed real line.

    ``is_dual`` only affects the Haar weights of finite groups: the dual of
    a finite group of order ``N`` carries the weight ``1/N`` per point, so
    that forward transforms use counting measure and inverse transforms
    use ``1/N`` (Plancherel normalisation).
    """

    kind: str
    orders: tuple[int, ...] = ()
    L: float = 0.0
    h: float = 0.0
    is_dual: bool = False

    def __post_init__(self):
        if self.kind == FINITE:
            orders = tuple(int(n) for n in self.orders)
            if not orders or any(n < 1 for n in orders):
                raise ValueError(f"finite group orders must be >= 1, got {self.orders}")
            object.__setattr__(self, "orders", orders)
        elif self.kind == REAL_LINE:
            L, h = _clean(self.L), _clean(self.h)
            if L <= 0 or h <= 0:
                raise ValueError("real line window needs L > 0 and h > 0")
            ratio = L / h
            if abs(ratio - round(ratio)) > 1e-6 * max(1.0, ratio):
                raise ValueError(f"L/h must be an integer, got {ratio}")
            object.__setattr__(self, "L", L)
            object.__setattr__(self, "h", h)
        else:
            raise ValueError(f"unknown group kind {self.kind!r}")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def finite(cls, orders: Sequence[int] | int, is_dual: bool = False) -> "GroupSpec":
        if isinstance(orders, (int, np.integer)):
            orders = (int(orders),)
        return cls(FINITE, orders=tuple(orders), is_dual=is_dual)

    @classmethod
    def real_line(cls, L: float, h: float, is_dual: bool = False) -> "GroupSpec":
        return cls(REAL_LINE, L=L, h=h, is_dual=is_dual)

    # -- geometry -------------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    @property
    def M(self) -> int:
        """Half the number of grid intervals on the real line (``L/h``)."""
        return int(round(self.L / self.h))

    @property
    def ndim(self) -> int:
        return len(self.orders) if self.is_finite else 1

    @property
    def shape(self) -> tuple[int, ...]:
        return self.orders if self.is_finite else (2 * self.M + 1,)

    @property
    def order(self) -> int:
        """Number of group elements (finite) or of cyclic grid points (real line)."""
        return math.prod(self.orders) if self.is_finite else 2 * self.M

    @property
    def haar_weight(self) -> float:
        if self.is_finite:
            return 1.0 / self.order if self.is_dual else 1.0
        return self.h

    def haar_weights(self) -> np.ndarray:
        """Quadrature weights on the grid; trapezoid halves at the window edges."""
        if self.is_finite:
            return np.full(self.shape, self.haar_weight)
        w = np.full(self.shape, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def grid(self) -> np.ndarray:
        """Grid coordinates: shape ``(2M+1,)`` on the line, ``(*orders, k)`` for finite groups."""
        if self.is_finite:
            idx = np.indices(self.orders)
            return np.moveaxis(idx, 0, -1)
        return (np.arange(2 * self.M + 1) - self.M) * self.h

    def points(self) -> np.ndarray:
        """All grid points as an ``(n, ndim)`` array in flat (C) order."""
        return self.grid().reshape(-1, self.ndim).astype(float)

    def reduce(self, points) -> np.ndarray:
        """Canonical representatives: residues for finite groups, floats otherwise."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.ndim)
        if self.is_finite:
            return np.mod(np.rint(pts), np.asarray(self.orders, dtype=float))
        return pts

    def index_of(self, points) -> np.ndarray:
        """Flat grid index of on-grid points (finite: residues; line: nearest node)."""
        pts = self.reduce(points)
        if self.is_finite:
            return np.ravel_multi_index(tuple(pts.T.astype(int)), self.orders)
        return np.rint(pts[:, 0] / self.h).astype(int) + self.M

    def on_grid(self, points, tol: float = 1e-9) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, self.ndim)
        if self.is_finite:
            return np.all(np.abs(pts - np.rint(pts)) <= tol, axis=1)
        x = pts[:, 0]
        k = x / self.h
        return (np.abs(k - np.rint(k)) <= tol * max(1.0, 1.0 / self.h)) & (np.abs(x) <= self.L + tol)

    def to_json(self) -> dict:
        if self.is_finite:
            d = {"kind": FINITE, "orders": list(self.orders)}
        else:
            d = {"kind": REAL_LINE, "L": self.L, "h": self.h}
        if self.is_dual:
            d["dual"] = True
        return d

    @classmethod
    def from_json(cls, d: dict) -> "GroupSpec":
        if d["kind"] == FINITE:
            return cls.finite(d["orders"], is_dual=bool(d.get("dual", False)))
        return cls.real_line(d["L"], d["h"], is_dual=bool(d.get("dual", False)))


Finite = GroupSpec.finite
RealLine = GroupSpec.real_line


def dual(group: GroupSpec) -> GroupSpec:
    """The dual group; finite groups are self-dual, the line gets the reciprocal grid."""
    if group.is_finite:
        return GroupSpec.finite(group.orders, is_dual=not group.is_dual)
    return GroupSpec.real_line(1.0 / (2.0 * group.h), 1.0 / (2.0 * group.L), is_dual=not group.is_dual)


def pairing(group: GroupSpec, chi, t) -> np.ndarray:
    """``<chi, t>`` as a real phase in turns, broadcasting over leading axes.

    For finite groups ``chi`` and ``t`` carry the coordinate axis last.
    """
    chi = np.asarray(chi, dtype=float)
    t = np.asarray(t, dtype=float)
    if group.is_finite:
        n = np.asarray(group.orders, dtype=float)
        if chi.ndim == 0:
            chi = chi.reshape(1)
        if t.ndim == 0:
            t = t.reshape(1)
        return np.sum(chi * t / n, axis=-1)
    return chi * t


def character_eval(group: GroupSpec, chi, t) -> np.ndarray | complex:
    """``chi(t)``: ``exp(2 pi i sum k_j t_j / n_j)`` or ``exp(2 pi i xi t)``."""
    phase = pairing(group, chi, t)
    if group.is_finite:
        # reduce the phase mod 1 exactly on integer data to keep |chi| = 1 to rounding
        phase = np.mod(phase, 1.0)
    val = np.exp(2j * np.pi * phase)
    return complex(val) if np.ndim(val) == 0 else val


def haar_integrate(group: GroupSpec, f) -> complex:
    """Integrate grid samples against the Haar weights of ``group``."""
    f = np.asarray(f)
    if f.shape != group.shape:
        raise ValueError(f"samples of shape {f.shape} do not match grid {group.shape}")
    return complex(np.sum(f * group.haar_weights()))


# -- grid transforms --------------------------------------------------------


def grid_transform(group: GroupSpec, samples, sign: int) -> np.ndarray:
    """``F(chi) = sum_x w_x f(x) exp(sign * 2 pi i <chi, x>)`` on the dual grid.

    ``sign=-1`` is the forward transform (``f^``), ``sign=+1`` the inverse-type
    transform (``f`` check).  Exact on both backends: a DFT for finite groups,
    a length-``2M`` DFT for the line (the window endpoints fold together).
    """
    f = np.asarray(samples, dtype=complex)
    if f.shape != group.shape:
        raise ValueError(f"samples of shape {f.shape} do not match grid {group.shape}")
    if group.is_finite:
        a = f * group.haar_weight
        if sign < 0:
            return np.fft.fftn(a)
        return np.fft.ifftn(a) * group.order
    M = group.M
    a = np.zeros(2 * M, dtype=complex)
    j = np.mod(np.arange(2 * M + 1) - M, 2 * M)
    np.add.at(a, j, f * group.haar_weights())
    F = np.fft.fft(a) if sign < 0 else np.fft.ifft(a) * (2 * M)
    k = np.mod(np.arange(2 * M + 1) - M, 2 * M)
    return F[k]


def transform_at(group: GroupSpec, samples, chis, sign: int, chunk: int = 4096) -> np.ndarray:
    """Same sum as :func:`grid_transform` at arbitrary dual points ``chis``.

    Only the nonzero samples contribute, so compactly supported functions are
    cheap even on long windows.
    """
    f = np.asarray(samples, dtype=complex).reshape(-1)
    w = group.haar_weights().reshape(-1)
    nz = np.nonzero(f)[0]
    x = group.points()[nz]
    fw = (f * w)[nz]
    chis = np.asarray(chis, dtype=float).reshape(-1, group.ndim)
    out = np.empty(len(chis), dtype=complex)
    for s in range(0, len(chis), chunk):
        c = chis[s:s + chunk]
        if group.is_finite:
            ph = pairing(group, c[:, None, :], x[None, :, :])
        else:
            ph = c[:, None, 0] * x[None, :, 0]
        out[s:s + chunk] = np.exp(sign * 2j * np.pi * ph) @ fw
    return out


@dataclass(frozen=True)
class VanHoveSequence:
    """Nested averaging sets ``A_n``.

    Finite groups average over the whole group at every step.  On the line,
    ``A_n = [-r_n, r_n]`` with ``r_n`` snapped down to the grid and strictly
    increasing, bounded by the window.
    """

    group: GroupSpec
    radii: tuple[float, ...] = field(default=())
    length: int = 0

    def __post_init__(self):
        if self.group.is_finite:
            n = self.length or len(self.radii) or 1
            object.__setattr__(self, "length", n)
            return
        g = self.group
        r = tuple(math.floor(ri / g.h + 1e-9) * g.h for ri in self.radii)
        if not r:
            raise ValueError("a van Hove sequence on the line needs radii")
        if any(b <= a for a, b in zip(r, r[1:])) or r[0] <= 0:
            raise ValueError("radii must be positive and strictly increasing on the grid")
        if r[-1] > g.L + 1e-12:
            raise ValueError("window exhausted: radius beyond L")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "length", len(r))

    @classmethod
    def geometric(cls, group: GroupSpec, n: int, r_max: float | None = None, ratio: float = 2.0):
        if group.is_finite:
            return cls(group, length=n)
        r_max = group.L if r_max is None else r_max
        radii = tuple(r_max / ratio ** (n - 1 - j) for j in range(n))
        return cls(group, radii=radii)

    def __len__(self):
        return self.length

    def measure(self, n: int) -> float:
        """``|A_n|`` for 1-based ``n``."""
        if self.group.is_finite:
            return self.group.order * self.group.haar_weight
        return 2.0 * self.radii[n - 1]

    def weights(self, n: int, shift: float = 0.0) -> np.ndarray:
        """Quadrature weights of ``A_n + shift`` on the grid (trapezoid ends)."""
        g = self.group
        if g.is_finite:
            return g.haar_weights()
        x = g.grid()
        r = self.radii[n - 1]
        lo, hi = shift - r, shift + r
        if lo < -g.L - 1e-12 or hi > g.L + 1e-12:
            raise ValueError("window exhausted: shifted averaging set leaves the window")
        w = np.where((x >= lo - 1e-9 * g.h) & (x <= hi + 1e-9 * g.h), g.h, 0.0)
        idx = np.nonzero(w)[0]
        w[idx[0]] *= 0.5
        w[idx[-1]] *= 0.5
        return w

    def boundary_ratio(self, n: int, diam_K: float) -> float:
        """``|boundary_K A_n| / |A_n|`` for an interval ``K`` of the given diameter."""
        if self.group.is_finite:
            return 0.0
        return 2.0 * diam_K / self.measure(n)
