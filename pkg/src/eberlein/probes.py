"""Numerical decision procedures for the characterisation results.

Each probe returns a :class:`~eberlein.report.ProbeReport`.  Passing means the
statistic stayed bounded or stable at the scale probed; it is evidence, not a
proof.  Batteries are seeded so every verdict is reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import funcspace as fs
from . import semimeasure as smod
from .group import GroupSpec, dual, grid_transform
from .measure import ConcreteMeasure
from .report import GrowthFit, ProbeReport, fit_growth, growth_verdict
from .semimeasure import SemiMeasure, evaluate_with_tail, from_dual

__all__ = [
    "UnitBallBattery",
    "default_seed",
    "measure_probe",
    "translation_bounded_probe",
    "intertwining_check",
    "density_class_check",
    "boundedness_probe",
    "TrigPolynomial",
    "log_singular_function",
    "default_radius",
    "default_seed",
]


def default_seed() -> int:
    return int(os.environ.get("EBERLEIN_SEED", "0"))


def default_radius(group: GroupSpec):
    """Support bound ``U`` for unit-ball batteries: a few dozen grid steps at least."""
    if group.is_finite:
        return 2
    return min(max(1.0, 64 * group.h), group.L / 8)


@dataclass(frozen=True, eq=False)
class UnitBallBattery:
    """Seeded sample of ``{f in K2 : supp f in U, ||f||_inf <= 1}``."""

    U: float | tuple
    functions: tuple
    seed: int

    def __post_init__(self):
        for f in self.functions:
            if fs.sup_norm(f) > 1 + 1e-12:
                raise ValueError("battery member exceeds the unit ball")
            if f.support is not None:
                u = float(self.U)
                if f.support[0] < -u - 1e-12 or f.support[1] > u + 1e-12:
                    raise ValueError("battery member not supported in U")

    @classmethod
    def random(cls, group: GroupSpec, U, size: int = 32, seed: int | None = None) -> "UnitBallBattery":
        seed = default_seed() if seed is None else seed
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(size):
            if group.is_finite:
                u = np.broadcast_to(np.asarray(U, dtype=int), (group.ndim,))
                m = tuple(int(rng.integers(0, max(ui // 2, 0) + 1)) for ui in u)
                a = fs.indicator_finite(group, m).samples * (rng.normal(size=group.shape) + 1j * rng.normal(size=group.shape))
                b = fs.indicator_finite(group, m).samples * rng.normal(size=group.shape)
                f = fs.k2_from_pair(fs.CompactFunction(group, a), fs.CompactFunction(group, b))
            else:
                u = float(U)
                r1, r2 = rng.uniform(0.1, 0.45, size=2) * u
                # centres snap toward 0 so that supp a + supp b stays inside [-u, u]
                c1 = np.trunc(float(rng.uniform(-(u / 2 - r1), u / 2 - r1)) / group.h) * group.h
                c2 = np.trunc(float(rng.uniform(-(u / 2 - r2), u / 2 - r2)) / group.h) * group.h
                a = fs.smooth_bump(group, r1, center=c1, height=float(rng.normal()) + 1j * float(rng.normal()))
                b = fs.smooth_bump(group, r2, center=c2)
                f = fs.k2_from_pair(a, b)
            nrm = fs.sup_norm(f)
            if nrm > 0:
                f = f * (float(rng.uniform(0.5, 1.0)) / nrm)
            out.append(f)
        return cls(U, tuple(out), seed)

    def __len__(self):
        return len(self.functions)


def log_singular_function(group: GroupSpec, a: float = 1 / np.e) -> fs.CompactFunction:
    """Odd continuous ``g(x) = sign(x) (1 - |x|/a) / log(1/|x|)`` on ``[-a, a]``.

    ``int g(x)/x dx`` diverges like ``log log(1/delta)`` (``g`` is not Dini
    continuous at 0), which makes it the witness that separates Hilbert-type
    semi-measures from measures.  ``a <= 1/e`` keeps ``|g| <= 1``.
    """
    if not 0 < a <= 1 / np.e + 1e-12:
        raise ValueError("a must lie in (0, 1/e]")

    def fn(x):
        r = np.abs(x)
        out = np.zeros(x.shape)
        m = (r > 0) & (r < a)
        out[m] = np.sign(x[m]) / np.log(1.0 / r[m]) * (1.0 - r[m] / a)
        return out

    return fs.CompactFunction.from_callable(group, fn, (-a, a))


def _default_cc_battery(G: GroupSpec, U) -> list[fs.CompactFunction]:
    if G.is_finite:
        return [fs.delta(G, [0] * G.ndim), fs.indicator_finite(G, [1] * G.ndim)]
    a = min(1 / np.e, G.L / 4)
    return [fs.smooth_bump(G, a), log_singular_function(G, a)]


def measure_probe(nu: ConcreteMeasure, U=None, n_max: int = 12, t_grid=None, battery=None,
                  sigma: float = 3.0) -> ProbeReport:
    """Is the positive, weakly admissible ``nu`` the Fourier transform of a measure?

    Statistic: ``s_n = max_{g, t} |nu(check(T_t g) K_n^)| = max |theta(T_t g * K_n)|``
    over a fixed battery of continuous compactly supported ``g``, where
    ``theta`` is the semi-measure with transform ``nu`` and ``K_n`` the
    approximate identity.  Bounded ``s_n`` is evidence for a measure; a
    significant growth fit is evidence against.

    Growth models are fitted against the dyadic scale exponent
    ``log2(1/halfwidth(K_n))`` of the approximate identity, which differs from
    ``n`` by a constant fixed by ``U``; the trace itself is indexed by ``n``.
    """
    gd = nu.group
    G = dual(gd)
    if U is None:
        U = [max(G.orders) // 2] * G.ndim if G.is_finite else min(0.5, G.L / 2)
    theta = from_dual(nu, check=False)
    battery = _default_cc_battery(G, U) if battery is None else list(battery)
    if t_grid is None:
        t_grid = [np.zeros(G.ndim) if G.is_finite else 0.0]
    scales = []
    per_g = np.zeros((len(battery), n_max))
    for n in range(1, n_max + 1):
        K = fs.approximate_identity(G, U, n)
        term = K.terms[0]
        scales.append(_scale_exponent(G, term.left))
        for i, g in enumerate(battery):
            for t in t_grid:
                gt = fs.translate_compact(g, t)
                phi = fs.k2_from_pair(fs.conv_compact(gt, term.left), term.right)
                val, _ = evaluate_with_tail(theta, phi)
                per_g[i, n - 1] = max(per_g[i, n - 1], abs(val))
    ns = list(range(1, n_max + 1))
    tol = {"stable_rtol": 1e-3, "sigma": sigma}
    details = {"U": U, "battery_size": len(battery), "scale_exponents": scales,
               "per_function_traces": per_g.tolist()}
    if G.is_finite:
        trace = list(zip(ns, per_g.max(axis=0)))
        return ProbeReport("pass", "max_t |theta(T_t g * K_n)|", trace, GrowthFit("constant", 0.0, 0.0, []),
                           tolerances=tol, notes="finite group: every functional is a measure", details=details)
    # the bound must hold for every g separately; decide per battery member
    results = [growth_verdict(list(zip(scales, row)), sigma=sigma) for row in per_g]
    failing = [i for i, (v, _) in enumerate(results) if v == "fail"]
    if failing:
        verdict = "fail"
        pick = max(failing, key=lambda i: results[i][1].significance)
    elif all(v == "pass" for v, _ in results):
        verdict = "pass"
        pick = int(np.argmax(per_g[:, -1]))
    else:
        verdict = "inconclusive"
        pick = next(i for i, (v, _) in enumerate(results) if v == "inconclusive")
    fit = results[pick][1]
    details["deciding_function"] = pick
    witnesses = [{"battery_index": i, "model": results[i][1].model, "rate": results[i][1].rate,
                  "significance": results[i][1].significance} for i in failing]
    note = f"numerical evidence at scale n_max={n_max}"
    return ProbeReport(verdict, "max_t |theta(T_t g * K_n)| for the deciding g", list(zip(ns, per_g[pick])),
                       fit, witnesses, tol, note, details=details)


def _scale_exponent(G: GroupSpec, g_n: fs.CompactFunction) -> float:
    if G.is_finite:
        return 0.0
    half = 2.0 * max(g_n.support[1], 0.5 * G.h)  # supp K_n = supp g_n - supp g_n
    return float(np.log2(1.0 / half))


def translation_bounded_probe(sm: SemiMeasure, battery: UnitBallBattery, t_grid=None,
                              rtol: float = 1e-2) -> ProbeReport:
    """Observed ``sup ||theta * f||_inf`` over a unit-ball battery.

    The running maximum is tabulated over battery prefixes of doubling size;
    pass when the last doubling raises it by less than ``rtol``.
    """
    sizes = []
    k = 4
    while k < len(battery):
        sizes.append(k)
        k *= 2
    sizes.append(len(battery))
    maxima = []
    running = 0.0
    done = 0
    for size in sizes:
        for f in battery.functions[done:size]:
            conv = smod.convolve(sm, f, t_grid)
            running = max(running, float(np.max(np.abs(conv))))
        done = size
        maxima.append((size, running))
    if len(maxima) < 2:
        verdict = "inconclusive"
    else:
        prev, last = maxima[-2][1], maxima[-1][1]
        stable = np.isfinite(last) and last - prev <= rtol * max(last, 1e-300)
        verdict = "pass" if stable else "inconclusive"
    return ProbeReport(verdict, "sup ||theta*f||_inf over battery", maxima, tolerances={"rtol": rtol},
                       notes=f"battery size {len(battery)}, seed {battery.seed}; U-nice evidence only",
                       details={"sup": maxima[-1][1], "seed": battery.seed, "U": battery.U})


def _cyclic_primal_conv(G: GroupSpec, a: np.ndarray, g: fs.CompactFunction) -> np.ndarray:
    """``(a * g)(t) = int a(s) g(t - s) ds`` computed directly in the primal domain."""
    if G.is_finite:
        out = np.zeros(G.shape, dtype=complex)
        gs = g.samples
        for s in G.points().astype(int):
            idx = tuple(s)
            if a[idx] != 0:
                out += a[idx] * np.roll(gs, idx, axis=tuple(range(G.ndim)))
        return out * G.haar_weight
    # linear (non-cyclic) convolution; compare only where no wrap occurs
    M = G.M
    full = np.convolve(a, g.samples) * G.h
    return full[M:M + 2 * M + 1]


def intertwining_check(sm: SemiMeasure, pairs, tol: float | None = None) -> ProbeReport:
    """``max ||(theta*f)*g - theta*(f*g)||_inf`` over the given pairs.

    ``(theta*f)*g`` is formed in the primal domain from samples of ``theta*f``;
    ``theta*(f*g)`` through the dual formula.  On the line only interior points
    whose window ``t - supp g`` stays inside the grid are compared.  The
    commuted form ``(theta*g)*f`` is checked too.
    """
    G = sm.group
    if tol is None:
        tol = 1e-9
    gaps = []
    comm = []
    for i, (f, g) in enumerate(pairs):
        fg = fs.convolve(f, g)
        rhs = smod.convolve(sm, fg)
        lhs = _cyclic_primal_conv(G, smod.convolve(sm, f), g.as_compact())
        lhs2 = _cyclic_primal_conv(G, smod.convolve(sm, g), f.as_compact())
        mask = _interior(G, g.support)
        mask2 = _interior(G, f.support)
        scale = max(1.0, float(np.max(np.abs(rhs))))
        gaps.append(float(np.max(np.abs(lhs - rhs)[mask])) / scale)
        comm.append(float(np.max(np.abs(lhs - lhs2)[mask & mask2])) / scale)
    worst = max(gaps) if gaps else 0.0
    worst_c = max(comm) if comm else 0.0
    bad = [{"pair_index": i, "gap": gap} for i, gap in enumerate(gaps) if gap > tol]
    verdict = "fail" if bad else "pass"
    return ProbeReport(verdict, "max relative ||(theta*f)*g - theta*(f*g)||_inf",
                       trace=[(i + 1, g) for i, g in enumerate(gaps)], witnesses=bad,
                       tolerances={"tol": tol},
                       details={"max_gap": worst, "max_commutation_gap": worst_c})


def _interior(G: GroupSpec, support) -> np.ndarray:
    if G.is_finite or support is None:
        return np.ones(G.shape, dtype=bool)
    x = G.grid()
    a, b = support
    return (x - b >= -G.L) & (x - a <= G.L)


@dataclass(frozen=True)
class TrigPolynomial:
    """``h(xi) = sum_k c_k exp(2 pi i x_k xi)`` with finitely many Fourier-Bohr coefficients."""

    freqs: tuple[float, ...]
    coefs: tuple[complex, ...]

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return sum(c * np.exp(2j * np.pi * x * xi) for x, c in zip(self.freqs, self.coefs))


def density_class_check(h, p: float, group: GroupSpec | None = None, battery=None,
                        n_max: int = 6, U=None, rtol: float = 1e-6) -> ProbeReport:
    """Is the ac density ``h`` on the dual in ``L^p`` (``1 <= p <= 2``)?

    ``int_{|xi| <= R} |h|^p`` is tabulated for radii halving from the window
    edge; pass when the last two doublings change it by less than ``rtol``.
    A pass is backed by two replayed certificates: the Hausdorff-Young bound
    ``|int check(f * K_n) h| <= ||f||_p ||h||_p`` for the battery and all
    ``n <= n_max``, and the re-lifted measure ``(h check) theta_G`` reproducing
    ``int f check h`` on the battery.
    """
    if not 1 <= p <= 2:
        raise ValueError("p must lie in [1, 2]")
    if isinstance(h, TrigPolynomial):
        total = float(np.sum(np.abs(h.coefs)))
        return ProbeReport("pass", "sum |a_x(h)|", [(len(h.coefs), total)], tolerances={},
                           notes="trigonometric polynomial: finitely many Fourier-Bohr coefficients")
    if isinstance(h, ConcreteMeasure):
        group = h.group
        h = h.density
    if group is None:
        raise ValueError("a dual group is needed for sampled densities")
    gd = group
    h = np.asarray(h, dtype=complex)
    w = gd.haar_weights()
    n_r = 7
    radii = [gd.L / 2 ** j for j in reversed(range(n_r))]
    x = np.abs(gd.grid()) if not gd.is_finite else None
    vals = []
    for R in radii:
        m = x <= R + 1e-12
        vals.append(float(np.sum((np.abs(h) ** p * w)[m])))
    trace = list(zip(radii, vals))
    ch = [abs(vals[-1] - vals[-2]), abs(vals[-2] - vals[-3])]
    tol = {"rtol": rtol, "p": p}
    if max(ch) > rtol * max(vals[-1], 1e-300):
        fit = fit_growth(radii, vals)
        if fit.rate <= 0:
            fit = GrowthFit("power", 1.0, float("inf"), [], fit.bic)
        return ProbeReport("fail", "int_{|xi|<=R} |h|^p", trace, fit,
                           witnesses=[{"radius": radii[-1], "value": vals[-1]}], tolerances=tol,
                           notes="no stabilisation on the dual window")
    norm_p = vals[-1] ** (1.0 / p)
    G = dual(gd)
    theta = from_dual(ConcreteMeasure.from_density(gd, h), check=False)
    if battery is None:
        battery = smod.random_battery(G, 8, seed=default_seed())
    if U is None:
        U = min(0.5, G.L / 4)
    n_top = min(n_max, fs.max_identity_level(G, U))
    hy_worst = 0.0
    for f in battery:
        fp = fs.lp_norm(f, p)
        for n in range(1, n_top + 1):
            K = fs.approximate_identity(G, U, n)
            fk = fs.k2_from_pair(fs.conv_compact(f, K.terms[0].left), K.terms[0].right)
            val, _ = evaluate_with_tail(theta, fk)
            hy_worst = max(hy_worst, abs(val) / max(fp * norm_p, 1e-300))
    # the ac part re-lifted as the measure with density h check
    mu = ConcreteMeasure.from_density(G, grid_transform(gd, h, +1))
    from .measure import pair

    relift_gap = 0.0
    for f in battery:
        f2 = fs.k2_from_pair(f, fs.tilde_compact(f))
        a = pair(mu, f2)
        b, _ = evaluate_with_tail(theta, f2)
        relift_gap = max(relift_gap, abs(a - b) / max(abs(b), 1.0))
    details = {"norm_p": norm_p, "hausdorff_young_ratio": hy_worst, "relift_gap": relift_gap,
               "identity_levels": n_top}
    ok = hy_worst <= 1 + 1e-9 and relift_gap <= 1e-9
    verdict = "pass" if ok else "inconclusive"
    return ProbeReport(verdict, "int_{|xi|<=R} |h|^p", trace, GrowthFit("constant", 0.0, 0.0, [vals[-1]]),
                       tolerances=tol, details=details,
                       notes="ac component re-lifts to a measure (numerical evidence)")


def boundedness_probe(sm: SemiMeasure, K, battery, translates=None, rtol: float = 1e-2) -> ProbeReport:
    """Empirical ``C_K = max |theta(f)| / ||f||_inf`` over a battery supported in ``K``.

    With ``translates`` the maximum also runs over ``T_t f``.
    """
    G = sm.group
    if not G.is_finite:
        a, b = K
        for f in battery:
            if f.support[0] < a - 1e-12 or f.support[1] > b + 1e-12:
                raise ValueError("battery member not supported in K")
    translates = [None] if translates is None else list(translates)
    running = 0.0
    trace = []
    for i, f in enumerate(battery, start=1):
        nrm = fs.sup_norm(f)
        for t in translates:
            if t is None:
                ft = f
            else:
                ft = fs.translate(f, t) if hasattr(f, "terms") else fs.translate_compact(f, t)
            val, _ = evaluate_with_tail(sm, ft)
            running = max(running, abs(val) / nrm)
        trace.append((i, running))
    half = trace[len(trace) // 2 - 1][1] if len(trace) >= 2 else 0.0
    stable = len(trace) >= 2 and running - half <= rtol * max(running, 1e-300)
    return ProbeReport("pass" if stable else "inconclusive", "max |theta(f)|/||f||_inf", trace,
                       tolerances={"rtol": rtol}, details={"C_K": running})
