"""The ten acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import time

import numpy as np
import pytest

from eberlein import funcspace as fs
from eberlein import probes
from eberlein import semimeasure as smod
from eberlein.corpus import CORPUS, GOLDEN, heaviside, delta_t, principal_value, weighted_comb_semimeasure
from eberlein.decomp import fb_series, fb_via_averaging, generalized_eberlein, wap0_test
from eberlein.group import Finite, RealLine, VanHoveSequence, dual
from eberlein.measure import ConcreteMeasure, fourier_transform_measure
from eberlein.semimeasure import from_dual, lift


def _random_finite_dual(rng, n, mode):
    gd = Finite([n], is_dual=True)
    if mode == "positive":
        w = rng.exponential(size=n) * (rng.random(n) < 0.7)
    elif mode == "one_negative":
        w = rng.exponential(size=n) + 0.01
        w[rng.integers(n)] = -rng.uniform(1e-6, 1.0)
    elif mode == "real":
        w = rng.normal(size=n)
    else:
        w = rng.normal(size=n) + 1j * rng.normal(size=n)
    return ConcreteMeasure.from_atoms(gd, np.arange(n), w)


def _gram_oracle(weights, n):
    """``A[x, y] = theta(delta_{x-y}) = sum_chi nu_chi exp(2 pi i chi (x - y)/n)``."""
    x = np.arange(n)
    d = x[:, None] - x[None, :]
    phases = np.exp(2j * np.pi * d[:, :, None] * np.arange(n)[None, None, :] / n)
    return phases @ weights


@pytest.mark.criterion(1, "finite-group Bochner: dual verdict == exhaustive direct check (200 measures)")
def test_c1_finite_bochner_equivalence():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    modes = ["positive", "one_negative", "real", "complex"]
    disagreements = []
    seen = set()
    for k in range(200):
        n = int(rng.integers(2, 65))
        nu = _random_finite_dual(rng, n, modes[k % 4])
        sm = from_dual(nu)
        rep = smod.is_positive_definite(sm)
        dual_says = rep.details["dual_side"] == "positive"
        A = _gram_oracle(nu.to_finite_weights(), n)
        scale = max(1.0, float(np.abs(A).max()))
        herm = np.abs(A - A.conj().T).max() <= 1e-9 * scale
        direct = herm and np.linalg.eigvalsh(0.5 * (A + A.conj().T))[0] >= -1e-9 * scale
        seen.add(direct)
        if dual_says != direct or (rep.verdict == "pass") != direct:
            disagreements.append((k, n, modes[k % 4]))
    elapsed = time.perf_counter() - t0
    assert disagreements == []
    assert seen == {True, False}
    assert elapsed < 60


@pytest.mark.criterion(2, "FT defining identity <mu, f*f~> = <mu^, |f check|^2> on Finite([8]), Finite([3,5])")
def test_c2_ft_defining_identity():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for orders in ([8], [3, 5]):
        G = Finite(orders)
        N = G.order
        pts = G.points().astype(int)
        # basis: every delta_x, and delta_x + c delta_y for c in {1, i}
        basis = [np.eye(N)[x] for x in range(N)]
        for x in range(N):
            for y in range(x + 1, N):
                for c in (1.0, 1j):
                    v = np.zeros(N, dtype=complex)
                    v[x], v[y] = 1.0, c
                    basis.append(v)
        F = np.array(basis, dtype=complex)
        # f*f~(z) = sum_x f(x) conj(f(x - z)); characters as an explicit matrix
        diff = np.array([[G.index_of(G.reduce(pts[x] - pts[z]))[0] for x in range(N)] for z in range(N)])
        ffz = np.einsum("kx,kzx->kz", F, np.conj(F[:, diff]))
        phase = np.exp(2j * np.pi * sum(np.outer(pts[:, j], pts[:, j]) / orders[j] for j in range(len(orders))))
        fcheck = F @ phase  # f check(chi) = sum_x f(x) chi(x)
        for _ in range(100):
            w = rng.normal(size=N) + 1j * rng.normal(size=N)
            mu = ConcreteMeasure.from_atoms(G, pts, w)
            nu = fourier_transform_measure(mu).to_finite_weights().reshape(-1)
            lhs = ffz @ mu.to_finite_weights().reshape(-1)
            rhs = (np.abs(fcheck) ** 2) @ nu
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    assert worst < 1e-9
    assert time.perf_counter() - t0 < 10


@pytest.mark.criterion(3, "dual/primal convolution agree exhaustively on Finite([12])")
def test_c3_dual_primal_convolution():
    rng = np.random.default_rng(3)
    G = Finite([12])
    gd = dual(G)
    measures = [ConcreteMeasure.dirac(gd, [k]) for k in range(12)]
    measures += [ConcreteMeasure.from_atoms(gd, np.arange(12), rng.normal(size=12) + 1j * rng.normal(size=12))
                 for _ in range(4)]
    d0 = fs.delta(G, [0])
    worst = 0.0
    for nu in measures:
        sm = from_dual(nu)
        for a in range(12):
            f = fs.k2_from_pair(fs.delta(G, [a]), d0)
            dual_side = smod.convolve(sm, f)
            for t in range(12):
                primal = smod.convolve_primal(sm, f, [t])
                worst = max(worst, abs(dual_side[t] - primal))
    assert worst < 1e-9


@pytest.mark.criterion(4, "Heaviside principal-value identity within 1e-3 for 5 smooth K2 bumps")
def test_c4_heaviside_principal_value():
    t0 = time.perf_counter()
    H = heaviside()
    G = H.group
    specs = [(0.3, 0.1, 0.5, 0.4), (-0.7, 0.2, 0.3, 0.6), (0.0, 0.5, 0.5, 0.5), (1.0, -0.2, 0.8, 0.4),
             (0.1, 0.1, 0.25, 0.3)]
    gaps = []
    for c1, c2, r1, r2 in specs:
        f = fs.k2_from_pair(fs.smooth_bump(G, r1, center=c1), fs.smooth_bump(G, r2, center=c2))
        half_line = smod.evaluate(H, f)
        f0 = f.samples[G.M]
        formula = 0.5 * f0 + 1j / (2 * np.pi) * principal_value(f)
        gaps.append(abs(half_line - formula))
    assert max(gaps) < 1e-3
    assert time.perf_counter() - t0 < 5


@pytest.mark.criterion(5, "FB coefficient consistency for weighted_comb(golden, 1000)")
def test_c5_fb_consistency_weighted_comb():
    sm = weighted_comb_semimeasure(GOLDEN, 1000)
    G = sm.group
    g = fs.smooth_bump(G, 0.5)
    f = fs.k2_from_pair(g, fs.tilde_compact(g))
    seq = VanHoveSequence.geometric(G, 9, 990.0)
    on = fb_via_averaging(sm, f, GOLDEN, seq, coefficient=1.0)
    off = fb_via_averaging(sm, f, GOLDEN + 0.1, seq, coefficient=0.0)
    assert abs(on.averaged - 1.0 * on.f_hat) < 0.05
    assert abs(off.averaged) < 0.05
    for check in (on, off):
        # O(1/r_n): the error times r_n stays bounded along the trace
        scaled = np.array(check.scaled_errors)
        half = len(scaled) // 2
        assert scaled[half:].max() <= 2 * scaled[:half].max() + 1e-9
        assert check.trace.converged


def _random_line_dual(rng, gd):
    xi = gd.grid()
    k = int(rng.integers(1, 5))
    atoms = rng.uniform(-gd.L / 4, gd.L / 4, size=k)
    dens = rng.normal() * np.exp(-rng.uniform(0.5, 2) * (xi - rng.normal()) ** 2)
    sc_pts = rng.uniform(-1, 1, size=3)
    return ConcreteMeasure(gd, atoms.reshape(-1, 1), rng.normal(size=k) + 1j * rng.normal(size=k), dens,
                           sc_pts.reshape(-1, 1), rng.random(3), 2)


def _same_measure(a, b, tol):
    assert np.allclose(a.atom_points, b.atom_points, rtol=0, atol=1e-12)
    assert np.allclose(a.atom_weights, b.atom_weights, rtol=0, atol=tol)
    da = np.zeros(a.group.shape) if a.density is None else a.density
    db = np.zeros(b.group.shape) if b.density is None else b.density
    assert np.allclose(da, db, rtol=0, atol=tol)
    sa = np.zeros(0) if a.sc_weights is None else a.sc_weights
    sb = np.zeros(0) if b.sc_weights is None else b.sc_weights
    assert np.allclose(sa, sb, rtol=0, atol=tol)


@pytest.mark.criterion(6, "generalized Eberlein reconstruction, FB carriage, wap0 and linearity")
def test_c6_generalized_eberlein():
    rng = np.random.default_rng(6)
    gd_line = dual(RealLine(8.0, 1 / 64))
    for _ in range(10):
        nu = _random_line_dual(rng, gd_line)
        sm = from_dual(nu)
        parts = generalized_eberlein(sm)
        total = parts.strong.dual_measure + parts.null_ac.dual_measure + parts.null_sc.dual_measure
        _same_measure(total, nu, 0.0)
        _same_measure(parts.null.dual_measure, parts.null_ac.dual_measure + parts.null_sc.dual_measure, 0.0)
        full, strong = fb_series(sm), fb_series(parts.strong)
        assert [(float(c), w) for c, w in full.entries] == [(float(c), w) for c, w in strong.entries]
        assert wap0_test(parts.null).verdict == "pass"
        assert fb_series(parts.null).entries == []
    G8 = Finite([8])
    gd8 = dual(G8)
    battery = [fs.k2_from_pair(fs.delta(G8, [x]), fs.delta(G8, [0])) for x in range(8)]
    for _ in range(50):
        for gd in (gd8, gd_line):
            if gd.is_finite:
                w1 = rng.normal(size=8) + 1j * rng.normal(size=8)
                w2 = rng.normal(size=8) + 1j * rng.normal(size=8)
                nu1 = ConcreteMeasure.from_atoms(gd, np.arange(8), w1)
                nu2 = ConcreteMeasure.from_atoms(gd, np.arange(8), w2)
            else:
                nu1, nu2 = _random_line_dual(rng, gd), _random_line_dual(rng, gd)
            a, b = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
            s1, s2 = from_dual(nu1), from_dual(nu2)
            p = generalized_eberlein(a * s1 + b * s2)
            p1, p2 = generalized_eberlein(s1), generalized_eberlein(s2)
            for name in ("strong", "null", "null_ac", "null_sc"):
                lhs = getattr(p, name)
                rhs = a * getattr(p1, name) + b * getattr(p2, name)
                fns = battery if gd.is_finite else smod.standard_battery(lhs.group)
                for f in fns:
                    assert abs(smod.evaluate(lhs, f, rtol=None) - smod.evaluate(rhs, f, rtol=None)) < 1e-12 * max(
                        1.0, abs(smod.evaluate(rhs, f, rtol=None)))


@pytest.mark.criterion(7, "measure dichotomy: delta_0 passes (constant), Heaviside fails (log, > 3 sigma)")
def test_c7_measure_dichotomy():
    t0 = time.perf_counter()
    G = RealLine(1.0, 2.0 ** -15)
    gd = dual(G)
    xi = gd.grid()
    haar = ConcreteMeasure.haar(gd)
    half = ConcreteMeasure.from_density(gd, np.where(xi > 0, 1.0, np.where(xi == 0, 0.5, 0.0)))
    good = probes.measure_probe(haar, U=0.5, n_max=12)
    bad = probes.measure_probe(half, U=0.5, n_max=12)
    assert good.verdict == "pass" and good.fit.model == "constant"
    assert bad.verdict == "fail" and bad.fit.model == "log"
    assert bad.fit.rate > 0 and bad.fit.significance > 3
    assert len(bad.trace) == 12
    assert time.perf_counter() - t0 < 120


@pytest.mark.criterion(8, "four-way positive-definite split on delta_t(0.25) and 50 Finite([8]) semi-measures")
def test_c8_four_way_split():
    sm = delta_t(0.25)
    G = sm.group
    parts = smod.split_positive_definite(sm)
    for p in parts:
        assert smod.is_positive_definite(p).verdict == "pass"
    battery = list(smod.standard_battery(G)) + [
        fs.k2_from_pair(f, fs.tilde_compact(f)) for f in smod.random_battery(G, 16, seed=8)]
    for f in battery:
        total = sum(c * smod.evaluate(p, f, rtol=None) for c, p in zip((1, -1, 1j, -1j), parts))
        assert abs(total - smod.evaluate(sm, f, rtol=None)) < 1e-9

    rng = np.random.default_rng(8)
    G8 = Finite([8])
    gd = dual(G8)
    basis = [fs.k2_from_pair(fs.delta(G8, [x]), fs.delta(G8, [0])) for x in range(8)]
    for _ in range(50):
        w = rng.normal(size=8) + 1j * rng.normal(size=8)
        sm = from_dual(ConcreteMeasure.from_atoms(gd, np.arange(8), w))
        parts = smod.split_positive_definite(sm)
        for p in parts:
            assert smod.is_positive_definite(p).verdict == "pass"
        for f in basis:
            total = sum(c * smod.evaluate(p, f) for c, p in zip((1, -1, 1j, -1j), parts))
            assert abs(total - smod.evaluate(sm, f)) < 1e-9


def _corpus_semimeasures():
    for name, entry in CORPUS.items():
        obj = entry.build()
        yield name, (lift(obj) if entry.kind == "measure" else obj)


@pytest.mark.criterion(9, "every corpus semi-measure is translation bounded and intertwining")
def test_c9_blanket_regression():
    failures = []
    for name, sm in _corpus_semimeasures():
        G = sm.group
        U = probes.default_radius(G)
        battery = probes.UnitBallBattery.random(G, U, size=32, seed=0)
        tb = probes.translation_bounded_probe(sm, battery)
        fns = probes.UnitBallBattery.random(G, U, size=8, seed=1).functions
        tol = 1e-9 if G.is_finite else 1e-8
        it = probes.intertwining_check(sm, list(zip(fns[0::2], fns[1::2])), tol=tol)
        if tb.verdict != "pass" or it.verdict != "pass":
            failures.append((name, tb.verdict, it.verdict))
    assert failures == []


@pytest.mark.criterion(10, "density gate: Gaussian passes at p=2, constant fails at p=1 with linear growth")
def test_c10_density_class_gate():
    gd = dual(RealLine(16.0, 1 / 256))
    xi = gd.grid()
    gauss = np.exp(-np.pi * xi ** 2)
    rep = probes.density_class_check(ConcreteMeasure.from_density(gd, gauss), 2.0)
    assert rep.verdict == "pass"
    assert abs(rep.details["norm_p"] - 2 ** -0.25) < 1e-6  # ||exp(-pi x^2)||_2 = 2^(-1/4)
    assert rep.details["relift_gap"] <= 1e-9
    flat = probes.density_class_check(ConcreteMeasure.from_density(gd, np.ones_like(xi)), 1.0)
    assert flat.verdict == "fail"
    assert flat.fit.model == "power" and abs(flat.fit.rate - 1.0) < 0.05
