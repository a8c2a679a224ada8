import numpy as np
import pytest

from eberlein import corpus, decomp
from eberlein import funcspace as fs
from eberlein import semimeasure as sm
from eberlein.group import RealLine, dual
from eberlein.measure import ConcreteMeasure, fourier_transform_measure, lebesgue_parts

G = corpus.DEFAULT_LINE


def _bump(center=0.25, rad=0.5):
    g = fs.smooth_bump(G, rad, center=center)
    return fs.k2_from_pair(g, fs.tilde_compact(fs.smooth_bump(G, rad / 2, center=-0.125)))


def _dual_measure(entry):
    obj = entry.build()
    if entry.kind == "measure":
        return fourier_transform_measure(obj)
    return obj.dual_measure


@pytest.mark.parametrize("name", sorted(corpus.CORPUS))
def test_entry_builds_with_expected_parts(name):
    entry = corpus.CORPUS[name]
    obj = entry.build()
    assert isinstance(obj, ConcreteMeasure if entry.kind == "measure" else sm.SemiMeasure)
    pp, ac, sc = lebesgue_parts(_dual_measure(entry))
    present = {k for k, part in (("pp", pp), ("ac", ac), ("sc", sc)) if not part.prune(1e-14).is_zero(1e-12)}
    assert present == entry.expected["parts"]


@pytest.mark.parametrize("name", sorted(corpus.CORPUS))
def test_entry_fourier_bohr_atoms(name):
    entry = corpus.CORPUS[name]
    nu = _dual_measure(entry)
    theta = sm.from_dual(nu, check=False)
    for chi, coef in entry.expected["fb_atoms"].items():
        assert decomp.fb_coefficient(theta, [chi]) == pytest.approx(coef, abs=1e-12)
    wap0 = decomp.wap0_test(theta, tol=1e-12)
    assert wap0.passed == (not entry.expected["fb_atoms"])


@pytest.mark.parametrize("name", [n for n in sorted(corpus.CORPUS) if n != "weighted_comb"])
def test_entry_positive_definiteness(name):
    entry = corpus.CORPUS[name]
    theta = sm.from_dual(_dual_measure(entry), check=False)
    rep = sm.is_positive_definite(theta, size=16)
    assert rep.passed == entry.expected["positive_definite"]


def test_build_overrides_and_unknown_names():
    theta = corpus.build("delta_quarter", t=0.5)
    xi = dual(G).grid()
    assert np.allclose(theta.dual_measure.density, np.exp(-1j * np.pi * xi))
    with pytest.raises(KeyError, match="unknown corpus entry"):
        corpus.build("nope")


def test_heaviside_principal_value_identity():
    # int_0^inf f check = f(0)/2 + (i / 2 pi) p.v. int f(t)/t dt
    theta = corpus.heaviside()
    for c in (0.25, -0.5, 1.0):
        f = _bump(c)
        lhs = sm.evaluate(theta, f)
        rhs = 0.5 * f.samples[G.M] + 1j / (2 * np.pi) * corpus.principal_value(f)
        assert abs(lhs - rhs) < 1e-3 * max(1.0, abs(rhs))


def test_principal_value_examples():
    x = G.grid()
    odd = fs.CompactFunction(G, x * np.exp(-np.pi * x ** 2) + 0j)
    assert corpus.principal_value(odd) == pytest.approx(1.0, abs=1e-5)
    even = fs.CompactFunction(G, np.exp(-np.pi * x ** 2) + 0j)
    assert corpus.principal_value(even) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        corpus.principal_value(fs.delta(corpus.finite_comb(4, 2).group, [0]))


def test_delta_t_split_closed_form():
    for t in (0.0, 0.25, 0.7):
        parts = corpus.delta_t_split(t)
        c_pos, c_neg, s_neg, s_pos = parts
        xi = dual(G).grid()
        assert np.allclose(c_pos - c_neg + 1j * (s_neg - s_pos), np.exp(-2j * np.pi * t * xi))
        for p in parts:
            assert np.all(p >= 0)
        assert np.all(c_pos * c_neg == 0) and np.all(s_pos * s_neg == 0)
    # the generic Jordan split agrees with the closed form
    theta = corpus.delta_t(0.25)
    split = sm.split_positive_definite(theta)
    for got, want in zip(split, corpus.delta_t_split(0.25)):
        assert np.allclose(got.dual_measure.density.real, want, atol=1e-12)


def test_delta_t_evaluates_at_t():
    f = _bump(0.0)
    for t in (0.0, 0.25, -0.5):
        ft = fs.translate(f, -t)  # brings the value at t to the origin
        assert sm.evaluate(corpus.delta_t(t), f) == pytest.approx(f([t])[0], abs=1e-9)
        assert sm.evaluate(corpus.delta_t(0.0), ft) == pytest.approx(f([t])[0], abs=1e-9)


def test_dirac_comb_poisson_summation():
    theta = corpus.dirac_comb(1.0)
    f = _bump(0.1, 0.3)
    # sum_n f(n) = sum_k f check(k), and f vanishes at every n except 0
    assert sm.evaluate(theta, f) == pytest.approx(f.samples[G.M], abs=1e-9)
    wide = fs.k2_from_pair(fs.smooth_bump(G, 1.5), fs.tilde_compact(fs.smooth_bump(G, 1.5)))
    n = np.arange(-3, 4, dtype=float)
    assert sm.evaluate(theta, wide) == pytest.approx(np.sum(wide(n)), abs=1e-9)


def test_finite_comb_transform_is_dual_comb():
    mu = corpus.finite_comb(12, 3)
    nu = fourier_transform_measure(mu)
    pts, w = nu.canonical_atoms()
    assert pts[:, 0].tolist() == [0, 4, 8]
    assert np.allclose(w, 1 / 3)
    with pytest.raises(ValueError):
        corpus.finite_comb(12, 5)


def test_weighted_comb_window():
    H = RealLine(64.0, 1 / 8)
    mu = corpus.weighted_comb(corpus.GOLDEN, 10, H)
    assert len(mu.atom_weights) == 21
    assert np.allclose(np.abs(mu.atom_weights), 1)
    with pytest.raises(fs.WindowError):
        corpus.weighted_comb(0.3, 100, H)


def test_thue_morse_approximant():
    for level in (0, 3, 6):
        nu = corpus.sc_approximant_thue_morse(level)
        assert nu.has_sc and nu.sc_level == level
        assert np.sum(nu.sc_weights.real) == pytest.approx(1.0)
        assert np.all(nu.sc_weights.real > 0)
        assert np.all((nu.sc_points >= 0) & (nu.sc_points < 1))
    xi = np.linspace(0, 1, 257)
    assert np.all(corpus.thue_morse_riesz(5, xi) >= 0)
    with pytest.raises(ValueError):
        corpus.sc_approximant_thue_morse(-1)
    parts = decomp.generalized_eberlein(corpus.build("thue_morse"))
    assert parts.null_sc.dual_measure.has_sc
    assert parts.strong.dual_measure.is_zero()
