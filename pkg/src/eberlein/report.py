"""Probe reports and the growth-model decision rule."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import curve_fit

VERDICTS = ("pass", "fail", "inconclusive")
EXIT_CODES = {"pass": 0, "fail": 1, "inconclusive": 2}


@dataclass
class GrowthFit:
    model: str  # constant | log | power
    rate: float
    significance: float
    params: list[float]
    bic: dict[str, float] = field(default_factory=dict)


@dataclass
class ProbeReport:
    """Verdict of a numerical probe with its evidence.

    ``trace`` holds ``(n, value)`` pairs sorted by ``n``.  A ``fail`` always
    comes with witnesses or a fitted growth of positive rate.  Reports state
    numerical evidence at the scale probed, never a proof.
    """

    verdict: str
    statistic: str
    trace: list[tuple[float, float]] = field(default_factory=list)
    fit: GrowthFit | None = None
    witnesses: list[Any] = field(default_factory=list)
    tolerances: dict[str, float] = field(default_factory=dict)
    notes: str = ""
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        self.trace = sorted(((float(n), float(v)) for n, v in self.trace), key=lambda p: p[0])
        if self.verdict == "fail" and not self.witnesses and not (self.fit and self.fit.rate > 0):
            raise ValueError("a failing report needs witnesses or a positive fitted growth")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_json(self) -> dict:
        d = asdict(self)
        d["trace"] = [list(p) for p in self.trace]
        d["witnesses"] = [_jsonable(w) for w in self.witnesses]
        d["details"] = _jsonable(self.details)
        return d


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.generic):
        return x.item()
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


def _bic(sse: float, m: int, k: int) -> float:
    sse = max(sse, 1e-300)
    return m * math.log(sse / m) + k * math.log(m)


def fit_growth(n, s) -> GrowthFit:
    """Least-squares fits of ``s_n`` by ``a``, ``a + b log n`` and ``a n^b``.

    The best model minimises BIC; ``rate`` is ``b`` and ``significance`` is
    ``b / stderr(b)`` for the chosen model (0 for the constant model).
    """
    n = np.asarray(n, dtype=float)
    s = np.asarray(s, dtype=float)
    m = len(n)
    fits = {}

    a = s.mean()
    fits["constant"] = (float(np.sum((s - a) ** 2)), [float(a)], 0.0, 0.0)

    X = np.column_stack([np.ones(m), np.log(n)])
    coef, *_ = np.linalg.lstsq(X, s, rcond=None)
    res = s - X @ coef
    sse = float(res @ res)
    dof = max(m - 2, 1)
    cov = np.linalg.inv(X.T @ X) * sse / dof
    se = math.sqrt(max(cov[1, 1], 0.0))
    fits["log"] = (sse, coef.tolist(), float(coef[1]), _ratio(coef[1], se))

    try:
        pos = s > 0
        if pos.sum() >= 2:
            b0, la0 = np.polyfit(np.log(n[pos]), np.log(s[pos]), 1)
            p0 = [math.exp(la0), b0]
        else:
            p0 = [max(abs(a), 1e-12), 0.0]
        popt, pcov = curve_fit(lambda x, A, B: A * x ** B, n, s, p0=p0, maxfev=20000)
        sse_p = float(np.sum((s - popt[0] * n ** popt[1]) ** 2))
        se_b = math.sqrt(max(pcov[1, 1], 0.0)) if np.all(np.isfinite(pcov)) else float("inf")
        fits["power"] = (sse_p, popt.tolist(), float(popt[1]), _ratio(popt[1], se_b))
    except (RuntimeError, ValueError, FloatingPointError):
        pass

    k = {"constant": 1, "log": 2, "power": 2}
    bic = {name: _bic(v[0], m, k[name]) for name, v in fits.items()}
    best = min(bic, key=bic.get)
    sse, params, rate, sig = fits[best]
    return GrowthFit(best, rate, sig, params, bic)


def _ratio(b, se):
    if se == 0:
        return math.inf if b != 0 else 0.0
    return float(b / se)


def growth_verdict(trace, *, stable_rtol: float = 1e-3, sigma: float = 3.0, min_points: int = 4,
                   abs_floor: float = 1e-10):
    """Apply the decision rule to ``(n, s_n)`` pairs.

    * fewer than ``min_points`` points: inconclusive;
    * the second half of the trace varies by at most ``stable_rtol`` of its
      scale, or the whole trace sits below ``abs_floor`` (rounding noise):
      constant model, pass;
    * otherwise the BIC-best model decides: constant passes, a growing model
      with significance above ``sigma`` fails, anything else is inconclusive.
    """
    n = np.array([p[0] for p in trace], dtype=float)
    s = np.array([p[1] for p in trace], dtype=float)
    if len(n) < min_points:
        return "inconclusive", None
    tail = s[len(s) // 2:]
    scale = max(float(np.max(np.abs(s))), 1e-300)
    if float(np.ptp(tail)) <= stable_rtol * scale or scale <= abs_floor:
        return "pass", GrowthFit("constant", 0.0, 0.0, [float(tail.mean())])
    fit = fit_growth(n, s)
    if fit.model == "constant":
        return "pass", fit
    if fit.rate > 0 and fit.significance > sigma:
        return "fail", fit
    return "inconclusive", fit
