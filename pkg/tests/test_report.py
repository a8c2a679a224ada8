import json

import numpy as np
import pytest

from eberlein.report import GrowthFit, ProbeReport, fit_growth, growth_verdict

N = np.arange(1, 13, dtype=float)


def test_report_validation():
    with pytest.raises(ValueError):
        ProbeReport("maybe", "s")
    with pytest.raises(ValueError, match="witnesses"):
        ProbeReport("fail", "s")
    ProbeReport("fail", "s", fit=GrowthFit("log", 0.5, 10.0, [0, 0.5]))
    ProbeReport("fail", "s", witnesses=[{"x": 1}])


def test_report_trace_sorted_and_serialisable():
    rep = ProbeReport("pass", "s", trace=[(3, 1.0), (1, 2.0)], witnesses=[{"w": 1 + 2j, "a": np.arange(2)}],
                      details={"z": np.complex128(1j)})
    assert rep.trace == [(1.0, 2.0), (3.0, 1.0)]
    d = json.loads(json.dumps(rep.to_json()))
    assert d["witnesses"][0] == {"w": [1.0, 2.0], "a": [0, 1]}
    assert d["details"]["z"] == [0.0, 1.0]
    assert rep.exit_code == 0 and rep.passed


@pytest.mark.parametrize("model,s", [
    ("log", 1.0 + 0.7 * np.log(N)),
    ("power", 0.5 * N ** 1.3),
])
def test_fit_growth_identifies_model(model, s, rng):
    fit = fit_growth(N, s + 1e-4 * rng.normal(size=len(N)))
    assert fit.model == model
    assert fit.rate > 0 and fit.significance > 3


def test_fit_growth_constant(rng):
    fit = fit_growth(N, 2.0 + 0.01 * rng.normal(size=len(N)))
    assert fit.model == "constant" and fit.rate == 0


def test_growth_verdict_rules(rng):
    assert growth_verdict([(1, 1.0), (2, 2.0), (3, 3.0)])[0] == "inconclusive"
    assert growth_verdict(list(zip(N, np.full(12, 5.0))))[0] == "pass"
    # values saturating to a plateau pass on the stable tail
    assert growth_verdict(list(zip(N, 1 - 2.0 ** -(4 * N))))[0] == "pass"
    noise = 1e-13 * rng.normal(size=12)
    assert growth_verdict(list(zip(N, noise)))[0] == "pass"
    verdict, fit = growth_verdict(list(zip(N, 1 + np.log(N))))
    assert verdict == "fail" and fit.model == "log"
    verdict, fit = growth_verdict(list(zip(N, 1 + 0.05 * rng.normal(size=12))))
    assert verdict in ("pass", "inconclusive")
    decreasing = list(zip(N, 10 - np.log(N)))
    assert growth_verdict(decreasing)[0] == "inconclusive"
