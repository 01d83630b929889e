import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremalk.laws import (
    MaxStableLaw,
    frechet,
    gumbel,
    limit_kth_cdf,
    max_stable_cdf,
    max_stable_quantile,
    stability_norming,
    weibull,
)

LAWS = [frechet(1.0), frechet(2.5), weibull(1.0), weibull(2.0), gumbel()]


def _grid(law, n=50):
    return max_stable_quantile(law, np.linspace(0.01, 0.99, n))


@pytest.mark.parametrize(
    "law, x, want",
    [
        (frechet(1.0), 1.0, math.exp(-1)),
        (gumbel(), 0.0, math.exp(-1)),
        (weibull(2.0), -2.0, math.exp(-4)),
    ],
)
def test_cdf_examples(law, x, want):
    assert max_stable_cdf(law, x) == pytest.approx(want, rel=1e-15)


def test_cdf_outside_support_is_exact():
    assert max_stable_cdf(frechet(1.0), -3.0) == 0.0
    assert max_stable_cdf(frechet(1.0), 0.0) == 0.0
    assert max_stable_cdf(weibull(1.5), 0.0) == 1.0
    assert max_stable_cdf(weibull(1.5), 4.0) == 1.0
    assert not np.isnan(max_stable_cdf(gumbel(), np.array([-800.0, 800.0]))).any()


@pytest.mark.parametrize("kind, alpha", [("frechet", 0.0), ("weibull", -1.0), ("gumbel", 1.0), ("other", 1.0)])
def test_invalid_laws_rejected(kind, alpha):
    with pytest.raises(ValueError):
        MaxStableLaw(kind, alpha)


def test_quantile_examples():
    assert max_stable_quantile(frechet(1.0), math.exp(-1)) == pytest.approx(1.0, rel=1e-14)
    assert max_stable_quantile(gumbel(), math.exp(-1)) == pytest.approx(0.0, abs=1e-14)
    # independent oracle: the bisection path
    want = max_stable_quantile(frechet(2.0), 0.5, method="bisect")
    assert want == pytest.approx(1.2011224, abs=1e-7)
    assert max_stable_quantile(frechet(2.0), 0.5) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_quantile_domain(p):
    with pytest.raises(ValueError):
        max_stable_quantile(gumbel(), p)


@pytest.mark.parametrize("law", LAWS, ids=str)
@given(p=st.floats(1e-6, 1 - 1e-6))
@settings(max_examples=60, deadline=None)
def test_quantile_inverts_cdf(law, p):
    x = max_stable_quantile(law, p)
    assert max_stable_cdf(law, x) == pytest.approx(p, rel=1e-12)
    assert max_stable_quantile(law, p, method="bisect") == pytest.approx(x, rel=1e-10, abs=1e-12)


def test_stability_norming_examples():
    assert stability_norming(frechet(2.0), 4) == (2.0, 0.0)
    assert stability_norming(weibull(1.0), 8) == (1 / 8, 0.0)
    assert stability_norming(gumbel(), 1) == (1.0, 0.0)
    with pytest.raises(ValueError):
        stability_norming(gumbel(), 0)


@pytest.mark.parametrize("law", LAWS, ids=str)
@pytest.mark.parametrize("n", [2, 10, 100])
def test_max_stability(law, n):
    A, B = stability_norming(law, n)
    x = _grid(law)
    lhs = max_stable_cdf(law, A * x + B) ** n
    assert np.max(np.abs(lhs - max_stable_cdf(law, x))) <= 1e-12


def test_limit_kth_examples():
    x = np.linspace(-2, 3, 7)
    np.testing.assert_array_equal(limit_kth_cdf(gumbel(), 1, x), max_stable_cdf(gumbel(), x))
    assert limit_kth_cdf(frechet(1.0), 2, 1.0) == pytest.approx(2 * math.exp(-1), rel=1e-15)
    assert limit_kth_cdf(gumbel(), 2, 0.0) == pytest.approx(2 * math.exp(-1), rel=1e-15)
    assert limit_kth_cdf(frechet(1.0), 3, -1.0) == 0.0
    with pytest.raises(ValueError):
        limit_kth_cdf(gumbel(), 0, 0.0)


@pytest.mark.parametrize("law", LAWS, ids=str)
@pytest.mark.parametrize("k", [1, 2, 4])
def test_limit_kth_shape(law, k):
    x = max_stable_quantile(law, np.linspace(1e-6, 1 - 1e-6, 400))
    g = limit_kth_cdf(law, k, x)
    assert np.all((0 <= g) & (g <= 1))
    assert np.all(np.diff(g) >= 0)
    assert np.all(limit_kth_cdf(law, k + 1, x) >= g)
    top = max_stable_quantile(law, 1 - 1e-10)
    assert limit_kth_cdf(law, k, top) == pytest.approx(1.0, abs=1e-9)


def test_scaled_and_str():
    assert frechet(2.0).scaled(3) == frechet(6.0)
    assert gumbel().scaled(5) == gumbel()
    assert str(weibull(2.0)) == "Weibull(2)"
