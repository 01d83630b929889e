import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from extremalk.distributions import get_distribution
from extremalk.ordering import CLAIMS, TOL, check_ordering, ordering_report, worst_by_claim
from extremalk.transforms import TailTransform, transform_cdf

BASES = {
    "exponential": get_distribution("exponential"),
    "uniform": get_distribution("uniform"),
    "pareto": get_distribution("pareto", alpha=1.0, c=1.0),
    "normal": get_distribution("normal"),
}


def test_examples():
    assert check_ordering("i", BASES["exponential"], 1).max_violation <= 1e-12
    assert check_ordering("iv", BASES["uniform"], 3).passed


def test_h_gap_at_median():
    u = BASES["uniform"]
    h1 = transform_cdf(TailTransform("hk", 1), u, 0.5)
    h2 = transform_cdf(TailTransform("hk", 2), u, 0.5)
    assert h2 - h1 == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("name", list(BASES))
def test_full_report(name):
    rep = ordering_report(BASES[name], k_max=4, r_max=3, grid_size=1000)
    assert len(rep) == len(CLAIMS) * 4 * 3
    assert all(c.passed for c in rep), [(c.claim_id, c.k, c.r, c.max_violation) for c in rep if not c.passed]
    worst = worst_by_claim(rep)
    assert set(worst) == set(CLAIMS)
    assert max(worst.values()) <= TOL


def test_small_pareto_report():
    rep = ordering_report(BASES["pareto"], k_max=2, r_max=2)
    assert len(rep) == 7 * 4 and all(c.passed for c in rep)


@pytest.mark.parametrize("name", list(BASES))
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_t_equals_r_at_r1(name, k):
    base = BASES[name]
    x = base.quantile(np.linspace(1e-4, 1 - 1e-4, 1000))
    t = transform_cdf(TailTransform("tk", k, 1), base, x)
    r = transform_cdf(TailTransform("rk", k), base, x)
    assert np.max(np.abs(t - r)) <= 1e-12


def test_check_records_inputs():
    c = check_ordering("ii", BASES["normal"], 2, 3, grid_size=10)
    assert c.claim_id == "ii" and c.k == 2 and c.r == 3
    assert c.grid.shape == (10,) and c.grid[0] == pytest.approx(1e-4)
    assert c.pairs == ("hk2<=hk3", "fk2<=fk3", "rk2<=rk3", "tk2<=tk3")


def test_detects_reversed_claim():
    # the statement's direction read as cdf dominance is false: the check must flag it
    from extremalk import ordering

    base = BASES["exponential"]
    pairs = ordering._pairs("vii", 2, 1)
    xi = base.neglogcdf(base.quantile(np.linspace(1e-4, 1 - 1e-4, 100)))
    _, lo, hi = pairs[0]
    assert np.max(hi(xi) - lo(xi)) > 0.01


def test_bad_input():
    with pytest.raises(ValueError):
        check_ordering("viii", BASES["normal"], 1)
    with pytest.raises(ValueError):
        check_ordering("i", BASES["normal"], 1, grid_size=1)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(sorted(CLAIMS)),
    st.sampled_from(sorted(BASES)),
    st.integers(1, 8),
    st.integers(1, 6),
)
def test_claims_hold_beyond_calibrated_range(claim, name, k, r):
    assert check_ordering(claim, BASES[name], k, r, grid_size=200).passed
