import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discretefwer import clinical
from discretefwer.nulls import DiscreteNull, Family, cdf, leq, sum_cdf, support_union

import families
import oracles

THREE = DiscreteNull([0.1, 0.5, 1.0])


@pytest.mark.parametrize("u,want", [(0.5, 0.5), (0.49, 0.1), (0.05, 0.0), (1.0, 1.0), (0.0, 0.0)])
def test_cdf_examples(u, want):
    assert cdf(THREE, u) == want
    assert THREE.cdf(u) == want


@pytest.mark.parametrize("u", [-0.01, 1.01, float("nan")])
def test_cdf_domain(u):
    with pytest.raises(ValueError):
        cdf(THREE, u)


def test_cdf_slack_on_support_points():
    assert cdf(THREE, 0.5 * (1 - 1e-14)) == 0.5
    assert cdf(THREE, 0.5 * (1 - 1e-9)) == 0.1


@pytest.mark.parametrize("support", [[], [0.5, 0.2, 1.0], [0.0, 1.0], [0.2, 0.9], [0.2, 0.2, 1.0]])
def test_null_validation(support):
    with pytest.raises(ValueError):
        DiscreteNull(support)


def test_null_is_immutable():
    with pytest.raises(ValueError):
        THREE.support[0] = 0.3
    with pytest.raises(AttributeError):
        THREE.support = np.array([1.0])


def two_family():
    return Family([0.2, 0.3], (DiscreteNull([0.2, 1.0]), DiscreteNull([0.3, 1.0])))


def test_support_union_examples():
    fam = two_family()
    assert list(support_union(fam, 1)) == [0.2, 0.3, 1.0]
    assert list(support_union(fam, 2)) == [0.3, 1.0]


def test_support_union_follows_rank_not_position():
    fam = Family([0.3, 0.2], (DiscreteNull([0.3, 1.0]), DiscreteNull([0.2, 1.0])))
    assert list(fam.support_union(2)) == [0.3, 1.0]


@pytest.mark.parametrize("rank", [0, 3, -1])
def test_rank_out_of_range(rank):
    fam = two_family()
    with pytest.raises(ValueError):
        support_union(fam, rank)
    with pytest.raises(ValueError):
        sum_cdf(fam, rank, 0.5)


def test_clinical_union_matches_naive_union():
    fam = clinical.family()
    _, _, supports = oracles.ranked(fam)
    for rank in range(1, fam.m + 1):
        got = support_union(fam, rank)
        want = oracles.naive_union(supports[rank - 1:])
        assert len(got) == len(want)
        assert np.allclose(got, want, rtol=1e-12, atol=0)


def test_sum_cdf_dense_uniform():
    m = 6
    fam = Family([0.5] * m, (DiscreteNull.uniform_grid(1000),) * m)
    assert sum_cdf(fam, 1, 0.05) == pytest.approx(m * 0.05, rel=1e-12)


def test_sum_cdf_clinical_first_p_value():
    fam = clinical.family()
    p1 = float(fam.observed[fam.order[0]])
    assert round(sum_cdf(fam, 1, p1), 4) == 0.0218


def test_sum_cdf_at_one():
    fam = clinical.family()
    for rank in range(1, fam.m + 1):
        assert sum_cdf(fam, rank, 1.0) == fam.m - rank + 1


def test_sum_cdf_domain():
    with pytest.raises(ValueError):
        sum_cdf(two_family(), 1, 1.5)


def test_family_validation():
    with pytest.raises(ValueError):
        Family([0.25], (THREE,))  # not attainable
    with pytest.raises(ValueError):
        Family([0.1, 0.5], (THREE,))
    with pytest.raises(ValueError):
        Family([], ())
    with pytest.raises(ValueError):
        Family([0.1], (THREE,), labels=["a", "b"])


def test_family_order_is_stable():
    fam = Family([0.5, 0.1, 0.5, 0.1], (THREE,) * 4)
    assert list(fam.order) == [1, 3, 0, 2]


def test_family_is_immutable():
    fam = two_family()
    with pytest.raises(ValueError):
        fam.observed[0] = 1.0
    with pytest.raises(AttributeError):
        fam.observed = np.array([1.0, 1.0])


def test_tables_agree_with_direct_sums():
    rng = np.random.default_rng(3)
    for _ in range(50):
        fam = families.exact_family(rng)
        t = fam.tables
        for i in range(fam.m):
            for u in rng.choice(t.points, size=min(5, t.points.size), replace=False):
                assert t.suffix[i, np.searchsorted(t.points, u)] == pytest.approx(
                    fam.sum_cdf(i + 1, float(u)), rel=1e-12)


# -- properties ----------------------------------------------------------------

supports = st.lists(st.floats(0.001, 0.999), min_size=0, max_size=8).map(
    lambda xs: sorted({round(x, 6) for x in xs}) + [1.0])


@settings(max_examples=200, deadline=None)
@given(supports, st.floats(0.0, 1.0))
def test_cdf_bounded_by_uniform(sup, u):
    null = DiscreteNull(sup)
    v = null.cdf(u)
    assert 0.0 <= v and leq(v, u)
    assert v == oracles.naive_cdf(sup, u)


@settings(max_examples=200, deadline=None)
@given(supports, st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_cdf_nondecreasing(sup, a, b):
    null = DiscreteNull(sup)
    lo, hi = min(a, b), max(a, b)
    assert null.cdf(lo) <= null.cdf(hi)
    assert null.cdf(1.0) == 1.0


@settings(max_examples=100, deadline=None)
@given(supports)
def test_cdf_identity_on_support(sup):
    null = DiscreteNull(sup)
    for s in null.support:
        assert null.cdf(float(s)) == s


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sum_cdf_monotone(seed):
    rng = np.random.default_rng(seed)
    fam = families.synthetic_family(rng, m_max=6)
    grid = np.sort(np.concatenate([rng.uniform(0, 1, 10), fam.support_union(1)]))
    for i in range(1, fam.m + 1):
        vals = [fam.sum_cdf(i, float(p)) for p in grid]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        if i < fam.m:
            assert all(fam.sum_cdf(i + 1, float(p)) <= fam.sum_cdf(i, float(p)) for p in grid)
