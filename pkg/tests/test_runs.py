from hypothesis import given, settings
from hypothesis import strategies as st

from cutstack import runs as rn
from cutstack.runs import RunSet

index_sets = st.sets(st.integers(min_value=-200, max_value=200), max_size=40)


def test_normalize_merges_touching():
    assert rn.normalize([(0, 2), (2, 4), (7, 8)]) == ((0, 4), (7, 8))
    assert rn.normalize([(5, 5), (3, 1)]) == ()


@given(index_sets)
@settings(max_examples=60, deadline=None)
def test_from_indices_round_trip(xs):
    runs = rn.from_indices(xs)
    assert set(rn.iter_indices(runs)) == xs
    assert rn.count(runs) == len(xs)


@given(index_sets, index_sets)
@settings(max_examples=60, deadline=None)
def test_intersect_union_difference_match_sets(a, b):
    ra, rb = rn.from_indices(a), rn.from_indices(b)
    assert set(rn.iter_indices(rn.intersect(ra, rb))) == (a & b)
    assert set(rn.iter_indices(rn.union(ra, rb))) == (a | b)
    assert set(rn.iter_indices(rn.difference(ra, rb))) == (a - b)


@given(index_sets, st.integers(min_value=-50, max_value=50))
@settings(max_examples=60, deadline=None)
def test_shift_and_membership(xs, off):
    runs = rn.shift(rn.from_indices(xs), off)
    assert set(rn.iter_indices(runs)) == {x + off for x in xs}
    for x in list(xs)[:5]:
        assert rn.contains(runs, x + off)


@given(index_sets, index_sets, st.integers(min_value=-60, max_value=60))
@settings(max_examples=60, deadline=None)
def test_cross_difference_count(a, b, c):
    ra, rb = rn.from_indices(a), rn.from_indices(b)
    expected = sum(1 for x in a for y in b if x - y == c)
    assert rn.cross_difference_count(ra, rb, c) == expected


@given(index_sets, index_sets)
@settings(max_examples=60, deadline=None)
def test_cross_difference_runs(a, b):
    ra, rb = rn.from_indices(a), rn.from_indices(b)
    diffs = set(rn.iter_indices(rn.cross_difference_runs(ra, rb)))
    assert diffs == {x - y for x in a for y in b}


def test_runset_surface():
    s = RunSet.of([(0, 3), (10, 12)])
    assert len(s) == 5 and 11 in s and 5 not in s
    assert s.min() == 0 and s.max() == 11
    assert s.clamp(2, 10).runs == ((2, 3), (10, 11))
    assert not RunSet(()).intersect(s)
