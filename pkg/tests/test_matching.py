import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edindex.errors import InvalidMatching
from edindex.matching import (
    EdgeSet,
    NonCrossingMatching,
    identical_pair_edges,
    matching_to_script,
    max_noncrossing_matching,
)
from edindex.strings import IndexedString, apply_edit_script
from oracles import lcs_dp, lis_quadratic, max_noncrossing_brute


def test_crossing_pair_gives_one(backend):
    m = max_noncrossing_matching(EdgeSet.from_pairs([(0, 1), (1, 0)], 2, 2))
    assert len(m) == 1


def test_identity_edges(backend):
    n = 37
    m = max_noncrossing_matching(EdgeSet.from_pairs([(i, i) for i in range(n)], n, n))
    assert len(m) == n


def test_empty_edge_set(backend):
    assert len(max_noncrossing_matching(EdgeSet.from_pairs([], 3, 4))) == 0


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        EdgeSet.from_pairs([(0, 5)], 2, 5)


def test_duplicates_and_sorting():
    g = EdgeSet.from_pairs([(1, 1), (0, 2), (1, 1), (0, 0)], 2, 3).normalized()
    assert g.pairs() == [(0, 0), (0, 2), (1, 1)]


def test_dump_round_trip():
    g = EdgeSet.from_pairs([(0, 0), (2, 1)], 3, 2)
    assert EdgeSet.parse(g.dump(), 3, 2).pairs() == g.pairs()


def test_equals_lcs_on_random_instances(backend):
    rng = np.random.default_rng(1)
    for _ in range(150):
        q = int(rng.integers(2, 17))
        a = rng.integers(0, q, int(rng.integers(0, 300)))
        b = rng.integers(0, q, int(rng.integers(0, 300)))
        m = max_noncrossing_matching(identical_pair_edges(a, b))
        assert len(m) == lcs_dp(a.tolist(), b.tolist())
        assert m.is_monotone()
        assert (a[m.pairs[:, 0]] == b[m.pairs[:, 1]]).all()


def test_cardinality_is_lis_of_sorted_edges(backend):
    rng = np.random.default_rng(2)
    for _ in range(30):
        r = int(rng.integers(0, 2000))
        left = rng.integers(0, 200, r)
        right = rng.integers(0, 200, r)
        g = EdgeSet(left, right, 200, 200).normalized()
        order = np.lexsort((-g.right, g.left))
        expect = lis_quadratic(g.right[order].tolist()) if len(g) < 700 else None
        got = len(max_noncrossing_matching(g))
        if expect is not None:
            assert got == expect


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=9))
def test_matches_brute_force(pairs):
    m = max_noncrossing_matching(EdgeSet.from_pairs(pairs, 6, 6))
    assert len(m) == max_noncrossing_brute(pairs)
    assert set(map(tuple, m.pairs.tolist())) <= set(pairs)


def test_backends_pick_same_witness():
    from edindex import kernels
    rng = np.random.default_rng(4)
    if "compiled" not in kernels.available_backends():
        pytest.skip("compiled kernels not built")
    for _ in range(50):
        g = EdgeSet(rng.integers(0, 60, 400), rng.integers(0, 60, 400), 60, 60)
        with kernels.using("python"):
            mp = max_noncrossing_matching(g)
        with kernels.using("compiled"):
            mc = max_noncrossing_matching(g)
        assert mp == mc


def test_script_from_perfect_and_empty_matching():
    s = IndexedString.plain([1, 2, 3], q=4)
    t = IndexedString.plain([0, 2], q=4)
    perfect = NonCrossingMatching(np.array([[0, 0], [1, 1], [2, 2]]), 3, 3)
    assert matching_to_script(perfect, s, s).size == 0
    empty = NonCrossingMatching(np.zeros((0, 2), dtype=np.int64), 3, 2)
    script = matching_to_script(empty, s, t)
    assert len(script.deletions) == 3 and len(script.insertions) == 2
    assert apply_edit_script(s, script) == t


def test_script_rejects_unequal_pair():
    s = IndexedString.plain([1, 2], q=3)
    t = IndexedString.plain([2, 1], q=3)
    with pytest.raises(InvalidMatching):
        matching_to_script(NonCrossingMatching(np.array([[0, 0]]), 2, 2), s, t)


def test_script_round_trip_from_max_matching(backend):
    rng = np.random.default_rng(9)
    for _ in range(100):
        a = IndexedString.plain(rng.integers(0, 4, int(rng.integers(0, 40))), q=4)
        b = IndexedString.plain(rng.integers(0, 4, int(rng.integers(0, 40))), q=4)
        m = max_noncrossing_matching(identical_pair_edges(a, b))
        script = matching_to_script(m, a, b)
        assert script.size == len(a) + len(b) - 2 * len(m)
        assert apply_edit_script(a, script) == b
