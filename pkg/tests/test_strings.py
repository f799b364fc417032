import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edindex.errors import InvalidScript, LengthMismatch
from edindex.strings import (
    AlphabetSpec,
    Delete,
    EditScript,
    IndexedString,
    apply_edit_script,
    banded_edit_distance,
    edit_distance,
    edit_distance_exact,
    index_concat,
    lcs_from_ed,
)
from oracles import common_subsequence_lengths, ed_dp, lcs_dp

small_strings = st.lists(st.integers(0, 3), max_size=40)


def test_alphabet_spec_invariants():
    a = AlphabetSpec((3, 4, 5))
    assert a.size == 60
    assert a.k == 3
    with pytest.raises(ValueError):
        AlphabetSpec((3, 0))
    with pytest.raises(ValueError):
        AlphabetSpec((1 << 40, 1 << 40))


def test_symbols_checked_against_alphabet():
    with pytest.raises(ValueError):
        IndexedString(AlphabetSpec((2, 2)), [[0, 1], [2, 0]])


def test_index_concat_definition():
    s = index_concat("ab", "xy")
    assert list(s) == [(ord("a"), ord("x")), (ord("b"), ord("y"))]
    assert len(index_concat("", "")) == 0


def test_index_concat_length_mismatch():
    with pytest.raises(LengthMismatch, match="length 2 .* length 3"):
        index_concat("ab", "xyz")


def test_projection_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(0, 30))
        p = rng.integers(0, 7, n)
        i = rng.integers(0, 50, n)
        s = index_concat(p, i)
        assert np.array_equal(s.project(0), p)
        assert np.array_equal(s.project(1), i)


def test_exact_distance_examples(backend):
    d, script = edit_distance_exact("abc", "abc")
    assert d == 0 and script.size == 0
    d, script = edit_distance_exact("", "abc")
    assert d == 3 and len(script.insertions) == 3
    assert edit_distance_exact("ab", "ba")[0] == 2


def test_apply_examples():
    s = IndexedString.plain("abc")
    assert apply_edit_script(s, EditScript(3, 3, ())) == s
    out = apply_edit_script(s, EditScript(3, 2, (Delete(1),)))
    assert out == IndexedString.plain("ac", q=s.alphabet.size)


def test_apply_rejects_bad_positions():
    s = IndexedString.plain("abc")
    with pytest.raises(InvalidScript):
        apply_edit_script(s, EditScript(3, 2, (Delete(3),)))
    with pytest.raises(InvalidScript):
        apply_edit_script(s, EditScript(3, 1, (Delete(0), Delete(0))))


def test_exact_distance_against_independent_dp(backend):
    rng = np.random.default_rng(5)
    for _ in range(60):
        q = int(rng.integers(2, 17))
        a = rng.integers(0, q, int(rng.integers(0, 300)))
        b = rng.integers(0, q, int(rng.integers(0, 300)))
        expect = ed_dp(a.tolist(), b.tolist())
        d, script = edit_distance_exact(a, b)
        assert d == expect == script.size == edit_distance(a, b)


def test_round_trip_500_pairs(backend):
    rng = np.random.default_rng(8)
    for _ in range(500):
        q = int(rng.integers(2, 6))
        a = IndexedString.plain(rng.integers(0, q, int(rng.integers(0, 25))), q=q)
        b = IndexedString.plain(rng.integers(0, q, int(rng.integers(0, 25))), q=q)
        d, script = edit_distance_exact(a, b)
        assert apply_edit_script(a, script) == b
        assert d == len(a) + len(b) - 2 * lcs_dp(a.project(0), b.project(0))


def test_deterministic_tie_breaking(backend):
    # "ab" -> "ba": the traceback keeps the trailing match and deletes first
    _, s1 = edit_distance_exact("ab", "ba")
    _, s2 = edit_distance_exact("ab", "ba")
    assert s1 == s2
    assert s1.deletions == [1]


def test_triangle_inequality():
    rng = np.random.default_rng(21)
    for _ in range(1000):
        a, b, c = (rng.integers(0, 3, int(rng.integers(0, 16))) for _ in range(3))
        assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)


def test_banded_matches_full(backend):
    rng = np.random.default_rng(3)
    for _ in range(100):
        a = rng.integers(0, 4, int(rng.integers(0, 120)))
        b = a.copy()
        for _ in range(int(rng.integers(0, 10))):
            p = int(rng.integers(0, len(b) + 1))
            b = np.insert(b, p, rng.integers(0, 4)) if rng.random() < 0.5 or not len(b) \
                else np.delete(b, min(p, len(b) - 1))
        assert banded_edit_distance(a, b) == edit_distance(a, b)


def test_lcs_from_ed():
    assert lcs_from_ed(3, 3, 0) == 3
    assert lcs_from_ed(2, 2, 2) == 1
    a, b = "abcdef", "abxcdyz"
    assert ed_dp(a, b) == 5
    assert lcs_from_ed(6, 7, 5) == 4 == lcs_dp(a, b)
    with pytest.raises(InvalidScript):
        lcs_from_ed(2, 2, 1)
    with pytest.raises(InvalidScript):
        lcs_from_ed(1, 1, 4)


@pytest.mark.parametrize("eps", [0.1, 0.25, 0.5])
def test_approximate_script_implies_long_common_subsequence(eps):
    rng = np.random.default_rng(int(eps * 100))
    for _ in range(60):
        a = rng.integers(0, 2, int(rng.integers(0, 11))).tolist()
        b = rng.integers(0, 2, int(rng.integers(0, 11))).tolist()
        ed = ed_dp(a, b)
        lcs = lcs_dp(a, b)
        for c in common_subsequence_lengths(a, b):
            ed_app = len(a) + len(b) - 2 * c
            if ed_app <= (1 + eps) * ed:
                assert c >= (1 + eps) * lcs - eps / 2 * (len(a) + len(b)) - 1e-9


@settings(max_examples=200, deadline=None)
@given(small_strings, small_strings)
def test_script_size_equals_unmatched_count(a, b):
    d, script = edit_distance_exact(a or [0], b or [0])
    assert script.size == d


def test_text_and_binary_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    s = IndexedString(AlphabetSpec((5, 300, 65536)),
                      np.stack([rng.integers(0, 5, 40), rng.integers(0, 300, 40),
                                rng.integers(0, 65536, 40)], axis=1))
    assert IndexedString.from_text(s.to_text()) == s
    assert IndexedString.from_bytes(s.to_bytes()) == s
    s.save(tmp_path / "s.txt")
    s.save(tmp_path / "s.bin")
    assert IndexedString.load(tmp_path / "s.txt") == s
    assert IndexedString.load(tmp_path / "s.bin") == s
    empty = IndexedString(AlphabetSpec((2, 2)), [])
    assert IndexedString.from_text(empty.to_text()) == empty
    assert IndexedString.from_bytes(empty.to_bytes()) == empty


def test_text_header_is_length_and_component_count():
    s = index_concat([1, 2, 3], [0, 0, 1])
    first = s.to_text().splitlines()[0]
    assert first == "3 2"
