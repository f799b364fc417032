import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edindex import kernels
from edindex.channel import CorruptionRecord, corrupt
from edindex.errors import EngineFailure, LengthMismatch
from edindex.sync import (
    PositionDecoding,
    SyncString,
    count_misdecodings,
    exact_engine,
    gen_sync,
    self_matching_bound,
    sync_decode_global,
    verify_sync,
)
from oracles import ed_dp, max_noncrossing_brute


def brute_sync_violation(s, eps):
    """First violating 1-based triple in the kernel's scan order, via plain DP."""
    n = len(s)
    for k in range(3, n + 2):
        for j in range(k - 1, 1, -1):
            for i in range(j - 1, 0, -1):
                if not ed_dp(s[i - 1:j - 1], s[j - 1:k - 1]) > (1 - eps) * (k - i):
                    return (i, j, k)
    return None


def test_distinct_symbols_are_sync():
    for eps in (0.01, 0.3, 0.99):
        assert verify_sync(list(range(25)), eps)


def test_aaaa_fails_at_first_triple():
    check = verify_sync("aaaa", 0.5)
    assert not check and check.triple == (1, 2, 3)


def test_epsilon_outside_open_interval_rejected():
    with pytest.raises(ValueError):
        verify_sync("ab", 0.0)
    with pytest.raises(ValueError):
        gen_sync(5, 0.0, seed=1)
    with pytest.raises(ValueError):
        gen_sync(5, 1.0, seed=1)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=11),
       st.sampled_from([0.1, 0.3, 0.5, 0.7, 0.9]))
def test_verify_matches_brute_force(s, eps):
    check = verify_sync(s, eps)
    assert check.triple == brute_sync_violation(s, eps)


def test_backends_agree_beyond_one_word(backend):
    rng = np.random.default_rng(2)
    for n in (70, 130):
        s = rng.integers(0, 40, n)
        s2 = np.concatenate([np.arange(n), np.arange(5)])
        for eps in (0.3, 0.6):
            with kernels.using("python"):
                a, b = verify_sync(s, eps), verify_sync(s2, eps)
            assert verify_sync(s, eps) == a and verify_sync(s2, eps) == b


def test_gen_sync_small_cases():
    one = gen_sync(1, 0.5, seed=0)
    assert len(one) == 1 and one.verified
    s = gen_sync(50, 0.5, seed=7, q=32)
    assert s.verified and s.q == 32 and verify_sync(s, 0.5)
    assert gen_sync(50, 0.5, seed=7, q=32) == s


def test_gen_sync_reports_failure():
    from edindex.errors import ConstructionFailed
    with pytest.raises(ConstructionFailed, match="larger alphabet"):
        gen_sync(30, 0.2, seed=0, q=2, max_rounds=50)


def test_self_matching_examples():
    assert self_matching_bound(list(range(30))) == 0
    assert self_matching_bound("abab") == 2


def test_self_matching_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(40):
        s = rng.integers(0, 3, int(rng.integers(1, 7))).tolist()
        pairs = [(i, j) for i in range(len(s)) for j in range(len(s)) if i != j and s[i] == s[j]]
        assert self_matching_bound(s) == max_noncrossing_brute(pairs)


@pytest.mark.parametrize("eps", [0.25, 0.5])
def test_generated_strings_obey_self_matching_bound(eps):
    for seed in range(4):
        s = gen_sync(120, eps, seed=seed)
        assert verify_sync(s, eps)
        assert self_matching_bound(s) <= eps * len(s)


def test_text_round_trip(tmp_path):
    s = gen_sync(30, 0.4, seed=3)
    assert s.to_text().splitlines()[0] == "epsilon=0.4 verified=1"
    assert SyncString.from_text(s.to_text()) == s
    s.save(tmp_path / "s.txt")
    assert SyncString.load(tmp_path / "s.txt") == s


def test_decode_identity_with_exact_engine():
    s = gen_sync(60, 0.3, seed=1).as_indexed()
    dec = sync_decode_global(s, s, K=1)
    assert np.array_equal(dec.decoded, np.arange(1, 61))
    assert count_misdecodings(CorruptionRecord.identity(60), dec) == 0


def test_decode_after_deletions_bounded_by_self_matching():
    sync = gen_sync(80, 0.3, seed=2)
    s = sync.as_indexed()
    for seed in range(20):
        r, rec = corrupt(s, 0.2, 0.0, seed=seed)
        dec = sync_decode_global(s, r, K=1)
        assert (dec.decoded > 0).all()
        assert count_misdecodings(rec, dec) <= 0.3 * 80
        assert dec.multiplicity() <= 1


def test_multiplicity_never_exceeds_k():
    s = gen_sync(40, 0.5, seed=3, q=32).as_indexed()
    for K in (1, 2, 3, 5):
        for seed in range(10):
            r, _ = corrupt(s, 0.1, 0.8, mode="block-shuffle-adjacent", seed=seed, block_len=4)
            assert sync_decode_global(s, r, K).multiplicity() <= K


def test_all_bottom_counts_every_survivor():
    s = gen_sync(30, 0.4, seed=4).as_indexed()
    r, rec = corrupt(s, 0.3, 0.1, seed=0)
    blank = PositionDecoding(np.zeros(len(r), dtype=np.int64), np.zeros(len(r), dtype=np.int64), 1)
    assert count_misdecodings(rec, blank) == 30 - 9


def test_length_mismatch_rejected():
    blank = PositionDecoding(np.zeros(3, dtype=np.int64), np.zeros(3, dtype=np.int64), 1)
    with pytest.raises(LengthMismatch):
        count_misdecodings(CorruptionRecord.identity(4), blank)


def test_engine_failure_carries_round():
    s = gen_sync(20, 0.4, seed=4).as_indexed()
    calls = []

    def flaky(a, b):
        calls.append(1)
        if len(calls) == 2:
            raise RuntimeError("boom")
        return exact_engine(a, b)[:1]

    with pytest.raises(EngineFailure) as info:
        sync_decode_global(s, s, K=3, engine=flaky)
    assert info.value.round_no == 2
