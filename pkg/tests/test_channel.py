import numpy as np
import pytest

from edindex.channel import (
    MODES,
    CorruptionRecord,
    corrupt,
    corrupt_counts,
    verify_record,
)
from edindex.strings import IndexedString, edit_distance, index_concat


def _sample(n, seed=0):
    rng = np.random.default_rng(seed)
    return index_concat(rng.integers(0, 4, n), rng.integers(0, 50, n))


def test_zero_budget_is_identity():
    s = _sample(40)
    r, rec = corrupt(s, 0, 0, seed=1)
    assert r == s
    assert np.array_equal(rec.survivor_map, np.arange(40)) and rec.insertions == 0
    assert verify_record(s, r, CorruptionRecord.identity(40))


def test_delta_one_rejected():
    with pytest.raises(ValueError):
        corrupt(_sample(5), 1.0, 0)
    with pytest.raises(ValueError):
        corrupt(_sample(5), 0.1, -0.1)


@pytest.mark.parametrize("mode", MODES)
def test_budget_applied_exactly_and_record_reconstructs(mode):
    s = _sample(100, 3)
    for seed in range(30):
        r, rec = corrupt(s, 0.13, 0.07, mode=mode, seed=seed, block_len=8)
        assert rec.deletions == 13 and rec.insertions == 7
        assert len(r) == 100 - 13 + 7
        assert verify_record(s, r, rec)
        assert edit_distance(s, r) <= 20


def test_floor_budget_tolerates_float_noise():
    _, rec = corrupt(_sample(100), 0.29, 0.0, seed=0)
    assert rec.deletions == 29


def test_deterministic_per_seed():
    s = _sample(60)
    a = corrupt(s, 0.2, 0.2, mode="block-shuffle-adjacent", seed=5)
    b = corrupt(s, 0.2, 0.2, mode="block-shuffle-adjacent", seed=5)
    assert a[0] == b[0] and a[1].to_json() == b[1].to_json()


def test_burst_deletes_a_contiguous_run():
    s = _sample(80)
    _, rec = corrupt_counts(s, 10, 0, mode="burst", seed=2)
    dead = np.nonzero(rec.survivor_map < 0)[0]
    assert len(dead) == 10 and dead[-1] - dead[0] == 9


def test_shuffled_survivor_map_fails():
    s = _sample(30)
    r, rec = corrupt(s, 0.2, 0.1, seed=4)
    smap = rec.survivor_map.copy()
    live = np.nonzero(smap >= 0)[0]
    smap[live[0]], smap[live[1]] = smap[live[1]], smap[live[0]]
    bad = CorruptionRecord(rec.sent_len, rec.received_len, smap, rec.inserted_positions,
                           rec.deletions, rec.insertions)
    check = verify_record(s, r, bad)
    assert not check and "increasing" in check.reason


def test_record_json_round_trip():
    s = _sample(50)
    _, rec = corrupt(s, 0.1, 0.3, seed=9)
    assert CorruptionRecord.from_json(rec.to_json()) == rec


def test_uniform_insertions_respect_alphabet():
    s = IndexedString.plain([0, 1, 2, 1, 0], q=3)
    r, _ = corrupt(s, 0.0, 3.0, seed=1)
    assert r.data.max() < 3
