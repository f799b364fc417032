import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edindex.blockcode import gen_codebook, list_recovery_cap
from edindex.channel import MODES, corrupt_counts
from edindex.codes import (
    ListInsdelCode,
    UniqueInsdelCode,
    build_unique_code,
    candidate_lists,
    convert_lr_to_insdel,
    decode_unique,
    encode_list,
    encode_unique,
    list_code_parameters,
    list_decode_insdel,
    recover_word,
    unique_code_parameters,
)
from edindex.errors import DecodeFailure, LengthMismatch
from edindex.rs import ReedSolomon
from edindex.sync import count_misdecodings, verify_sync

# -- Reed-Solomon ------------------------------------------------------


def _within_budget(rs, msgs, r, erased):
    out = []
    for m in msgs:
        c = rs.encode(m)
        errs = int((c != r)[~erased].sum())
        if 2 * errs + erased.sum() < rs.d:
            out.append(m)
    return out


def test_rs_matches_bruteforce_on_tiny_code():
    rs = ReedSolomon(6, 2, 7)
    msgs = [np.array(m) for m in itertools.product(range(7), repeat=2)]
    rng = np.random.default_rng(0)
    for _ in range(400):
        r = rng.integers(0, 7, 6)
        erased = rng.random(6) < 0.25
        near = _within_budget(rs, msgs, r, erased)
        assert len(near) <= 1
        if near:
            assert np.array_equal(rs.decode(r, np.nonzero(erased)[0]), near[0])
        else:
            with pytest.raises(DecodeFailure):
                rs.decode(r, np.nonzero(erased)[0])


def test_rs_corrects_up_to_the_half_error_boundary():
    rs = ReedSolomon(255, 192)
    rng = np.random.default_rng(1)
    m = rng.integers(0, 257, 192)
    c = rs.encode(m)
    for e, f in [(0, 0), (31, 0), (0, 63), (20, 23), (1, 61)]:
        r = c.copy()
        pos = rng.choice(255, e + f, replace=False)
        r[pos[:e]] = (r[pos[:e]] + 1 + rng.integers(0, 255, e)) % 257
        assert np.array_equal(rs.decode(r, pos[e:]), m)


def test_rs_never_returns_an_uncertified_message():
    rs = ReedSolomon(30, 10, 31)
    rng = np.random.default_rng(2)
    for _ in range(100):
        r = rng.integers(0, 31, 30)
        try:
            m = rs.decode(r)
        except DecodeFailure:
            continue
        assert 2 * int((rs.encode(m) != r).sum()) < rs.d


def test_rs_validation():
    rs = ReedSolomon(10, 4, 11)
    with pytest.raises(LengthMismatch):
        rs.encode([1, 2, 3])
    with pytest.raises(LengthMismatch):
        rs.decode([0] * 9)
    with pytest.raises(ValueError):
        ReedSolomon(11, 4, 11)


# -- unique code -----------------------------------------------------------


@pytest.fixture(scope="module")
def ucode():
    return build_unique_code(255, 0.1, 0.3, seed=1)


def test_unique_parameter_ledger():
    par = unique_code_parameters(0.3, 0.1, 255)
    assert par["eps_I"] == pytest.approx(0.3 / 18)
    assert par["eps_s"] == pytest.approx(0.09 / 288)
    assert par["K"] == 80
    assert par["d"] == 64 and par["k"] == 192


def test_unique_code_components(ucode):
    assert verify_sync(ucode.sync, ucode.sync.epsilon)
    assert ucode.scheme.epsilon == pytest.approx(0.3 / 18 / 11)
    a, b = encode_unique(ucode, np.zeros(192, int)), encode_unique(ucode, np.ones(192, int))
    assert a != b
    assert a.select([1, 2]) == b.select([1, 2])


def test_unique_round_trip_clean(ucode):
    m = np.random.default_rng(3).integers(0, 257, ucode.k)
    assert np.array_equal(decode_unique(ucode, encode_unique(ucode, m)), m)


@pytest.mark.parametrize("mode", MODES)
def test_unique_decoding_within_budget(ucode, mode):
    rng = np.random.default_rng(4)
    m = rng.integers(0, 257, ucode.k)
    x = encode_unique(ucode, m)
    budget = math.floor(0.1 * 255)
    for trial in range(15):
        nd = int(rng.integers(0, budget + 1))
        ni = int(rng.integers(0, budget - nd + 1))
        y, rec = corrupt_counts(x, nd, ni, mode, seed=trial)
        got = recover_word(ucode, y)
        assert count_misdecodings(rec, got.positions) <= 255 * 0.3 / 4
        assert got.positions.multiplicity() <= ucode.K
        assert np.array_equal(decode_unique(ucode, y), m)


def test_unique_burst_deletion(ucode):
    m = np.arange(ucode.k) % 257
    x = encode_unique(ucode, m)
    y = x.take(np.r_[0:100, 125:255])
    assert np.array_equal(decode_unique(ucode, y), m)


def test_unique_garbage_fails_loudly(ucode):
    x = encode_unique(ucode, np.zeros(ucode.k, int))
    y = x.take(np.arange(0, 255, 3))
    with pytest.raises(DecodeFailure):
        decode_unique(ucode, y)


def test_unique_bundle_round_trip(tmp_path, ucode):
    ucode.save(tmp_path / "u.json")
    assert UniqueInsdelCode.load(tmp_path / "u.json") == ucode


# -- list code -------------------------------------------------------------


@pytest.fixture(scope="module")
def lcode():
    lr = gen_codebook(64, 32, 256, 32, seed=1)
    return convert_lr_to_insdel(lr, 0.3, 0.1, 12, 0.3, seed=2)


def test_list_parameter_ledger_example():
    par = list_code_parameters(0.3, 1)
    assert par["eps_s"] == pytest.approx(0.005)
    assert round(par["eps_I"], 4) == 0.0667
    assert par["K"] == 20


def test_conversion_rejects_large_gamma():
    lr = gen_codebook(4, 8, 16, 8, seed=0)
    with pytest.raises(ValueError, match=r"gamma <= l\*eps/3 - 1"):
        convert_lr_to_insdel(lr, 0.3, 0.5, 12, 0.3)


def test_list_code_settings(lcode):
    assert lcode.K == 11 <= lcode.l
    assert lcode.max_deletion_fraction == pytest.approx(0.4)


def test_list_clean_decoding(lcode):
    for m in (0, 17, 63):
        assert m in list_decode_insdel(lcode, encode_list(lcode, m))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 63), st.integers(0, 12), st.integers(0, 3), st.integers(0, 10 ** 6))
def test_list_completeness_property(lcode, m, nd, ni, seed):
    x = encode_list(lcode, m)
    y, _ = corrupt_counts(x, nd, ni, MODES[seed % 3], seed=seed)
    lists, dec = candidate_lists(lcode, y)
    assert lists.max_size <= lcode.K
    out = list_decode_insdel(lcode, y)
    assert m in out
    assert len(out) <= list_recovery_cap(lcode.lr, lcode.alpha, lcode.l)


def test_list_bundle_round_trip(tmp_path, lcode):
    lcode.save(tmp_path / "l.json")
    assert ListInsdelCode.load(tmp_path / "l.json") == lcode


def test_custom_recovery_hook(lcode):
    y = encode_list(lcode, 5)
    assert list_decode_insdel(lcode, y, recover=lambda lists: []) == []
