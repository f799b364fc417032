import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edindex import kernels
from edindex.channel import MODES, corrupt_counts
from edindex.errors import AlphabetMismatch, BlockDecodeError
from edindex.indexing import (
    IndexingScheme,
    _edges,
    build_indexing_scheme,
    build_two_layer_scheme,
    ed_approx,
    enhanced_ed_approx,
    graph_stats,
    run_ed_approx,
    window_radius,
)
from edindex.strings import IndexedString, apply_edit_script, edit_distance, pair_keys

EPS1 = 1 / 21
EPS2 = 1 / 121


def payload(n, q=4, seed=0):
    return IndexedString.plain(np.random.default_rng(seed).integers(0, q, n), q=q)


@pytest.fixture(scope="module")
def scheme():
    return build_indexing_scheme(480, EPS1, N=12, seed=1)


@pytest.fixture(scope="module")
def scheme2():
    return build_two_layer_scheme(1440, EPS2, N1=48, N2=8, seed=1)


def test_window_radius():
    assert window_radius(EPS1) == 22
    assert window_radius(0.5) == 3


def test_no_truncation_when_n_fills_codebook():
    sch = build_indexing_scheme(96, EPS1, N=12, M=8, seed=0)
    assert len(sch.index) == 96
    assert np.array_equal(sch.index.project(0), sch.codebook.codewords.ravel())


def test_single_symbol_index():
    sch = build_indexing_scheme(1, EPS1, N=12, seed=0)
    assert sch.n == 1 and sch.index.project(0)[0] == sch.codebook.codewords[0, 0]


def test_block_boundaries_960():
    sch = build_indexing_scheme(960, EPS1, N=12, M=80, seed=2)
    blocks = sch.index.project(0).reshape(80, 12)
    assert np.array_equal(blocks, sch.codebook.codewords)
    assert sch.w >= math.ceil(1 / EPS1) + 1


def test_epsilon_range_is_enforced():
    with pytest.raises(ValueError):
        build_indexing_scheme(100, 0.1)
    with pytest.raises(ValueError):
        build_two_layer_scheme(100, 1 / 21)


def test_identity_gives_empty_script(scheme):
    s = scheme.attach(payload(scheme.n))
    run = run_ed_approx(s, s, scheme)
    assert run.script.size == 0
    assert graph_stats(run)["decodeCalls"] == math.ceil(scheme.n / scheme.N)
    assert len(run.matching) == scheme.n


def test_deleted_block_costs_exactly_N(scheme):
    s = scheme.attach(payload(scheme.n))
    t = s.take(np.r_[0:120, 132:scheme.n])
    script = ed_approx(s, t, scheme)
    assert script.size == 12 == edit_distance(s, t)


@pytest.mark.parametrize("mode", MODES)
def test_ratio_and_validity(scheme, mode, backend):
    s = scheme.attach(payload(scheme.n, seed=3))
    rng = np.random.default_rng(4)
    for trial in range(12):
        nd, ni = (int(x) for x in rng.integers(0, 72, 2))
        t, _ = corrupt_counts(s, nd, ni, mode, seed=trial)
        run = run_ed_approx(s, t, scheme)
        assert apply_edit_script(s, run.script) == t
        assert run.script.size <= (1 + 11 * EPS1) * edit_distance(s, t) + 1e-9
        assert max(run.list_sizes) <= scheme.codebook.L
        assert run.edge_count <= run.edge_bound


def test_graph_edges_join_identical_symbols(scheme):
    s = scheme.attach(payload(scheme.n, seed=5))
    t, _ = corrupt_counts(s, 40, 40, "block-shuffle-adjacent", seed=1)
    m = run_ed_approx(s, t, scheme).matching
    assert m.is_monotone()
    ks, kt = pair_keys(s, t)
    assert np.array_equal(ks[m.pairs[:, 0]], kt[m.pairs[:, 1]])


@pytest.mark.parametrize("extra", [-31, -12, -1, 5, 17, 40])
def test_ragged_target_lengths(scheme, extra):
    s = scheme.attach(payload(scheme.n, seed=6))
    nd, ni = (-extra, 0) if extra < 0 else (0, extra)
    t, _ = corrupt_counts(s, nd, ni, seed=extra + 100)
    script = ed_approx(s, t, scheme)
    assert apply_edit_script(s, script) == t
    assert script.size <= (1 + 11 * EPS1) * edit_distance(s, t)


def test_unrelated_target_is_still_valid(scheme):
    s = scheme.attach(payload(scheme.n))
    t = IndexedString(s.alphabet, np.random.default_rng(9).integers(0, 4, (300, 2)))
    assert apply_edit_script(s, ed_approx(s, t, scheme)) == t


def test_rejects_foreign_inputs(scheme):
    s = scheme.attach(payload(scheme.n))
    with pytest.raises(AlphabetMismatch):
        ed_approx(s, payload(10), scheme)
    other = build_indexing_scheme(scheme.n, EPS1, N=12, seed=99)
    with pytest.raises(ValueError):
        ed_approx(other.attach(payload(scheme.n)), s, scheme)


def test_block_decoder_errors_carry_block_index(scheme):
    s = scheme.attach(payload(scheme.n))

    def flaky(r, t):
        if flaky.calls == 3:
            raise RuntimeError("boom")
        flaky.calls += 1
        return [0]

    flaky.calls = 0
    with pytest.raises(BlockDecodeError) as err:
        run_ed_approx(s, s, scheme, outer_decoder=flaky)
    assert err.value.block == 3 and err.value.layer == 1


def test_failing_decoder_degrades_ratio_not_validity(scheme):
    s = scheme.attach(payload(scheme.n, seed=7))
    t, _ = corrupt_counts(s, 30, 30, seed=3)
    run = run_ed_approx(s, t, scheme, outer_decoder=lambda r, th: [])
    assert run.edge_count == 0
    assert apply_edit_script(s, run.script) == t


def test_edge_paths_agree():
    rng = np.random.default_rng(11)
    for _ in range(30):
        s = rng.integers(0, 3, int(rng.integers(1, 60)))
        t = rng.integers(0, 3, int(rng.integers(1, 60)))
        unit = int(rng.integers(1, 9))
        nus, nut = -(-len(s) // unit), -(-len(t) // unit)
        per = [np.unique(rng.integers(0, nus, int(rng.integers(0, 4)))) for _ in range(nut)]
        ptr = np.r_[0, np.cumsum([len(p) for p in per])].astype(np.int64)
        idx = np.concatenate(per).astype(np.int64)
        a = set(zip(*_edges(s, t, unit, unit, ptr, idx)))
        b = set(zip(*kernels.build_edges(s, t, unit, unit, ptr, idx)))
        assert a == b


def test_serialization_round_trip(tmp_path, scheme, scheme2):
    for sch in (scheme, scheme2):
        assert IndexingScheme.from_json(sch.to_json()) == sch
        sch.save(tmp_path / "s.json")
        assert IndexingScheme.load(tmp_path / "s.json") == sch
    with pytest.raises(ValueError):
        IndexingScheme.from_dict({"format": "other", "version": 1})


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 120), st.integers(0, 40), st.integers(0, 40), st.integers(0, 2 ** 16))
def test_validity_and_ratio_property(n, nd, ni, seed):
    sch = build_indexing_scheme(n, EPS1, N=8, seed=seed % 7)
    s = sch.attach(payload(n, q=2, seed=seed))
    t, _ = corrupt_counts(s, min(nd, n), ni, MODES[seed % 3], seed=seed)
    script = ed_approx(s, t, sch)
    assert apply_edit_script(s, script) == t
    assert script.size <= (1 + 11 * EPS1) * edit_distance(s, t) + 1e-9


# -- two layers ------------------------------------------------------


def test_two_layer_structure(scheme2):
    I1, I2 = scheme2.index.project(0), scheme2.index.project(1)
    inner = scheme2.layer2.codebook
    assert inner.M * 8 == 48
    prime = inner.codewords.ravel()
    for b in range(30):
        assert np.array_equal(I2[b * 48:(b + 1) * 48], prime)
    assert np.array_equal(I1, scheme2.codebook.codewords.ravel()[:1440])


def test_two_layer_rejects_misaligned_blocks():
    with pytest.raises(ValueError):
        build_two_layer_scheme(100, EPS2, N1=50, N2=8)


def test_two_layer_identity(scheme2):
    s = scheme2.attach(payload(scheme2.n))
    run = run_ed_approx(s, s, scheme2)
    assert run.script.size == 0
    assert run.decode_calls == 30 and run.inner_decode_calls == 180


def test_two_layer_ratio_and_edge_bound(scheme2):
    s = scheme2.attach(payload(scheme2.n, seed=8))
    for trial, mode in enumerate(MODES * 3):
        t, _ = corrupt_counts(s, 60 * trial % 200, 37 * trial % 150, mode, seed=trial)
        run = run_ed_approx(s, t, scheme2)
        assert apply_edit_script(s, run.script) == t
        assert run.script.size <= (1 + 23 * EPS2) * edit_distance(s, t) + 1e-9
        L1, L2 = max(run.list_sizes), max(run.inner_list_sizes)
        assert run.edge_count <= 8 * max(L1, 1) * max(L2, 1) / EPS2 ** 2 * scheme2.n
        assert run.edge_count <= run.edge_bound


def test_enhanced_needs_two_layers(scheme):
    s = scheme.attach(payload(scheme.n))
    with pytest.raises(ValueError):
        enhanced_ed_approx(s, s, scheme)
