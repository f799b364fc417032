"""Indexing schemes: index strings built from codebooks, plus the approximate
edit-distance algorithms that exploit them (one and two layers)."""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import kernels
from .blockcode import BlockCodebook, gen_codebook, list_decode
from .errors import AlphabetMismatch, BlockDecodeError, LengthMismatch
from .matching import EdgeSet, NonCrossingMatching, matching_to_script, max_noncrossing_matching
from .strings import AlphabetSpec, EditScript, IndexedString, StringLike, as_indexed, pair_keys

FORMAT = "edindex-scheme"
VERSION = 1

# (received index block, LCS threshold) -> candidate codeword indices
BlockDecoder = Callable[[np.ndarray, int], list]


def window_radius(epsilon: float) -> int:
    return math.ceil(1 / epsilon - 1e-9) + 1


def block_threshold(length: int, epsilon: float) -> int:
    """LCS needed at radius floor((1-eps)*length) for both deletions and insertions."""
    return length - math.floor((1 - epsilon) * length + 1e-9)


@dataclass(frozen=True, eq=False)
class Layer2:
    N2: int
    codebook: BlockCodebook

    @property
    def period(self) -> int:
        return self.codebook.M * self.N2


@dataclass(eq=False)
class IndexingScheme:
    index: IndexedString  # one component (I) or two (I1, I2)
    N: int
    w: int
    epsilon: float
    codebook: BlockCodebook
    layer2: Layer2 | None = None
    seed: int | None = None

    @property
    def n(self) -> int:
        return len(self.index)

    @property
    def layers(self) -> int:
        return 1 if self.layer2 is None else 2

    @property
    def ratio_bound(self) -> float:
        return 1 + (11 if self.layers == 1 else 23) * self.epsilon

    def attach(self, payload: StringLike) -> IndexedString:
        """payload x I, with the index as trailing component(s)."""
        p = as_indexed(payload)
        if len(p) != self.n:
            raise LengthMismatch(f"payload has length {len(p)} but the index has length {self.n}")
        return IndexedString(p.alphabet * self.index.alphabet, np.hstack([p.data, self.index.data]))

    def __eq__(self, other):
        return isinstance(other, IndexingScheme) and self.to_json() == other.to_json()

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "format": FORMAT,
            "version": VERSION,
            "n": self.n,
            "N": self.N,
            "w": self.w,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "alphabet": list(self.index.alphabet.components),
            "index": self.index.data.T.tolist(),
            "codebook": self.codebook.to_dict(),
            "layer2": None,
        }
        if self.layer2 is not None:
            d["layer2"] = {"N2": self.layer2.N2, "codebook": self.layer2.codebook.to_dict()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "IndexingScheme":
        if d.get("format") != FORMAT or d.get("version") != VERSION:
            raise ValueError(f"not a version {VERSION} {FORMAT} bundle")
        data = np.asarray(d["index"], dtype=np.int64).reshape(len(d["alphabet"]), -1).T
        index = IndexedString(AlphabetSpec(tuple(d["alphabet"])), data)
        l2 = d.get("layer2")
        layer2 = Layer2(l2["N2"], BlockCodebook.from_dict(l2["codebook"])) if l2 else None
        return cls(index, d["N"], d["w"], d["epsilon"], BlockCodebook.from_dict(d["codebook"]),
                   layer2, d.get("seed"))

    @classmethod
    def from_json(cls, text: str) -> "IndexingScheme":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "IndexingScheme":
        return cls.from_json(Path(path).read_text())


def _check_eps(epsilon: float, limit: float) -> None:
    if not 0 < epsilon <= limit:
        raise ValueError(f"epsilon must lie in (0, {limit:.6g}] for the ratio guarantee, got {epsilon}")


def _index_codebook(M, N, q, seed, epsilon, min_ed_sep, tag):
    rad = math.floor((1 - epsilon) * N + 1e-9)
    if min_ed_sep is None:
        min_ed_sep = 2 * (N // 2)
    return gen_codebook(M, N, q, min_ed_sep, seed * 2 + tag, d_max=rad, i_max=rad)


def build_indexing_scheme(n: int, epsilon: float, N: int = 12, q: int = 1 << 16,
                          seed: int = 0, M: int | None = None, min_ed_sep: int | None = None,
                          codebook: BlockCodebook | None = None) -> IndexingScheme:
    """Concatenate codewords of a random codebook and truncate to length n."""
    _check_eps(epsilon, 1 / 21)
    if n < 1:
        raise ValueError("n must be at least 1")
    if codebook is None:
        M = max(M or 0, math.ceil(n / N))
        codebook = _index_codebook(M, N, q, seed, epsilon, min_ed_sep, 0)
    N = codebook.N
    if codebook.M * N < n:
        raise ValueError(f"{codebook.M} codewords of length {N} cannot index {n} symbols")
    I = codebook.codewords.ravel()[:n]
    index = IndexedString.plain(I, q=codebook.q)
    return IndexingScheme(index, N, window_radius(epsilon), epsilon, codebook, None, seed)


def build_two_layer_scheme(n: int, epsilon: float, N1: int = 48, N2: int = 8,
                           q1: int = 1 << 16, q2: int = 1 << 16, seed: int = 0,
                           min_ed_sep: int | None = None) -> IndexingScheme:
    """I = (I1, I2): I1 from outer codewords of length N1, I2 = I' repeated,
    where I' concatenates the N1 / N2 inner codewords of length N2."""
    _check_eps(epsilon, 1 / 121)
    if n < 1:
        raise ValueError("n must be at least 1")
    if N1 % N2:
        raise ValueError(f"N1 = {N1} must be a multiple of N2 = {N2} so sub-blocks align")
    M2 = N1 // N2
    inner = _index_codebook(M2, N2, q2, seed, epsilon, min_ed_sep, 1)
    if inner.M * N2 < N1:
        raise ValueError("inner codebook too small to cover one outer block")
    outer = _index_codebook(math.ceil(n / N1), N1, q1, seed, epsilon, min_ed_sep, 0)
    I1 = outer.codewords.ravel()[:n]
    I2 = np.resize(inner.codewords.ravel()[:N1], n)
    index = IndexedString(AlphabetSpec((q1, q2)), np.stack([I1, I2], axis=1))
    return IndexingScheme(index, N1, window_radius(epsilon), epsilon, outer, Layer2(N2, inner), seed)


# -- Algorithms 1 and 2 ------------------------------------------------


@dataclass
class ApproxRun:
    script: EditScript
    matching: NonCrossingMatching
    edge_count: int
    decode_calls: int
    inner_decode_calls: int = 0
    list_sizes: Counter = field(default_factory=Counter)
    inner_list_sizes: Counter = field(default_factory=Counter)
    candidate_units: int = 0
    edge_bound: int = 0


def _decoder_for(cb: BlockCodebook) -> BlockDecoder:
    return lambda r, t: list_decode(cb, r, threshold=t)


def _decode_units(idx: np.ndarray, unit: int, epsilon: float, dec: BlockDecoder,
                  sizes: Counter, layer: int = 1):
    lists = []
    for b, start in enumerate(range(0, len(idx), unit)):
        r = idx[start:start + unit]
        try:
            got = sorted(int(x) for x in dec(r, block_threshold(len(r), epsilon)))
        except Exception as exc:
            raise BlockDecodeError(layer, b, exc) from exc
        sizes[len(got)] += 1
        lists.append(got)
    return lists


def _window(centres, w: int, limit: int) -> np.ndarray:
    if not centres:
        return np.zeros(0, dtype=np.int64)
    c = np.asarray(centres, dtype=np.int64)
    span = (c[:, None] + np.arange(-w, w + 1)[None, :]).ravel()
    return np.unique(span[(span >= 0) & (span < limit)])


def _csr(per_unit):
    ptr = np.zeros(len(per_unit) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(c) for c in per_unit])
    idx = np.concatenate(per_unit).astype(np.int64) if per_unit else np.zeros(0, dtype=np.int64)
    return ptr, idx


def _edges(s_keys, t_keys, unit_s, unit_t, ptr, idx):
    """Identical-symbol edges between each target unit and its candidate source units."""
    ns, nt = len(s_keys), len(t_keys)
    n_units_s = -(-ns // unit_s)
    order = np.argsort(s_keys, kind="stable")
    sk = s_keys[order]
    lo = np.searchsorted(sk, t_keys, side="left")
    hi = np.searchsorted(sk, t_keys, side="right")
    cnt = hi - lo
    by_key = int(cnt.sum())
    by_window = int((np.diff(ptr) * unit_t).sum()) * unit_s
    if by_window < by_key:
        return kernels.build_edges(s_keys, t_keys, unit_s, unit_t, ptr, idx)
    # walk identical-key pairs and keep those whose unit pair is a candidate
    t_pos = np.repeat(np.arange(nt, dtype=np.int64), cnt)
    s_pos = order[np.repeat(lo, cnt) + (np.arange(by_key) - np.repeat(np.cumsum(cnt) - cnt, cnt))]
    allowed = np.repeat(np.arange(len(ptr) - 1, dtype=np.int64), np.diff(ptr)) * n_units_s + idx
    pk = (t_pos // unit_t) * n_units_s + s_pos // unit_s
    pos = np.searchsorted(allowed, pk)
    ok = pos < len(allowed)
    ok[ok] = allowed[pos[ok]] == pk[ok]
    return s_pos[ok], t_pos[ok]


def _prepare(s: StringLike, t: StringLike, scheme: IndexingScheme):
    s, t = as_indexed(s), as_indexed(t)
    width = scheme.index.alphabet.k
    if s.alphabet.k != t.alphabet.k:
        raise AlphabetMismatch(f"strings have {s.alphabet.k} and {t.alphabet.k} components")
    if s.alphabet.k < width:
        raise AlphabetMismatch(f"strings need at least {width} index component(s)")
    if len(s) != scheme.n:
        raise LengthMismatch(f"source has length {len(s)}, scheme indexes {scheme.n} symbols")
    if not np.array_equal(s.data[:, -width:], scheme.index.data):
        raise ValueError("source is not indexed by this scheme's index string")
    sk, tk = pair_keys(s, t)
    return s, t, sk, tk


def run_ed_approx(s: StringLike, t: StringLike, scheme: IndexingScheme,
                  outer_decoder: BlockDecoder | None = None,
                  inner_decoder: BlockDecoder | None = None) -> ApproxRun:
    """The one-layer or two-layer windowed matching, with counters."""
    s, t, sk, tk = _prepare(s, t, scheme)
    eps, w, N = scheme.epsilon, scheme.w, scheme.N
    width = scheme.index.alphabet.k
    n_blocks_s = -(-len(s) // N)
    outer_decoder = outer_decoder or _decoder_for(scheme.codebook)
    sizes: Counter = Counter()
    idx1 = np.ascontiguousarray(t.data[:, -width])
    lists1 = _decode_units(idx1, N, eps, outer_decoder, sizes)
    windows1 = [_window(lst, w, n_blocks_s) for lst in lists1]
    run = ApproxRun(None, None, 0, len(lists1), list_sizes=sizes)

    if scheme.layers == 1:
        unit = N
        per_unit = windows1
    else:
        l2 = scheme.layer2
        unit, R = l2.N2, N // l2.N2
        inner_decoder = inner_decoder or _decoder_for(l2.codebook)
        idx2 = np.ascontiguousarray(t.data[:, -1])
        lists2 = _decode_units(idx2, unit, eps, inner_decoder, run.inner_list_sizes, 2)
        run.inner_decode_calls = len(lists2)
        n_sub_s = -(-len(s) // unit)
        per_unit = []
        for u, lst in enumerate(lists2):
            outer = windows1[u // R]
            inner = _window(lst, w, R)
            if len(outer) and len(inner):
                cand = (outer[:, None] * R + inner[None, :]).ravel()
                cand = np.unique(cand[cand < n_sub_s])
            else:
                cand = np.zeros(0, dtype=np.int64)
            per_unit.append(cand)

    ptr, idx = _csr(per_unit)
    left, right = _edges(sk, tk, unit, unit, ptr, idx)
    g = EdgeSet(left, right, len(s), len(t))
    m = max_noncrossing_matching(g)
    run.matching = m
    run.script = matching_to_script(m, s, t)
    run.edge_count = len(g)
    run.candidate_units = len(idx)
    run.edge_bound = len(idx) * unit * unit
    return run


def ed_approx(s: StringLike, t: StringLike, scheme: IndexingScheme) -> EditScript:
    if scheme.layers != 1:
        return enhanced_ed_approx(s, t, scheme)
    return run_ed_approx(s, t, scheme).script


def enhanced_ed_approx(s: StringLike, t: StringLike, scheme: IndexingScheme) -> EditScript:
    if scheme.layer2 is None:
        raise ValueError("enhanced_ed_approx needs a two-layer scheme")
    return run_ed_approx(s, t, scheme).script


def graph_stats(run: ApproxRun) -> dict:
    out = {
        "edgeCount": run.edge_count,
        "decodeCalls": run.decode_calls,
        "listSizes": {str(k): v for k, v in sorted(run.list_sizes.items())},
        "maxListSize": max(run.list_sizes, default=0),
        "candidateUnits": run.candidate_units,
        "edgeBound": run.edge_bound,
        "scriptSize": run.script.size,
    }
    if run.inner_decode_calls:
        out["innerDecodeCalls"] = run.inner_decode_calls
        out["innerListSizes"] = {str(k): v for k, v in sorted(run.inner_list_sizes.items())}
        out["maxInnerListSize"] = max(run.inner_list_sizes, default=0)
    return out


def scheme_engine(scheme: IndexingScheme):
    """LCS engine for sync_decode_global backed by the approximate algorithm."""
    def engine(sent: IndexedString, received: IndexedString) -> np.ndarray:
        return run_ed_approx(sent, received, scheme).matching.pairs
    return engine
