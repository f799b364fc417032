"""Explicit block codes with list-decoding (ins/del) and list-recovery contracts.

Decoding is exact: a codeword m is returned iff
LCS(codeword_m, r) >= max(N - dMax, |r| - iMax). Candidates are first
filtered by multiset overlap, sum_s min(cnt_r(s), cnt_m(s)), which bounds
the LCS from above, so the filter never drops a true answer. The result
equals brute force over all M codewords (tested against it).

The advertised list cap L is a proven bound, not a sample: a returned
codeword contributes at least t to sum_s min(cnt_r(s), cnt_m(s)), and summed
over all codewords that total is at most the sum of the |r| largest values
g_s(k) = #{m : cnt_m(s) >= k}.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels, seeding
from .errors import ConstructionFailed, LengthMismatch, ListOverflow
from .strings import StringLike, keys_of

_MAGIC = b"EDC1"


class BlockCodebook:
    def __init__(self, codewords, q: int, d_max: int | None = None, i_max: int | None = None,
                 min_ed_sep: int | None = None):
        cw = np.array(codewords, dtype=np.int64)
        if cw.ndim != 2 or cw.shape[0] < 1 or cw.shape[1] < 1:
            raise ValueError("codewords must form a non-empty M x N array")
        if cw.min() < 0 or cw.max() >= q:
            raise ValueError(f"codeword symbols must lie in [0, {q})")
        if len(np.unique(cw, axis=0)) != len(cw):
            raise ValueError("codewords must be distinct")
        cw.setflags(write=False)
        self.codewords = cw
        self.q = int(q)
        n = cw.shape[1]
        self.d_max = n // 2 if d_max is None else int(d_max)
        self.i_max = n // 2 if i_max is None else int(i_max)
        if not (0 <= self.d_max <= n and self.i_max >= 0):
            raise ValueError("radius must satisfy 0 <= dMax <= N and iMax >= 0")
        self.min_ed_sep = min_ed_sep

    @property
    def M(self) -> int:
        return self.codewords.shape[0]

    @property
    def N(self) -> int:
        return self.codewords.shape[1]

    def __len__(self):
        return self.M

    def __eq__(self, other):
        return (isinstance(other, BlockCodebook) and self.q == other.q
                and (self.d_max, self.i_max) == (other.d_max, other.i_max)
                and np.array_equal(self.codewords, other.codewords))

    def with_radius(self, d_max: int, i_max: int) -> "BlockCodebook":
        cb = BlockCodebook.__new__(BlockCodebook)
        cb.__dict__.update({k: v for k, v in self.__dict__.items() if k != "L"})
        cb.d_max, cb.i_max = int(d_max), int(i_max)
        return cb

    # -- inverted index ------------------------------------------------

    @cached_property
    def _postings(self):
        """(symbols, codeword ids, counts) sorted by symbol, one row per (s, m)."""
        M = self.M
        flat = (self.codewords * M + np.arange(M)[:, None]).ravel()
        key, cnt = np.unique(flat, return_counts=True)
        return key // M, key % M, cnt.astype(np.int64)

    @cached_property
    def _g_prefix(self) -> np.ndarray:
        sym, _, cnt = self._postings
        # g_s(k) = number of (s, m) rows whose count reaches k
        ks = np.repeat(sym, cnt) * (self.N + 1) + \
            (np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt))
        _, g = np.unique(ks, return_counts=True)
        g = np.sort(g)[::-1]
        return np.concatenate([[0], np.cumsum(g)])

    def list_cap(self, length: int, threshold: int) -> int:
        """Proven bound on the list size for inputs of this length and LCS threshold."""
        if threshold <= 0:
            return self.M
        pre = self._g_prefix
        total = int(pre[min(length, len(pre) - 1)])
        return min(self.M, total // threshold)

    def threshold(self, length: int) -> int:
        return max(self.N - self.d_max, length - self.i_max)

    @cached_property
    def L(self) -> int:
        """Advertised list size at radius (dMax, iMax), maximised over input lengths."""
        return max(self.list_cap(n, self.threshold(n)) for n in range(self.N + self.i_max + 1))

    def overlap(self, r: np.ndarray) -> np.ndarray:
        """sum_s min(cnt_r(s), cnt_m(s)) for every codeword m."""
        sym, ids, cnt = self._postings
        rs, rc = np.unique(r, return_counts=True)
        lo = np.searchsorted(sym, rs, side="left")
        hi = np.searchsorted(sym, rs, side="right")
        span = hi - lo
        idx = np.repeat(lo, span) + (np.arange(span.sum()) - np.repeat(np.cumsum(span) - span, span))
        w = np.minimum(cnt[idx], np.repeat(rc, span))
        return np.bincount(ids[idx], weights=w, minlength=self.M).astype(np.int64)

    # -- serialization -------------------------------------------------

    def to_text(self) -> str:
        head = f"{self.M} {self.N} {self.q} {self.d_max} {self.i_max} {self.L}\n"
        return head + "".join(" ".join(map(str, row)) + "\n" for row in self.codewords.tolist())

    @classmethod
    def from_text(cls, text: str) -> "BlockCodebook":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        M, N, q, d, i, L = (int(x) for x in lines[0].split())
        rows = np.array([[int(x) for x in ln.split()] for ln in lines[1:1 + M]], dtype=np.int64)
        if rows.shape != (M, N):
            raise ValueError(f"codebook body is {rows.shape}, header says {(M, N)}")
        cb = cls(rows, q, d, i)
        if cb.L != L:
            raise ValueError(f"header list cap {L} disagrees with recomputed {cb.L}")
        return cb

    def to_bytes(self) -> bytes:
        if self.q > 1 << 16:
            raise ValueError("binary codebooks need q <= 65536")
        head = _MAGIC + struct.pack("<6I", self.M, self.N, self.q, self.d_max, self.i_max, self.L)
        return head + self.codewords.astype("<u2").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "BlockCodebook":
        if blob[:4] != _MAGIC:
            raise ValueError("not a binary codebook")
        M, N, q, d, i, _ = struct.unpack_from("<6I", blob, 4)
        data = np.frombuffer(blob, dtype="<u2", offset=28, count=M * N).astype(np.int64)
        return cls(data.reshape(M, N), q, d, i)

    def save(self, path) -> None:
        path = Path(path)
        if path.suffix == ".bin":
            path.write_bytes(self.to_bytes())
        else:
            path.write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "BlockCodebook":
        path = Path(path)
        if path.suffix == ".bin":
            return cls.from_bytes(path.read_bytes())
        return cls.from_text(path.read_text())

    def to_dict(self) -> dict:
        return {"q": self.q, "d_max": self.d_max, "i_max": self.i_max, "L": self.L,
                "min_ed_sep": self.min_ed_sep, "codewords": self.codewords.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "BlockCodebook":
        return cls(d["codewords"], d["q"], d["d_max"], d["i_max"], d.get("min_ed_sep"))


# -- list decoding -----------------------------------------------------


def _radius(cb, d_max, i_max):
    return (cb.d_max if d_max is None else int(d_max),
            cb.i_max if i_max is None else int(i_max))


def list_decode(cb: BlockCodebook, received: StringLike, d_max: int | None = None,
                i_max: int | None = None, threshold: int | None = None) -> list[int]:
    """Indices m (ascending) whose codeword reaches `received` within the radius.

    `threshold` overrides the LCS threshold directly (used for short blocks).
    """
    r = np.ascontiguousarray(keys_of(received), dtype=np.int64)
    d_max, i_max = _radius(cb, d_max, i_max)
    if threshold is None:
        if len(r) > cb.N + i_max:
            return []
        t = max(cb.N - d_max, len(r) - i_max)
    else:
        t = int(threshold)
    if t <= 0:
        return list(range(cb.M))
    cand = np.nonzero(cb.overlap(r) >= t)[0]
    if not len(cand):
        return []
    lcs = np.asarray(kernels.lcs_many(cb.codewords, cand.astype(np.int64), r))
    out = cand[lcs >= t].tolist()
    if len(out) > cb.list_cap(len(r), t):
        raise ListOverflow(f"{len(out)} candidates exceed the proven cap {cb.list_cap(len(r), t)}")
    return out


def list_decode_bruteforce(cb: BlockCodebook, received: StringLike, d_max: int | None = None,
                           i_max: int | None = None) -> list[int]:
    """Reference decoder: exact LCS against every codeword."""
    r = np.asarray(keys_of(received), dtype=np.int64)
    d_max, i_max = _radius(cb, d_max, i_max)
    if len(r) > cb.N + i_max:
        return []
    t = max(cb.N - d_max, len(r) - i_max)
    return [m for m in range(cb.M) if kernels.lcs_length(cb.codewords[m], r) >= t]


def measure_list_size(cb: BlockCodebook, trials: int, seed: int) -> int:
    """Largest list seen on adversarial inputs: windows straddling two codewords,
    plus corrupted codewords at the edge of the radius."""
    rng = seeding.rng(seed, "measure-list")
    worst = 0
    N = cb.N
    flat = cb.codewords.ravel()
    for _ in range(trials):
        if rng.random() < 0.5 and cb.M > 1:
            start = int(rng.integers(0, len(flat) - N + 1))
            r = flat[start:start + N]
        else:
            m = int(rng.integers(0, cb.M))
            keep = np.sort(rng.choice(N, N - cb.d_max, replace=False))
            donor = cb.codewords[int(rng.integers(0, cb.M))]
            extra = donor[rng.choice(N, min(cb.i_max, N), replace=False)]
            r = np.concatenate([cb.codewords[m][keep], extra])
            rng.shuffle(r[len(keep):])
        worst = max(worst, len(list_decode(cb, r)))
    return worst


# -- construction ------------------------------------------------------


def gen_codebook(M: int, N: int, q: int, min_ed_sep: int, seed: int,
                 d_max: int | None = None, i_max: int | None = None,
                 max_tries: int | None = None) -> BlockCodebook:
    """Greedy random code with pairwise ins/del distance >= min_ed_sep."""
    if M < 1 or N < 1 or q < 2:
        raise ValueError("need M >= 1, N >= 1 and q >= 2")
    if min_ed_sep % 2 or not 0 <= min_ed_sep < 2 * N:
        raise ValueError("min_ed_sep must be even and below 2N")
    if N * math.log(q) < math.log(M):
        raise ValueError(f"q^N = {q}^{N} cannot hold {M} codewords")
    lcs_limit = N - min_ed_sep // 2
    rng = seeding.rng(seed, "codebook")
    if max_tries is None:
        max_tries = 50 * M + 2000
    kept: list[np.ndarray] = []
    post: dict[int, dict[int, int]] = {}
    seen: set[bytes] = set()
    tries = 0
    while len(kept) < M:
        if tries >= max_tries:
            raise ConstructionFailed(
                f"kept {len(kept)} of {M} codewords after {max_tries} samples; "
                f"use a larger q or N, or a smaller min_ed_sep")
        tries += 1
        c = rng.integers(0, q, N).astype(np.int64)
        if c.tobytes() in seen:
            continue
        score: dict[int, int] = {}
        vals, cnts = np.unique(c, return_counts=True)
        for s, k in zip(vals.tolist(), cnts.tolist()):
            for m, km in post.get(s, {}).items():
                score[m] = score.get(m, 0) + min(k, km)
        suspects = [m for m, sc in score.items() if sc > lcs_limit]
        if suspects and int(np.max(kernels.lcs_many(np.array(kept), np.array(suspects, dtype=np.int64), c))) > lcs_limit:
            continue
        mid = len(kept)
        kept.append(c)
        seen.add(c.tobytes())
        for s, k in zip(vals.tolist(), cnts.tolist()):
            post.setdefault(s, {})[mid] = k
    return BlockCodebook(np.array(kept), q, d_max, i_max, min_ed_sep)


def pairwise_min_distance(cb: BlockCodebook) -> int:
    best = 2 * cb.N
    for a in range(cb.M):
        for b in range(a + 1, cb.M):
            best = min(best, 2 * cb.N - 2 * int(kernels.lcs_length(cb.codewords[a], cb.codewords[b])))
    return best


# -- list recovery -----------------------------------------------------


@dataclass(frozen=True)
class RecoveryLists:
    sets: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(int(x) for x in s) for s in self.sets))

    def __len__(self):
        return len(self.sets)

    @property
    def max_size(self) -> int:
        return max((len(s) for s in self.sets), default=0)


def _agreements(cb: BlockCodebook, lists: Sequence[Iterable[int]]) -> np.ndarray:
    sets = lists.sets if isinstance(lists, RecoveryLists) else [frozenset(s) for s in lists]
    if len(sets) != cb.N:
        raise LengthMismatch(f"need {cb.N} candidate sets, got {len(sets)}")
    hit = np.zeros(cb.M, dtype=np.int64)
    for i, s in enumerate(sets):
        if s:
            hit += np.isin(cb.codewords[:, i], np.fromiter(s, dtype=np.int64, count=len(s)))
    return hit


def list_recover(cb: BlockCodebook, lists, alpha: float) -> list[int]:
    """All m with |{i : codeword_m[i] in lists[i]}| >= alpha * N."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    hit = _agreements(cb, lists)
    return np.nonzero(hit >= alpha * cb.N - 1e-9)[0].tolist()


def list_recovery_cap(cb: BlockCodebook, alpha: float, l: int) -> int:
    """Proven (alpha, l, L) bound: agreements summed over the output list cannot
    exceed the sum over positions of the l most frequent column symbols."""
    need = math.ceil(alpha * cb.N - 1e-9)
    total = 0
    for i in range(cb.N):
        _, c = np.unique(cb.codewords[:, i], return_counts=True)
        total += int(np.sort(c)[::-1][:l].sum())
    return min(cb.M, total // max(need, 1))


def measure_recovery_size(cb: BlockCodebook, alpha: float, l: int, trials: int, seed: int) -> int:
    """Largest recovered list over lists built from l random codewords per trial."""
    rng = seeding.rng(seed, "measure-recovery")
    worst = 0
    for _ in range(trials):
        pick = rng.choice(cb.M, size=min(l, cb.M), replace=False)
        lists = [set(cb.codewords[pick, i].tolist()) for i in range(cb.N)]
        worst = max(worst, len(list_recover(cb, lists, alpha)))
    return worst


# -- randomized decoders -----------------------------------------------

# A randomized decoder takes (received, seed_sequence) and returns a list.
Decoder = Callable[[object, np.random.SeedSequence], list]


_COIN = 1 << 31  # child key reserved for the failure coin


def _child(ss: np.random.SeedSequence, j: int) -> np.random.SeedSequence:
    if j == 0:
        return ss
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + (j,))


def deterministic(dec: Callable[[object], list]) -> Decoder:
    return lambda received, ss: dec(received)


def inject_failures(dec: Decoder, p: float) -> Decoder:
    """With probability p return an empty list instead of calling `dec`."""
    if not 0 <= p <= 1:
        raise ValueError("failure probability must lie in [0, 1]")

    def wrapped(received, ss):
        coin = np.random.default_rng(_child(ss, _COIN)).random()
        return [] if coin < p else dec(received, ss)

    return wrapped


def amplify_decoder(dec: Decoder, k: int) -> Decoder:
    """Union of k runs on independent child seeds (run 0 uses the given seed)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        return dec

    def amplified(received, ss):
        out: set = set()
        last = None
        ok = 0
        for j in range(k):
            try:
                out.update(dec(received, _child(ss, j)))
                ok += 1
            except Exception as exc:  # noqa: BLE001 - re-raised below if every run failed
                last = exc
        if ok == 0:
            raise last
        return sorted(out)

    return amplified
