"""Synchronization strings: construct-and-verify, self-matchings, global decoding."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from . import kernels, seeding
from .channel import CorruptionRecord
from .errors import ConstructionFailed, EngineFailure, LengthMismatch
from .matching import EdgeSet, identical_pair_edges, max_noncrossing_matching
from .strings import IndexedString, StringLike, as_indexed, keys_of, pair_keys

MAX_ALPHABET = 1 << 16  # keeps every coordinate inside the u16 binary format


@dataclass(frozen=True, eq=False)
class SyncString:
    symbols: np.ndarray
    epsilon: float
    q: int
    verified: bool = False

    def __post_init__(self):
        arr = np.asarray(self.symbols, dtype=np.int64).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        return (isinstance(other, SyncString) and self.q == other.q
                and self.epsilon == other.epsilon and self.verified == other.verified
                and np.array_equal(self.symbols, other.symbols))

    def as_indexed(self) -> IndexedString:
        return IndexedString.plain(self.symbols, q=self.q)

    def to_text(self) -> str:
        head = f"epsilon={self.epsilon!r} verified={int(self.verified)}\n"
        return head + self.as_indexed().to_text()

    @classmethod
    def from_text(cls, text: str) -> "SyncString":
        head, _, body = text.partition("\n")
        fields = dict(part.split("=", 1) for part in head.split())
        s = IndexedString.from_text(body)
        return cls(s.project(0), float(fields["epsilon"]), s.alphabet.components[0],
                   fields.get("verified", "0") == "1")

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "SyncString":
        return cls.from_text(Path(path).read_text())


class SyncCheck(NamedTuple):
    ok: bool
    triple: tuple | None = None  # first violating (i, j, k), 1-based

    def __bool__(self):
        return self.ok


def _check_eps(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in the open interval (0, 1), got {epsilon}")
    return epsilon


def verify_sync(s, epsilon: float) -> SyncCheck:
    """Exhaustive check of ED(S[i,j), S[j,k)) > (1-eps)(k-i) over all triples."""
    epsilon = _check_eps(epsilon)
    keys = s.symbols if isinstance(s, SyncString) else keys_of(s)
    if len(keys) < 1:
        raise ValueError("verify_sync needs a non-empty string")
    hit = kernels.sync_scan(np.ascontiguousarray(keys, dtype=np.int64), epsilon, 2)
    if hit is None:
        return SyncCheck(True)
    i, j, k = hit
    return SyncCheck(False, (i + 1, j + 1, k + 1))


def sync_alphabet_size(epsilon: float, c: float = 4.0) -> int:
    return min(MAX_ALPHABET, max(2, math.ceil(c / epsilon ** 3 - 1e-9)))


def gen_sync(n: int, epsilon: float, seed: int, c: float = 4.0, q: int | None = None,
             max_rounds: int | None = None) -> SyncString:
    """Sample, scan, resample the first violating interval, repeat."""
    epsilon = _check_eps(epsilon)
    if n < 1:
        raise ValueError("n must be at least 1")
    q = int(q) if q is not None else sync_alphabet_size(epsilon, c)
    if max_rounds is None:
        max_rounds = 200 * n + 1000
    rng = seeding.rng(seed, "sync")
    s = rng.integers(0, q, n).astype(np.int64)
    k_start = 2
    for _ in range(max_rounds):
        hit = kernels.sync_scan(s, epsilon, k_start)
        if hit is None:
            return SyncString(s, epsilon, q, True)
        i, _, k = hit
        s[i:k] = rng.integers(0, q, k - i)
        # every triple ending at or before i is untouched and already checked
        k_start = i + 1
    raise ConstructionFailed(
        f"no {epsilon}-synchronization string of length {n} over {q} symbols after "
        f"{max_rounds} repairs; use a larger alphabet (raise c or q)")


def self_matching_bound(s) -> int:
    """Size of the largest monotone self-matching avoiding the diagonal."""
    x = s.as_indexed() if isinstance(s, SyncString) else as_indexed(s)
    g = identical_pair_edges(x, x)
    off = g.left != g.right
    return len(max_noncrossing_matching(EdgeSet(g.left[off], g.right[off], len(x), len(x))))


# -- global decoding ---------------------------------------------------

Engine = Callable[[IndexedString, IndexedString], np.ndarray]


def exact_engine(sent: IndexedString, received: IndexedString) -> np.ndarray:
    """Matched (sent, received) pairs of an exact LCS."""
    ka, kb = pair_keys(sent, received)
    return kernels.ed_align(ka, kb)[1]


@dataclass(frozen=True, eq=False)
class PositionDecoding:
    decoded: np.ndarray  # 1-based sent position per received symbol, 0 = undecoded
    rounds: np.ndarray  # round that decoded each received symbol, 0 = never
    K: int

    def __len__(self):
        return len(self.decoded)

    def multiplicity(self) -> int:
        hits = self.decoded[self.decoded > 0]
        return int(np.bincount(hits).max()) if len(hits) else 0

    def claims(self, n: int) -> list[list[int]]:
        """Received positions decoded to each sent position, in round order."""
        out = [[] for _ in range(n)]
        order = np.lexsort((np.arange(len(self.decoded)), self.rounds))
        for r in order.tolist():
            p = int(self.decoded[r])
            if p:
                out[p - 1].append(r)
        return out


def sync_decode_global(sent: StringLike, received: StringLike, K: int,
                       engine: Engine = exact_engine) -> PositionDecoding:
    """K rounds of: common subsequence, assign positions, drop matched symbols."""
    if K < 1:
        raise ValueError("K must be at least 1")
    sent, received = as_indexed(sent), as_indexed(received)
    ks, kr = pair_keys(sent, received)
    decoded = np.zeros(len(received), dtype=np.int64)
    rounds = np.zeros(len(received), dtype=np.int64)
    residual = np.arange(len(received), dtype=np.int64)
    for rnd in range(1, K + 1):
        if not len(residual):
            break
        try:
            pairs = np.asarray(engine(sent, received.take(residual)), dtype=np.int64).reshape(-1, 2)
        except Exception as exc:
            raise EngineFailure(rnd, exc) from exc
        if len(pairs) == 0:
            break  # the engine is deterministic, later rounds would match nothing too
        src, dst = pairs[:, 0], residual[pairs[:, 1]]
        if (src < 0).any() or (src >= len(sent)).any() or (ks[src] != kr[dst]).any():
            raise EngineFailure(rnd, "engine returned pairs of unequal symbols")
        decoded[dst] = src + 1
        rounds[dst] = rnd
        residual = np.delete(residual, pairs[:, 1])
    return PositionDecoding(decoded, rounds, K)


def count_misdecodings(truth: CorruptionRecord, decoding: PositionDecoding) -> int:
    """Surviving sent symbols whose received copy is not decoded to their position."""
    if truth.received_len != len(decoding):
        raise LengthMismatch(
            f"record describes {truth.received_len} received symbols, decoding has {len(decoding)}")
    live = np.nonzero(truth.survivor_map >= 0)[0]
    got = decoding.decoded[truth.survivor_map[live]]
    return int((got != live + 1).sum())


def misdecoding_bound(n: int, K: int, gamma: float, eps_index: float, eps_sync: float) -> float:
    return n * ((1 + gamma) / (K * (1 + eps_index))
                + eps_index * (1 + gamma / 2) / (1 + eps_index) + K * eps_sync)
