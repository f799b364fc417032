"""Insertion-deletion codes built from indexing schemes and synchronization strings.

UniqueInsdelCode: a Reed-Solomon codeword indexed by an eps_s-synchronization
string and an eps_I-indexing sequence; decoding recovers positions with the
K-round global decoder and hands erasures plus guesses to the RS decoder.

ListInsdelCode: the same wiring around a list-recoverable block code; each
position collects up to K candidate symbols and list recovery finishes the job.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blockcode import BlockCodebook, RecoveryLists, list_recover, list_recovery_cap
from .errors import AlphabetMismatch, DecodeFailure
from .indexing import IndexingScheme, build_indexing_scheme, scheme_engine
from .rs import ReedSolomon
from .strings import AlphabetSpec, IndexedString, StringLike, as_indexed
from .sync import PositionDecoding, SyncString, gen_sync, sync_decode_global

INDEX_Q = 1 << 16
# a one-layer scheme with internal eps' approximates within 1 + 11 eps'
SCHEME_FACTOR = 11


def _ceil(x: float) -> int:
    return math.ceil(x - 1e-9)


def unique_code_parameters(epsilon: float, delta: float, n: int) -> dict:
    """Ledger of the unique-decoding settings (eps_I, eps_s, K, RS distance)."""
    if not 0 < epsilon < 1 or not 0 <= delta < 1:
        raise ValueError("need 0 < epsilon < 1 and 0 <= delta < 1")
    d = _ceil(n * (delta + epsilon / 2))
    return {
        "epsilon": epsilon,
        "delta": delta,
        "eps_I": epsilon / 18,
        "eps_s": epsilon ** 2 / 288,
        "K": _ceil(24 / epsilon),
        "n": n,
        "d": d,
        "k": n - d + 1,
    }


def list_code_parameters(epsilon: float, gamma: float) -> dict:
    if not 0 < epsilon < 1 or gamma < 0:
        raise ValueError("need 0 < epsilon < 1 and gamma >= 0")
    return {
        "epsilon": epsilon,
        "gamma": gamma,
        "eps_s": epsilon ** 2 / (9 * (1 + gamma)),
        "eps_I": epsilon / (3 * (1 + gamma / 2)),
        "K": _ceil(3 * (1 + gamma) / epsilon),
    }


def _header(sync: SyncString, scheme: IndexingScheme) -> IndexedString:
    return scheme.attach(sync.as_indexed())


def _positions(sync, scheme, K, received: IndexedString, width: int) -> PositionDecoding:
    if received.alphabet.k != width + 2:
        raise AlphabetMismatch(f"received word has {received.alphabet.k} components, expected {width + 2}")
    head = _header(sync, scheme)
    tail = received.select(range(width, width + 2))
    if tail.alphabet != head.alphabet:
        raise AlphabetMismatch("received sync/index components do not match the code")
    return sync_decode_global(head, tail, K, scheme_engine(scheme))


def _build_header(n, eps_s, eps_I, seed, index_N):
    sync = gen_sync(n, eps_s, seed)
    scheme = build_indexing_scheme(n, eps_I / SCHEME_FACTOR, N=index_N, q=INDEX_Q, seed=seed)
    return sync, scheme


# -- unique decoding -----------------------------------------------------


@dataclass(eq=False)
class UniqueInsdelCode:
    rs: ReedSolomon
    sync: SyncString
    scheme: IndexingScheme
    K: int
    epsilon: float
    delta: float

    @property
    def n(self) -> int:
        return self.rs.n

    @property
    def k(self) -> int:
        return self.rs.k

    @property
    def alphabet(self) -> AlphabetSpec:
        return AlphabetSpec((self.rs.p, self.sync.q)) * self.scheme.index.alphabet

    def params(self) -> dict:
        out = unique_code_parameters(self.epsilon, self.delta, self.n)
        out["K"] = self.K
        out["rate"] = self.k / self.n
        out["effective_rate"] = self.k * math.log(self.rs.p) / (self.n * math.log(self.alphabet.size))
        return out

    def to_dict(self) -> dict:
        return {
            "format": "edindex-unique-code",
            "version": 1,
            "rs": {"n": self.rs.n, "k": self.rs.k, "p": self.rs.p},
            "sync": self.sync.to_text(),
            "scheme": self.scheme.to_dict(),
            "K": self.K,
            "epsilon": self.epsilon,
            "delta": self.delta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UniqueInsdelCode":
        if d.get("format") != "edindex-unique-code":
            raise ValueError("not a unique-code bundle")
        return cls(ReedSolomon(**d["rs"]), SyncString.from_text(d["sync"]),
                   IndexingScheme.from_dict(d["scheme"]), d["K"], d["epsilon"], d["delta"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def __eq__(self, other):
        return isinstance(other, UniqueInsdelCode) and self.to_json() == other.to_json()

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "UniqueInsdelCode":
        return cls.from_dict(json.loads(Path(path).read_text()))


def build_unique_code(n: int = 255, delta: float = 0.1, epsilon: float = 0.3, seed: int = 0,
                      p: int = 257, index_N: int = 12) -> UniqueInsdelCode:
    par = unique_code_parameters(epsilon, delta, n)
    if par["k"] < 1:
        raise ValueError(f"delta + epsilon/2 leaves no room for a message at n = {n}")
    sync, scheme = _build_header(n, par["eps_s"], par["eps_I"], seed, index_N)
    return UniqueInsdelCode(ReedSolomon(n, par["k"], p), sync, scheme, par["K"], epsilon, delta)


def encode_unique(code: UniqueInsdelCode, message) -> IndexedString:
    word = code.rs.encode(message)
    data = np.column_stack([word, code.sync.symbols, code.scheme.index.data])
    return IndexedString(code.alphabet, data)


@dataclass
class UniqueDecoding:
    word: np.ndarray  # recovered RS symbol per position, -1 where erased
    erased: np.ndarray
    positions: PositionDecoding


def recover_word(code: UniqueInsdelCode, received: StringLike) -> UniqueDecoding:
    """Position recovery with first-round-wins; unclaimed positions become erasures."""
    received = as_indexed(received)
    dec = _positions(code.sync, code.scheme, code.K, received, 1)
    word = np.full(code.n, -1, dtype=np.int64)
    first = np.full(code.n, -1, dtype=np.int64)
    # stable sort by round keeps earlier rounds (then earlier received positions) first
    order = np.lexsort((np.arange(len(dec.decoded)), dec.rounds))
    order = order[dec.decoded[order] > 0]
    pos = dec.decoded[order] - 1
    _, idx = np.unique(pos, return_index=True)
    first[pos[idx]] = order[idx]
    hit = first >= 0
    word[hit] = received.data[first[hit], 0]
    return UniqueDecoding(word, ~hit, dec)


def decode_unique(code: UniqueInsdelCode, received: StringLike) -> np.ndarray:
    """The message, or DecodeFailure when the half-error budget is exceeded."""
    got = recover_word(code, received)
    return code.rs.decode(np.where(got.erased, 0, got.word), np.nonzero(got.erased)[0])


# -- list decoding ---------------------------------------------------------


@dataclass(eq=False)
class ListInsdelCode:
    lr: BlockCodebook
    alpha: float
    l: int
    sync: SyncString
    scheme: IndexingScheme
    K: int
    epsilon: float
    gamma: float

    @property
    def n(self) -> int:
        return self.lr.N

    @property
    def alphabet(self) -> AlphabetSpec:
        return AlphabetSpec((self.lr.q, self.sync.q)) * self.scheme.index.alphabet

    @property
    def max_deletion_fraction(self) -> float:
        """Deletions must stay strictly below this fraction of n."""
        return 1 - self.alpha - self.epsilon

    @property
    def max_insertions(self) -> int:
        return math.floor(self.gamma * self.n + 1e-9)

    @property
    def recovery_cap(self) -> int:
        return list_recovery_cap(self.lr, self.alpha, self.l)

    def params(self) -> dict:
        out = list_code_parameters(self.epsilon, self.gamma)
        out.update(alpha=self.alpha, l=self.l, K=self.K, M=self.lr.M, N=self.lr.N,
                   L=self.recovery_cap, delta_max=self.max_deletion_fraction)
        return out

    def to_dict(self) -> dict:
        return {
            "format": "edindex-list-code",
            "version": 1,
            "lr": self.lr.to_dict(),
            "alpha": self.alpha,
            "l": self.l,
            "sync": self.sync.to_text(),
            "scheme": self.scheme.to_dict(),
            "K": self.K,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ListInsdelCode":
        if d.get("format") != "edindex-list-code":
            raise ValueError("not a list-code bundle")
        return cls(BlockCodebook.from_dict(d["lr"]), d["alpha"], d["l"],
                   SyncString.from_text(d["sync"]), IndexingScheme.from_dict(d["scheme"]),
                   d["K"], d["epsilon"], d["gamma"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def __eq__(self, other):
        return isinstance(other, ListInsdelCode) and self.to_json() == other.to_json()

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "ListInsdelCode":
        return cls.from_dict(json.loads(Path(path).read_text()))


def convert_lr_to_insdel(lr: BlockCodebook, epsilon: float, gamma: float, l: int,
                         alpha: float, seed: int = 0, index_N: int = 8) -> ListInsdelCode:
    bound = l * epsilon / 3 - 1
    if gamma > bound + 1e-12:
        raise ValueError(f"conversion requires gamma <= l*eps/3 - 1, but {gamma} > "
                         f"{l}*{epsilon}/3 - 1 = {bound:.6g}")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    par = list_code_parameters(epsilon, gamma)
    sync, scheme = _build_header(lr.N, par["eps_s"], par["eps_I"], seed, index_N)
    return ListInsdelCode(lr, alpha, l, sync, scheme, par["K"], epsilon, gamma)


def encode_list(code: ListInsdelCode, message: int) -> IndexedString:
    if not 0 <= message < code.lr.M:
        raise ValueError(f"message must be a codeword index in [0, {code.lr.M})")
    data = np.column_stack([code.lr.codewords[message], code.sync.symbols, code.scheme.index.data])
    return IndexedString(code.alphabet, data)


def candidate_lists(code: ListInsdelCode, received: StringLike) -> tuple[RecoveryLists, PositionDecoding]:
    received = as_indexed(received)
    dec = _positions(code.sync, code.scheme, code.K, received, 1)
    sets = [set() for _ in range(code.n)]
    for r in np.nonzero(dec.decoded)[0].tolist():
        sets[int(dec.decoded[r]) - 1].add(int(received.data[r, 0]))
    lists = RecoveryLists([tuple(sorted(s)) for s in sets])
    if lists.max_size > code.K:
        raise DecodeFailure(f"a position collected {lists.max_size} candidates, more than K = {code.K}")
    return lists, dec


def list_decode_insdel(code: ListInsdelCode, received: StringLike, recover=None) -> list[int]:
    """Indices of codewords consistent with the received word.

    `recover(lists)` may replace brute-force list recovery, e.g. with an
    amplified randomized decoder.
    """
    lists, _ = candidate_lists(code, received)
    if recover is not None:
        return sorted(recover(lists))
    return list_recover(code.lr, lists, code.alpha)

