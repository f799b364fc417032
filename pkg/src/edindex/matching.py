"""Largest non-crossing matching of an explicit bipartite edge set.

Sorting edges by (left asc, right desc) turns the problem into a longest
strictly increasing subsequence over the right endpoints; a Fenwick tree of
prefix maxima gives O(r log n) (Hunt-Szymanski's van Emde Boas layer is not
needed at these sizes).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidMatching
from .strings import EditScript, IndexedString, as_indexed, pair_keys


@dataclass(frozen=True, eq=False)
class EdgeSet:
    left: np.ndarray
    right: np.ndarray
    left_len: int
    right_len: int

    def __post_init__(self):
        left = np.asarray(self.left, dtype=np.int64).reshape(-1)
        right = np.asarray(self.right, dtype=np.int64).reshape(-1)
        if left.shape != right.shape:
            raise ValueError("left and right endpoint arrays differ in length")
        if len(left) and (left.min() < 0 or left.max() >= self.left_len
                          or right.min() < 0 or right.max() >= self.right_len):
            raise ValueError(
                f"edge endpoint outside [0,{self.left_len}) x [0,{self.right_len})")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def from_pairs(cls, pairs, left_len: int, right_len: int) -> "EdgeSet":
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], left_len, right_len)

    def __len__(self):
        return len(self.left)

    def normalized(self) -> "EdgeSet":
        """Unique edges in lexicographic (left, right) order."""
        if not len(self):
            return self
        key = self.left * self.right_len + self.right
        key = np.unique(key)
        return EdgeSet(key // self.right_len, key % self.right_len,
                       self.left_len, self.right_len)

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.left.tolist(), self.right.tolist()))

    def dump(self) -> str:
        return "".join(f"{i} {j}\n" for i, j in self.pairs())

    @classmethod
    def parse(cls, text: str, left_len: int, right_len: int) -> "EdgeSet":
        pairs = [tuple(int(x) for x in ln.split()) for ln in text.splitlines() if ln.strip()]
        return cls.from_pairs(pairs, left_len, right_len)


@dataclass(frozen=True, eq=False)
class NonCrossingMatching:
    pairs: np.ndarray  # (k, 2), strictly increasing in both columns
    left_len: int
    right_len: int

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        return (isinstance(other, NonCrossingMatching)
                and self.left_len == other.left_len and self.right_len == other.right_len
                and np.array_equal(self.pairs, other.pairs))

    def is_monotone(self) -> bool:
        p = self.pairs
        return bool(len(p) < 2 or ((np.diff(p[:, 0]) > 0).all() and (np.diff(p[:, 1]) > 0).all()))


def max_noncrossing_matching(g: EdgeSet) -> NonCrossingMatching:
    g = g.normalized()
    if not len(g):
        return NonCrossingMatching(np.zeros((0, 2), dtype=np.int64), g.left_len, g.right_len)
    order = np.lexsort((-g.right, g.left))
    left, right = g.left[order], g.right[order]
    chosen = kernels.lis_matching(left, right, g.right_len)
    pairs = np.stack([left[chosen], right[chosen]], axis=1)
    return NonCrossingMatching(pairs, g.left_len, g.right_len)


def identical_pair_edges(a, b) -> EdgeSet:
    """All (i, j) with a[i] == b[j] (full-tuple equality)."""
    a, b = as_indexed(a), as_indexed(b)
    ka, kb = pair_keys(a, b)
    ob = np.argsort(kb, kind="stable")
    sb = kb[ob]
    lo = np.searchsorted(sb, ka, side="left")
    hi = np.searchsorted(sb, ka, side="right")
    counts = hi - lo
    left = np.repeat(np.arange(len(ka), dtype=np.int64), counts)
    starts = np.repeat(lo, counts)
    offs = np.arange(int(counts.sum()), dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    right = ob[starts + offs]
    return EdgeSet(left, right, len(ka), len(kb))


def matching_to_script(m: NonCrossingMatching, source: IndexedString,
                       target: IndexedString) -> EditScript:
    source, target = as_indexed(source), as_indexed(target)
    if m.left_len != len(source) or m.right_len != len(target):
        raise InvalidMatching("matching dimensions do not fit the strings")
    if not m.is_monotone():
        raise InvalidMatching("matching is not strictly increasing")
    if len(m):
        ks, kt = pair_keys(source, target)
        bad = ks[m.pairs[:, 0]] != kt[m.pairs[:, 1]]
        if bad.any():
            i, j = m.pairs[np.argmax(bad)]
            raise InvalidMatching(f"matched pair ({i}, {j}) joins unequal symbols")
    return EditScript.from_pairs(m.pairs, source, target)
