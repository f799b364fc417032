"""Insertion/deletion channel with full ground-truth alignment."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import seeding
from .strings import IndexedString, StringLike, as_indexed

MODES = ("uniform", "burst", "block-shuffle-adjacent")


@dataclass(frozen=True, eq=False)
class CorruptionRecord:
    sent_len: int
    received_len: int
    survivor_map: np.ndarray  # sent position -> received position, -1 if deleted
    inserted_positions: np.ndarray
    deletions: int
    insertions: int
    mode: str = "uniform"
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def identity(cls, n: int) -> "CorruptionRecord":
        return cls(n, n, np.arange(n, dtype=np.int64), np.zeros(0, dtype=np.int64), 0, 0)

    def survivors(self) -> np.ndarray:
        return np.nonzero(self.survivor_map >= 0)[0]

    def to_json(self) -> str:
        doc = {
            "sent_len": self.sent_len,
            "received_len": self.received_len,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "mode": self.mode,
            "seed": self.seed,
            "survivor_map": self.survivor_map.tolist(),
            "inserted_positions": self.inserted_positions.tolist(),
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CorruptionRecord":
        d = json.loads(text)
        return cls(d["sent_len"], d["received_len"],
                   np.asarray(d["survivor_map"], dtype=np.int64).reshape(-1),
                   np.asarray(d["inserted_positions"], dtype=np.int64).reshape(-1),
                   d["deletions"], d["insertions"], d.get("mode", "uniform"), d.get("seed"))

    def __eq__(self, other):
        return (isinstance(other, CorruptionRecord) and self.to_json() == other.to_json())


def budget(n: int, frac: float) -> int:
    # the tolerance absorbs float noise such as 0.29 * 100 = 28.999...
    return int(math.floor(frac * n + 1e-9))


def corrupt(s: StringLike, delta: float, gamma: float, mode: str = "uniform",
            seed: int = 0, block_len: int = 8) -> tuple[IndexedString, CorruptionRecord]:
    """Apply exactly floor(delta*n) deletions and floor(gamma*n) insertions."""
    if not 0 <= delta < 1:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    s = as_indexed(s)
    n = len(s)
    return corrupt_counts(s, budget(n, delta), budget(n, gamma), mode, seed, block_len)


def corrupt_counts(s: StringLike, n_del: int, n_ins: int, mode: str = "uniform",
                   seed: int = 0, block_len: int = 8) -> tuple[IndexedString, CorruptionRecord]:
    if mode not in MODES:
        raise ValueError(f"unknown channel mode {mode!r}; choose from {', '.join(MODES)}")
    s = as_indexed(s)
    n = len(s)
    if not 0 <= n_del <= n or n_ins < 0:
        raise ValueError(f"cannot delete {n_del} of {n} symbols / insert {n_ins}")
    rng = seeding.rng(seed, "channel")
    block_len = max(1, int(block_len))

    if mode == "burst":
        start = int(rng.integers(0, n - n_del + 1))
        dead = np.arange(start, start + n_del)
    else:
        dead = np.sort(rng.choice(n, size=n_del, replace=False)) if n_del else np.zeros(0, int)
    keep = np.ones(n, dtype=bool)
    keep[dead] = False
    surv = np.nonzero(keep)[0]
    m = len(surv) + n_ins

    if mode == "uniform":
        ins_pos = np.sort(rng.choice(m, size=n_ins, replace=False)) if n_ins else np.zeros(0, int)
        sizes = np.asarray(s.alphabet.components, dtype=np.int64)
        ins_data = (rng.random((n_ins, s.alphabet.k)) * sizes).astype(np.int64)
    elif mode == "burst":
        p = int(rng.integers(0, m - n_ins + 1))
        ins_pos = np.arange(p, p + n_ins)
        ins_data = _neighbour_copies(s, surv, p, n_ins, rng)
    else:
        ins_pos, ins_data = _adjacent_block_copies(s, surv, n_ins, block_len, rng)

    ins_pos = np.asarray(ins_pos, dtype=np.int64)
    mask = np.zeros(m, dtype=bool)
    mask[ins_pos] = True
    out = np.empty((m, s.alphabet.k), dtype=np.int64)
    out[~mask] = s.data[surv]
    if n_ins:
        out[mask] = ins_data
    smap = np.full(n, -1, dtype=np.int64)
    smap[surv] = np.nonzero(~mask)[0]
    received = IndexedString(s.alphabet, out)
    rec = CorruptionRecord(n, m, smap, ins_pos, int(n_del), int(n_ins), mode, int(seed))
    return received, rec


def _neighbour_copies(s, surv, p, count, rng):
    # copy the survivors that precede the insertion point (or follow it)
    if count == 0:
        return np.zeros((0, s.alphabet.k), dtype=np.int64)
    if len(surv) == 0:
        return s.data[rng.integers(0, len(s), count)] if len(s) else \
            np.zeros((count, s.alphabet.k), dtype=np.int64)
    if p >= count:
        src = surv[p - count:p]
    else:
        src = surv[p:p + count]
    src = np.resize(src, count)
    return s.data[src]


def _adjacent_block_copies(s, surv, n_ins, block_len, rng):
    """Runs of up to block_len symbols copied from the neighbouring block."""
    n = len(s)
    base = len(surv)
    slots, chunks = [], []
    left = n_ins
    while left > 0:
        run = int(min(left, rng.integers(1, block_len + 1)))
        slot = int(rng.integers(0, base + 1))  # insert before survivor #slot
        anchor = int(surv[slot]) if slot < base else n
        shift = block_len if rng.random() < 0.5 else -block_len
        src = np.clip(np.arange(anchor + shift, anchor + shift + run), 0, max(n - 1, 0))
        slots.append(np.full(run, slot))
        chunks.append(s.data[src] if n else np.zeros((run, s.alphabet.k), dtype=np.int64))
        left -= run
    if not slots:
        return np.zeros(0, dtype=np.int64), np.zeros((0, s.alphabet.k), dtype=np.int64)
    slot_arr = np.concatenate(slots)
    data = np.concatenate(chunks)
    order = np.argsort(slot_arr, kind="stable")
    slot_arr, data = slot_arr[order], data[order]
    # a symbol inserted before survivor #slot lands at slot + (earlier inserts)
    ins_pos = slot_arr + np.arange(len(slot_arr))
    return ins_pos, data


class RecordCheck(NamedTuple):
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def verify_record(s: StringLike, received: StringLike, record: CorruptionRecord) -> RecordCheck:
    s, received = as_indexed(s), as_indexed(received)
    smap, ins = record.survivor_map, record.inserted_positions
    if record.sent_len != len(s) or len(smap) != len(s):
        return RecordCheck(False, "sent length does not match the record")
    if record.received_len != len(received):
        return RecordCheck(False, "received length does not match the record")
    alive = smap[smap >= 0]
    if record.deletions + len(alive) != len(s):
        return RecordCheck(False, "deletion count plus survivors differs from sent length")
    if record.insertions != len(ins):
        return RecordCheck(False, "insertion count differs from inserted positions")
    if len(alive) > 1 and not (np.diff(alive) > 0).all():
        return RecordCheck(False, "survivor map is not strictly increasing")
    if len(ins) > 1 and not (np.diff(ins) > 0).all():
        return RecordCheck(False, "inserted positions are not strictly increasing")
    covered = np.concatenate([alive, ins])
    if len(covered) != len(received) or (len(covered) and (
            covered.min() < 0 or covered.max() >= len(received)
            or len(np.unique(covered)) != len(covered))):
        return RecordCheck(False, "survivors and insertions do not partition the received string")
    live = np.nonzero(smap >= 0)[0]
    if len(live) and not np.array_equal(received.data[smap[live]], s.data[live]):
        bad = live[np.argmax((received.data[smap[live]] != s.data[live]).any(axis=1))]
        return RecordCheck(False, f"survivor {bad} differs from its received copy")
    return RecordCheck(True)
