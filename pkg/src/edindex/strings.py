"""Strings over product alphabets, edit scripts, and the exact DP oracle.

Distances throughout are insertion/deletion distances: a substitution costs 2.
"""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .errors import AlphabetMismatch, InvalidScript, LengthMismatch

_MAX_KEYSPACE = 1 << 62
_BIN_MAGIC = b"EDX1"


@dataclass(frozen=True)
class AlphabetSpec:
    """Component sizes of a product alphabet; a symbol has one coordinate per component."""

    components: tuple[int, ...]

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("an alphabet needs at least one component")
        if any(c < 1 for c in comps):
            raise ValueError(f"component sizes must be >= 1, got {comps}")
        if self.size >= _MAX_KEYSPACE:
            raise ValueError(f"alphabet of size {self.size} does not fit a 62-bit key")

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def size(self) -> int:
        out = 1
        for c in self.components:
            out *= c
        return out

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.ones(self.k, dtype=np.int64)
        for c in range(self.k - 2, -1, -1):
            w[c] = w[c + 1] * self.components[c + 1]
        return w

    def __mul__(self, other: "AlphabetSpec") -> "AlphabetSpec":
        return AlphabetSpec(self.components + other.components)

    def select(self, comps: Sequence[int]) -> "AlphabetSpec":
        return AlphabetSpec(tuple(self.components[c] for c in comps))


def as_plain(seq) -> np.ndarray:
    """Coerce a plain string (str, bytes, sequence of ints, array) to int64 codes."""
    if isinstance(seq, IndexedString):
        if seq.alphabet.k != 1:
            raise ValueError("expected a single-component string")
        return seq.data[:, 0]
    if isinstance(seq, str):
        return np.fromiter((ord(ch) for ch in seq), dtype=np.int64, count=len(seq))
    if isinstance(seq, (bytes, bytearray)):
        return np.frombuffer(bytes(seq), dtype=np.uint8).astype(np.int64)
    arr = np.asarray(seq)
    if arr.size == 0:
        return np.zeros(0, dtype=np.int64)
    if arr.dtype.kind not in "iu":
        raise TypeError(f"plain strings must hold integers, got dtype {arr.dtype}")
    return arr.astype(np.int64).reshape(-1)


class IndexedString:
    """Immutable string over an :class:`AlphabetSpec`, stored as an ``(n, k)`` array."""

    def __init__(self, alphabet: AlphabetSpec, symbols):
        data = np.asarray(symbols, dtype=np.int64)
        if data.size == 0:
            data = np.zeros((0, alphabet.k), dtype=np.int64)
        if data.ndim == 1 and alphabet.k == 1:
            data = data.reshape(-1, 1)
        if data.ndim != 2 or data.shape[1] != alphabet.k:
            raise ValueError(f"symbols must have shape (n, {alphabet.k}), got {data.shape}")
        if len(data):
            lo = data.min(axis=0)
            hi = data.max(axis=0)
            sizes = np.asarray(alphabet.components)
            if (lo < 0).any() or (hi >= sizes).any():
                bad = int(np.nonzero((lo < 0) | (hi >= sizes))[0][0])
                raise ValueError(
                    f"component {bad} has values outside [0, {alphabet.components[bad]})")
        data = np.ascontiguousarray(data)
        data.setflags(write=False)
        self.alphabet = alphabet
        self.data = data

    @classmethod
    def plain(cls, seq, q: int | None = None) -> "IndexedString":
        codes = as_plain(seq)
        if q is None:
            q = int(codes.max()) + 1 if len(codes) else 1
        return cls(AlphabetSpec((q,)), codes.reshape(-1, 1))

    def __len__(self):
        return self.data.shape[0]

    def __getitem__(self, item):
        if isinstance(item, slice):
            return IndexedString(self.alphabet, self.data[item])
        return tuple(int(v) for v in self.data[item])

    def __iter__(self):
        for row in self.data.tolist():
            yield tuple(row)

    def __eq__(self, other):
        if not isinstance(other, IndexedString):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.data, other.data)

    def __repr__(self):
        head = ", ".join(str(t) for t in list(self)[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"IndexedString({self.alphabet.components}, [{head}{more}], n={len(self)})"

    @cached_property
    def keys(self) -> np.ndarray:
        """One int64 per symbol; equal keys iff equal tuples."""
        k = self.data @ self.alphabet.weights if len(self) else np.zeros(0, dtype=np.int64)
        k = np.ascontiguousarray(k, dtype=np.int64)
        k.setflags(write=False)
        return k

    def project(self, comp: int) -> np.ndarray:
        return self.data[:, comp]

    def select(self, comps: Sequence[int]) -> "IndexedString":
        comps = list(comps)
        return IndexedString(self.alphabet.select(comps), self.data[:, comps])

    def take(self, positions) -> "IndexedString":
        return IndexedString(self.alphabet, self.data[np.asarray(positions, dtype=np.int64)])

    def concat(self, other: "IndexedString") -> "IndexedString":
        if other.alphabet != self.alphabet:
            raise AlphabetMismatch("cannot concatenate strings over different alphabets")
        return IndexedString(self.alphabet, np.vstack([self.data, other.data]))

    # -- serialization -------------------------------------------------
    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"{len(self)} {self.alphabet.k}\n")
        buf.write("# alphabet " + " ".join(map(str, self.alphabet.components)) + "\n")
        for row in self.data.tolist():
            buf.write(" ".join(map(str, row)) + "\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "IndexedString":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n, k = (int(x) for x in lines[0].split())
        comps = None
        body = lines[1:]
        if body and body[0].startswith("# alphabet"):
            comps = tuple(int(x) for x in body[0].split()[2:])
            body = body[1:]
        body = [ln for ln in body if not ln.startswith("#")]
        if len(body) != n:
            raise ValueError(f"header declares {n} rows, found {len(body)}")
        data = np.array([[int(x) for x in ln.split()] for ln in body], dtype=np.int64)
        data = data.reshape(n, k)
        if comps is None:
            comps = tuple(int(v) + 1 for v in data.max(axis=0)) if n else (1,) * k
        return cls(AlphabetSpec(comps), data)

    def to_bytes(self) -> bytes:
        if any(c > 65536 for c in self.alphabet.components):
            raise ValueError("binary format stores coordinates as u16; alphabet too large")
        head = _BIN_MAGIC + struct.pack("<IH", len(self), self.alphabet.k)
        head += struct.pack(f"<{self.alphabet.k}I", *self.alphabet.components)
        return head + self.data.astype("<u2").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "IndexedString":
        if blob[:4] != _BIN_MAGIC:
            raise ValueError("not an IndexedString binary blob")
        n, k = struct.unpack_from("<IH", blob, 4)
        off = 4 + 6
        comps = struct.unpack_from(f"<{k}I", blob, off)
        off += 4 * k
        data = np.frombuffer(blob, dtype="<u2", count=n * k, offset=off).astype(np.int64)
        return cls(AlphabetSpec(comps), data.reshape(n, k))

    def save(self, path) -> None:
        path = str(path)
        if path.endswith(".bin"):
            with open(path, "wb") as fh:
                fh.write(self.to_bytes())
        else:
            with open(path, "w") as fh:
                fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "IndexedString":
        path = str(path)
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[:4] == _BIN_MAGIC:
            return cls.from_bytes(blob)
        return cls.from_text(blob.decode())


StringLike = Union[IndexedString, str, bytes, Sequence[int], np.ndarray]


def as_indexed(x: StringLike) -> IndexedString:
    return x if isinstance(x, IndexedString) else IndexedString.plain(x)


def keys_of(x: StringLike) -> np.ndarray:
    return x.keys if isinstance(x, IndexedString) else as_plain(x)


def index_concat(payload: StringLike, index: StringLike) -> IndexedString:
    """Coordinate-wise concatenation: result[i] = payload[i] + index[i] as tuples."""
    p, q = as_indexed(payload), as_indexed(index)
    if len(p) != len(q):
        raise LengthMismatch(f"payload has length {len(p)} but index has length {len(q)}")
    return IndexedString(p.alphabet * q.alphabet, np.hstack([p.data, q.data]))


# -- edit scripts ------------------------------------------------------


@dataclass(frozen=True)
class Delete:
    pos: int


@dataclass(frozen=True)
class Insert:
    pos: int
    symbol: tuple


@dataclass(frozen=True)
class EditScript:
    """Deletions (source positions) followed by insertions (target positions)."""

    source_len: int
    target_len: int
    ops: tuple

    @property
    def size(self) -> int:
        return len(self.ops)

    def __len__(self):
        return len(self.ops)

    @property
    def deletions(self) -> list[int]:
        return [op.pos for op in self.ops if isinstance(op, Delete)]

    @property
    def insertions(self) -> list[Insert]:
        return [op for op in self.ops if isinstance(op, Insert)]

    @classmethod
    def from_pairs(cls, pairs, source: IndexedString, target: IndexedString) -> "EditScript":
        """Script that keeps exactly the matched pairs (assumed valid)."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        keep_s = np.zeros(len(source), dtype=bool)
        keep_t = np.zeros(len(target), dtype=bool)
        keep_s[pairs[:, 0]] = True
        keep_t[pairs[:, 1]] = True
        ops = [Delete(int(p)) for p in np.nonzero(~keep_s)[0]]
        rows = target.data.tolist()
        ops += [Insert(int(p), tuple(rows[p])) for p in np.nonzero(~keep_t)[0]]
        return cls(len(source), len(target), tuple(ops))

    def to_dict(self) -> dict:
        ops = [["D", op.pos] if isinstance(op, Delete) else ["I", op.pos, list(op.symbol)]
               for op in self.ops]
        return {"source_len": self.source_len, "target_len": self.target_len,
                "size": self.size, "ops": ops}

    @classmethod
    def from_dict(cls, d: dict) -> "EditScript":
        ops = tuple(Delete(int(o[1])) if o[0] == "D" else Insert(int(o[1]), tuple(o[2]))
                    for o in d["ops"])
        return cls(int(d["source_len"]), int(d["target_len"]), ops)


def apply_edit_script(source: StringLike, script: EditScript) -> IndexedString:
    src = as_indexed(source)
    if script.source_len != len(src):
        raise InvalidScript(f"script expects source length {script.source_len}, got {len(src)}")
    dels = script.deletions
    ins = script.insertions
    if len(set(dels)) != len(dels) or any(not 0 <= p < len(src) for p in dels):
        raise InvalidScript("deletion positions must be distinct and inside the source")
    keep = np.ones(len(src), dtype=bool)
    keep[dels] = False
    kept = src.data[keep]
    tlen = len(kept) + len(ins)
    if tlen != script.target_len:
        raise InvalidScript(f"script yields length {tlen}, declares {script.target_len}")
    pos = [op.pos for op in ins]
    if len(set(pos)) != len(pos) or any(not 0 <= p < tlen for p in pos):
        raise InvalidScript("insertion positions must be distinct and inside the target")
    out = np.empty((tlen, src.alphabet.k), dtype=np.int64)
    mask = np.zeros(tlen, dtype=bool)
    if ins:
        mask[pos] = True
        out[pos] = np.array([op.symbol for op in ins], dtype=np.int64).reshape(len(ins), -1)
    out[~mask] = kept
    return IndexedString(src.alphabet, out)


def pair_keys(a: IndexedString, b: IndexedString) -> tuple[np.ndarray, np.ndarray]:
    """Keys of two strings on a shared key space (equal keys iff equal tuples)."""
    if a.alphabet.k != b.alphabet.k:
        raise AlphabetMismatch(
            f"strings have {a.alphabet.k} and {b.alphabet.k} components")
    if a.alphabet == b.alphabet:
        return a.keys, b.keys
    common = AlphabetSpec(tuple(max(x, y) for x, y in zip(a.alphabet.components,
                                                           b.alphabet.components)))
    w = common.weights
    return (np.ascontiguousarray(a.data @ w, dtype=np.int64),
            np.ascontiguousarray(b.data @ w, dtype=np.int64))


def edit_distance_exact(a: StringLike, b: StringLike) -> tuple[int, EditScript]:
    """Exact ins/del distance with a witness script (full Wagner-Fischer table)."""
    a, b = as_indexed(a), as_indexed(b)
    ka, kb = pair_keys(a, b)
    dist, pairs = kernels.ed_align(ka, kb)
    return int(dist), EditScript.from_pairs(pairs, a, b)


def _keys2(a, b):
    if isinstance(a, IndexedString) and isinstance(b, IndexedString):
        return pair_keys(a, b)
    return keys_of(a), keys_of(b)


def edit_distance(a: StringLike, b: StringLike) -> int:
    """Exact ins/del distance, distance only (bit-parallel LCS)."""
    ka, kb = _keys2(a, b)
    return len(ka) + len(kb) - 2 * int(kernels.lcs_length(ka, kb))


def lcs_length(a: StringLike, b: StringLike) -> int:
    return int(kernels.lcs_length(*_keys2(a, b)))


def banded_edit_distance(a: StringLike, b: StringLike) -> int:
    """Exact ins/del distance via band doubling, O((n + m) * d)."""
    ka, kb = _keys2(a, b)
    band = max(1, abs(len(ka) - len(kb)))
    while True:
        d = kernels.ed_banded(ka, kb, band)
        if d >= 0:
            return int(d)
        band *= 2


def lcs_from_ed(len_a: int, len_b: int, ed: int) -> int:
    rest = len_a + len_b - ed
    if rest < 0 or rest % 2:
        raise InvalidScript(
            f"|a|+|b|-ed = {len_a}+{len_b}-{ed} must be even and non-negative")
    return rest // 2
