"""Reed-Solomon codes over a prime field with errors-and-erasures decoding.

Erasures are handled by puncturing; the punctured code is decoded with
Berlekamp-Welch (a linear solve over GF(p)) and the answer is re-encoded and
checked against the half-error budget 2e + f < d before it is returned.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DecodeFailure, LengthMismatch


def _solve_mod(A: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of A x = b over GF(p), free variables set to zero; None if inconsistent."""
    A = np.concatenate([A % p, (b % p)[:, None]], axis=1).astype(np.int64)
    rows, cols = A.shape[0], A.shape[1] - 1
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if not len(nz):
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), p - 2, p) % p
        f = A[:, c].copy()
        f[r] = 0
        A = (A - f[:, None] * A[r][None, :]) % p
        pivots.append(c)
        r += 1
    if r < rows and A[r:, -1].any():
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = A[i, -1]
    return x


def _polydiv(num: np.ndarray, den: np.ndarray, p: int):
    """Quotient and remainder of polynomials given lowest degree first."""
    num = num.copy() % p
    den = np.trim_zeros(den % p, "b")
    dd = len(den) - 1
    inv = pow(int(den[-1]), p - 2, p)
    if len(num) - 1 < dd:
        return np.zeros(1, dtype=np.int64), num
    quot = np.zeros(len(num) - dd, dtype=np.int64)
    for i in range(len(num) - 1, dd - 1, -1):
        coef = num[i] * inv % p
        quot[i - dd] = coef
        if coef:
            num[i - dd:i + 1] = (num[i - dd:i + 1] - coef * den) % p
    return quot, num[:dd]


@dataclass(frozen=True)
class ReedSolomon:
    n: int
    k: int
    p: int = 257

    def __post_init__(self):
        if not 1 <= self.k <= self.n < self.p:
            raise ValueError(f"need 1 <= k <= n < p, got k={self.k} n={self.n} p={self.p}")

    @property
    def d(self) -> int:
        return self.n - self.k + 1

    @cached_property
    def points(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=np.int64)

    @cached_property
    def _vander(self) -> np.ndarray:
        V = np.ones((self.n, max(self.n, 1)), dtype=np.int64)
        for j in range(1, V.shape[1]):
            V[:, j] = V[:, j - 1] * self.points % self.p
        return V

    def encode(self, message) -> np.ndarray:
        m = np.asarray(message, dtype=np.int64).reshape(-1)
        if len(m) != self.k:
            raise LengthMismatch(f"message has {len(m)} symbols, code expects k = {self.k}")
        if len(m) and (m.min() < 0 or m.max() >= self.p):
            raise ValueError(f"message symbols must lie in [0, {self.p})")
        return self._vander[:, :self.k] @ m % self.p

    def decode(self, received, erasures=None) -> np.ndarray:
        """Message whose codeword is within 2e + f < d half-errors, else DecodeFailure."""
        r = np.asarray(received, dtype=np.int64).reshape(-1)
        if len(r) != self.n:
            raise LengthMismatch(f"received word has {len(r)} symbols, code expects n = {self.n}")
        erased = np.zeros(self.n, dtype=bool)
        if erasures is not None:
            erased[np.asarray(erasures, dtype=np.int64)] = True
        erased |= (r < 0) | (r >= self.p)
        live = np.nonzero(~erased)[0]
        f = self.n - len(live)
        if f >= self.d:
            raise DecodeFailure(f"{f} erasures leave nothing to decode (d = {self.d})")
        e = (len(live) - self.k) // 2
        y = r[live]
        # Q(a) = y E(a), E monic of degree e, deg Q < e + k
        V = self._vander[live][:, :e + self.k]
        A = np.concatenate([V, (-y[:, None] * V[:, :e]) % self.p], axis=1)
        b = y * self._vander[live][:, e] % self.p
        sol = _solve_mod(A, b, self.p)
        if sol is None:
            raise DecodeFailure("Berlekamp-Welch system is inconsistent")
        Q, E = sol[:e + self.k], np.r_[sol[e + self.k:], 1]
        m, rem = _polydiv(Q, E, self.p)
        if rem.any() or len(np.trim_zeros(m, "b")) > self.k:
            raise DecodeFailure("error locator does not divide the key equation")
        m = np.r_[m, np.zeros(self.k, dtype=np.int64)][:self.k]
        self.certify(m, r, erased)
        return m

    def certify(self, message, received, erased) -> None:
        errs = int((self.encode(message) != received)[~erased].sum())
        f = int(erased.sum())
        if 2 * errs + f >= self.d:
            raise DecodeFailure(f"re-encoding leaves {errs} errors and {f} erasures (d = {self.d})")

