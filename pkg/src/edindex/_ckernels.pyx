# cython: language_level=3
"""Compiled hot loops.

Every function here has a line-for-line twin in ``_pykernels.py``; the two
must agree exactly (including witness tie-breaking), which the test-suite
checks on random inputs.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t, int32_t
from libc.stdlib cimport malloc, calloc, free

cnp.import_array()

ctypedef int64_t i64
ctypedef uint64_t u64


cdef inline int _popcount(u64 x) nogil:
    return __builtin_popcountll(x)

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def _dense(cnp.ndarray a, cnp.ndarray b):
    both = np.concatenate([a, b])
    _, inv = np.unique(both, return_inverse=True)
    inv = inv.astype(np.int64)
    return inv[: a.shape[0]], inv[a.shape[0]:], int(inv.max()) + 1 if inv.shape[0] else 0


def lcs_length(a, b):
    """LCS length by Hyyro's bit-vector recurrence (64 columns per word)."""
    cdef cnp.ndarray[i64, ndim=1] A = np.ascontiguousarray(a, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] B = np.ascontiguousarray(b, dtype=np.int64)
    if A.shape[0] == 0 or B.shape[0] == 0:
        return 0
    if A.shape[0] < B.shape[0]:
        A, B = B, A
    cdef cnp.ndarray[i64, ndim=1] da, db
    da, db, q = _dense(A, B)
    cdef Py_ssize_t m = da.shape[0], n = db.shape[0]
    cdef Py_ssize_t W = (m + 63) // 64
    cdef cnp.ndarray[u64, ndim=2] masks = np.zeros((q, W), dtype=np.uint64)
    cdef Py_ssize_t p, w, j
    for p in range(m):
        masks[da[p], p >> 6] |= (<u64>1) << (p & 63)
    cdef cnp.ndarray[u64, ndim=1] V = np.full(W, ~(<u64>0), dtype=np.uint64)
    cdef u64 carry, x, u, y, y2, top
    cdef i64 c
    with nogil:
        for j in range(n):
            c = db[j]
            carry = 0
            for w in range(W):
                x = V[w]
                u = x & masks[c, w]
                y = x + u
                top = 1 if y < x else 0
                y2 = y + carry
                top = top | (1 if y2 < y else 0)
                V[w] = y2 | (x & ~masks[c, w])
                carry = top
    cdef i64 zeros = 0
    cdef u64 lastmask
    for w in range(W):
        x = ~V[w]
        if w == W - 1 and (m & 63):
            lastmask = ((<u64>1) << (m & 63)) - 1
            x &= lastmask
        zeros += _popcount(x)
    return int(zeros)


def lcs_many(codebook, cand, r):
    """LCS of ``r`` against each codebook row listed in ``cand``."""
    cdef cnp.ndarray[i64, ndim=2] C = np.ascontiguousarray(codebook, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] idx = np.ascontiguousarray(cand, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] R = np.ascontiguousarray(r, dtype=np.int64)
    cdef Py_ssize_t k, N = C.shape[1], m = R.shape[0], i, j
    out = np.zeros(idx.shape[0], dtype=np.int64)
    cdef i64[:] o = out
    cdef int32_t* prev = <int32_t*>calloc(m + 1, sizeof(int32_t))
    cdef int32_t* cur = <int32_t*>calloc(m + 1, sizeof(int32_t))
    cdef int32_t* tmp
    cdef i64 row
    try:
        for k in range(idx.shape[0]):
            row = idx[k]
            for j in range(m + 1):
                prev[j] = 0
                cur[j] = 0
            for i in range(N):
                cur[0] = 0
                for j in range(1, m + 1):
                    if C[row, i] == R[j - 1]:
                        cur[j] = prev[j - 1] + 1
                    elif prev[j] >= cur[j - 1]:
                        cur[j] = prev[j]
                    else:
                        cur[j] = cur[j - 1]
                tmp = prev
                prev = cur
                cur = tmp
            o[k] = prev[m]
    finally:
        free(prev)
        free(cur)
    return out


def ed_distance(a, b):
    """Insertion/deletion distance with two DP rows (the quadratic baseline)."""
    cdef cnp.ndarray[i64, ndim=1] A = np.ascontiguousarray(a, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] B = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t n = A.shape[0], m = B.shape[0], i, j
    cdef int32_t* prev = <int32_t*>malloc((m + 1) * sizeof(int32_t))
    cdef int32_t* cur = <int32_t*>malloc((m + 1) * sizeof(int32_t))
    cdef int32_t* tmp
    cdef int32_t d, x
    cdef i64 ai
    try:
        with nogil:
            for j in range(m + 1):
                prev[j] = <int32_t>j
            for i in range(1, n + 1):
                cur[0] = <int32_t>i
                ai = A[i - 1]
                for j in range(1, m + 1):
                    if ai == B[j - 1]:
                        cur[j] = prev[j - 1]
                    else:
                        d = prev[j]
                        x = cur[j - 1]
                        cur[j] = (d if d < x else x) + 1
                tmp = prev
                prev = cur
                cur = tmp
            d = prev[m]
    finally:
        free(prev)
        free(cur)
    return int(d)


def ed_align(a, b):
    """Full DP with traceback; returns (distance, matched pairs as (k, 2) array).

    Traceback from the end: a diagonal match when symbols agree, otherwise a
    deletion whenever it is optimal, otherwise an insertion.
    """
    cdef cnp.ndarray[i64, ndim=1] A = np.ascontiguousarray(a, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] B = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t n = A.shape[0], m = B.shape[0], i, j, k
    cdef cnp.ndarray[int32_t, ndim=2] L = np.zeros((n + 1, m + 1), dtype=np.int32)
    cdef int32_t up, left
    with nogil:
        for i in range(1, n + 1):
            for j in range(1, m + 1):
                if A[i - 1] == B[j - 1]:
                    L[i, j] = L[i - 1, j - 1] + 1
                else:
                    up = L[i - 1, j]
                    left = L[i, j - 1]
                    L[i, j] = up if up >= left else left
    cdef Py_ssize_t lcs = L[n, m]
    pairs = np.empty((lcs, 2), dtype=np.int64)
    cdef i64[:, :] P = pairs
    i = n
    j = m
    k = lcs
    while i > 0 and j > 0:
        if A[i - 1] == B[j - 1]:
            k -= 1
            P[k, 0] = i - 1
            P[k, 1] = j - 1
            i -= 1
            j -= 1
        elif L[i - 1, j] == L[i, j]:
            i -= 1
        else:
            j -= 1
    return int(n + m - 2 * lcs), pairs


def ed_banded(a, b, Py_ssize_t band):
    """Ins/del distance restricted to |i - j| <= band; -1 if it exceeds band."""
    cdef cnp.ndarray[i64, ndim=1] A = np.ascontiguousarray(a, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] B = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t n = A.shape[0], m = B.shape[0], i, j, lo, hi
    if n - m > band or m - n > band:
        return -1
    cdef int32_t INF = 1 << 29
    cdef int32_t* prev = <int32_t*>malloc((m + 2) * sizeof(int32_t))
    cdef int32_t* cur = <int32_t*>malloc((m + 2) * sizeof(int32_t))
    cdef int32_t* tmp
    cdef int32_t d, x, res
    try:
        with nogil:
            for j in range(m + 2):
                prev[j] = <int32_t>j if j <= band else INF
                cur[j] = INF
            for i in range(1, n + 1):
                lo = i - band if i - band > 0 else 0
                hi = i + band if i + band < m else m
                if lo == 0:
                    cur[0] = <int32_t>i
                    lo = 1
                else:
                    cur[lo - 1] = INF
                for j in range(lo, hi + 1):
                    if A[i - 1] == B[j - 1]:
                        cur[j] = prev[j - 1]
                    else:
                        d = prev[j]
                        x = cur[j - 1]
                        d = d if d < x else x
                        cur[j] = d + 1 if d < INF else INF
                tmp = prev
                prev = cur
                cur = tmp
            res = prev[m]
    finally:
        free(prev)
        free(cur)
    return int(res) if res <= band else -1


def lis_matching(left, right, Py_ssize_t right_len):
    """Largest strictly increasing chain of edges.

    Edges must arrive sorted by (left asc, right desc). Prefix maxima over the
    right coordinate live in a Fenwick tree keyed by (length, -edge id), so on
    equal lengths the earliest edge wins. Returns chosen edge ids, ascending.
    """
    cdef cnp.ndarray[i64, ndim=1] Lf = np.ascontiguousarray(left, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] Rt = np.ascontiguousarray(right, dtype=np.int64)
    cdef Py_ssize_t E = Lf.shape[0], e, p
    if E == 0:
        return np.zeros(0, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] tlen = np.zeros(right_len + 1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] tid = np.full(right_len + 1, -1, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] pred = np.full(E, -1, dtype=np.int64)
    cdef i64 bl, bid, cl, best_len = 0, best_id = -1
    with nogil:
        for e in range(E):
            # query prefix (positions < Rt[e]) -> Fenwick index Rt[e]
            bl = 0
            bid = -1
            p = Rt[e]
            while p > 0:
                if tlen[p] > bl or (tlen[p] == bl and tlen[p] > 0 and tid[p] < bid):
                    bl = tlen[p]
                    bid = tid[p]
                p -= p & (-p)
            cl = bl + 1
            pred[e] = bid
            if cl > best_len:
                best_len = cl
                best_id = e
            p = Rt[e] + 1
            while p <= right_len:
                if cl > tlen[p]:
                    tlen[p] = cl
                    tid[p] = e
                p += p & (-p)
    out = np.empty(best_len, dtype=np.int64)
    cdef i64[:] o = out
    cdef i64 cur = best_id
    cdef Py_ssize_t k = best_len
    while cur >= 0:
        k -= 1
        o[k] = cur
        cur = pred[cur]
    return out


def build_edges(s_keys, t_keys, Py_ssize_t unit_s, Py_ssize_t unit_t, cand_ptr, cand_idx):
    """Identical-symbol edges between each target unit and its candidate source units.

    Target unit u spans t positions [u*unit_t, (u+1)*unit_t); its candidate
    source units are cand_idx[cand_ptr[u]:cand_ptr[u+1]] (unique). Returns
    (left, right) arrays in generation order.
    """
    cdef cnp.ndarray[i64, ndim=1] S = np.ascontiguousarray(s_keys, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] T = np.ascontiguousarray(t_keys, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] ptr = np.ascontiguousarray(cand_ptr, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] cidx = np.ascontiguousarray(cand_idx, dtype=np.int64)
    cdef Py_ssize_t ns = S.shape[0], nt = T.shape[0]
    cdef Py_ssize_t units = ptr.shape[0] - 1
    cdef Py_ssize_t u, c, t, s, t0, t1, s0, s1, pas, count = 0
    cdef i64 key
    cdef cnp.ndarray[i64, ndim=1] left = np.empty(0, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] right = np.empty(0, dtype=np.int64)
    for pas in range(2):
        if pas == 1:
            left = np.empty(count, dtype=np.int64)
            right = np.empty(count, dtype=np.int64)
            count = 0
        with nogil:
            for u in range(units):
                t0 = u * unit_t
                t1 = t0 + unit_t
                if t1 > nt:
                    t1 = nt
                for c in range(ptr[u], ptr[u + 1]):
                    s0 = cidx[c] * unit_s
                    s1 = s0 + unit_s
                    if s1 > ns:
                        s1 = ns
                    for t in range(t0, t1):
                        key = T[t]
                        for s in range(s0, s1):
                            if S[s] == key:
                                if pas == 1:
                                    left[count] = s
                                    right[count] = t
                                count += 1
    return left, right


def sync_scan(s, double eps, Py_ssize_t k_start):
    """First (i, j, k) (0-based, S[i:j] vs S[j:k]) with ED <= (1 - eps)(k - i).

    Scan order: k ascending from max(k_start, 2), then j descending, then i
    descending. For each k the pattern reversed(S[j:k]) is a prefix of
    reversed(S[:k]), so one mask table per k serves every j. Returns None when
    no triple with k >= k_start is violated.
    """
    cdef cnp.ndarray[i64, ndim=1] A = np.ascontiguousarray(s, dtype=np.int64)
    cdef Py_ssize_t n = A.shape[0]
    if n < 2:
        return None
    _, inv = np.unique(A, return_inverse=True)
    cdef cnp.ndarray[i64, ndim=1] D = inv.astype(np.int64)
    cdef Py_ssize_t q = int(D.max()) + 1
    cdef Py_ssize_t W = (n + 63) // 64
    cdef cnp.ndarray[u64, ndim=2] masks = np.zeros((q, W), dtype=np.uint64)
    cdef cnp.ndarray[u64, ndim=1] V = np.zeros(W, dtype=np.uint64)
    cdef Py_ssize_t k, j, i, p, w, m, Wm
    cdef i64 c, lcs, ed
    cdef u64 x, u, y, y2, top, carry, mk, lastmask
    cdef double one_minus = 1.0 - eps
    cdef Py_ssize_t kk = k_start if k_start > 2 else 2
    cdef Py_ssize_t found_i = -1, found_j = -1, found_k = -1
    with nogil:
        for k in range(kk, n + 1):
            # masks for T = reversed(S[:k]); T[p] = S[k-1-p]
            for p in range(k):
                c = D[k - 1 - p]
                for w in range(W):
                    masks[c, w] = 0
            for p in range(k):
                c = D[k - 1 - p]
                masks[c, p >> 6] |= (<u64>1) << (p & 63)
            for j in range(k - 1, 0, -1):
                m = k - j
                Wm = (m + 63) // 64
                if m & 63:
                    lastmask = ((<u64>1) << (m & 63)) - 1
                else:
                    lastmask = ~(<u64>0)
                for w in range(Wm):
                    V[w] = ~(<u64>0)
                V[Wm - 1] = lastmask
                for i in range(j - 1, -1, -1):
                    c = D[i]
                    carry = 0
                    lcs = 0
                    for w in range(Wm):
                        mk = masks[c, w]
                        if w == Wm - 1:
                            mk = mk & lastmask
                        x = V[w]
                        u = x & mk
                        y = x + u
                        top = 1 if y < x else 0
                        y2 = y + carry
                        if y2 < y:
                            top = 1
                        y2 = y2 | (x & ~mk)
                        if w == Wm - 1:
                            y2 = y2 & lastmask
                        V[w] = y2
                        carry = top
                        lcs += _popcount(y2)
                    lcs = m - lcs
                    ed = (k - i) - 2 * lcs
                    if not (<double>ed > one_minus * <double>(k - i)):
                        found_i = i
                        found_j = j
                        found_k = k
                        break
                if found_k >= 0:
                    break
            if found_k >= 0:
                break
    if found_k < 0:
        return None
    return (int(found_i), int(found_j), int(found_k))
