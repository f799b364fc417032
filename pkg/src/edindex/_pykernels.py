"""Pure-Python kernels, used when the compiled extension is unavailable.

Each function mirrors its counterpart in ``_ckernels.pyx`` exactly, down to
the traversal order that decides which optimal witness is returned.
"""
import numpy as np


def lcs_length(a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return 0
    if len(a) < len(b):
        a, b = b, a
    m = len(a)
    masks = {}
    for p, c in enumerate(a.tolist()):
        masks[c] = masks.get(c, 0) | (1 << p)
    full = (1 << m) - 1
    v = full
    for c in b.tolist():
        u = v & masks.get(c, 0)
        v = ((v + u) | (v - u)) & full
    return m - v.bit_count()


def lcs_many(codebook, cand, r):
    codebook = np.asarray(codebook, dtype=np.int64)
    return np.array([lcs_length(codebook[k], r) for k in np.asarray(cand).tolist()],
                    dtype=np.int64)


def ed_distance(a, b):
    a = np.asarray(a, dtype=np.int64).tolist()
    b = np.asarray(b, dtype=np.int64).tolist()
    prev = list(range(len(b) + 1))
    for i, ai in enumerate(a, 1):
        cur = [i] + [0] * len(b)
        for j, bj in enumerate(b, 1):
            if ai == bj:
                cur[j] = prev[j - 1]
            else:
                d, x = prev[j], cur[j - 1]
                cur[j] = (d if d < x else x) + 1
        prev = cur
    return prev[-1]


def ed_align(a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n, m = len(a), len(b)
    L = np.zeros((n + 1, m + 1), dtype=np.int32)
    if n and m:
        eq = a[:, None] == b[None, :]
        for i in range(1, n + 1):
            row, up = L[i], L[i - 1]
            # cumulative max along the row resolves the left-dependency
            diag = np.where(eq[i - 1], up[:-1] + 1, 0)
            row[1:] = np.maximum(up[1:], diag)
            np.maximum.accumulate(row, out=row)
    lcs = int(L[n, m])
    pairs = np.empty((lcs, 2), dtype=np.int64)
    i, j, k = n, m, lcs
    al, bl = a.tolist(), b.tolist()
    while i > 0 and j > 0:
        if al[i - 1] == bl[j - 1]:
            k -= 1
            pairs[k] = (i - 1, j - 1)
            i -= 1
            j -= 1
        elif L[i - 1, j] == L[i, j]:
            i -= 1
        else:
            j -= 1
    return n + m - 2 * lcs, pairs


def ed_banded(a, b, band):
    a = np.asarray(a, dtype=np.int64).tolist()
    b = np.asarray(b, dtype=np.int64).tolist()
    n, m = len(a), len(b)
    if abs(n - m) > band:
        return -1
    INF = 1 << 29
    prev = [j if j <= band else INF for j in range(m + 2)]
    cur = [INF] * (m + 2)
    for i in range(1, n + 1):
        lo = max(i - band, 0)
        hi = min(i + band, m)
        if lo == 0:
            cur[0] = i
            lo = 1
        else:
            cur[lo - 1] = INF
        ai = a[i - 1]
        for j in range(lo, hi + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1]
            else:
                d = min(prev[j], cur[j - 1])
                cur[j] = d + 1 if d < INF else INF
        prev, cur = cur, prev
    res = prev[m]
    return res if res <= band else -1


def lis_matching(left, right, right_len):
    right = np.asarray(right, dtype=np.int64).tolist()
    E = len(right)
    if E == 0:
        return np.zeros(0, dtype=np.int64)
    tlen = [0] * (right_len + 1)
    tid = [-1] * (right_len + 1)
    pred = [-1] * E
    best_len, best_id = 0, -1
    for e, r in enumerate(right):
        bl, bid = 0, -1
        p = r
        while p > 0:
            tl = tlen[p]
            if tl > bl or (tl == bl and tl > 0 and tid[p] < bid):
                bl, bid = tl, tid[p]
            p -= p & -p
        cl = bl + 1
        pred[e] = bid
        if cl > best_len:
            best_len, best_id = cl, e
        p = r + 1
        while p <= right_len:
            if cl > tlen[p]:
                tlen[p] = cl
                tid[p] = e
            p += p & -p
    out = np.empty(best_len, dtype=np.int64)
    cur, k = best_id, best_len
    while cur >= 0:
        k -= 1
        out[k] = cur
        cur = pred[cur]
    return out


def build_edges(s_keys, t_keys, unit_s, unit_t, cand_ptr, cand_idx):
    s_keys = np.asarray(s_keys, dtype=np.int64)
    t_keys = np.asarray(t_keys, dtype=np.int64)
    cand_ptr = np.asarray(cand_ptr, dtype=np.int64)
    cand_idx = np.asarray(cand_idx, dtype=np.int64)
    ns, nt = len(s_keys), len(t_keys)
    lefts, rights = [], []
    for u in range(len(cand_ptr) - 1):
        t0, t1 = u * unit_t, min((u + 1) * unit_t, nt)
        tk = t_keys[t0:t1]
        for c in cand_idx[cand_ptr[u]:cand_ptr[u + 1]].tolist():
            s0, s1 = c * unit_s, min((c + 1) * unit_s, ns)
            if s0 >= s1 or t0 >= t1:
                continue
            # generation order: t ascending, then s ascending
            tt, ss = np.nonzero(tk[:, None] == s_keys[None, s0:s1])
            lefts.append(ss + s0)
            rights.append(tt + t0)
    if not lefts:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return (np.concatenate(lefts).astype(np.int64),
            np.concatenate(rights).astype(np.int64))


def sync_scan(s, eps, k_start):
    s = np.asarray(s, dtype=np.int64).tolist()
    n = len(s)
    one_minus = 1.0 - eps
    for k in range(max(k_start, 2), n + 1):
        masks = {}
        for p in range(k):
            c = s[k - 1 - p]
            masks[c] = masks.get(c, 0) | (1 << p)
        for j in range(k - 1, 0, -1):
            m = k - j
            full = (1 << m) - 1
            v = full
            for i in range(j - 1, -1, -1):
                mk = masks.get(s[i], 0) & full
                u = v & mk
                v = ((v + u) | (v & ~mk)) & full
                lcs = m - v.bit_count()
                ed = (k - i) - 2 * lcs
                if not (float(ed) > one_minus * float(k - i)):
                    return (i, j, k)
    return None
