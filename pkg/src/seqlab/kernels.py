"""Hot inner loops: the residue recurrence and the base-tuple search.

Every kernel has a compiled numba version and a vectorised numpy version with
identical results. ``seqlab._accel.USE_NUMBA`` picks one at import time.

Residue tables are 1-based: slot 0 is unused padding so that ``res[k]`` holds
``a_k mod m``.

The search works on "levels". For a fixed number of base elements ``j`` the
window set splits into levels ``i = 1..j``; level ``i`` holds the residues
``r(i, t)``, ``t = 1..2^i - 1`` with ``r(i, 1) = b_i`` and
``r(i, t) = r(i, t-1) + r(i-1, t // 2)``. The last two levels are never
materialised per tuple: both are affine in ``(b_{j-1}, b_j)``, so their hit
counts come from two small histograms built once per depth-``j-2`` node.
"""

import numpy as np

from seqlab._accel import USE_NUMBA

INF_HITS = np.iinfo(np.int64).max


# --------------------------------------------------------------------------
# residue recurrence
# --------------------------------------------------------------------------

def _extend_residues_numpy(res, start, stop, m):
    # chunk [lo, hi) with hi <= 2*lo only reads indices < lo
    lo = start
    while lo < stop:
        hi = min(stop, 2 * lo)
        halves = res[np.arange(lo, hi) >> 1].astype(np.int64)
        np.cumsum(halves, out=halves)
        halves += int(res[lo - 1])
        halves %= m
        res[lo:hi] = halves
        lo = hi


def _extend_residues_loop(res, start, stop, m):
    prev = np.int64(res[start - 1])
    for n in range(start, stop):
        v = prev + np.int64(res[n >> 1])
        if v >= m:
            v -= m
        res[n] = v
        prev = v


# --------------------------------------------------------------------------
# base-tuple search
# --------------------------------------------------------------------------

def _search_partitions_loop(domain, prefixes, m, x, j, shared_best, local_cap,
                            out_e, out_w, out_leaves):
    """Exhaustive search of every tuple whose leading coordinates are a row of
    ``prefixes``. Requires ``j >= 2`` and ``prefixes.shape[1] <= j - 2``."""
    n_parts = prefixes.shape[0]
    for part in range(n_parts):
        _search_one(domain, prefixes, part, m, x, j, shared_best, local_cap,
                    out_e, out_w, out_leaves)


def _search_one(domain, prefixes, part, m, x, j, shared_best, local_cap,
                out_e, out_w, out_leaves):
    q = domain.shape[0]
    p = prefixes.shape[1]
    depth_leaf = j - 2
    half = 1 << (j - 1)
    rows = np.zeros(max(half, 1), dtype=np.int64)
    partial = np.zeros(j + 1, dtype=np.int64)
    choice = np.zeros(j + 1, dtype=np.int64)
    tup = np.zeros(j, dtype=np.int64)
    dprime = np.zeros(half, dtype=np.int64)
    h1 = np.zeros(m, dtype=np.int64)
    h2 = np.zeros(m * m, dtype=np.int64)

    best = local_cap
    leaves = 0
    for c in range(j):
        out_w[part, c] = -1

    # fixed prefix
    alive = True
    for d in range(1, p + 1):
        b = prefixes[part, d - 1]
        tup[d - 1] = b
        partial[d] = partial[d - 1] + _fill_level(rows, d, b, m, x)
        if partial[d] >= best or partial[d] > shared_best[0]:
            alive = False
            break

    if alive:
        d = p + 1
        if d <= depth_leaf:
            choice[d] = 0
        while True:
            if d > depth_leaf:
                # leaf node at depth j-2: evaluate all (b_{j-1}, b_j) pairs
                base_hits = partial[depth_leaf]
                h1[:] = 0
                h2[:] = 0
                # D'_t, t = 1..2^{j-1}-1
                dprime[1] = 0
                h1[0] += 1
                off_prev = (1 << (j - 2)) - 1
                for t in range(2, half):
                    v = dprime[t - 1] + rows[off_prev + (t >> 1) - 1]
                    if v >= m:
                        v -= m
                    dprime[t] = v
                    h1[v] += 1
                # E_t, t = 1..2^j-1, bucketed with (t-1) mod m
                e = 0
                u = 0
                h2[0] += 1
                for t in range(2, 2 * half):
                    e += dprime[t >> 1]
                    if e >= m:
                        e -= m
                    u += 1
                    if u == m:
                        u = 0
                    h2[e * m + u] += 1
                for i1 in range(q):
                    b1 = domain[i1]
                    lvl1 = base_hits + h1[(x - b1 + m) % m]
                    if lvl1 >= best or lvl1 > shared_best[0]:
                        continue
                    for i2 in range(q):
                        b2 = domain[i2]
                        acc = lvl1
                        r = (x - b2 + m) % m
                        for uu in range(m):
                            acc += h2[r * m + uu]
                            r -= b1
                            if r < 0:
                                r += m
                        leaves += 1
                        if acc < best:
                            best = acc
                            for c in range(depth_leaf):
                                out_w[part, c] = tup[c]
                            out_w[part, j - 2] = b1
                            out_w[part, j - 1] = b2
                            if acc < shared_best[0]:
                                shared_best[0] = acc
                d -= 1
                if d <= p:
                    break
                choice[d] += 1
            else:
                if choice[d] >= q:
                    d -= 1
                    if d <= p:
                        break
                    choice[d] += 1
                    continue
                b = domain[choice[d]]
                tup[d - 1] = b
                partial[d] = partial[d - 1] + _fill_level(rows, d, b, m, x)
                if partial[d] >= best or partial[d] > shared_best[0]:
                    choice[d] += 1
                    continue
                d += 1
                if d <= depth_leaf:
                    choice[d] = 0

    out_e[part] = best
    out_leaves[part] = leaves


def _fill_level(rows, i, b, m, x):
    """Write level ``i`` into ``rows`` (level ``i`` starts at offset
    ``2^i - 1``); return its number of entries equal to ``x``."""
    off = (1 << i) - 1
    off_prev = (1 << (i - 1)) - 1
    rows[off] = b
    hits = 1 if b == x else 0
    v = b
    for t in range(2, 1 << i):
        v += rows[off_prev + (t >> 1) - 1]
        if v >= m:
            v -= m
        rows[off + t - 1] = v
        if v == x:
            hits += 1
    return hits


if USE_NUMBA:
    import numba

    _fill_level = numba.njit(cache=True, nogil=True)(_fill_level)
    _search_one = numba.njit(cache=True, nogil=True)(_search_one)
    _extend_residues_loop = numba.njit(cache=True, nogil=True)(_extend_residues_loop)

    @numba.njit(cache=True, parallel=True)
    def _search_partitions_parallel(domain, prefixes, m, x, j, shared_best,
                                    local_cap, out_e, out_w, out_leaves):
        for part in numba.prange(prefixes.shape[0]):
            _search_one(domain, prefixes, part, m, x, j, shared_best,
                        local_cap, out_e, out_w, out_leaves)


def extend_residues(res, start, stop, m):
    """Fill ``res[start:stop]`` from the recurrence; ``res[:start]`` must
    already be valid and ``start >= 2``."""
    if stop <= start:
        return
    if USE_NUMBA:
        _extend_residues_loop(res, start, stop, m)
    else:
        _extend_residues_numpy(res, start, stop, m)


# --------------------------------------------------------------------------
# numpy search path
# --------------------------------------------------------------------------

def _levels_numpy(prefix_rows, domain, depth_from, depth_to, m, x):
    """Expand a batch of nodes from ``depth_from`` to ``depth_to``.

    ``prefix_rows`` is ``(tuples, last_level, partial)`` for the batch; returns
    the same triple for all children in lexicographic order.
    """
    tuples, last, partial = prefix_rows
    q = domain.shape[0]
    for i in range(depth_from + 1, depth_to + 1):
        n = tuples.shape[0]
        tuples = np.concatenate(
            [np.repeat(tuples, q, axis=0), np.tile(domain, n)[:, None]], axis=1)
        last = np.repeat(last, q, axis=0)
        partial = np.repeat(partial, q)
        b = tuples[:, -1]
        width = (1 << i) - 1
        lvl = np.empty((tuples.shape[0], width), dtype=np.int64)
        lvl[:, 0] = b
        if width > 1:
            lvl[:, 1:] = np.cumsum(np.repeat(last, 2, axis=1), axis=1)
            lvl[:, 1:] += b[:, None]
            lvl %= m
        partial = partial + (lvl == x).sum(axis=1)
        last = lvl
    return tuples, last, partial


def _search_partitions_numpy(domain, prefixes, m, x, j, shared_best, local_cap,
                             out_e, out_w, out_leaves):
    q = domain.shape[0]
    p = prefixes.shape[1]
    depth_leaf = j - 2
    half = 1 << (j - 1)
    u_of_t = (np.arange(1, 2 * half) - 1) % m
    b1 = domain[:, None, None]
    b2 = domain[None, :, None]
    uu = np.arange(m)[None, None, :]
    gather = (x - b2 - uu * b1) % m  # (q, q, m)
    for part in range(prefixes.shape[0]):
        # replay the fixed prefix one level at a time
        tuples = np.zeros((1, 0), dtype=np.int64)
        last = np.zeros((1, 0), dtype=np.int64)
        partial = np.zeros(1, dtype=np.int64)
        for d in range(1, p + 1):
            tuples, last, partial = _levels_numpy(
                (tuples, last, partial), prefixes[part, d - 1:d].astype(np.int64),
                d - 1, d, m, x)
        tuples, last, partial = _levels_numpy(
            (tuples, last, partial), domain, p, depth_leaf, m, x)
        n = tuples.shape[0]
        # D'_t and E_t for every node
        dprime = np.zeros((n, half - 1), dtype=np.int64)
        if half > 2:
            dprime[:, 1:] = np.cumsum(np.repeat(last, 2, axis=1), axis=1) % m
        ev = np.zeros((n, 2 * half - 1), dtype=np.int64)
        ev[:, 1:] = np.cumsum(np.repeat(dprime, 2, axis=1), axis=1) % m
        node = np.arange(n)[:, None]
        h1 = np.bincount((node * m + dprime).ravel(), minlength=n * m).reshape(n, m)
        h2 = np.bincount(((node * m + ev) * m + u_of_t[None, :]).ravel(),
                         minlength=n * m * m).reshape(n, m, m)
        lvl1 = partial[:, None] + h1[:, (x - domain) % m]  # (n, q)
        lvl2 = h2[:, gather, np.arange(m)[None, None, :]].sum(axis=3)  # (n, q, q)
        hits = lvl1[:, :, None] + lvl2
        flat = hits.reshape(-1)
        k = int(np.argmin(flat))
        best = int(flat[k])
        out_leaves[part] = flat.size
        if best < local_cap:
            nd, rem = divmod(k, q * q)
            i1, i2 = divmod(rem, q)
            out_e[part] = best
            out_w[part, :depth_leaf] = tuples[nd]
            out_w[part, depth_leaf] = domain[i1]
            out_w[part, depth_leaf + 1] = domain[i2]
            if best < shared_best[0]:
                shared_best[0] = best
        else:
            out_e[part] = local_cap
            out_w[part, :] = -1


def search_partitions(domain, prefixes, m, x, j, shared_best, parallel=True):
    """Run the exhaustive search over a batch of partitions.

    Returns ``(e, witness, leaves)`` arrays, one entry per partition. ``e`` is
    the partition minimum (``INF_HITS`` if every branch was pruned against
    ``shared_best``), ``witness`` the lexicographically smallest tuple
    attaining it, ``leaves`` the number of full tuples evaluated.
    """
    domain = np.ascontiguousarray(domain, dtype=np.int64)
    prefixes = np.ascontiguousarray(prefixes, dtype=np.int64)
    n_parts = prefixes.shape[0]
    out_e = np.full(n_parts, INF_HITS, dtype=np.int64)
    out_w = np.full((n_parts, j), -1, dtype=np.int64)
    out_leaves = np.zeros(n_parts, dtype=np.int64)
    cap = np.int64(INF_HITS)
    if USE_NUMBA:
        kernel = _search_partitions_parallel if parallel else _search_partitions_loop_jit
        kernel(domain, prefixes, m, x, j, shared_best, cap, out_e, out_w, out_leaves)
    else:
        _search_partitions_numpy(domain, prefixes, m, x, j, shared_best, cap,
                                 out_e, out_w, out_leaves)
    return out_e, out_w, out_leaves


if USE_NUMBA:
    _search_partitions_loop_jit = numba.njit(cache=True)(_search_partitions_loop)


# --------------------------------------------------------------------------
# FNV-1a (64 bit) for checkpoint payloads
# --------------------------------------------------------------------------

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def _fnv1a64_py(data):
    h = FNV_OFFSET
    for b in bytes(data):
        h = ((h ^ b) * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


if USE_NUMBA:
    @numba.njit(cache=True)
    def _fnv1a64_jit(data):
        h = np.uint64(FNV_OFFSET)
        p = np.uint64(FNV_PRIME)
        for i in range(data.shape[0]):
            h = (h ^ np.uint64(data[i])) * p
        return h


def fnv1a64(data) -> int:
    """64-bit FNV-1a over a bytes-like object or uint8 array."""
    arr = np.frombuffer(bytes(data), dtype=np.uint8) if not isinstance(data, np.ndarray) \
        else data.view(np.uint8).ravel()
    if USE_NUMBA:
        return int(_fnv1a64_jit(arr))
    return _fnv1a64_py(arr.tobytes())
