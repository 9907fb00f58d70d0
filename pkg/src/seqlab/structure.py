"""Finite-range checks of the 2-adic congruences satisfied by a_n.

Each verifier reads an immutable residue table (built on demand, or passed in
to share one table between several checks) and returns a LemmaVerdict holding
the first counterexample, if any.
"""

from __future__ import annotations

import numpy as np

from seqlab.seqcore import ResidueTable, residue_stream, two_adic_valuations
from seqlab.verdict import LemmaVerdict, verdict


def _table(m: int, need: int, table: ResidueTable | None) -> ResidueTable:
    if table is not None and table.modulus.m % m == 0 and table.limit >= need:
        return table
    return residue_stream(m, need)


def _res(table: ResidueTable, idx, m: int) -> np.ndarray:
    return table.residues[idx].astype(np.int64) % m


def verify_parity_lemma(N: int, table: ResidueTable | None = None) -> LemmaVerdict:
    """a_n is odd exactly when v_2(n) is even."""
    t = _table(2, N, table)
    n = np.arange(1, N + 1)
    expected = (two_adic_valuations(N)[1:] + 1) % 2
    return verdict("parity", N, _res(t, n, 2) != expected, n)


QUADRUPLING_LEVELS = (8, 16, 32)


def verify_quadrupling(N: int, level: int = 8, table: ResidueTable | None = None) -> LemmaVerdict:
    """a_{4n} against a_n.

    level 8:  a_{4n} = a_n + 4 (n odd),  a_{4n} = a_n (n even)
    level 16: a_{4n} = 5 a_n (n odd),    a_{4n} = a_n (n even)
    level 32: a_{4n} = 5 a_n (n odd),    a_{4n} = a_n + 8n (n even)
    """
    if level not in QUADRUPLING_LEVELS:
        raise ValueError(f"level must be one of {QUADRUPLING_LEVELS}")
    t = _table(32, 4 * N, table)
    n = np.arange(1, N + 1, dtype=np.int64)
    a_n = _res(t, n, level)
    a_4n = _res(t, 4 * n, level)
    odd = n % 2 == 1
    if level == 8:
        expected = np.where(odd, a_n + 4, a_n)
    elif level == 16:
        expected = np.where(odd, 5 * a_n, a_n)
    else:
        expected = np.where(odd, 5 * a_n, a_n + 8 * n)
    return verdict(f"quadrupling_mod{level}", N, a_4n != expected % level, n)


def verify_quadrupling_all(N: int, table: ResidueTable | None = None) -> list:
    """All three levels on one table; a pass at a higher level forces a pass
    at every lower one."""
    t = _table(32, 4 * N, table)
    out = [verify_quadrupling(N, lvl, t) for lvl in QUADRUPLING_LEVELS]
    status = [v.passed for v in out]
    for hi in range(len(status)):
        if status[hi]:
            assert all(status[:hi]), "quadrupling verdicts are not nested"
    return out


def _odd_block(t: ResidueTable, N: int) -> np.ndarray:
    k = np.arange(0, N + 1, dtype=np.int64)
    return np.stack([_res(t, 8 * k + r, 8) for r in (1, 3, 5, 7)], axis=1)


def verify_odd_quadruples(N: int, strong: bool = False,
                          table: ResidueTable | None = None) -> LemmaVerdict:
    """(a_{8k+1}, a_{8k+3}, a_{8k+5}, a_{8k+7}) mod 8 for 0 <= k <= N.

    Weak form: the four residues are exactly {1, 3, 5, 7}. Strong form: the
    tuple is (t, 3t, 7t, 5t) for t = a_{8k+1}, and it is (1, 3, 7, 5) or
    (7, 5, 1, 3).
    """
    t = _table(8, 8 * N + 7, table)
    quad = _odd_block(t, N)
    k = np.arange(0, N + 1)
    if not strong:
        bad = (np.sort(quad, axis=1) != np.array([1, 3, 5, 7])).any(axis=1)
        return verdict("odd_quadruples", N, bad, k)
    first = quad[:, :1]
    by_mult = (quad != (first * np.array([1, 3, 7, 5])) % 8).any(axis=1)
    pat_a = (quad == np.array([1, 3, 7, 5])).all(axis=1)
    pat_b = (quad == np.array([7, 5, 1, 3])).all(axis=1)
    return verdict("odd_quadruples_strong", N, by_mult | ~(pat_a | pat_b), k)


def verify_even_quadruples(N: int, table: ResidueTable | None = None) -> LemmaVerdict:
    """a_{16k+2} = a_{16k+6} = -a_{16k+10} = -a_{16k+14} = +-2 (mod 8)."""
    t = _table(8, 16 * N + 14, table)
    k = np.arange(0, N + 1, dtype=np.int64)
    q = np.stack([_res(t, 16 * k + r, 8) for r in (2, 6, 10, 14)], axis=1)
    chain = (q[:, 0] != q[:, 1]) | (q[:, 1] != (-q[:, 2]) % 8) | (q[:, 2] != q[:, 3])
    pm2 = (q[:, 0] != 2) & (q[:, 0] != 6)
    multiset = (np.sort(q, axis=1) != np.array([2, 2, 6, 6])).any(axis=1)
    return verdict("even_quadruples", N, chain | pm2 | multiset, k)


def verify_scaled_sets(N: int, max_power: int, table: ResidueTable | None = None) -> LemmaVerdict:
    """For 0 <= k <= N and 0 <= p <= max_power:
    {a_{4^p (8k+r)} : r = 1,3,5,7} is {1,3,5,7} mod 8 and
    {a_{4^p (16k+r)} : r = 2,6,10,14} is {2,2,6,6} mod 8."""
    scale = 4**max_power
    t = _table(8, scale * (16 * N + 14), table)
    k = np.arange(0, N + 1, dtype=np.int64)
    for p in range(max_power + 1):
        s = 4**p
        pk = np.stack([_res(t, s * (8 * k + r), 8) for r in (1, 3, 5, 7)], axis=1)
        qk = np.stack([_res(t, s * (16 * k + r), 8) for r in (2, 6, 10, 14)], axis=1)
        bad = (np.sort(pk, axis=1) != np.array([1, 3, 5, 7])).any(axis=1) \
            | (np.sort(qk, axis=1) != np.array([2, 2, 6, 6])).any(axis=1)
        if bad.any():
            first = int(np.flatnonzero(bad)[0])
            return LemmaVerdict("scaled_sets", (1, N), "fail", (first, p))
    return LemmaVerdict("scaled_sets", (1, N), "pass", detail=f"powers 0..{max_power}")


def lemma_suite(index_limit: int, max_power: int = 3) -> list:
    """Every congruence check with all touched indices <= ``index_limit``,
    sharing one mod-32 table."""
    L = int(index_limit)
    t = residue_stream(32, L)
    scaled_n = (L // 4**max_power - 14) // 16
    out = [verify_parity_lemma(L, t)]
    out += verify_quadrupling_all(L // 4, t)
    out += [
        verify_odd_quadruples((L - 7) // 8, False, t),
        verify_odd_quadruples((L - 7) // 8, True, t),
        verify_even_quadruples((L - 14) // 16, t),
    ]
    if scaled_n >= 0:
        out.append(verify_scaled_sets(scaled_n, max_power, t))
    return out
