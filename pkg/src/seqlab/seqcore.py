"""The sequence a_1 = 1, a_n = a_{n-1} + a_{floor(n/2)}, exactly and mod m."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from seqlab.errors import CapacityError, InvalidModulusError
from seqlab.kernels import extend_residues

MAX_MODULUS = 65536
DEFAULT_MEM_BUDGET_MB = 1024
EXACT_PREFIX_CAP = 200_000


def mem_budget_bytes() -> int:
    raw = os.environ.get("SEQLAB_MEM_BUDGET_MB")
    mb = float(raw) if raw else DEFAULT_MEM_BUDGET_MB
    return int(mb * 1024 * 1024)


@dataclass(frozen=True)
class Modulus:
    m: int
    odd_part: int
    two_exponent: int

    @classmethod
    def of(cls, m) -> "Modulus":
        if isinstance(m, Modulus):
            return m
        if isinstance(m, bool) or int(m) != m:
            raise InvalidModulusError(f"modulus must be an integer, got {m!r}")
        m = int(m)
        if m < 2:
            raise InvalidModulusError(f"modulus must be >= 2, got {m}")
        r = two_adic_valuation(m)
        return cls(m=m, odd_part=m >> r, two_exponent=r)

    @property
    def dtype(self):
        if self.m <= 256:
            return np.uint8
        if self.m <= MAX_MODULUS:
            return np.uint16
        raise InvalidModulusError(f"modulus {self.m} exceeds {MAX_MODULUS}")

    def __int__(self) -> int:
        return self.m


@dataclass(frozen=True)
class ResidueTable:
    """``a_k mod m`` for ``1 <= k <= limit``; index it 1-based."""

    modulus: Modulus
    limit: int
    residues: np.ndarray  # length limit + 1, slot 0 unused

    def __getitem__(self, k):
        if isinstance(k, slice):
            raise TypeError("slice the .values array instead")
        if not 1 <= k <= self.limit:
            raise IndexError(f"index {k} outside [1, {self.limit}]")
        return int(self.residues[k])

    def __len__(self) -> int:
        return self.limit

    @property
    def values(self) -> np.ndarray:
        """Read-only view of a_1..a_N mod m (0-based array)."""
        return self.residues[1:]

    def at(self, idx) -> np.ndarray:
        """Vectorised 1-based lookup."""
        return self.residues[np.asarray(idx)]


@dataclass(frozen=True)
class ExactPrefix:
    limit: int
    values: list  # values[k] = a_k, values[0] = 0 padding

    def __getitem__(self, k: int) -> int:
        if not 1 <= k <= self.limit:
            raise IndexError(f"index {k} outside [1, {self.limit}]")
        return self.values[k]

    def __len__(self) -> int:
        return self.limit


def _check_capacity(n_bytes: int, what: str) -> None:
    budget = mem_budget_bytes()
    if n_bytes > budget:
        raise CapacityError(
            f"{what} needs {n_bytes / 2**20:.1f} MiB, over the "
            f"SEQLAB_MEM_BUDGET_MB budget of {budget / 2**20:.1f} MiB")


def residue_stream(m, N: int, *, prefix: ResidueTable | None = None) -> ResidueTable:
    """Compute ``a_1..a_N mod m`` in one sequential pass.

    With ``prefix`` the pass resumes after ``prefix.limit`` instead of
    starting over; the result is identical to an uninterrupted run.
    """
    mod = Modulus.of(m)
    N = int(N)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    dtype = mod.dtype
    _check_capacity((N + 1) * np.dtype(dtype).itemsize, f"residue table mod {mod.m} up to {N}")
    res = np.zeros(N + 1, dtype=dtype)
    start = 2
    if prefix is not None:
        if prefix.modulus.m != mod.m:
            raise ValueError("prefix was computed for a different modulus")
        k = min(prefix.limit, N)
        res[: k + 1] = prefix.residues[: k + 1]
        start = k + 1
    else:
        res[1] = 1
    extend_residues(res, max(start, 2), N + 1, mod.m)
    res.flags.writeable = False
    return ResidueTable(modulus=mod, limit=N, residues=res)


def exact_prefix(N: int, *, cap: int = EXACT_PREFIX_CAP) -> ExactPrefix:
    N = int(N)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if N > cap:
        raise CapacityError(f"exact prefix up to {N} exceeds cap {cap}")
    a = [0] * (N + 1)
    a[1] = 1
    for n in range(2, N + 1):
        a[n] = a[n - 1] + a[n >> 1]
    return ExactPrefix(limit=N, values=a)


def two_adic_valuation(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return (n & -n).bit_length() - 1


def parity_predict(n: int) -> int:
    """a_n mod 2, read off the 2-adic valuation of n."""
    return (two_adic_valuation(n) + 1) % 2


def two_adic_valuations(N: int) -> np.ndarray:
    """v_2(n) for n = 0..N (entry 0 is 0)."""
    n = np.arange(N + 1, dtype=np.int64)
    n[0] = 1
    low = n & -n
    return np.log2(low).astype(np.int64)
