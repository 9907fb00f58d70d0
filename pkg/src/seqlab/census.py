"""Residue-class counts S_{x,m}(N) against the conjectured limiting densities."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from seqlab.errors import UnsupportedModulusError
from seqlab.seqcore import Modulus, ResidueTable, residue_stream

CSV_HEADER = ["m", "x", "count", "N", "empirical", "predicted", "deviation"]


@dataclass(frozen=True)
class CensusReport:
    modulus: Modulus
    limit: int
    counts: dict  # x -> S_{x,m}(N)
    predicted: dict  # x -> Fraction, absent when 32 | m

    def __post_init__(self):
        if sum(self.counts.values()) != self.limit:
            raise ValueError("census counts do not sum to N")

    @property
    def empirical_density(self) -> dict:
        return {x: c / self.limit for x, c in self.counts.items()}

    @property
    def deviation(self) -> dict:
        if not self.predicted:
            return {}
        return {x: c / self.limit - float(self.predicted[x]) for x, c in self.counts.items()}

    @property
    def relative_deviation(self) -> dict:
        out = {}
        for x, d in self.deviation.items():
            p = float(self.predicted[x])
            out[x] = d / p if p else (0.0 if d == 0 else math.inf)
        return out

    @property
    def max_abs_deviation(self) -> float:
        dev = self.deviation
        return max(abs(d) for d in dev.values()) if dev else math.nan

    def rows(self):
        m = self.modulus.m
        dev = self.deviation
        for x in range(m):
            pred = self.predicted.get(x)
            yield {
                "m": m, "x": x, "count": self.counts[x], "N": self.limit,
                "empirical": self.counts[x] / self.limit,
                "predicted": float(pred) if pred is not None else None,
                "deviation": dev.get(x),
            }

    def to_json(self) -> dict:
        m = self.modulus.m
        return {
            "modulus": m,
            "limit": self.limit,
            "counts": {str(x): self.counts[x] for x in range(m)},
            "empirical_density": {str(x): v for x, v in self.empirical_density.items()},
            "predicted": {str(x): f"{p.numerator}/{p.denominator}"
                          for x, p in self.predicted.items()},
            "deviation": {str(x): v for x, v in self.deviation.items()},
        }


def to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rep in reports:
        for row in rep.rows():
            w.writerow(["" if row[k] is None else (repr(row[k]) if isinstance(row[k], float) else row[k])
                        for k in CSV_HEADER])
    return buf.getvalue()


def predicted_density(x: int, m) -> Fraction:
    """Conjectured limit of S_{x,m}(n)/n (defined for 32 not dividing m)."""
    m = Modulus.of(m).m
    if m % 32 == 0:
        raise UnsupportedModulusError(f"no density is conjectured when 32 | m (m={m})")
    x %= m
    if m % 2 == 1:
        return Fraction(1, m)
    if m % 4 == 2:
        return Fraction(2, 3 * m) if x % 2 == 0 else Fraction(4, 3 * m)
    if x % 4 == 0:
        return Fraction(0)
    return Fraction(4, 3 * m)


def census_from_table(table: ResidueTable, N: int | None = None) -> CensusReport:
    N = table.limit if N is None else int(N)
    m = table.modulus.m
    counts = np.bincount(table.residues[1:N + 1], minlength=m)
    predicted = {}
    if m % 32:
        predicted = {x: predicted_density(x, m) for x in range(m)}
    return CensusReport(modulus=table.modulus, limit=N,
                        counts={x: int(counts[x]) for x in range(m)},
                        predicted=predicted)


def run_census(m, N: int) -> CensusReport:
    return census_from_table(residue_stream(m, N))


@dataclass(frozen=True)
class ScanResult:
    reports: list  # sorted by worst absolute deviation, largest first
    skipped: list  # moduli skipped because 32 | m
    threshold: float

    @property
    def worst(self) -> float:
        return max((r.max_abs_deviation for r in self.reports), default=0.0)

    @property
    def passed(self) -> bool:
        return self.worst < self.threshold


def deviation_scan(max_m: int, N: int, *, threshold: float = 0.01,
                   threads: int | None = None) -> ScanResult:
    """One independent census per modulus 2..max_m (skipping 32 | m)."""
    if max_m < 2:
        raise ValueError("max_m must be >= 2")
    moduli = [m for m in range(2, max_m + 1) if m % 32]
    skipped = [m for m in range(2, max_m + 1) if m % 32 == 0]
    with ThreadPoolExecutor(max_workers=threads or 1) as pool:
        reports = list(pool.map(lambda m: run_census(m, N), moduli))
    reports.sort(key=lambda r: (-r.max_abs_deviation, r.modulus.m))
    return ScanResult(reports=reports, skipped=skipped, threshold=threshold)


@dataclass(frozen=True)
class BoundCheck:
    limit: int
    passed: bool
    first_violation: tuple | None  # (n, x)
    min_slack: float  # smallest S_{x,8}(n) - rhs(n) seen


MOD8_CLASSES = (1, 2, 3, 5, 6, 7)


def mod8_rhs(n) -> np.ndarray:
    n = np.asarray(n, dtype=np.float64)
    return n / 6 - 2 * np.log(n) - 11


def mod8_bound_check(N: int, table: ResidueTable | None = None) -> BoundCheck:
    """Check S_{x,8}(n) > n/6 - 2 ln n - 11 for all n <= N and x not 0 mod 4."""
    if table is None or table.modulus.m != 8 or table.limit < N:
        table = residue_stream(8, N)
    res = table.residues[1:N + 1]
    n = np.arange(1, N + 1)
    rhs = mod8_rhs(n)
    first = None
    min_slack = math.inf
    for x in MOD8_CLASSES:
        s = np.cumsum(res == x)
        slack = s - rhs
        min_slack = min(min_slack, float(slack.min()))
        bad = np.flatnonzero(slack <= 0)
        if bad.size:
            cand = (int(n[bad[0]]), x)
            if first is None or cand < first:
                first = cand
    return BoundCheck(limit=N, passed=first is None, first_violation=first,
                      min_slack=min_slack)
