"""Lower-density certificates from exhaustive search over base-element residues.

Fix ``j``. For ``k >= 1`` the window set of ``k`` is the union over
``i = 1..j`` of the index runs ``2^i k + 1 .. 2^i k + 2^i - 1``. Every element
of it is a fixed non-negative integer combination of the ``j`` base elements
``a_{2k+1}, a_{4k+1}, ..., a_{2^j k+1}``. Minimising, over every admissible
residue tuple of the base elements, the number of window elements congruent to
``x`` gives a count ``e`` that every window must reach, and hence the bound
``lower density >= e / (2^{j+1} - 2)``.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from seqlab import kernels
from seqlab._accel import USE_NUMBA, set_threads
from seqlab.errors import BudgetExceededError, CapacityError, UnsupportedModulusError
from seqlab.seqcore import Modulus, ResidueTable, mem_budget_bytes, residue_stream
from seqlab.verdict import LemmaVerdict

MAX_J = 24
NAIVE_CAP = 10**8


def row_count(j: int) -> int:
    return 2 ** (j + 1) - 2 - j


def denominator(j: int) -> int:
    return 2 ** (j + 1) - 2


def level_offset(i: int) -> int:
    """Row index of ``(i, 1)`` in the flattened ``(i, t)`` ordering."""
    return 2**i - 1 - i


# --------------------------------------------------------------------------
# coefficient table
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientTable:
    """Row ``(i, t)`` expresses ``a_{2^i k + t}`` over the base elements.

    ``coeffs`` has one row per ``(i, t)`` in lexicographic order and one column
    per base element. It is an ``object`` array of Python ints when the
    entries would overflow int64.
    """

    j: int
    coeffs: np.ndarray

    def row(self, i: int, t: int) -> np.ndarray:
        if not (1 <= i <= self.j and 1 <= t <= 2**i - 1):
            raise IndexError((i, t))
        return self.coeffs[level_offset(i) + t - 1]

    @property
    def rows(self) -> dict:
        return {(i, t): self.row(i, t)
                for i in range(1, self.j + 1) for t in range(1, 2**i)}

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def reduced(self, m: int) -> np.ndarray:
        """Coefficients mod ``m`` as int64."""
        return np.array([[int(c) % m for c in r] for r in self.coeffs], dtype=np.int64) \
            if self.coeffs.dtype == object else self.coeffs % m

    def evaluate(self, base) -> list:
        """Exact values of every row for given base-element values."""
        base = [int(b) for b in base]
        return [sum(int(c) * b for c, b in zip(r, base)) for r in self.coeffs]

    def evaluate_mod(self, base, m: int) -> np.ndarray:
        base = np.asarray(base, dtype=np.int64) % m
        return (self.reduced(m) @ base) % m


def build_coefficient_table(j: int) -> CoefficientTable:
    j = int(j)
    if not 1 <= j <= MAX_J:
        raise ValueError(f"j must be in [1, {MAX_J}], got {j}")
    rows = row_count(j)
    # coefficients of the last levels reach roughly a_{2^{j+1}}; go exact
    # (object dtype) once they could leave int64
    exact = j > 12
    itemsize = 40 if exact else 8
    need = rows * j * itemsize
    if need > mem_budget_bytes():
        raise CapacityError(f"coefficient table for j={j} needs {need / 2**20:.0f} MiB")
    dtype = object if exact else np.int64
    coeffs = np.zeros((rows, j), dtype=dtype)
    if exact:
        coeffs[:] = 0
    prev = None
    for i in range(1, j + 1):
        off = level_offset(i)
        width = 2**i - 1
        lvl = np.zeros((width, j), dtype=dtype)
        if exact:
            lvl[:] = 0
        lvl[0, i - 1] = 1
        if width > 1:
            # c(i, t) = c(i, t-1) + c(i-1, t // 2)
            steps = np.repeat(prev, 2, axis=0)
            lvl[1:] = np.cumsum(steps, axis=0) + lvl[0]
        coeffs[off:off + width] = lvl
        prev = lvl
    return CoefficientTable(j=j, coeffs=coeffs)


# --------------------------------------------------------------------------
# admissible base tuples
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleTupleSpec:
    """Residues the ``j`` base elements can take mod ``m``.

    ``groups`` lists per-coordinate domains; a tuple draws every coordinate
    from the same group. There is one group unless ``4 | m``, where the base
    elements share a residue class mod 4.
    """

    modulus: Modulus
    j: int
    groups: tuple
    description: str

    @property
    def total_count(self) -> int:
        return sum(len(g) ** self.j for g in self.groups)

    def contains(self, tup) -> bool:
        return any(all(int(b) % self.modulus.m in set(g) for b in tup) for g in self.groups)


def admissible_tuples(m, j: int) -> AdmissibleTupleSpec:
    mod = Modulus.of(m)
    j = int(j)
    if j < 1:
        raise ValueError("j must be >= 1")
    if mod.odd_part == 1:
        raise UnsupportedModulusError(
            f"m={mod.m} is a power of two; base tuples are not enumerated there")
    mm = mod.m
    if mm % 2:
        groups = (tuple(range(mm)),)
        desc = f"all residues mod {mm}"
    elif mm % 4 == 2:
        groups = (tuple(range(1, mm, 2)),)
        desc = f"odd residues mod {mm}"
    else:
        groups = (tuple(range(1, mm, 4)), tuple(range(3, mm, 4)))
        desc = f"odd residues mod {mm}, all coordinates in one class mod 4"
    return AdmissibleTupleSpec(modulus=mod, j=j, groups=groups, description=desc)


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------

@dataclass
class Certificate:
    x: int
    m: int
    j: int
    e: int
    witness_tuple: tuple
    tuples_examined: int
    elapsed_seconds: float
    certified: bool = True
    engine: str = "search"

    def __post_init__(self):
        self.witness_tuple = tuple(int(b) for b in self.witness_tuple)
        if self.certified and not 0 <= self.e <= row_count(self.j):
            raise ValueError(f"e={self.e} out of range for j={self.j}")

    @property
    def denominator(self) -> int:
        return denominator(self.j)

    @property
    def density_lower_bound(self) -> Fraction:
        return Fraction(self.e, self.denominator)

    def to_json(self) -> dict:
        return {
            "x": self.x, "m": self.m, "j": self.j, "e": self.e,
            "denominator": self.denominator,
            "density_lower_bound": f"{self.e}/{self.denominator}",
            "witness_tuple": list(self.witness_tuple),
            "tuples_examined": int(self.tuples_examined),
            "elapsed_seconds": round(float(self.elapsed_seconds), 6),
            "certified": bool(self.certified),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        cert = cls(x=int(data["x"]), m=int(data["m"]), j=int(data["j"]), e=int(data["e"]),
                   witness_tuple=tuple(data["witness_tuple"]),
                   tuples_examined=int(data.get("tuples_examined", 0)),
                   elapsed_seconds=float(data.get("elapsed_seconds", 0.0)),
                   certified=bool(data.get("certified", True)))
        if "denominator" in data and int(data["denominator"]) != cert.denominator:
            raise ValueError("denominator does not match j")
        return cert


def _check_instance(x, m, j):
    mod = Modulus.of(m)
    spec = admissible_tuples(mod, j)
    if mod.odd_part < 3:
        raise UnsupportedModulusError(f"m={mod.m} has no odd part >= 3")
    if not 0 <= int(x) < mod.m:
        raise ValueError(f"x must lie in [0, {mod.m}), got {x}")
    return mod, spec


@dataclass
class SearchState:
    """Per-partition results; enough to resume an interrupted search."""

    x: int
    m: int
    j: int
    prefix_len: int
    done: dict = field(default_factory=dict)  # partition index -> [e, witness, leaves]

    def save(self, path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(asdict(self) | {"done": {str(k): v for k, v in self.done.items()}}))
        tmp.replace(path)

    @classmethod
    def load(cls, path) -> "SearchState":
        data = json.loads(Path(path).read_text())
        data["done"] = {int(k): v for k, v in data["done"].items()}
        return cls(**data)


def _partitions(spec: AdmissibleTupleSpec, p: int):
    """Partition prefixes as (group_index, prefix) in a fixed order."""
    out = []
    for g, dom in enumerate(spec.groups):
        for pre in itertools.product(dom, repeat=p):
            out.append((g, pre))
    return out


def _choose_prefix_len(q: int, m: int, j: int, threads: int) -> int:
    leaf_depth = j - 2
    if USE_NUMBA:
        target = max(32, 8 * threads)
        for p in range(0, leaf_depth + 1):
            if q**p >= target:
                return p
        return leaf_depth
    # numpy path evaluates a whole partition at once; bound its footprint
    limit = 1 << 22
    for p in range(0, leaf_depth + 1):
        if q ** (leaf_depth - p) * (2**j + q * q * m) <= limit:
            return p
    return leaf_depth


def search_min_hits(x, m, j, *, threads=None, time_budget=None, tuple_budget=None,
                    state: SearchState | None = None, checkpoint=None,
                    prefix_len=None) -> Certificate:
    """Exact ``e`` by depth-first search with shared-prefix reuse and pruning.

    The result (``e`` and the lexicographically smallest minimising tuple) does
    not depend on thread count or on where a resumed search was interrupted.
    Raises :class:`BudgetExceededError` carrying a non-certified partial
    certificate when ``time_budget`` seconds or ``tuple_budget`` covered tuples
    run out.
    """
    t0 = time.perf_counter()
    mod, spec = _check_instance(x, m, j)
    x, mm, j = int(x), mod.m, int(j)

    if j == 1:
        best = None
        for dom in spec.groups:
            for b in dom:
                h = int(b == x)
                if best is None or (h, (b,)) < best:
                    best = (h, (b,))
        return Certificate(x=x, m=mm, j=j, e=best[0], witness_tuple=best[1],
                           tuples_examined=spec.total_count,
                           elapsed_seconds=time.perf_counter() - t0)

    set_threads(threads)
    n_threads = 1
    if USE_NUMBA:
        import numba
        n_threads = numba.get_num_threads()
    q = max(len(g) for g in spec.groups)
    if state is not None:
        if (state.x, state.m, state.j) != (x, mm, j):
            raise ValueError("search state belongs to a different instance")
        p = state.prefix_len
    else:
        p = prefix_len if prefix_len is not None else _choose_prefix_len(q, mm, j, n_threads)
        state = SearchState(x=x, m=mm, j=j, prefix_len=p)
    if not 0 <= p <= j - 2:
        raise ValueError(f"prefix length {p} outside [0, {j - 2}]")

    parts = _partitions(spec, p)
    per_part = [len(spec.groups[g]) ** (j - p) for g, _ in parts]
    shared = np.array([kernels.INF_HITS], dtype=np.int64)
    for rec in state.done.values():
        shared[0] = min(shared[0], rec[0])

    todo = [k for k in range(len(parts)) if k not in state.done]
    batch = max(1, 4 * n_threads) if USE_NUMBA else 1
    covered = sum(per_part[k] for k in state.done)
    exhausted = None
    for start in range(0, len(todo), batch):
        if time_budget is not None and time.perf_counter() - t0 > time_budget:
            exhausted = f"time budget of {time_budget} s"
            break
        if tuple_budget is not None and covered >= tuple_budget:
            exhausted = f"tuple budget of {tuple_budget}"
            break
        chunk = todo[start:start + batch]
        by_group = {}
        for k in chunk:
            by_group.setdefault(parts[k][0], []).append(k)
        for g, ks in by_group.items():
            prefixes = np.array([parts[k][1] for k in ks], dtype=np.int64).reshape(len(ks), p)
            es, ws, leaves = kernels.search_partitions(
                np.array(spec.groups[g], dtype=np.int64), prefixes, mm, x, j, shared,
                parallel=n_threads > 1)
            for k, e, w, lv in zip(ks, es, ws, leaves):
                state.done[k] = [int(e), [int(v) for v in w], int(lv)]
                covered += per_part[k]
        if checkpoint is not None:
            state.save(checkpoint)

    results = [(rec[0], tuple(rec[1])) for rec in state.done.values()
               if rec[0] != kernels.INF_HITS]
    e, witness = min(results) if results else (None, ())
    examined = sum(rec[2] for rec in state.done.values())
    elapsed = time.perf_counter() - t0
    if exhausted is not None:
        partial = Certificate(x=x, m=mm, j=j, e=e if e is not None else row_count(j),
                              witness_tuple=witness, tuples_examined=examined,
                              elapsed_seconds=elapsed, certified=False)
        raise BudgetExceededError(
            f"search for e_(x={x}, m={mm}, j={j}) stopped: {exhausted} exceeded "
            f"after {covered} of {spec.total_count} tuples; e <= {partial.e} (not certified)",
            partial=partial)
    return Certificate(x=x, m=mm, j=j, e=e, witness_tuple=witness,
                       tuples_examined=examined, elapsed_seconds=elapsed)


def iter_admissible(spec: AdmissibleTupleSpec):
    """All admissible tuples in lexicographic order."""
    merged = sorted(set().union(*spec.groups))
    for tup in itertools.product(merged, repeat=spec.j):
        if spec.contains(tup):
            yield tup


def naive_min_hits(x, m, j) -> Certificate:
    """Flat enumeration with explicit dot products against the coefficient
    table. No prefix sharing, no pruning; small instances only."""
    t0 = time.perf_counter()
    mod, spec = _check_instance(x, m, j)
    x, mm, j = int(x), mod.m, int(j)
    if spec.total_count * row_count(j) > NAIVE_CAP:
        raise CapacityError(
            f"naive enumeration of {spec.total_count} tuples x {row_count(j)} rows "
            f"exceeds {NAIVE_CAP}")
    coeffs = build_coefficient_table(j).reduced(mm)
    best = None
    examined = 0
    it = iter_admissible(spec)
    while True:
        chunk = list(itertools.islice(it, 4096))
        if not chunk:
            break
        tuples = np.array(chunk, dtype=np.int64)
        values = (tuples @ coeffs.T) % mm
        hits = (values == x).sum(axis=1)
        k = int(np.argmin(hits))
        examined += len(chunk)
        if best is None or hits[k] < best[0]:
            best = (int(hits[k]), chunk[k])
    return Certificate(x=x, m=mm, j=j, e=best[0], witness_tuple=best[1],
                       tuples_examined=examined,
                       elapsed_seconds=time.perf_counter() - t0, engine="naive")


def witness_hits(cert: Certificate, table: CoefficientTable | None = None) -> int:
    table = table or build_coefficient_table(cert.j)
    values = table.evaluate_mod(cert.witness_tuple, cert.m)
    return int((values == cert.x % cert.m).sum())


def verify_certificate(cert: Certificate) -> LemmaVerdict:
    """Re-evaluate the witness against a freshly built coefficient table."""
    spec = admissible_tuples(cert.m, cert.j)
    problems = []
    if len(cert.witness_tuple) != cert.j:
        problems.append("witness length differs from j")
    elif not spec.contains(cert.witness_tuple):
        problems.append("witness tuple is not admissible")
    else:
        got = witness_hits(cert)
        if got != cert.e:
            problems.append(f"witness yields {got} hits, certificate says {cert.e}")
    if not cert.certified:
        problems.append("certificate is marked partial")
    lid = f"certificate(x={cert.x},m={cert.m},j={cert.j})"
    if problems:
        return LemmaVerdict(lid, (1, cert.j), "fail", tuple(cert.witness_tuple),
                            "; ".join(problems))
    return LemmaVerdict(lid, (1, cert.j), "pass")


def density_bound(cert: Certificate) -> Fraction:
    if not cert.certified:
        raise ValueError("partial certificates do not bound the density")
    return Fraction(cert.e, cert.denominator)


def bound_curve(cert: Certificate, n) -> float:
    """Lower bound on the count of k <= n with a_k = x (mod m) implied by the
    certificate (natural logarithms)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    e, j = cert.e, cert.j
    return (e / cert.denominator) * n - (3 * e / (j * math.log(2))) * math.log(n) - e


def truncate_decimal(q: Fraction, digits: int) -> str:
    """``q`` truncated (not rounded) to ``digits`` decimals, as a string."""
    q = Fraction(q)
    scaled = (q.numerator * 10**digits) // q.denominator
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


# --------------------------------------------------------------------------
# window-set structure in the actual sequence
# --------------------------------------------------------------------------

def window_intervals(n: int, j: int) -> np.ndarray:
    """Index runs ``[2^i k + 1, 2^i k + 2^i - 1]`` of every window set that
    fits below ``n``, as rows ``(w, k, i, lo, hi)``."""
    n, j = int(n), int(j)
    levels = (n.bit_length() - 1) // j
    rows = []
    for w in range(1, levels + 1):
        k_lo = max(1, -(-n // 2 ** (j * w + 1)))
        k_hi = n // 2 ** (j * w) - 1
        if k_hi < k_lo:
            continue
        ks = np.arange(k_lo, k_hi + 1, dtype=np.int64)
        for i in range(1, j + 1):
            block = np.empty((ks.size, 5), dtype=np.int64)
            block[:, 0] = w
            block[:, 1] = ks
            block[:, 2] = i
            block[:, 3] = 2**i * ks + 1
            block[:, 4] = 2**i * ks + 2**i - 1
            rows.append(block)
    if not rows:
        return np.zeros((0, 5), dtype=np.int64)
    return np.concatenate(rows)


def verify_window_disjoint(n: int, j: int) -> LemmaVerdict:
    if n < 8:
        raise ValueError("n must be >= 8")
    iv = window_intervals(n, j)
    lid = f"window_disjoint(j={j})"
    if iv.shape[0] == 0:
        return LemmaVerdict(lid, (1, n), "pass", detail="no windows")
    out = (iv[:, 3] < 3) | (iv[:, 4] > n)
    if out.any():
        r = iv[int(np.flatnonzero(out)[0])]
        return LemmaVerdict(lid, (1, n), "fail", tuple(int(v) for v in r[:3]),
                            "interval leaves [3, n]")
    order = np.argsort(iv[:, 3], kind="stable")
    s = iv[order]
    clash = s[1:, 3] <= s[:-1, 4]
    if clash.any():
        r = s[int(np.flatnonzero(clash)[0]) + 1]
        return LemmaVerdict(lid, (1, n), "fail", tuple(int(v) for v in r[:3]),
                            "overlapping intervals")
    return LemmaVerdict(lid, (1, n), "pass", detail=f"{iv.shape[0]} intervals")


def empirical_window_check(cert: Certificate, N: int,
                           table: ResidueTable | None = None) -> LemmaVerdict:
    """Every window set fully inside ``[1, N]`` has an admissible base tuple
    and at least ``cert.e`` elements congruent to ``cert.x``."""
    j, mm, x = cert.j, cert.m, cert.x
    if table is None or table.modulus.m != mm or table.limit < N:
        table = residue_stream(mm, N)
    lid = f"empirical_window(x={x},m={mm},j={j},e={cert.e})"
    k_max = (N + 1) // 2**j - 1
    if k_max < 1:
        return LemmaVerdict(lid, (1, N), "pass", detail="no complete windows")
    res = table.residues[: N + 1]
    hits_prefix = np.concatenate([[0], np.cumsum(res[1:] == x)]).astype(np.int64)
    ks = np.arange(1, k_max + 1, dtype=np.int64)
    hits = np.zeros(ks.size, dtype=np.int64)
    base = np.empty((ks.size, j), dtype=np.int64)
    for i in range(1, j + 1):
        lo = 2**i * ks + 1
        hi = 2**i * ks + 2**i - 1
        hits += hits_prefix[hi] - hits_prefix[lo - 1]
        base[:, i - 1] = res[lo]
    bad = hits < cert.e
    if mm % 2 == 0:
        bad |= (base % 2 == 0).any(axis=1)
    if mm % 4 == 0:
        bad |= ((base % 4) != (base[:, :1] % 4)).any(axis=1)
    idx = np.flatnonzero(bad)
    if idx.size:
        k = int(ks[idx[0]])
        return LemmaVerdict(lid, (1, N), "fail", (k,),
                            f"window k={k}: {int(hits[idx[0]])} hits, base {base[idx[0]].tolist()}")
    return LemmaVerdict(lid, (1, N), "pass", detail=f"{ks.size} windows")
