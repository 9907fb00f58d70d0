"""Growth of a_n against n^{f(n)}, f(n) = c1 ln n - 2 c1 ln ln n + c2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from seqlab.errors import SeqlabError
from seqlab.seqcore import ExactPrefix, exact_prefix
from seqlab.verdict import LemmaVerdict

C1 = 1 / (2 * math.log(2))
C2 = 0.5 + (1 + math.log(math.log(2))) / math.log(2)

LN2_LD = np.log(np.longdouble(2))
_LD_EPS = float(np.finfo(np.longdouble).eps)


class PrecisionExhaustedError(SeqlabError):
    pass


@dataclass(frozen=True)
class GrowthParams:
    c1: float = C1
    c2: float = C2

    def f(self, n):
        ln = np.log(n)
        return self.c1 * ln - 2 * self.c1 * np.log(ln) + self.c2


@dataclass(frozen=True)
class GrowthRecord:
    n: int
    log_a_n: float
    threshold: float
    margin: float
    error_bound: float
    verdict: str  # pass | fail | indeterminate

    def row(self) -> dict:
        return {"n": self.n, "log_a_n": self.log_a_n, "threshold": self.threshold,
                "margin": self.margin, "verdict": self.verdict}


def _split(a: int, width: int):
    """(top, shift) with a = top * 2^shift + rest, top < 2^width."""
    shift = max(0, a.bit_length() - width)
    return a >> shift, shift


def _fast_pass(values, ns):
    """Vectorised first pass in long double from the top 53 bits of a_n."""
    tops = np.empty(len(ns), dtype=np.longdouble)
    shifts = np.empty(len(ns), dtype=np.longdouble)
    exact = np.empty(len(ns), dtype=bool)
    for k, n in enumerate(ns):
        top, shift = _split(values[n], 53)
        tops[k] = top
        shifts[k] = shift
        exact[k] = shift == 0
    ln_lo = np.log(tops) + shifts * LN2_LD
    ln_hi = np.where(exact, ln_lo, np.log(tops + 1) + shifts * LN2_LD)
    n_ld = np.asarray(ns, dtype=np.longdouble)
    ln_n = np.log(n_ld)
    c1 = np.longdouble(1) / (2 * LN2_LD)
    c2 = np.longdouble(0.5) + (1 + np.log(LN2_LD)) / LN2_LD
    thr = (c1 * ln_n - 2 * c1 * np.log(ln_n) + c2) * ln_n
    # truncation of a_n plus generous rounding slack for ~10 long-double ops
    err = (ln_hi - ln_lo) + 64 * _LD_EPS * (np.abs(ln_lo) + np.abs(thr) + 1)
    return ln_lo, thr, err


def _exact_record(a: int, n: int, width: int) -> GrowthRecord:
    prec = 2 * width
    with mpmath.workprec(prec):
        top, shift = _split(a, width)
        ln2 = mpmath.log(2)
        lo = mpmath.log(top) + shift * ln2
        hi = lo if shift == 0 else mpmath.log(top + 1) + shift * ln2
        ln_n = mpmath.log(n)
        c1 = 1 / (2 * ln2)
        c2 = mpmath.mpf(1) / 2 + (1 + mpmath.log(ln2)) / ln2
        thr = (c1 * ln_n - 2 * c1 * mpmath.log(ln_n) + c2) * ln_n
        err = (hi - lo) + mpmath.mpf(2) ** (10 - prec) * (abs(lo) + abs(thr) + 1)
        margin = lo - thr
        if margin > err:
            v = "pass"
        elif hi - thr < -err:
            v = "fail"
        else:
            v = "indeterminate"
        return GrowthRecord(n, float(lo), float(thr), float(margin), float(err), v)


def growth_lower_check(start: int, stop: int, prefix: ExactPrefix | None = None,
                       max_width: int = 1024) -> list:
    """Decide a_n > n^{f(n)} for every start <= n <= stop.

    A first vectorised pass settles almost everything; records whose margin
    is within the error bound are redone with wider mantissas until decided.
    """
    if not 2 <= start <= stop:
        raise ValueError("need 2 <= start <= stop")
    if prefix is None or prefix.limit < stop:
        prefix = exact_prefix(stop)
    ns = np.arange(start, stop + 1)
    ln_a, thr, err = _fast_pass(prefix.values, ns)
    margin = ln_a - thr
    out = []
    for k, n in enumerate(ns):
        n = int(n)
        if abs(margin[k]) > err[k]:
            out.append(GrowthRecord(n, float(ln_a[k]), float(thr[k]), float(margin[k]),
                                    float(err[k]), "pass" if margin[k] > 0 else "fail"))
            continue
        width = 64
        while True:
            rec = _exact_record(prefix.values[n], n, width)
            if rec.verdict != "indeterminate":
                break
            width *= 2
            if width > max_width:
                raise PrecisionExhaustedError(f"n={n} undecided at {max_width}-bit mantissa")
        out.append(rec)
    return out


def failing_set(records) -> list:
    return [r.n for r in records if r.verdict == "fail"]


@dataclass(frozen=True)
class UpperBoundProbe:
    epsilon: float
    limit: int
    c_observed: float  # log of max a_n / n^{f(n)+eps}
    argmax_n: int
    stopped_growing: bool  # max attained outside the last decade (N/10, N]


def _log_a(values, ns) -> np.ndarray:
    out = np.empty(len(ns))
    for k, n in enumerate(ns):
        top, shift = _split(values[n], 53)
        out[k] = math.log(top) + shift * math.log(2)
    return out


def upper_probe(epsilon: float, N: int, prefix: ExactPrefix | None = None) -> UpperBoundProbe:
    """Running max of ln a_n - (f(n) + eps) ln n over 2 <= n <= N.

    Evidence that a_n / n^{f(n)+eps} stays bounded, not a proof.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if N < 2:
        raise ValueError("N must be >= 2")
    if prefix is None or prefix.limit < N:
        prefix = exact_prefix(N)
    ns = np.arange(2, N + 1)
    ln_n = np.log(ns)
    excess = _log_a(prefix.values, ns) - (GrowthParams().f(ns) + epsilon) * ln_n
    k = int(np.argmax(excess))
    n_star = int(ns[k])
    return UpperBoundProbe(epsilon=float(epsilon), limit=int(N), c_observed=float(excess[k]),
                           argmax_n=n_star, stopped_growing=n_star <= N // 10)


# --------------------------------------------------------------------------
# the ten helper inequalities of the growth proof
# --------------------------------------------------------------------------

SLACK = 1e-9
REAL_GRID_MAX = 10**6
INT_GRID_MAX = 10**5


def _holds(lhs, rhs, slack=SLACK):
    """Elementwise lhs < rhs up to a relative slack."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), np.finfo(float).tiny)
    return lhs < rhs + slack * scale


def _grid(lo, hi, per_decade, inclusive_lo):
    n = max(2, int(math.ceil(math.log10(hi / lo) * per_decade)) + 1)
    g = np.geomspace(lo, hi, n)
    if not inclusive_lo:
        g[0] = np.nextafter(lo, np.inf) if lo > 0 else g[0]
        g = g[g > lo]
    return g


def _lemma_verdict(lemma_id, ok, labels, hi):
    bad = np.flatnonzero(~np.asarray(ok))
    if bad.size:
        first = labels[int(bad[0])]
        first = tuple(float(v) for v in np.atleast_1d(first))
        return LemmaVerdict(lemma_id, (1, hi), "fail", first)
    return LemmaVerdict(lemma_id, (1, hi), "pass", detail=f"{len(labels)} samples")


def analytic_lemma_suite(grid_density: int = 200) -> list:
    """Sample each inequality over its domain; integer-variable ones on every
    integer up to 10^5, real-variable ones on log-spaced grids up to 10^6."""
    if grid_density < 10:
        raise ValueError("grid_density must be at least 10 samples per decade")
    f = GrowthParams().f
    out = []

    x = _grid(8.0, REAL_GRID_MAX, grid_density, inclusive_lo=False)
    fx = f(x)
    out.append(_lemma_verdict("fngrows", _holds(fx[:-1], fx[1:]), x[1:], REAL_GRID_MAX))

    x = _grid(200.0, REAL_GRID_MAX, grid_density, inclusive_lo=False)
    out.append(_lemma_verdict("logbylinear", _holds(2 * C1 * np.log(x) / x, 0.05), x,
                              REAL_GRID_MAX))

    xs = _grid(1.0, REAL_GRID_MAX, grid_density, inclusive_lo=False)
    As = _grid(1e-6, REAL_GRID_MAX, grid_density, inclusive_lo=True)
    X, A = np.meshgrid(xs, As, indexing="ij")
    X, A = X.ravel(), A.ravel()
    log_xa = np.log(X) + np.log1p(A / X)
    ok = _holds(np.log(X) + A / (X + A), log_xa) & _holds(log_xa, np.log(X) + A / X)
    out.append(_lemma_verdict("basiclog", ok, np.stack([X, A], axis=1), REAL_GRID_MAX))

    x = _grid(1.0, REAL_GRID_MAX, grid_density, inclusive_lo=False)
    out.append(_lemma_verdict("taylorlog", _holds(1 / x - 1 / (2 * x * x), np.log1p(1 / x)), x,
                              REAL_GRID_MAX))

    x = _grid(0.5, REAL_GRID_MAX, grid_density, inclusive_lo=True)
    out.append(_lemma_verdict("taylore", _holds(1 - 1 / (2 * x), np.exp(-1 / (2 * x))), x,
                              REAL_GRID_MAX))

    n = np.arange(4, INT_GRID_MAX + 1, dtype=float)
    y = np.log(n / 2) / math.log(2)
    out.append(_lemma_verdict("nastylog", _holds(math.e - 1 / np.log(n), np.exp(y * np.log1p(1 / y))),
                              n, INT_GRID_MAX))

    n = np.arange(1, INT_GRID_MAX + 1, dtype=float)
    out.append(_lemma_verdict("upperbounde", _holds(math.e, np.exp((n + 1) * np.log1p(1 / n))),
                              n, INT_GRID_MAX))

    n = np.arange(2, INT_GRID_MAX + 1, dtype=float)
    half = np.log((n + 1) / 2)
    out.append(_lemma_verdict(
        "anothernastylog",
        _holds(2 * C1 * np.log(np.log(n)) - 1 / half, 2 * C1 * np.log(half)), n, INT_GRID_MAX))

    # log log (n+1) - log log n, written without cancellation
    diff = np.log1p(np.log1p(1 / n) / np.log(n))
    out.append(_lemma_verdict("basicloglog", _holds(diff, 1 / (n * np.log(n))), n, INT_GRID_MAX))

    n = np.arange(4, INT_GRID_MAX + 1, dtype=float)
    out.append(_lemma_verdict("notherone",
                              _holds(2 * C1 * (n + 2) * np.log(n + 1) / (n * np.log(n)), 3),
                              n, INT_GRID_MAX))
    return out


LEMMA_IDS = ("fngrows", "logbylinear", "basiclog", "taylorlog", "taylore", "nastylog",
             "upperbounde", "anothernastylog", "basicloglog", "notherone")
