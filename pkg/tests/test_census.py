import csv
import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from seqlab.census import (CSV_HEADER, census_from_table, deviation_scan, mod8_bound_check,
                           predicted_density, run_census, to_csv)
from seqlab.errors import UnsupportedModulusError
from seqlab.seqcore import residue_stream, two_adic_valuations


def test_mod2_small_counts(seq10k):
    rep = run_census(2, 10)
    assert rep.counts[0] == 4
    assert [n for n in range(1, 11) if seq10k[n] % 2 == 0] == [2, 6, 8, 10]


def test_mod4_zero_class_empty():
    assert run_census(4, 10_000).counts[0] == 0


def test_mod2_density_near_third():
    rep = run_census(2, 10**6)
    assert abs(rep.counts[0] / 10**6 - 1 / 3) < 0.01


@pytest.mark.parametrize("x, m, expected", [
    (1, 8, Fraction(1, 6)),
    (0, 4, Fraction(0)),
    (0, 2, Fraction(1, 3)),
    (2, 5, Fraction(1, 5)),
    (1, 2, Fraction(2, 3)),
    (3, 6, Fraction(2, 9)),
    (2, 6, Fraction(1, 9)),
    (4, 12, Fraction(0)),
    (6, 12, Fraction(1, 9)),
])
def test_predicted_density(x, m, expected):
    assert predicted_density(x, m) == expected


@pytest.mark.parametrize("m", [2, 3, 4, 6, 8, 10, 12, 15, 16, 20, 48, 100])
def test_predicted_densities_sum_to_one(m):
    assert sum(predicted_density(x, m) for x in range(m)) == 1


def test_predicted_density_refuses_32():
    with pytest.raises(UnsupportedModulusError):
        predicted_density(1, 32)
    with pytest.raises(UnsupportedModulusError):
        predicted_density(0, 96)


def test_totals_and_parity_consistency():
    N = 123_457
    rep = run_census(2, N)
    assert sum(rep.counts.values()) == N
    v = two_adic_valuations(N)[1:]
    assert rep.counts[0] == int((v % 2 == 1).sum())


def test_mod8_densities():
    rep = run_census(8, 10**6)
    for x in (1, 2, 3, 5, 6, 7):
        assert abs(rep.empirical_density[x] - 1 / 6) < 0.01
    assert rep.counts[0] == rep.counts[4] == 0


def test_report_for_32_has_no_predictions():
    rep = run_census(32, 1000)
    assert rep.predicted == {} and rep.deviation == {}


@pytest.mark.parametrize("N", [1, 63, 10**6])
def test_mod8_bound(N):
    res = mod8_bound_check(N)
    assert res.passed and res.first_violation is None


def test_mod8_bound_detects_violation():
    # a forged table with class 1 missing entirely must be caught
    t = residue_stream(8, 5000)
    forged = t.residues.copy()
    forged[forged == 1] = 3
    forged.flags.writeable = False
    fake = type(t)(modulus=t.modulus, limit=t.limit, residues=forged)
    res = mod8_bound_check(5000, fake)
    assert not res.passed
    n, x = res.first_violation
    assert x == 1 and n / 6 - 2 * math.log(n) - 11 >= 0


def test_scan_small_is_well_formed():
    res = deviation_scan(4, 1)
    assert [r.modulus.m for r in sorted(res.reports, key=lambda r: r.modulus.m)] == [2, 3, 4]
    for r in res.reports:
        assert sum(r.counts.values()) == 1 and r.counts[1] == 1


def test_scan_sorted_and_within_threshold():
    res = deviation_scan(8, 10**6)
    worst = [r.max_abs_deviation for r in res.reports]
    assert worst == sorted(worst, reverse=True)
    assert res.passed and res.worst < 0.01


def test_scan_skips_multiples_of_32():
    res = deviation_scan(33, 100)
    assert res.skipped == [32]
    assert 32 not in [r.modulus.m for r in res.reports]


def test_scan_thread_count_independent():
    a = deviation_scan(12, 20_000, threads=1)
    b = deviation_scan(12, 20_000, threads=4)
    assert [r.to_json() for r in a.reports] == [r.to_json() for r in b.reports]


def test_csv_export():
    rep = run_census(8, 1000)
    rows = list(csv.reader(io.StringIO(to_csv([rep]))))
    assert rows[0] == CSV_HEADER == ["m", "x", "count", "N", "empirical", "predicted", "deviation"]
    assert len(rows) == 9
    assert sum(int(r[2]) for r in rows[1:]) == 1000


def test_json_export_mirrors_fields():
    rep = census_from_table(residue_stream(6, 999))
    data = json.loads(json.dumps(rep.to_json()))
    assert data["modulus"] == 6 and data["limit"] == 999
    assert sum(data["counts"].values()) == 999
    assert data["predicted"]["1"] == "2/9"


def test_relative_deviation_zero_prediction():
    rep = run_census(4, 1000)
    assert rep.relative_deviation[0] == 0.0
