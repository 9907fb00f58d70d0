import math

import numpy as np
import pytest

from seqlab.growth import (C1, C2, LEMMA_IDS, GrowthParams, analytic_lemma_suite,
                           failing_set, growth_lower_check, upper_probe)


def test_constants():
    assert C1 == pytest.approx(0.7213475204444817)
    assert C2 == pytest.approx(0.5 + (1 + math.log(math.log(2))) / math.log(2))


def test_f_increasing_past_e_squared():
    x = np.geomspace(8, 1e9, 2000)
    assert (np.diff(GrowthParams().f(x)) > 0).all()


def test_records_near_the_boundary(prefix_1e5):
    recs = {r.n: r for r in growth_lower_check(2, 200, prefix_1e5)}
    assert recs[10].verdict == "fail"
    assert recs[140].verdict == "fail"
    assert recs[141].verdict == "pass"
    # independent float check of the same quantities
    for n in (10, 140, 141, 200):
        f = GrowthParams().f(n)
        assert recs[n].threshold == pytest.approx(f * math.log(n), rel=1e-12)
        assert recs[n].log_a_n == pytest.approx(math.log(prefix_1e5.values[n]), rel=1e-12)


def test_failing_set_is_an_initial_segment(prefix_1e5):
    recs = growth_lower_check(2, 2000, prefix_1e5)
    assert failing_set(recs) == list(range(2, 141))


def test_range_from_141_all_pass(prefix_1e5):
    recs = growth_lower_check(141, 100_000, prefix_1e5)
    assert failing_set(recs) == []
    assert all(r.verdict == "pass" for r in recs)
    assert all(r.margin > r.error_bound for r in recs)


def test_bad_range():
    with pytest.raises(ValueError):
        growth_lower_check(1, 10)
    with pytest.raises(ValueError):
        growth_lower_check(20, 10)


def test_values_exceed_double_mantissa(prefix_1e5):
    p = prefix_1e5
    assert p.values[20_000].bit_length() > 53
    assert float(p.values[20_000]) != p.values[20_000]
    recs = growth_lower_check(19_990, 20_000, p)
    assert all(r.verdict == "pass" for r in recs)


def test_probe_monotone_in_epsilon(prefix_1e5):
    probes = [upper_probe(e, 20_000, prefix_1e5) for e in (0.05, 0.1, 0.5, 1.0)]
    cs = [p.c_observed for p in probes]
    assert all(a >= b for a, b in zip(cs, cs[1:]))
    assert probes[-1].stopped_growing and probes[-1].argmax_n <= 2000


def test_probe_rejects_bad_input():
    with pytest.raises(ValueError):
        upper_probe(0, 100)
    with pytest.raises(ValueError):
        upper_probe(0.5, 1)


def test_analytic_lemmas_pass():
    verdicts = analytic_lemma_suite(grid_density=50)
    assert tuple(v.lemma_id for v in verdicts) == LEMMA_IDS
    assert all(v.passed for v in verdicts), [v for v in verdicts if not v.passed]
    assert all(isinstance(v.range_checked[1], int) for v in verdicts)


def test_spot_values():
    assert 2 * C1 * math.log(201) / 201 == pytest.approx(0.0381, abs=1e-4)
    n = 4
    assert 2 * C1 * (n + 2) * math.log(n + 1) / (n * math.log(n)) == pytest.approx(2.512, abs=1e-3)


def test_grid_density_floor():
    with pytest.raises(ValueError):
        analytic_lemma_suite(grid_density=5)
