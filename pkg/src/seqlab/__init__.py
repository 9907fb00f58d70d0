"""Congruences and growth of a_1 = 1, a_n = a_{n-1} + a_{floor(n/2)}."""

__version__ = "0.1.0"

from seqlab.census import (CensusReport, deviation_scan, mod8_bound_check,  # noqa: E402
                           predicted_density, run_census)
from seqlab.certify import (AdmissibleTupleSpec, Certificate, CoefficientTable,  # noqa: E402
                            admissible_tuples, bound_curve, build_coefficient_table,
                            density_bound, empirical_window_check, naive_min_hits,
                            search_min_hits, verify_certificate, verify_window_disjoint)
from seqlab.growth import (GrowthParams, GrowthRecord, UpperBoundProbe,  # noqa: E402
                           analytic_lemma_suite, growth_lower_check, upper_probe)
from seqlab.seqcore import (ExactPrefix, Modulus, ResidueTable, exact_prefix,  # noqa: E402
                            parity_predict, residue_stream, two_adic_valuation)
from seqlab.structure import (verify_even_quadruples, verify_odd_quadruples,  # noqa: E402
                              verify_parity_lemma, verify_quadrupling, verify_scaled_sets)
from seqlab.verdict import LemmaVerdict  # noqa: E402
