"""Shifted-series tests against independently coded summation loops.

Every series evaluator is checked against a brute-force loop working
from the raw integer coefficients with scalar arithmetic (no shared
vectorization), the identity checks are exercised at the contract
tolerances, and the certified tail bounds are tested both ways: they
must bracket refinements and they must raise honestly when asked to
certify more than they can.  The expensive spectral comparisons run at
a reduced quadrature budget here; the full-precision runs live in the
acceptance suite.
"""

import cmath
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sslab._mellin import log_gamma
from sslab.config import DEFAULT_PRECISION, PrecisionConfig
from sslab.errors import AccuracyError, DomainError
from sslab.modforms import (
    CoefficientTable,
    divisor_sigma,
    eigenform_coefficients,
    maass_load,
)
from sslab.shifted_sums import (
    RearrangementReport,
    SeriesValue,
    ShiftedSeriesSpec,
    ZSpec,
    _binom_coeffs,
    _gamma_pair,
    _smoothing_factor,
    _square_divisor_tail,
    beta_contour_identity,
    d_minus_spectral,
    d_plus_smoothed,
    d_series,
    finite_shift_contour_check,
    rearrangement_check,
    unfolding_check,
    z_plus_truncated,
)

DATA = Path(__file__).parent / "data"

# Reduced quadrature budget for the 2D inner products; accuracy checks
# at this budget use tolerances an order looser than the acceptance runs.
CHEAP = PrecisionConfig(rel_tol=1e-4, quad_points=16)


# ---------------------------------------------------------------------------
# test-local oracles
# ---------------------------------------------------------------------------

def _divisor_count(n: int) -> int:
    c = 0
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            c += 2 - (d * d == n)
    return c


def _brute_minus(raw1, raw2, k, s, h, n_max):
    # a1(m-h) a2(m) / m^(s+k-1) with scalar arithmetic on raw integers.
    return math.fsum(raw1[m - h - 1] * raw2[m - 1] * m ** float(-(s + k - 1))
                     for m in range(h + 1, n_max + 1))


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _synthetic_table(weight, raw):
    n = np.arange(1, len(raw) + 1, dtype=np.float64)
    return CoefficientTable(weight=weight, length=len(raw), raw=tuple(raw),
                            normalized=np.asarray(raw, dtype=np.float64)
                            / n ** ((weight - 1) / 2.0))


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def delta_table() -> CoefficientTable:
    return eigenform_coefficients(12, 200000)


@pytest.fixture(scope="module")
def maass_forms() -> dict:
    return {
        "even_t13": maass_load(DATA / "maass_even_t13.dat"),
        "odd_t9": maass_load(DATA / "maass_odd_t9.dat"),
        "even_t17": maass_load(DATA / "maass_even_t17.dat"),
    }


@pytest.fixture(scope="module")
def spectral_runs(delta_table, maass_forms):
    """One reduced-budget spectral evaluation with and without dataset."""
    dataset = [maass_forms["even_t13"], maass_forms["odd_t9"],
               maass_forms["even_t17"]]
    full = d_minus_spectral(delta_table, delta_table, 2.0, 1, dataset,
                            CHEAP, return_parts=True)
    empty = d_minus_spectral(delta_table, delta_table, 2.0, 1, [],
                             CHEAP, enforce_reach=False, return_parts=True)
    return full, empty


@pytest.fixture(scope="module")
def unfolding_pair(delta_table):
    return unfolding_check(delta_table, delta_table, 3.0, 1,
                           CHEAP, window=30.0)


# ---------------------------------------------------------------------------
# spec validation
# ---------------------------------------------------------------------------

def test_spec_rejects_bad_kind(delta_table):
    with pytest.raises(DomainError, match="kind"):
        ShiftedSeriesSpec("times", delta_table, 0.0, 3.0, 1, 10)


def test_spec_rejects_bad_shift(delta_table):
    with pytest.raises(DomainError, match="positive"):
        ShiftedSeriesSpec("minus", delta_table, 0.0, 3.0, 0, 10)


def test_spec_rejects_plus_with_table_right(delta_table):
    with pytest.raises(DomainError, match="plus kind"):
        ShiftedSeriesSpec("plus", delta_table, delta_table, 3.0, 1, 10)


def test_spec_rejects_weight_mismatch(delta_table):
    other = eigenform_coefficients(16, 64)
    with pytest.raises(DomainError, match="weight"):
        ShiftedSeriesSpec("minus", delta_table, other, 3.0, 1, 10)


def test_spec_coerces_divisor_parameter(delta_table):
    spec = ShiftedSeriesSpec("plus", delta_table, 0.3, 3.0, 1, 10)
    assert spec.right == 0.3 + 0.0j
    assert isinstance(spec.right, complex)


def test_zspec_rejects_table_right(delta_table):
    with pytest.raises(DomainError, match="Maass form or divisor"):
        ZSpec(delta_table, delta_table, 3.0, 3.0, 10)


def test_zspec_w2_derivation(delta_table, maass_forms):
    spec = ZSpec(delta_table, maass_forms["even_t13"], 2.0, 3.0, 10)
    assert spec.w2 == 2.0 + 3.0 + 6.0 - 1.0


# ---------------------------------------------------------------------------
# d_series against brute loops
# ---------------------------------------------------------------------------

def test_minus_series_matches_brute_loop(delta_table):
    spec = ShiftedSeriesSpec("minus", delta_table, delta_table, 3.0, 1, 4000)
    got = d_series(spec)
    want = _brute_minus(delta_table.raw, delta_table.raw, 12, 3.0, 1, 4000)
    assert _rel(complex(got), want) < 1e-12


def test_minus_series_brute_at_larger_shift(delta_table):
    spec = ShiftedSeriesSpec("minus", delta_table, delta_table, 2.5, 7, 3000)
    got = d_series(spec)
    want = _brute_minus(delta_table.raw, delta_table.raw, 12, 2.5, 7, 3000)
    assert _rel(complex(got), want) < 1e-12


def test_minus_series_empty_range_is_zero(delta_table):
    spec = ShiftedSeriesSpec("minus", delta_table, delta_table, 3.0, 50, 50)
    got = d_series(spec)
    assert complex(got) == 0j
    assert got.tail_bound > 0.0


def test_plus_divisor_u0_matches_assembly(delta_table):
    # definition unfolding: weight d(m) assembled from divisor_sigma
    spec = ShiftedSeriesSpec("plus", delta_table, 0.0, 3.0, 1, 2000)
    got = d_series(spec)
    want = math.fsum(
        delta_table.raw[m + 1 - 1] * divisor_sigma(0.0, m).real
        * m ** -8.5 for m in range(1, 2001))
    assert _rel(complex(got), want) < 1e-12


def test_plus_divisor_complex_u_matches_loop(delta_table):
    u = 0.2 + 0.1j
    spec = ShiftedSeriesSpec("plus", delta_table, u, 3.0, 2, 300)
    got = d_series(spec)
    want = 0j
    for m in range(1, 301):
        tau = divisor_sigma(2.0 * u, m) * cmath.exp(-u * math.log(m))
        want += delta_table.raw[m + 2 - 1] * tau.conjugate() \
            * cmath.exp(-8.5 * math.log(m))
    assert _rel(complex(got), want) < 1e-12


def test_minus_maass_right_matches_loop(delta_table, maass_forms):
    form = maass_forms["even_t13"]
    spec = ShiftedSeriesSpec("minus", delta_table, form, 3.0, 1, 22)
    got = d_series(spec)
    want = math.fsum(
        delta_table.normalized[m - 1 - 1] * form.lam[m - 1]
        * (1.0 - 1.0 / m) ** 5.5 * m ** -3.0 for m in range(2, 23))
    assert _rel(complex(got), want) < 1e-13


def test_maass_right_data_cap_raises(delta_table, maass_forms):
    spec = ShiftedSeriesSpec("minus", delta_table, maass_forms["even_t13"],
                             3.0, 1, 50)
    with pytest.raises(DomainError, match="stops at m = 22"):
        d_series(spec)


def test_left_table_too_short_raises(delta_table):
    short = _synthetic_table(12, list(delta_table.raw[:64]))
    with pytest.raises(DomainError, match="left table"):
        d_series(ShiftedSeriesSpec("minus", short, 0.0, 3.0, 1, 200))


def test_effective_abscissa_guard(delta_table, maass_forms):
    # Re s = 1.05 loses 7/64 to the Maass coefficient growth
    spec = ShiftedSeriesSpec("minus", delta_table, maass_forms["even_t13"],
                             1.05, 1, 22)
    with pytest.raises(DomainError, match="abscissa"):
        d_series(spec)


# ---------------------------------------------------------------------------
# certified tails
# ---------------------------------------------------------------------------

def test_square_divisor_tail_dominates_true_tail():
    # the certified bound must sit above a directly computed partial tail
    direct = math.fsum(_divisor_count(m) ** 2 * m ** -3.0
                       for m in range(101, 40000))
    assert _square_divisor_tail(100, 3.0) >= direct


def test_certify_passes_with_generous_truncation(delta_table):
    spec = ShiftedSeriesSpec("minus", delta_table, delta_table, 3.0, 1,
                             200000)
    got = d_series(spec, DEFAULT_PRECISION.relaxed(1e-4), certify=True)
    assert got.tail_bound < 1e-4 * abs(complex(got))


def test_certify_raises_with_suggestion(delta_table):
    spec = ShiftedSeriesSpec("minus", delta_table, delta_table, 3.0, 1, 2000)
    with pytest.raises(AccuracyError) as exc:
        d_series(spec, DEFAULT_PRECISION.relaxed(1e-4), certify=True)
    assert exc.value.achieved > exc.value.requested
    assert "n_max" in exc.value.suggestion


def test_tail_brackets_doubling_minus(delta_table):
    lo = d_series(ShiftedSeriesSpec("minus", delta_table, delta_table,
                                    2.2, 1, 1000))
    hi = d_series(ShiftedSeriesSpec("minus", delta_table, delta_table,
                                    2.2, 1, 2000))
    assert abs(complex(hi) - complex(lo)) <= lo.tail_bound


def test_tail_brackets_doubling_plus(delta_table):
    lo = d_series(ShiftedSeriesSpec("plus", delta_table, 0.0, 3.0, 3, 500))
    hi = d_series(ShiftedSeriesSpec("plus", delta_table, 0.0, 3.0, 3, 1000))
    assert abs(complex(hi) - complex(lo)) <= lo.tail_bound


def test_series_value_carries_bound(delta_table):
    got = d_series(ShiftedSeriesSpec("minus", delta_table, delta_table,
                                     3.0, 1, 100))
    assert isinstance(got, SeriesValue)
    assert isinstance(got + 0j, complex)
    assert "tail_bound" in repr(got)


# ---------------------------------------------------------------------------
# linearity and conjugation
# ---------------------------------------------------------------------------

@given(st.lists(st.integers(-9, 9), min_size=40, max_size=40),
       st.lists(st.integers(-9, 9), min_size=40, max_size=40))
@settings(max_examples=25, deadline=None)
def test_linearity_in_left_table(raw1, raw2):
    raw1[0], raw2[0] = 1, 1
    t1 = _synthetic_table(12, raw1)
    t2 = _synthetic_table(12, raw2)
    tsum = _synthetic_table(12, [a + b for a, b in zip(raw1, raw2)])
    va = complex(d_series(ShiftedSeriesSpec("plus", t1, 0.0, 2.5, 2, 38)))
    vb = complex(d_series(ShiftedSeriesSpec("plus", t2, 0.0, 2.5, 2, 38)))
    vs = complex(d_series(ShiftedSeriesSpec("plus", tsum, 0.0, 2.5, 2, 38)))
    assert abs(vs - (va + vb)) <= 1e-12 * (1.0 + abs(va) + abs(vb))


@given(st.floats(1.35, 4.0), st.floats(-3.0, 3.0))
@settings(max_examples=25, deadline=None)
def test_conjugation_symmetry(sigma, tau):
    tab = eigenform_coefficients(12, 600)
    s = complex(sigma, tau)
    a = complex(d_series(ShiftedSeriesSpec("minus", tab, tab, s, 1, 500)))
    b = complex(d_series(ShiftedSeriesSpec("minus", tab, tab,
                                           s.conjugate(), 1, 500)))
    assert abs(a.conjugate() - b) <= 1e-13 * max(abs(a), 1e-30)


# ---------------------------------------------------------------------------
# smoothed plus series
# ---------------------------------------------------------------------------

def test_smoothed_delta_zero_is_exact(delta_table, maass_forms):
    form = maass_forms["even_t13"]
    base = d_series(ShiftedSeriesSpec("plus", delta_table, form, 3.0, 1, 22))
    v0 = d_plus_smoothed(delta_table, form, 3.0, 1, 0.0, 22)
    assert complex(v0) == complex(base)


def test_smoothed_ladder_converges_linearly(delta_table, maass_forms):
    form = maass_forms["even_t13"]
    base = complex(d_series(ShiftedSeriesSpec("plus", delta_table, form,
                                              3.0, 1, 22)))
    gaps = [abs(complex(d_plus_smoothed(delta_table, form, 3.0, 1, d, 22))
                - base) for d in (1e-2, 1e-3, 1e-4)]
    assert gaps[0] > gaps[1] > gaps[2]
    for a, b in zip(gaps, gaps[1:]):
        assert 7.0 < a / b < 13.0


def test_smoothing_factor_tends_to_one(maass_forms):
    # far above the smoothing scale the damping is gone
    form = maass_forms["even_t13"]
    for delta in (1e-2, 1e-3):
        m = int(1e6 / delta)
        f = _smoothing_factor(3.0, 12, form.t, 1, delta, m,
                              DEFAULT_PRECISION)
        assert abs(f - 1.0) < 1e-8


def test_smoothed_rejects_bad_delta(delta_table, maass_forms):
    with pytest.raises(DomainError, match="delta"):
        d_plus_smoothed(delta_table, maass_forms["even_t13"],
                        3.0, 1, 1.5, 22)


# ---------------------------------------------------------------------------
# spectral expansion
# ---------------------------------------------------------------------------

def test_spectral_matches_series_at_reduced_budget(spectral_runs,
                                                   delta_table):
    full, _ = spectral_runs
    ref = complex(d_series(ShiftedSeriesSpec("minus", delta_table,
                                             delta_table, 2.0, 1, 200000)))
    assert _rel(full.total, ref) < 5e-4


def test_spectral_parts_are_additive(spectral_runs):
    full, empty = spectral_runs
    assembled = full.prefactor * (sum(full.discrete_terms)
                                  + full.continuous)
    assert _rel(full.total, assembled) < 1e-14
    # empty dataset reports exactly the continuous part; the residual
    # against the full run recomputes the discrete sum
    assert _rel(empty.total, empty.prefactor * empty.continuous) < 1e-14
    discrete_recomputed = full.total - empty.total
    assert _rel(discrete_recomputed,
                full.prefactor * sum(full.discrete_terms)) < 1e-9


def test_spectral_odd_form_contributes_nothing(spectral_runs):
    full, _ = spectral_runs
    odd_term = full.discrete_terms[1]
    assert abs(odd_term) < 1e-12 * abs(full.continuous)


def test_spectral_even_terms_decay_in_eigenvalue(spectral_runs):
    full, _ = spectral_runs
    t13_term, t17_term = full.discrete_terms[0], full.discrete_terms[2]
    assert abs(t17_term) < abs(t13_term)
    # the decay is driven by the paired gamma factors at e^(-pi t) scale
    ratio = abs(_gamma_pair(2.0, 17.7385633898118)
                / _gamma_pair(2.0, 13.779751351891))
    assert ratio < math.exp(-2.5 * (17.7385633898118 - 13.779751351891))


def test_spectral_reach_error_on_empty_dataset(delta_table):
    with pytest.raises(AccuracyError, match="envelope"):
        d_minus_spectral(delta_table, delta_table, 2.0, 1, [], CHEAP)


def test_spectral_shift_beyond_data_raises(delta_table, maass_forms):
    with pytest.raises(DomainError, match="out of reach"):
        d_minus_spectral(delta_table, delta_table, 2.0, 23,
                         [maass_forms["even_t13"]], CHEAP,
                         enforce_reach=False)


def test_spectral_domain_guard(delta_table):
    with pytest.raises(DomainError, match="Re s"):
        d_minus_spectral(delta_table, delta_table, 0.6, 1, [], CHEAP)


# ---------------------------------------------------------------------------
# unfolding
# ---------------------------------------------------------------------------

def test_unfolding_sides_agree(unfolding_pair):
    left, right = unfolding_pair
    assert _rel(left, right) < 1e-3


def test_unfolding_sides_are_real_at_real_s(unfolding_pair):
    left, right = unfolding_pair
    assert abs(left.imag) < 1e-9 * abs(left)
    assert right.imag == 0.0


def test_unfolding_vacuous_shift(delta_table):
    # h beyond the table: the series side is identically zero and the
    # lattice side sits at the quadrature noise floor
    left, right = unfolding_check(delta_table, delta_table, 3.0, 250001,
                                  CHEAP, window=20.0)
    assert right == 0j
    assert abs(left) < 1e-30


def test_unfolding_domain_guard(delta_table):
    with pytest.raises(DomainError, match="Re s"):
        unfolding_check(delta_table, delta_table, 2.0, 1, CHEAP)


# ---------------------------------------------------------------------------
# double series
# ---------------------------------------------------------------------------

def test_z_plus_matches_brute_loop(delta_table):
    spec = ZSpec(delta_table, 0.0, 3.0, 3.0, 2000)
    got = z_plus_truncated(spec)
    dc = [0] + [_divisor_count(m) for m in range(1, 2001)]
    pw = [0.0] + [m ** -8.5 for m in range(1, 2001)]
    want = math.fsum(delta_table.raw[m + h - 1] * dc[m] * pw[m] * pw[h]
                     for h in range(1, 2001) for m in range(1, 2001))
    assert _rel(complex(got), want) < 1e-10


def test_z_plus_equals_rowwise_series_assembly(delta_table, maass_forms):
    form = maass_forms["even_t13"]
    spec = ZSpec(delta_table, form, 3.0, 3.0, 120)
    got = z_plus_truncated(spec)
    rows = []
    for h in range(1, 121):
        row = d_series(ShiftedSeriesSpec("plus", delta_table, form,
                                         3.0, h, 22))
        rows.append(complex(row) * h ** -8.5)
    assert _rel(complex(got), math.fsum(r.real for r in rows)
                + 1j * math.fsum(r.imag for r in rows)) < 1e-12


def test_z_plus_doubling_stays_inside_bound(delta_table):
    lo = z_plus_truncated(ZSpec(delta_table, 0.0, 3.0, 3.0, 300))
    hi = z_plus_truncated(ZSpec(delta_table, 0.0, 3.0, 3.0, 600))
    assert abs(complex(hi) - complex(lo)) <= lo.tail_bound
    assert math.isfinite(lo.tail_bound)


def test_z_plus_domain_guards(delta_table, maass_forms):
    with pytest.raises(DomainError, match="absolute convergence"):
        z_plus_truncated(ZSpec(delta_table, 0.0, 0.9, 3.0, 10))
    with pytest.raises(DomainError, match="absolute convergence"):
        z_plus_truncated(ZSpec(delta_table, 0.0, 3.0, 1.0, 10))
    short = _synthetic_table(12, [1] * 50)
    with pytest.raises(DomainError, match="left table"):
        z_plus_truncated(ZSpec(short, maass_forms["even_t13"], 3.0, 3.0, 40))


# ---------------------------------------------------------------------------
# rearrangement
# ---------------------------------------------------------------------------

def test_binomial_coefficients_scalar_identity():
    # partial sums of the binomial series against the closed power
    beta = 2.0 + 5.5
    q = 1.0 / 3.0
    coeff = _binom_coeffs(beta, 100)
    partial = math.fsum((coeff[j] * q ** j).real for j in range(101))
    assert _rel(partial, (1.0 - q) ** -beta) < 1e-12


def test_rearrangement_regroup_matches_direct(delta_table, maass_forms):
    rep = rearrangement_check(delta_table, maass_forms["even_t13"],
                              9.0, 2.0, K=2)
    assert isinstance(rep, RearrangementReport)
    assert rep.regroup_rel < 1e-8
    assert rep.split_rel < 1e-8
    assert rep.j_used > 2
    assert rep.j_tail < 1e-10 * abs(rep.s2_direct)


def test_rearrangement_probe_pieces_reassemble(delta_table, maass_forms):
    rep = rearrangement_check(delta_table, maass_forms["even_t13"],
                              9.0, 2.0, K=2, probe_j=2)
    assert rep.probe_j == 2
    assert _rel(rep.s3_direct, rep.s5 - rep.s6 - rep.s7 - rep.s8) < 1e-8


def test_rearrangement_s8_matches_direct_loop(delta_table, maass_forms):
    form = maass_forms["even_t13"]
    rep = rearrangement_check(delta_table, form, 9.0, 2.0, K=2)
    want = math.fsum(delta_table.normalized[m - 1] * form.lam[m - 1]
                     * m ** -16.5 for m in range(1, 23))
    assert _rel(rep.s8, want) < 1e-13


def test_rearrangement_values_are_real_for_real_input(delta_table,
                                                      maass_forms):
    rep = rearrangement_check(delta_table, maass_forms["even_t13"],
                              9.0, 2.0, K=2)
    for v in (rep.s1, rep.s2_direct, rep.s2_regrouped, rep.s3_direct):
        assert abs(v.imag) < 1e-12 * max(abs(v), 1e-30)


def test_rearrangement_region_guard(delta_table, maass_forms):
    with pytest.raises(DomainError, match="rearrangement needs"):
        rearrangement_check(delta_table, maass_forms["even_t13"],
                            3.0, 2.0, K=8)
    with pytest.raises(DomainError, match="rearrangement needs"):
        rearrangement_check(delta_table, maass_forms["even_t13"],
                            9.0, 0.5, K=2)


# ---------------------------------------------------------------------------
# contour identities
# ---------------------------------------------------------------------------

def test_finite_shift_sides_agree(delta_table, maass_forms):
    left, right = finite_shift_contour_check(delta_table,
                                             maass_forms["even_t13"],
                                             3.0, 3.0)
    assert _rel(left, right) < 1e-6


def test_finite_shift_integrand_decays_along_line(delta_table, maass_forms):
    # justification of the truncation height: the paired gammas crush
    # the integrand twelve orders below its real-axis peak by height 30
    form = maass_forms["even_t13"]
    lam = np.asarray(form.lam)
    A = delta_table.normalized[:4000]
    n = np.arange(1, 4001, dtype=np.float64)
    m = np.arange(1, 23, dtype=np.float64)
    beta = 3.0 + 5.5

    def mag(z):
        lf = np.sum(A * np.exp(-(3.0 + z) * np.log(n)))
        lmu = np.sum(lam * np.exp(-(3.0 - z + 5.5) * np.log(m)))
        return abs(cmath.exp(log_gamma(-z) + log_gamma(beta + z)) * lf * lmu)

    peak = mag(-0.25 + 0.0j)
    assert mag(-0.25 + 30.0j) < 1e-12 * peak
    assert mag(-0.25 - 30.0j) < 1e-12 * peak


def test_finite_shift_large_w_leading_term(delta_table, maass_forms):
    # at large Re w the smallest index pair dominates both sides
    left, right = finite_shift_contour_check(delta_table,
                                             maass_forms["even_t13"],
                                             3.0, 40.0, eps_line=0.25,
                                             n_max=200)
    lead = 2.0 ** -(40.0 + 5.5)
    assert abs(left / lead - 1.0) < 1e-6
    assert abs(right / lead - 1.0) < 1e-6


def test_finite_shift_domain_guards(delta_table, maass_forms):
    form = maass_forms["even_t13"]
    with pytest.raises(DomainError, match="divergent L-series"):
        finite_shift_contour_check(delta_table, form, 3.0, 1.2)
    with pytest.raises(DomainError, match="eps_line"):
        finite_shift_contour_check(delta_table, form, 3.0, 5.0,
                                   eps_line=2.5)
    with pytest.raises(DomainError, match="left table"):
        finite_shift_contour_check(delta_table, form, 3.0, 3.0,
                                   n_max=300000)


def test_beta_contour_identity_reference_point():
    got = beta_contour_identity(2.5, 3.0, -0.7)
    assert _rel(got, 4.0 ** -2.5) < 1e-10


@given(st.floats(0.9, 5.5), st.floats(0.25, 4.0))
@settings(max_examples=10, deadline=None)
def test_beta_contour_identity_random_points(beta, x):
    got = beta_contour_identity(beta, x, -0.7)
    want = (1.0 + x) ** -beta
    assert _rel(got, want) < 1e-9


def test_beta_contour_guards():
    with pytest.raises(DomainError, match="positive"):
        beta_contour_identity(2.5, -1.0)
    with pytest.raises(DomainError, match="separate"):
        beta_contour_identity(0.5, 3.0, -0.7)
