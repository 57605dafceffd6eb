import math

import numpy as np
import pytest
from scipy.stats import hypergeom

from _oracles import exact_mode_count, hypergeom_lower_tail, poisson_two_sided_tail
from qfp.analysis import (
    click_prob,
    dimension_bound,
    dimension_bound_loose,
    dimension_report,
    error_bound_at,
    expected_fractions,
    hoeffding_tail_bound,
    hypergeometric_pmf,
    ideal_error_asymptote,
    ideal_error_bound,
    min_delta_n,
    poisson_tail,
    quantum_info_cost,
    required_mean_photon_number,
    robust_error_bound,
    trace_distance_bound,
)
from qfp.errors import (
    DegenerateParametersError,
    DomainError,
    InfeasibleError,
    ParameterError,
)
from qfp.protocol import ProtocolParams, exact_error_probability

DELTA_C3 = 9 / 10 + 1 / 45  # Justesen agreement bound at rate factor 3


# ------------------------------------------------------------ click prob


def test_click_prob_values():
    assert click_prob(0.0, 10) == 0.0
    assert click_prob(1.0, 2) == pytest.approx(1 - math.exp(-1.0), abs=1e-15)


def test_click_prob_small_intensity_limit():
    m = 10**8
    alpha_sq = 3.7
    assert m * click_prob(alpha_sq, m) == pytest.approx(2 * alpha_sq, rel=1e-6)


# ------------------------------------------------------------ fractions


def test_q_e_is_visibility_without_darks():
    p = ProtocolParams(alpha_sq=5.0, eta=0.7, nu=0.93, p_dark=0.0, m=20)
    fr = expected_fractions(p, 0.6)
    assert fr.q_E == pytest.approx(0.93, abs=1e-15)


def test_q_d_is_delta_for_perfect_visibility():
    p = ProtocolParams(alpha_sq=5.0, nu=1.0, p_dark=0.0, m=20)
    fr = expected_fractions(p, 0.6)
    assert fr.q_D == pytest.approx(0.6, abs=1e-15)


def test_delta_q_printed_value_at_published_noise():
    # eta=0.1, nu=0.98, p_dark=4e-8, delta=83/90, p_c >> p_dark
    p = ProtocolParams(alpha_sq=6651.0, eta=0.1, nu=0.98, p_dark=4e-8, m=3072)
    fr = expected_fractions(p, DELTA_C3, convention="printed")
    assert fr.delta_q == pytest.approx(0.0746667, abs=2e-4)
    assert fr.delta_q == pytest.approx((1 - DELTA_C3) * (2 * 0.98 - 1), rel=1e-5)


def test_delta_q_halved_is_half_of_printed():
    p = ProtocolParams(alpha_sq=10.0, eta=0.9, nu=0.9, p_dark=1e-4, m=30)
    printed = expected_fractions(p, 0.7, convention="printed")
    halved = expected_fractions(p, 0.7, convention="halved")
    assert halved.delta_q == pytest.approx(printed.delta_q / 2, abs=1e-15)
    assert printed.delta_q == pytest.approx(printed.q_E - printed.q_D, abs=1e-12)


def test_fraction_ordering_invariant():
    for nu in (0.8, 0.9, 0.999):
        for pd in (0.0, 1e-6, 1e-2):
            for delta in (0.1, 0.5, 0.9):
                p = ProtocolParams(alpha_sq=4.0, nu=nu, p_dark=pd, m=16)
                fr = expected_fractions(p, delta)
                assert 0 <= fr.q_D <= fr.q_E <= 1
                assert fr.p_c_eff >= fr.p_c


def test_p_c_eff_modes():
    p = ProtocolParams(alpha_sq=4.0, nu=0.9, p_dark=0.01, m=16)
    approx = expected_fractions(p, 0.5, p_c_eff_mode="approx")
    exact = expected_fractions(p, 0.5, p_c_eff_mode="exact")
    pc = p.click_prob
    assert approx.p_c_eff == pytest.approx(pc + 0.01, abs=1e-15)
    assert exact.p_c_eff == pytest.approx(1 - (1 - pc) * 0.99**2, abs=1e-15)


def test_degenerate_fractions_error():
    p = ProtocolParams(alpha_sq=0.0, p_dark=0.0, m=4)
    with pytest.raises(DegenerateParametersError):
        expected_fractions(p, 0.5)


# ------------------------------------------------------------ ideal bounds


def test_ideal_bound_trivials():
    assert ideal_error_bound(1, 1.0, 0.0) == 0.0
    assert ideal_error_bound(50, 0.3, 1.0) == 1.0


def test_ideal_bound_tight_at_full_distance():
    p = ProtocolParams(alpha_sq=1.0, nu=1.0, p_dark=0.0, m=2)
    exact = exact_error_probability(p, 0, "ideal")
    assert ideal_error_bound(2, p.click_prob, 0.0) == pytest.approx(exact, abs=1e-15)


def test_asymptote_values():
    assert ideal_error_asymptote(0.0, 0.5) == 1.0
    assert ideal_error_asymptote(88.8, DELTA_C3) == pytest.approx(1e-6, rel=0.01)


def test_bound_converges_to_asymptote():
    alpha_sq, delta = 88.8, DELTA_C3
    m = 10**8
    bound = ideal_error_bound(m, click_prob(alpha_sq, m), delta)
    asym = ideal_error_asymptote(alpha_sq, delta)
    assert bound == pytest.approx(asym, rel=1e-4)


def test_linearized_click_bound_below_asymptote():
    # with the paper-style approximation p_c ~ 2 alpha^2 / m the finite-m
    # bound sits below its asymptote for every m large enough that the
    # approximation is a probability; the exact click probability approaches
    # the asymptote from above instead (checked in the convergence test)
    alpha_sq, delta = 88.8, DELTA_C3
    asym = ideal_error_asymptote(alpha_sq, delta)
    for m in (10**6, 10**7, 10**9):
        approx_pc = 2 * alpha_sq / m
        assert ideal_error_bound(m, approx_pc, delta) <= asym


# ------------------------------------------------------------ robust bound


def test_robust_bound_trivials():
    assert robust_error_bound(100, 0.5, 0.0) == 1.0


def test_robust_bound_large_m_limit():
    alpha_sq, dq = 700.0, 0.07
    m = 10**8
    p_c_eff = click_prob(alpha_sq, m)
    bound = robust_error_bound(m, p_c_eff, dq)
    limit = math.exp(-2 * alpha_sq * (1 - math.exp(-2 * dq * dq)))
    assert bound == pytest.approx(limit, rel=1e-3)


def test_robust_bound_dominates_exact_small_instance():
    # halved convention: the threshold sits midway between q_E and q_D, the
    # regime in which the bound covers both error sides
    m, delta = 50, 0.88
    for eta, nu, pd, aps in [
        (1.0, 1.0, 0.0, 20.0),
        (0.8, 0.95, 1e-3, 25.0),
        (1.0, 0.98, 1e-4, 30.0),
    ]:
        p = ProtocolParams(alpha_sq=aps, eta=eta, nu=nu, p_dark=pd, m=m)
        fr = expected_fractions(p, delta, convention="halved")
        bound = robust_error_bound(m, fr.p_c_eff, fr.delta_q)
        agree = math.floor(delta * m)
        e_diff = exact_error_probability(p, agree, "robust", q_E=fr.q_E, delta_q=fr.delta_q)
        e_eq = exact_error_probability(p, m, "robust", q_E=fr.q_E, delta_q=fr.delta_q)
        assert e_diff <= bound and e_eq <= bound


# ------------------------------------------------------------ hypergeometric


def test_hypergeometric_examples():
    assert hypergeometric_pmf(2, 1, 1, 1) == pytest.approx(0.5, abs=1e-14)
    assert hypergeometric_pmf(4, 4, 2, 2) == pytest.approx(1.0, abs=1e-14)


def test_hypergeometric_normalization():
    for m in (5, 12, 30):
        for agree in (0, m // 3, m):
            for k in (0, 1, m // 2, m):
                total = sum(
                    hypergeometric_pmf(m, agree, k, l)
                    for l in range(max(0, k - (m - agree)), min(k, agree) + 1)
                )
                assert total == pytest.approx(1.0, abs=1e-12)


def test_hypergeometric_matches_scipy():
    for m, agree, k in ((20, 7, 9), (30, 15, 10), (12, 12, 5)):
        for l in range(max(0, k - (m - agree)), min(k, agree) + 1):
            assert hypergeometric_pmf(m, agree, k, l) == pytest.approx(
                float(hypergeom.pmf(l, m, agree, k)), rel=1e-10
            )


def test_hypergeometric_domain_errors():
    with pytest.raises(DomainError):
        hypergeometric_pmf(5, 2, 3, 3)  # l > agree
    with pytest.raises(DomainError):
        hypergeometric_pmf(5, 5, 6, 1)  # k > m


# ------------------------------------------------------------ ratio check


def test_binomial_ratio_inequality_examples():
    from qfp.analysis import binomial_ratio_inequality_check

    assert binomial_ratio_inequality_check(10, 9, 3)
    assert binomial_ratio_inequality_check(7, 4, 0)


def test_binomial_ratio_exhaustive_m25():
    from qfp.analysis import binomial_ratio_inequality_check

    assert all(
        binomial_ratio_inequality_check(m, agree, k)
        for m in range(1, 26)
        for agree in range(m + 1)
        for k in range(m + 1)
    )


# ------------------------------------------------------------ hoeffding


def test_hoeffding_trivials():
    assert hoeffding_tail_bound(0, 0.3) == 1.0
    assert hoeffding_tail_bound(25, 0.0) == 1.0


def test_hoeffding_example_value():
    assert hoeffding_tail_bound(20, 0.25) == pytest.approx(math.exp(-2.5), abs=1e-12)
    # exact hypergeometric tail stays below it (m=40, mean matched)
    exact = hypergeom_lower_tail(40, 20, 20, 20 * (0.5 - 0.25) + 1e-12)
    assert exact <= hoeffding_tail_bound(20, 0.25)


def test_exact_hypergeometric_tails_below_hoeffding():
    for m in (10, 25, 60):
        for agree in range(1, m, max(1, m // 7)):
            q = agree / m
            for k in range(1, m + 1, max(1, m // 9)):
                for dq in (0.05, 0.15, 0.3):
                    if dq > q:
                        continue
                    exact = hypergeom_lower_tail(m, agree, k, k * (q - dq) + 1e-12)
                    assert exact <= hoeffding_tail_bound(k, dq) + 1e-12


# ------------------------------------------------------------ dimension


def test_dimension_bound_tightness_point():
    got = dimension_bound(1.0, 1, 2)
    assert got == pytest.approx(math.log2(6), abs=1e-12)
    assert exact_mode_count(1.0, 1, 2) == 6


def test_dimension_bound_m1():
    assert dimension_bound(3.2, 4, 1) == pytest.approx(math.log2(8), abs=1e-12)


def test_dimension_bound_logarithmic_growth():
    alpha_sq, dn = 88.8, 82
    photons = math.ceil(alpha_sq) + dn
    diff = dimension_bound(alpha_sq, dn, 10**12) - dimension_bound(alpha_sq, dn, 10**6)
    assert diff == pytest.approx(photons * math.log2(10**6), rel=1e-3)


def test_dimension_bound_tight_below_loose():
    for alpha_sq in (0.5, 1.0, 7.3, 88.8):
        for dn in (1, 5, 80):
            for m in (1, 2, 100, 10**6, 10**13):
                assert dimension_bound(alpha_sq, dn, m) <= dimension_bound_loose(
                    alpha_sq, dn, m
                )


# ------------------------------------------------------------ poisson tail


def test_poisson_tail_trivials():
    assert poisson_tail(0.0, 1) == 0.0
    assert poisson_tail(5.0, 0) == pytest.approx(2.0)


def test_poisson_tail_dominates_exact():
    for lam in (0.5, 5.0, 88.8, 200.0):
        for dn in (1, 3, 10, 60, 200, 500):
            exact = poisson_two_sided_tail(lam, dn)
            assert exact <= poisson_tail(lam, dn) + 1e-15


# ------------------------------------------------------------ trace distance


def test_trace_distance_values():
    assert trace_distance_bound(0.0) == 0.0
    assert trace_distance_bound(0.25) == pytest.approx(1.0)
    assert trace_distance_bound(9.0) == 2.0


def test_min_delta_n_properties():
    assert min_delta_n(0.0, 1e-9) == 1
    results = [min_delta_n(50.0, eps) for eps in (1e-8, 1e-6, 1e-3, 0.1)]
    assert all(a >= b for a, b in zip(results, results[1:]))
    # closure: solved delta_n actually meets the target
    for alpha_sq in (1.0, 88.8, 6651.0):
        for eps in (1e-3, 1e-6, 1e-9):
            dn = min_delta_n(alpha_sq, eps)
            assert trace_distance_bound(poisson_tail(alpha_sq, dn)) <= eps
            if dn > 1:
                assert trace_distance_bound(poisson_tail(alpha_sq, dn - 1)) > eps


def test_dimension_report_consistency():
    rep = dimension_report(88.8, 3 * 10**6, 1e-6)
    assert rep.eps == pytest.approx(2 * math.sqrt(rep.eps_prime), abs=1e-18)
    assert rep.eps <= 1e-6
    assert rep.log2_dim == pytest.approx(dimension_bound(88.8, rep.delta_n, 3 * 10**6))


# ------------------------------------------------------------ info cost


def test_quantum_info_cost_logarithmic_increments():
    costs = [quantum_info_cost(10**e, 3.0, 88.8, 1e-6) for e in (4, 6, 8, 10, 12)]
    increments = [b - a for a, b in zip(costs, costs[1:])]
    for inc in increments[1:]:
        assert inc == pytest.approx(increments[0], rel=0.02)


def test_quantum_info_cost_separation():
    n = 10**13
    classical = 10 * 2 * math.sqrt(n)
    assert classical / quantum_info_cost(n, 3.0, 88.8, 1e-6) >= 100


def test_quantum_info_cost_degenerate_n():
    v = quantum_info_cost(1, 3.0, 1.0, 1e-3)
    assert math.isfinite(v) and v > 0


# ------------------------------------------------------------ solver


def test_required_alpha_ideal_matches_published_value():
    a = required_mean_photon_number(1e-6, DELTA_C3, mode="ideal")
    assert a == pytest.approx(88.8, rel=0.01)


def test_required_alpha_robust_matches_published_value():
    a = required_mean_photon_number(
        1e-6, DELTA_C3, mode="robust", eta=0.1, nu=0.98, p_dark=4e-8,
        convention="printed",
    )
    assert a == pytest.approx(6651.0, rel=0.15)


def test_required_alpha_halved_convention_differs():
    printed = required_mean_photon_number(
        1e-6, DELTA_C3, mode="robust", eta=0.1, nu=0.98, convention="printed"
    )
    halved = required_mean_photon_number(
        1e-6, DELTA_C3, mode="robust", eta=0.1, nu=0.98, convention="halved"
    )
    assert halved > 2 * printed


def test_required_alpha_trivial_target():
    assert required_mean_photon_number(1.0, 0.5, mode="ideal") == 0.0


def test_required_alpha_half_error_closed_form():
    a = required_mean_photon_number(0.5, 0.0, mode="ideal")
    assert a == pytest.approx(math.log(2) / 2, rel=1e-6)


def test_required_alpha_round_trip():
    for mode, kwargs in (
        ("ideal", {}),
        ("ideal", {"m": 5000}),
        ("robust", {"eta": 0.5, "nu": 0.95, "p_dark": 1e-7}),
        ("robust", {"eta": 0.5, "nu": 0.95, "p_dark": 1e-7, "m": 10**7}),
    ):
        target = 1e-5
        a = required_mean_photon_number(target, 0.8, mode=mode, **kwargs)
        back = error_bound_at(a, 0.8, mode, **kwargs)
        assert back == pytest.approx(target, rel=1e-6)


def test_required_alpha_infeasible():
    with pytest.raises(InfeasibleError):
        required_mean_photon_number(
            1e-6, 0.999, mode="robust", nu=0.5001, convention="halved"
        )


def test_required_alpha_eta_compensation():
    base = required_mean_photon_number(1e-6, DELTA_C3, mode="ideal", eta=1.0)
    lossy = required_mean_photon_number(1e-6, DELTA_C3, mode="ideal", eta=0.25)
    assert lossy == pytest.approx(base / 0.25, rel=1e-6)


def test_bound_monotone_in_alpha():
    vals = [
        error_bound_at(a, 0.9, "robust", nu=0.95, p_dark=1e-6, m=10**6)
        for a in (1.0, 10.0, 100.0, 1000.0)
    ]
    assert all(x >= y for x, y in zip(vals, vals[1:]))
