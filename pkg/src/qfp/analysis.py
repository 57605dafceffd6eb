"""Closed-form click statistics, error bounds, dimension/trace-distance
machinery, and the numeric solver for the source mean photon number.

Conventions.  The printed decision margin is the full expectation gap
q_E - q_D = pf (1-delta)(2 nu - 1) with pf = p_c / (p_c + p_dark); the halved
convention divides it by two.  The halved margin is the self-consistent one
(the threshold sits midway between q_E and q_D, so the same Hoeffding exponent
covers both error sides); the printed one reproduces published operating
points.  Both are selectable wherever delta_q enters.

All binomials are evaluated through log-gamma so mode counts stay finite for
m up to ~1e14; exact integer arithmetic is reserved for the small brute-force
oracles in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

from .errors import (
    DegenerateParametersError,
    DomainError,
    InfeasibleError,
    ParameterError,
)
from .protocol import ProtocolParams

LN2 = math.log(2.0)
DELTA_Q_CONVENTIONS = ("printed", "halved")
ALPHA_SQ_BRACKET_MAX = 1e9


def click_prob(alpha_sq_detected: float, m: int) -> float:
    """Per-slot click probability 1 - exp(-2 alpha^2 / m) at the detectors."""
    if alpha_sq_detected < 0 or m < 1:
        raise ParameterError("need alpha_sq_detected >= 0 and m >= 1")
    return -math.expm1(-2.0 * alpha_sq_detected / m)


@dataclass(frozen=True)
class ExpectedFractions:
    """Expected "0"-fraction statistics under the noise model."""

    q_E: float
    q_D: float
    delta_q: float
    p_c: float
    p_c_eff: float


def expected_fractions(
    params: ProtocolParams,
    delta: float,
    convention: str = "printed",
    p_c_eff_mode: str = "approx",
) -> ExpectedFractions:
    """Expected fractions of "0" outcomes for equal (q_E) and distinct (q_D)
    inputs, the decision margin delta_q, and the effective click probability.

    ``p_c_eff_mode='approx'`` uses p_c + p_dark; ``'exact'`` the union
    probability of a photon click or either dark count.
    """
    if not 0 < delta < 1:
        raise ParameterError("delta must lie in (0, 1)")
    if convention not in DELTA_Q_CONVENTIONS:
        raise ParameterError(f"unknown delta_q convention {convention!r}")
    p_c = params.click_prob
    pd = params.p_dark
    nu = params.nu
    if p_c + pd == 0:
        raise DegenerateParametersError("p_c + p_dark is zero; no click source")
    pf = p_c / (p_c + pd)
    dark_term = pd / (2.0 * (p_c + pd))
    q_D = pf * (nu * delta + (1.0 - nu) * (1.0 - delta)) + dark_term
    q_E = pf * nu + dark_term
    gap = pf * (1.0 - delta) * (2.0 * nu - 1.0)
    delta_q = gap if convention == "printed" else gap / 2.0
    if p_c_eff_mode == "approx":
        p_c_eff = min(p_c + pd, 1.0)
    elif p_c_eff_mode == "exact":
        p_c_eff = 1.0 - (1.0 - p_c) * (1.0 - pd) ** 2
    else:
        raise ParameterError(f"unknown p_c_eff mode {p_c_eff_mode!r}")
    return ExpectedFractions(q_E=q_E, q_D=q_D, delta_q=delta_q, p_c=p_c, p_c_eff=p_c_eff)


def _power_clamped(base: float, m: float) -> float:
    base = min(max(base, 0.0), 1.0)
    if base == 0.0:
        return 0.0 if m > 0 else 1.0
    return min(math.exp(m * math.log(base)), 1.0)


def ideal_error_bound(m: int, p_c: float, delta: float) -> float:
    """[1 - p_c (1 - delta)]^m, the ideal-rule error bound for distinct inputs."""
    if not 0 <= p_c <= 1 or not 0 <= delta <= 1:
        raise ParameterError("p_c and delta must lie in [0, 1]")
    return _power_clamped(1.0 - p_c * (1.0 - delta), m)


def ideal_error_asymptote(alpha_sq_detected: float, delta: float) -> float:
    """Large-m limit exp(-2 (1 - delta) alpha^2) of the ideal-rule bound."""
    if alpha_sq_detected < 0 or delta >= 1:
        raise ParameterError("need alpha_sq_detected >= 0 and delta < 1")
    return math.exp(-2.0 * (1.0 - delta) * alpha_sq_detected)


def robust_error_bound(m: int, p_c_eff: float, delta_q: float) -> float:
    """[1 - p'_c (1 - exp(-2 delta_q^2))]^m, the robust-rule error bound."""
    if not 0 <= p_c_eff <= 1 or delta_q < 0:
        raise ParameterError("need p_c_eff in [0, 1] and delta_q >= 0")
    resolve = -math.expm1(-2.0 * delta_q * delta_q)
    return _power_clamped(1.0 - p_c_eff * resolve, m)


def hypergeometric_pmf(m: int, agree: int, k: int, l: int) -> float:
    """P(Z = l | C = k) when k clicks are drawn across m slots of which
    ``agree`` produce "0": C(agree, l) C(m - agree, k - l) / C(m, k)."""
    if not (0 <= l <= k <= m and l <= agree <= m and k - l <= m - agree):
        raise DomainError(
            f"invalid hypergeometric arguments m={m}, agree={agree}, k={k}, l={l}"
        )
    return math.exp(
        _log_comb(agree, l) + _log_comb(m - agree, k - l) - _log_comb(m, k)
    )


def _log_comb(n: int, k: int) -> float:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def binomial_ratio_inequality_check(m: int, agree: int, k: int) -> bool:
    """Whether P(Z = k | C = k) <= (agree / m)^k, in exact integer arithmetic."""
    if not (0 <= k <= m and 0 <= agree <= m):
        raise DomainError(f"invalid arguments m={m}, agree={agree}, k={k}")
    if k > agree:
        return True  # pmf is zero
    # C(agree, k) / C(m, k) <= (agree / m)^k  <=>  C(agree, k) m^k <= agree^k C(m, k)
    return math.comb(agree, k) * m**k <= agree**k * math.comb(m, k)


def hoeffding_tail_bound(k: int, delta_q: float) -> float:
    """exp(-2 k delta_q^2): Hoeffding bound on P(Z/k <= q_E - delta_q)."""
    if k < 0 or delta_q < 0:
        raise ParameterError("need k >= 0 and delta_q >= 0")
    return math.exp(-2.0 * k * delta_q * delta_q)


def dimension_bound(alpha_sq: float, delta_n: int, m: int) -> float:
    """log2 of the dimension of the photon-number window +-delta_n around
    alpha^2 over m modes: log2[2 delta_n binom(ceil(alpha^2)+delta_n+m-1, m-1)].

    Non-integer alpha^2 is ceiled: the window must cover whole photon numbers,
    and ceiling preserves the upper bound.
    """
    if delta_n < 1 or m < 1 or alpha_sq < 0:
        raise ParameterError("need delta_n >= 1, m >= 1, alpha_sq >= 0")
    photons = math.ceil(alpha_sq) + delta_n
    log_binom = gammaln(photons + m) - gammaln(m) - gammaln(photons + 1)
    return math.log2(2 * delta_n) + log_binom / LN2


def dimension_bound_loose(alpha_sq: float, delta_n: int, m: int) -> float:
    """Looser closed form (A) log2(m + A - 1) + log2(2 delta_n), A = ceil(alpha^2)+delta_n.

    Evaluated at the same ceiled photon count as :func:`dimension_bound` so the
    tight form never exceeds it.
    """
    if delta_n < 1 or m < 1 or alpha_sq < 0:
        raise ParameterError("need delta_n >= 1, m >= 1, alpha_sq >= 0")
    photons = math.ceil(alpha_sq) + delta_n
    return photons * math.log2(m + photons - 1) + math.log2(2 * delta_n)


def poisson_tail(alpha_sq: float, delta_n: int) -> float:
    """Two-sided Poisson tail bound 2 e^{-a} (e a / (a + delta_n))^{a + delta_n}.

    Vacuous (returns 2) at delta_n = 0; exactly 0 for the vacuum a = 0.
    """
    if alpha_sq < 0 or delta_n < 0:
        raise ParameterError("need alpha_sq >= 0 and delta_n >= 0")
    if alpha_sq == 0:
        return 0.0 if delta_n >= 1 else 2.0
    x = alpha_sq + delta_n
    log_val = LN2 - alpha_sq + x * (1.0 + math.log(alpha_sq) - math.log(x))
    return math.exp(log_val)


def trace_distance_bound(eps_prime: float) -> float:
    """Fuchs-van de Graaf step: trace distance <= 2 sqrt(eps'), capped at 2."""
    if eps_prime < 0:
        raise ParameterError("eps_prime must be >= 0")
    return min(2.0 * math.sqrt(eps_prime), 2.0)


def min_delta_n(alpha_sq: float, eps_target: float) -> int:
    """Smallest photon-number half-width whose tail keeps the trace distance
    within ``eps_target``; the tail bound is monotone in delta_n."""
    if not 0 < eps_target < 2:
        raise ParameterError("eps_target must lie in (0, 2)")
    if alpha_sq < 0:
        raise ParameterError("alpha_sq must be >= 0")

    def ok(dn: int) -> bool:
        return trace_distance_bound(poisson_tail(alpha_sq, dn)) <= eps_target

    if ok(1):
        return 1
    hi = 2
    while not ok(hi):
        hi *= 2
        if hi > 1 << 60:
            raise InfeasibleError("no delta_n satisfies the trace-distance target")
    lo = hi // 2  # ok(lo) is False
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class DimensionReport:
    """Effective-dimension accounting for one (alpha^2, m) operating point."""

    delta_n: int
    eps_prime: float
    eps: float
    log2_dim: float


def dimension_report(alpha_sq: float, m: int, eps_target: float) -> DimensionReport:
    dn = min_delta_n(alpha_sq, eps_target)
    eps_prime = poisson_tail(alpha_sq, dn)
    return DimensionReport(
        delta_n=dn,
        eps_prime=eps_prime,
        eps=2.0 * math.sqrt(eps_prime),
        log2_dim=dimension_bound(alpha_sq, dn, m),
    )


def quantum_info_cost(n: int, c: float, alpha_sq: float, eps_target: float) -> float:
    """Transmitted information (qubit count bound) at input size n: the
    dimension bound over m = ceil(c n) modes at the solved delta_n."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    m = math.ceil(c * n)
    return dimension_bound(alpha_sq, min_delta_n(alpha_sq, eps_target), m)


def error_bound_at(
    alpha_sq_source: float,
    delta: float,
    mode: str,
    eta: float = 1.0,
    nu: float = 1.0,
    p_dark: float = 0.0,
    m: int | None = None,
    convention: str = "printed",
) -> float:
    """Selected analytic error bound as a function of the source alpha^2.

    Loss enters as detected = eta * alpha_sq_source.  With ``m=None`` the
    asymptotic (large-m) form is used; the robust asymptote takes the photon
    fraction pf = 1, i.e. the p_c >> p_dark regime in which a fixed alpha can
    beat the dark counts.
    """
    if convention not in DELTA_Q_CONVENTIONS:
        raise ParameterError(f"unknown delta_q convention {convention!r}")
    detected = eta * alpha_sq_source
    if mode == "ideal":
        if m is None:
            return ideal_error_asymptote(detected, delta)
        return ideal_error_bound(m, click_prob(detected, m), delta)
    if mode != "robust":
        raise ParameterError(f"unknown mode {mode!r}")
    gap_factor = (1.0 - delta) * (2.0 * nu - 1.0)
    if m is None:
        dq = gap_factor if convention == "printed" else gap_factor / 2.0
        resolve = -math.expm1(-2.0 * dq * dq)
        return math.exp(-2.0 * detected * resolve)
    p_c = click_prob(detected, m)
    if p_c + p_dark == 0:
        return 1.0
    pf = p_c / (p_c + p_dark)
    dq = pf * gap_factor
    if convention == "halved":
        dq /= 2.0
    return robust_error_bound(m, min(p_c + p_dark, 1.0), dq)


def required_mean_photon_number(
    target_error: float,
    delta: float,
    mode: str = "ideal",
    eta: float = 1.0,
    nu: float = 1.0,
    p_dark: float = 0.0,
    m: int | None = None,
    convention: str = "printed",
    rel_tol: float = 1e-9,
) -> float:
    """Source mean photon number alpha^2 at which the selected bound meets
    ``target_error``, by bisection (the bound is monotone in alpha^2)."""
    if not 0 < target_error <= 1:
        raise ParameterError("target_error must lie in (0, 1]")
    if not 0 <= delta < 1:
        raise ParameterError("delta must lie in [0, 1)")

    def bound(a: float) -> float:
        return error_bound_at(a, delta, mode, eta, nu, p_dark, m, convention)

    if bound(0.0) <= target_error:
        return 0.0
    hi = ALPHA_SQ_BRACKET_MAX
    if bound(hi) > target_error:
        raise InfeasibleError(
            f"bound at alpha_sq = {hi:g} is {bound(hi):g} > target {target_error:g}; "
            "no source intensity in the bracket reaches the target "
            "(binding constraint: decision margin or dark counts)"
        )
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if bound(mid) <= target_error:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rel_tol * hi:
            break
    return hi
