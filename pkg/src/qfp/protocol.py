"""Per-slot interference measurement under the noise model, referee decisions,
and an exact error-probability oracle for small runs.

Slot model.  In each of the m time slots the two incoming pulses interfere;
a photon-induced click fires with probability p_c = 1 - exp(-2 eta alpha^2 / m)
and, when it fires, lands on the parity-correct detector with probability nu
("0" when the codeword bits agree, "1" when they differ) and on the wrong one
otherwise.  Independently, each detector dark-fires with probability p_dark.
The union of fired detectors classifies the slot as none / zero / one / double.

Sampling discipline.  Each slot consumes four uniforms in fixed order
(photon click, detector assignment, dark "0", dark "1"), so slot s of a run
uses stream draws 4s .. 4s+3; auxiliary draws (input sampling) start at 4m.
Together with the substream-per-trial rule in :mod:`qfp.rng`, every tally is a
pure function of (params, seed) regardless of chunking or worker count.

Double clicks are simulated rather than neglected; the referee's policy for
them is configurable: ``exclude`` drops the slot from both Z and C, while
``count-one`` treats it as a single "1" observation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln, xlogy

from .bits import BitString
from .codes import CodeSpec, Codeword, encode
from .errors import (
    CapacityError,
    DimensionError,
    ParameterError,
)
from .rng import Stream, trial_uniform_block

DOUBLE_CLICK_POLICIES = ("exclude", "count-one")
REGIMES = ("worst-case", "random-distinct", "equal")

# per-class (z, o) tables switch from the O(n^3) exact DP to the log-gamma
# closed form above this class size
_DP_MAX = 400
# direct (exact-summation) 2-D convolution up to this table area product
_DIRECT_CONV_MAX = 130 * 130


@dataclass(frozen=True)
class ProtocolParams:
    """Physical parameters of one protocol run."""

    alpha_sq: float
    eta: float = 1.0
    nu: float = 1.0
    p_dark: float = 0.0
    m: int = 1

    def __post_init__(self):
        if self.alpha_sq < 0:
            raise ParameterError("alpha_sq must be >= 0")
        if not 0 < self.eta <= 1:
            raise ParameterError("eta must lie in (0, 1]")
        if not 0.5 < self.nu <= 1:
            raise ParameterError("nu must lie in (1/2, 1]")
        if not 0 <= self.p_dark < 1:
            raise ParameterError("p_dark must lie in [0, 1)")
        if self.m < 1:
            raise ParameterError("m must be >= 1")

    @property
    def detected_alpha_sq(self) -> float:
        return self.eta * self.alpha_sq

    @property
    def click_prob(self) -> float:
        """Photon-click probability per slot at the interferometer output."""
        return -math.expm1(-2.0 * self.detected_alpha_sq / self.m)


@dataclass(frozen=True)
class RunTally:
    """Detector statistics of one run; ``clicks`` counts single-click slots."""

    zeros: int
    clicks: int
    no_click: int
    double_click: int

    def __post_init__(self):
        if self.zeros > self.clicks:
            raise ParameterError("zeros cannot exceed clicks")
        if min(self.zeros, self.clicks, self.no_click, self.double_click) < 0:
            raise ParameterError("tally counts must be >= 0")

    @property
    def m(self) -> int:
        return self.clicks + self.no_click + self.double_click

    @property
    def f0(self) -> float | None:
        """Observed fraction of "0" outcomes; None when no clicks occurred."""
        return self.zeros / self.clicks if self.clicks > 0 else None

    def as_record(self) -> dict:
        return {
            "zeros": self.zeros,
            "clicks": self.clicks,
            "no_click": self.no_click,
            "double_click": self.double_click,
        }


@dataclass(frozen=True)
class Decision:
    verdict: str  # "equal" | "different"
    rule: str  # "ideal" | "robust"
    inconclusive: bool = False


def slot_category_probs(
    params: ProtocolParams, bits_agree: bool
) -> tuple[float, float, float, float]:
    """Exact per-slot probabilities (zero, one, none, double)."""
    p_c = params.click_prob
    pd = params.p_dark
    nu0 = params.nu if bits_agree else 1.0 - params.nu
    ph_none = 1.0 - p_c
    ph0 = p_c * nu0
    ph1 = p_c * (1.0 - nu0)
    p_zero = ph0 * (1.0 - pd) + ph_none * pd * (1.0 - pd)
    p_one = ph1 * (1.0 - pd) + ph_none * pd * (1.0 - pd)
    p_none = ph_none * (1.0 - pd) * (1.0 - pd)
    p_double = p_c * pd + ph_none * pd * pd
    return p_zero, p_one, p_none, p_double


def slot_outcome(params: ProtocolParams, bits_agree: bool, rng: Stream) -> str:
    """Sample one slot; consumes four uniforms in the documented order."""
    u_click, u_assign, u_d0, u_d1 = rng.take(4)
    click = u_click < params.click_prob
    correct = u_assign < params.nu
    ph0 = click and (correct == bits_agree)
    ph1 = click and not (correct == bits_agree)
    c0 = ph0 or (u_d0 < params.p_dark)
    c1 = ph1 or (u_d1 < params.p_dark)
    if c0 and c1:
        return "double"
    if c0:
        return "zero"
    if c1:
        return "one"
    return "none"


def _tally_agree_mask(
    params: ProtocolParams, agree: np.ndarray, uniforms: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Counts (Z, O, D) per trial from uniforms of shape (trials, m, 4).

    ``agree`` is a boolean mask of shape (m,) or (trials, m).
    """
    if agree.ndim == 1:
        agree = agree[None, :]
    click = uniforms[:, :, 0] < params.click_prob
    correct = uniforms[:, :, 1] < params.nu
    ph0 = click & (correct == agree)
    ph1 = click & (correct != agree)
    c0 = ph0 | (uniforms[:, :, 2] < params.p_dark)
    c1 = ph1 | (uniforms[:, :, 3] < params.p_dark)
    dbl = c0 & c1
    z = (c0 & ~c1).sum(axis=1)
    o = (c1 & ~c0).sum(axis=1)
    return z.astype(np.int64), o.astype(np.int64), dbl.sum(axis=1).astype(np.int64)


def simulate_run(
    params: ProtocolParams, ex: Codeword, ex_prime: Codeword, rng: Stream
) -> RunTally:
    """One full run over the m slots of a codeword pair."""
    if ex.bits.length != params.m or ex_prime.bits.length != params.m:
        raise DimensionError(
            f"codeword lengths ({ex.bits.length}, {ex_prime.bits.length}) "
            f"must equal params.m = {params.m}"
        )
    agree = ex.bits.to_array() == ex_prime.bits.to_array()
    u = rng.take(4 * params.m).reshape(1, params.m, 4)
    z, o, d = _tally_agree_mask(params, agree, u)
    zeros, ones, dbl = int(z[0]), int(o[0]), int(d[0])
    return RunTally(
        zeros=zeros,
        clicks=zeros + ones,
        no_click=params.m - zeros - ones - dbl,
        double_click=dbl,
    )


def decide_ideal(tally: RunTally, policy: str = "exclude") -> Decision:
    """Different iff at least one "1" observation occurred."""
    _check_policy(policy)
    ones = tally.clicks - tally.zeros
    if policy == "count-one":
        ones += tally.double_click
    return Decision(verdict="different" if ones > 0 else "equal", rule="ideal")


def decide_robust(
    tally: RunTally,
    q_E: float,
    delta_q: float,
    policy: str = "exclude",
    zero_click_verdict: str = "equal",
) -> Decision:
    """Equal iff the observed "0" fraction exceeds q_E - delta_q (strictly)."""
    _check_policy(policy)
    if not 0 <= delta_q <= q_E <= 1:
        raise ParameterError(
            f"need 0 <= delta_q <= q_E <= 1, got q_E={q_E}, delta_q={delta_q}"
        )
    c = tally.clicks + (tally.double_click if policy == "count-one" else 0)
    if c == 0:
        return Decision(verdict=zero_click_verdict, rule="robust", inconclusive=True)
    f0 = tally.zeros / c
    verdict = "equal" if f0 > q_E - delta_q else "different"
    return Decision(verdict=verdict, rule="robust")


def _check_policy(policy: str) -> None:
    if policy not in DOUBLE_CLICK_POLICIES:
        raise ParameterError(f"unknown double-click policy {policy!r}")


def _counted_probs(
    params: ProtocolParams, bits_agree: bool, policy: str
) -> tuple[float, float, float]:
    """(p_zero, p_one, p_rest) after applying the double-click policy."""
    pz, po, pn, pdbl = slot_category_probs(params, bits_agree)
    if policy == "count-one":
        return pz, po + pdbl, pn
    return pz, po, pn + pdbl


def _class_table(count: int, pz: float, po: float) -> np.ndarray:
    """Joint pmf of (Z, O) over ``count`` iid slots, as a (count+1)^2 array."""
    pr = 1.0 - pz - po
    if count <= _DP_MAX:
        table = np.zeros((count + 1, count + 1))
        table[0, 0] = 1.0
        for i in range(count):
            nxt = pr * table[: i + 2, : i + 2].copy()
            nxt[1:, :] += pz * table[: i + 1, : i + 2]
            nxt[:, 1:] += po * table[: i + 2, : i + 1]
            table[: i + 2, : i + 2] = nxt
        return table
    z, o = np.meshgrid(
        np.arange(count + 1), np.arange(count + 1), indexing="ij"
    )
    r = count - z - o
    valid = r >= 0
    logpmf = np.where(
        valid,
        gammaln(count + 1)
        - gammaln(z + 1)
        - gammaln(o + 1)
        - gammaln(np.where(valid, r, 0) + 1)
        + xlogy(z, pz)
        + xlogy(o, po)
        + xlogy(np.where(valid, r, 0), pr),
        -np.inf,
    )
    return np.exp(logpmf)


def _convolve_tables(ta: np.ndarray, tb: np.ndarray) -> np.ndarray:
    if ta.size * tb.size <= _DIRECT_CONV_MAX**2 // 4:
        out = np.zeros((ta.shape[0] + tb.shape[0] - 1, ta.shape[1] + tb.shape[1] - 1))
        for dz in range(tb.shape[0]):
            row = tb[dz]
            nz = np.nonzero(row)[0]
            for do in nz:
                out[dz : dz + ta.shape[0], do : do + ta.shape[1]] += row[do] * ta
        return out
    return np.clip(fftconvolve(ta, tb), 0.0, None)


def joint_zc_distribution(
    params: ProtocolParams, agree_count: int, policy: str = "exclude"
) -> np.ndarray:
    """Exact joint pmf P[z, o] of counted-zero and counted-one slot totals."""
    a, d = agree_count, params.m - agree_count
    tables = []
    if a > 0:
        pz, po, _ = _counted_probs(params, True, policy)
        tables.append(_class_table(a, pz, po))
    if d > 0:
        pz, po, _ = _counted_probs(params, False, policy)
        tables.append(_class_table(d, pz, po))
    if not tables:
        raise ParameterError("m must be >= 1")
    return tables[0] if len(tables) == 1 else _convolve_tables(tables[0], tables[1])


def exact_error_probability(
    params: ProtocolParams,
    agree_count: int,
    rule: str,
    q_E: float | None = None,
    delta_q: float | None = None,
    policy: str = "exclude",
    zero_click_verdict: str = "equal",
    max_m: int = 5000,
) -> float:
    """Exact decision-error probability by convolving per-slot distributions.

    The m slots split into an agreeing class (``agree_count`` slots) and a
    disagreeing class; the joint law of (Z, C) follows from two multinomial
    blocks, and the decision rule's error region is summed exactly.  Ground
    truth is "equal" iff agree_count == m.  This is the brute-force oracle
    that Monte Carlo estimates and the analytic bounds are validated against.
    """
    _check_policy(policy)
    if not 0 <= agree_count <= params.m:
        raise ParameterError("agree_count must lie in [0, m]")
    if params.m > max_m:
        raise CapacityError(f"m = {params.m} exceeds the exact-convolution cap {max_m}")
    truth_equal = agree_count == params.m

    if rule == "ideal":
        log_no_one = 0.0
        for agree_flag, count in ((True, agree_count), (False, params.m - agree_count)):
            if count:
                _, po, _ = _counted_probs(params, agree_flag, policy)
                log_no_one += count * math.log1p(-po) if po < 1 else -math.inf
        p_no_one = math.exp(log_no_one)
        return 1.0 - p_no_one if truth_equal else p_no_one

    if rule != "robust":
        raise ParameterError(f"unknown rule {rule!r}")
    if q_E is None or delta_q is None:
        raise ParameterError("robust rule requires q_E and delta_q")
    if not 0 <= delta_q <= q_E <= 1:
        raise ParameterError(
            f"need 0 <= delta_q <= q_E <= 1, got q_E={q_E}, delta_q={delta_q}"
        )

    table = joint_zc_distribution(params, agree_count, policy)
    z = np.arange(table.shape[0])[:, None]
    o = np.arange(table.shape[1])[None, :]
    c = z + o
    f0 = z / np.maximum(c, 1)
    verdict_equal = np.where(c == 0, zero_click_verdict == "equal", f0 > q_E - delta_q)
    err_region = verdict_equal != truth_equal
    return float(table[err_region].sum())


def worst_case_agree_mask(spec: CodeSpec) -> np.ndarray:
    """Synthetic pair at exactly the guaranteed minimum distance.

    The first ceil((1 - delta) m) slots disagree; the bounds are worst-case
    over the code's distance guarantee, so this is the adversarial regime.
    """
    d = math.ceil((1.0 - spec.delta) * spec.m)
    agree = np.ones(spec.m, dtype=bool)
    agree[:d] = False
    return agree


def _decide_counts(
    rule: str,
    z: np.ndarray,
    o: np.ndarray,
    dbl: np.ndarray,
    q_E: float | None,
    delta_q: float | None,
    policy: str,
    zero_click_verdict: str,
) -> np.ndarray:
    """Vectorized verdicts (True = equal) from per-trial counts."""
    if rule == "ideal":
        ones = o + (dbl if policy == "count-one" else 0)
        return ones == 0
    c = z + o + (dbl if policy == "count-one" else 0)
    f0 = z / np.maximum(c, 1)
    return np.where(c == 0, zero_click_verdict == "equal", f0 > q_E - delta_q)


@dataclass(frozen=True)
class TrialAggregate:
    """Order-independent integer totals over a batch of simulated trials."""

    trials: int
    truth_equal: bool
    errors: int
    equal_verdicts: int
    different_verdicts: int
    inconclusive: int
    sum_zeros: int
    sum_clicks: int
    sum_no_click: int
    sum_double: int

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials

    @property
    def std_err(self) -> float:
        r = self.error_rate
        return math.sqrt(r * (1.0 - r) / self.trials)


def aggregate_trials(
    params: ProtocolParams,
    rule: str,
    trials: int,
    master_seed: int,
    agree: np.ndarray | None = None,
    truth_equal: bool | None = None,
    spec: CodeSpec | None = None,
    regime: str | None = None,
    q_E: float | None = None,
    delta_q: float | None = None,
    policy: str = "exclude",
    zero_click_verdict: str = "equal",
    workers: int = 1,
) -> TrialAggregate:
    """Simulate ``trials`` independent runs and reduce them to totals.

    The inputs are either a fixed agreement mask with its ground truth, or a
    (spec, regime) pair that derives them.  Trial i draws from substream
    mix64(master_seed, i) only, and the totals are sums of per-trial integers,
    so the result is identical for any chunking or worker count.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if rule == "robust" and (q_E is None or delta_q is None):
        raise ParameterError("robust rule requires q_E and delta_q")
    if agree is None:
        if spec is None or regime is None:
            raise ParameterError("need either an agree mask or (spec, regime)")
        if regime not in REGIMES:
            raise ParameterError(f"unknown regime {regime!r}")
        if spec.m != params.m:
            raise DimensionError(
                f"spec.m = {spec.m} differs from params.m = {params.m}"
            )
        if regime == "equal":
            agree = np.ones(params.m, dtype=bool)
            truth_equal = True
        elif regime == "worst-case":
            agree = worst_case_agree_mask(spec)
            truth_equal = False
        else:
            truth_equal = False
    elif truth_equal is None:
        truth_equal = bool(np.all(agree))

    m = params.m
    chunk = max(1, min(trials, (1 << 22) // max(4 * m, 1)))
    starts = range(0, trials, chunk)

    def run_chunk(lo: int) -> np.ndarray:
        hi = min(lo + chunk, trials)
        idx = np.arange(lo, hi, dtype=np.uint64)
        u = trial_uniform_block(master_seed, idx, 4 * m).reshape(hi - lo, m, 4)
        if agree is None:
            mask = np.empty((hi - lo, m), dtype=bool)
            for row, trial in enumerate(range(lo, hi)):
                mask[row] = _random_distinct_agree(spec, master_seed, trial)
        else:
            mask = agree
        z, o, d = _tally_agree_mask(params, mask, u)
        eq = _decide_counts(rule, z, o, d, q_E, delta_q, policy, zero_click_verdict)
        counted_c = z + o + (d if policy == "count-one" else 0)
        inconclusive = (counted_c == 0) if rule == "robust" else np.zeros_like(eq)
        return np.array(
            [
                int((eq != truth_equal).sum()),
                int(eq.sum()),
                int(inconclusive.sum()),
                int(z.sum()),
                int((z + o).sum()),
                int((m - z - o - d).sum()),
                int(d.sum()),
            ],
            dtype=np.int64,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            totals = sum(pool.map(run_chunk, starts))
    else:
        totals = sum(run_chunk(lo) for lo in starts)

    return TrialAggregate(
        trials=trials,
        truth_equal=truth_equal,
        errors=int(totals[0]),
        equal_verdicts=int(totals[1]),
        different_verdicts=trials - int(totals[1]),
        inconclusive=int(totals[2]),
        sum_zeros=int(totals[3]),
        sum_clicks=int(totals[4]),
        sum_no_click=int(totals[5]),
        sum_double=int(totals[6]),
    )


def estimate_error_rate(
    params: ProtocolParams,
    spec: CodeSpec,
    rule: str,
    trials: int,
    master_seed: int,
    regime: str = "worst-case",
    q_E: float | None = None,
    delta_q: float | None = None,
    policy: str = "exclude",
    zero_click_verdict: str = "equal",
    workers: int = 1,
) -> tuple[float, float]:
    """Monte Carlo error frequency and its binomial standard error."""
    agg = aggregate_trials(
        params,
        rule,
        trials,
        master_seed,
        spec=spec,
        regime=regime,
        q_E=q_E,
        delta_q=delta_q,
        policy=policy,
        zero_click_verdict=zero_click_verdict,
        workers=workers,
    )
    return agg.error_rate, agg.std_err


def _random_distinct_agree(spec: CodeSpec, master_seed: int, trial: int) -> np.ndarray:
    """Agreement mask of the encodings of two random distinct inputs.

    Input bits come from the trial's own substream starting at draw 4m
    (after the slot draws), so tallies and inputs never share draws.
    """
    stream = Stream.for_trial(master_seed, trial)
    base = 4 * spec.m
    x = (stream.block(base, spec.n) < 0.5).astype(np.uint8)
    offset = base + spec.n
    while True:
        x_prime = (stream.block(offset, spec.n) < 0.5).astype(np.uint8)
        if not np.array_equal(x, x_prime):
            break
        offset += spec.n
    ex = encode(spec, BitString.from_array(x))
    exp = encode(spec, BitString.from_array(x_prime))
    return ex.bits.to_array() == exp.bits.to_array()
