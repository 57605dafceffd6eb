"""Coherent-state quantum fingerprinting toolkit.

Simulates the per-slot detector-click model of the coherent-state equality
protocol, implements both referee decision rules with exact small-instance
oracles, evaluates all analytic error and dimension bounds, and reproduces
the quantum-vs-classical communication cost curves.
"""

from .analysis import (
    DimensionReport,
    ExpectedFractions,
    click_prob,
    dimension_bound,
    dimension_bound_loose,
    dimension_report,
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
from .baseline import ClassicalCostModel, classical_cost, grid_protocol_trial
from .bits import BitString, hamming_distance, read_bitstring, write_bitstring
from .codes import (
    CodeSpec,
    Codeword,
    encode,
    justesen_delta_bound,
    justesen_spec,
    random_linear_spec,
    repetition_spec,
    verify_min_distance,
)
from .config import ExperimentConfig
from .protocol import (
    Decision,
    ProtocolParams,
    RunTally,
    decide_ideal,
    decide_robust,
    estimate_error_rate,
    exact_error_probability,
    simulate_run,
    slot_outcome,
)
from .rng import Stream, mix64

__version__ = "0.1.0"

__all__ = [
    "BitString",
    "ClassicalCostModel",
    "CodeSpec",
    "Codeword",
    "Decision",
    "DimensionReport",
    "ExpectedFractions",
    "ExperimentConfig",
    "ProtocolParams",
    "RunTally",
    "Stream",
    "classical_cost",
    "click_prob",
    "decide_ideal",
    "decide_robust",
    "dimension_bound",
    "dimension_bound_loose",
    "dimension_report",
    "encode",
    "estimate_error_rate",
    "exact_error_probability",
    "expected_fractions",
    "grid_protocol_trial",
    "hamming_distance",
    "hoeffding_tail_bound",
    "hypergeometric_pmf",
    "ideal_error_asymptote",
    "ideal_error_bound",
    "justesen_delta_bound",
    "justesen_spec",
    "min_delta_n",
    "mix64",
    "poisson_tail",
    "quantum_info_cost",
    "random_linear_spec",
    "read_bitstring",
    "repetition_spec",
    "required_mean_photon_number",
    "robust_error_bound",
    "simulate_run",
    "slot_outcome",
    "trace_distance_bound",
    "verify_min_distance",
    "write_bitstring",
]
