"""Command-line harness: encode inputs, simulate runs, evaluate bounds,
solve operating points, and emit cost-curve sweep tables.

Every command is deterministic given (config, master_seed): floats are printed
with 12 significant digits, randomized commands require an explicit seed, and
sweep rows / Monte Carlo chunks are reduced in input order regardless of the
worker count.

The sweep's two quantum curves are handled differently: the ideal curve's
alpha^2 is solved from the ideal asymptote at the configured target error,
while the noisy curve uses the fixed operating point ``alpha_sq_noisy``.
That value is treated as the loss-compensated working intensity (eta is
assumed compensated at the source), which is what keeps a fixed alpha viable
until dark counts, not loss, end the feasible range.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

from . import analysis, baseline, protocol
from .bits import read_bitstring, write_bitstring
from .codes import justesen_delta_bound
from .config import ExperimentConfig
from .errors import InfeasibleError, ParameterError

SWEEP_SCHEMA = "qfp-sweep-v1"
SWEEP_COLUMNS = (
    "n",
    "m",
    "classical_bits",
    "quantum_ideal_bits",
    "quantum_noisy_bits",
    "alpha_sq_ideal",
    "alpha_sq_noisy",
    "delta_n",
    "eps_trace_achieved",
    "ideal_bound",
    "robust_bound",
    "robust_feasible",
)


def fmt(value) -> str:
    """Fixed 12-significant-digit rendering for floats; ints verbatim."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    cfg = cfg.override(
        master_seed=getattr(args, "seed", None),
        trials=getattr(args, "trials", None),
        out=getattr(args, "out", None),
        format=getattr(args, "format", None),
        mode=getattr(args, "mode", None),
        delta_q_convention=getattr(args, "delta_q_convention", None),
        double_click_policy=getattr(args, "double_click_policy", None),
        workers=getattr(args, "workers", None),
        regime=getattr(args, "regime", None),
    )
    cfg.validate()
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- encode


def cmd_encode(cfg: ExperimentConfig, input_file: str, out: str | None) -> int:
    from .codes import encode

    x = read_bitstring(input_file)
    spec = cfg.code_spec(n=x.length)
    codeword = encode(spec, x)
    if out:
        write_bitstring(out, codeword.bits)
    lines = [
        f"input_bits = {x.length}",
        f"effective_n = {spec.n}",
        f"m = {spec.m}",
        f"c = {fmt(spec.c)}",
        f"delta = {fmt(spec.delta)}",
    ]
    if out:
        lines.append(f"codeword_file = {out}")
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------- simulate


def cmd_simulate(cfg: ExperimentConfig, x_file: str, x_prime_file: str) -> int:
    if cfg.master_seed is None:
        raise ParameterError("simulate requires an explicit master_seed (--seed)")
    from .codes import encode

    x = read_bitstring(x_file)
    x_prime = read_bitstring(x_prime_file)
    spec = cfg.code_spec(n=max(x.length, x_prime.length))
    ex = encode(spec, x)
    exp = encode(spec, x_prime)
    agree = ex.bits.to_array() == exp.bits.to_array()
    truth_equal = bool(agree.all())
    params = cfg.protocol_params(m=spec.m)

    fractions = analysis.expected_fractions(
        params, spec.delta, convention=cfg.delta_q_convention
    )
    q_E, delta_q = fractions.q_E, fractions.delta_q
    agg = protocol.aggregate_trials(
        params,
        cfg.mode,
        cfg.trials,
        cfg.master_seed,
        agree=agree,
        truth_equal=truth_equal,
        q_E=q_E,
        delta_q=delta_q,
        policy=cfg.double_click_policy,
        zero_click_verdict=cfg.zero_click_verdict,
        workers=cfg.workers,
    )
    if cfg.mode == "ideal":
        bound = analysis.ideal_error_bound(spec.m, params.click_prob, spec.delta)
    else:
        bound = analysis.robust_error_bound(spec.m, fractions.p_c_eff, delta_q)

    t = cfg.trials
    lines = [
        f"truth = {'equal' if truth_equal else 'different'}",
        f"code = backend={spec.backend} n={spec.n} m={spec.m} c={fmt(spec.c)} delta={fmt(spec.delta)}",
        f"params = alpha_sq={fmt(cfg.alpha_sq)} eta={fmt(cfg.eta)} nu={fmt(cfg.nu)} p_dark={fmt(cfg.p_dark)}",
        f"rule = {cfg.mode} (double_click_policy={cfg.double_click_policy}, "
        f"delta_q_convention={cfg.delta_q_convention})",
        f"trials = {t} master_seed = {cfg.master_seed}",
        f"mean_zeros = {fmt(agg.sum_zeros / t)}",
        f"mean_clicks = {fmt(agg.sum_clicks / t)}",
        f"mean_no_click = {fmt(agg.sum_no_click / t)}",
        f"mean_double_click = {fmt(agg.sum_double / t)}",
        f"verdict_equal = {agg.equal_verdicts}",
        f"verdict_different = {agg.different_verdicts}",
        f"inconclusive = {agg.inconclusive}",
        f"empirical_error_rate = {fmt(agg.error_rate)}",
        f"empirical_std_err = {fmt(agg.std_err)}",
        f"analytic_bound_worst_case = {fmt(bound)}",
    ]
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


# ---------------------------------------------------------------- sweep


def _sweep_row(cfg: ExperimentConfig, n: int, alpha_ideal: float, delta: float) -> dict:
    m = math.ceil(cfg.c * n)
    noisy = cfg.alpha_sq_noisy
    ideal_report = analysis.dimension_report(alpha_ideal, m, cfg.eps_trace)
    noisy_bits = analysis.quantum_info_cost(n, cfg.c, noisy, cfg.eps_trace)
    ideal_bound = analysis.error_bound_at(alpha_ideal, delta, "ideal", m=m)
    robust_bound = analysis.error_bound_at(
        noisy,
        delta,
        "robust",
        eta=1.0,  # alpha_sq_noisy is the working (loss-compensated) intensity
        nu=cfg.nu,
        p_dark=cfg.p_dark,
        m=m,
        convention=cfg.delta_q_convention,
    )
    return {
        "n": n,
        "m": m,
        "classical_bits": baseline.classical_cost(n, cfg.target_error),
        "quantum_ideal_bits": ideal_report.log2_dim,
        "quantum_noisy_bits": noisy_bits,
        "alpha_sq_ideal": alpha_ideal,
        "alpha_sq_noisy": noisy,
        "delta_n": ideal_report.delta_n,
        "eps_trace_achieved": ideal_report.eps,
        "ideal_bound": ideal_bound,
        "robust_bound": robust_bound,
        "robust_feasible": bool(robust_bound <= cfg.target_error),
    }


def sweep_rows(cfg: ExperimentConfig) -> list[dict]:
    delta = justesen_delta_bound(cfg.c)
    alpha_ideal = analysis.required_mean_photon_number(
        cfg.target_error, delta, mode="ideal"
    )
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(
                pool.map(lambda n: _sweep_row(cfg, n, alpha_ideal, delta), cfg.sweep)
            )
    return [_sweep_row(cfg, n, alpha_ideal, delta) for n in cfg.sweep]


def render_sweep(rows: list[dict], fmt_name: str) -> str:
    if fmt_name == "json":
        payload = {
            "schema": SWEEP_SCHEMA,
            "rows": [{k: _json_value(r[k]) for k in SWEEP_COLUMNS} for r in rows],
        }
        return json.dumps(payload, indent=1) + "\n"
    header = "schema," + ",".join(SWEEP_COLUMNS)
    lines = [header]
    for r in rows:
        lines.append(SWEEP_SCHEMA + "," + ",".join(fmt(r[k]) for k in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"


def _json_value(v):
    if isinstance(v, bool) or isinstance(v, int):
        return v
    return float(fmt(v))


def cmd_sweep(cfg: ExperimentConfig) -> int:
    _emit(render_sweep(sweep_rows(cfg), cfg.format), cfg.out)
    return 0


# ---------------------------------------------------------------- bounds


def cmd_bounds(cfg: ExperimentConfig) -> int:
    delta = justesen_delta_bound(cfg.c)
    m = math.ceil(cfg.c * cfg.n)
    params = cfg.protocol_params(m=m)
    printed = analysis.expected_fractions(params, delta, convention="printed")
    halved = analysis.expected_fractions(params, delta, convention="halved")
    exact_eff = analysis.expected_fractions(
        params, delta, convention="printed", p_c_eff_mode="exact"
    )
    report = analysis.dimension_report(cfg.alpha_sq, m, cfg.eps_trace)
    active_dq = printed.delta_q if cfg.delta_q_convention == "printed" else halved.delta_q
    lines = [
        f"n = {cfg.n} m = {m} c = {fmt(cfg.c)} delta = {fmt(delta)}",
        f"alpha_sq = {fmt(cfg.alpha_sq)} eta = {fmt(cfg.eta)} nu = {fmt(cfg.nu)} "
        f"p_dark = {fmt(cfg.p_dark)}",
        f"p_c = {fmt(printed.p_c)}",
        f"p_c_eff_approx = {fmt(printed.p_c_eff)}",
        f"p_c_eff_exact = {fmt(exact_eff.p_c_eff)}",
        f"q_E = {fmt(printed.q_E)}",
        f"q_D = {fmt(printed.q_D)}",
        f"delta_q_printed = {fmt(printed.delta_q)}",
        f"delta_q_halved = {fmt(halved.delta_q)}",
        f"active_convention = {cfg.delta_q_convention}",
        f"ideal_bound = {fmt(analysis.ideal_error_bound(m, printed.p_c, delta))}",
        f"ideal_asymptote = {fmt(analysis.ideal_error_asymptote(params.detected_alpha_sq, delta))}",
        f"robust_bound = {fmt(analysis.robust_error_bound(m, printed.p_c_eff, active_dq))}",
        f"delta_n = {report.delta_n}",
        f"eps_prime = {fmt(report.eps_prime)}",
        f"eps_trace = {fmt(report.eps)}",
        f"log2_dim = {fmt(report.log2_dim)}",
    ]
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


# ---------------------------------------------------------------- optimize


def cmd_optimize(cfg: ExperimentConfig) -> int:
    delta = justesen_delta_bound(cfg.c)
    lines = [
        f"target_error = {fmt(cfg.target_error)}",
        f"c = {fmt(cfg.c)} delta = {fmt(delta)}",
        f"delta_q_convention = {cfg.delta_q_convention}",
    ]
    a_ideal = analysis.required_mean_photon_number(cfg.target_error, delta, mode="ideal")
    lines.append(f"alpha_sq_ideal = {fmt(a_ideal)}")
    lines.append(f"total_mean_photons_ideal = {fmt(a_ideal)} (constant in n)")
    try:
        a_robust = analysis.required_mean_photon_number(
            cfg.target_error,
            delta,
            mode="robust",
            eta=cfg.eta,
            nu=cfg.nu,
            p_dark=cfg.p_dark,
            convention=cfg.delta_q_convention,
        )
    except InfeasibleError as exc:
        lines.append(f"alpha_sq_robust = infeasible ({exc})")
    else:
        lines.append(f"alpha_sq_robust_source = {fmt(a_robust)}")
        lines.append(f"alpha_sq_robust_detected = {fmt(cfg.eta * a_robust)}")
        lines.append(
            f"reference_operating_point = {fmt(cfg.alpha_sq_noisy)} "
            f"solved/reference = {fmt(a_robust / cfg.alpha_sq_noisy)}"
        )
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


# ---------------------------------------------------------------- entry


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfp",
        description="Coherent-state fingerprinting simulation and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_out: bool = True):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--seed", type=int, help="master seed (u64)")
        p.add_argument("--trials", type=int)
        if with_out:
            p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--mode", choices=["ideal", "robust"])
        p.add_argument("--delta-q-convention", dest="delta_q_convention",
                       choices=["printed", "halved"])
        p.add_argument("--double-click-policy", dest="double_click_policy",
                       choices=["exclude", "count-one"])
        p.add_argument("--workers", type=int)
        p.add_argument("--regime", choices=["worst-case", "random-distinct", "equal"])

    p_enc = sub.add_parser("encode", help="encode a QFP1 input file")
    common(p_enc)
    p_enc.add_argument("input_file")

    p_sim = sub.add_parser("simulate", help="Monte Carlo runs for an input pair")
    common(p_sim)
    p_sim.add_argument("x_file")
    p_sim.add_argument("x_prime_file")

    for name in ("sweep", "bounds", "optimize"):
        common(sub.add_parser(name))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "encode":
            return cmd_encode(cfg, args.input_file, cfg.out)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.x_file, args.x_prime_file)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "bounds":
            return cmd_bounds(cfg)
        return cmd_optimize(cfg)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
