"""Experiment configuration: a flat key = value text format.

One assignment per line, ``#`` starts a comment, unknown keys are rejected.
``sweep`` is a comma-separated list of input sizes (scientific notation
allowed).  Serialization round-trips losslessly; every field is validated
against its owning module's invariants before any work starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .codes import CodeSpec, justesen_spec, random_linear_spec, repetition_spec
from .errors import ParameterError
from .protocol import DOUBLE_CLICK_POLICIES, REGIMES, ProtocolParams

DEFAULT_SWEEP = tuple(10**e for e in range(3, 15))

_ENUMS = {
    "backend": ("justesen", "repetition", "random_linear"),
    "mode": ("ideal", "robust"),
    "delta_q_convention": ("printed", "halved"),
    "double_click_policy": DOUBLE_CLICK_POLICIES,
    "zero_click_verdict": ("equal", "different"),
    "regime": REGIMES,
    "format": ("csv", "json"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    # code
    backend: str = "justesen"
    n: int = 1024
    c: float = 3.0
    repeats: int = 3  # repetition backend
    code_m: int = 24  # random_linear backend
    code_min_distance: int = 8
    code_seed: int = 1
    # noise
    alpha_sq: float = 88.8
    eta: float = 1.0
    nu: float = 1.0
    p_dark: float = 0.0
    # targets
    target_error: float = 1e-6
    eps_trace: float = 1e-6
    # operating point of the noisy sweep curve; the published Fig.-2 style
    # value, interpreted as the loss-compensated working intensity
    alpha_sq_noisy: float = 6651.0
    # run control
    sweep: tuple[int, ...] = DEFAULT_SWEEP
    trials: int = 10000
    master_seed: int | None = None
    mode: str = "ideal"
    delta_q_convention: str = "printed"
    double_click_policy: str = "exclude"
    zero_click_verdict: str = "equal"
    regime: str = "worst-case"
    out: str | None = None
    format: str = "csv"
    workers: int = 1

    def validate(self) -> None:
        for key, allowed in _ENUMS.items():
            if getattr(self, key) not in allowed:
                raise ParameterError(
                    f"{key} must be one of {allowed}, got {getattr(self, key)!r}"
                )
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if not 0 < self.target_error < 1:
            raise ParameterError("target_error must lie in (0, 1)")
        if not 0 < self.eps_trace < 2:
            raise ParameterError("eps_trace must lie in (0, 2)")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        if not self.sweep:
            raise ParameterError("sweep list must be non-empty")
        if any(v < 1 for v in self.sweep):
            raise ParameterError("sweep values must be >= 1")
        if self.alpha_sq_noisy <= 0:
            raise ParameterError("alpha_sq_noisy must be > 0")
        # instantiating the parameter objects runs their own invariants
        self.protocol_params(m=max(self.n, 1))

    def code_spec(self, n: int | None = None) -> CodeSpec:
        n = self.n if n is None else n
        if self.backend == "justesen":
            return justesen_spec(n, self.c)
        if self.backend == "repetition":
            return repetition_spec(n, self.repeats)
        return random_linear_spec(n, self.code_m, self.code_min_distance, self.code_seed)

    def protocol_params(self, m: int) -> ProtocolParams:
        return ProtocolParams(
            alpha_sq=self.alpha_sq, eta=self.eta, nu=self.nu, p_dark=self.p_dark, m=m
        )

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "sweep":
                value = ",".join(str(v) for v in value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        known = {f.name: f for f in fields(cls)}
        values: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"config line {lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in known:
                raise ParameterError(f"config line {lineno}: unknown key {key!r}")
            values[key] = _coerce(key, val)
        cfg = cls(**values)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_text(fh.read())

    def override(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


_INT_KEYS = {
    "n", "repeats", "code_m", "code_min_distance", "code_seed",
    "trials", "master_seed", "workers",
}
_FLOAT_KEYS = {
    "c", "alpha_sq", "eta", "nu", "p_dark", "target_error", "eps_trace",
    "alpha_sq_noisy",
}


def _parse_count(text: str) -> int:
    v = float(text)
    if not v.is_integer():
        raise ParameterError(f"expected an integer, got {text!r}")
    return int(v)


def _coerce(key: str, val: str):
    if key == "sweep":
        return tuple(_parse_count(part) for part in val.split(",") if part.strip())
    if key in _INT_KEYS:
        return _parse_count(val)
    if key in _FLOAT_KEYS:
        out = float(val)
        if not math.isfinite(out):
            raise ParameterError(f"{key} must be finite")
        return out
    return val
