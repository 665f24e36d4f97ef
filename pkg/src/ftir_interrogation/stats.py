"""Shot-noise T-test for a reduced D_S count rate, sample-size planning, power checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .optics import SplitAmplitudes
from .simulation import TrialConfig, simulate_ensemble
from .source import effective_detected_rate

TWO_SIDED_99 = 2.58
ONE_SIDED_99 = 2.33
MIN_SAMPLE_SIZE = 31


@dataclass(frozen=True)
class TestOutcome:
    t_statistic: float
    sample_size: int
    threshold: float = TWO_SIDED_99
    confidence: float = 0.99

    __test__ = False  # keep pytest from collecting the class

    @property
    def reject_null(self) -> bool:
        return reject_null(self.t_statistic, self.sample_size, self.threshold)


@dataclass(frozen=True)
class ExperimentPlan:
    required_n: int
    integration_time: float
    paper_time: float
    expected_triggers: float
    damage_ratio: float
    threshold: float = TWO_SIDED_99


def _check_t_args(mean_rate, fano, sample_size):
    if sample_size < 1:
        raise DomainError(f"sample size must be >= 1, got {sample_size}")
    if not 0 < fano <= 1:
        raise DomainError(f"fano factor must lie in (0, 1], got {fano}")
    if not mean_rate > 0:
        raise DomainError(f"mean rate must be positive, got {mean_rate}")


def t_statistic(split: SplitAmplitudes, mean_rate: float, fano: float, sample_size: float) -> float:
    """Closed form -sqrt(N n0 / (a^2 eta)) * b^2."""
    _check_t_args(mean_rate, fano, sample_size)
    if split.a_reflect == 0.0:
        raise DomainError("a = 0: no reflected beam is left to test")
    return -math.sqrt(sample_size * mean_rate / (split.p_reflect * fano)) * split.p_tunnel


def t_statistic_two_step(split: SplitAmplitudes, mean_rate: float, fano: float, sample_size: float) -> float:
    """(mu - n0) / (sigma / sqrt(N)) with mu = a^2 n0 and sigma = sqrt(a^2 n0 eta)."""
    _check_t_args(mean_rate, fano, sample_size)
    if split.a_reflect == 0.0:
        raise DomainError("a = 0: no reflected beam is left to test")
    mu = split.p_reflect * mean_rate
    sigma = math.sqrt(split.p_reflect * mean_rate * fano)
    return (mu - mean_rate) / (sigma / math.sqrt(sample_size))


def reject_null(t: float, sample_size: int, threshold: float = TWO_SIDED_99) -> bool:
    return abs(t) >= threshold and sample_size > 30


def evaluate_test(split: SplitAmplitudes, mean_rate: float, fano: float, sample_size: int,
                 threshold: float = TWO_SIDED_99, confidence: float = 0.99) -> TestOutcome:
    t = t_statistic(split, mean_rate, fano, sample_size)
    return TestOutcome(t, sample_size, threshold, confidence)


def plan_sample_size(mean_rate: float, fano: float, damage_ratio: float,
                     threshold: float = TWO_SIDED_99) -> ExperimentPlan:
    """Smallest N with |t(N)| >= threshold when reflect/tunnel = ``damage_ratio``.

    ``integration_time`` is the time for D_S to record N counts at the reduced
    rate a^2 n0; ``paper_time`` is the cruder N / n0.
    """
    if not mean_rate > 0:
        raise DomainError(f"mean rate must be positive, got {mean_rate}")
    if not 0 < fano <= 1:
        raise DomainError(f"fano factor must lie in (0, 1], got {fano}")
    if not damage_ratio > 0 or math.isinf(damage_ratio):
        raise DomainError(f"damage ratio must be positive and finite, got {damage_ratio}")
    if not threshold > 0:
        raise DomainError(f"threshold must be positive, got {threshold}")
    p_tunnel = 1.0 / (1.0 + damage_ratio)
    p_reflect = damage_ratio / (1.0 + damage_ratio)
    bound = threshold**2 * p_reflect * fano / (mean_rate * p_tunnel**2)
    required_n = max(MIN_SAMPLE_SIZE, math.ceil(bound))
    return ExperimentPlan(
        required_n=required_n,
        integration_time=required_n / (p_reflect * mean_rate),
        paper_time=required_n / mean_rate,
        expected_triggers=required_n * p_tunnel / p_reflect,
        damage_ratio=damage_ratio,
        threshold=threshold,
    )


@dataclass(frozen=True)
class PowerResult:
    power: float
    false_rejection: float
    sample_size: int
    mean_t: float
    mean_t_null: float
    closed_form_t: float
    runs: int


def observed_t(counts, null_rate: float, alt_rate: float, fano: float,
               duration: float, sample_interval: float = 1.0) -> np.ndarray:
    """Per-run t from observed D_S counts.

    A run of ``duration`` seconds is read as N = duration / sample_interval
    consecutive samples; the observed mean count per sample replaces mu and
    sigma comes from the hypothesized object model (rate ``alt_rate``).
    """
    counts = np.asarray(counts, dtype=float)
    n = duration / sample_interval
    mu_hat = counts / n
    sigma = math.sqrt(alt_rate * sample_interval * fano)
    return (mu_hat - null_rate * sample_interval) / (sigma / math.sqrt(n))


def empirical_power(config: TrialConfig, runs: int, seed: int = 42, sample_interval: float = 1.0,
                    threshold: float = TWO_SIDED_99, workers: int = 1) -> PowerResult:
    """Rejection rate of the T-test over simulated runs, with and without the object.

    Object-absent runs reuse the same seeds, so the two rates are paired. Runs
    never stop early here; a truncated run would bias the observed rate. The
    null and object-present means are the rates D_S actually sees, so detector
    losses and accidentals do not masquerade as an object.
    """
    if runs < 100:
        raise DomainError(f"empirical power needs at least 100 runs, got {runs}")
    sample_size = int(round(config.duration / sample_interval))
    if sample_size < 1:
        raise DomainError("duration is shorter than one sample interval")
    present = replace(config, object_present=True, stop_on_trigger=False)
    split = present.split
    fano = config.source.fano_factor
    n0 = config.source.mean_rate
    null_rate = effective_detected_rate(config.source, config.background, 1.0)
    alt_rate = effective_detected_rate(config.source, config.background, split.p_reflect)

    def rejection(cfg):
        result = simulate_ensemble(cfg, runs, seed, workers=workers)
        t = observed_t(result.column("detected_s"), null_rate, alt_rate, fano, cfg.duration, sample_interval)
        rejected = (np.abs(t) >= threshold) & (sample_size > 30)
        return float(np.mean(rejected)), float(np.mean(t))

    power, mean_t = rejection(present)
    false_rejection, mean_t_null = rejection(present.with_object(False))
    return PowerResult(
        power=power,
        false_rejection=false_rejection,
        sample_size=sample_size,
        mean_t=mean_t,
        mean_t_null=mean_t_null,
        closed_form_t=t_statistic(split, n0 * sample_interval, fano, sample_size) if split.a_reflect > 0 else -math.inf,
        runs=runs,
    )
