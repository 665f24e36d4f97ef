"""Heralded single-photon source statistics and detection plumbing.

The sub-Poissonian source is a binomial: ``M`` pair-emission opportunities each
heralded with probability ``p = 1 - fano``. Its Fano factor is exactly ``1 - p``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

# Typical single-photon source fluxes, photons/s; outside this only a warning is logged.
TYPICAL_RATE_RANGE = (1e2, 1e6)


class Distribution(str, Enum):
    SUB_POISSONIAN_BINOMIAL = "sub_poissonian_binomial"
    POISSONIAN = "poissonian"


class Stream(str, Enum):
    """Frequency labels; only used to say which stream a photon belongs to."""

    PUMP = "nu0"
    IDLER = "nu1"
    SIGNAL = "nu2"


@dataclass(frozen=True)
class SourceModel:
    mean_rate: float
    fano_factor: float = 1.0
    distribution: Distribution | None = None

    def __post_init__(self):
        if not self.mean_rate > 0:
            raise ConfigError(f"mean_rate must be positive, got {self.mean_rate}")
        if not 0 < self.fano_factor <= 1:
            raise ConfigError(f"fano_factor must lie in (0, 1], got {self.fano_factor}")
        dist = self.distribution
        if dist is None:
            dist = Distribution.POISSONIAN if self.fano_factor == 1 else Distribution.SUB_POISSONIAN_BINOMIAL
        dist = Distribution(dist)
        object.__setattr__(self, "distribution", dist)
        if dist is Distribution.POISSONIAN and self.fano_factor != 1:
            raise ConfigError("a Poissonian source has fano_factor = 1")
        if dist is Distribution.SUB_POISSONIAN_BINOMIAL and self.fano_factor == 1:
            raise ConfigError("sub-Poissonian source needs fano_factor < 1 (binomial p = 1 - fano would be 0)")
        lo, hi = TYPICAL_RATE_RANGE
        if not lo <= self.mean_rate <= hi:
            logger.warning("mean_rate %g photons/s is outside the typical heralded-source range", self.mean_rate)

    @property
    def herald_probability(self) -> float:
        return 1.0 - self.fano_factor

    def trials(self, duration: float) -> int:
        """Binomial trial count M for a window of ``duration`` seconds."""
        return int(round(self.mean_rate * duration / self.herald_probability))

    def realized_mean(self, duration: float) -> float:
        """Mean count actually produced by the sampler (differs from rate*duration by rounding of M)."""
        if self.distribution is Distribution.POISSONIAN:
            return self.mean_rate * duration
        return self.trials(duration) * self.herald_probability


@dataclass(frozen=True)
class BackgroundModel:
    pump_background_rate: float = 0.0
    filter_transmission_signal: float = 1.0
    filter_rejection_pump: float = 1.0
    coincidence_window: float = 1e-9
    dark_rate_s: float = 0.0
    dark_rate_i: float = 0.0
    efficiency_s: float = 1.0
    efficiency_i: float = 1.0

    def __post_init__(self):
        for name in ("filter_transmission_signal", "filter_rejection_pump", "efficiency_s", "efficiency_i"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        for name in ("pump_background_rate", "dark_rate_s", "dark_rate_i"):
            value = getattr(self, name)
            if not value >= 0.0:
                raise ConfigError(f"{name} must be nonnegative, got {value}")
        if not self.coincidence_window > 0:
            raise ConfigError(f"coincidence_window must be positive, got {self.coincidence_window}")

    @property
    def signal_pass_probability(self) -> float:
        """Probability a reflected signal photon survives the filter and clicks D_S."""
        return self.efficiency_s * self.filter_transmission_signal

    @property
    def is_ideal(self) -> bool:
        return (
            self.signal_pass_probability == 1.0
            and self.dark_rate_s == 0.0
            and self.pump_background_rate * (1.0 - self.filter_rejection_pump) == 0.0
        )

    def accidental_rate(self, mean_rate: float) -> float:
        singles_s = self.dark_rate_s + self.pump_background_rate * (1.0 - self.filter_rejection_pump)
        singles_i = mean_rate * self.efficiency_i + self.dark_rate_i
        return singles_s * self.coincidence_window * singles_i


IDEAL_BACKGROUND = BackgroundModel()


def sample_herald_counts(source: SourceModel, duration: float, size=None, rng=None):
    """Draw heralded-photon counts for windows of ``duration`` seconds.

    ``rng`` may be a seed or a ``numpy.random.Generator``. Returns an int when
    ``size`` is None, else an integer array.
    """
    if not duration > 0:
        raise DomainError(f"duration must be positive, got {duration}")
    rng = np.random.default_rng(rng)
    if source.distribution is Distribution.POISSONIAN:
        draws = rng.poisson(source.mean_rate * duration, size=size)
    else:
        draws = rng.binomial(source.trials(duration), source.herald_probability, size=size)
    return int(draws) if size is None else draws


def sample_herald_count(source: SourceModel, duration: float, rng_seed=None) -> int:
    return sample_herald_counts(source, duration, None, rng_seed)


def effective_detected_rate(source: SourceModel, bg: BackgroundModel, p_reflect: float) -> float:
    """Mean D_S click rate for a reflect probability ``p_reflect``, accidentals included."""
    if not 0.0 <= p_reflect <= 1.0:
        raise DomainError(f"p_reflect must lie in [0, 1], got {p_reflect}")
    signal = p_reflect * source.mean_rate
    if bg.signal_pass_probability != 1.0:
        signal = signal * bg.efficiency_s * bg.filter_transmission_signal
    accidental = bg.accidental_rate(source.mean_rate)
    if accidental == 0.0:
        return signal
    return signal + accidental


def fano_factor(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    mean = counts.mean()
    if mean == 0:
        return math.nan
    return counts.var(ddof=1) / mean
