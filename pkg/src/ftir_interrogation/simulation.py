"""Photon-by-photon Monte Carlo of FTIR interrogation and the EV bomb-tester baseline.

Random draws inside one run happen in a fixed order, each step only when the
configuration needs it:

1. herald count for the run window;
2. sorted arrival times (only when a bomb may stop the run);
3. one uniform per heralded photon deciding tunnel vs reflect;
4. one uniform per processed photon deciding D_S detection (non-ideal plumbing only);
5. a Poisson accidental count (only when the accidental rate is nonzero).

Run ``i`` of an ensemble uses its own generator seeded with ``base_seed + i``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import ConfigError, DomainError
from .optics import OpticalStack, SplitAmplitudes, TunnelingIndex, split_amplitudes
from .source import IDEAL_BACKGROUND, BackgroundModel, SourceModel, sample_herald_counts


class ObjectKind(str, Enum):
    ULTRA_SENSITIVE_BOMB = "bomb"
    PASSIVE_ABSORBER = "absorber"


@dataclass(frozen=True)
class TrialConfig:
    stack: OpticalStack
    source: SourceModel
    background: BackgroundModel = IDEAL_BACKGROUND
    duration: float = 1.0
    object_present: bool = True
    object_kind: ObjectKind = ObjectKind.ULTRA_SENSITIVE_BOMB
    stop_on_trigger: bool = False
    tunneling_index: TunnelingIndex = TunnelingIndex.GAP

    def __post_init__(self):
        if not self.duration > 0:
            raise ConfigError(f"duration must be positive, got {self.duration}")
        object.__setattr__(self, "object_kind", ObjectKind(self.object_kind))
        object.__setattr__(self, "tunneling_index", TunnelingIndex(self.tunneling_index))

    @property
    def split(self) -> SplitAmplitudes:
        """Amplitude split seen by the photons; no object means nothing to tunnel into."""
        if not self.object_present:
            return SplitAmplitudes(1.0, 0.0)
        return split_amplitudes(self.stack, self.tunneling_index)

    def with_object(self, present: bool) -> "TrialConfig":
        return replace(self, object_present=present)


@dataclass(frozen=True)
class RunRecord:
    heralds: int
    reflected: int
    detected_s: int
    tunneled: int
    accidentals: int
    triggered: bool
    elapsed: float


@dataclass(frozen=True)
class EnsembleAggregate:
    mean_detected_rate: float
    trigger_fraction: float
    mean_tunneled: float
    total_heralds: int
    total_tunneled: int
    total_detected: int

    @property
    def tunnel_fraction(self) -> float:
        return self.total_tunneled / self.total_heralds if self.total_heralds else math.nan


@dataclass(frozen=True)
class EnsembleResult:
    runs: int
    per_run: list[RunRecord] = field(repr=False)
    aggregate: EnsembleAggregate

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.per_run])


def simulate_run(config: TrialConfig, seed) -> RunRecord:
    rng = np.random.default_rng(seed)
    p_tunnel = config.split.p_tunnel
    bg = config.background
    is_bomb = config.object_kind is ObjectKind.ULTRA_SENSITIVE_BOMB
    may_stop = config.stop_on_trigger and is_bomb and config.object_present and p_tunnel > 0

    heralds = sample_herald_counts(config.source, config.duration, rng=rng)
    arrivals = np.sort(rng.random(heralds)) * config.duration if may_stop else None
    tunnels = rng.random(heralds) < p_tunnel

    processed = heralds
    elapsed = config.duration
    if may_stop and tunnels.any():
        first = int(np.argmax(tunnels))
        processed = first + 1
        elapsed = float(arrivals[first])
        tunnels = tunnels[:processed]

    tunneled = int(np.count_nonzero(tunnels))
    reflected = processed - tunneled
    pass_probability = bg.signal_pass_probability
    if pass_probability < 1.0:
        clicks = rng.random(processed) < pass_probability
        detected_signal = int(np.count_nonzero(clicks & ~tunnels))
    else:
        detected_signal = reflected

    accidental_rate = bg.accidental_rate(config.source.mean_rate)
    accidentals = int(rng.poisson(accidental_rate * elapsed)) if accidental_rate > 0 else 0

    return RunRecord(
        heralds=processed,
        reflected=reflected,
        detected_s=detected_signal + accidentals,
        tunneled=tunneled,
        accidentals=accidentals,
        triggered=is_bomb and tunneled > 0,
        elapsed=elapsed,
    )


def _run_block(config: TrialConfig, seeds: range) -> list[RunRecord]:
    return [simulate_run(config, s) for s in seeds]


def aggregate_runs(records: list[RunRecord]) -> EnsembleAggregate:
    # plain left-to-right fold in run order keeps the result independent of scheduling
    total_detected = sum(r.detected_s for r in records)
    total_elapsed = math.fsum(r.elapsed for r in records)
    total_tunneled = sum(r.tunneled for r in records)
    return EnsembleAggregate(
        mean_detected_rate=total_detected / total_elapsed,
        trigger_fraction=sum(r.triggered for r in records) / len(records),
        mean_tunneled=total_tunneled / len(records),
        total_heralds=sum(r.heralds for r in records),
        total_tunneled=total_tunneled,
        total_detected=total_detected,
    )


def simulate_ensemble(config: TrialConfig, runs: int, base_seed: int = 42, workers: int = 1) -> EnsembleResult:
    """Run ``runs`` independent trials seeded ``base_seed + i``.

    With ``workers > 1`` blocks of runs go to a thread pool; the records are
    reassembled in run order so the result is bitwise identical to the serial one.
    """
    if runs < 1:
        raise DomainError(f"runs must be >= 1, got {runs}")
    if workers <= 1 or runs == 1:
        records = _run_block(config, range(base_seed, base_seed + runs))
    else:
        n_blocks = min(runs, 4 * workers)
        edges = np.linspace(0, runs, n_blocks + 1).astype(int)
        blocks = [range(base_seed + lo, base_seed + hi) for lo, hi in zip(edges[:-1], edges[1:])]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = [rec for block in pool.map(lambda b: _run_block(config, b), blocks) for rec in block]
    return EnsembleResult(runs=runs, per_run=records, aggregate=aggregate_runs(records))


@dataclass(frozen=True)
class EVBaseline:
    explode_fraction: float
    dark_port_fraction: float
    bright_port_fraction: float
    efficiency: float
    counts: tuple[int, int, int] | None = None


def ev_baseline(runs: int | None, seed=42, beamsplitter_reflectivity: float = 0.5) -> EVBaseline:
    """Mach-Zehnder bomb tester with a black bomb in one arm.

    The photon enters the bomb arm with probability R and explodes it; otherwise
    the recombining beamsplitter sends it to the dark port with probability R or
    the bright port with probability 1 - R. ``runs=None`` returns the exact tree.
    """
    r = beamsplitter_reflectivity
    if not 0.0 < r < 1.0:
        raise DomainError(f"beamsplitter reflectivity must lie in (0, 1), got {r}")
    if runs is None:
        explode, dark, bright = r, (1.0 - r) * r, (1.0 - r) ** 2
        return EVBaseline(explode, dark, bright, dark / (dark + explode))
    if runs < 1:
        raise DomainError(f"runs must be >= 1, got {runs}")
    rng = np.random.default_rng(seed)
    exploded = rng.random(runs) < r
    to_dark = rng.random(runs) < r
    n_explode = int(np.count_nonzero(exploded))
    n_dark = int(np.count_nonzero(to_dark & ~exploded))
    n_bright = runs - n_explode - n_dark
    efficiency = n_dark / (n_dark + n_explode) if n_dark + n_explode else math.nan
    return EVBaseline(
        explode_fraction=n_explode / runs,
        dark_port_fraction=n_dark / runs,
        bright_port_fraction=n_bright / runs,
        efficiency=efficiency,
        counts=(n_explode, n_dark, n_bright),
    )


@dataclass(frozen=True)
class EfficiencyComparison:
    ftir_damage_free_fraction: float
    ftir_monte_carlo: float
    ev_efficiency: float
    ev_monte_carlo: float


def efficiency_comparison(config: TrialConfig, runs: int, seed: int = 42) -> EfficiencyComparison:
    """Damage-free fraction of the FTIR scheme next to the 50-50 EV efficiency.

    The Monte Carlo side keeps counting after the first trigger so every heralded
    photon contributes to the estimate.
    """
    config = replace(config, object_present=True, stop_on_trigger=False)
    analytic = config.split.p_reflect
    result = simulate_ensemble(config, runs, seed)
    agg = result.aggregate
    mc = 1.0 - agg.tunnel_fraction if agg.total_heralds else math.nan
    return EfficiencyComparison(
        ftir_damage_free_fraction=analytic,
        ftir_monte_carlo=mc,
        ev_efficiency=ev_baseline(None).efficiency,
        ev_monte_carlo=ev_baseline(max(runs, 1000), seed).efficiency,
    )
