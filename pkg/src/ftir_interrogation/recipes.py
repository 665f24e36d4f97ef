"""Named experiments. Each recipe returns a header and rows for one CSV."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .config import ResolvedConfig
from .errors import DomainError
from .optics import (
    SplitAmplitudes,
    critical_angle,
    gap_for_damage_ratio,
    penetration_depth_angular,
    penetration_depth_raw,
    split_amplitudes,
    tunneling_depth,
)
from .simulation import ev_baseline, simulate_ensemble
from .source import effective_detected_rate
from .stats import empirical_power, plan_sample_size, reject_null, t_statistic

DEFAULT_RUNS = {
    "paper-example": 10_000,
    "ev-baseline": 1_000_000,
    "power-study": 1_000,
}


def _runs(cfg: ResolvedConfig, recipe: str, override: int | None) -> int:
    if override is not None:
        return override
    if cfg.runs is not None:
        return cfg.runs
    return DEFAULT_RUNS.get(recipe, 1)


def paper_example(cfg: ResolvedConfig, seed: int, runs: int | None = None):
    """Plan at the configured damage ratio, then simulate data taking for that plan.

    The gap is moved to the distance that realizes the damage ratio and each run
    lasts the planned integration time, so observed tunneling should match
    ``expected_triggers``.
    """
    runs = _runs(cfg, "paper-example", runs)
    trial, st = cfg.trial, cfg.stats
    n0, fano = trial.source.mean_rate, trial.source.fano_factor
    plan = plan_sample_size(n0, fano, st.damage_ratio, st.threshold)
    gap = gap_for_damage_ratio(trial.stack, st.damage_ratio, trial.tunneling_index)
    stack = trial.stack.with_gap(gap)
    sim_cfg = replace(trial, stack=stack, duration=plan.integration_time, object_present=True)
    split = sim_cfg.split
    t = t_statistic(split, n0, fano, plan.required_n)
    result = simulate_ensemble(sim_cfg, runs, seed, workers=cfg.workers)
    agg = result.aggregate
    header = [
        "n0_rate", "fano", "damage_ratio", "threshold", "required_n", "integration_time_s",
        "paper_time_s", "expected_triggers", "gap_distance_nm", "xi_nm", "p_tunnel",
        "t_statistic", "reject_null", "runs", "observed_mean_tunneled",
        "observed_trigger_fraction", "observed_detected_rate", "expected_detected_rate",
    ]
    row = [
        n0, fano, st.damage_ratio, st.threshold, plan.required_n, plan.integration_time,
        plan.paper_time, plan.expected_triggers, gap, tunneling_depth(stack, trial.tunneling_index),
        split.p_tunnel, t, reject_null(t, plan.required_n, st.threshold), runs,
        agg.mean_tunneled, agg.trigger_fraction, agg.mean_detected_rate,
        effective_detected_rate(trial.source, trial.background, split.p_reflect),
    ]
    return header, [row]


def ev_baseline_recipe(cfg: ResolvedConfig, seed: int, runs: int | None = None):
    runs = _runs(cfg, "ev-baseline", runs)
    mc = ev_baseline(runs, seed, cfg.reflectivity)
    exact = ev_baseline(None, beamsplitter_reflectivity=cfg.reflectivity)
    header = [
        "reflectivity", "runs", "explode_fraction", "dark_port_fraction",
        "bright_port_fraction", "efficiency", "analytic_efficiency",
    ]
    row = [
        cfg.reflectivity, runs, mc.explode_fraction, mc.dark_port_fraction,
        mc.bright_port_fraction, mc.efficiency, exact.efficiency,
    ]
    return header, [row]


def _plan_columns(n0, fano, ratio, threshold):
    try:
        plan = plan_sample_size(n0, fano, ratio, threshold)
    except DomainError:
        return [math.inf] * 4
    return [plan.required_n, plan.integration_time, plan.paper_time, plan.expected_triggers]


def sweep_distance(cfg: ResolvedConfig, seed: int, runs: int | None = None):
    trial, st, sw = cfg.trial, cfg.stats, cfg.sweep
    n0, fano = trial.source.mean_rate, trial.source.fano_factor
    xi = tunneling_depth(trial.stack, trial.tunneling_index)
    header = [
        "d_nm", "xi_nm", "p_tunnel", "p_damage_free", "damage_ratio", "required_n",
        "integration_time_s", "paper_time_s", "expected_triggers",
    ]
    rows = []
    for d in np.linspace(sw.d_min, sw.d_max, sw.d_steps):
        split = split_amplitudes(trial.stack.with_gap(float(d)), trial.tunneling_index)
        ratio = split.p_reflect / split.p_tunnel if split.p_tunnel > 0 else math.inf
        rows.append([float(d), xi, split.p_tunnel, split.p_reflect, ratio,
                     *_plan_columns(n0, fano, ratio, st.threshold)])
    return header, rows


def sweep_angle(cfg: ResolvedConfig, seed: int, runs: int | None = None):
    trial, sw = cfg.trial, cfg.sweep
    stack = trial.stack
    theta_c = critical_angle(stack.n_incident, stack.n_gap)
    header = [
        "theta_rad", "theta_minus_critical_rad", "xi_nm", "xi_angular_nm",
        "p_tunnel", "p_damage_free",
    ]
    rows = []
    for theta in np.linspace(sw.theta_min, sw.theta_max, sw.theta_steps):
        theta = float(theta)
        angled = stack.with_angle(theta)
        split = split_amplitudes(angled, trial.tunneling_index)
        rows.append([
            theta, theta - theta_c,
            penetration_depth_raw(stack.n_incident, stack.n_gap, theta, stack.wavelength_incident),
            penetration_depth_angular(stack.n_incident, stack.n_gap, theta, stack.wavelength_incident),
            split.p_tunnel, split.p_reflect,
        ])
    return header, rows


def power_study(cfg: ResolvedConfig, seed: int, runs: int | None = None):
    """Empirical power and paired false-rejection rate per damage ratio.

    Each run spans ``power_sample_size`` sample intervals.
    """
    runs = _runs(cfg, "power-study", runs)
    trial, st = cfg.trial, cfg.stats
    duration = st.power_sample_size * st.sample_interval
    header = [
        "damage_ratio", "p_tunnel", "gap_distance_nm", "sample_size", "duration_s", "runs",
        "closed_form_t", "mean_t", "power", "mean_t_null", "false_rejection",
    ]
    rows = []
    for ratio in st.power_ratios:
        gap = gap_for_damage_ratio(trial.stack, ratio, trial.tunneling_index)
        sim_cfg = replace(trial, stack=trial.stack.with_gap(gap), duration=duration)
        res = empirical_power(sim_cfg, runs, seed, st.sample_interval, st.threshold, cfg.workers)
        rows.append([
            ratio, SplitAmplitudes.from_damage_ratio(ratio).p_tunnel, gap, res.sample_size,
            duration, runs, res.closed_form_t, res.mean_t, res.power, res.mean_t_null,
            res.false_rejection,
        ])
    return header, rows


def plan_recipe(cfg: ResolvedConfig, seed: int, runs: int | None = None):
    """Sample-size plan; the last columns repeat it at the plumbing-degraded rate."""
    trial, st = cfg.trial, cfg.stats
    n0, fano = trial.source.mean_rate, trial.source.fano_factor
    plan = plan_sample_size(n0, fano, st.damage_ratio, st.threshold)
    split = SplitAmplitudes.from_damage_ratio(st.damage_ratio)
    t = t_statistic(split, n0, fano, plan.required_n)
    effective = effective_detected_rate(trial.source, trial.background, 1.0)
    header = [
        "n0_rate", "fano", "damage_ratio", "threshold", "confidence", "required_n",
        "integration_time_s", "paper_time_s", "expected_triggers", "t_at_required_n",
        "reject_null", "effective_n0_rate", "required_n_effective",
    ]
    required_eff = _plan_columns(effective, fano, st.damage_ratio, st.threshold)[0] if effective > 0 else math.inf
    row = [
        n0, fano, st.damage_ratio, st.threshold, st.confidence, plan.required_n,
        plan.integration_time, plan.paper_time, plan.expected_triggers, t,
        reject_null(t, plan.required_n, st.threshold), effective, required_eff,
    ]
    return header, [row]


RECIPES = {
    "paper-example": paper_example,
    "ev-baseline": ev_baseline_recipe,
    "sweep-distance": sweep_distance,
    "sweep-angle": sweep_angle,
    "power-study": power_study,
    "plan": plan_recipe,
}
