"""TOML run configuration: schema, defaults, validation, digest.

Keys may sit at the top level or inside their section table. Each key belongs to
exactly one section, carries its unit in the name, and may also be written with
its short alias (``theta_i`` for ``theta_i_rad``). Unknown keys are errors.
"""

from __future__ import annotations

import difflib
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, InterrogationError, SingularityError
from .optics import OpticalStack, TunnelingIndex, critical_angle, tunneling_depth
from .simulation import ObjectKind, TrialConfig
from .source import BackgroundModel, Distribution, SourceModel
from .stats import ONE_SIDED_99, TWO_SIDED_99

REQUIRED = object()

# canonical key -> (section, type, default)
SCHEMA: dict[str, tuple[str, type, Any]] = {
    "n_i": ("optics", float, REQUIRED),
    "n_r": ("optics", float, REQUIRED),
    "n_t": ("optics", float, REQUIRED),
    "theta_i_rad": ("optics", float, REQUIRED),
    "lambda_i_nm": ("optics", float, REQUIRED),
    "d_nm": ("optics", float, REQUIRED),
    "tunneling_index": ("optics", str, "gap"),
    "n0_rate": ("source", float, REQUIRED),
    "fano": ("source", float, 1.0),
    "distribution": ("source", str, None),
    "pump_background_rate": ("background", float, 0.0),
    "filter_transmission_signal": ("background", float, 1.0),
    "filter_rejection_pump": ("background", float, 1.0),
    "coincidence_window_s": ("background", float, 1e-9),
    "dark_rate_s": ("background", float, 0.0),
    "dark_rate_i": ("background", float, 0.0),
    "efficiency_s": ("background", float, 1.0),
    "efficiency_i": ("background", float, 1.0),
    "T_s": ("run", float, REQUIRED),
    "object_present": ("run", bool, True),
    "object_kind": ("run", str, "bomb"),
    "stop_on_trigger": ("run", bool, False),
    "runs": ("run", int, None),
    "seed": ("run", int, 42),
    "workers": ("run", int, 1),
    "threshold": ("stats", float, None),
    "one_sided": ("stats", bool, False),
    "confidence": ("stats", float, 0.99),
    "damage_ratio": ("stats", float, 100.0),
    "sample_interval_s": ("stats", float, 1.0),
    "power_sample_size": ("stats", int, 100),
    "power_ratios": ("stats", list, [100.0, 49.5]),
    "beamsplitter_reflectivity": ("ev", float, 0.5),
    "d_min_nm": ("sweep", float, 10.0),
    "d_max_nm": ("sweep", float, 500.0),
    "d_steps": ("sweep", int, 50),
    "theta_min_rad": ("sweep", float, None),
    "theta_max_rad": ("sweep", float, math.pi / 2),
    "theta_steps": ("sweep", int, 100),
}

ALIASES = {
    "theta_i": "theta_i_rad",
    "lambda_i": "lambda_i_nm",
    "d": "d_nm",
    "T": "T_s",
    "eta": "fano",
    "coincidence_window": "coincidence_window_s",
    "sample_interval": "sample_interval_s",
}

SECTIONS = sorted({section for section, _, _ in SCHEMA.values()})

DEFAULT_CONFIG_TEXT = """\
# Worked-example operating point: glass/air interface, 672.43 heralded photons/s.
[optics]
n_i = 1.5
n_r = 1.0
n_t = 1.5
theta_i_rad = 1.2
lambda_i_nm = 500.0
d_nm = 1000.0

[source]
n0_rate = 672.43

[run]
T_s = 0.15
"""


@dataclass(frozen=True)
class StatsParams:
    threshold: float
    confidence: float
    damage_ratio: float
    one_sided: bool
    sample_interval: float
    power_sample_size: int
    power_ratios: tuple[float, ...]


@dataclass(frozen=True)
class SweepParams:
    d_min: float
    d_max: float
    d_steps: int
    theta_min: float
    theta_max: float
    theta_steps: int


@dataclass(frozen=True)
class ResolvedConfig:
    trial: TrialConfig
    stats: StatsParams
    sweep: SweepParams
    runs: int | None
    seed: int
    workers: int
    reflectivity: float
    values: dict

    @property
    def digest(self) -> str:
        blob = json.dumps(self.values, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _unknown(key: str, where: str) -> ConfigError:
    known = list(SCHEMA) + list(ALIASES) + SECTIONS
    hint = difflib.get_close_matches(key, known, n=1)
    suffix = f" (did you mean '{hint[0]}'?)" if hint else ""
    return ConfigError(f"unknown key '{key}' in {where}{suffix}")


def _flatten(raw: dict) -> dict:
    flat: dict[str, Any] = {}

    def put(key, value, where, section=None):
        canonical = ALIASES.get(key, key)
        if canonical not in SCHEMA:
            raise _unknown(key, where)
        expected_section = SCHEMA[canonical][0]
        if section is not None and section != expected_section:
            raise ConfigError(f"key '{key}' belongs in [{expected_section}], found in [{section}]")
        if canonical in flat:
            raise ConfigError(f"key '{canonical}' given more than once")
        flat[canonical] = value

    for key, value in raw.items():
        if isinstance(value, dict):
            if key not in SECTIONS:
                raise _unknown(key, "the top level")
            for sub, sub_value in value.items():
                put(sub, sub_value, f"[{key}]", key)
        else:
            put(key, value, "the top level")
    return flat


def _coerce(key: str, value: Any) -> Any:
    kind = SCHEMA[key][1]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"'{key}' must be a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(f"'{key}' must be finite, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"'{key}' must be an integer, got {value!r}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"'{key}' must be true or false, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"'{key}' must be a string, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"'{key}' must be a non-empty list")
        return [_coerce_number(key, v) for v in value]
    raise AssertionError(kind)


def _coerce_number(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{key}' entries must be numbers, got {value!r}")
    return float(value)


def _build(values: dict, label: str, make):
    try:
        return make()
    except SingularityError:
        raise
    except (InterrogationError, ValueError) as exc:
        raise ConfigError(f"invalid {label}: {exc}") from exc


def resolve(raw: dict) -> ResolvedConfig:
    """Apply defaults and run every field and cross-field check."""
    flat = _flatten(raw)
    values = {}
    for key, (section, _, default) in SCHEMA.items():
        if key in flat:
            values[key] = _coerce(key, flat[key])
        elif default is REQUIRED:
            raise ConfigError(f"missing required key '{key}' in [{section}]")
        else:
            values[key] = default

    v = values
    if not v["n_i"] > v["n_r"] > 0:
        raise ConfigError(
            f"TIR precondition violated: need n_i > n_r > 0, got n_i={v['n_i']}, n_r={v['n_r']}"
        )
    theta_c = critical_angle(v["n_i"], v["n_r"])
    if not v["theta_i_rad"] > theta_c:
        raise ConfigError(
            f"TIR precondition violated: theta_i_rad={v['theta_i_rad']} must exceed "
            f"the critical angle {theta_c:.9g} rad"
        )
    stack = _build(v, "[optics]", lambda: OpticalStack(
        n_incident=v["n_i"], n_gap=v["n_r"], n_object=v["n_t"],
        theta_incidence=v["theta_i_rad"], wavelength_incident=v["lambda_i_nm"],
        gap_distance=v["d_nm"],
    ))
    tunneling = _build(v, "tunneling_index", lambda: TunnelingIndex(v["tunneling_index"]))
    # raises SingularityError if the chosen index gives no evanescent decay
    tunneling_depth(stack, tunneling)

    source = _build(v, "[source]", lambda: SourceModel(
        mean_rate=v["n0_rate"], fano_factor=v["fano"],
        distribution=None if v["distribution"] is None else Distribution(v["distribution"]),
    ))
    background = _build(v, "[background]", lambda: BackgroundModel(
        pump_background_rate=v["pump_background_rate"],
        filter_transmission_signal=v["filter_transmission_signal"],
        filter_rejection_pump=v["filter_rejection_pump"],
        coincidence_window=v["coincidence_window_s"],
        dark_rate_s=v["dark_rate_s"], dark_rate_i=v["dark_rate_i"],
        efficiency_s=v["efficiency_s"], efficiency_i=v["efficiency_i"],
    ))
    trial = _build(v, "[run]", lambda: TrialConfig(
        stack=stack, source=source, background=background, duration=v["T_s"],
        object_present=v["object_present"], object_kind=ObjectKind(v["object_kind"]),
        stop_on_trigger=v["stop_on_trigger"], tunneling_index=tunneling,
    ))

    threshold = v["threshold"]
    if threshold is None:
        threshold = ONE_SIDED_99 if v["one_sided"] else TWO_SIDED_99
    if not threshold > 0:
        raise ConfigError(f"threshold must be positive, got {threshold}")
    if not 0 < v["confidence"] < 1:
        raise ConfigError(f"confidence must lie in (0, 1), got {v['confidence']}")
    if not v["damage_ratio"] > 0:
        raise ConfigError(f"damage_ratio must be positive, got {v['damage_ratio']}")
    if not v["sample_interval_s"] > 0:
        raise ConfigError("sample_interval_s must be positive")
    if v["power_sample_size"] <= 30:
        raise ConfigError("power_sample_size must exceed 30 for the rejection rule to apply")
    if any(r <= 0 for r in v["power_ratios"]):
        raise ConfigError("power_ratios entries must be positive")
    stats = StatsParams(
        threshold=threshold, confidence=v["confidence"], damage_ratio=v["damage_ratio"],
        one_sided=v["one_sided"], sample_interval=v["sample_interval_s"],
        power_sample_size=v["power_sample_size"], power_ratios=tuple(v["power_ratios"]),
    )

    theta_min = v["theta_min_rad"] if v["theta_min_rad"] is not None else theta_c + 1e-3
    if not theta_c < theta_min < v["theta_max_rad"] <= math.pi / 2:
        raise ConfigError(
            f"angle sweep needs critical angle {theta_c:.9g} < theta_min_rad < theta_max_rad <= pi/2"
        )
    if not 0 < v["d_min_nm"] < v["d_max_nm"]:
        raise ConfigError("distance sweep needs 0 < d_min_nm < d_max_nm")
    if v["d_steps"] < 2 or v["theta_steps"] < 2:
        raise ConfigError("sweeps need at least 2 steps")
    sweep = SweepParams(v["d_min_nm"], v["d_max_nm"], v["d_steps"], theta_min, v["theta_max_rad"], v["theta_steps"])

    if v["runs"] is not None and v["runs"] < 1:
        raise ConfigError("runs must be >= 1")
    if not 0 <= v["seed"] < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if v["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    if not 0 < v["beamsplitter_reflectivity"] < 1:
        raise ConfigError("beamsplitter_reflectivity must lie in (0, 1)")

    return ResolvedConfig(
        trial=trial, stats=stats, sweep=sweep, runs=v["runs"], seed=v["seed"],
        workers=v["workers"], reflectivity=v["beamsplitter_reflectivity"], values=values,
    )


def loads(text: str) -> ResolvedConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    return resolve(raw)


def parse_config(path) -> ResolvedConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        return loads(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
