"""Run configuration files.

A run file is flat ``key: value`` text: one setting per line, ``#`` lines
and blank lines ignored.  Keys are checked strictly, an unknown or repeated
key is an error rather than a silent ignore.  ``render_manifest`` writes a
resolved configuration back out in the same format, so a run manifest is
itself a valid configuration that reproduces the run.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    """A configuration file is malformed or inconsistent."""


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected a comma separated list of numbers")
    return tuple(float(p) for p in parts)


def _parse_windows(text: str) -> tuple[tuple[int, int], ...]:
    windows = []
    for part in (p.strip() for p in text.split(";")):
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        if not sep:
            raise ValueError(f"expected start-end hour windows, got {part!r}")
        windows.append((int(lo), int(hi)))
    if not windows:
        raise ValueError("expected at least one start-end window")
    return tuple(windows)


@dataclass
class RunConfig:
    """Every setting a run can carry, with unset optionals left as None."""

    # Dataset: either three CSV paths or a synthetic specification.
    demand_csv: str | None = None
    wind_cf_csv: str | None = None
    pv_cf_csv: str | None = None
    dt_hours: float = 1.0
    synthetic_hours: int | None = None
    synthetic_droughts: tuple[tuple[int, int], ...] | None = None
    seed: int = 1

    # Storage model.
    round_trip_efficiency: float = 0.85
    initial_soc_fraction: float = 0.0
    battery_charges_from_dispatch: bool = False

    # Cost book.
    capex_wind_usd_per_kw: float = 1200.0
    capex_pv_usd_per_kw: float = 1000.0
    capex_dispatch_usd_per_kw: float = 800.0
    capex_battery_usd_per_kwh: float = 200.0
    interest_rate: float = 0.08
    life_wind_years: int = 30
    life_pv_years: int = 30
    life_dispatch_years: int = 30
    life_battery_years: int = 15
    fixed_om_wind_usd_per_kw_yr: float = 0.0
    fixed_om_pv_usd_per_kw_yr: float = 0.0
    fixed_om_dispatch_usd_per_kw_yr: float = 8.0
    fixed_om_battery_usd_per_kw_yr: float = 0.0
    fuel_price_usd_per_gj: float = 20.0
    heat_rate_gj_per_mwh: float = 10.0

    # Search space; unset bounds scale to peak demand at run time.
    wind_gw_min: float = 0.0
    wind_gw_max: float | None = None
    wind_gw_step: float | None = None
    pv_gw_min: float = 0.0
    pv_gw_max: float | None = None
    pv_gw_step: float | None = None
    battery_power_gw_min: float = 0.0
    battery_power_gw_max: float | None = None
    battery_power_gw_step: float | None = None
    battery_hours_ladder: tuple[float, ...] = (0.0, 1.0, 2.0, 4.0, 8.0, 12.0, 24.0, 36.0, 48.0)
    refine_tolerance_gw: float = 0.1
    refine_tolerance_hours: float = 0.5

    # Fixed mix for simulate and rigidity runs.
    wind_gw: float | None = None
    pv_gw: float | None = None
    battery_power_gw: float | None = None
    battery_hours: float | None = None
    dispatch_gw: float | None = None

    # Baseload, shared by simulate and the residual-baseload scenario.
    baseload_gw: float = 0.0
    baseload_eaf: float = 0.70

    # Scenario selection and knobs.
    command: str | None = None
    scenario: str | None = None
    battery_price_usd_per_kwh: float = 10.0
    fuel_prices_usd_per_gj: tuple[float, ...] = (20.0, 10.0)
    rigidity_step: float = 0.01
    output_dir: str = "out"


_INT_KEYS = {
    "synthetic_hours",
    "seed",
    "life_wind_years",
    "life_pv_years",
    "life_dispatch_years",
    "life_battery_years",
}
_BOOL_KEYS = {"battery_charges_from_dispatch"}
_STR_KEYS = {"demand_csv", "wind_cf_csv", "pv_cf_csv", "command", "scenario", "output_dir"}
_LIST_KEYS = {"battery_hours_ladder", "fuel_prices_usd_per_gj"}
_WINDOW_KEYS = {"synthetic_droughts"}
_PATH_KEYS = ("demand_csv", "wind_cf_csv", "pv_cf_csv", "output_dir")

_ALL_KEYS = {f.name for f in fields(RunConfig)}


def _convert(key: str, text: str):
    if key in _STR_KEYS:
        return text
    if key in _BOOL_KEYS:
        return _parse_bool(text)
    if key in _INT_KEYS:
        return int(text)
    if key in _LIST_KEYS:
        return _parse_float_list(text)
    if key in _WINDOW_KEYS:
        return _parse_windows(text)
    return float(text)


def parse_config(text: str, base_dir: str | os.PathLike | None = None) -> RunConfig:
    """Parse run configuration text.

    Relative dataset and output paths are resolved against ``base_dir``,
    normally the directory of the configuration file.

    Raises
    ------
    ConfigError
        On syntax errors, unknown or repeated keys, unparseable values, or
        an inconsistent dataset specification.
    """
    values: dict[str, object] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            raise ConfigError(f"line {line_no}: expected 'key: value', got {raw!r}")
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {line_no}: repeated key {key!r}")
        if not value:
            raise ConfigError(f"line {line_no}: key {key!r} has no value")
        try:
            values[key] = _convert(key, value)
        except ValueError as exc:
            raise ConfigError(f"line {line_no}: bad value for {key!r}: {exc}") from None

    config = RunConfig(**values)
    if base_dir is not None:
        base = Path(base_dir)
        for key in _PATH_KEYS:
            current = getattr(config, key)
            if current is not None and not os.path.isabs(current):
                setattr(config, key, str(base / current))
    _validate(config)
    return config


def _validate(config: RunConfig) -> None:
    csv_keys = ("demand_csv", "wind_cf_csv", "pv_cf_csv")
    given = [k for k in csv_keys if getattr(config, k) is not None]
    if config.synthetic_hours is not None:
        if given:
            raise ConfigError(
                f"give either CSV paths or synthetic_hours, not both (found {given[0]!r})"
            )
    elif len(given) != len(csv_keys):
        missing = [k for k in csv_keys if getattr(config, k) is None]
        raise ConfigError(f"missing mandatory dataset key {missing[0]!r} (or set synthetic_hours)")

    if config.dt_hours not in (1.0, 0.5):
        raise ConfigError(f"dt_hours must be 1.0 or 0.5, got {config.dt_hours!r}")
    if config.synthetic_hours is not None and config.synthetic_hours < 24:
        raise ConfigError(f"synthetic_hours must be at least 24, got {config.synthetic_hours}")
    if config.seed < 0:
        raise ConfigError(f"seed must be nonnegative, got {config.seed}")

    for name in ("rigidity_step",):
        value = getattr(config, name)
        if not (0.0 < value < 1.0):
            raise ConfigError(f"{name} must be in (0, 1), got {value!r}")

    mix_keys = ("wind_gw", "pv_gw", "battery_power_gw", "battery_hours", "dispatch_gw")
    for name in mix_keys:
        value = getattr(config, name)
        if value is not None and not (math.isfinite(value) and value >= 0.0):
            raise ConfigError(f"{name} must be finite and >= 0, got {value!r}")

    if config.scenario is not None:
        from .scenarios import SCENARIO_NAMES

        if config.scenario not in SCENARIO_NAMES:
            raise ConfigError(
                f"unknown scenario {config.scenario!r}, expected one of {SCENARIO_NAMES}"
            )
    if config.command is not None and config.command not in ("simulate", "optimize", "scenario"):
        raise ConfigError(f"unknown command {config.command!r}")


def _render_value(key: str, value) -> str:
    if key in _LIST_KEYS:
        return ",".join(repr(float(v)) for v in value)
    if key in _WINDOW_KEYS:
        return ";".join(f"{int(lo)}-{int(hi)}" for lo, hi in value)
    if key in _BOOL_KEYS:
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_manifest(config: RunConfig) -> str:
    """Render a configuration in run-file format, one line per set key.

    Optionals that are unset are omitted.  Parsing the result reproduces the
    configuration, which is what makes a written manifest re-runnable.
    """
    lines = ["# resolved run configuration"]
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        lines.append(f"{f.name}: {_render_value(f.name, value)}")
    return "\n".join(lines) + "\n"
