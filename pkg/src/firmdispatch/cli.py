"""Command line interface.

Three commands share one configuration format: ``simulate`` runs a fixed
mix, ``optimize`` searches for the least-cost mix, and ``scenario <name>``
runs one of the named studies.  Every run writes ``run_manifest``, a
resolved configuration that reproduces the run byte for byte, alongside
``report.csv`` and, where a search ran, ``trajectory.csv``.  ``--trace``
adds the per-step ledger as ``trace.csv``.

Exit codes: 0 success, 1 I/O failure, 2 configuration or data validation
failure, 3 scenario infeasibility.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, RunConfig, parse_config, render_manifest
from .costing import CostBook
from .dispatch import CapacityMix, SimParams, simulate, write_trace_csv
from .optimizer import OptimizeOptions, SearchSpace, optimize, write_trajectory_csv
from .profiles import (
    KIND_CAPACITY_FACTOR,
    KIND_DEMAND,
    align,
    demand_stats,
    load_series,
    scale_demand,
    synthesize_dataset,
)
from .scenarios import (
    SCENARIO_NAMES,
    InfeasibleError,
    build_report,
    low_storage_extra_rows,
    run_base,
    run_fuel_sensitivity,
    run_low_storage,
    run_pv_only,
    run_residual_baseload,
    run_rigidity,
    write_report_csv,
    write_rigidity_csv,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firmdispatch",
        description="Dispatch simulation and least-cost capacity sizing for wind/solar grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "run a fixed capacity mix over the dataset"),
        ("optimize", "search for the least-cost capacity mix"),
        ("scenario", "run a named study"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        if name == "scenario":
            cmd.add_argument("name", choices=SCENARIO_NAMES, help="scenario to run")
        cmd.add_argument("--config", required=True, help="path to the run configuration file")
        cmd.add_argument("--out", default=None, help="output directory (default from config)")
        cmd.add_argument("--trace", action="store_true", help="also write the per-step trace.csv")
        cmd.add_argument(
            "--seed", type=int, default=None, help="synthetic dataset seed (synthetic runs only)"
        )
    return parser


def _load_dataset(config: RunConfig):
    if config.synthetic_hours is not None:
        return synthesize_dataset(config.seed, config.synthetic_hours, config.synthetic_droughts)
    demand = load_series(config.demand_csv, KIND_DEMAND, config.dt_hours)
    wind = load_series(config.wind_cf_csv, KIND_CAPACITY_FACTOR, config.dt_hours)
    pv = load_series(config.pv_cf_csv, KIND_CAPACITY_FACTOR, config.dt_hours)
    return align(demand, wind, pv)


def _resolve_space(config: RunConfig, peak_gw: float) -> RunConfig:
    """Fill unset search bounds from peak demand, in place on a copy."""
    step = 0.1 * peak_gw
    updates = {}
    for axis, peak_multiple in (("wind_gw", 3.0), ("pv_gw", 2.0), ("battery_power_gw", 1.5)):
        if getattr(config, f"{axis}_max") is None:
            updates[f"{axis}_max"] = peak_multiple * peak_gw
        if getattr(config, f"{axis}_step") is None:
            updates[f"{axis}_step"] = step
    return replace(config, **updates) if updates else config


def _space_from(config: RunConfig) -> SearchSpace:
    return SearchSpace(
        wind_gw=(config.wind_gw_min, config.wind_gw_max, config.wind_gw_step),
        pv_gw=(config.pv_gw_min, config.pv_gw_max, config.pv_gw_step),
        battery_power_gw=(
            config.battery_power_gw_min,
            config.battery_power_gw_max,
            config.battery_power_gw_step,
        ),
        battery_hours=config.battery_hours_ladder,
        baseload_gw=config.baseload_gw,
        baseload_eaf=config.baseload_eaf,
    )


def _params_from(config: RunConfig) -> SimParams:
    return SimParams(
        round_trip_efficiency=config.round_trip_efficiency,
        initial_soc_fraction=config.initial_soc_fraction,
        battery_charges_from_dispatch=config.battery_charges_from_dispatch,
    )


def _book_from(config: RunConfig) -> CostBook:
    return CostBook(
        capex_wind_usd_per_kw=config.capex_wind_usd_per_kw,
        capex_pv_usd_per_kw=config.capex_pv_usd_per_kw,
        capex_dispatch_usd_per_kw=config.capex_dispatch_usd_per_kw,
        capex_battery_usd_per_kwh=config.capex_battery_usd_per_kwh,
        interest_rate=config.interest_rate,
        life_wind_years=config.life_wind_years,
        life_pv_years=config.life_pv_years,
        life_dispatch_years=config.life_dispatch_years,
        life_battery_years=config.life_battery_years,
        fixed_om_wind_usd_per_kw_yr=config.fixed_om_wind_usd_per_kw_yr,
        fixed_om_pv_usd_per_kw_yr=config.fixed_om_pv_usd_per_kw_yr,
        fixed_om_dispatch_usd_per_kw_yr=config.fixed_om_dispatch_usd_per_kw_yr,
        fixed_om_battery_usd_per_kw_yr=config.fixed_om_battery_usd_per_kw_yr,
        fuel_price_usd_per_gj=config.fuel_price_usd_per_gj,
        heat_rate_gj_per_mwh=config.heat_rate_gj_per_mwh,
    )


_MIX_KEYS = ("wind_gw", "pv_gw", "battery_power_gw", "battery_hours", "dispatch_gw")


def _fixed_mix(config: RunConfig) -> CapacityMix | None:
    if all(getattr(config, key) is None for key in _MIX_KEYS):
        return None
    return CapacityMix(
        wind_gw=config.wind_gw or 0.0,
        pv_gw=config.pv_gw or 0.0,
        battery_power_gw=config.battery_power_gw or 0.0,
        battery_hours=config.battery_hours or 0.0,
        dispatch_gw=config.dispatch_gw or 0.0,
        baseload_gw=config.baseload_gw,
        baseload_eaf=config.baseload_eaf,
    )


def _run(args: argparse.Namespace) -> int:
    config_path = Path(args.config)
    text = config_path.read_text(encoding="utf-8")
    config = parse_config(text, base_dir=config_path.parent.resolve())

    if args.seed is not None:
        if config.synthetic_hours is None:
            raise ConfigError("--seed applies only to synthetic datasets")
        config.seed = args.seed
    if args.out is not None:
        config.output_dir = os.path.abspath(args.out)
    else:
        config.output_dir = os.path.abspath(config.output_dir)
    config.command = args.command
    scenario = getattr(args, "name", None)
    if args.command == "scenario":
        config.scenario = scenario

    data = _load_dataset(config)
    stats = demand_stats(data.demand)
    config = _resolve_space(config, stats.peak_gw)
    params = _params_from(config)
    book = _book_from(config)
    options = OptimizeOptions(
        refine_tolerance_gw=config.refine_tolerance_gw,
        refine_tolerance_hours=config.refine_tolerance_hours,
    )

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[str] = []

    def _write_report(reports, extra_rows=()) -> None:
        write_report_csv(out_dir / "report.csv", reports, extra_rows=extra_rows)
        written.append("report.csv")

    def _write_trajectory(optim, filename="trajectory.csv") -> None:
        write_trajectory_csv(optim, out_dir / filename)
        written.append(filename)

    def _write_trace(mix, dataset, filename="trace.csv") -> None:
        result = simulate(mix, dataset, params, keep_trace=True)
        write_trace_csv(result.trace, out_dir / filename)
        written.append(filename)

    if args.command == "simulate":
        mix = _fixed_mix(config)
        if mix is None:
            raise ConfigError(
                "simulate needs a fixed mix: set at least one of "
                + ", ".join(_MIX_KEYS)
            )
        result = simulate(mix, data, params, keep_trace=args.trace)
        _write_report(build_report(mix, result, data, label="simulate"))
        if args.trace:
            write_trace_csv(result.trace, out_dir / "trace.csv")
            written.append("trace.csv")

    elif args.command == "optimize":
        space = _space_from(config)
        optim = optimize(space, data, params, book, options)
        _write_report(build_report(optim.best.mix, optim.best.result, data, label="optimize"))
        _write_trajectory(optim)
        if args.trace:
            _write_trace(optim.best.mix, data)

    elif scenario == "base":
        report, optim = run_base(data, params, book, _space_from(config), options)
        _write_report(report)
        _write_trajectory(optim)
        if args.trace:
            _write_trace(optim.best.mix, data)

    elif scenario == "low-storage":
        report, delta, optim = run_low_storage(
            data, params, book, _space_from(config), config.battery_price_usd_per_kwh, options
        )
        _write_report(report, extra_rows=low_storage_extra_rows(delta))
        _write_trajectory(optim)
        if args.trace:
            _write_trace(optim.best.mix, data)

    elif scenario == "pv-only":
        report = run_pv_only(data, params, book)
        _write_report(report)
        if args.trace:
            mix = CapacityMix(
                pv_gw=report.pv_gw,
                battery_power_gw=report.battery_power_gw,
                battery_hours=report.battery_hours,
            )
            _write_trace(mix, data)

    elif scenario == "rigidity":
        mix = _fixed_mix(config)
        if mix is None:
            pv_report = run_pv_only(data, params, book)
            mix = CapacityMix(
                pv_gw=pv_report.pv_gw,
                battery_power_gw=pv_report.battery_power_gw,
                battery_hours=pv_report.battery_hours,
            )
        rigidity = run_rigidity(mix, data, params, step=config.rigidity_step)
        write_rigidity_csv(out_dir / "report.csv", rigidity)
        written.append("report.csv")
        if args.trace:
            scaled = scale_demand(data, rigidity.failure_multiplier)
            sized = replace(mix, dispatch_gw=rigidity.required_dispatch_gw)
            _write_trace(sized, scaled)

    elif scenario == "residual-baseload":
        if config.baseload_gw <= 0.0:
            raise ConfigError("residual-baseload needs baseload_gw > 0 in the configuration")
        report, optim = run_residual_baseload(
            data,
            params,
            book,
            _space_from(config),
            baseload_gw=config.baseload_gw,
            eaf=config.baseload_eaf,
            options=options,
        )
        _write_report(report)
        _write_trajectory(optim)
        if args.trace:
            _write_trace(optim.best.mix, data)

    elif scenario == "fuel-sensitivity":
        runs = run_fuel_sensitivity(
            data, params, book, _space_from(config), config.fuel_prices_usd_per_gj, options
        )
        _write_report([report for _, report, _ in runs])
        for price, _, optim in runs:
            _write_trajectory(optim, f"trajectory_fuel_{price:g}.csv")
            if args.trace:
                _write_trace(optim.best.mix, data, f"trace_fuel_{price:g}.csv")

    else:  # pragma: no cover - argparse restricts the choices
        raise ConfigError(f"unknown command {args.command!r}")

    (out_dir / "run_manifest").write_text(render_manifest(config), encoding="utf-8")
    written.append("run_manifest")
    print(f"wrote {', '.join(written)} to {out_dir}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
