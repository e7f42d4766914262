"""Named system studies and their reports.

Each scenario wraps the simulator and optimizer into one question: what does
the least-cost system look like (base), does cheap storage displace firm
capacity (low-storage), how much PV and battery would a solar-only system
need (pv-only), how close to its limit does such a system run (rigidity),
what changes when legacy baseload stays online (residual-baseload), and how
does the answer move with fuel price (fuel-sensitivity).

Reports render to CSV with one row per figure, using the conventional table
row labels, values at full precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .costing import CostBook
from .dispatch import CapacityMix, DispatchResult, SimParams, DEFAULT_PARAMS, simulate, size_dispatch
from .optimizer import (
    DEFAULT_OPTIONS,
    OptimResult,
    OptimizeOptions,
    SearchSpace,
    default_space,
    optimize,
)
from .profiles import AlignedDataset, demand_stats, scale_demand

SCENARIO_NAMES = (
    "base",
    "low-storage",
    "pv-only",
    "rigidity",
    "residual-baseload",
    "fuel-sensitivity",
)


class InfeasibleError(Exception):
    """The requested system cannot serve demand within the given bounds."""


@dataclass(frozen=True)
class ScenarioReport:
    """Physical summary of one sized system, shaped like the result tables."""

    label: str
    annual_demand_twh: float
    peak_gw: float
    average_gw: float
    baseload_gw: float
    baseload_eaf_pct: float
    baseload_energy_twh: float
    net_peak_gw: float
    wind_gw: float
    wind_energy_twh: float
    wind_cf_pct: float
    wind_pct_of_peak: float
    pv_gw: float
    pv_energy_twh: float
    pv_cf_pct: float
    pv_pct_of_peak: float
    battery_power_gw: float
    battery_hours: float
    battery_energy_gwh: float
    dispatch_gw: float
    dispatch_energy_twh: float
    dispatch_cf_pct: float
    dispatch_pct_of_peak: float
    dispatch_pct_of_average: float
    dispatch_pct_of_net_peak: float
    renewable_gen_twh: float
    curtailed_twh: float
    curtailed_pct: float


@dataclass(frozen=True)
class RigidityReport:
    """Outcome of pushing demand up until a mix without firm backup fails."""

    annual_demand_twh: float
    test_demand_twh: float
    failure_multiplier: float
    required_dispatch_gw: float
    required_dispatch_energy_gwh: float
    dispatch_pct_of_average: float


@dataclass(frozen=True)
class LowStorageDelta:
    """Firm capacity comparison between base and cheap-storage optima."""

    battery_price_usd_per_kwh: float
    base_dispatch_gw: float
    dispatch_gw: float
    dispatch_delta_gw: float
    base_dispatch_energy_twh: float
    dispatch_energy_twh: float


def build_report(
    mix: CapacityMix,
    result: DispatchResult,
    data: AlignedDataset,
    label: str = "",
) -> ScenarioReport:
    """Assemble the table-shaped report for one simulated mix.

    Percent rows are recomputed from the unrounded operands on this report,
    never copied from rounded figures.  Baseload energy uses the flat-output
    convention ``baseload_gw * eaf * hours`` regardless of curtailment
    against low demand; net peak is the demand peak net of that flat output.
    """
    stats = demand_stats(data.demand)
    peak = stats.peak_gw
    baseload_out = mix.baseload_gw * mix.baseload_eaf
    net_peak = float(np.max(np.maximum(data.demand.values - baseload_out, 0.0)))

    def pct_of(value: float, base: float) -> float:
        # all-zero demand makes every percent-of-demand row 0, not a crash
        return 100.0 * value / base if base > 0.0 else 0.0

    return ScenarioReport(
        label=label,
        annual_demand_twh=stats.annual_energy_twh,
        peak_gw=peak,
        average_gw=stats.average_gw,
        baseload_gw=mix.baseload_gw,
        baseload_eaf_pct=100.0 * mix.baseload_eaf,
        baseload_energy_twh=mix.baseload_gw * mix.baseload_eaf * data.total_hours / 1000.0,
        net_peak_gw=net_peak,
        wind_gw=mix.wind_gw,
        wind_energy_twh=result.wind_energy_twh,
        wind_cf_pct=100.0 * result.wind_cf,
        wind_pct_of_peak=pct_of(mix.wind_gw, peak),
        pv_gw=mix.pv_gw,
        pv_energy_twh=result.pv_energy_twh,
        pv_cf_pct=100.0 * result.pv_cf,
        pv_pct_of_peak=pct_of(mix.pv_gw, peak),
        battery_power_gw=mix.battery_power_gw,
        battery_hours=mix.battery_hours,
        battery_energy_gwh=mix.battery_power_gw * mix.battery_hours,
        dispatch_gw=mix.dispatch_gw,
        dispatch_energy_twh=result.dispatch_energy_twh,
        dispatch_cf_pct=100.0 * result.dispatch_cf,
        dispatch_pct_of_peak=pct_of(mix.dispatch_gw, peak),
        dispatch_pct_of_average=pct_of(mix.dispatch_gw, stats.average_gw),
        dispatch_pct_of_net_peak=pct_of(mix.dispatch_gw, net_peak),
        renewable_gen_twh=result.renewable_gen_twh,
        curtailed_twh=result.curtailed_twh,
        curtailed_pct=100.0 * result.curtailed_fraction,
    )


def run_base(
    data: AlignedDataset,
    params: SimParams = DEFAULT_PARAMS,
    book: CostBook | None = None,
    space: SearchSpace | None = None,
    options: OptimizeOptions = DEFAULT_OPTIONS,
) -> tuple[ScenarioReport, OptimResult]:
    """Least-cost wind, PV, battery, and firm capacity with no baseload."""
    book = book if book is not None else CostBook()
    if space is None:
        space = default_space(demand_stats(data.demand))
    if space.baseload_gw != 0.0:
        raise ValueError("the base scenario carries no baseload, use residual-baseload instead")
    optim = optimize(space, data, params, book, options)
    report = build_report(optim.best.mix, optim.best.result, data, label="base")
    return report, optim


def run_low_storage(
    data: AlignedDataset,
    params: SimParams = DEFAULT_PARAMS,
    book: CostBook | None = None,
    space: SearchSpace | None = None,
    battery_price: float = 10.0,
    options: OptimizeOptions = DEFAULT_OPTIONS,
) -> tuple[ScenarioReport, LowStorageDelta, OptimResult]:
    """Re-optimize with cheap storage and compare firm capacity to base.

    With ``battery_price`` equal to the book value this reproduces the base
    optimum exactly.
    """
    book = book if book is not None else CostBook()
    if not (math.isfinite(battery_price) and battery_price >= 0.0):
        raise ValueError(f"battery_price must be finite and >= 0, got {battery_price!r}")
    _, base_optim = run_base(data, params, book, space, options)
    cheap_book = replace(book, capex_battery_usd_per_kwh=battery_price)
    _, optim = run_base(data, params, cheap_book, space, options)
    report = build_report(optim.best.mix, optim.best.result, data, label="low-storage")
    base_mix = base_optim.best.mix
    delta = LowStorageDelta(
        battery_price_usd_per_kwh=battery_price,
        base_dispatch_gw=base_mix.dispatch_gw,
        dispatch_gw=optim.best.mix.dispatch_gw,
        dispatch_delta_gw=optim.best.mix.dispatch_gw - base_mix.dispatch_gw,
        base_dispatch_energy_twh=base_optim.best.result.dispatch_energy_twh,
        dispatch_energy_twh=optim.best.result.dispatch_energy_twh,
    )
    return report, delta, optim


def _pv_probe_mix(pv_gw: float, power_gw: float, energy_gwh: float) -> CapacityMix:
    hours = energy_gwh / power_gw if power_gw > 0.0 else 0.0
    return CapacityMix(
        wind_gw=0.0,
        pv_gw=pv_gw,
        battery_power_gw=power_gw,
        battery_hours=hours,
        dispatch_gw=0.0,
    )


def run_pv_only(
    data: AlignedDataset,
    params: SimParams = DEFAULT_PARAMS,
    book: CostBook | None = None,
    pv_tol_gw: float = 0.01,
    energy_tol_gwh: float = 0.1,
    max_pv_gw: float | None = None,
    max_battery_energy_gwh: float | None = None,
) -> ScenarioReport:
    """Smallest PV and battery serving all demand with no wind or firm plant.

    Sizing is resource-driven, so ``book`` is accepted for signature
    symmetry but takes no part.  Bisection on PV capacity with an
    effectively unconstrained battery finds the least PV; bisection on
    battery energy at that PV finds the least storage.  A probe counts as
    feasible only if no demand goes unserved and the battery ends the
    period no lower than it started: the initial charge
    (``params.initial_soc_fraction``) bootstraps a dataset that begins at
    night, but panels, not the starting inventory, must carry the year.
    Reported battery power is the largest charge or discharge flow actually
    used, so the reported mix reproduces the zero-unserved result.

    Raises
    ------
    InfeasibleError
        If no PV within bounds serves all demand, or the battery energy
        bound is too small.
    """
    stats = demand_stats(data.demand)
    peak = stats.peak_gw
    if peak == 0.0:
        zero = _pv_probe_mix(0.0, 0.0, 0.0)
        return build_report(zero, simulate(zero, data, params), data, label="pv-only")

    pv_cap = max_pv_gw if max_pv_gw is not None else 1e6 * peak
    huge_energy = 1e9 * max(peak, 1.0)
    if max_battery_energy_gwh is not None:
        huge_energy = min(huge_energy, max_battery_energy_gwh)

    def probe(pv_gw: float, energy_gwh: float) -> tuple[DispatchResult, bool]:
        if max_battery_energy_gwh is not None:
            energy_gwh = min(energy_gwh, max_battery_energy_gwh)
        power = max(peak, pv_gw) if energy_gwh > 0.0 else 0.0
        mix = _pv_probe_mix(pv_gw, power, energy_gwh)
        result = simulate(mix, data, params, keep_trace=True)
        initial_soc = params.initial_soc_fraction * mix.battery_energy_gwh
        closed = result.final_soc_gwh + 1e-9 >= initial_soc
        return result, result.unserved_energy_twh == 0.0 and closed

    def feasible_pv(pv_gw: float) -> bool:
        return probe(pv_gw, huge_energy)[1]

    if feasible_pv(0.0):
        pv_star = 0.0
    else:
        hi = max(peak, 1.0)
        while hi <= pv_cap and not feasible_pv(hi):
            hi *= 2.0
        if hi > pv_cap:
            if not (max_pv_gw is not None and feasible_pv(pv_cap)):
                raise InfeasibleError(
                    f"no PV capacity up to {pv_cap:g} GW serves all demand "
                    "within the battery bound"
                )
            hi = pv_cap
        lo = 0.0
        while hi - lo > pv_tol_gw:
            mid = 0.5 * (lo + hi)
            if feasible_pv(mid):
                hi = mid
            else:
                lo = mid
        pv_star = hi

    # Least battery energy at the sized PV.  With no initial charge the
    # unconstrained run bounds it tightly: a cap at the highest state of
    # charge ever reached never binds.  With an initial charge the starting
    # inventory scales with capacity, so the tight bound must be re-probed
    # and falls back to the unconstrained size.
    unconstrained, _ = probe(pv_star, huge_energy)
    energy_hi = float(np.max(unconstrained.trace.soc_gwh)) * (1.0 + 1e-9) + 1e-9
    energy_hi = min(energy_hi, huge_energy)
    if not probe(pv_star, energy_hi)[1]:
        energy_hi = huge_energy
    lo, hi = 0.0, energy_hi
    if probe(pv_star, 0.0)[1]:
        hi = 0.0
    while hi - lo > energy_tol_gwh:
        mid = 0.5 * (lo + hi)
        if probe(pv_star, mid)[1]:
            hi = mid
        else:
            lo = mid
    energy_star = hi

    final, _ = probe(pv_star, energy_star)
    flows = max(
        float(np.max(final.trace.battery_charge_gw)),
        float(np.max(final.trace.battery_discharge_gw)),
    )
    if energy_star > 0.0 and flows > 0.0:
        power_star = flows
        hours_star = energy_star / power_star
    else:
        power_star, hours_star, energy_star = 0.0, 0.0, 0.0

    mix = CapacityMix(
        wind_gw=0.0,
        pv_gw=pv_star,
        battery_power_gw=power_star,
        battery_hours=hours_star,
        dispatch_gw=0.0,
    )
    result = simulate(mix, data, params)
    if result.unserved_energy_twh != 0.0:
        raise RuntimeError("sized PV-only mix failed to reproduce a served system")
    return build_report(mix, result, data, label="pv-only")


def run_rigidity(
    mix: CapacityMix,
    data: AlignedDataset,
    params: SimParams = DEFAULT_PARAMS,
    step: float = 0.01,
    max_multiplier: float = 2.0,
) -> RigidityReport:
    """Scale demand up until the mix fails, then size the firm gap.

    Demand is raised in multiples of ``step`` from 1.  At the first
    multiplier with unserved energy, the report states the firm capacity and
    energy that would have balanced the scaled year.

    Raises
    ------
    ValueError
        If the mix does not serve the unscaled demand, or no failure occurs
        up to ``max_multiplier`` (a mix with firm backup does not fail).
    """
    if not (0.0 < step < 1.0):
        raise ValueError(f"step must be in (0, 1), got {step!r}")
    if simulate(mix, data, params).unserved_energy_twh > 0.0:
        raise ValueError("mix does not serve the baseline demand, rigidity is undefined")

    k = 1
    while True:
        multiplier = 1.0 + k * step
        if multiplier > max_multiplier:
            raise ValueError(
                f"no failure up to multiplier {max_multiplier}, mix is not storage-limited"
            )
        scaled = scale_demand(data, multiplier)
        if simulate(mix, data=scaled, params=params).unserved_energy_twh > 0.0:
            break
        k += 1

    required = size_dispatch(mix, scaled, params)
    sized = replace(mix, dispatch_gw=required)
    energy_gwh = simulate(sized, scaled, params).dispatch_energy_twh * 1000.0
    scaled_stats = demand_stats(scaled.demand)
    return RigidityReport(
        annual_demand_twh=demand_stats(data.demand).annual_energy_twh,
        test_demand_twh=scaled_stats.annual_energy_twh,
        failure_multiplier=multiplier,
        required_dispatch_gw=required,
        required_dispatch_energy_gwh=energy_gwh,
        dispatch_pct_of_average=100.0 * required / scaled_stats.average_gw,
    )


def run_residual_baseload(
    data: AlignedDataset,
    params: SimParams = DEFAULT_PARAMS,
    book: CostBook | None = None,
    space: SearchSpace | None = None,
    baseload_gw: float = 10.0,
    eaf: float = 0.70,
    options: OptimizeOptions = DEFAULT_OPTIONS,
) -> tuple[ScenarioReport, OptimResult]:
    """Least-cost mix when legacy baseload stays online at a flat EAF.

    Baseload is must-run and free in the objective; only the wind, PV,
    battery, and firm additions are costed and searched.
    """
    book = book if book is not None else CostBook()
    if not (math.isfinite(baseload_gw) and baseload_gw >= 0.0):
        raise ValueError(f"baseload_gw must be finite and >= 0, got {baseload_gw!r}")
    if not (0.0 <= eaf <= 1.0):
        raise ValueError(f"eaf must be in [0, 1], got {eaf!r}")
    if space is None:
        space = default_space(demand_stats(data.demand))
    space = replace(space, baseload_gw=baseload_gw, baseload_eaf=eaf)
    optim = optimize(space, data, params, book, options)
    report = build_report(optim.best.mix, optim.best.result, data, label="residual-baseload")
    return report, optim


def run_fuel_sensitivity(
    data: AlignedDataset,
    params: SimParams = DEFAULT_PARAMS,
    book: CostBook | None = None,
    space: SearchSpace | None = None,
    fuel_prices: Sequence[float] = (20.0, 10.0),
    options: OptimizeOptions = DEFAULT_OPTIONS,
) -> list[tuple[float, ScenarioReport, OptimResult]]:
    """One full optimization per fuel price, cheapest-last order preserved."""
    book = book if book is not None else CostBook()
    prices = [float(p) for p in fuel_prices]
    if not prices:
        raise ValueError("fuel_prices must not be empty")
    for p in prices:
        if not (math.isfinite(p) and p > 0.0):
            raise ValueError(f"fuel prices must be positive and finite, got {p!r}")
    runs = []
    for price in prices:
        priced = replace(book, fuel_price_usd_per_gj=price)
        report, optim = run_base(data, params, priced, space, options)
        report = replace(report, label=f"fuel {price:g} USD/GJ")
        runs.append((price, report, optim))
    return runs


# ===================== report rendering =====================

def _report_rows(report: ScenarioReport, include_baseload: bool) -> list[tuple[str, float, str]]:
    rows = [
        ("Annual Demand", report.annual_demand_twh, "TWh"),
        ("Peak Rate", report.peak_gw, "GW"),
        ("Average Rate", report.average_gw, "GW"),
    ]
    if include_baseload:
        rows += [
            ("Base load Gen.", report.baseload_gw, "GW"),
            ("Base EAF", report.baseload_eaf_pct, "%"),
            ("Base Energy", report.baseload_energy_twh, "TWh"),
        ]
    rows += [
        ("Installed Wind", report.wind_gw, "GW"),
        ("Wind Energy", report.wind_energy_twh, "TWh"),
        ("Wind CF", report.wind_cf_pct, "%"),
        ("Wind Percent of Peak Capacity", report.wind_pct_of_peak, "Percent of Peak Gen. Capacity"),
        ("Installed PV", report.pv_gw, "GW"),
        ("PV Energy", report.pv_energy_twh, "TWh"),
        ("PV CF", report.pv_cf_pct, "%"),
        ("PV Percent of Peak Capacity", report.pv_pct_of_peak, "Percent of Peak Gen. Capacity"),
        ("Battery Capacity", report.battery_power_gw, "GW"),
        ("Battery Hours", report.battery_hours, "Hours"),
        ("Battery Energy", report.battery_energy_gwh, "GWh"),
        ("Installed Dispatch", report.dispatch_gw, "GW"),
        ("Dispatch Energy", report.dispatch_energy_twh, "TWh"),
        ("Dispatch CF", report.dispatch_cf_pct, "%"),
        ("Percent of Peak demand", report.dispatch_pct_of_peak, "%"),
        ("Percent of Average demand", report.dispatch_pct_of_average, "%"),
    ]
    if include_baseload:
        rows.append(("Percent of net Peak demand", report.dispatch_pct_of_net_peak, "% of net Peak"))
    rows += [
        ("Renewable Gen", report.renewable_gen_twh, "TWh"),
        ("Curtailed Renew.", report.curtailed_twh, "TWh"),
        ("Percent Curtailed", report.curtailed_pct, "%"),
    ]
    return rows


def write_report_csv(
    path,
    reports: ScenarioReport | Sequence[ScenarioReport],
    extra_rows: Sequence[tuple[str, float, str]] = (),
) -> None:
    """Write one or more reports side by side as ``row,<label...>,unit`` CSV."""
    if isinstance(reports, ScenarioReport):
        reports = [reports]
    if not reports:
        raise ValueError("write_report_csv needs at least one report")
    include_baseload = any(r.baseload_gw > 0.0 for r in reports)
    per_report = [_report_rows(r, include_baseload) for r in reports]
    labels = [r.label or f"case {i}" for i, r in enumerate(reports)]

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["row"] + labels + ["unit"]) + "\n")
        for row_idx in range(len(per_report[0])):
            name, _, unit = per_report[0][row_idx]
            values = [repr(float(rows[row_idx][1])) for rows in per_report]
            fh.write(",".join([_csv_quote(name)] + values + [_csv_quote(unit)]) + "\n")
        for name, value, unit in extra_rows:
            pad = [repr(float(value))] + [""] * (len(reports) - 1)
            fh.write(",".join([_csv_quote(name)] + pad + [_csv_quote(unit)]) + "\n")


def write_rigidity_csv(path, report: RigidityReport) -> None:
    """Write a rigidity test outcome using the demand-change table rows."""
    rows = [
        ("Annual Demand", report.annual_demand_twh, "TWh"),
        ("Test Demand", report.test_demand_twh, "TWh"),
        ("Percent of Normal", 100.0 * report.failure_multiplier, "%"),
        ("Installed Dispatch", report.required_dispatch_gw, "GW"),
        ("Dispatch Energy", report.required_dispatch_energy_gwh, "GWh"),
        ("Percent of Average demand", report.dispatch_pct_of_average, "%"),
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("row,value,unit\n")
        for name, value, unit in rows:
            fh.write(",".join([_csv_quote(name), repr(float(value)), _csv_quote(unit)]) + "\n")


def low_storage_extra_rows(delta: LowStorageDelta) -> list[tuple[str, float, str]]:
    """Comparison rows appended to a low-storage report."""
    return [
        ("Base Case Installed Dispatch", delta.base_dispatch_gw, "GW"),
        ("Installed Dispatch Change", delta.dispatch_delta_gw, "GW"),
        ("Base Case Dispatch Energy", delta.base_dispatch_energy_twh, "TWh"),
        ("Storage Price", delta.battery_price_usd_per_kwh, "USD/kWh"),
    ]


def _csv_quote(text: str) -> str:
    if "," in text or '"' in text or "\n" in text:
        return '"' + text.replace('"', '""') + '"'
    return text
