"""Least-cost capacity search.

A candidate is a wind, PV, and battery combination; its dispatchable
capacity is not searched but sized endogenously so every candidate serves
all demand.  The search scans a coarse full grid, then refines the incumbent
one coordinate at a time with step halving.  Selection uses a total
ordering, so the outcome does not depend on evaluation order: unit cost
first, then annualized capital, then total installed GW, then the
capacities themselves.  Evaluations are pure and independent, safe to run
concurrently; only incumbent selection synchronizes, by reduction over that
fixed ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .costing import CostBook, SystemCost, system_cost
from .dispatch import CapacityMix, DispatchResult, SimParams, DEFAULT_PARAMS, simulate, size_dispatch
from .profiles import AlignedDataset, DemandStats

TRAJECTORY_COLUMNS = (
    "step",
    "wind_gw",
    "pv_gw",
    "battery_power_gw",
    "battery_hours",
    "dispatch_gw",
    "unit_cost_usd_per_mwh",
)

# Coarse storage durations in hours; refinement interpolates between rungs.
DEFAULT_BATTERY_HOURS = (0.0, 1.0, 2.0, 4.0, 8.0, 12.0, 24.0, 36.0, 48.0)


@dataclass(frozen=True)
class SearchSpace:
    """Bounds of the capacity search.

    Power axes are (min, max, coarse step) in GW.  Battery duration is
    scanned over an explicit ladder of hours rather than a uniform step,
    dense at short durations where the cost trade-off is steep.  Baseload
    is fixed, not searched.
    """

    wind_gw: tuple[float, float, float]
    pv_gw: tuple[float, float, float]
    battery_power_gw: tuple[float, float, float]
    battery_hours: tuple[float, ...] = DEFAULT_BATTERY_HOURS
    baseload_gw: float = 0.0
    baseload_eaf: float = 1.0

    def __post_init__(self) -> None:
        for name in ("wind_gw", "pv_gw", "battery_power_gw"):
            lo, hi, step = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 <= lo <= hi):
                raise ValueError(f"{name} range must satisfy 0 <= min <= max, got ({lo}, {hi})")
            if not (math.isfinite(step) and step > 0.0):
                raise ValueError(f"{name} step must be positive, got {step!r}")
        ladder = tuple(float(h) for h in self.battery_hours)
        if not ladder:
            raise ValueError("battery_hours ladder must not be empty")
        if any(h < 0.0 or not math.isfinite(h) for h in ladder):
            raise ValueError(f"battery_hours must be finite and >= 0, got {ladder!r}")
        if list(ladder) != sorted(set(ladder)):
            raise ValueError(f"battery_hours must be strictly increasing, got {ladder!r}")
        object.__setattr__(self, "battery_hours", ladder)
        if not (math.isfinite(self.baseload_gw) and self.baseload_gw >= 0.0):
            raise ValueError(f"baseload_gw must be finite and >= 0, got {self.baseload_gw!r}")
        if not (0.0 <= self.baseload_eaf <= 1.0):
            raise ValueError(f"baseload_eaf must be in [0, 1], got {self.baseload_eaf!r}")


@dataclass(frozen=True)
class OptimizeOptions:
    """Refinement stops once per-axis steps fall below these resolutions."""

    refine_tolerance_gw: float = 0.1
    refine_tolerance_hours: float = 0.5
    max_refine_sweeps: int = 60

    def __post_init__(self) -> None:
        if not (self.refine_tolerance_gw > 0.0 and self.refine_tolerance_hours > 0.0):
            raise ValueError("refinement tolerances must be positive")
        if self.max_refine_sweeps < 1:
            raise ValueError("max_refine_sweeps must be at least 1")


@dataclass(frozen=True)
class Evaluation:
    """One candidate with its sized dispatch, simulation, and cost."""

    mix: CapacityMix
    result: DispatchResult
    cost: SystemCost


@dataclass(frozen=True)
class OptimResult:
    best: Evaluation
    evaluations: int
    trajectory: list[tuple[CapacityMix, float]] = field(repr=False)


DEFAULT_OPTIONS = OptimizeOptions()


def default_space(stats: DemandStats, baseload_gw: float = 0.0, baseload_eaf: float = 1.0) -> SearchSpace:
    """Search bounds scaled to the demand profile.

    Power axes step at 10 percent of peak demand: wind up to three times
    peak, PV up to twice, battery power up to one and a half times.
    """
    peak = stats.peak_gw
    if peak <= 0.0:
        raise ValueError(f"peak demand must be positive, got {peak!r}")
    step = 0.1 * peak
    return SearchSpace(
        wind_gw=(0.0, 3.0 * peak, step),
        pv_gw=(0.0, 2.0 * peak, step),
        battery_power_gw=(0.0, 1.5 * peak, step),
        baseload_gw=baseload_gw,
        baseload_eaf=baseload_eaf,
    )


def grid_axis(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive arithmetic grid from lo by step, never exceeding hi."""
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + k * step for k in range(n)]


def evaluate(
    candidate: CapacityMix,
    data: AlignedDataset,
    params: SimParams = DEFAULT_PARAMS,
    book: CostBook | None = None,
) -> Evaluation:
    """Size dispatch for a candidate, simulate it, and cost the system.

    The candidate's own ``dispatch_gw`` is ignored; the returned mix carries
    the sized value, and its simulation serves all demand by construction.
    """
    book = book if book is not None else CostBook()
    sized = replace(candidate, dispatch_gw=size_dispatch(candidate, data, params))
    result = simulate(sized, data, params)
    return Evaluation(mix=sized, result=result, cost=system_cost(sized, result, book))


def _rank_key(ev: Evaluation) -> tuple:
    m = ev.mix
    total_gw = m.wind_gw + m.pv_gw + m.battery_power_gw + m.dispatch_gw
    return (
        ev.cost.unit_cost_usd_per_mwh,
        ev.cost.annualized_capital_usd,
        total_gw,
        m.wind_gw,
        m.pv_gw,
        m.battery_power_gw,
        m.battery_hours,
    )


def _hours_refine_step(ladder: tuple[float, ...], hours: float) -> float:
    # Half the widest gap to the neighboring coarse rungs.
    i = ladder.index(hours)
    left = ladder[i] - ladder[i - 1] if i > 0 else 0.0
    right = ladder[i + 1] - ladder[i] if i + 1 < len(ladder) else 0.0
    return max(left, right) / 2.0


def optimize(
    space: SearchSpace,
    data: AlignedDataset,
    params: SimParams = DEFAULT_PARAMS,
    book: CostBook | None = None,
    options: OptimizeOptions = DEFAULT_OPTIONS,
) -> OptimResult:
    """Find the least-cost mix over the search space.

    Phase one evaluates the full coarse grid.  Phase two sweeps the four
    axes in fixed order, moving the incumbent to a strictly better neighbor
    at the current step; after a sweep with no improvement all steps halve.
    Refinement ends when every active axis is below its tolerance.  The
    result is deterministic, including the evaluation count.
    """
    book = book if book is not None else CostBook()

    cache: dict[tuple[float, float, float, float], Evaluation] = {}
    trajectory: list[tuple[CapacityMix, float]] = []

    def eval_point(wind: float, pv: float, bp: float, bh: float) -> Evaluation:
        key = (round(wind, 9), round(pv, 9), round(bp, 9), round(bh, 9))
        hit = cache.get(key)
        if hit is not None:
            return hit
        candidate = CapacityMix(
            wind_gw=wind,
            pv_gw=pv,
            battery_power_gw=bp,
            battery_hours=bh,
            baseload_gw=space.baseload_gw,
            baseload_eaf=space.baseload_eaf,
        )
        ev = evaluate(candidate, data, params, book)
        cache[key] = ev
        trajectory.append((ev.mix, ev.cost.unit_cost_usd_per_mwh))
        return ev

    wind_axis = grid_axis(*space.wind_gw)
    pv_axis = grid_axis(*space.pv_gw)
    bp_axis = grid_axis(*space.battery_power_gw)

    best: Evaluation | None = None
    for wind in wind_axis:
        for pv in pv_axis:
            for bp in bp_axis:
                for bh in space.battery_hours:
                    ev = eval_point(wind, pv, bp, bh)
                    if best is None or _rank_key(ev) < _rank_key(best):
                        best = ev
    assert best is not None

    bounds = {
        "wind_gw": (space.wind_gw[0], space.wind_gw[1]),
        "pv_gw": (space.pv_gw[0], space.pv_gw[1]),
        "battery_power_gw": (space.battery_power_gw[0], space.battery_power_gw[1]),
        "battery_hours": (space.battery_hours[0], space.battery_hours[-1]),
    }
    steps = {
        "wind_gw": space.wind_gw[2] / 2.0,
        "pv_gw": space.pv_gw[2] / 2.0,
        "battery_power_gw": space.battery_power_gw[2] / 2.0,
        "battery_hours": _hours_refine_step(space.battery_hours, best.mix.battery_hours),
    }
    tols = {
        "wind_gw": options.refine_tolerance_gw,
        "pv_gw": options.refine_tolerance_gw,
        "battery_power_gw": options.refine_tolerance_gw,
        "battery_hours": options.refine_tolerance_hours,
    }
    axes = ("wind_gw", "pv_gw", "battery_power_gw", "battery_hours")

    for _ in range(options.max_refine_sweeps):
        active = [
            axis
            for axis in axes
            if bounds[axis][0] < bounds[axis][1] and steps[axis] >= tols[axis]
        ]
        if not active:
            break
        improved = False
        for axis in axes:
            if axis not in active:
                continue
            center = getattr(best.mix, axis)
            lo, hi = bounds[axis]
            for candidate_value in (center - steps[axis], center + steps[axis]):
                value = min(max(candidate_value, lo), hi)
                if abs(value - center) < 1e-12:
                    continue
                coords = {a: getattr(best.mix, a) for a in axes}
                coords[axis] = value
                ev = eval_point(
                    coords["wind_gw"],
                    coords["pv_gw"],
                    coords["battery_power_gw"],
                    coords["battery_hours"],
                )
                if _rank_key(ev) < _rank_key(best):
                    best = ev
                    improved = True
        if not improved:
            for axis in axes:
                steps[axis] /= 2.0

    return OptimResult(best=best, evaluations=len(cache), trajectory=trajectory)


def write_trajectory_csv(result: OptimResult, path) -> None:
    """Write every evaluation of a search, in order, to CSV."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(TRAJECTORY_COLUMNS) + "\n")
        for i, (mix, unit_cost) in enumerate(result.trajectory):
            row = (
                str(i),
                repr(mix.wind_gw),
                repr(mix.pv_gw),
                repr(mix.battery_power_gw),
                repr(mix.battery_hours),
                repr(mix.dispatch_gw),
                repr(unit_cost),
            )
            fh.write(",".join(row) + "\n")
