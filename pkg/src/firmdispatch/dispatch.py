"""Merit-order dispatch simulation.

Each step serves demand in a fixed order: baseload runs flat at its energy
availability factor, wind and PV serve what remains, surplus renewables
charge the battery (round-trip losses booked on the way in) and the rest is
curtailed, deficits draw first on the battery and then on firm dispatchable
capacity, and anything left is unserved.  The loop itself lives in
``_kernels`` so it can run compiled.

``size_dispatch`` returns the smallest dispatchable capacity that leaves no
demand unserved, obtained from a single pass with the cap removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from . import _kernels
from .profiles import AlignedDataset

TRACE_COLUMNS = (
    "step",
    "demand_gw",
    "baseload_gw",
    "renewable_to_demand_gw",
    "battery_charge_gw",
    "battery_discharge_gw",
    "curtailed_gw",
    "dispatch_gw",
    "unserved_gw",
    "soc_gwh",
)


@dataclass(frozen=True)
class CapacityMix:
    """Installed capacities of one candidate system.

    ``battery_hours`` is storage duration at full power, so energy capacity
    is ``battery_power_gw * battery_hours`` GWh.  Baseload is existing
    must-run plant described by nameplate GW and an energy availability
    factor; it takes no part in costing.
    """

    wind_gw: float = 0.0
    pv_gw: float = 0.0
    battery_power_gw: float = 0.0
    battery_hours: float = 0.0
    dispatch_gw: float = 0.0
    baseload_gw: float = 0.0
    baseload_eaf: float = 1.0

    def __post_init__(self) -> None:
        for name in (
            "wind_gw",
            "pv_gw",
            "battery_power_gw",
            "battery_hours",
            "dispatch_gw",
            "baseload_gw",
        ):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        if not (0.0 <= self.baseload_eaf <= 1.0):
            raise ValueError(f"baseload_eaf must be in [0, 1], got {self.baseload_eaf!r}")

    @property
    def battery_energy_gwh(self) -> float:
        return self.battery_power_gw * self.battery_hours


@dataclass(frozen=True)
class SimParams:
    """Knobs of the storage model.

    round_trip_efficiency
        Fraction of charged energy that becomes stored energy; all loss is
        booked at charge time and discharge is loss free.
    initial_soc_fraction
        Starting state of charge as a fraction of energy capacity.
    battery_charges_from_dispatch
        When true, spare dispatchable capacity tops up the battery after
        demand is served.  That flow is reported inside the battery charge
        column and counted in dispatch energy and peak dispatch draw, so the
        renewable generation split identity only holds with the default
        (false) setting.
    """

    round_trip_efficiency: float = 0.85
    initial_soc_fraction: float = 0.0
    battery_charges_from_dispatch: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.round_trip_efficiency <= 1.0):
            raise ValueError(
                f"round_trip_efficiency must be in (0, 1], got {self.round_trip_efficiency!r}"
            )
        if not (0.0 <= self.initial_soc_fraction <= 1.0):
            raise ValueError(
                f"initial_soc_fraction must be in [0, 1], got {self.initial_soc_fraction!r}"
            )


@dataclass(frozen=True)
class StepRecord:
    """Balance of a single step, all power in GW, state of charge in GWh."""

    step: int
    demand_gw: float
    baseload_gw: float
    renewable_to_demand_gw: float
    battery_charge_gw: float
    battery_discharge_gw: float
    curtailed_gw: float
    dispatch_gw: float
    unserved_gw: float
    soc_gwh: float


class DispatchTrace(Sequence):
    """Array-backed per-step ledger, indexable as a sequence of StepRecord."""

    def __init__(self, demand: NDArray[np.float64], ledger: NDArray[np.float64], dt_hours: float):
        self._demand = demand
        self._ledger = ledger
        self.dt_hours = dt_hours

    def __len__(self) -> int:
        return int(self._demand.shape[0])

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        i = int(index)
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(index)
        led = self._ledger
        return StepRecord(
            step=i,
            demand_gw=float(self._demand[i]),
            baseload_gw=float(led[_kernels.ROW_BASELOAD, i]),
            renewable_to_demand_gw=float(led[_kernels.ROW_REN_TO_DEMAND, i]),
            battery_charge_gw=float(
                led[_kernels.ROW_CHARGE_FROM_REN, i] + led[_kernels.ROW_CHARGE_FROM_DISPATCH, i]
            ),
            battery_discharge_gw=float(led[_kernels.ROW_DISCHARGE, i]),
            curtailed_gw=float(led[_kernels.ROW_CURTAILED, i]),
            dispatch_gw=float(led[_kernels.ROW_DISPATCH, i]),
            unserved_gw=float(led[_kernels.ROW_UNSERVED, i]),
            soc_gwh=float(led[_kernels.ROW_SOC, i]),
        )

    # Column views as arrays, for vectorized checks and CSV export.
    @property
    def demand_gw(self) -> NDArray[np.float64]:
        return self._demand

    @property
    def baseload_gw(self) -> NDArray[np.float64]:
        return self._ledger[_kernels.ROW_BASELOAD]

    @property
    def renewable_to_demand_gw(self) -> NDArray[np.float64]:
        return self._ledger[_kernels.ROW_REN_TO_DEMAND]

    @property
    def battery_charge_gw(self) -> NDArray[np.float64]:
        return (
            self._ledger[_kernels.ROW_CHARGE_FROM_REN]
            + self._ledger[_kernels.ROW_CHARGE_FROM_DISPATCH]
        )

    @property
    def charge_from_dispatch_gw(self) -> NDArray[np.float64]:
        return self._ledger[_kernels.ROW_CHARGE_FROM_DISPATCH]

    @property
    def battery_discharge_gw(self) -> NDArray[np.float64]:
        return self._ledger[_kernels.ROW_DISCHARGE]

    @property
    def curtailed_gw(self) -> NDArray[np.float64]:
        return self._ledger[_kernels.ROW_CURTAILED]

    @property
    def dispatch_gw(self) -> NDArray[np.float64]:
        return self._ledger[_kernels.ROW_DISPATCH]

    @property
    def unserved_gw(self) -> NDArray[np.float64]:
        return self._ledger[_kernels.ROW_UNSERVED]

    @property
    def soc_gwh(self) -> NDArray[np.float64]:
        return self._ledger[_kernels.ROW_SOC]


@dataclass(frozen=True)
class DispatchResult:
    """Aggregated outcome of one simulation.

    Wind and PV energy are total generation (installed capacity times
    resource), not the share delivered to demand.  Dispatch energy includes
    any battery charging from dispatchable plant, since that output burns
    fuel too.  ``trace`` is populated only when requested.
    """

    wind_energy_twh: float
    pv_energy_twh: float
    renewable_gen_twh: float
    baseload_energy_twh: float
    battery_discharge_twh: float
    dispatch_energy_twh: float
    unserved_energy_twh: float
    curtailed_twh: float
    demand_energy_twh: float
    peak_dispatch_gw: float
    dispatch_cf: float
    wind_cf: float
    pv_cf: float
    curtailed_fraction: float
    final_soc_gwh: float
    trace: DispatchTrace | None = field(default=None, compare=False, repr=False)


DEFAULT_PARAMS = SimParams()


def _run_balance(
    mix: CapacityMix,
    data: AlignedDataset,
    params: SimParams,
    dispatch_cap: float,
    charge_from_dispatch: bool,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    demand = data.demand.values
    ren_gen = mix.wind_gw * data.wind_cf.values + mix.pv_gw * data.pv_cf.values
    out = np.empty((_kernels.N_ROWS, demand.shape[0]), dtype=np.float64)
    _kernels.balance_loop(
        demand,
        ren_gen,
        data.dt_hours,
        mix.baseload_gw * mix.baseload_eaf,
        mix.battery_power_gw,
        mix.battery_energy_gwh,
        params.round_trip_efficiency,
        params.initial_soc_fraction * mix.battery_energy_gwh,
        dispatch_cap,
        charge_from_dispatch,
        out,
    )
    return out, demand


def simulate(
    mix: CapacityMix,
    data: AlignedDataset,
    params: SimParams = DEFAULT_PARAMS,
    keep_trace: bool = False,
) -> DispatchResult:
    """Run the merit-order balance for one capacity mix over one dataset.

    Deterministic and side-effect free: equal inputs give equal results.

    Parameters
    ----------
    mix : CapacityMix
        Installed capacities, including the dispatchable cap to respect.
    data : AlignedDataset
        Demand and resource series on a common step grid.
    params : SimParams
        Storage model settings.
    keep_trace : bool
        Attach the full per-step ledger to the result.

    Returns
    -------
    DispatchResult
    """
    out, demand = _run_balance(
        mix, data, params, mix.dispatch_gw, params.battery_charges_from_dispatch
    )
    dt = data.dt_hours
    to_twh = dt / 1000.0

    wind_energy = mix.wind_gw * float(np.sum(data.wind_cf.values)) * to_twh
    pv_energy = mix.pv_gw * float(np.sum(data.pv_cf.values)) * to_twh
    dispatch_draw = out[_kernels.ROW_DISPATCH] + out[_kernels.ROW_CHARGE_FROM_DISPATCH]
    dispatch_energy = float(np.sum(dispatch_draw)) * to_twh
    peak_dispatch = float(np.max(dispatch_draw))
    total_hours = data.total_hours

    dispatch_cf = 0.0
    if mix.dispatch_gw > 0.0:
        dispatch_cf = dispatch_energy / (mix.dispatch_gw * total_hours / 1000.0)
    renewable_gen = wind_energy + pv_energy
    curtailed = float(np.sum(out[_kernels.ROW_CURTAILED])) * to_twh
    curtailed_fraction = curtailed / renewable_gen if renewable_gen > 0.0 else 0.0

    trace = DispatchTrace(demand, out, dt) if keep_trace else None
    return DispatchResult(
        wind_energy_twh=wind_energy,
        pv_energy_twh=pv_energy,
        renewable_gen_twh=renewable_gen,
        baseload_energy_twh=float(np.sum(out[_kernels.ROW_BASELOAD])) * to_twh,
        battery_discharge_twh=float(np.sum(out[_kernels.ROW_DISCHARGE])) * to_twh,
        dispatch_energy_twh=dispatch_energy,
        unserved_energy_twh=float(np.sum(out[_kernels.ROW_UNSERVED])) * to_twh,
        curtailed_twh=curtailed,
        demand_energy_twh=float(np.sum(demand)) * to_twh,
        peak_dispatch_gw=peak_dispatch,
        dispatch_cf=dispatch_cf,
        wind_cf=float(np.sum(data.wind_cf.values)) * dt / total_hours,
        pv_cf=float(np.sum(data.pv_cf.values)) * dt / total_hours,
        curtailed_fraction=curtailed_fraction,
        final_soc_gwh=float(out[_kernels.ROW_SOC, -1]),
        trace=trace,
    )


def size_dispatch(mix: CapacityMix, data: AlignedDataset, params: SimParams = DEFAULT_PARAMS) -> float:
    """Smallest dispatchable capacity in GW that serves all demand.

    One balance pass runs with the dispatch cap removed; the answer is the
    peak draw that remains after baseload, renewables, and the battery.
    Simulating the same mix with ``dispatch_gw`` set to this value leaves
    zero demand unserved.  The battery is charged from renewables only
    during sizing, because charging from an unbounded dispatchable plant
    would understate the capacity needed.  Under the default parameters the
    result is also minimal: one hundredth of a GW less already drops load.
    With ``battery_charges_from_dispatch`` enabled it stays a safe upper
    bound but may exceed the minimum, since spare dispatch can pre-charge
    the battery ahead of the worst deficit.
    """
    out, _ = _run_balance(mix, data, params, np.inf, False)
    return float(np.max(out[_kernels.ROW_DISPATCH]))


def write_trace_csv(trace: DispatchTrace, path) -> None:
    """Write a per-step ledger to CSV with full float precision."""
    columns = (
        trace.demand_gw,
        trace.baseload_gw,
        trace.renewable_to_demand_gw,
        trace.battery_charge_gw,
        trace.battery_discharge_gw,
        trace.curtailed_gw,
        trace.dispatch_gw,
        trace.unserved_gw,
        trace.soc_gwh,
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for i in range(len(trace)):
            row = [str(i)] + [repr(float(col[i])) for col in columns]
            fh.write(",".join(row) + "\n")
