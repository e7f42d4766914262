"""Demand and resource profiles.

Hourly (or half-hourly) demand and capacity-factor series are the inputs to
every simulation in this package.  This module loads them from CSV, validates
them, bundles aligned series into a dataset, and can synthesize deterministic
test datasets with optional zero-resource drought windows.

Units follow grid convention: demand in GW, capacity factors dimensionless in
[0, 1], energy in TWh, time step in hours.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
from numpy.typing import NDArray

KIND_DEMAND = "demand-GW"
KIND_CAPACITY_FACTOR = "capacity-factor"

_VALID_KINDS = (KIND_DEMAND, KIND_CAPACITY_FACTOR)
_VALID_DT = (1.0, 0.5)

# Capacity factors this far outside [0, 1] are treated as rounding noise and
# clamped on load; anything further out is a data error.
CF_CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class TimeSeries:
    """A validated fixed-step series of demand or capacity-factor values.

    Parameters
    ----------
    values : ndarray
        One value per step, finite.  Demand must be nonnegative GW and
        capacity factors must lie in [0, 1].
    dt_hours : float
        Step length in hours, 1.0 for hourly data or 0.5 for half-hourly.
    kind : str
        Either ``KIND_DEMAND`` or ``KIND_CAPACITY_FACTOR``.
    label : str
        Free-form name used in messages and reports.
    """

    values: NDArray[np.float64]
    dt_hours: float
    kind: str
    label: str = ""

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64).copy()
        if values.ndim != 1 or values.size == 0:
            raise ValueError(f"series {self.label!r} must be a nonempty 1-D array")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ValueError(f"series {self.label!r} has non-finite value at step {bad}")
        if self.kind not in _VALID_KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}, expected one of {_VALID_KINDS}")
        if float(self.dt_hours) not in _VALID_DT:
            raise ValueError(f"dt_hours must be 1.0 or 0.5, got {self.dt_hours!r}")
        if self.kind == KIND_DEMAND and np.any(values < 0.0):
            bad = int(np.flatnonzero(values < 0.0)[0])
            raise ValueError(f"demand series {self.label!r} is negative at step {bad}")
        if self.kind == KIND_CAPACITY_FACTOR and (np.any(values < 0.0) or np.any(values > 1.0)):
            bad = int(np.flatnonzero((values < 0.0) | (values > 1.0))[0])
            raise ValueError(
                f"capacity-factor series {self.label!r} is outside [0, 1] at step {bad}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dt_hours", float(self.dt_hours))

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def total_hours(self) -> float:
        """Span of the series in hours."""
        return len(self) * self.dt_hours


@dataclass(frozen=True)
class AlignedDataset:
    """Demand, wind, and PV series sharing one step grid."""

    demand: TimeSeries
    wind_cf: TimeSeries
    pv_cf: TimeSeries

    def __post_init__(self) -> None:
        if self.demand.kind != KIND_DEMAND:
            raise ValueError(f"demand series has kind {self.demand.kind!r}")
        for name, series in (("wind_cf", self.wind_cf), ("pv_cf", self.pv_cf)):
            if series.kind != KIND_CAPACITY_FACTOR:
                raise ValueError(f"{name} series has kind {series.kind!r}")
        lengths = {
            "demand": len(self.demand),
            "wind_cf": len(self.wind_cf),
            "pv_cf": len(self.pv_cf),
        }
        if len(set(lengths.values())) != 1:
            detail = ", ".join(f"{k} has {v} steps" for k, v in lengths.items())
            raise ValueError(f"series lengths differ: {detail}")
        steps = {self.demand.dt_hours, self.wind_cf.dt_hours, self.pv_cf.dt_hours}
        if len(steps) != 1:
            raise ValueError(
                f"series step lengths differ: demand dt={self.demand.dt_hours}, "
                f"wind_cf dt={self.wind_cf.dt_hours}, pv_cf dt={self.pv_cf.dt_hours}"
            )

    @property
    def n_steps(self) -> int:
        return len(self.demand)

    @property
    def dt_hours(self) -> float:
        return self.demand.dt_hours

    @property
    def total_hours(self) -> float:
        return self.demand.total_hours


@dataclass(frozen=True)
class DemandStats:
    """Headline demand figures used for reports and default search ranges."""

    peak_gw: float
    average_gw: float
    annual_energy_twh: float


def load_series(
    source: bytes | str | os.PathLike | IO[bytes],
    kind: str,
    dt_hours: float = 1.0,
    label: str = "",
) -> TimeSeries:
    """Read one series from CSV.

    The CSV must have a header row including a ``value`` column.  A
    ``timestamp`` column, if present, is carried as opaque text and ignored.
    Capacity factors within ``CF_CLAMP_TOL`` of the [0, 1] bounds are clamped
    to the bound; demand gets no such tolerance.

    Parameters
    ----------
    source : bytes, path, or binary file object
        UTF-8 CSV text with LF or CRLF line endings.
    kind : str
        ``KIND_DEMAND`` or ``KIND_CAPACITY_FACTOR``.
    dt_hours : float
        Step length of the data, 1.0 or 0.5.
    label : str
        Name for error messages; defaults to the file name when a path is
        given.

    Returns
    -------
    TimeSeries

    Raises
    ------
    ValueError
        On malformed CSV, a missing ``value`` column, empty input, non-finite
        or out-of-range values.
    """
    if isinstance(source, bytes):
        raw = source
        name = label or "<bytes>"
    elif isinstance(source, (str, os.PathLike)):
        name = label or os.path.basename(os.fspath(source))
        with open(source, "rb") as fh:
            raw = fh.read()
    else:
        raw = source.read()
        name = label or getattr(source, "name", "<stream>")

    text = raw.decode("utf-8-sig")
    reader = csv.DictReader(io.StringIO(text, newline=""))
    if reader.fieldnames is None:
        raise ValueError(f"{name}: empty input, expected a CSV header row")
    fields = [f.strip() for f in reader.fieldnames]
    if "value" not in fields:
        raise ValueError(f"{name}: no 'value' column in header {reader.fieldnames!r}")

    values: list[float] = []
    for row_no, row in enumerate(reader, start=2):
        cell = row.get("value")
        if cell is None or cell.strip() == "":
            raise ValueError(f"{name}: missing value on line {row_no}")
        try:
            x = float(cell)
        except ValueError:
            raise ValueError(f"{name}: unparseable value {cell!r} on line {row_no}") from None
        if not math.isfinite(x):
            raise ValueError(f"{name}: non-finite value on line {row_no}")
        values.append(x)
    if not values:
        raise ValueError(f"{name}: no data rows")

    arr = np.asarray(values, dtype=np.float64)
    if kind == KIND_CAPACITY_FACTOR:
        # Rounding noise just outside the bounds is clamped, real excursions are not.
        low = (arr < 0.0) & (arr >= -CF_CLAMP_TOL)
        high = (arr > 1.0) & (arr <= 1.0 + CF_CLAMP_TOL)
        arr = np.where(low, 0.0, np.where(high, 1.0, arr))
    return TimeSeries(values=arr, dt_hours=dt_hours, kind=kind, label=label or name)


def dump_series(series: TimeSeries) -> str:
    """Serialize a series to CSV text that ``load_series`` reads back exactly.

    Values are written with shortest round-trip float formatting, so
    ``load_series(dump_series(ts).encode(), ts.kind, ts.dt_hours)`` reproduces
    ``ts.values`` bit for bit.
    """
    lines = ["value"]
    lines.extend(repr(float(v)) for v in series.values)
    return "\n".join(lines) + "\n"


def align(demand: TimeSeries, wind_cf: TimeSeries, pv_cf: TimeSeries) -> AlignedDataset:
    """Bundle three series after checking kinds, lengths, and step size."""
    return AlignedDataset(demand=demand, wind_cf=wind_cf, pv_cf=pv_cf)


def demand_stats(demand: TimeSeries) -> DemandStats:
    """Peak GW, average GW, and total energy in TWh for a demand series.

    Average is defined as energy divided by span, so
    ``average_gw * total_hours / 1000 == annual_energy_twh`` holds by
    construction.
    """
    if demand.kind != KIND_DEMAND:
        raise ValueError(f"demand_stats needs a demand series, got kind {demand.kind!r}")
    energy_twh = float(np.sum(demand.values) * demand.dt_hours / 1000.0)
    peak = float(np.max(demand.values))
    average = energy_twh * 1000.0 / demand.total_hours
    return DemandStats(peak_gw=peak, average_gw=average, annual_energy_twh=energy_twh)


def scale_demand(data: AlignedDataset, multiplier: float) -> AlignedDataset:
    """Return a dataset with demand scaled by ``multiplier``, resources unchanged."""
    if not (multiplier > 0.0 and math.isfinite(multiplier)):
        raise ValueError(f"demand multiplier must be positive and finite, got {multiplier!r}")
    scaled = TimeSeries(
        values=data.demand.values * multiplier,
        dt_hours=data.demand.dt_hours,
        kind=KIND_DEMAND,
        label=data.demand.label,
    )
    return AlignedDataset(demand=scaled, wind_cf=data.wind_cf, pv_cf=data.pv_cf)


def _smooth(noise: NDArray[np.float64], width: int) -> NDArray[np.float64]:
    # Moving-average smoothing with edge padding, keeps output length.
    kernel = np.ones(width) / width
    padded = np.concatenate([noise[:width][::-1], noise, noise[-width:][::-1]])
    return np.convolve(padded, kernel, mode="same")[width:-width]


def synthesize_dataset(
    seed: int,
    total_hours: int,
    droughts: Sequence[tuple[int, int]] | None = None,
) -> AlignedDataset:
    """Build a deterministic hourly test dataset.

    Demand carries diurnal and seasonal shape around a 10 GW base with mild
    noise.  Wind is a smoothed stochastic process, PV follows a clear-sky
    daylight arc scaled by slow weather noise.  Optional drought windows force
    both resource series to exactly zero, which is the stress case for firm
    backup sizing.

    Parameters
    ----------
    seed : int
        Seed for the random generator; equal seeds give equal datasets.
    total_hours : int
        Series length in hours, at least 24.
    droughts : sequence of (start_hour, end_hour), optional
        Half-open windows, in hours from the series start, where both wind
        and PV capacity factors are set to zero.

    Returns
    -------
    AlignedDataset
    """
    if total_hours < 24:
        raise ValueError(f"total_hours must be at least 24, got {total_hours}")
    rng = np.random.default_rng(seed)
    h = np.arange(total_hours, dtype=np.float64)

    seasonal = np.cos(2.0 * np.pi * h / 8760.0)
    diurnal = -np.cos(2.0 * np.pi * ((h % 24.0) - 19.0) / 24.0)
    demand = 10.0 * (
        1.0 + 0.12 * seasonal + 0.22 * diurnal + 0.04 * _smooth(rng.standard_normal(total_hours), 6)
    )
    demand = np.maximum(demand, 0.5)

    wind = 0.35 + 0.10 * seasonal + 0.45 * _smooth(rng.standard_normal(total_hours), 24)
    wind = np.clip(wind, 0.0, 1.0)

    sun = np.sin(np.pi * ((h % 24.0) - 6.0) / 12.0)
    sun = np.maximum(sun, 0.0)
    weather = np.clip(0.75 + 0.35 * _smooth(rng.standard_normal(total_hours), 48), 0.05, 1.0)
    pv = np.clip(sun * weather * (0.95 + 0.05 * seasonal), 0.0, 1.0)

    if droughts:
        for start, end in droughts:
            if not (0 <= start < end <= total_hours):
                raise ValueError(
                    f"drought window ({start}, {end}) outside series of {total_hours} hours"
                )
            wind[start:end] = 0.0
            pv[start:end] = 0.0

    return AlignedDataset(
        demand=TimeSeries(demand, 1.0, KIND_DEMAND, label=f"synthetic-demand-{seed}"),
        wind_cf=TimeSeries(wind, 1.0, KIND_CAPACITY_FACTOR, label=f"synthetic-wind-{seed}"),
        pv_cf=TimeSeries(pv, 1.0, KIND_CAPACITY_FACTOR, label=f"synthetic-pv-{seed}"),
    )
