"""Time the compiled balance kernel against the pure-numpy fallback.

Both callables implement the identical hourly loop; the compiled one is
what `simulate` uses unless FIRMDISPATCH_NO_NUMBA is set.  Run:

    python3 benchmarks/kernel_benchmark.py --hours 8760 --repeats 20
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from firmdispatch import CapacityMix, SimParams, synthesize_dataset
from firmdispatch._kernels import (
    HAS_NUMBA,
    N_ROWS,
    balance_loop_numba,
    balance_loop_python,
)


def _inputs(hours: int, seed: int):
    data = synthesize_dataset(seed=seed, total_hours=hours)
    mix = CapacityMix(
        wind_gw=20.0,
        pv_gw=15.0,
        battery_power_gw=6.0,
        battery_hours=4.0,
        dispatch_gw=12.0,
    )
    params = SimParams()
    ren = mix.wind_gw * data.wind_cf.values + mix.pv_gw * data.pv_cf.values
    return data, mix, params, ren


def _time(fn, args, repeats: int) -> float:
    fn(*args)  # warm up (first numba call compiles)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--hours", type=int, default=8760)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    data, mix, params, ren = _inputs(args.hours, args.seed)
    out = np.empty((N_ROWS, data.n_steps))
    call = (
        data.demand.values,
        ren,
        data.dt_hours,
        0.0,
        mix.battery_power_gw,
        mix.battery_energy_gwh,
        params.round_trip_efficiency,
        0.0,
        mix.dispatch_gw,
        False,
        out,
    )

    t_py = _time(balance_loop_python, call, args.repeats)
    print(f"pure numpy : {t_py * 1e3:9.3f} ms  ({args.hours} steps)")
    if HAS_NUMBA:
        t_nb = _time(balance_loop_numba, call, args.repeats)
        print(f"numba      : {t_nb * 1e3:9.3f} ms  ({args.hours} steps)")
        print(f"speedup    : {t_py / t_nb:9.1f}x")
    else:
        print("numba      : not installed, skipped")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
