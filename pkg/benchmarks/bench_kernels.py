"""Time the numba and pure-numpy propagation kernels on the same workload.

    python benchmarks/bench_kernels.py [--preset fig3] [--repeat 5]

Both kernels receive identical precomputed propagators and channel operators,
so the timings isolate the time-stepping loop. The propagator precomputation
(shared by both paths) is timed separately.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cavsim import dynamics, kernels, scenario
from cavsim._backend import HAVE_NUMBA


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="fig3")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    cfg = scenario.load_preset(args.preset)
    params, integ = cfg.params(), cfg.integrator()
    channels = cfg.channels()
    rho0 = dynamics._initial_density(params, cfg.resolved_initial_state)
    setup = _best(lambda: dynamics._propagators(params, integ), args.repeat)
    props = dynamics._propagators(params, integ)
    packed = dynamics._pack_channels(channels, rho0.shape[0])
    call = (props, rho0, *packed, integ.dt, integ.iterations, integ.record_stride)

    print(f"preset {args.preset}: {integ.iterations} steps, dim {rho0.shape[0]}, {len(channels)} channels")
    print(f"propagator setup      {setup * 1e3:9.2f} ms")
    t_np = _best(lambda: kernels.propagate_numpy(*call), args.repeat)
    print(f"numpy kernel          {t_np * 1e3:9.2f} ms")
    if not HAVE_NUMBA:
        print("numba not installed; install the 'fast' extra to compare")
        return
    kernels.propagate_numba(*call)  # compile / load cache
    t_nb = _best(lambda: kernels.propagate_numba(*call), args.repeat)
    diff = np.max(np.abs(kernels.propagate_numpy(*call)[0] - kernels.propagate_numba(*call)[0]))
    print(f"numba kernel          {t_nb * 1e3:9.2f} ms   speedup x{t_np / t_nb:.1f}")
    print(f"max |rho_numpy - rho_numba| {diff:.2e}")


if __name__ == "__main__":
    main()
