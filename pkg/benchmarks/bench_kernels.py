"""Compare the compiled and pure-Python integration kernels.

Runs each preset stroke with both backends, checks the trajectories are
bit-identical, and reports wall time per solve.

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import stafermi as sf
from stafermi import _kernel
from stafermi.engine import IntegratorConfig
from stafermi.scenario import _integrate, build_drive


def _cases():
    for name in sf.PRESET_NAMES:
        yield name, sf.parse_scenario(sf.preset_config(name))


def _solve(scenario):
    return _integrate(scenario, build_drive(scenario)[1])


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if "cython" not in _kernel.AVAILABLE:
        raise SystemExit("compiled kernel not built; reinstall with Cython "
                         "available to benchmark it")

    print(f"{'preset':<20}{'python':>12}{'cython':>12}{'speedup':>10}  parity")
    for name, scenario in _cases():
        results = {}
        times = {}
        for backend in ("python", "cython"):
            _kernel.set_backend(backend)
            _solve(scenario)  # warm-up (table construction, imports)
            best = float("inf")
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                traj = _solve(scenario)
                best = min(best, time.perf_counter() - t0)
            results[backend] = traj
            times[backend] = best
        same = (np.array_equal(results["python"].b, results["cython"].b)
                and np.array_equal(results["python"].bdot,
                                   results["cython"].bdot)
                and np.array_equal(results["python"].cq,
                                   results["cython"].cq))
        print(f"{name:<20}{times['python']*1e3:>10.2f}ms"
              f"{times['cython']*1e3:>10.2f}ms"
              f"{times['python']/times['cython']:>10.1f}x"
              f"  {'bit-identical' if same else 'MISMATCH'}")
    _kernel.set_backend("cython")


if __name__ == "__main__":
    main()
