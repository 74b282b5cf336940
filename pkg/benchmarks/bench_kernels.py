"""Compare the compiled and NumPy stepping kernels on a default gate pulse.

    python benchmarks/bench_kernels.py --scheme cf4 --repeat 5
"""
import argparse
import time

import numpy as np

from rotgate import kernels
from rotgate.propagator import propagate
from rotgate.pulses import gate_params, synthesize
from rotgate.rotor import NACS, RotationalBasis, dipole_element
from rotgate.synthesis import named_gate


def bench(backend, spec, basis, wf, scheme, steps_per_period, repeat):
    dt = 2 * np.pi / spec.omega01 / steps_per_period
    best, res = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = propagate(spec, basis, wf, dt=dt, scheme=scheme, snapshots=0, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gate", default="H")
    ap.add_argument("--j-max", type=int, default=10)
    ap.add_argument("--scheme", default="midpoint", choices=("midpoint", "cf4"))
    ap.add_argument("--steps-per-period", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    spec = NACS
    basis = RotationalBasis(args.j_max)
    params, _ = gate_params(named_gate(args.gate), spec)
    wf = synthesize(params, dipole_element(spec, 0, 0))
    results = {}
    print(f"{'backend':<10}{'steps':>10}{'time (s)':>12}{'us/step':>10}")
    for name in kernels.available():
        t, r = bench(name, spec, basis, wf, args.scheme, args.steps_per_period, args.repeat)
        results[name] = (t, r)
        print(f"{name:<10}{r.n_steps:>10}{t:>12.4f}{1e6 * t / r.n_steps:>10.2f}")
    if len(results) == 2:
        (tc, rc), (tp, rp) = results["cython"], results["python"]
        diff = np.abs(rc.unitary_lab - rp.unitary_lab).max()
        print(f"speedup {tp / tc:.1f}x, max |U_cython - U_python| = {diff:.2e}")
    else:
        print("compiled kernel unavailable; only the NumPy fallback was timed")


if __name__ == "__main__":
    main()
