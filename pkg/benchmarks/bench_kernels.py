"""Time every hot kernel on the compiled and the NumPy backend.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The quadrotor has no NumPy twin; its compiled kernel is compared against the
generic RK4 loop in ``udtune.odesim`` instead.
"""
import argparse
import math
import timeit
from dataclasses import astuple, replace

import numpy as np

from udtune import kernels
from udtune.odesim import SimConfig, simulate
from udtune.plants.helicopter import HelicopterParams
from udtune.plants.quadrotor import REFERENCE_GAINS, make_quadrotor


def best_of(fn, repeat):
    number = 1
    while True:  # grow the loop count until one batch takes about 0.1 s
        t = timeit.timeit(fn, number=number)
        if t > 0.1 or number >= 1 << 16:
            break
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def cases():
    rng = np.random.default_rng(0)
    n = 301
    x = np.ascontiguousarray(rng.random((n, 6)))
    cand = np.ascontiguousarray(rng.random((252, n)))
    heli = (np.array(astuple(HelicopterParams())), np.array([55.8, 37.8, 22.5, 38.8, 14.4, 0.0]),
            np.array([0.4, 0.02]), np.zeros(4), 0.01, 2000, 100.0, False)
    gens = [h for h in range(1, n) if math.gcd(h, n) == 1]

    yield "glp_column  (n=301, all 252 generators)", lambda m: (lambda: [m.glp_column(n, h) for h in gens])
    yield "cd2_squared (301 x 6)", lambda m: (lambda: m.cd2_squared(x))
    yield "cd2_scan    (252 candidates, n=301)", lambda m: (lambda: m.cd2_scan(np.ones(n), np.ones((n, n)), cand, 1))
    yield "helicopter_run (20 s, dt=0.01)", lambda m: (lambda: m.helicopter_run(*heli))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    found = kernels.backends()
    names = [b for b in ("cython", "python") if b in found]
    print(f"{'kernel':42s}" + "".join(f"{b:>14s}" for b in names) + ("     speedup" if len(names) == 2 else ""))
    for label, make in cases():
        times = [best_of(make(found[b]), args.repeat) for b in names]
        line = f"{label:42s}" + "".join(f"{t * 1e3:11.3f} ms" for t in times)
        if len(times) == 2:
            line += f"  {times[1] / times[0]:9.1f}x"
        print(line)

    plant = make_quadrotor()
    cfg = SimConfig(0.001, 5.0, 1000.0)
    generic = replace(plant, kernel=None)
    t_gen = best_of(lambda: simulate(generic, REFERENCE_GAINS, cfg), max(1, args.repeat // 2))
    label = "quadrotor (5 s, dt=0.001)"
    if plant.kernel is not None:
        t_ker = best_of(lambda: simulate(plant, REFERENCE_GAINS, cfg), args.repeat)
        print(f"{label:42s}{t_ker * 1e3:11.3f} ms{t_gen * 1e3:11.3f} ms  {t_gen / t_ker:9.1f}x"
              "   (generic RK4 loop)")
    else:
        print(f"{label:42s}{t_gen * 1e3:11.3f} ms   (generic RK4 loop only)")


if __name__ == "__main__":
    main()
