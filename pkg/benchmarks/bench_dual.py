"""Benchmark the compiled dual-number kernel against the pure-Python twin.

The flat ``Dual``/``Dual2`` scalars carry every first-order Jacobian in
the package, so their overhead dominates chart-map differentiation.
This script times three representative workloads under both backends
and reports the speedup.

Usage: python3 benchmarks/bench_dual.py [--repeat N]
"""

import argparse
import contextlib
import time

import numpy as np

import gnk.dual as dual
from gnk import _dual_py

try:
    from gnk import _dualcore
except ImportError:
    _dualcore = None

from gnk.groupoid import builtin_groupoid
from gnk.manifold_bundle import ChartManifold, trivial_bundle
from gnk.jet_bundle import jet_from_fiber_block
from gnk.multiphase import builtin_lagrangian, legendre_full
from gnk.smooth import box_sampler, random_polynomial_map


@contextlib.contextmanager
def backend(module):
    saved = dual.Dual, dual.Dual2
    dual.Dual, dual.Dual2 = module.Dual, module.Dual2
    try:
        yield
    finally:
        dual.Dual, dual.Dual2 = saved


def workload_polynomial(rng):
    f = random_polynomial_map(6, 6, 3, rng, scale=0.3)
    pts = [box_sampler(np.array([[-1.0, 1.0]] * 6), rng)
           for _ in range(50)]

    def run():
        for x in pts:
            f.jacobian(x)

    return run


def workload_groupoid(rng):
    M = ChartManifold(2, [(-1.0, 1.0), (-1.0, 1.0)])
    G = builtin_groupoid("frame", M)
    pairs = []
    for _ in range(50):
        g = G.sample_element(rng)
        h = np.array(G.sample_element(rng))
        h[G.base.dim:2 * G.base.dim] = G.tau.eval(g)
        pairs.append(np.concatenate([h, g]))

    def run():
        for hg in pairs:
            G.mu.jacobian(hg)

    return run


def workload_legendre(rng):
    M = ChartManifold(2, [(-1.0, 1.0), (-1.0, 1.0)])
    E = trivial_bundle(M, 2, half_width=3.0)
    L = builtin_lagrangian("klein_gordon", E, mass=0.5)
    jets = [jet_from_fiber_block(box_sampler(E.total_box, rng),
                                 rng.standard_normal((2, 2)))
            for _ in range(50)]

    def run():
        for u in jets:
            legendre_full(L, u)

    return run


def timeit(run, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        run()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    workloads = [("polynomial_jacobian", workload_polynomial(rng)),
                 ("groupoid_multiply", workload_groupoid(rng)),
                 ("legendre_transform", workload_legendre(rng))]
    print("active backend at import: %s" % dual.BACKEND)
    if _dualcore is None:
        print("compiled kernel unavailable; timing pure Python only")
    print("%-22s %12s %12s %9s" % ("workload", "python (s)",
                                   "compiled (s)", "speedup"))
    for name, run in workloads:
        with backend(_dual_py):
            t_py = timeit(run, args.repeat)
        if _dualcore is None:
            print("%-22s %12.4f %12s %9s" % (name, t_py, "-", "-"))
            continue
        with backend(_dualcore):
            t_c = timeit(run, args.repeat)
        print("%-22s %12.4f %12.4f %8.2fx" % (name, t_py, t_c,
                                              t_py / t_c))


if __name__ == "__main__":
    main()
