"""Time the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--weeks 2000] [--repeat 20]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from comove import _kernels_py
from comove.likelihood import COND_MAX, t_log_constant
from comove.reference import reference_params
from comove.simulation import SimSpec, simulate_paths

try:
    from comove import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _cases(T: int, seed: int = 0):
    p = reference_params()
    sp = simulate_paths(SimSpec(p, T=T + 1, seed=seed))
    r = np.ascontiguousarray(sp.r)
    v, c = p.variance, p.correlation
    h0 = r.var(axis=0)
    eps = np.ascontiguousarray(sp.eps)
    S = np.ascontiguousarray(c.S)
    const = t_log_constant(c.nu)

    def garch(mod):
        h = np.empty_like(r)
        return lambda: mod.garch_recursion(r, v.omega, v.kappa, v.lam, h0, h)

    def dcc(mod):
        Q = np.empty((len(eps), 5, 5))
        R = np.empty_like(Q)
        return lambda: mod.dcc_recursion(eps, c.alpha, c.beta, S, S, Q, R)

    def loglik(mod):
        out = np.empty(len(r))
        return lambda: mod.system_loglik(r, v.omega, v.kappa, v.lam, h0, c.alpha, c.beta, S, S,
                                         c.nu, const, COND_MAX, out)

    return {"garch_recursion": garch, "dcc_recursion": dcc, "system_loglik": loglik}


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weeks", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)

    backends = [("python", _kernels_py)]
    if _kernels_c is not None:
        backends.append(("cython", _kernels_c))
    else:
        print("compiled extension not built; timing the NumPy fallback only")

    print(f"{'kernel':<17}" + "".join(f"{name + ' (ms)':>15}" for name, _ in backends) + f"{'speed-up':>10}")
    for kernel, make in _cases(args.weeks).items():
        times = []
        for _, mod in backends:
            fn = make(mod)
            fn()
            times.append(min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3)
        speed = f"{times[0] / times[1]:>9.1f}x" if len(times) == 2 else ""
        print(f"{kernel:<17}" + "".join(f"{t:>15.3f}" for t in times) + speed)


if __name__ == "__main__":
    main()
