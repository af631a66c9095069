#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Covers the two hot paths: evaluating a many-term symbol on a dense grid,
and RK4 advection stepping built on the 4th-order stencils.  Run as

    python benchmarks/bench_kernels.py

The dispatching module picks numba automatically; STARKIT_NO_NUMBA=1 would
force the numpy path package-wide, but here both implementations are timed
explicitly side by side.
"""

import time

import numpy as np

import starkit as sk
from starkit import _accel
from starkit import symbols as sym
from starkit.numerics import WIDE_SPEC


def timeit(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_eval():
    state = sk.sho_wigner_eigenstate(24)  # ~300 monomial-Gaussian terms
    arrays = sym._term_arrays(state)
    P, Q = WIDE_SPEC.meshes()
    print(f"grid evaluation: {len(state.terms)} terms on "
          f"{WIDE_SPEC.nq}x{WIDE_SPEC.np} nodes")
    if _accel.NUMBA_AVAILABLE:
        _accel.eval_terms_grid_numba(*arrays, P, Q)  # compile outside timing
        t_nb, (v_nb, _) = timeit(lambda: _accel.eval_terms_grid_numba(*arrays, P, Q))
    else:
        t_nb, v_nb = float("nan"), None
    t_np, (v_np, _) = timeit(lambda: _accel.eval_terms_grid_numpy(*arrays, P, Q))
    print(f"  numpy: {t_np * 1e3:8.2f} ms")
    if v_nb is not None:
        print(f"  numba: {t_nb * 1e3:8.2f} ms   (x{t_np / t_nb:.1f}); "
              f"max deviation {np.abs(v_np - v_nb).max():.2e}")


def _rk4(fd4, steps=100):
    P, Q = WIDE_SPEC.meshes()
    u0 = sym.evaluate_grid(sym.gaussian(1.0, app=-0.5, aqq=-0.5), P, Q)
    dq = (WIDE_SPEC.q_max - WIDE_SPEC.q_min) / (WIDE_SPEC.nq - 1)
    dp = (WIDE_SPEC.p_max - WIDE_SPEC.p_min) / (WIDE_SPEC.np - 1)
    vq, vp = P, -Q - 0.2 * P
    h = 1e-3

    def rhs(u):
        out = -vq * fd4(u, dq, 0) - vp * fd4(u, dp, 1)
        out[0, :] = out[-1, :] = 0.0
        out[:, 0] = out[:, -1] = 0.0
        return out

    def run():
        u = u0.copy()
        for _ in range(steps):
            k1 = rhs(u)
            k2 = rhs(u + 0.5 * h * k1)
            k3 = rhs(u + 0.5 * h * k2)
            k4 = rhs(u + h * k3)
            u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return u

    return run


def bench_rk4():
    print(f"RK4 advection: 100 steps on {WIDE_SPEC.nq}x{WIDE_SPEC.np} nodes")
    if _accel.NUMBA_AVAILABLE:
        _rk4(_accel.fd4_axis_numba, steps=1)()  # compile outside timing
        t_nb, u_nb = timeit(_rk4(_accel.fd4_axis_numba), repeats=2)
    else:
        t_nb, u_nb = float("nan"), None
    t_np, u_np = timeit(_rk4(_accel.fd4_axis_numpy), repeats=2)
    print(f"  numpy: {t_np * 1e3:8.2f} ms")
    if u_nb is not None:
        print(f"  numba: {t_nb * 1e3:8.2f} ms   (x{t_np / t_nb:.1f}); "
              f"max deviation {np.abs(u_np - u_nb).max():.2e}")


if __name__ == "__main__":
    print(f"numba available: {_accel.NUMBA_AVAILABLE}; "
          f"package dispatch uses numba: {_accel.USE_NUMBA}")
    bench_eval()
    bench_rk4()
