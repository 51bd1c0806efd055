#!/usr/bin/env python3
"""Benchmark the compiled phase kernel against the numpy fallback.

The pointwise nonlinear-plus-potential phase is applied twice per split
step, so its cost together with the two FFTs bounds every propagation run.
Run after `pip install -e .`; the compiled column disappears if the
extension is unavailable.
"""

import time

import numpy as np
import scipy.fft as sfft

from nlstrap import Parameters, make_cartesian_grid
from nlstrap.kernels import _ext, apply_nonlinear_phase_numpy
from nlstrap.propagator import _phase_args, _step_tables


def time_call(fn, repeats=200):
    best = np.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def main():
    params = Parameters(4.0, 6.0, 10.0)
    mu, nu, ep, eq = _phase_args(params)
    dt = 1e-3
    print(f"{'m':>5} {'numpy phase':>12} {'cython phase':>13} {'speedup':>8} {'fft2 pair':>10} {'full step':>11}")
    for m in (128, 256, 512):
        grid = make_cartesian_grid(m, 10.0)
        vhalf, kinetic = _step_tables(grid, dt)
        rng = np.random.default_rng(0)
        base = (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))) * np.exp(
            -(grid.axis[:, None] ** 2 + grid.axis[None, :] ** 2) / 8.0
        )
        base = np.ascontiguousarray(base, dtype=np.complex128)

        work = base.copy()
        t_numpy = time_call(
            lambda: apply_nonlinear_phase_numpy(work, vhalf, 0.5 * dt, mu, nu, ep, eq)
        )
        if _ext is not None:
            work2 = base.copy()
            t_cython = time_call(
                lambda: _ext.apply_nonlinear_phase(work2, vhalf, 0.5 * dt, mu, nu, ep, eq)
            )
            speedup = t_numpy / t_cython
            phase = t_cython
            cy_str, sp_str = f"{t_cython * 1e3:10.3f} ms", f"{speedup:7.2f}x"
        else:
            phase = t_numpy
            cy_str, sp_str = f"{'n/a':>13}", f"{'n/a':>8}"

        t_fft = time_call(lambda: sfft.ifft2(sfft.fft2(base) * kinetic))

        from nlstrap.propagator import _step_inplace

        work3 = base.copy()

        def full_step():
            nonlocal work3
            work3 = _step_inplace(work3, vhalf, kinetic, dt, mu, nu, ep, eq)

        t_step = time_call(full_step)
        print(
            f"{m:>5} {t_numpy * 1e3:10.3f} ms {cy_str} {sp_str} "
            f"{t_fft * 1e3:8.3f} ms {t_step * 1e3:11.3f} ms"
        )


if __name__ == "__main__":
    main()
