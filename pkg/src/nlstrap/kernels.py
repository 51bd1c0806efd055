"""Backend selection for the propagator's pointwise phase kernel.

The compiled extension is used when it imported successfully; set
NLSTRAP_PURE_PYTHON=1 to force the numpy fallback.  Both implementations
compute, in place,

    psi *= vhalf * exp(1j * coef * (mu*|psi|^(p-2) - nu*|psi|^(q-2)))

with the amplitude powers expressed through a2 = |psi|^2 (ep = (p-2)/2,
eq = (q-2)/2), which is the exact nonlinear-plus-potential half-step of the
splitting.  benchmarks/bench_kernels.py compares the two.
"""

import os

import numpy as np

try:
    from . import _phase as _ext
except ImportError:  # pragma: no cover - built environments have it
    _ext = None


def backend():
    """Name of the active kernel backend ('cython' or 'numpy')."""
    if _ext is not None and not os.environ.get("NLSTRAP_PURE_PYTHON"):
        return "cython"
    return "numpy"


def apply_nonlinear_phase_numpy(psi, vhalf, coef, mu, nu, ep, eq):
    a2 = psi.real**2 + psi.imag**2
    theta = np.zeros_like(a2)
    if mu != 0.0:
        theta += mu * a2**ep
    if nu != 0.0:
        theta -= nu * a2**eq
    if coef != 1.0:
        theta *= coef
    psi *= vhalf
    psi *= np.cos(theta) + 1j * np.sin(theta)


def apply_nonlinear_phase(psi, vhalf, coef, mu, nu, ep, eq):
    """In-place nonlinear-plus-potential phase substep on a complex array."""
    if backend() == "cython":
        _ext.apply_nonlinear_phase(psi, vhalf, coef, mu, nu, ep, eq)
    else:
        apply_nonlinear_phase_numpy(psi, vhalf, coef, mu, nu, ep, eq)
