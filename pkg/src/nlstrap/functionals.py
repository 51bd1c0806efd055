"""Base functionals of the stationary problem and derived scalars.

All scalar diagnostics in this package reduce to the quintuple

    T = int |grad u|^2,   L = int r^2 |u|^2,   Q = 1/2 int |u|^2,
    A = int |u|^p,        B = int |u|^q,

computed once per profile by :func:`evaluate_functionals`; every quotient and
identity downstream is algebra on these five numbers, so identities that are
exact in the continuum stay exact to roundoff given a single quadrature pass.

Everything is specialized to two space dimensions: the linear ground mode of
-Laplacian + r^2 is exp(-r^2/2) with eigenvalue 2.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .quadrature import (
    RadialField,
    apply_trap_operator,
    integrate_values,
    radial_gradient_sq,
)

#: lowest eigenvalue of -Laplacian + r^2 in 2D (ground Gaussian mode)
GROUND_EIGENVALUE = 2.0


@dataclass(frozen=True)
class Parameters:
    """Problem parameters for the stationary equation

        -Laplacian u + r^2 u + lam*u - mu*|u|^(p-2) u + nu*|u|^(q-2) u = 0.

    The exponents must satisfy 2 < p < q.  `mu` is the focusing coefficient
    (the main theory assumes mu > 0; mu = 0 is admitted for validation runs
    only).  `nu` toggles the defocusing term and must be 0 or 1; homogeneity
    fixes it to 1 in all production runs.
    """

    p: float
    q: float
    mu: float
    nu: float = 1.0

    def __post_init__(self):
        if not (2.0 < self.p < self.q):
            raise ConfigurationError(
                f"exponent ordering violated: need 2 < p < q, got p={self.p}, q={self.q}"
            )
        if self.mu < 0:
            raise ConfigurationError(f"focusing coefficient must be >= 0, got {self.mu}")
        if self.nu not in (0.0, 1.0):
            raise ConfigurationError(f"defocusing toggle must be 0 or 1, got {self.nu}")


@dataclass(frozen=True)
class FunctionalValues:
    """The quintuple (T, L, Q, A, B) of a profile; see module docstring."""

    T: float
    L: float
    Q: float
    A: float
    B: float


def evaluate_functionals(u, params):
    """Evaluate (T, L, Q, A, B) for a radial profile."""
    g = u.grid
    v = u.values
    absv = np.abs(v)
    return FunctionalValues(
        T=integrate_values(g, radial_gradient_sq(u).values),
        L=integrate_values(g, g.nodes**2 * v * v),
        Q=0.5 * integrate_values(g, v * v),
        A=integrate_values(g, absv**params.p),
        B=integrate_values(g, absv**params.q),
    )


def action(fv, lam, params):
    """S_lam(u) = T/2 + L/2 + lam*Q - (mu/p) A + (nu/q) B."""
    return (
        0.5 * fv.T
        + 0.5 * fv.L
        + lam * fv.Q
        - (params.mu / params.p) * fv.A
        + (params.nu / params.q) * fv.B
    )


def energy(fv, params):
    """Conserved energy; action(fv, lam) = energy(fv) + lam*Q identically."""
    return action(fv, 0.0, params)


def pohozaev_defect(fv, lam, params):
    """Dimension-reduced Pohozaev combination L + lam*Q - (mu/p)A + (nu/q)B.

    Vanishes on every solution of the stationary equation; reported per unit
    dimension so its scale is comparable with the individual terms.
    """
    return (
        fv.L
        + lam * fv.Q
        - (params.mu / params.p) * fv.A
        + (params.nu / params.q) * fv.B
    )


def pohozaev_rel(fv, lam, params):
    """Pohozaev defect normalized by the sum of magnitudes of its terms."""
    scale = (
        fv.L
        + abs(lam) * fv.Q
        + (params.mu / params.p) * fv.A
        + (params.nu / params.q) * fv.B
    )
    return abs(pohozaev_defect(fv, lam, params)) / scale if scale > 0 else 0.0


def el_residual(u, lam, params):
    """Euler-Lagrange residual of the action: the L^2-gradient

        g = (-Laplacian + r^2 + lam) u - mu |u|^(p-2) u + nu |u|^(q-2) u

    with the radial Laplacian discretized at 4th order.  Zero exactly at
    discrete solutions of the stationary equation.
    """
    v = u.values
    absv = np.abs(v)
    g = apply_trap_operator(u.grid, v) + lam * v
    if params.mu != 0.0:
        g = g - params.mu * absv ** (params.p - 2.0) * v
    if params.nu != 0.0:
        g = g + params.nu * absv ** (params.q - 2.0) * v
    return RadialField(u.grid, g)


def l2_norm(u):
    return float(np.sqrt(max(integrate_values(u.grid, u.values * u.values), 0.0)))


def residual_rel(u, lam, params):
    """Relative L^2 residual of the stationary equation at (u, lam)."""
    nu_ = l2_norm(u)
    if nu_ == 0.0:
        return np.inf
    return l2_norm(el_residual(u, lam, params)) / nu_


def sigma_norm_sq(u):
    """Squared norm of the oscillator energy space:
    int ((1 + r^2)|u|^2 + |u'|^2) = 2Q + L + T."""
    g = u.grid
    v = u.values
    return integrate_values(
        g, (1.0 + g.nodes**2) * v * v + radial_gradient_sq(u).values
    )
