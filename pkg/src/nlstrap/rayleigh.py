"""Generalized Rayleigh quotients of the prescribed-action formulation.

Every quotient is pure algebra on a :class:`FunctionalValues` quintuple.
For a prescribed action level S:

* frequency_quotient: the frequency lam such that the action of u at lam
  equals S.
* optimal_dilation: the unique dilation factor placing u on the shell where
  the frequency quotient is stationary in dilation (exists iff T >= 2S).
* reduced_frequency_quotient: the frequency quotient pre-maximized over
  dilations; invariant under dilation of the input.
* coefficient_quotient: the focusing coefficient that makes the reduced
  frequency vanish; its infimum over profiles is the existence threshold
  for positive-frequency solutions.
* coefficient_objective: an equivalent objective whose minimum over
  dilations reproduces coefficient_quotient.
* stationary_amplitude: the amplitude rescaling that minimizes the S=0
  coefficient quotient along t -> t*u.
"""

import math

from .errors import InfeasibleDilationError, ZeroFieldError


def frequency_quotient(fv, S, params):
    """(S - T/2 - L/2 + (mu/p)A - (nu/q)B) / Q.

    Defining property: frequency_quotient(u) = lam iff action(u, lam) = S.
    """
    if fv.Q <= 0.0:
        raise ZeroFieldError("frequency quotient needs a nonzero field (Q > 0)")
    return (
        S
        - 0.5 * fv.T
        - 0.5 * fv.L
        + (params.mu / params.p) * fv.A
        - (params.nu / params.q) * fv.B
    ) / fv.Q


def optimal_dilation(fv, S):
    """((T - 2S)/L)^(1/4), the dilation putting u on the stationary shell."""
    if fv.L <= 0.0:
        raise ZeroFieldError("optimal dilation needs a field with L > 0")
    gap = fv.T - 2.0 * S
    if gap < 0.0:
        raise InfeasibleDilationError(
            f"kinetic term too small for this action level: T - 2S = {gap}"
        )
    return (gap / fv.L) ** 0.25


def reduced_frequency_quotient(fv, S, params):
    """-(sqrt((T - 2S) L) - (mu/p)A + (nu/q)B) / Q.

    Equals the maximum of frequency_quotient over all dilations of u when
    T > 2S, hence is invariant under dilation of the input.
    """
    if fv.Q <= 0.0:
        raise ZeroFieldError("reduced frequency quotient needs a nonzero field")
    if fv.L <= 0.0:
        raise ZeroFieldError("reduced frequency quotient needs a field with L > 0")
    gap = fv.T - 2.0 * S
    if gap < 0.0:
        raise InfeasibleDilationError(
            f"kinetic term too small for this action level: T - 2S = {gap}"
        )
    return -(
        math.sqrt(gap * fv.L)
        - (params.mu / params.p) * fv.A
        + (params.nu / params.q) * fv.B
    ) / fv.Q


def coefficient_quotient(fv, S, params):
    """(sqrt((T - 2S) L) + (nu/q)B) / ((1/p)A).

    coefficient_quotient(u) = mu iff reduced_frequency_quotient(u; mu) = 0,
    and it is < mu iff the reduced frequency at mu is positive.
    """
    if fv.A <= 0.0:
        raise ZeroFieldError("coefficient quotient needs a field with A > 0")
    if fv.L <= 0.0:
        raise ZeroFieldError("coefficient quotient needs a field with L > 0")
    gap = fv.T - 2.0 * S
    if gap < 0.0:
        raise InfeasibleDilationError(
            f"kinetic term too small for this action level: T - 2S = {gap}"
        )
    return (math.sqrt(gap * fv.L) + (params.nu / params.q) * fv.B) / (fv.A / params.p)


def coefficient_objective(fv, S, params):
    """(-S + T/2 + L/2 + (nu/q)B) / ((1/p)A); its minimum over dilations of u
    equals coefficient_quotient(u)."""
    if fv.A <= 0.0:
        raise ZeroFieldError("coefficient objective needs a field with A > 0")
    return (
        -S + 0.5 * fv.T + 0.5 * fv.L + (params.nu / params.q) * fv.B
    ) / (fv.A / params.p)


def stationary_amplitude(fv, params):
    """Amplitude t minimizing t -> coefficient_quotient(t*u) at S = 0.

    Stationarity of t -> (sqrt(TL) t^2 + (1/q) B t^q) / ((1/p) A t^p) gives

        t^(q-2) = (p-2) * q * sqrt(T L) / ((q-p) * B).
    """
    if fv.B <= 0.0:
        raise ZeroFieldError("stationary amplitude needs a field with B > 0")
    p, q = params.p, params.q
    return ((p - 2.0) * q * math.sqrt(fv.T * fv.L) / ((q - p) * fv.B)) ** (
        1.0 / (q - 2.0)
    )
