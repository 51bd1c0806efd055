"""Variational solvers for the stationary problem.

Four entry points:

* solve_ffs: preconditioned ascent of the reduced frequency quotient at a
  prescribed action level (the fundamental-frequency problem), finished by a
  rank-one-corrected Newton polish.
* solve_mu_hat: preconditioned descent of the coefficient quotient; its
  minimizer solves the stationary equation with lam = 0 and mu equal to the
  extremal coefficient.
* solve_fixed_frequency: independent oracle for the stationary equation at a
  fixed frequency (damped Newton from a pointwise-balance initial profile).
* solve_constrained_appendix: constrained minimization over the unit
  p-power shell, recovering homogeneous and combined-nonlinearity solutions
  together with their Lagrange multipliers.

All solvers share the banded trap operator H = -Laplacian_r + r^2 and the
preconditioner (H + shift)^{-1}, applied by direct banded LU.
"""

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_banded
from scipy.ndimage import gaussian_filter1d
from scipy.optimize import brentq

from .errors import ConfigurationError, InfeasibleDilationError
from .functionals import (
    GROUND_EIGENVALUE,
    Parameters,
    action,
    el_residual,
    evaluate_functionals,
    l2_norm,
    pohozaev_rel,
)
from .quadrature import (
    RadialField,
    apply_trap_operator,
    dilate,
    gaussian_profile,
    integrate_values,
    make_radial_grid,
    radial_gradient_sq,
    trap_operator_bands,
)
from .rayleigh import coefficient_quotient, reduced_frequency_quotient

_LINE_SEARCH_MAX = 60
_NEWTON_MAX = 60


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 5000
    grad_tol: float = 1e-8
    step: float = 0.5
    backtrack: float = 0.5
    precond_shift: float = 1.0

    def __post_init__(self):
        if min(self.max_iters, self.grad_tol, self.step, self.backtrack, self.precond_shift) <= 0:
            raise ConfigurationError("solver settings must all be positive")
        if self.grad_tol >= 1e-4:
            raise ConfigurationError("grad_tol must be below 1e-4")
        if self.backtrack >= 1.0:
            raise ConfigurationError("backtrack factor must shrink the step")


@dataclass
class SolveReport:
    profile: RadialField
    value: float
    fv: object
    residual_rel: float
    pohozaev_rel: float
    dilation_defect: float
    iterations: int
    converged: bool
    message: str = ""
    extra: dict = field(default_factory=dict)


@dataclass
class VerificationRecord:
    """Diagnostics bundle for a claimed solution; computing it never raises."""

    residual_rel: float
    pohozaev_rel: float
    dilation_defect: float
    action_rel: float
    monotone_defect: float
    monotone_ok: bool
    kinetic_margin: float
    kinetic_ok: bool


@lru_cache(maxsize=4)
def default_radial_grid():
    return make_radial_grid(1024, 12.0)


def _kinetic_moment(u):
    g = u.grid
    T = integrate_values(g, radial_gradient_sq(u).values)
    L = integrate_values(g, g.nodes**2 * u.values**2)
    return T, L


def renormalize(u, S):
    """Dilate u so that the dilation identity T - 2S = L holds."""
    T, L = _kinetic_moment(u)
    if L <= 0.0:
        raise InfeasibleDilationError("cannot renormalize a field with L = 0")
    gap = T - 2.0 * S
    if gap < 0.0:
        raise InfeasibleDilationError(
            f"kinetic term too small for this action level: T - 2S = {gap}"
        )
    sigma = (gap / L) ** 0.25
    return dilate(u, sigma)


def _shell_project(u, S, tol=1e-8):
    """Renormalize unless the shell identity already holds to within `tol`.

    Near a solution the identity is maintained by the iteration itself to
    roundoff, while the interpolation in `dilate` injects resampling noise
    above the solver tolerance; skipping the no-op dilation lets the Newton
    endgame converge below it.
    """
    T, L = _kinetic_moment(u)
    if L <= 0.0:
        raise InfeasibleDilationError("cannot renormalize a field with L = 0")
    gap = T - 2.0 * S
    if gap < 0.0:
        raise InfeasibleDilationError(
            f"kinetic term too small for this action level: T - 2S = {gap}"
        )
    sigma = (gap / L) ** 0.25
    if abs(sigma - 1.0) <= tol:
        return u
    return dilate(u, sigma)


def _solve_shifted(grid, diag_extra, rhs):
    """Solve (H + diag_extra) x = rhs with H the banded trap operator."""
    ab = trap_operator_bands(grid).copy()
    ab[2] += diag_extra
    return solve_banded((2, 2), ab, rhs)


def _dilation_defect(fv, S):
    return abs(fv.T - 2.0 * S - fv.L) / fv.L if fv.L > 0 else np.inf


def _quotient_optimize(u0, S, cfg, objective, residual_setup):
    """Shared ascent driver for the two quotient problems.

    `objective(fv)` is maximized; `residual_setup(fv)` returns the (lam,
    params) pair at which the Euler-Lagrange residual of the current iterate
    is the exact gradient of the objective (up to the -1/Q resp. p/A factor).
    Line search accepts only strict objective increase; when float resolution
    of the objective floors out before grad_tol, a rank-one-corrected Newton
    polish finishes the job.
    """
    grid = u0.grid
    u = RadialField(grid, np.abs(u0.values))
    q0 = integrate_values(grid, u.values**2)
    if q0 <= 0.0:
        raise ConfigurationError("initial iterate is identically zero")
    tau = cfg.step
    iterations = 0
    message = ""

    def measure(u):
        u = RadialField(grid, np.abs(u.values))
        u = _shell_project(u, S)
        fv = evaluate_functionals(u, residual_setup.params_template)
        val = objective(fv)
        lam_res, params_res = residual_setup(fv)
        g = el_residual(u, lam_res, params_res)
        rr = l2_norm(g) / math.sqrt(2.0 * fv.Q)
        return u, fv, val, lam_res, params_res, g, rr

    u, fv, val, lam_res, params_res, g, rr = measure(u)
    for it in range(cfg.max_iters):
        iterations = it
        if rr <= cfg.grad_tol:
            return u, fv, lam_res, params_res, rr, iterations, True, message
        if integrate_values(grid, u.values**2) < 1e-24 * q0:
            return u, fv, lam_res, params_res, rr, iterations, False, "iterate collapsed to zero"
        d = _solve_shifted(grid, cfg.precond_shift, g.values)
        tau = min(tau / cfg.backtrack, 2.0)
        accepted = False
        for _ in range(_LINE_SEARCH_MAX):
            trial = RadialField(grid, u.values - tau * d)
            try:
                ut, fvt, vt, lamt, pt, gt, rrt = measure(trial)
            except (InfeasibleDilationError, FloatingPointError):
                tau *= cfg.backtrack
                continue
            if np.isfinite(vt) and vt > val:
                u, fv, val, lam_res, params_res, g, rr = ut, fvt, vt, lamt, pt, gt, rrt
                accepted = True
                break
            tau *= cfg.backtrack
        if not accepted:
            break

    if rr > cfg.grad_tol:
        u, fv, lam_res, params_res, rr, extra_it, message = _newton_polish(
            u, S, cfg, residual_setup
        )
        iterations += extra_it
    return u, fv, lam_res, params_res, rr, iterations, rr <= cfg.grad_tol, message


def _newton_polish(u, S, cfg, residual_setup):
    """Newton on the stationary system with the quotient-induced rank-one
    coupling, solved by Sherman-Morrison over the banded local operator.

    No shell projection here: the reduced quotient is dilation invariant,
    the root satisfies the shell identity on its own (discrete Pohozaev),
    and redilating near convergence would inject resampling noise above
    grad_tol.
    """
    grid = u.grid
    best = None
    message = ""
    worse = 0
    for it in range(_NEWTON_MAX):
        u = RadialField(grid, np.abs(u.values))
        fv = evaluate_functionals(u, residual_setup.params_template)
        lam_res, params_res = residual_setup(fv)
        g = el_residual(u, lam_res, params_res)
        rr = l2_norm(g) / math.sqrt(2.0 * fv.Q)
        if best is None or rr < best[4]:
            best = (u, fv, lam_res, params_res, rr)
            worse = 0
        else:
            worse += 1
        if rr <= cfg.grad_tol or worse >= 5 or not np.isfinite(rr):
            break
        p_, q_, mu_, nu_ = params_res.p, params_res.q, params_res.mu, params_res.nu
        absu = np.abs(u.values)
        diag = (
            lam_res
            - mu_ * (p_ - 1.0) * absu ** (p_ - 2.0)
            + nu_ * (q_ - 1.0) * absu ** (q_ - 2.0)
        )
        rank1_vec, rank1_row = residual_setup.rank_one(u, fv, g)
        ab = trap_operator_bands(grid).copy()
        ab[2] += diag
        try:
            inv_g = solve_banded((2, 2), ab, g.values)
            inv_a = solve_banded((2, 2), ab, rank1_vec)
        except np.linalg.LinAlgError:
            message = "newton linear solve failed"
            break
        denom = 1.0 - rank1_row @ inv_a
        if denom == 0.0 or not np.isfinite(denom):
            message = "newton rank-one correction degenerate"
            break
        du = inv_g + inv_a * (rank1_row @ inv_g) / denom
        u = RadialField(grid, u.values - du)
    u, fv, lam_res, params_res, rr = best
    return u, fv, lam_res, params_res, rr, it + 1, message


class _FrequencySetup:
    """Residual wiring for ascent of the reduced frequency quotient."""

    def __init__(self, S, params):
        self.S = S
        self.params_template = params

    def __call__(self, fv):
        lam = reduced_frequency_quotient(fv, self.S, self.params_template)
        return lam, self.params_template

    def rank_one(self, u, fv, g):
        # d(lam)[h] = -(1/Q) <g, h>, so J = A_loc - (u/Q) (w g)^T
        return u.values / fv.Q, u.grid.weights * g.values


class _CoefficientSetup:
    """Residual wiring for descent of the coefficient quotient."""

    def __init__(self, S, params):
        self.S = S
        self.params_template = params

    def __call__(self, fv):
        m = coefficient_quotient(fv, self.S, self.params_template)
        return 0.0, replace(self.params_template, mu=m)

    def rank_one(self, u, fv, g):
        # d(mu)[h] = (p/A) <g, h>, so J = A_loc - (p/A)|u|^(p-2)u (w g)^T
        p = self.params_template.p
        vec = (p / fv.A) * np.abs(u.values) ** (p - 2.0) * u.values
        return vec, u.grid.weights * g.values


def _build_report(u, fv, value, lam_res, params_res, S, rr, iterations, converged, message):
    dil = _dilation_defect(fv, S)
    if converged and dil > 1e-6 and not message:
        # the shell identity of the discrete solution holds only to the
        # discretization's own truncation level; a finer grid is needed
        message = (
            f"residual converged but the dilation identity holds only to "
            f"{dil:.2e}; refine the radial grid"
        )
    report = SolveReport(
        profile=u,
        value=value,
        fv=fv,
        residual_rel=rr,
        pohozaev_rel=pohozaev_rel(fv, lam_res, params_res),
        dilation_defect=dil,
        iterations=iterations,
        converged=bool(converged and dil <= 1e-6),
        message=message,
    )
    return report


def solve_ffs(params, S, cfg=None, grid=None, initial=None, allow_positive_action=False):
    """Maximize the reduced frequency quotient at action level S.

    Returns a report whose profile solves the stationary equation with the
    fundamental frequency as `value`.  For S > 0 existence is conjectural and
    the run must be opted into explicitly; the dilation constraint T > 2S is
    then monitored every iteration through renormalization.
    """
    if S > 0 and not allow_positive_action:
        raise ConfigurationError(
            "positive action level requested without the explicit opt-in flag; "
            "solutions with S > 0 are not expected to exist"
        )
    cfg = cfg or SolverConfig()
    grid = grid or default_radial_grid()
    u0 = initial if initial is not None else gaussian_profile(grid)
    setup = _FrequencySetup(S, params)
    try:
        u, fv, lam, params_res, rr, iters, ok, msg = _quotient_optimize(
            u0, S, cfg, lambda fv: reduced_frequency_quotient(fv, S, params), setup
        )
    except InfeasibleDilationError as exc:
        raise ConfigurationError(
            f"action level S={S} infeasible from this iterate: {exc}"
        ) from exc
    report = _build_report(u, fv, lam, lam, params_res, S, rr, iters, ok, msg)
    report.extra["frequency_positive"] = bool(lam > 0.0)
    if lam < 0.0 and not report.message:
        report.message = (
            "nonpositive frequency: mu does not exceed the extremal "
            "coefficient at this action level"
        )
    return report


def solve_mu_hat(params, S, cfg=None, grid=None, initial=None):
    """Minimize the coefficient quotient at action level S <= 0.

    The converged profile solves the stationary equation with lam = 0 and
    mu equal to the extremal coefficient (the report `value`); params.mu is
    ignored by the quotient itself.
    """
    if S > 0:
        raise ConfigurationError("extremal-coefficient descent requires S <= 0")
    cfg = cfg or SolverConfig()
    grid = grid or default_radial_grid()
    u0 = initial if initial is not None else gaussian_profile(grid)
    setup = _CoefficientSetup(S, params)
    u, fv, lam0, params_res, rr, iters, ok, msg = _quotient_optimize(
        u0, S, cfg, lambda fv: -coefficient_quotient(fv, S, params), setup
    )
    return _build_report(u, fv, params_res.mu, lam0, params_res, S, rr, iters, ok, msg)


def _pointwise_balance_profile(grid, lam, params):
    """Initial iterate for the fixed-frequency solve.

    Where the pointwise amplitude balance mu*x^((p-2)/2) - nu*x^((q-2)/2) =
    r^2 + lam admits a (largest) root x = u^2, take its square root; the
    result is smoothed and given a small Gaussian tail.  If the balance has
    no root anywhere, fall back to a Gaussian with amplitude solving the
    quadratic-form balance along the Gaussian family.
    """
    r = grid.nodes
    p, q, mu, nu = params.p, params.q, params.mu, params.nu
    target = r**2 + lam

    def phi(x):
        return mu * x ** ((p - 2.0) / 2.0) - nu * x ** ((q - 2.0) / 2.0)

    profile = np.zeros(grid.n)
    have_tf = False
    if mu > 0 and nu > 0:
        x_peak = (mu * (p - 2.0) / (nu * (q - 2.0))) ** (2.0 / (q - p))
        peak = phi(x_peak)
        mask = target < peak
        if np.any(mask):
            have_tf = True
            lo = np.full(mask.sum(), x_peak)
            hi = np.full(mask.sum(), x_peak)
            t = target[mask]
            for _ in range(200):
                hi *= 2.0
                if np.all(phi(hi) < t):
                    break
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                above = phi(mid) >= t
                lo[above] = mid[above]
                hi[~above] = mid[~above]
            profile[mask] = np.sqrt(0.5 * (lo + hi))
    if not have_tf:
        # Gaussian family c*exp(-r^2/2): <(H+lam)u,u> = <nonlinearity, u>
        def balance(c):
            return (
                c**2 * np.pi * (GROUND_EIGENVALUE + lam)
                - mu * c**p * 2.0 * np.pi / p
                + nu * c**q * 2.0 * np.pi / q
            )

        cs = np.geomspace(1e-3, 1e3, 400)
        vals = balance(cs)
        c_init = 1.0
        roots = [
            brentq(balance, cs[i], cs[i + 1])
            for i in range(len(cs) - 1)
            if vals[i] * vals[i + 1] < 0
        ]
        if roots:
            c_init = max(roots)
        return gaussian_profile(grid, amplitude=c_init).values
    profile = gaussian_filter1d(profile, sigma=max(4, grid.n // 128), mode="nearest")
    return profile + 1e-3 * np.exp(-(r**2) / 2.0)


def solve_fixed_frequency(params, lam, cfg=None, grid=None, initial=None):
    """Solve the stationary equation at a fixed frequency lam > -2.

    Independent oracle for the variational solvers: damped Newton on the
    banded discrete equation, globalized by a preconditioned residual-norm
    line search, starting from the pointwise-balance profile.  Below
    lam = -2 the linear operator H + lam loses positivity on radial fields
    and the solve is rejected.
    """
    if lam <= -GROUND_EIGENVALUE:
        raise ConfigurationError(
            f"fixed-frequency solve requires lam > {-GROUND_EIGENVALUE}, got {lam}"
        )
    if params.mu == 0.0 and params.nu == 0.0:
        raise ConfigurationError("no nonlinearity to balance (mu = nu = 0)")
    cfg = cfg or SolverConfig()
    grid = grid or default_radial_grid()
    u = np.asarray(
        initial.values if initial is not None else _pointwise_balance_profile(grid, lam, params),
        dtype=float,
    ).copy()

    def merit(gv):
        return float(integrate_values(grid, _solve_shifted(grid, cfg.precond_shift, gv) * gv))

    p, q, mu, nu = params.p, params.q, params.mu, params.nu
    g = el_residual(RadialField(grid, u), lam, params).values
    rr = np.inf
    converged = False
    message = ""
    it = 0
    for it in range(cfg.max_iters):
        norm2 = integrate_values(grid, u * u)
        if norm2 <= 0 or not np.isfinite(norm2):
            message = "iterate collapsed"
            break
        rr = math.sqrt(max(integrate_values(grid, g * g), 0.0) / norm2)
        if rr <= cfg.grad_tol:
            converged = True
            break
        absu = np.abs(u)
        diag = (
            lam
            - mu * (p - 1.0) * absu ** (p - 2.0)
            + nu * (q - 1.0) * absu ** (q - 2.0)
        )
        du = _solve_shifted(grid, diag, g)
        m0 = merit(g)
        tau = 1.0
        stepped = False
        for _ in range(_LINE_SEARCH_MAX):
            trial = u - tau * du
            gt = el_residual(RadialField(grid, trial), lam, params).values
            if np.all(np.isfinite(gt)) and merit(gt) < m0:
                u, g = trial, gt
                stepped = True
                break
            tau *= 0.5
        if not stepped:
            message = "residual line search stalled"
            break
    profile = RadialField(grid, u)
    fv = evaluate_functionals(profile, params)
    S_sol = action(fv, lam, params)
    report = SolveReport(
        profile=profile,
        value=lam,
        fv=fv,
        residual_rel=rr,
        pohozaev_rel=pohozaev_rel(fv, lam, params),
        dilation_defect=_dilation_defect(fv, S_sol),
        iterations=it,
        converged=bool(converged),
        message=message,
        extra={"action": S_sol},
    )
    return report


_APPENDIX_VARIANTS = ("defocusing", "focusing", "combined")


def solve_constrained_appendix(p, lam, variant, cfg=None, q=None, grid=None):
    """Constrained minimization over the shell (1/p)||u||_p^p = 1.

    * defocusing (lam > -2): minimizes the quadratic form; the positive
      multiplier rescales the minimizer to solve Hu + lam*u = |u|^(p-2)u.
    * focusing (lam < -2): the infimum is negative and the negative
      multiplier rescales to solve Hu + lam*u = -|u|^(p-2)u.
    * combined (lam > -2, q > p): adds the (1/q)-power term; the minimizer
      itself solves the full stationary equation with the recovered mu > 0.

    The report `value` is the Lagrange multiplier; extra carries the
    constrained minimum `delta`.
    """
    if variant not in _APPENDIX_VARIANTS:
        raise ConfigurationError(f"unknown variant {variant!r}; use one of {_APPENDIX_VARIANTS}")
    if variant == "focusing":
        if lam >= -GROUND_EIGENVALUE:
            raise ConfigurationError("focusing variant requires lam < -2")
    else:
        if lam <= -GROUND_EIGENVALUE:
            raise ConfigurationError(f"{variant} variant requires lam > -2")
    if variant == "combined":
        if q is None or q <= p:
            raise ConfigurationError("combined variant needs a defocusing exponent q > p")
    if p <= 2:
        raise ConfigurationError("constraint exponent must exceed 2")
    cfg = cfg or SolverConfig()
    grid = grid or default_radial_grid()
    w = grid.weights
    r = grid.nodes
    with_q = variant == "combined"

    def project(u):
        a = integrate_values(grid, np.abs(u) ** p)
        if a <= 0:
            raise ConfigurationError("constraint projection failed on a zero iterate")
        return u / (a / p) ** (1.0 / p)

    def func(u):
        ufield = RadialField(grid, u)
        T, L = _kinetic_moment(ufield)
        val = 0.5 * (T + L) + 0.5 * lam * integrate_values(grid, u * u)
        if with_q:
            val += integrate_values(grid, np.abs(u) ** q) / q
        return val

    def grad(u):
        g = apply_trap_operator(grid, u) + lam * u
        if with_q:
            g = g + np.abs(u) ** (q - 2.0) * u
        return g

    def cgrad(u):
        return np.abs(u) ** (p - 2.0) * u

    c0 = (p * p / (2.0 * np.pi)) ** (1.0 / p)
    u = project(c0 * np.exp(-(r**2) / 2.0))
    fval = func(u)
    tau = cfg.step
    iterations = 0
    for it in range(cfg.max_iters):
        iterations = it
        gf, gc = grad(u), cgrad(u)
        nu_hat = integrate_values(grid, gf * u) / integrate_values(grid, gc * u)
        res = gf - nu_hat * gc
        rr = math.sqrt(max(integrate_values(grid, res * res), 0.0)) / math.sqrt(
            max(integrate_values(grid, u * u), 1e-300)
        )
        if rr <= cfg.grad_tol:
            break
        pg = _solve_shifted(grid, cfg.precond_shift, gf)
        pc = _solve_shifted(grid, cfg.precond_shift, gc)
        mult = integrate_values(grid, gc * pg) / integrate_values(grid, gc * pc)
        d = pg - mult * pc
        tau = min(tau / cfg.backtrack, 2.0)
        accepted = False
        for _ in range(_LINE_SEARCH_MAX):
            try:
                trial = project(u - tau * d)
            except ConfigurationError:
                tau *= cfg.backtrack
                continue
            ft = func(trial)
            if np.isfinite(ft) and ft < fval:
                u, fval = trial, ft
                accepted = True
                break
            tau *= cfg.backtrack
        if not accepted:
            break

    # bordered Newton polish on (grad F - nu grad C, constraint)
    nu_hat = integrate_values(grid, grad(u) * u) / p
    message = ""
    for nit in range(_NEWTON_MAX):
        gf, gc = grad(u), cgrad(u)
        res = gf - nu_hat * gc
        cdef = integrate_values(grid, np.abs(u) ** p) / p - 1.0
        rr = math.sqrt(max(integrate_values(grid, res * res), 0.0)) / math.sqrt(
            max(integrate_values(grid, u * u), 1e-300)
        )
        if rr <= cfg.grad_tol and abs(cdef) <= 1e-12:
            break
        absu = np.abs(u)
        diag = lam - nu_hat * (p - 1.0) * absu ** (p - 2.0)
        if with_q:
            diag = diag + (q - 1.0) * absu ** (q - 2.0)
        try:
            inv_res = _solve_shifted(grid, diag, res)
            inv_gc = _solve_shifted(grid, diag, gc)
        except np.linalg.LinAlgError:
            message = "bordered newton solve failed"
            break
        wgc = w * gc
        denom = wgc @ inv_gc
        if denom == 0 or not np.isfinite(denom):
            message = "bordered newton degenerate"
            break
        dnu = (cdef - wgc @ inv_res) / denom
        du = inv_res + dnu * inv_gc
        if not np.all(np.isfinite(du)):
            message = "bordered newton diverged"
            break
        u = u - du
        nu_hat = nu_hat - dnu
    iterations += nit + 1
    converged = rr <= cfg.grad_tol
    delta = func(u)

    mu_L = nu_hat
    if variant == "combined":
        out_field = RadialField(grid, u)
        eval_params = Parameters(p=p, q=q, mu=max(mu_L, 0.0), nu=1.0)
        focus_coeff, defocus_coeff = mu_L, 1.0 / q
        g_final = el_residual(out_field, lam, eval_params).values
    else:
        scale = abs(mu_L) ** (1.0 / (p - 2.0))
        out = scale * u
        out_field = RadialField(grid, out)
        # target equation: Hu + lam u = sgn |u|^(p-2) u
        sgn = 1.0 if variant == "defocusing" else -1.0
        eval_params = Parameters(p=p, q=p + 2.0, mu=1.0, nu=0.0)
        focus_coeff, defocus_coeff = sgn, 0.0
        g_final = (
            apply_trap_operator(grid, out)
            + lam * out
            - sgn * np.abs(out) ** (p - 2.0) * out
        )
    fv = evaluate_functionals(out_field, eval_params)
    norm_out = math.sqrt(max(integrate_values(grid, out_field.values**2), 1e-300))
    rr_final = math.sqrt(max(integrate_values(grid, g_final * g_final), 0.0)) / norm_out
    bq = fv.B if with_q else 0.0
    S_sol = 0.5 * fv.T + 0.5 * fv.L + lam * fv.Q - (focus_coeff / p) * fv.A + defocus_coeff * bq
    poh = fv.L + lam * fv.Q - (focus_coeff / p) * fv.A + defocus_coeff * bq
    poh_scale = fv.L + abs(lam) * fv.Q + (abs(focus_coeff) / p) * fv.A + defocus_coeff * bq
    return SolveReport(
        profile=out_field,
        value=mu_L,
        fv=fv,
        residual_rel=rr_final,
        pohozaev_rel=abs(poh) / poh_scale if poh_scale > 0 else 0.0,
        dilation_defect=_dilation_defect(fv, S_sol),
        iterations=iterations,
        converged=bool(converged),
        message=message,
        extra={"delta": delta, "variant": variant, "multiplier": mu_L},
    )


def verify_solution(u, lam, params, S):
    """Diagnostic bundle for a claimed fundamental-frequency solution.

    Checks the stationary residual, the Pohozaev and dilation identities,
    the action level, monotonicity of the profile, and the strict kinetic
    inequality T > 2S.  Never raises; degenerate inputs yield inf defects.
    """
    try:
        fv = evaluate_functionals(u, params)
        if fv.Q <= 0:
            raise ZeroDivisionError
        rr = l2_norm(el_residual(u, lam, params)) / math.sqrt(2.0 * fv.Q)
        poh = pohozaev_rel(fv, lam, params)
        dil = _dilation_defect(fv, S)
        act = abs(action(fv, lam, params) - S) / max(1.0, abs(S))
    except Exception:
        return VerificationRecord(
            residual_rel=np.inf,
            pohozaev_rel=np.inf,
            dilation_defect=np.inf,
            action_rel=np.inf,
            monotone_defect=np.inf,
            monotone_ok=False,
            kinetic_margin=-np.inf,
            kinetic_ok=False,
        )
    diffs = np.diff(u.values)
    mono_defect = float(max(0.0, diffs.max())) if len(diffs) else 0.0
    margin = fv.T - 2.0 * S
    return VerificationRecord(
        residual_rel=rr,
        pohozaev_rel=poh,
        dilation_defect=dil,
        action_rel=act,
        monotone_defect=mono_defect,
        monotone_ok=bool(mono_defect <= 1e-10),
        kinetic_margin=margin,
        kinetic_ok=bool(margin > 0.0),
    )
