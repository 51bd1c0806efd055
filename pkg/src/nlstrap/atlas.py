"""Parameter-space cartography for the fundamental-frequency problem.

Maps out, for fixed exponents (p, q):

* the extremal coefficient at zero action and the curve S -> extremal
  coefficient (strictly decreasing, diverging as S -> -infinity),
* its inverse S(mu), found by bracketing and bisection,
* the endpoint frequency lambda_star = frequency at S = 0,
* frequency branches S -> (lambda_hat, Q, H) with warm-started sweeps,
* the two-sided slope bounds linking adjacent branch points.
"""

from dataclasses import dataclass, field, replace

from .errors import BranchError, ConfigurationError
from .functionals import action, energy
from .solver import SolverConfig, default_radial_grid, solve_ffs, solve_mu_hat

#: relative bracket width for the inverse of the extremal curve
_S_OF_MU_TOL = 3e-5
#: most negative action level probed while bracketing S(mu)
_S_BRACKET_FLOOR = -1e7


@dataclass
class BranchPoint:
    S: float
    lambda_hat: float
    Q: float
    H: float
    action_check: float
    report: object


@dataclass
class Branch:
    mu: float
    points: list
    s_of_mu: float | None = None
    lambda_star: float | None = None


@dataclass
class SandwichReport:
    """Defects of the two-sided slope bounds over adjacent branch pairs.

    For each consecutive pair S1 < S2 the frequency increment must lie in
    [dS/Q(S1), dS/Q(S2)]; `pairs` holds (S1, S2, low_defect, high_defect)
    and defects are clipped at zero when the bound holds.
    """

    pairs: list = field(default_factory=list)
    max_violation: float = 0.0
    tol_factor: float = 1e-4

    @property
    def ok(self):
        return all(
            lo <= self.tol_factor * (s2 - s1) and hi <= self.tol_factor * (s2 - s1)
            for s1, s2, lo, hi in self.pairs
        )


def mu_hat_zero(params, cfg=None, grid=None, initial=None):
    """Extremal coefficient at action level zero (strictly positive)."""
    report = solve_mu_hat(params, 0.0, cfg=cfg, grid=grid, initial=initial)
    if not report.converged:
        raise BranchError(f"extremal-coefficient solve at S=0 failed: {report.message}")
    if report.value <= 0:
        raise BranchError(f"extremal coefficient came out nonpositive: {report.value}")
    return report.value


def extremal_curve(params, s_values, cfg=None, grid=None):
    """Sample S -> extremal coefficient with warm starts; returns a list of
    (S, mu_hat_S) in the order given."""
    out = []
    warm = None
    for s in s_values:
        rep = solve_mu_hat(params, s, cfg=cfg, grid=grid, initial=warm)
        if not rep.converged:
            raise BranchError(f"extremal-coefficient solve at S={s} failed: {rep.message}")
        warm = rep.profile
        out.append((float(s), rep.value))
    return out


def s_of_mu(mu, params, cfg=None, grid=None, mu_hat_at_zero=None):
    """Inverse of the extremal curve: the action level S < 0 at which the
    extremal coefficient equals mu.  Requires mu above the zero-action
    extremal coefficient; the bracket is grown by doubling (the curve
    diverges as S -> -infinity, so this terminates) and then bisected to
    relative width _S_OF_MU_TOL."""
    grid = grid or default_radial_grid()
    muhat0 = mu_hat_at_zero
    if muhat0 is None:
        muhat0 = mu_hat_zero(params, cfg=cfg, grid=grid)
    if mu <= muhat0:
        raise ConfigurationError(
            f"mu={mu} does not exceed the zero-action extremal coefficient {muhat0:.6f}; "
            "the inverse curve is defined only above it"
        )

    warm = None

    def mu_hat(s):
        nonlocal warm
        rep = solve_mu_hat(params, s, cfg=cfg, grid=grid, initial=warm)
        if not rep.converged:
            raise BranchError(f"extremal-coefficient solve at S={s} failed: {rep.message}")
        warm = rep.profile
        return rep.value

    s_lo = -1.0
    while mu_hat(s_lo) <= mu:
        s_lo *= 2.0
        if s_lo < _S_BRACKET_FLOOR:
            raise BranchError("bracket for the inverse extremal curve did not close")
    s_hi = s_lo / 2.0 if s_lo < -1.0 else 0.0
    while (s_hi - s_lo) > _S_OF_MU_TOL * max(1.0, abs(s_lo)):
        mid = 0.5 * (s_lo + s_hi)
        if mu_hat(mid) > mu:
            s_lo = mid
        else:
            s_hi = mid
    return 0.5 * (s_lo + s_hi)


def lambda_star(mu, params, cfg=None, grid=None, initial=None):
    """Endpoint frequency: the fundamental frequency at action level zero."""
    rep = solve_ffs(replace(params, mu=mu), 0.0, cfg=cfg, grid=grid, initial=initial)
    if not rep.converged:
        raise BranchError(f"fundamental-frequency solve at S=0 failed: {rep.message}")
    return rep.value


def sweep_branch(mu, s_grid, params, cfg=None, grid=None, s_floor=None, initial=None):
    """Warm-started branch sweep over increasing action levels.

    Each point solves the fundamental-frequency problem at its S, starting
    from the previous maximizer.  Non-convergence, a nonpositive frequency
    (which signals S at or below S(mu)), or an out-of-domain grid point
    poisons the sweep with a :class:`BranchError`.
    """
    s_grid = [float(s) for s in s_grid]
    if not s_grid:
        raise ConfigurationError("empty action-level grid")
    if any(s2 <= s1 for s1, s2 in zip(s_grid, s_grid[1:])):
        raise ConfigurationError("action-level grid must be strictly increasing")
    if s_grid[-1] > 0:
        raise ConfigurationError("branch sweeps cover nonpositive action levels only")
    if s_floor is not None and s_grid[0] <= s_floor:
        raise ConfigurationError(
            f"grid point {s_grid[0]} is not above the branch endpoint S(mu)={s_floor:.6f}"
        )
    run_params = replace(params, mu=mu)
    cfg = cfg or SolverConfig()
    grid = grid or default_radial_grid()
    points = []
    warm = initial
    for s in s_grid:
        rep = solve_ffs(run_params, s, cfg=cfg, grid=grid, initial=warm)
        if not rep.converged or rep.value <= 0:
            raise BranchError(
                f"branch point S={s} failed (converged={rep.converged}, "
                f"lambda={rep.value:.3e}): {rep.message or 'no diagnostic'}"
            )
        warm = rep.profile
        a_check = abs(action(rep.fv, rep.value, run_params) - s) / max(1.0, abs(s))
        points.append(
            BranchPoint(
                S=s,
                lambda_hat=rep.value,
                Q=rep.fv.Q,
                H=energy(rep.fv, run_params),
                action_check=a_check,
                report=rep,
            )
        )
    branch = Branch(mu=mu, points=points, s_of_mu=s_floor)
    if abs(s_grid[-1]) == 0.0:
        branch.lambda_star = points[-1].lambda_hat
    return branch


def check_sandwich(branch, tol_factor=1e-4):
    """Verify the two-sided slope bounds on adjacent branch points.

    For S1 < S2 with maximizer masses Q1 > Q2:
        (S2 - S1)/Q1  <=  lambda_hat(S2) - lambda_hat(S1)  <=  (S2 - S1)/Q2.
    Degenerate pairs (S1 == S2) are skipped.  Diagnostic only: returns the
    defect report, never raises.
    """
    rep = SandwichReport(tol_factor=tol_factor)
    pts = branch.points
    for a, b in zip(pts, pts[1:]):
        ds = b.S - a.S
        if ds == 0.0:
            continue
        dlam = b.lambda_hat - a.lambda_hat
        low_defect = max(0.0, ds / a.Q - dlam)
        high_defect = max(0.0, dlam - ds / b.Q)
        rep.pairs.append((a.S, b.S, low_defect, high_defect))
        rep.max_violation = max(rep.max_violation, low_defect, high_defect)
    return rep
