"""Command-line front end.

Subcommands:

* solve     - one stationary solve (modes: ffs, muhat, fixed-lambda, appendix)
* atlas     - extremal-coefficient curve, its inverse, and a branch sweep
* stability - perturbation experiments around a saved or freshly solved profile
* verify    - re-check a saved run directory against the solution diagnostics

Runs are configured by an INI-style file of `key = value` lines grouped in
sections; unknown sections or keys are rejected.  Every run writes its CSV
artifacts (17 significant digits, byte-reproducible for a fixed config and
seed), a report.json with all scalars and the config echo, and a
manifest.json listing each output file with its SHA-256 hash.  The output
directory may be overridden with the NLSTRAP_OUTPUT_DIR environment
variable; nothing else is read from the environment.
"""

import argparse
import configparser
import hashlib
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .atlas import check_sandwich, extremal_curve, lambda_star, mu_hat_zero, s_of_mu, sweep_branch
from .errors import BlowUpError, BranchError, ConfigurationError
from .functionals import Parameters, action, energy
from .propagator import PropagatorConfig, make_cartesian_grid, stability_experiment
from .quadrature import RadialField, make_radial_grid
from .solver import (
    SolverConfig,
    solve_constrained_appendix,
    solve_ffs,
    solve_fixed_frequency,
    solve_mu_hat,
    verify_solution,
)

_FLOAT_FMT = "%.17g"

_SCHEMA = {
    "problem": {"p", "q", "mu", "nu"},
    "grid": {"radial_n", "radial_rmax", "cartesian_m", "half_width"},
    "solver": {"max_iters", "grad_tol", "step", "backtrack", "precond_shift"},
    "solve": {"mode", "action_level", "allow_positive_action", "frequency", "variant"},
    "atlas": {"mu", "mu_over_muhat0", "sweep_points", "extremal_samples"},
    "propagation": {"dt", "t_final", "monitor_stride"},
    "stability": {"deltas", "seed", "action_level"},
    "output": {"directory"},
}


def _fmt(x):
    return _FLOAT_FMT % float(x)


def _load_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"config file not found: {path}")
    cfg = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"unknown config section [{section}]")
        allowed = _SCHEMA[section]
        body = {}
        for key, value in parser.items(section):
            if key not in allowed:
                raise ConfigurationError(f"unknown key {key!r} in section [{section}]")
            body[key] = value
        cfg[section] = body
    return cfg


def _get(cfg, section, key, cast, default=None, required=False):
    body = cfg.get(section, {})
    if key not in body:
        if required:
            raise ConfigurationError(f"missing required key {key!r} in section [{section}]")
        return default
    raw = body[key]
    if cast is bool:
        lowered = raw.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"cannot parse boolean {raw!r} for [{section}] {key}")
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse [{section}] {key} = {raw!r}") from exc


def _parameters(cfg):
    return Parameters(
        p=_get(cfg, "problem", "p", float, required=True),
        q=_get(cfg, "problem", "q", float, required=True),
        mu=_get(cfg, "problem", "mu", float, default=1.0),
        nu=_get(cfg, "problem", "nu", float, default=1.0),
    )


def _radial_grid(cfg):
    return make_radial_grid(
        _get(cfg, "grid", "radial_n", int, default=1024),
        _get(cfg, "grid", "radial_rmax", float, default=12.0),
    )


def _solver_config(cfg):
    return SolverConfig(
        max_iters=_get(cfg, "solver", "max_iters", int, default=5000),
        grad_tol=_get(cfg, "solver", "grad_tol", float, default=1e-8),
        step=_get(cfg, "solver", "step", float, default=0.5),
        backtrack=_get(cfg, "solver", "backtrack", float, default=0.5),
        precond_shift=_get(cfg, "solver", "precond_shift", float, default=1.0),
    )


def _out_dir(cfg, config_path):
    env = os.environ.get("NLSTRAP_OUTPUT_DIR")
    raw = env or cfg.get("output", {}).get("directory")
    if raw is None:
        raw = Path(config_path).with_suffix("") .name + "_out"
    out = Path(raw)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path, payload):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _finalize(out, report_payload, files):
    _write_json(out / "report.json", report_payload)
    files = list(files) + ["report.json"]
    manifest = {
        "version": __version__,
        "files": {name: _sha256(out / name) for name in sorted(files)},
    }
    _write_json(out / "manifest.json", manifest)


def _report_scalars(rep):
    return {
        "value": rep.value,
        "residual_rel": float(rep.residual_rel),
        "pohozaev_rel": float(rep.pohozaev_rel),
        "dilation_defect": float(rep.dilation_defect),
        "iterations": int(rep.iterations),
        "converged": bool(rep.converged),
        "message": rep.message,
        "functionals": {
            "T": rep.fv.T,
            "L": rep.fv.L,
            "Q": rep.fv.Q,
            "A": rep.fv.A,
            "B": rep.fv.B,
        },
    }


def _echo(cfg):
    return {section: dict(body) for section, body in cfg.items()}


def cmd_solve(args):
    cfg = _load_config(args.config)
    params = _parameters(cfg)
    grid = _radial_grid(cfg)
    scfg = _solver_config(cfg)
    mode = _get(cfg, "solve", "mode", str, required=True)
    out = _out_dir(cfg, args.config)
    t0 = time.time()
    if mode == "ffs":
        S = _get(cfg, "solve", "action_level", float, required=True)
        allow = _get(cfg, "solve", "allow_positive_action", bool, default=False)
        rep = solve_ffs(params, S, cfg=scfg, grid=grid, allow_positive_action=allow)
        lam, S_used = rep.value, S
    elif mode == "muhat":
        S = _get(cfg, "solve", "action_level", float, required=True)
        rep = solve_mu_hat(params, S, cfg=scfg, grid=grid)
        lam, S_used = 0.0, S
    elif mode == "fixed-lambda":
        lam = _get(cfg, "solve", "frequency", float, required=True)
        rep = solve_fixed_frequency(params, lam, cfg=scfg, grid=grid)
        S_used = rep.extra.get("action")
    elif mode == "appendix":
        variant = _get(cfg, "solve", "variant", str, required=True)
        lam = _get(cfg, "solve", "frequency", float, required=True)
        qq = params.q if variant == "combined" else None
        rep = solve_constrained_appendix(params.p, lam, variant, cfg=scfg, q=qq, grid=grid)
        S_used = None
    else:
        raise ConfigurationError(f"unknown solve mode {mode!r}")
    wall = time.time() - t0

    _write_csv(
        out / "profile.csv",
        ["r", "u"],
        zip(rep.profile.grid.nodes, rep.profile.values),
    )
    payload = {
        "command": "solve",
        "mode": mode,
        "config": _echo(cfg),
        "version": __version__,
        "wall_time_s": wall,
        "report": _report_scalars(rep),
        "frequency": lam,
        "action_level": S_used,
        "extra": {k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
                  for k, v in rep.extra.items()},
    }
    _finalize(out, payload, ["profile.csv"])
    status = "converged" if rep.converged else "NOT converged"
    print(
        f"solve[{mode}] {status}: value={rep.value:.12g} residual_rel={rep.residual_rel:.3e} "
        f"iterations={rep.iterations} -> {out}"
    )
    if not rep.converged:
        print(f"diagnostic: {rep.message or 'no message'}", file=sys.stderr)
        return 2
    return 0


def cmd_atlas(args):
    cfg = _load_config(args.config)
    params = _parameters(cfg)
    grid = _radial_grid(cfg)
    scfg = _solver_config(cfg)
    mu = _get(cfg, "atlas", "mu", float, default=None)
    mu_factor = _get(cfg, "atlas", "mu_over_muhat0", float, default=None)
    if (mu is None) == (mu_factor is None):
        raise ConfigurationError(
            "[atlas] needs exactly one of `mu` or `mu_over_muhat0`"
        )
    n_sweep = _get(cfg, "atlas", "sweep_points", int, default=8)
    n_ext = _get(cfg, "atlas", "extremal_samples", int, default=5)
    out = _out_dir(cfg, args.config)
    t0 = time.time()

    muhat0 = mu_hat_zero(params, cfg=scfg, grid=grid)
    if mu is None:
        mu = mu_factor * muhat0
    if mu <= muhat0:
        print(
            f"mu={mu} does not exceed the extremal coefficient mu_hat(0)={muhat0:.8f}; "
            "no positive-frequency branch exists at nonpositive action",
            file=sys.stderr,
        )
        return 1
    s_star = s_of_mu(mu, params, cfg=scfg, grid=grid, mu_hat_at_zero=muhat0)
    lam_star = lambda_star(mu, params, cfg=scfg, grid=grid)
    ext = extremal_curve(params, np.linspace(-2.0, 0.0, n_ext), cfg=scfg, grid=grid)

    s_grid = np.linspace(s_star + 0.05 * max(1.0, abs(s_star)), 0.0, n_sweep)
    branch = sweep_branch(mu, s_grid, params, cfg=scfg, grid=grid, s_floor=s_star)
    branch.lambda_star = lam_star
    sandwich = check_sandwich(branch)
    wall = time.time() - t0

    run_params = replace(params, mu=mu)
    _write_csv(
        out / "branch.csv",
        ["S", "lambda_hat", "Q", "H", "action_check", "residual_rel"],
        [
            (p.S, p.lambda_hat, p.Q, p.H, p.action_check, p.report.residual_rel)
            for p in branch.points
        ],
    )
    _write_csv(out / "extremal.csv", ["S", "mu_hat_S"], ext)
    _write_csv(
        out / "nerav.csv",
        ["S1", "S2", "low_defect", "high_defect"],
        sandwich.pairs,
    )
    payload = {
        "command": "atlas",
        "config": _echo(cfg),
        "version": __version__,
        "wall_time_s": wall,
        "mu": mu,
        "mu_hat_zero": muhat0,
        "s_of_mu": s_star,
        "lambda_star": lam_star,
        "sandwich_max_violation": sandwich.max_violation,
        "sandwich_ok": sandwich.ok,
        "branch": [
            {"S": p.S, "lambda_hat": p.lambda_hat, "Q": p.Q, "H": p.H}
            for p in branch.points
        ],
    }
    _finalize(out, payload, ["branch.csv", "extremal.csv", "nerav.csv"])
    print(
        f"atlas: mu_hat(0)={muhat0:.8f} S(mu)={s_star:.6f} lambda_star={lam_star:.8f} "
        f"sandwich_ok={sandwich.ok} -> {out}"
    )
    return 0


def _load_profile(run_dir):
    run_dir = Path(run_dir)
    report = json.loads((run_dir / "report.json").read_text())
    rows = (run_dir / "profile.csv").read_text().strip().splitlines()[1:]
    values = np.array([[float(x) for x in line.split(",")] for line in rows])
    grid_cfg = report["config"].get("grid", {})
    grid = make_radial_grid(
        int(grid_cfg.get("radial_n", len(values))),
        float(grid_cfg.get("radial_rmax", 12.0)),
    )
    if grid.n != len(values) or not np.allclose(grid.nodes, values[:, 0], rtol=0, atol=1e-12):
        raise ConfigurationError("profile.csv does not match the grid declared in report.json")
    return RadialField(grid, values[:, 1]), report


def cmd_stability(args):
    cfg = _load_config(args.config)
    out = _out_dir(cfg, args.config)
    pcfg = PropagatorConfig(
        dt=_get(cfg, "propagation", "dt", float, default=1e-3),
        t_final=_get(cfg, "propagation", "t_final", float, default=10.0),
        monitor_stride=_get(cfg, "propagation", "monitor_stride", int, default=20),
    )
    deltas_raw = _get(cfg, "stability", "deltas", str, default="1e-3")
    deltas = [float(tok) for tok in deltas_raw.replace(",", " ").split()]
    seed = _get(cfg, "stability", "seed", int, default=1234)

    if args.profile is not None:
        profile, saved = _load_profile(args.profile)
        params = Parameters(**{
            k: float(saved["config"]["problem"][k])
            for k in saved["config"]["problem"]
        })
        lam = float(saved["frequency"])
    else:
        params = _parameters(cfg)
        grid = _radial_grid(cfg)
        scfg = _solver_config(cfg)
        S = _get(cfg, "stability", "action_level", float, required=True)
        rep = solve_ffs(params, S, cfg=scfg, grid=grid)
        if not rep.converged:
            print(f"inline solve failed: {rep.message}", file=sys.stderr)
            return 2
        profile, lam = rep.profile, rep.value
    grid2d = make_cartesian_grid(
        _get(cfg, "grid", "cartesian_m", int, default=256),
        _get(cfg, "grid", "half_width", float, default=10.0),
    )

    t0 = time.time()
    files = []
    summary = []
    for i, delta in enumerate(deltas):
        trace = stability_experiment(profile, lam, delta, pcfg, params, grid2d=grid2d, seed=seed)
        name = "trace.csv" if len(deltas) == 1 else f"trace_{i:03d}.csv"
        _write_csv(
            out / name,
            ["t", "mass", "energy", "lambda_conserved", "sigma_norm_sq", "orbital_dist"],
            zip(
                trace.times,
                trace.mass,
                trace.energy,
                trace.lambda_conserved,
                trace.sigma_norm_sq,
                trace.orbital_dist,
            ),
        )
        files.append(name)
        summary.append(
            {
                "delta": delta,
                "file": name,
                "sup_orbital_dist": float(trace.orbital_dist.max()),
                "mass_drift_rel": float(np.abs(trace.mass - trace.mass[0]).max() / trace.mass[0]),
                "energy_drift_rel": float(
                    np.abs(trace.energy - trace.energy[0]).max() / max(abs(trace.energy[0]), 1e-300)
                ),
                "lambda_drift_rel": float(
                    np.abs(trace.lambda_conserved - trace.lambda_conserved[0]).max()
                    / max(abs(trace.lambda_conserved[0]), 1.0)
                ),
            }
        )
    payload = {
        "command": "stability",
        "config": _echo(cfg),
        "version": __version__,
        "wall_time_s": time.time() - t0,
        "frequency": lam,
        "seed": seed,
        "runs": summary,
    }
    _finalize(out, payload, files)
    for run in summary:
        print(
            f"stability delta={run['delta']:g}: sup_orbital_dist={run['sup_orbital_dist']:.4e} "
            f"mass_drift={run['mass_drift_rel']:.2e}"
        )
    print(f"-> {out}")
    return 0


def cmd_verify(args):
    run_dir = Path(args.run_dir)
    manifest = json.loads((run_dir / "manifest.json").read_text())
    failures = []
    for name, digest in manifest["files"].items():
        path = run_dir / name
        if not path.exists():
            failures.append(f"missing file {name}")
            continue
        actual = _sha256(path)
        status = "ok" if actual == digest else "HASH MISMATCH"
        print(f"{name}: {status}")
        if actual != digest:
            failures.append(f"hash mismatch for {name}")

    report = json.loads((run_dir / "report.json").read_text())
    if report.get("command") == "solve" and (run_dir / "profile.csv").exists():
        profile, saved = _load_profile(run_dir)
        params = Parameters(**{
            k: float(saved["config"]["problem"][k]) for k in saved["config"]["problem"]
        })
        if saved["mode"] == "muhat":
            params = replace(params, mu=float(saved["report"]["value"]))
        lam = float(saved["frequency"])
        S = saved.get("action_level")
        S = float(S) if S is not None else 0.0
        rec = verify_solution(profile, lam, params, S)
        print(
            f"recomputed: residual_rel={rec.residual_rel:.3e} pohozaev_rel={rec.pohozaev_rel:.3e} "
            f"dilation_defect={rec.dilation_defect:.3e} action_rel={rec.action_rel:.3e} "
            f"monotone={rec.monotone_ok} kinetic_ok={rec.kinetic_ok}"
        )
        stored = saved["report"]["residual_rel"]
        if abs(rec.residual_rel - stored) > 1e-10 + 1e-6 * abs(stored):
            failures.append("recomputed residual deviates from the stored report")
    if failures:
        for f in failures:
            print(f"verify: {f}", file=sys.stderr)
        return 1
    print("verify: all checks passed")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nlstrap",
        description="Standing waves and stability for the 2D trapped NLS "
        "with combined power nonlinearities",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one stationary solve")
    p_solve.add_argument("config", help="INI config file")
    p_solve.set_defaults(func=cmd_solve)

    p_atlas = sub.add_parser("atlas", help="map the extremal curve and a branch sweep")
    p_atlas.add_argument("config", help="INI config file")
    p_atlas.set_defaults(func=cmd_atlas)

    p_stab = sub.add_parser("stability", help="perturbation experiments around a profile")
    p_stab.add_argument("config", help="INI config file")
    p_stab.add_argument(
        "--profile",
        default=None,
        help="existing solve output directory to load the profile from",
    )
    p_stab.set_defaults(func=cmd_stability)

    p_verify = sub.add_parser("verify", help="re-check a saved run directory")
    p_verify.add_argument("run_dir", help="directory containing manifest.json")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, BranchError, BlowUpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
