"""Command-line frontend tying the synthesis and simulation pipeline together.

Subcommands
-----------
spectrum   open- and closed-loop eigenvalue table
gains      spectral Riccati matrix, linear gain, cubic cost tensor, quadratic gain
lqr        finite-difference model poles and LQR solution
albrekht   polynomial feedback synthesis on the grid (writes a law file)
simulate   closed-loop Crank-Nicolson run from a constant level or profile file
basin      verdict sweep over initial levels, or bisection of the critical level

Configuration comes from defaults, then an optional flat ``key=value`` file
(``--config``), then command-line flags; unknown config keys are rejected.
Exit codes: 0 success, 2 input error, 3 non-convergence, 4 sweep anomaly.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .albrekht import FeedbackLaw, albrekht_expand
from .closed_loop import closed_loop_modes
from .cubic import quadratic_gain, solve_cubic_tensor
from .exceptions import NonMonotoneVerdict, RodLqrError, ConfigError
from .finite_model import build_discrete, closed_loop_matrix, solve_discrete_lqr
from .reporting import (
    load_law,
    load_profile,
    save_law,
    write_json,
    write_matrix,
    write_table,
    write_tensor,
)
from .riccati import default_weights, linear_gain, riccati_iterate, LqrWeights
from .simulate import SimConfig, basin_sweep, simulate
from .spectral import build_basis
from . import figures


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    """Fully resolved run parameters (echoed into every summary)."""

    beta: float = 1.0
    alpha: float = 1.0
    modes: int = 11
    grid: int = 10
    r: float = 1.0
    max_iter: int = 200
    tol: float = 1e-12
    paper_mode: bool = False
    count: int = 5
    degree: int = 3
    dt: float = 0.01
    t_final: float = 20.0
    fp_iters: int = 5
    fp_tol: float = 1e-12
    diverge_threshold: float = 1e3
    converge_threshold: float = 1e-3
    preset: str = "open"
    out: str = "out"
    format: str = "csv"
    figures: bool = True

    def validate(self) -> None:
        checks = [
            (self.beta > 0, "beta must be > 0"),
            (self.modes >= 1, "modes must be >= 1"),
            (self.grid >= 2, "grid must be >= 2"),
            (self.r > 0, "r must be > 0"),
            (self.max_iter >= 1, "max_iter must be >= 1"),
            (self.tol >= 0, "tol must be >= 0"),
            (self.count >= 1, "count must be >= 1"),
            (self.degree in (2, 3), "degree must be 2 or 3"),
            (self.dt > 0, "dt must be > 0"),
            (self.t_final > 0, "t_final must be > 0"),
            (self.fp_iters >= 1, "fp_iters must be >= 1"),
            (self.fp_tol > 0, "fp_tol must be > 0"),
            (self.diverge_threshold > 0, "diverge_threshold must be > 0"),
            (self.converge_threshold > 0, "converge_threshold must be > 0"),
            (self.preset in ("open", "linear", "cubic"), "preset must be open, linear or cubic"),
            (self.format in ("csv", "json"), "format must be csv or json"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    def sim_config(self) -> SimConfig:
        return SimConfig(
            dt=self.dt,
            dx_grid=self.grid,
            t_final=self.t_final,
            fp_iters=self.fp_iters,
            fp_tol=self.fp_tol,
            diverge_threshold=self.diverge_threshold,
            converge_threshold=self.converge_threshold,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_PARSERS = {"float": float, "int": int, "bool": _parse_bool, "str": str}


def parse_config_file(path: Path) -> dict:
    """Flat key=value file; '#' starts a comment; unknown keys are rejected."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _PARSERS[_FIELD_TYPES[key]](val.strip())
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        for key, val in parse_config_file(args.config).items():
            setattr(cfg, key, val)
    for f in fields(RunConfig):
        cli_val = getattr(args, f.name, None)
        if cli_val is not None:
            setattr(cfg, f.name, cli_val)
    if getattr(args, "no_figures", False):
        cfg.figures = False
    cfg.validate()
    return cfg


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _summary(cfg: RunConfig, command: str, results: dict, t0: float) -> dict:
    return {
        "command": command,
        "version": __version__,
        "wall_time_s": time.perf_counter() - t0,
        "config": asdict(cfg),
        "results": results,
    }


def _spectral_pipeline(cfg: RunConfig):
    basis = build_basis(cfg.beta, cfg.modes)
    w = LqrWeights(q=np.eye(cfg.modes), r=cfg.r)
    if cfg.paper_mode:
        sol = riccati_iterate(basis, w, max_iter=50, tol=0.0)
    else:
        sol = riccati_iterate(basis, w, max_iter=cfg.max_iter, tol=cfg.tol)
    return basis, w, sol


def cmd_spectrum(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    out = _outdir(cfg)
    basis, w, sol = _spectral_pipeline(cfg)
    count = min(cfg.count, basis.size)
    modes = closed_loop_modes(sol, basis, w, count)
    rows = []
    for n in range(basis.size):
        md = basis.modes[n]
        if n < count:
            rows.append([n, md.nu, md.lam, modes[n].rho, modes[n].mu])
        else:
            rows.append([n, md.nu, md.lam, "", ""])
    header = ["n", "nu", "lambda", "rho", "mu"]
    table = write_table(out / "spectrum", header, rows, cfg.format)
    if cfg.figures:
        figures.render_spectrum(
            basis.nus, basis.lams, [m.rho for m in modes], [m.mu for m in modes],
            out / "spectrum",
        )
    write_json(
        out / "spectrum_summary",
        _summary(cfg, "spectrum", {
            "table": table.name,
            "nu": basis.nus.tolist(),
            "lambda": basis.lams.tolist(),
            "rho": [m.rho for m in modes],
            "mu": [m.mu for m in modes],
            "riccati_iterations": sol.iterations,
            "riccati_residual": sol.residual,
            "riccati_converged": sol.converged,
        }, t0),
    )
    return 0 if sol.converged else 3


def cmd_gains(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    out = _outdir(cfg)
    basis, w, sol = _spectral_pipeline(cfg)
    k1 = linear_gain(sol, basis, w)
    ct = solve_cubic_tensor(sol, basis, w, cfg.alpha)
    k2 = quadratic_gain(ct, basis, w)
    write_matrix(out / "riccati_p", sol.p, cfg.format)
    write_table(
        out / "riccati_trace", ["sweep", "probe_cost"],
        list(enumerate(sol.cost_trace)), cfg.format,
    )
    write_table(out / "gain_k1", ["n", "k"], list(zip(range(basis.size), k1)), cfg.format)
    write_tensor(out / "cost_tensor", ct.t, cfg.format)
    write_matrix(out / "gain_k2", k2.k2, cfg.format)
    if cfg.figures:
        figures.render_matrix(sol.p, out / "riccati_p", "quadratic cost coefficients")
        xs = np.linspace(0.0, 1.0, 201)
        figures.render_gain_curve(
            xs, k1 @ basis.eval_modes(xs), out / "gain_k1", "linear feedback kernel"
        )
        figures.render_matrix(k2.k2, out / "gain_k2", "quadratic gain coefficients")
    write_json(
        out / "gains_summary",
        _summary(cfg, "gains", {
            "p00": float(sol.p[0, 0]),
            "iterations": sol.iterations,
            "residual": sol.residual,
            "converged": sol.converged,
            "cost_trace_len": len(sol.cost_trace),
            "tensor_max_abs": float(np.abs(ct.t).max()),
            "k2_max_abs": float(np.abs(k2.k2).max()),
        }, t0),
    )
    return 0 if sol.converged else 3


def cmd_lqr(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    out = _outdir(cfg)
    m = build_discrete(cfg.grid, cfg.beta, cfg.alpha, r=cfg.r)
    lqr = solve_discrete_lqr(m)
    open_poles = np.sort(np.linalg.eigvals(m.f).real)[::-1]
    closed_poles = np.sort(np.linalg.eigvals(closed_loop_matrix(m, lqr)).real)[::-1]
    write_table(
        out / "poles", ["k", "open_loop", "closed_loop"],
        [[k, open_poles[k], closed_poles[k]] for k in range(len(open_poles))],
        cfg.format,
    )
    write_matrix(out / "lqr_v2", lqr.v2, cfg.format)
    write_table(out / "lqr_k1", ["k", "gain"], list(zip(range(m.n_states), lqr.k1)), cfg.format)
    if cfg.figures:
        figures.render_matrix(lqr.v2, out / "lqr_v2", "LQR cost matrix")
    write_json(
        out / "lqr_summary",
        _summary(cfg, "lqr", {
            "open_poles_top3": open_poles[:3].tolist(),
            "closed_poles_top3": closed_poles[:3].tolist(),
        }, t0),
    )
    return 0


def cmd_albrekht(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    out = _outdir(cfg)
    m = build_discrete(cfg.grid, cfg.beta, cfg.alpha, r=cfg.r)
    lqr = solve_discrete_lqr(m)
    exp, law = albrekht_expand(m, lqr, degree=cfg.degree)
    law_path = save_law(out / "law", law)
    write_tensor(out / "cost_v3", exp.v3, cfg.format)
    if exp.v4 is not None:
        write_tensor(out / "cost_v4", exp.v4, cfg.format)
    write_table(out / "fd_k1", ["k", "gain"], list(zip(range(m.n_states), law.k1)), cfg.format)
    write_matrix(out / "fd_k2", law.k2, cfg.format)
    if law.k3 is not None:
        write_tensor(out / "fd_k3", law.k3, cfg.format)
    if cfg.figures:
        figures.render_matrix(law.k2, out / "fd_k2", "quadratic gain (grid)")
    write_json(
        out / "albrekht_summary",
        _summary(cfg, "albrekht", {
            "law_file": law_path.name,
            "degree": law.degree,
            "v3_max_abs": float(np.abs(exp.v3).max()),
            "v4_max_abs": float(np.abs(exp.v4).max()) if exp.v4 is not None else None,
        }, t0),
    )
    return 0


def _resolve_law(cfg: RunConfig, args) -> FeedbackLaw:
    if getattr(args, "law", None):
        law = load_law(args.law)
        return law
    m = build_discrete(cfg.grid, cfg.beta, cfg.alpha, r=cfg.r)
    if cfg.preset == "open":
        return FeedbackLaw.open_loop(m.n_states)
    lqr = solve_discrete_lqr(m)
    if cfg.preset == "linear":
        return FeedbackLaw(degree=1, k1=lqr.k1)
    _, law = albrekht_expand(m, lqr, degree=3)
    return law


def cmd_simulate(cfg: RunConfig, args) -> int:
    t0 = time.perf_counter()
    out = _outdir(cfg)
    m = build_discrete(cfg.grid, cfg.beta, cfg.alpha, r=cfg.r)
    law = _resolve_law(cfg, args)
    if law.n_states != m.n_states:
        raise ConfigError(
            f"law has {law.n_states} states but the grid model needs {m.n_states}"
        )
    if getattr(args, "z0_file", None):
        z0 = load_profile(args.z0_file, m.n_states)
    elif getattr(args, "z0", None) is not None:
        z0 = np.full(m.n_states, float(args.z0))
    else:
        raise ConfigError("simulate needs --z0 LEVEL or --z0-file PATH")
    traj = simulate(m, law, z0, cfg.sim_config())
    header = ["t"] + [f"zeta_{k}" for k in range(m.n_states)] + ["u", "linf"]
    rows = [
        [traj.times[i]] + traj.states[i].tolist() + [traj.controls[i], traj.linf[i]]
        for i in range(len(traj.times))
    ]
    write_table(out / "trajectory", header, rows, cfg.format)
    write_table(
        out / "linf_curve", ["t", "linf"],
        list(zip(traj.times.tolist(), traj.linf.tolist())), cfg.format,
    )
    if cfg.figures:
        figures.render_trajectory(
            traj, out / "trajectory", f"{cfg.preset} feedback, verdict {traj.verdict}"
        )
    write_json(
        out / "simulate_summary",
        _summary(cfg, "simulate", dict(traj.summary(), law_degree=law.degree), t0),
    )
    return 0


def cmd_basin(cfg: RunConfig, args) -> int:
    t0 = time.perf_counter()
    out = _outdir(cfg)
    m = build_discrete(cfg.grid, cfg.beta, cfg.alpha, r=cfg.r)
    law = _resolve_law(cfg, args)
    levels = None
    bracket = None
    if getattr(args, "levels", None):
        try:
            levels = [float(x) for x in args.levels.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad --levels: {exc}") from exc
    if getattr(args, "bracket", None):
        bracket = args.bracket
    if (levels is None) == (bracket is None):
        raise ConfigError("basin needs exactly one of --levels or --bracket LO HI")
    try:
        sweep = basin_sweep(
            m, law, cfg.sim_config(),
            levels=levels, bracket=bracket,
            width=getattr(args, "width", None),
        )
    except NonMonotoneVerdict as exc:
        write_table(out / "basin", ["level", "verdict"], exc.results, cfg.format)
        write_json(
            out / "basin_summary",
            _summary(cfg, "basin", {
                "verdict": "Undetermined",
                "anomaly": str(exc),
                "results": [[s, v] for s, v in exc.results],
            }, t0),
        )
        print(f"basin sweep anomaly: {exc}", file=sys.stderr)
        return 4
    write_table(out / "basin", ["level", "verdict"], sweep.results, cfg.format)
    if cfg.figures:
        figures.render_basin(
            sweep.results, out / "basin", critical=sweep.critical,
            title=f"{cfg.preset} feedback basin",
        )
    write_json(
        out / "basin_summary",
        _summary(cfg, "basin", {
            "results": [[s, v] for s, v in sweep.results],
            "critical_bracket": list(sweep.critical) if sweep.critical else None,
        }, t0),
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key=value config file")
    common.add_argument("--beta", type=float, help="Robin/actuation coefficient")
    common.add_argument("--alpha", type=float, help="quadratic reaction coefficient")
    common.add_argument("--modes", type=int, help="spectral truncation order")
    common.add_argument("--grid", type=int, help="grid intervals n (states n+1)")
    common.add_argument("--r", type=float, help="control weight")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), help="table format")
    common.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    spectral = argparse.ArgumentParser(add_help=False)
    spectral.add_argument("--max-iter", dest="max_iter", type=int)
    spectral.add_argument("--tol", type=float)
    spectral.add_argument(
        "--paper-mode", dest="paper_mode", action="store_const", const=True,
        help="run exactly 50 fixed-point sweeps",
    )
    spectral.add_argument("--count", type=int, help="closed-loop modes to solve")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--dt", type=float)
    sim.add_argument("--t-final", dest="t_final", type=float)
    sim.add_argument("--fp-iters", dest="fp_iters", type=int)
    sim.add_argument("--fp-tol", dest="fp_tol", type=float)
    sim.add_argument("--preset", choices=("open", "linear", "cubic"))
    sim.add_argument("--law", type=Path, help="feedback-law JSON file")

    p = argparse.ArgumentParser(prog="rodlqr", description=__doc__)
    p.add_argument("--version", action="version", version=f"rodlqr {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("spectrum", parents=[common, spectral],
                   help="open/closed-loop eigenvalue table")
    sub.add_parser("gains", parents=[common, spectral],
                   help="Riccati matrix and polynomial gains in the eigenbasis")
    sub.add_parser("lqr", parents=[common], help="grid model poles and LQR")
    alb = sub.add_parser("albrekht", parents=[common],
                         help="grid power-series feedback synthesis")
    alb.add_argument("--degree", type=int, help="feedback degree (2 or 3)")
    simp = sub.add_parser("simulate", parents=[common, sim],
                          help="Crank-Nicolson closed-loop run")
    simp.add_argument("--z0", type=float, help="constant initial level")
    simp.add_argument("--z0-file", dest="z0_file", type=Path, help="initial profile file")
    bas = sub.add_parser("basin", parents=[common, sim], help="basin-of-stability sweep")
    bas.add_argument("--levels", help="comma-separated initial levels")
    bas.add_argument("--bracket", nargs=2, type=float, metavar=("LO", "HI"))
    bas.add_argument("--width", type=float, help="target bracket width")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "gains":
            return cmd_gains(cfg)
        if args.command == "lqr":
            return cmd_lqr(cfg)
        if args.command == "albrekht":
            return cmd_albrekht(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg, args)
        if args.command == "basin":
            return cmd_basin(cfg, args)
        raise ConfigError(f"unknown command {args.command}")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonMonotoneVerdict as exc:
        print(f"sweep anomaly: {exc}", file=sys.stderr)
        return 4
    except RodLqrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
