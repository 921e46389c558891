"""Command-line front end: graph utilities and config-driven experiments.

Subcommands::

    generate    write a small-world graph as an edge-list file
    simulate    time-series CSVs for every (beta, p) cell of a config
    sweep       ODE severity table over a beta x p grid
    thresholds  closed-form thresholds for one parameter set
    converge    Monte-Carlo convergence diagnostics E and F

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 numeric or
model failure.  Every command is deterministic given its inputs, and output
files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from pathlib import Path

from . import analysis, convergence, meanfield, netsim
from .config import ConfigError, SweepConfig, parse_config
from .graph import clustering_coefficient, load_edge_list, save_edge_list, watts_strogatz
from .rk45 import IntegrationError

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_config(args) -> SweepConfig:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    cfg = parse_config(text)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "model", None) is not None:
        overrides["model"] = args.model
    if getattr(args, "out", None) is not None:
        overrides["output_dir"] = args.out
    if overrides:
        cfg = SweepConfig(**{**cfg.__dict__, **overrides})
    return cfg


def _params(cfg: SweepConfig, beta: float, p: float) -> netsim.ModelParams:
    return netsim.ModelParams(beta=beta, gamma=cfg.gamma, p=p, r=cfg.r, dt=cfg.dt)


def _network_infected_count(cfg: SweepConfig) -> int:
    if abs(cfg.i0 - round(cfg.i0)) > 1e-9:
        raise ConfigError("network model needs an integer i0")
    return int(round(cfg.i0))


def _cells(cfg: SweepConfig):
    index = 0
    for beta in cfg.beta_grid:
        for p in cfg.p_grid:
            yield index, beta, p
            index += 1


def cmd_generate(args) -> int:
    net = watts_strogatz(args.n, args.k, args.alpha, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_edge_list(net, out)
    print(f"edges={net.edge_count}")
    print(f"clustering={clustering_coefficient(net)}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    out_dir = Path(cfg.output_dir)
    models = ("network", "ode") if cfg.model == "both" else (cfg.model,)
    max_steps = int(round(cfg.t_max / cfg.dt))
    nbar = cfg.k * cfg.n / 2.0

    net = None
    if "network" in models:
        net = watts_strogatz(cfg.n, cfg.k, cfg.alpha, cfg.seed)
        infected = _network_infected_count(cfg)

    for index, beta, p in _cells(cfg):
        params = _params(cfg, beta, p)
        if "network" in models:
            series = netsim.monte_carlo_mean(
                net, params, infected, cfg.m, (cfg.seed, index), max_steps
            )
            path = out_dir / f"network_beta{beta:g}_p{p:g}.csv"
            _write_atomic(path, series.to_csv_text())
            print(f"wrote {path}")
        if "ode" in models:
            initial = meanfield.random_mixing_initial(cfg.n, cfg.i0, cfg.k, nbar)
            traj = meanfield.integrate(
                initial, params, cfg.k,
                meanfield.IntegratorConfig(t_max=cfg.t_max),
            )
            path = out_dir / f"ode_beta{beta:g}_p{p:g}.csv"
            _write_atomic(path, traj.resample(cfg.dt).to_csv_text())
            print(f"wrote {path}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    if cfg.model != "ode":
        raise ConfigError("sweep runs the ODE model; set model = ode")
    nbar = cfg.k * cfg.n / 2.0
    rows = ["beta,p,final_recovered,log10_final_recovered,region,p1_star,p2_star,r0"]
    for _, beta, p in _cells(cfg):
        params = _params(cfg, beta, p)
        initial = meanfield.analytic_initial(cfg.n, cfg.i0, cfg.k, nbar)
        traj = meanfield.integrate(
            initial, params, cfg.k, meanfield.IntegratorConfig(t_max=cfg.t_max)
        )
        fr = meanfield.final_recovered(traj)
        log_fr = math.log10(fr) if fr > 0 else float("-inf")
        report = analysis.threshold_report(beta, cfg.gamma, cfg.k, p=p)
        rows.append(
            f"{beta},{p},{fr},{log_fr},{report.region.value},"
            f"{report.p1_star},{report.p2_star},{report.r0}"
        )
    path = Path(cfg.output_dir) / "severity.csv"
    _write_atomic(path, "\n".join(rows) + "\n")
    print(f"wrote {path}")
    return 0


def cmd_thresholds(args) -> int:
    report = analysis.threshold_report(args.beta, args.gamma, args.k, p=args.p)
    print(report.to_record())
    return 0


def cmd_converge(args) -> int:
    cfg = _load_config(args)
    max_steps = int(round(cfg.t_max / cfg.dt))
    infected = _network_infected_count(cfg)
    fraction = infected / cfg.n
    n2 = cfg.n2 if cfg.n2 is not None else 2 * cfg.n
    net = watts_strogatz(cfg.n, cfg.k, cfg.alpha, cfg.seed)
    net2 = watts_strogatz(n2, cfg.k, cfg.alpha, cfg.seed + 1)
    log_path = Path(cfg.output_dir) / "convergence.csv"
    log_path.parent.mkdir(parents=True, exist_ok=True)
    for index, beta, p in _cells(cfg):
        params = _params(cfg, beta, p)
        report_e = convergence.mc_self_error(
            net, params, infected, cfg.m,
            (cfg.seed, index, 0), (cfg.seed, index, 1), max_steps,
        )
        convergence.append_error_log(report_e, log_path)
        print(report_e.csv_row())
        report_f = convergence.cross_size_error(
            net, net2, params, fraction, cfg.m,
            (cfg.seed, index, 2), (cfg.seed, index, 3), max_steps,
        )
        convergence.append_error_log(report_f, log_path)
        print(report_f.csv_row())
    print(f"appended to {log_path}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="epilink", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a small-world graph edge list")
    gen.add_argument("--n", type=int, required=True, help="node count")
    gen.add_argument("--k", type=int, required=True, help="even ring degree")
    gen.add_argument("--alpha", type=float, required=True, help="rewiring fraction")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, help="output edge-list file")
    gen.set_defaults(func=cmd_generate)

    for name, func, help_text in (
        ("simulate", cmd_simulate, "time-series CSVs over the config grid"),
        ("sweep", cmd_sweep, "ODE severity table over the config grid"),
        ("converge", cmd_converge, "Monte-Carlo convergence diagnostics"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="config file path")
        cmd.add_argument("--out", help="output directory (overrides config)")
        cmd.add_argument("--seed", type=int, help="override the config seed")
        if name == "simulate":
            cmd.add_argument("--model", choices=["network", "ode", "both"],
                             help="override the config model")
        cmd.set_defaults(func=func)

    thr = sub.add_parser("thresholds", help="closed-form epidemic thresholds")
    thr.add_argument("--beta", type=float, required=True)
    thr.add_argument("--gamma", type=float, required=True)
    thr.add_argument("--k", type=float, required=True)
    thr.add_argument("--p", type=float, default=None,
                     help="optionally classify this deactivation rate")
    thr.set_defaults(func=cmd_thresholds)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, IntegrationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
