"""Command-line interface: tables for decoherence rates, phase diagrams,
separable fractions, Bloch-ball cuts, oscillations and the single-mode check.

Settings come from defaults, then an optional ``--config`` YAML/JSON file,
then command-line flags.  Exit codes: 0 success, 2 configuration error,
3 numerical failure, 4 inconsistent criteria.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import criteria, kernels, singlemode
from .config import ConfigError, RunConfig, load_config_file
from .criteria import InconsistentCriteriaError, RegionLabel, parallel_map
from .kernels import Kernel
from .model import ModelError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INCONSISTENT = 0, 2, 3, 4

COLUMNS = {
    "rate": ["t", "gamma", "Gamma", "abs_D"],
    "phase-diagram": ["T", "t", "label"],
    "fraction": ["T", "fraction", "fraction_mc", "mc_stderr"],
    "bloch-cut": ["T", "z", "rho_sep", "rho_ent"],
    "oscillations": ["t", "S", "E", "sep_bound", "ent_bound", "label"],
    "single-mode": ["T", "tau_crit_list", "tau_ent_list", "max_rel_dev"],
}

_FLOAT = ("kappa omega_c temperature T_min T_max t_min t_max r z phi x y omega_q rel_tol "
          "abs_tol g omega periods z_max").split()
_INT = "T_count t_count max_subdivisions n_trunc n_grid z_count mc_samples".split()


# --- commands ---------------------------------------------------------------

def cmd_rate(cfg: RunConfig) -> list[dict]:
    bath, quad = cfg.bath(), cfg.quadrature()
    rows = []
    for t in cfg.t_axis():
        Gamma = kernels.gamma_integral(bath, float(t), quad)
        rows.append({"t": t, "gamma": kernels.gamma(bath, float(t), quad),
                     "Gamma": Gamma, "abs_D": math.exp(-Gamma)})
    return rows


def cmd_phase_diagram(cfg: RunConfig) -> list[dict]:
    diagram = criteria.phase_diagram(cfg.bath(), cfg.state(), cfg.T_axis(), cfg.t_axis(),
                                     cfg.quadrature(), with_tau_dec=cfg.tau_dec,
                                     threads=cfg.threads)
    rows = []
    for i, T in enumerate(diagram.T_axis):
        for j, t in enumerate(diagram.t_axis):
            row = {"T": T, "t": t, "label": diagram.labels[i][j].value}
            if diagram.tau_dec is not None:
                row["tau_dec"] = diagram.tau_dec[i]
            rows.append(row)
    return rows


def cmd_fraction(cfg: RunConfig) -> list[dict]:
    quad = cfg.quadrature()

    def row(T):
        bath = cfg.bath(float(T))
        frac = criteria.separable_fraction(bath, quad)
        mc, err = criteria.monte_carlo_fraction(bath, cfg.mc_samples, cfg.seed, quad, p_ref=frac)
        return {"T": T, "fraction": frac, "fraction_mc": mc, "mc_stderr": err}

    return parallel_map(row, cfg.T_axis(), cfg.threads)


def cmd_bloch_cut(cfg: RunConfig) -> list[dict]:
    quad = cfg.quadrature()
    z_axis = np.linspace(-cfg.z_max, cfg.z_max, cfg.z_count)

    def curves(T):
        bath = cfg.bath(float(T))
        return (criteria.bloch_cut_separable(bath, z_axis, quad),
                criteria.bloch_cut_entangled(bath, z_axis, quad))

    rows = []
    for T, (sep, ent) in zip(cfg.T_axis(), parallel_map(curves, cfg.T_axis(), cfg.threads)):
        for z, rs, re in zip(z_axis, sep.rho, ent.rho):
            rows.append({"T": T, "z": z, "rho_sep": rs, "rho_ent": None if math.isnan(re) else re})
    return rows


def _exp_or_inf(log_value: float) -> float:
    return math.exp(log_value) if log_value < 709.0 else math.inf


def cmd_oscillations(cfg: RunConfig) -> tuple[list[dict], str]:
    bath, state, quad = cfg.bath(), cfg.state(), cfg.quadrature()
    t_axis = cfg.t_axis()
    count, labels = criteria.count_alternations(bath, state, t_axis, quad)
    b_sep, b_ent = criteria.sep_bound(state), criteria.ent_bound(state)
    rows = []
    for t, label in zip(t_axis, labels):
        rows.append({
            "t": t,
            "S": _exp_or_inf(kernels.log_kernel(Kernel.S, bath, float(t), quad)),
            "E": _exp_or_inf(kernels.log_kernel(Kernel.E, bath, float(t), quad)),
            "sep_bound": b_sep, "ent_bound": b_ent, "label": label.value,
        })
    n_unknown = sum(lab is RegionLabel.UNKNOWN for lab in labels)
    return rows, f"alternations={count} unknown_points={n_unknown}"


def cmd_single_mode(cfg: RunConfig) -> list[dict]:
    state = cfg.state()
    t_max = cfg.periods * 2.0 * math.pi / cfg.omega * (1.0 - 1e-9)

    def row(T):
        mode = singlemode.ModeSpec(cfg.omega, cfg.g, float(T), cfg.n_trunc)
        crit = singlemode.tau_crit(state, mode, cfg.omega_q, t_max, cfg.n_grid)
        ent = singlemode.tau_ent_single(state, mode, t_max)
        dev = None
        if crit and len(crit) == len(ent):
            dev = max(abs(a - b) / b if b else abs(a - b) for a, b in zip(crit, ent))
        return {"T": T, "tau_crit_list": crit, "tau_ent_list": ent, "max_rel_dev": dev}

    return parallel_map(row, cfg.T_axis(), cfg.threads)


COMMANDS = {
    "rate": cmd_rate,
    "phase-diagram": cmd_phase_diagram,
    "fraction": cmd_fraction,
    "bloch-cut": cmd_bloch_cut,
    "oscillations": cmd_oscillations,
    "single-mode": cmd_single_mode,
}


# --- serialisation ----------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return ";".join(_fmt(v) for v in value)
    return f"{float(value):.12g}"


def _json_value(value):
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    value = float(value)
    if not math.isfinite(value):
        return str(value)
    return float(f"{value:.12g}")


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if rows and "tau_dec" in rows[0] and "tau_dec" not in columns:
        columns = columns + ["tau_dec"]
    if fmt == "json":
        records = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


# --- argument handling ------------------------------------------------------

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="YAML or JSON file with RunConfig keys")
    p.add_argument("--out", default=S, help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--threads", type=int, default=S, help="worker threads, 0 = auto")
    for name in _FLOAT:
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=S)
    for name in _INT:
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int, default=S)
    p.add_argument("--T-spacing", dest="T_spacing", choices=["log", "linear"], default=S)
    p.add_argument("--t-spacing", dest="t_spacing", choices=["log", "linear"], default=S)
    p.add_argument("--temperatures", type=float, nargs="+", default=S)
    p.add_argument("--tau-dec", dest="tau_dec", action="store_true", default=S,
                   help="phase-diagram: add the decoherence time of each T")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dephasing", description=__doc__.splitlines()[0])
    _add_config_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_config_flags(sub.add_parser(name))
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if k != "command"}
    cfg = RunConfig()
    path = values.pop("config", None)
    if path is not None:
        cfg = cfg.updated(load_config_file(path))
    return cfg.updated(values).validate()


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        result = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InconsistentCriteriaError, criteria.GridPointError) as exc:
        cause = getattr(exc, "cause", exc)
        if isinstance(cause, InconsistentCriteriaError):
            print(f"inconsistent criteria: {exc}", file=sys.stderr)
            return EXIT_INCONSISTENT
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, singlemode.TruncationError, np.linalg.LinAlgError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ModelError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    summary = None
    if isinstance(result, tuple):
        result, summary = result
    text = render(result, COLUMNS[args.command], cfg.format)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if summary:
        print(summary, file=sys.stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
