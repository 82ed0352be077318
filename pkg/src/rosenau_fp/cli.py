"""Command-line driver for the named experiments.

Subcommands: evolve, stationary, decay, stability, stencil, metric.  Flags
override values from an optional JSON config file; the fully resolved
configuration is echoed into every report, so a report plus its metadata is
enough to rerun the experiment bit-identically (the timestamp line aside).
"""

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .equilibrium import maxwellian_comparison, stationary_law
from .evolution import WildConfig, evolve, trajectory_table
from .lattice import (
    LatticeError,
    ParameterError,
    delta_density,
    density_to_dict,
    gaussian_cells_density,
    random_density,
    three_point_density,
)
from .report import ReportTable
from .spectral import (
    continuous_xi_grid,
    decay_report,
    fourier_distance,
    gaussian_evaluator,
    lattice_evaluator,
    lattice_xi_grid,
    stability_report,
    stationary_evaluator,
)
from .stencils import derivative_stencil, moment_condition_check


@dataclass
class ExperimentConfig:
    """Fully resolved configuration of one experiment run."""

    command: str
    N: int | None = None
    N_list: list | None = None
    t_list: list | None = None
    initial: str | None = None
    u0: float = 0.0
    theta0: float = 1.0
    s: float = 2.0
    kind: str = "ds"
    reference: str = "stationary"
    order: int | None = None
    check: bool = False
    lambda_max: float = 32.0
    tail_tol: float = 1e-12
    output: str | None = None
    fmt: str = "csv"
    seed: int = 0

    def wild_config(self):
        return WildConfig(lambda_max=self.lambda_max, tail_tol=self.tail_tol)

    def as_metadata(self):
        cfg = dataclasses.asdict(self)
        return {"config": cfg, "version": __version__}


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}: {exc}") from exc


def _int_list(text):
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).split(",") if x != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}: {exc}") from exc


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rosenau-fp",
        description="Structure-preserving lattice Fokker-Planck experiments",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None,
                       help="JSON file with default values; flags override")
        p.add_argument("-o", "--output", default=None, help="report path")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized initial data")
        p.add_argument("--lambda-max", dest="lambda_max", type=float, default=32.0)
        p.add_argument("--tail-tol", dest="tail_tol", type=float, default=1e-12)

    p = sub.add_parser("evolve", help="trajectory of moments and entropy")
    common(p)
    p.add_argument("--N", type=_positive_int)
    p.add_argument("--t", dest="t_list", type=_float_list)
    p.add_argument("--initial", default=None,
                   help="initial data (default three-point:k=N,theta0=1)")

    p = sub.add_parser("stationary", help="exact discrete equilibrium")
    common(p)
    p.add_argument("--N", type=_positive_int)

    p = sub.add_parser("decay", help="exponential convergence to equilibrium")
    common(p)
    p.add_argument("--N", type=_positive_int)
    p.add_argument("--t", dest="t_list", type=_float_list, default=[0.5, 1.0, 2.0, 4.0])
    p.add_argument("--initial", default=None,
                   help="zero-mean initial data (default three-point:k=N,theta0=1)")

    p = sub.add_parser("stability", help="d3 distance to the continuous solution across N")
    common(p)
    p.add_argument("--u0", type=float, default=0.0)
    p.add_argument("--theta0", type=float, default=1.0)
    p.add_argument("--N-list", dest="N_list", type=_int_list, default=[4, 8])
    p.add_argument("--t", dest="t_list", type=_float_list, default=[0.5, 1.0, 2.0])

    p = sub.add_parser("stencil", help="even-order central-difference stencil")
    common(p)
    p.add_argument("--order", type=_positive_int, help="even derivative order 2n")
    p.add_argument("--check", action="store_true", help="append the moment-condition table")

    p = sub.add_parser("metric", help="Fourier distances d_s and the Gaussian-limit trend")
    common(p)
    p.add_argument("--kind", choices=("ds", "clt"), default="ds")
    p.add_argument("--N", type=_positive_int, default=None)
    p.add_argument("--N-list", dest="N_list", type=_int_list, default=[2, 4, 8])
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--t", dest="t_list", type=_float_list, default=[0.0])
    p.add_argument("--initial", default=None)
    p.add_argument("--reference", choices=("stationary", "maxwellian"), default="stationary")

    return parser


def _apply_config_file(parser, args, argv):
    """Reparse with file values as defaults so explicit flags keep precedence."""
    path = args.config
    try:
        with open(path, "r", encoding="utf-8") as fh:
            values = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config file {path}: {exc}")
    if not isinstance(values, dict):
        parser.error(f"config file {path} must hold a JSON object")
    sub_actions = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    )
    subparser = sub_actions.choices[args.command]
    known = {a.dest for a in subparser._actions}
    defaults = {}
    for key, value in values.items():
        if key not in known or key in ("config", "command", "help"):
            parser.error(f"unknown config key {key!r} for subcommand {args.command!r}")
        if key == "t_list":
            value = _float_list(value)
        elif key == "N_list":
            value = _int_list(value)
        defaults[key] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def parse_config(argv, parser=None):
    """Parse argv (and an optional JSON config file) into an ExperimentConfig."""
    parser = parser or build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is not None:
        args = _apply_config_file(parser, args, argv)
    fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    data = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    try:
        cfg = ExperimentConfig(**data)
    except (TypeError, LatticeError) as exc:
        parser.error(str(exc))
    required = {
        "evolve": ("N", "t_list"),
        "stationary": ("N",),
        "decay": ("N",),
        "stencil": ("order",),
    }
    for name in required.get(cfg.command, ()):
        if getattr(cfg, name) is None:
            flag = {"t_list": "--t", "order": "--order"}.get(name, f"--{name}")
            parser.error(f"{cfg.command} requires {flag}")
    if cfg.command == "stencil" and (cfg.order % 2 or cfg.order < 2):
        parser.error(f"--order must be a positive even integer, got {cfg.order}")
    if cfg.command == "metric" and cfg.kind == "ds" and cfg.N is None:
        parser.error("metric --kind ds needs --N")
    try:
        cfg.wild_config()
    except LatticeError as exc:
        parser.error(str(exc))
    return cfg


def build_initial(descriptor, N, seed=0):
    """Initial-density mini-language: kind[:key=value,...].

    Kinds: three-point (k, theta0), gaussian-cells (u0, theta0), delta (j),
    random (seeded by the run's seed).
    """
    kind, _, param_text = descriptor.partition(":")
    params = {}
    if param_text:
        for item in param_text.split(","):
            key, _, value = item.partition("=")
            if not key or not value:
                raise ParameterError(f"bad initial parameter {item!r} in {descriptor!r}")
            params[key] = value
    if kind == "three-point":
        return three_point_density(N, int(params.get("k", N)), float(params.get("theta0", 1.0)))
    if kind == "gaussian-cells":
        return gaussian_cells_density(
            N, float(params.get("u0", 0.0)), float(params.get("theta0", 1.0))
        )
    if kind == "delta":
        return delta_density(N, int(params.get("j", 0)))
    if kind == "random":
        return random_density(N, np.random.default_rng(seed))
    raise ParameterError(f"unknown initial kind {kind!r}")


def _default_output(cfg):
    return f"rosenau_{cfg.command}.{cfg.fmt}"


def _run_evolve(cfg):
    descriptor = cfg.initial or f"three-point:k={cfg.N},theta0=1"
    g = build_initial(descriptor, cfg.N, cfg.seed)
    table = trajectory_table(g, cfg.t_list, cfg.wild_config())
    return table, 0, []


def _run_stationary(cfg):
    law = stationary_law(cfg.N)
    v = law.j_values / cfg.N
    gauss = np.exp(-0.5 * v * v) / math.sqrt(2 * math.pi)
    rows = [
        [int(j), float(vj), float(c), float(g)]
        for j, vj, c, g in zip(law.j_values, v, law.coeffs, gauss)
    ]
    table = ReportTable(columns=["j", "v", "coeff", "gaussian_density"], rows=rows)
    out = Path(cfg.output or _default_output(cfg))
    density_path = out.with_suffix(".density.json")
    with open(density_path, "w", encoding="utf-8") as fh:
        json.dump(density_to_dict(law), fh)
        fh.write("\n")
    return table, 0, [str(density_path)]


def _run_decay(cfg):
    descriptor = cfg.initial or f"three-point:k={cfg.N},theta0=1"
    phi = build_initial(descriptor, cfg.N, cfg.seed)
    table = decay_report(phi, cfg.t_list, cfg.N)
    table = table.with_column("pass", table.metadata["row_pass"])
    code = 0 if table.metadata["all_pass"] else 1
    return table, code, []


def _run_stability(cfg):
    table = stability_report(cfg.u0, cfg.theta0, cfg.N_list, cfg.t_list, cfg.wild_config())
    return table, 0, []


def _run_stencil(cfg):
    n = cfg.order // 2
    st = derivative_stencil(n)
    rows = [[k, c] for k, c in zip(range(-n, n + 1), st.coeffs)]
    table = ReportTable(columns=["k", "coeff"], rows=rows, metadata={"scale": st.scale})
    extra = moment_condition_check(n) if cfg.check else None
    return table, 0, extra


def _run_metric(cfg):
    if cfg.kind == "clt":
        return maxwellian_comparison(cfg.N_list), 0, []
    descriptor = cfg.initial or "delta:j=0"
    g0 = build_initial(descriptor, cfg.N, cfg.seed)
    if cfg.reference == "stationary":
        ref = stationary_evaluator(cfg.N)
        grid = lattice_xi_grid(cfg.N)
    else:
        ref = gaussian_evaluator(0.0, 1.0)
        grid = continuous_xi_grid()
    rows = []
    state, reached = g0, 0.0
    for t in sorted(set(float(t) for t in cfg.t_list)):
        state = evolve(state, t - reached, cfg.wild_config())
        reached = t
        res = fourier_distance(
            lattice_evaluator(state, max(2, math.ceil(cfg.s) - 1)), ref, cfg.s, grid
        )
        rows.append([t, cfg.s, res.value, res.argmax_xi, res.moment_warning])
    return (
        ReportTable(columns=["t", "s", "d_value", "argmax_xi", "moment_warning"], rows=rows),
        0,
        [],
    )


_RUNNERS = {
    "evolve": _run_evolve,
    "stationary": _run_stationary,
    "decay": _run_decay,
    "stability": _run_stability,
    "stencil": _run_stencil,
    "metric": _run_metric,
}


def run_experiment(cfg):
    """Run the configured experiment, write the report, return the exit code."""
    table, code, extra = _RUNNERS[cfg.command](cfg)
    table.metadata.update(cfg.as_metadata())
    out = Path(cfg.output or _default_output(cfg))
    if cfg.command == "stencil" and isinstance(extra, ReportTable):
        # stencil --check appends the moment table as a second section
        extra.metadata.update(cfg.as_metadata())
        if cfg.fmt == "csv":
            text = table.to_csv_text() + "\n" + extra.to_csv_text()
        else:
            text = table.to_json_text() + extra.to_json_text()
        try:
            out.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write report to {out}: {exc}") from exc
        return code
    try:
        table.write(out, cfg.fmt)
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if "ROSENAU_FP_THREADS" in os.environ:
        try:
            int(os.environ["ROSENAU_FP_THREADS"])
        except ValueError:
            print("ROSENAU_FP_THREADS must be an integer", file=sys.stderr)
            return 2
    try:
        code = run_experiment(cfg)
    except LatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = cfg.output or _default_output(cfg)
    print(f"wrote {out} (exit {code})")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
