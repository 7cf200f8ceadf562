"""Command-line entry point ``defquad``.

Subcommands::

    brackets      bracket numbers [0..n]
    polys         J_0..J_n on a grid
    density       |Psi_n|^2 on a grid
    wavefunction  Psi_n(x; theta) on a grid
    verify        invariant suites, JSON report
    figure        ground and first-excited density tables for the three families

Exit status is 0 on success, 2 for usage or parameter errors and 1 for
numerical failures, I/O errors or a failed verification.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .checks import DEFAULT_SPECS, SUITES, run_suites
from .deformation import DeformationSpec, Kind, bracket_sequence, validate
from .polynomials import eval_table
from .spectral import METHODS, ConvergenceError
from .wavefunction import DEFAULT_LEVELS, probability_density, resolved_eta, state_wavefunction

LEVELS_ENV = "DEFQUAD_LEVELS"
FLOAT_FORMAT = "%.12g"

FIGURES = {
    "1": [
        ("harmonic", DeformationSpec.harmonic()),
        ("q0.90", DeformationSpec.math_q(0.9)),
        ("q0.80", DeformationSpec.math_q(0.8)),
        ("q0.30", DeformationSpec.math_q(0.3)),
    ],
    "2": [
        ("harmonic", DeformationSpec.harmonic()),
        ("q1.1", DeformationSpec.physics_q(1.1)),
        ("q1.5", DeformationSpec.physics_q(1.5)),
        ("q1.9", DeformationSpec.physics_q(1.9)),
    ],
    "3": [
        ("harmonic", DeformationSpec.harmonic()),
        ("p1.3q0.5", DeformationSpec.pq(1.3, 0.5)),
        ("p1.5q0.5", DeformationSpec.pq(1.5, 0.5)),
        ("p1.9q0.5", DeformationSpec.pq(1.9, 0.5)),
    ],
}
PANELS = ("1a", "1b", "2a", "2b", "3a", "3b")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    spec: Optional[DeformationSpec]
    levels: int
    x_min: float = -4.0
    x_max: float = 4.0
    points: int = 801
    theta: float = 0.0
    n: int = 0
    method: str = "stieltjes"
    eta: Optional[float] = None
    fmt: str = "csv"
    output: str = "-"
    suite: str = "all"
    which: str = "all"
    outdir: str = "figures"

    def grid(self) -> np.ndarray:
        if self.points < 2:
            raise UsageError("--points must be at least 2")
        if not self.x_max > self.x_min:
            raise UsageError("--x-max must exceed --x-min")
        return np.linspace(self.x_min, self.x_max, self.points)


def _default_levels() -> int:
    raw = os.environ.get(LEVELS_ENV)
    if raw is None:
        return DEFAULT_LEVELS
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{LEVELS_ENV} must be an integer, got {raw!r}") from None
    if value < 8:
        raise UsageError(f"{LEVELS_ENV} must be at least 8")
    return value


# --- parser ---------------------------------------------------------------


def build_parser(levels: int = DEFAULT_LEVELS) -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="defquad",
        description="Quadrature wavefunctions and densities of deformed oscillators.",
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="COMMAND", required=True)

    deform = argparse.ArgumentParser(add_help=False)
    deform.add_argument("--kind", choices=[k.value for k in Kind], default="harmonic", help="deformation family")
    deform.add_argument("--q", type=float, default=None, help="q parameter (mathq, physicsq, pq); none for harmonic")
    deform.add_argument("--p", type=float, default=None, help="p parameter (pq only)")

    levels_opt = argparse.ArgumentParser(add_help=False)
    levels_opt.add_argument(
        "--levels", "-N", type=int, default=levels,
        help=f"truncation level N of the Jacobi operator (env {LEVELS_ENV} overrides)",
    )

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv", help="output format")
    output.add_argument("--output", "-o", default="-", help="output file, '-' for standard output")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--x-min", type=float, default=-4.0, help="left end of the grid")
    grid.add_argument("--x-max", type=float, default=4.0, help="right end of the grid")
    grid.add_argument("--points", type=int, default=801, help="number of grid points")

    density = argparse.ArgumentParser(add_help=False)
    density.add_argument("--method", choices=METHODS, default="stieltjes", help="ground-density estimator")
    density.add_argument(
        "--eta", type=float, default=None,
        help="broadening; none means 1e-14 for stieltjes and twice the central node gap for smoothed-gauss",
    )

    p = sub.add_parser("brackets", parents=[deform, output], formatter_class=fmt, help="bracket numbers [0..n]")
    p.add_argument("--n", type=int, default=10, help="largest index")

    p = sub.add_parser("polys", parents=[deform, grid, output], formatter_class=fmt, help="J_0..J_n on a grid")
    p.add_argument("--n", type=int, default=5, help="largest degree")

    p = sub.add_parser(
        "density", parents=[deform, levels_opt, grid, density, output], formatter_class=fmt,
        help="probability density |Psi_n|^2",
    )
    p.add_argument("--n", type=int, default=0, help="Fock level")

    p = sub.add_parser(
        "wavefunction", parents=[deform, levels_opt, grid, density, output], formatter_class=fmt,
        help="wavefunction Psi_n(x; theta)",
    )
    p.add_argument("--n", type=int, default=0, help="Fock level")
    p.add_argument("--theta", type=float, default=0.0, help="quadrature angle in radians")

    p = sub.add_parser("verify", formatter_class=fmt, help="run invariant suites and print a JSON report")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all", help="suite to run")
    p.add_argument(
        "--kind", choices=[k.value for k in Kind], default=None,
        help="restrict to one spec; none runs the built-in spec list",
    )
    p.add_argument("--q", type=float, default=None, help="q parameter of the restricted spec")
    p.add_argument("--p", type=float, default=None, help="p parameter of the restricted spec")
    p.add_argument("--output", "-o", default="-", help="report file, '-' for standard output")

    p = sub.add_parser(
        "figure", parents=[levels_opt, grid, density], formatter_class=fmt,
        help="n=0 (panel a) and n=1 (panel b) density tables for the three families",
    )
    p.add_argument("--which", choices=PANELS + ("all",), default="all", help="panel to write")
    p.add_argument("--outdir", default="figures", help="directory receiving fig<panel>.csv")
    return parser


def _make_spec(kind: Optional[str], q: Optional[float], p: Optional[float]) -> Optional[DeformationSpec]:
    if kind is None:
        if q is not None or p is not None:
            raise UsageError("--q/--p need --kind")
        return None
    spec = DeformationSpec(Kind(kind), q=q, p=p)
    return validate(spec)


def parse_config(argv: Sequence[str]) -> RunConfig:
    args = build_parser(_default_levels()).parse_args(list(argv))
    spec = _make_spec(args.kind, args.q, args.p) if hasattr(args, "kind") else None
    values = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    values["spec"] = spec
    values.setdefault("levels", DEFAULT_LEVELS)
    if values["levels"] < 8:
        raise UsageError("--levels must be at least 8")
    if values.get("n", 0) < 0:
        raise UsageError("--n must be nonnegative")
    if values.get("eta") is not None and not values["eta"] > 0:
        raise UsageError("--eta must be positive")
    return RunConfig(**values)


# --- writers ---------------------------------------------------------------


def _fmt(v) -> str:
    # adding 0.0 turns -0.0 into 0.0
    return FLOAT_FORMAT % (v + 0.0) if isinstance(v, (float, np.floating)) else str(v)


def render_csv(columns: Sequence[str], rows, metadata: dict) -> str:
    buf = io.StringIO()
    for key in sorted(metadata):
        buf.write(f"# {key}: {json.dumps(metadata[key], sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        return float(FLOAT_FORMAT % (v + 0.0))
    if isinstance(v, np.integer):
        return int(v)
    return v


def render_json(columns: Sequence[str], rows, metadata: dict) -> str:
    doc = {
        "columns": list(columns),
        "data": [[_json_value(v) for v in row] for row in rows],
        "metadata": metadata,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text: str, target: str) -> None:
    if target == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(target, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _table(cfg: RunConfig, columns, rows, metadata) -> int:
    render = render_csv if cfg.fmt == "csv" else render_json
    _emit(render(columns, rows, metadata), cfg.output)
    return 0


def _base_metadata(cfg: RunConfig) -> dict:
    return {"spec": cfg.spec.as_dict() if cfg.spec else None}


# --- subcommands -----------------------------------------------------------


def cmd_brackets(cfg: RunConfig) -> int:
    values = bracket_sequence(cfg.spec, cfg.n).values
    rows = [(k, float(v)) for k, v in enumerate(values)]
    return _table(cfg, ["n", "bracket"], rows, _base_metadata(cfg))


def cmd_polys(cfg: RunConfig) -> int:
    x = cfg.grid()
    table = eval_table(cfg.spec, x, cfg.n)
    if np.any(np.isnan(table)):
        raise OverflowError(f"J_n exceeds 1e300 on the grid for {cfg.spec.label}; shrink the grid or n")
    columns = ["x"] + [f"J{k}" for k in range(cfg.n + 1)]
    rows = [(float(xi),) + tuple(float(v) for v in r) for xi, r in zip(x, table)]
    return _table(cfg, columns, rows, _base_metadata(cfg))


def cmd_density(cfg: RunConfig) -> int:
    d = probability_density(cfg.spec, cfg.n, cfg.grid(), cfg.levels, cfg.method, cfg.eta)
    meta = _base_metadata(cfg)
    meta.update(
        N=cfg.levels, n=cfg.n, method=d.method, eta=d.eta,
        normalization=d.normalization, ground_normalization=d.meta["ground_integral"],
        reference_halfwidth=d.meta["reference_halfwidth"],
    )
    rows = [(float(a), float(b)) for a, b in zip(d.grid, d.density)]
    return _table(cfg, ["x", "density"], rows, meta)


def cmd_wavefunction(cfg: RunConfig) -> int:
    w = state_wavefunction(cfg.spec, cfg.n, cfg.theta, cfg.grid(), cfg.levels, cfg.method, cfg.eta)
    meta = _base_metadata(cfg)
    meta.update(
        N=cfg.levels, n=cfg.n, theta=cfg.theta, method=cfg.method,
        eta=resolved_eta(cfg.spec, cfg.levels, cfg.method, cfg.eta),
    )
    rows = [
        (float(x), float(v.real), float(v.imag), float(abs(v) ** 2))
        for x, v in zip(w.grid, w.values)
    ]
    return _table(cfg, ["x", "re", "im", "abs2"], rows, meta)


def cmd_verify(cfg: RunConfig) -> int:
    specs = DEFAULT_SPECS if cfg.spec is None else (cfg.spec,)
    report = run_suites([cfg.suite], specs)
    worst = {}
    for c in report["checks"]:
        worst[c["name"]] = max(worst.get(c["name"], 0.0), c["value"])
    report["max_values"] = worst
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", cfg.output)
    failed = [c for c in report["checks"] if not c["passed"]]
    for c in failed:
        print(f"defquad: FAIL {c['suite']}/{c['name']} [{c['spec']}] {c['value']:.3g} > {c['tolerance']:.3g}",
              file=sys.stderr)
    return 1 if failed else 0


def figure_table(panel: str, cfg: RunConfig):
    """Columns and rows of one figure panel; panel 'a' is n=0, 'b' is n=1."""
    level = 0 if panel[1] == "a" else 1
    x = cfg.grid()
    columns, data, norms = ["x"], [x], {}
    for name, spec in FIGURES[panel[0]]:
        d = probability_density(spec, level, x, cfg.levels, cfg.method, cfg.eta)
        columns.append(name)
        data.append(d.density)
        norms[name] = {
            "spec": spec.as_dict(),
            "eta": d.eta,
            "normalization": d.normalization,
            "ground_normalization": d.meta["ground_integral"],
        }
    meta = {
        "panel": panel, "n": level, "N": cfg.levels, "method": cfg.method,
        "grid": {"x_min": cfg.x_min, "x_max": cfg.x_max, "points": cfg.points},
        "columns": norms,
    }
    rows = [tuple(float(col[i]) for col in data) for i in range(x.size)]
    return columns, rows, meta


def cmd_figure(cfg: RunConfig) -> int:
    panels = PANELS if cfg.which == "all" else (cfg.which,)
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for panel in panels:
        columns, rows, meta = figure_table(panel, cfg)
        _emit(render_csv(columns, rows, meta), str(outdir / f"fig{panel}.csv"))
    return 0


COMMANDS = {
    "brackets": cmd_brackets,
    "polys": cmd_polys,
    "density": cmd_density,
    "wavefunction": cmd_wavefunction,
    "verify": cmd_verify,
    "figure": cmd_figure,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
        return COMMANDS[cfg.subcommand](cfg)
    except SystemExit as exc:  # argparse: --help exits 0, bad usage exits 2
        return int(exc.code or 0)
    except (OverflowError, ConvergenceError, FloatingPointError, OSError) as exc:
        print(f"defquad: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"defquad: error: {exc}", file=sys.stderr)
        return 2


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
