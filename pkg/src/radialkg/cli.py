"""Command-line front end: run, sweep, tables, figures, stability, converge.

Configuration precedence for explicit runs: built-in defaults, then the
``--config`` JSON file (flat keys mirroring the flags), then command-line
flags.  Exit codes: 0 success, 2 Newton divergence under the abort policy,
3 configuration or catalog errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .errors import CatalogError, NewtonDivergenceError
from .harness import INITIAL_DATA, NONLINEARITIES, Scenario
from .model import GridSpec, NewtonConfig

_DEFAULTS = {
    "ic": "presetA",
    "nonlinearity": "u7",
    "p": None,
    "beta": 0.0,
    "gamma": 0.0,
    "m": 1.0,
    "a": 0.4,
    "T": 0.2,
    "dr": 0.002,
    "dt": 0.002,
    "newton_tol": 1e-5,
    "newton_max": 20,
    "emit": "fields,energy",
    "on_divergence": "abort",
}

_EMIT_KINDS = ("fields", "energy", "reldiff", "origin", "amplitude")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with flat config keys")
    p.add_argument("--gamma", type=float, help="external damping coefficient")
    p.add_argument("--beta", type=float, help="internal damping coefficient")
    p.add_argument("--m", type=float, help="mass")
    p.add_argument("--p", type=int, help="odd power exponent (alternative to --nonlinearity)")
    p.add_argument("--nonlinearity", choices=sorted(NONLINEARITIES), help="nonlinear term")
    p.add_argument("--ic", choices=sorted(INITIAL_DATA), help="initial-data preset")
    p.add_argument("--dr", type=float, help="spatial step")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--a", type=float, help="spatial radius")
    p.add_argument("--T", type=float, help="final time")
    p.add_argument("--newton-tol", dest="newton_tol", type=float, help="Newton residual tolerance")
    p.add_argument("--newton-max", dest="newton_max", type=int, help="Newton iteration budget")
    p.add_argument("--emit", help="comma list of outputs: fields,energy,reldiff,origin,amplitude")
    p.add_argument(
        "--on-divergence", dest="on_divergence", choices=("abort", "mark"),
        help="what to do when a Newton step exhausts its budget",
    )


def _merge_config(args: argparse.Namespace) -> dict:
    merged = dict(_DEFAULTS)
    if getattr(args, "config", None) is not None:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(_DEFAULTS) - {"name"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    for key in _DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def _build_scenario(merged: dict) -> tuple:
    if merged["p"] is not None:
        if "nonlinearity" in merged and merged["nonlinearity"] != _DEFAULTS["nonlinearity"]:
            label = merged["nonlinearity"]
            if label != f"u{merged['p']}":
                raise ValueError("--p conflicts with --nonlinearity; give one of them")
        nl_label = f"u{merged['p']}"
        if nl_label not in NONLINEARITIES:
            raise ValueError(f"no built-in power nonlinearity u{merged['p']}")
    else:
        nl_label = merged["nonlinearity"]
    emit = [e for e in str(merged["emit"]).split(",") if e]
    for e in emit:
        if e not in _EMIT_KINDS:
            raise ValueError(f"unknown emit kind {e!r}; expected subset of {_EMIT_KINDS}")
    grid = GridSpec.from_steps(merged["a"], merged["T"], merged["dr"], merged["dt"])
    scenario = Scenario(
        name=str(merged.get("name", "custom")),
        ic=INITIAL_DATA[merged["ic"]],
        nonlinearity=NONLINEARITIES[nl_label],
        beta=float(merged["beta"]),
        gamma=float(merged["gamma"]),
        m=float(merged["m"]),
        grid=grid,
        outputs=frozenset(emit),
    )
    cfg = NewtonConfig(tol=float(merged["newton_tol"]), max_iter=int(merged["newton_max"]))
    return scenario, cfg, merged["on_divergence"]


def _cmd_run(args) -> int:
    merged = _merge_config(args)
    if args.scenario is not None:
        cfg = NewtonConfig(tol=float(merged["newton_tol"]), max_iter=int(merged["newton_max"]))
        artifacts = harness.run_scenario(args.scenario, args.out, cfg, merged["on_divergence"])
    else:
        scenario, cfg, policy = _build_scenario(merged)
        artifacts = harness.run_scenario(scenario, args.out, cfg, policy)
    seen = set()
    for art in artifacts:
        for kind, path in sorted(art.files.items()):
            if (kind, path) not in seen:
                seen.add((kind, path))
                print(f"{art.name}: wrote {kind} -> {path}")
        if not art.newton.all_converged:
            print(f"{art.name}: warning: {art.newton.steps} steps, some not converged", file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    merged = _merge_config(args)
    scenario, cfg, policy = _build_scenario(merged)
    values = [float(v) for v in args.values.split(",") if v]
    arts = harness.sweep(
        scenario, args.axis, values, outdir=args.out, cfg=cfg,
        field=args.field, on_divergence=policy,
    )
    path = arts[0].files.get("reldiff") if arts else None
    if path:
        print(f"wrote sweep table -> {path}")
    for art in arts:
        picked = {n: round(d, 6) for n, d in sorted(art.reldiff.items())}
        print(f"{art.name}: {picked}")
    return 0


def _cmd_tables(args) -> int:
    for path in harness.write_tables(args.out):
        print(f"wrote {path}")
    return 0


def _cmd_figures(args) -> int:
    arts = harness.write_figures(args.out)
    print(f"wrote figure data for {len(arts)} runs into {args.out}")
    return 0


def _cmd_stability(args) -> int:
    merged = _merge_config(args)
    scenario, _, _ = _build_scenario(merged)
    for line in harness.stability_report_lines(scenario.grid.dt, scenario.grid.dr, scenario.params):
        print(line)
    return 0


def _cmd_converge(args) -> int:
    rows = harness.convergence_study(args.levels)
    print("M,dr,dt,sup_error,observed_order")
    for row in rows:
        order = "" if row.order is None else f"{row.order:.3f}"
        print(f"{row.M},{row.dr:.17g},{row.dt:.17g},{row.error:.17g},{order}")
    if args.out is not None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / "convergence.csv"
        with open(path, "w") as fh:
            fh.write("# radialkg convergence study: linear standing mode, R = dt/dr = 0.5\n")
            fh.write("M,dr,dt,sup_error,observed_order\n")
            for row in rows:
                order = "nan" if row.order is None else f"{row.order:.17g}"
                fh.write(f"{row.M},{row.dr:.17g},{row.dt:.17g},{row.error:.17g},{order}\n")
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radialkg",
        description="Damped radial nonlinear Klein-Gordon solver and experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario, a catalog group, or an explicit config")
    p_run.add_argument("--scenario", help="catalog scenario or group name")
    p_run.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    _add_config_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep gamma or beta against the undamped reference")
    p_sweep.add_argument("--axis", choices=("gamma", "beta"), required=True)
    p_sweep.add_argument("--values", required=True, help="comma list, e.g. 0,0.1,0.5")
    p_sweep.add_argument("--field", choices=("v", "w"), default="v",
                         help="compare transformed (v) or physical (w) fields")
    p_sweep.add_argument("--out", type=Path, default=Path("out"))
    _add_config_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_tab = sub.add_parser("tables", help="regenerate the four reference tables")
    p_tab.add_argument("--out", type=Path, default=Path("out"))
    p_tab.set_defaults(func=_cmd_tables)

    p_fig = sub.add_parser("figures", help="emit the data files behind every figure group")
    p_fig.add_argument("--out", type=Path, default=Path("out"))
    p_fig.set_defaults(func=_cmd_figures)

    p_stab = sub.add_parser("stability", help="print the stability report for a configuration")
    _add_config_flags(p_stab)
    p_stab.set_defaults(func=_cmd_stability)

    p_conv = sub.add_parser("converge", help="refinement study on the linear problem")
    p_conv.add_argument("--levels", type=int, default=4)
    p_conv.add_argument("--out", type=Path, default=None)
    p_conv.set_defaults(func=_cmd_converge)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags; that's a config error here
        return 0 if exc.code in (0, None) else 3
    try:
        return args.func(args)
    except NewtonDivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CatalogError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
