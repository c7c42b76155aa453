"""Experiment catalog, parameter sweeps, table regeneration and CSV output.

The catalog enumerates the package's reference experiments on the stock grid
(dr = dt = 0.002 on [0, 0.4] x [0, 0.2], m = 1): four relative-difference
tables (external damping gamma and internal damping beta, against the
undamped run), field snapshots, origin traces, and energy histories.
Scenario names are "group:qualifier" and :func:`lookup` accepts either a
full name or a group prefix ("table1", "fig7-external", ...).

Conventions for the table files: tables 1 and 2 compare the transformed
fields v, tables 3 and 4 compare the recovered physical fields w = v/r
(the measure under which the reference beta-axis data was produced; the
file headers say which).  Raw data files print floats with 17 significant
digits, table files with 4 decimals, and no file contains timestamps, so
identical configs produce byte-identical output.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import diagnostics, stability, stepper
from .errors import CatalogError
from .model import (
    DEFAULT_GRID,
    PRESET_A,
    PRESET_B,
    PRESET_C,
    SIN5,
    SINH5,
    ZERO,
    GridSpec,
    InitialData,
    NewtonConfig,
    Nonlinearity,
    PhysicsParams,
    Power,
)

__all__ = [
    "Scenario",
    "RunArtifact",
    "NewtonSummary",
    "NONLINEARITIES",
    "INITIAL_DATA",
    "catalog",
    "lookup",
    "group_names",
    "simulate",
    "run_scenario",
    "sweep",
    "table_matrix",
    "write_tables",
    "write_figures",
    "convergence_study",
    "stability_report_lines",
    "nonlinearity_label",
]

#: CLI names for the built-in nonlinearities.
NONLINEARITIES = {
    "zero": ZERO,
    "u3": Power(3),
    "u5": Power(5),
    "u7": Power(7),
    "u9": Power(9),
    "sinh5": SINH5,
    "sin5": SIN5,
}

INITIAL_DATA = {"presetA": PRESET_A, "presetB": PRESET_B, "presetC": PRESET_C}

GAMMAS = (0.1, 0.5, 1.0, 5.0, 10.0)
BETAS = (1e-6, 1e-5, 1e-4, 5e-4, 1e-3)
TABLE_NL_ORDER = ("zero", "u3", "u5", "u7", "u9", "sinh5")
TABLE_ROWS = (0, 20, 40, 60, 80, 100)


def nonlinearity_label(nl: Nonlinearity) -> str:
    if isinstance(nl, Power):
        return f"u{nl.p}"
    return nl.label


@dataclass(frozen=True)
class Scenario:
    """One run of the stepper plus the outputs it should emit."""

    name: str
    ic: InitialData
    nonlinearity: Nonlinearity
    beta: float
    gamma: float
    m: float
    grid: GridSpec
    outputs: frozenset

    @property
    def group(self) -> str:
        return self.name.split(":", 1)[0]

    @property
    def params(self) -> PhysicsParams:
        return PhysicsParams(self.beta, self.gamma, self.m, self.nonlinearity)


def _num(x: float) -> str:
    return f"{x:g}"


def _scen(group, qualifiers, ic, nl, beta, gamma, outputs):
    name = ":".join([group] + list(qualifiers))
    return Scenario(
        name=name,
        ic=ic,
        nonlinearity=nl,
        beta=beta,
        gamma=gamma,
        m=1.0,
        grid=DEFAULT_GRID,
        outputs=frozenset(outputs),
    )


def catalog() -> list:
    """All reference scenarios (the zero-damping references included)."""
    scen = []
    u3, u5, u7 = NONLINEARITIES["u3"], NONLINEARITIES["u5"], NONLINEARITIES["u7"]

    for g in (0.0,) + GAMMAS:
        scen.append(_scen("table1", [f"gamma={_num(g)}"], PRESET_A, u7, 0.0, g, {"reldiff"}))
    for label in TABLE_NL_ORDER:
        for g in (0.0,) + GAMMAS:
            scen.append(
                _scen("table2", [label, f"gamma={_num(g)}"], PRESET_B, NONLINEARITIES[label], 0.0, g, {"reldiff"})
            )
    for b in (0.0,) + BETAS:
        scen.append(_scen("table3", [f"beta={_num(b)}"], PRESET_A, u7, b, 0.0, {"reldiff"}))
    for label in TABLE_NL_ORDER:
        for b in (0.0,) + BETAS:
            scen.append(
                _scen("table4", [label, f"beta={_num(b)}"], PRESET_B, NONLINEARITIES[label], b, 0.0, {"reldiff"})
            )

    for g in (0.0, 5.0, 10.0):
        scen.append(_scen("fig1", [f"gamma={_num(g)}"], PRESET_A, u7, 0.0, g, {"fields"}))
    for label in ("zero", "u3", "u5", "u7", "u9", "sin5"):
        for g in (0.0, 5.0, 10.0):
            scen.append(
                _scen("fig2", [label, f"gamma={_num(g)}"], PRESET_B, NONLINEARITIES[label], 0.0, g, {"fields"})
            )
    for b in (0.0, 1e-4, 2e-4):
        scen.append(_scen("fig3", [f"beta={_num(b)}"], PRESET_A, u7, b, 0.0, {"fields"}))
    for ic_label, ic in (("presetB", PRESET_B), ("presetC", PRESET_C)):
        for nl in (u3, u5, u7):
            for b in (0.0, 1e-4, 2e-4):
                scen.append(
                    _scen("fig4", [ic_label, nonlinearity_label(nl), f"beta={_num(b)}"], ic, nl, b, 0.0, {"fields"})
                )
    for label in TABLE_NL_ORDER:
        for b in (0.0, 5e-4, 5e-3):
            scen.append(
                _scen("fig5", [label, f"beta={_num(b)}"], PRESET_B, NONLINEARITIES[label], b, 5.0, {"fields"})
            )
    for nl in (u3, u5, u7):
        for g in (0.0, 10.0, 20.0):
            scen.append(
                _scen("fig6-external", [nonlinearity_label(nl), f"gamma={_num(g)}"], PRESET_B, nl, 0.0, g, {"origin"})
            )
        for b in (0.0, 1e-3, 2.5e-3, 5e-3):
            scen.append(
                _scen("fig6-internal", [nonlinearity_label(nl), f"beta={_num(b)}"], PRESET_B, nl, b, 0.0, {"origin"})
            )
        for g in (1.0, 5.0, 10.0):
            scen.append(
                _scen("fig7-external", [nonlinearity_label(nl), f"gamma={_num(g)}"], PRESET_B, nl, 0.0, g, {"energy"})
            )
        for b in (5e-4, 1e-3, 5e-3):
            scen.append(
                _scen("fig7-internal", [nonlinearity_label(nl), f"beta={_num(b)}"], PRESET_B, nl, b, 0.0, {"energy"})
            )
    return scen


def group_names() -> list:
    return sorted({s.group for s in catalog()})


def lookup(key: str) -> list:
    """Scenarios with the given name, group, or group prefix ("fig6", "fig7")."""
    scen = catalog()
    exact = [s for s in scen if s.name == key]
    if exact:
        return exact
    grouped = [s for s in scen if s.group == key or s.group.startswith(key + "-")]
    if grouped:
        return grouped
    raise CatalogError(
        f"unknown scenario {key!r}; valid groups: {', '.join(group_names())}"
    )


_RUN_CACHE: dict = {}


def simulate(scenario: Scenario, cfg: NewtonConfig | None = None, on_divergence: str = "abort"):
    """Run a scenario through the stepper, memoizing by physical configuration.

    Scenarios from different groups that share grid/parameters/data reuse the
    same trajectory.  Trajectories are immutable by convention: do not write
    into ``levels`` of a cached result.
    """
    if cfg is None:
        cfg = NewtonConfig()
    key = (scenario.grid, scenario.params, scenario.ic, cfg, on_divergence)
    traj = _RUN_CACHE.get(key)
    if traj is None:
        traj = stepper.run(scenario.grid, scenario.params, scenario.ic, cfg, on_divergence)
        _RUN_CACHE[key] = traj
    return traj


def clear_cache() -> None:
    _RUN_CACHE.clear()


@dataclass(frozen=True)
class NewtonSummary:
    steps: int
    total_iterations: int
    max_iterations: int
    max_residual: float
    all_converged: bool


def _newton_summary(traj) -> NewtonSummary:
    if not traj.stats:
        return NewtonSummary(0, 0, 0, 0.0, True)
    return NewtonSummary(
        steps=len(traj.stats),
        total_iterations=sum(s.newton_iterations for s in traj.stats),
        max_iterations=max(s.newton_iterations for s in traj.stats),
        max_residual=max(s.final_residual for s in traj.stats),
        all_converged=all(s.converged for s in traj.stats),
    )


@dataclass
class RunArtifact:
    """What one scenario produced: written files plus summary records."""

    name: str
    files: dict
    stability: stability.StabilityReport
    newton: NewtonSummary
    reldiff: dict | None = None


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def _raw(x: float) -> str:
    return f"{x:.17g}"


def _tab(x: float) -> str:
    return f"{x:.4f}"


def _config_lines(scenario: Scenario, cfg: NewtonConfig) -> list:
    g = scenario.grid
    return [
        f"# radialkg scenario: {scenario.name}",
        f"# ic={scenario.ic.label} nonlinearity={nonlinearity_label(scenario.nonlinearity)}"
        f" beta={_num(scenario.beta)} gamma={_num(scenario.gamma)} m={_num(scenario.m)}",
        f"# a={_num(g.a)} T={_num(g.T)} dr={_num(g.dr)} dt={_num(g.dt)} M={g.M} N={g.N}",
        f"# newton_tol={_num(cfg.tol)} newton_max={cfg.max_iter}",
    ]


def _write_csv(path: Path, header_lines, columns, rows, fmt=_raw):
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(c if isinstance(c, str) else fmt(c) for c in row) + "\n")


def _snapshot_steps(N: int) -> list:
    return sorted({round(i * N / 5) for i in range(6)})


def _slug(name: str) -> str:
    return name.replace(":", "_")


def _write_outputs(scenario: Scenario, traj, cfg: NewtonConfig, outdir: Path) -> dict:
    files = {}
    header = _config_lines(scenario, cfg)
    grid = scenario.grid
    if "fields" in scenario.outputs:
        rows = []
        for n in _snapshot_steps(grid.N):
            w = diagnostics.recover_w(traj.levels[n], grid)
            t = n * grid.dt
            for j in range(grid.M + 1):
                rows.append((str(n), t, str(j), j * grid.dr, traj.levels[n][j], w[j]))
        path = outdir / f"{_slug(scenario.name)}_fields.csv"
        _write_csv(path, header, ("n", "t", "j", "r", "v", "w"), rows)
        files["fields"] = path
    if "energy" in scenario.outputs:
        series = diagnostics.energy_series(traj)
        rate_rhs = diagnostics.dissipation_series(traj)
        rows = []
        for n in range(grid.N):
            lhs = series.rates[n - 1] if n >= 1 else math.nan
            rhs = rate_rhs[n - 1] if n >= 1 else math.nan
            rows.append((str(n), (n + 0.5) * grid.dt, series.values[n], lhs, rhs))
        path = outdir / f"{_slug(scenario.name)}_energy.csv"
        _write_csv(path, header, ("n", "t_mid", "E0", "rate_lhs", "rate_rhs"), rows)
        files["energy"] = path
    if "origin" in scenario.outputs:
        rows = [
            (str(n), n * grid.dt, diagnostics.recover_w(traj.levels[n], grid)[0])
            for n in range(grid.N + 1)
        ]
        path = outdir / f"{_slug(scenario.name)}_origin.csv"
        _write_csv(path, header, ("n", "t", "w0"), rows)
        files["origin"] = path
    if "amplitude" in scenario.outputs:
        rows = [
            (str(n), n * grid.dt, diagnostics.amplitude(traj.levels[n], grid))
            for n in range(grid.N + 1)
        ]
        path = outdir / f"{_slug(scenario.name)}_amplitude.csv"
        _write_csv(path, header, ("n", "t", "amplitude"), rows)
        files["amplitude"] = path
    return files


def stability_report_lines(dt: float, dr: float, params: PhysicsParams) -> list:
    report = stability.necessary_condition(dt, dr, params)
    scan = stability.spectral_radius_scan(dt, dr, params)
    return [
        f"R = {_num(report.R)}",
        f"lhs = {_raw(report.lhs)}",
        f"rhs = {_raw(report.rhs)}",
        f"satisfied = {str(report.satisfied).lower()}",
        f"margin = {_raw(report.margin)}",
        f"spectral_radius_scan = {_raw(scan)}",
    ]


def _emit_one(scenario: Scenario, outdir: Path, cfg: NewtonConfig, on_divergence: str) -> RunArtifact:
    traj = simulate(scenario, cfg, on_divergence)
    for line in [f"[{scenario.name}]"] + stability_report_lines(scenario.grid.dt, scenario.grid.dr, scenario.params):
        print(line)
    if not traj.stability.satisfied:
        print(f"warning: necessary stability condition violated for {scenario.name}", file=sys.stderr)
    files = _write_outputs(scenario, traj, cfg, outdir)
    return RunArtifact(
        name=scenario.name,
        files=files,
        stability=traj.stability,
        newton=_newton_summary(traj),
    )


# ---------------------------------------------------------------------------
# Sweeps and table reproduction
# ---------------------------------------------------------------------------

def _field_for(traj, n: int, field: str):
    if field == "v":
        return traj.levels[n]
    if field == "w":
        return diagnostics.recover_w(traj.levels[n], traj.grid)
    raise ValueError("field must be 'v' or 'w'")


def sweep(
    base: Scenario,
    axis: str,
    values,
    outdir: Path | None = None,
    cfg: NewtonConfig | None = None,
    sample_steps=None,
    field: str = "v",
    on_divergence: str = "abort",
) -> list:
    """Run ``base`` across an axis of gamma or beta values.

    The axis value 0 run (added if absent) is the reference; each damped run
    gets the relative difference of its ``field`` vectors ("v" transformed,
    "w" physical) against the reference at the sampled steps.  Emits a
    reldiff table CSV when ``outdir`` is given.
    """
    if axis not in ("gamma", "beta"):
        raise ValueError("sweep axis must be 'gamma' or 'beta'")
    if cfg is None:
        cfg = NewtonConfig()
    if sample_steps is None:
        sample_steps = _snapshot_steps(base.grid.N)
    vals = list(values)
    if 0.0 not in vals:
        vals.insert(0, 0.0)

    def variant(v):
        return replace(base, name=f"{base.group}:{axis}={_num(v)}", **{axis: v})

    ref = simulate(variant(0.0), cfg, on_divergence)
    artifacts = []
    table = {}
    for v in vals:
        scn = variant(v)
        traj = simulate(scn, cfg, on_divergence)
        deltas = {
            int(n): diagnostics.relative_difference(
                _field_for(traj, n, field), _field_for(ref, n, field)
            )
            if np.any(ref.levels[n])
            else 0.0
            for n in sample_steps
        }
        table[v] = deltas
        artifacts.append(
            RunArtifact(
                name=scn.name,
                files={},
                stability=traj.stability,
                newton=_newton_summary(traj),
                reldiff=deltas,
            )
        )
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        header = _config_lines(base, cfg) + [f"# sweep axis: {axis}; field: {field}"]
        cols = ["n"] + [f"{axis}={_num(v)}" for v in vals]
        rows = [[str(n)] + [table[v][n] for v in vals] for n in sample_steps]
        path = outdir / f"{_slug(base.group)}_{axis}_sweep.csv"
        _write_csv(path, header, cols, rows)
        for art in artifacts:
            art.files["reldiff"] = path
    return artifacts


#: Which field each reproduction table compares (see module docstring).
TABLE_FIELD = {"table1": "v", "table2": "v", "table3": "w", "table4": "w"}


def table_matrix(which: str, cfg: NewtonConfig | None = None):
    """Reproduce one of the four reference tables.

    Returns ``(row_labels, col_labels, matrix)`` where matrix[i][j] is the
    relative difference for row i, column j.  Tables 1/3 have time-step rows
    and damping columns; tables 2/4 have nonlinearity rows (at t = 0.2).
    """
    if cfg is None:
        cfg = NewtonConfig()
    field = TABLE_FIELD.get(which)
    if field is None:
        raise CatalogError(f"unknown table {which!r}; expected table1..table4")

    def delta(traj, ref, n):
        if not np.any(ref.levels[n]):
            return 0.0
        return diagnostics.relative_difference(
            _field_for(traj, n, field), _field_for(ref, n, field)
        )

    if which in ("table1", "table3"):
        axis_vals = GAMMAS if which == "table1" else BETAS
        scens = {s.name: s for s in lookup(which)}
        zero_name = f"{which}:gamma=0" if which == "table1" else f"{which}:beta=0"
        ref = simulate(scens[zero_name], cfg)
        rows = []
        for n in TABLE_ROWS:
            row = []
            for v in axis_vals:
                name = f"{which}:gamma={_num(v)}" if which == "table1" else f"{which}:beta={_num(v)}"
                row.append(delta(simulate(scens[name], cfg), ref, n))
            rows.append(row)
        col_prefix = "gamma" if which == "table1" else "beta"
        return (
            [str(n) for n in TABLE_ROWS],
            [f"{col_prefix}={_num(v)}" for v in axis_vals],
            rows,
        )

    axis_vals = GAMMAS if which == "table2" else BETAS
    axis = "gamma" if which == "table2" else "beta"
    scens = {s.name: s for s in lookup(which)}
    n_final = DEFAULT_GRID.N
    rows = []
    for label in TABLE_NL_ORDER:
        ref = simulate(scens[f"{which}:{label}:{axis}=0"], cfg)
        row = [
            delta(simulate(scens[f"{which}:{label}:{axis}={_num(v)}"], cfg), ref, n_final)
            for v in axis_vals
        ]
        rows.append(row)
    return list(TABLE_NL_ORDER), [f"{axis}={_num(v)}" for v in axis_vals], rows


def write_tables(outdir, cfg: NewtonConfig | None = None) -> list:
    """Regenerate all four reference tables as CSV files."""
    if cfg is None:
        cfg = NewtonConfig()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    captions = {
        "table1": "external damping (gamma), travelling-bump data, G'(u)=u^7",
        "table2": "external damping (gamma), velocity-kick data, t=0.2",
        "table3": "internal damping (beta), travelling-bump data, G'(u)=u^7",
        "table4": "internal damping (beta), velocity-kick data, t=0.2",
    }
    for which in ("table1", "table2", "table3", "table4"):
        row_labels, col_labels, rows = table_matrix(which, cfg)
        field = TABLE_FIELD[which]
        field_note = "transformed field v" if field == "v" else "physical field w = v/r"
        header = [
            f"# radialkg {which}: relative differences vs the undamped run",
            f"# {captions[which]}",
            f"# compared field: {field_note}; norm: l2 with dr weight",
            f"# grid: a=0.4 T=0.2 dr=0.002 dt=0.002 m=1; newton_tol={_num(cfg.tol)} newton_max={cfg.max_iter}",
        ]
        first_col = "n" if which in ("table1", "table3") else "nonlinearity"
        data_rows = [[lab] + row for lab, row in zip(row_labels, rows)]
        path = outdir / f"{which}.csv"
        _write_csv(path, header, [first_col] + col_labels, data_rows, fmt=_tab)
        paths.append(path)
    return paths


def write_figures(outdir, cfg: NewtonConfig | None = None) -> list:
    """Emit the data files behind every figure group."""
    if cfg is None:
        cfg = NewtonConfig()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    artifacts = []
    for group in ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"):
        for scn in lookup(group):
            artifacts.append(_emit_one(scn, outdir, cfg, "abort"))
    return artifacts


def run_scenario(
    name_or_scenario,
    outdir,
    cfg: NewtonConfig | None = None,
    on_divergence: str = "abort",
) -> list:
    """Run a scenario, a group, or an explicit Scenario; write its outputs.

    Table groups regenerate their table CSV; everything else writes the
    per-run files requested by each scenario's ``outputs``.  Returns the
    run artifacts.
    """
    if cfg is None:
        cfg = NewtonConfig()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if isinstance(name_or_scenario, Scenario):
        scens = [name_or_scenario]
        group = name_or_scenario.group
    else:
        scens = lookup(name_or_scenario)
        group = name_or_scenario
    if group in TABLE_FIELD and len(scens) > 1:
        path = write_tables_one(group, outdir, cfg)
        artifacts = []
        for scn in scens:
            traj = simulate(scn, cfg, on_divergence)
            artifacts.append(
                RunArtifact(scn.name, {"table": path}, traj.stability, _newton_summary(traj))
            )
        return artifacts
    return [_emit_one(scn, outdir, cfg, on_divergence) for scn in scens]


def write_tables_one(which: str, outdir, cfg: NewtonConfig | None = None) -> Path:
    """Regenerate a single table CSV (see :func:`write_tables`)."""
    if cfg is None:
        cfg = NewtonConfig()
    outdir = Path(outdir)
    row_labels, col_labels, rows = table_matrix(which, cfg)
    field_note = "transformed field v" if TABLE_FIELD[which] == "v" else "physical field w = v/r"
    header = [
        f"# radialkg {which}: relative differences vs the undamped run",
        f"# compared field: {field_note}; norm: l2 with dr weight",
        f"# grid: a=0.4 T=0.2 dr=0.002 dt=0.002 m=1; newton_tol={_num(cfg.tol)} newton_max={cfg.max_iter}",
    ]
    first_col = "n" if which in ("table1", "table3") else "nonlinearity"
    data_rows = [[lab] + row for lab, row in zip(row_labels, rows)]
    path = outdir / f"{which}.csv"
    _write_csv(path, header, [first_col] + col_labels, data_rows, fmt=_tab)
    return path


# ---------------------------------------------------------------------------
# Convergence study
# ---------------------------------------------------------------------------

_K_CONV = 2.0 * math.pi / 0.4  # standing-mode wavenumber compatible with v(a) = 0


def _standing_profile(r):
    # phi(r) = sin(k r)/r with the limit k at r = 0, so v = r*phi = sin(k r)
    if r == 0.0:
        return _K_CONV
    return math.sin(_K_CONV * r) / r


def _zero_velocity(r):
    return 0.0 * r


STANDING_MODE = InitialData(phi=_standing_profile, psi=_zero_velocity, label="standing-mode")


@dataclass(frozen=True)
class ConvergenceRow:
    M: int
    dr: float
    dt: float
    error: float
    order: float | None


def convergence_study(k_levels: int = 4, base_M: int = 25) -> list:
    """Refinement study on the linear problem against an exact standing mode.

    G' = 0, beta = gamma = 0, m = 1: v(r, t) = sin(k r) cos(omega t) with
    k = 2*pi/a and omega^2 = k^2 + m^2 solves the problem exactly and is
    compatible with the r = a Dirichlet boundary.  dr halves k_levels times
    at fixed dt/dr = 1/2; the sup-norm error at t = T should shrink by ~4x
    per level (the scheme is second order in both steps for G' = 0).
    """
    if k_levels < 3:
        raise ValueError("need at least 3 refinement levels to observe an order")
    a, T, m = 0.4, 0.2, 1.0
    omega = math.sqrt(_K_CONV**2 + m * m)
    params = PhysicsParams(0.0, 0.0, m, ZERO)
    rows = []
    prev_err = None
    for lvl in range(k_levels):
        M = base_M * (2**lvl)
        grid = GridSpec(a=a, T=T, M=M, N=M)  # N = M makes dt = dr/2 exactly
        # the linear solve is exact in one iteration; the tolerance only has
        # to sit above the machine residual floor ~eps/dt^2 at every level
        cfg = NewtonConfig(tol=1e-12 / grid.dt**2, max_iter=20)
        traj = stepper.run(grid, params, STANDING_MODE, cfg)
        exact = np.sin(_K_CONV * grid.radii()) * math.cos(omega * T)
        exact[0] = exact[-1] = 0.0
        err = float(np.max(np.abs(traj.levels[-1] - exact)))
        order = None if prev_err is None else math.log2(prev_err / err)
        rows.append(ConvergenceRow(M=M, dr=grid.dr, dt=grid.dt, error=err, order=order))
        prev_err = err
    return rows
