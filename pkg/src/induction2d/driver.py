"""Experiment runner and CLI.

Subcommands map to the benchmark experiments: `run` advances a single
configuration and records diagnostics, `converge` sweeps degrees and grid
sizes on the smooth advection test, `compare` runs the four schemes on the
discontinuous loop, `fixed-dof` trades elements for polynomial degree at a
fixed resolution budget, and `dispersion` / `stability-region` export the
linear-theory curves.

Configuration comes from a flat `key = value` file (with # comments);
every key is mirrored by a command-line flag that takes precedence.
Output CSVs are written under a `.partial` name and renamed on completion,
so a run either finishes atomically or leaves no finished file behind.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis
from .ader import AderDivergenceError, ader_step, build_tableau, cfl_dt
from .basis import NodeSet1D
from .ctsd import CtsdScheme, CtsdState, PotentialInit, VelocityField
from .grid import BoundaryKind, ConfigurationError, ElementGrid
from .rkdg import (
    CleaningParams,
    DgScheme,
    DgState,
    LdfScheme,
    LdfState,
    cfl_dt_dg,
    divclean_step,
    ssp_order_for_degree,
    ssp_rk_step,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SCHEMES = ("ctsd_ader", "rkdg", "ldf", "divclean")


class NumericalFailure(RuntimeError):
    pass


# ------------------------------------------------------------------ test cases

def _loop_potential(a0, r0, cx, cy):
    def az(x, y):
        return np.maximum(0.0, a0 * (r0 - np.hypot(x - cx, y - cy)))

    return az


def _loop_b(a0, r0, cx, cy):
    def b(x, y):
        r = np.hypot(x - cx, y - cy)
        inside = r < r0
        safe = np.where(r > 0, r, 1.0)
        bx = np.where(inside, -a0 * (y - cy) / safe, 0.0)
        by = np.where(inside, a0 * (x - cx) / safe, 0.0)
        return bx, by

    return b


def _rotating_exact(a0, r0, cx, cy, center):
    ox, oy = center
    b0 = _loop_b(a0, r0, cx, cy)

    def exact(x, y, t):
        c, s = np.cos(t), np.sin(t)
        # pull the point back along the rotation, evaluate, push the vector
        xr = ox + c * (x - ox) + s * (y - oy)
        yr = oy - s * (x - ox) + c * (y - oy)
        bx0, by0 = b0(xr, yr)
        return c * bx0 - s * by0, s * bx0 + c * by0

    return exact


@dataclass(frozen=True)
class TestCase:
    name: str
    potential: PotentialInit
    b_eval: object
    boundary: BoundaryKind
    default_tfinal: float
    make_velocity: object
    exact: object = None


def _smooth_az(x, y):
    return (np.sin(2 * np.pi * x) + np.sin(2 * np.pi * y)) / (2 * np.pi)


def _smooth_b(x, y):
    return np.cos(2 * np.pi * y) + 0.0 * x, -np.cos(2 * np.pi * x) + 0.0 * y


TEST_CASES = {
    "smooth_loop": TestCase(
        name="smooth_loop",
        potential=PotentialInit("smooth_loop", _smooth_az),
        b_eval=_smooth_b,
        boundary=BoundaryKind.PERIODIC,
        default_tfinal=1.0,
        make_velocity=lambda: VelocityField.constant(1.0, 1.0),
    ),
    "disc_loop": TestCase(
        name="disc_loop",
        potential=PotentialInit("disc_loop", _loop_potential(1e-3, 0.25, 0.5, 0.5)),
        b_eval=_loop_b(1e-3, 0.25, 0.5, 0.5),
        boundary=BoundaryKind.PERIODIC,
        default_tfinal=2.0,
        make_velocity=lambda: VelocityField.constant(1.0, 1.0),
    ),
    # the loop rotates about the domain centre so it stays inside the box;
    # ghost cells carry the exact rotated solution
    "rotating_loop": TestCase(
        name="rotating_loop",
        potential=PotentialInit("rotating_loop", _loop_potential(1e-3, 0.125, 0.75, 0.5)),
        b_eval=_loop_b(1e-3, 0.125, 0.75, 0.5),
        boundary=BoundaryKind.DIRICHLET_EXACT,
        default_tfinal=np.pi,
        make_velocity=lambda: VelocityField.rotation(center=(0.5, 0.5)),
        exact=_rotating_exact(1e-3, 0.125, 0.75, 0.5, (0.5, 0.5)),
    ),
}


# --------------------------------------------------------------- configuration

@dataclass
class ExperimentConfig:
    test: str = "disc_loop"
    scheme: str = "ctsd_ader"
    n: int = 1
    elements: int = 32
    tfinal: float | None = None
    cfl: float = 0.8
    outdir: str = "out"
    diag_interval: int = 10
    ch: float | None = None
    cp2: float | None = None

    def validate(self):
        if self.test not in TEST_CASES:
            raise ConfigurationError(f"unknown test case '{self.test}'")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme '{self.scheme}'")
        if self.n < 0:
            raise ConfigurationError("polynomial degree must be nonnegative")
        if self.elements < 1:
            raise ConfigurationError("need at least one element per side")
        if self.cfl <= 0:
            raise ConfigurationError("the Courant number must be positive")
        if self.test == "rotating_loop" and self.scheme != "ctsd_ader":
            raise ConfigurationError(
                "the rotating test prescribes exact ghost data, which only the "
                "staggered scheme supports; pick scheme = ctsd_ader"
            )
        if self.scheme == "ldf" and self.n > 3:
            raise ConfigurationError("the divergence-free basis is tabulated up to n = 3")
        if self.diag_interval < 1:
            raise ConfigurationError("diagnostics interval must be at least 1")

    @property
    def resolved_tfinal(self) -> float:
        return self.tfinal if self.tfinal is not None else TEST_CASES[self.test].default_tfinal


def parse_config_file(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


_CONFIG_TYPES = {
    "test": str, "scheme": str, "n": int, "elements": int, "tfinal": float,
    "cfl": float, "outdir": str, "diag_interval": int, "ch": float, "cp2": float,
}


def build_config(file_values: dict, overrides: dict) -> ExperimentConfig:
    cfg = ExperimentConfig()
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    for key, value in merged.items():
        if key not in _CONFIG_TYPES:
            raise ConfigurationError(f"unknown configuration key '{key}'")
        caster = _CONFIG_TYPES[key]
        try:
            cfg = replace(cfg, **{key: caster(value)})
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad value for '{key}': {value}") from exc
    cfg.validate()
    return cfg


# -------------------------------------------------------------------- CSV I/O

def _write_csv(path: str, header: str, rows) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    partial = path + ".partial"
    with open(partial, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    os.replace(partial, path)


def _fmt(x: float) -> str:
    return f"{x:.12e}"


# ------------------------------------------------------------------ run loops

@dataclass
class RunResult:
    config: ExperimentConfig
    steps: list = field(default_factory=list)
    times: list = field(default_factory=list)
    dts: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    div_surface: list = field(default_factory=list)
    div_volume: list = field(default_factory=list)
    final_state: object = None
    initial_state: object = None

    @property
    def energy_ratio(self) -> float:
        return self.energies[-1] / self.energies[0]


def _advance(config: ExperimentConfig):
    """Shared scheme setup: returns (state0, make_state, step, t_end)."""
    case = TEST_CASES[config.test]
    n, N = config.n, config.elements
    grid = ElementGrid(N, N, boundary=case.boundary)
    velocity = case.make_velocity()
    t_end = config.resolved_tfinal

    if config.scheme == "ctsd_ader":
        scheme = CtsdScheme(grid, n, velocity, exact_solution=case.exact)
        _, fld = scheme.init_from_potential(case.potential)
        tableau = build_tableau(n)
        vmax = scheme.sweep_speed()
        rhs = scheme.packed_rhs(fld)
        vec = fld.pack()

        def make_state(v):
            return CtsdState(fld.unpack_like(v), grid, scheme.nodes)

        def step(v, t):
            dt = cfl_dt(grid, vmax, n, config.cfl, t=t, t_end=t_end)
            return ader_step(v, rhs, dt, tableau, t0=t), dt

        return vec, make_state, step, t_end

    vmax = velocity.max_sweep_speed(grid, NodeSet1D(n), include_ghosts=False)
    order = ssp_order_for_degree(n)
    if config.scheme == "rkdg":
        scheme = DgScheme(grid, n, velocity, ncomp=2)
        u0 = scheme.project(case.b_eval)

        def make_state(u):
            return DgState(u, grid, n)

        def step(u, t):
            dt = cfl_dt_dg(grid, vmax, n, config.cfl, t=t, t_end=t_end)
            return ssp_rk_step(u, scheme.rhs, dt, order, t0=t), dt

        return u0, make_state, step, t_end

    if config.scheme == "ldf":
        scheme = LdfScheme(grid, n, velocity)
        u0 = scheme.project(case.b_eval)

        def make_state(u):
            return LdfState(u, grid, n)

        def step(u, t):
            dt = cfl_dt_dg(grid, vmax, n, config.cfl, t=t, t_end=t_end)
            return ssp_rk_step(u, scheme.rhs, dt, order, t0=t), dt

        return u0, make_state, step, t_end

    if config.scheme == "divclean":
        scheme = DgScheme(grid, n, velocity, ncomp=3)
        u0 = scheme.project(case.b_eval)
        # c_h defaults to twice the largest |v| (Euclidean)
        v2 = velocity.max_speed(grid, NodeSet1D(n), include_ghosts=False)
        default_params = CleaningParams.defaults(v2, grid.dx)
        params = CleaningParams(
            c_h=config.ch if config.ch is not None else default_params.c_h,
            c_p2=config.cp2 if config.cp2 is not None else default_params.c_p2,
        )

        def make_state(u):
            return DgState(u[:, :, :2], grid, n)

        def step(u, t):
            dt = cfl_dt_dg(grid, vmax, n, config.cfl, c_h=params.c_h, t=t, t_end=t_end)
            return divclean_step(u, scheme, params, dt, order, t0=t), dt

        return u0, make_state, step, t_end

    raise ConfigurationError(f"unknown scheme '{config.scheme}'")


def run_experiment(config: ExperimentConfig) -> RunResult:
    """Advance one configuration to its final time, recording diagnostics."""
    config.validate()
    state_vec, make_state, step, t_end = _advance(config)
    result = RunResult(config=config)
    result.initial_state = make_state(state_vec)

    def record(istep, t, dt, vec):
        st = make_state(vec)
        norm = analysis.divergence_norm(st)
        result.steps.append(istep)
        result.times.append(t)
        result.dts.append(dt)
        result.energies.append(analysis.magnetic_energy(st))
        result.div_surface.append(norm.surface)
        result.div_volume.append(norm.volume)

    record(0, 0.0, 0.0, state_vec)
    t, istep = 0.0, 0
    while t < t_end - 1e-12:
        try:
            state_vec, dt = step(state_vec, t)
        except AderDivergenceError as exc:
            raise NumericalFailure(f"step {istep + 1}: {exc}") from exc
        if not np.all(np.isfinite(state_vec)):
            raise NumericalFailure(f"non-finite state at step {istep + 1}")
        t += dt
        istep += 1
        if istep % config.diag_interval == 0 or t >= t_end - 1e-12:
            record(istep, t, dt, state_vec)
    result.final_state = make_state(state_vec)
    return result


def write_timeseries(result: RunResult, path: str) -> None:
    rows = [
        (str(result.steps[k]), _fmt(result.times[k]), _fmt(result.dts[k]),
         _fmt(result.energies[k]), _fmt(result.div_surface[k]),
         _fmt(result.div_volume[k]))
        for k in range(len(result.steps))
    ]
    _write_csv(path, "step,t,dt,energy,div_surface,div_volume", rows)


def write_fieldmap(result: RunResult, path: str) -> None:
    """Control-volume-averaged energy density, normalised to the initial max."""
    dens = analysis.cv_energy_density(result.final_state)
    dens0 = analysis.cv_energy_density(result.initial_state)
    peak = float(np.max(dens0))
    scale = peak if peak > 0 else 1.0
    xc, yc = analysis.cv_centers(result.final_state)
    Nx, Ny, mx, my = dens.shape
    flat = dens.transpose(0, 2, 1, 3).reshape(Nx * mx, Ny * my)
    rows = []
    for i in range(Nx * mx):
        for j in range(Ny * my):
            rows.append((str(i), str(j), _fmt(xc[i]), _fmt(yc[j]), _fmt(flat[i, j] / scale)))
    _write_csv(path, "i,j,x_center,y_center,energy_density_normalized", rows)


def run(config: ExperimentConfig) -> RunResult:
    result = run_experiment(config)
    base = os.path.join(config.outdir, f"{config.scheme}_{config.test}_n{config.n}_N{config.elements}")
    write_timeseries(result, os.path.join(base, "timeseries.csv"))
    write_fieldmap(result, os.path.join(base, "fieldmap.csv"))
    return result


# ------------------------------------------------------------------- sweeps

def run_convergence(scheme: str, n_list, elements_list, tfinal: float,
                    cfl: float, outdir: str) -> list:
    """Smooth-advection L1 errors against the initial state, with orders."""
    rows = []
    for n in n_list:
        errors = []
        for N in elements_list:
            config = ExperimentConfig(test="smooth_loop", scheme=scheme, n=n,
                                      elements=N, tfinal=tfinal, cfl=cfl,
                                      outdir=outdir, diag_interval=10**9)
            result = run_experiment(config)
            l1_bx, l1_by = analysis.l1_error(result.final_state, result.initial_state)
            errors.append((N, 1.0 / N, l1_bx, l1_by))
        for k, (N, dx, l1_bx, l1_by) in enumerate(errors):
            if k == 0:
                obx, oby = "", ""
            else:
                prev_N, _, prev_bx, prev_by = errors[k - 1]
                obx = _fmt(np.log(prev_bx / l1_bx) / np.log(N / prev_N))
                oby = _fmt(np.log(prev_by / l1_by) / np.log(N / prev_N))
            rows.append((str(n), str(N), _fmt(dx), _fmt(l1_bx), _fmt(l1_by), obx, oby))
    _write_csv(os.path.join(outdir, "errors.csv"),
               "n,N,dx,l1_bx,l1_by,order_bx,order_by", rows)
    return rows


def run_comparison_suite(n_list, elements: int, tfinal: float, cfl: float,
                         outdir: str) -> dict:
    """All four schemes on the discontinuous loop; per-run and merged CSVs."""
    results = {}
    merged = []
    for n in n_list:
        for scheme in SCHEMES:
            if scheme == "ldf" and n > 3:
                continue
            config = ExperimentConfig(test="disc_loop", scheme=scheme, n=n,
                                      elements=elements, tfinal=tfinal, cfl=cfl,
                                      outdir=outdir)
            result = run(config)
            results[(scheme, n)] = result
            for k, t in enumerate(result.times):
                merged.append((scheme, str(n), _fmt(t), _fmt(result.energies[k]),
                               _fmt(result.div_surface[k]), _fmt(result.div_volume[k])))
    _write_csv(os.path.join(outdir, "comparison_summary.csv"),
               "scheme,n,t,energy,div_surface,div_volume", merged)
    return results


def run_fixed_dof_study(dof: int, degrees, tfinal: float, cfl: float,
                        outdir: str) -> list:
    """Fixed (n+1)*N budget: higher degree on fewer elements."""
    for n in degrees:
        if dof % (n + 1) != 0:
            raise ConfigurationError(f"(n+1) = {n + 1} does not divide dof = {dof}")
    rows = []
    for n in degrees:
        N = dof // (n + 1)
        config = ExperimentConfig(test="disc_loop", scheme="ctsd_ader", n=n,
                                  elements=N, tfinal=tfinal, cfl=cfl, outdir=outdir)
        result = run(config)
        rows.append((str(n), str(N), _fmt(result.energy_ratio)))
    _write_csv(os.path.join(outdir, "fixed_dof_summary.csv"),
               "n,N,energy_ratio", rows)
    return rows


def run_dispersion(n_list, samples: int, dx: float, v: float, outdir: str) -> None:
    rows = []
    for n in n_list:
        k = np.linspace(0.0, analysis.k_max(n, dx), samples)
        branch = analysis.dispersion_relation(n, k, dx, v)
        for kk, om in zip(branch.k, branch.omega):
            rows.append((str(n), _fmt(kk), _fmt(om.real), _fmt(om.imag)))
    _write_csv(os.path.join(outdir, "dispersion.csv"), "n,k,re_omega,im_omega", rows)


def run_stability_region(n_list, resolution: int, outdir: str) -> None:
    re = np.linspace(-6.0, 2.0, resolution)
    im = np.linspace(-5.0, 5.0, resolution)
    rows = []
    for n in n_list:
        Z = re[:, None] + 1j * im[None, :]
        amp = analysis.ader_amplification(n, Z.ravel()).reshape(Z.shape)
        for i in range(resolution):
            for j in range(resolution):
                rows.append((str(n), _fmt(re[i]), _fmt(im[j]), _fmt(amp[i, j])))
    _write_csv(os.path.join(outdir, "stabregion.csv"), "n,re_z,im_z,abs_p", rows)


# ----------------------------------------------------------------------- CLI

def _int_list(text: str):
    return [int(part) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="induction2d",
        description="Divergence-free induction-equation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="advance one configuration")
    run_p.add_argument("--config", help="flat key = value configuration file")
    run_p.add_argument("--scheme", choices=SCHEMES)
    run_p.add_argument("--test", choices=sorted(TEST_CASES))
    run_p.add_argument("--n", type=int)
    run_p.add_argument("--elements", type=int)
    run_p.add_argument("--tfinal", type=float)
    run_p.add_argument("--cfl", type=float)
    run_p.add_argument("--outdir")
    run_p.add_argument("--diag-interval", type=int, dest="diag_interval")
    run_p.add_argument("--ch", type=float)
    run_p.add_argument("--cp2", type=float)

    comp = sub.add_parser("compare", help="four-scheme loop comparison")
    comp.add_argument("--n-list", type=_int_list, default=[1, 2, 3])
    comp.add_argument("--elements", type=int, default=32)
    comp.add_argument("--tfinal", type=float, default=2.0)
    comp.add_argument("--cfl", type=float, default=0.8)
    comp.add_argument("--outdir", default="out/compare")

    fd = sub.add_parser("fixed-dof", help="fixed degrees-of-freedom sweep")
    fd.add_argument("--dof", type=int, default=40)
    fd.add_argument("--degrees", type=_int_list, default=[1, 3, 7])
    fd.add_argument("--tfinal", type=float, default=1.0)
    fd.add_argument("--cfl", type=float, default=0.8)
    fd.add_argument("--outdir", default="out/fixed_dof")

    conv = sub.add_parser("converge", help="smooth-test convergence study")
    conv.add_argument("--scheme", choices=SCHEMES, default="ctsd_ader")
    conv.add_argument("--n-list", type=_int_list, default=[1, 2, 3, 4])
    conv.add_argument("--elements-list", type=_int_list, default=[8, 16, 32])
    conv.add_argument("--tfinal", type=float, default=1.0)
    conv.add_argument("--cfl", type=float, default=0.8)
    conv.add_argument("--outdir", default="out/converge")

    disp = sub.add_parser("dispersion", help="planar-wave dispersion curves")
    disp.add_argument("--n-list", type=_int_list, default=list(range(10)))
    disp.add_argument("--samples", type=int, default=200)
    disp.add_argument("--dx", type=float, default=1.0)
    disp.add_argument("--velocity", type=float, default=1.0)
    disp.add_argument("--outdir", default="out/dispersion")

    stab = sub.add_parser("stability-region", help="time-integrator |P| map")
    stab.add_argument("--n-list", type=_int_list, default=list(range(6)))
    stab.add_argument("--resolution", type=int, default=81)
    stab.add_argument("--outdir", default="out/stability")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            file_values = parse_config_file(args.config) if args.config else {}
            overrides = {k: getattr(args, k) for k in _CONFIG_TYPES}
            config = build_config(file_values, overrides)
            result = run(config)
            print(f"{config.scheme} {config.test} n={config.n} N={config.elements}: "
                  f"energy ratio {result.energy_ratio:.6f}")
        elif args.command == "compare":
            run_comparison_suite(args.n_list, args.elements, args.tfinal,
                                 args.cfl, args.outdir)
            print(f"comparison written to {args.outdir}")
        elif args.command == "fixed-dof":
            rows = run_fixed_dof_study(args.dof, args.degrees, args.tfinal,
                                       args.cfl, args.outdir)
            for n, N, ratio in rows:
                print(f"n={n} N={N}: energy ratio {float(ratio):.6f}")
        elif args.command == "converge":
            rows = run_convergence(args.scheme, args.n_list, args.elements_list,
                                   args.tfinal, args.cfl, args.outdir)
            for row in rows:
                order = row[5] if row[5] else "-"
                print(f"n={row[0]} N={row[1]}: L1(Bx)={row[3]} order={order}")
        elif args.command == "dispersion":
            run_dispersion(args.n_list, args.samples, args.dx, args.velocity, args.outdir)
            print(f"dispersion curves written to {args.outdir}")
        elif args.command == "stability-region":
            run_stability_region(args.n_list, args.resolution, args.outdir)
            print(f"stability map written to {args.outdir}")
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
