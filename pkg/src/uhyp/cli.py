"""
Command-line front end.

    python -m uhyp run --config configs/default.ini
    python -m uhyp verify-identity --config configs/default.ini --scale 0.1
    python -m uhyp cross-check --config configs/cross_check.ini
    python -m uhyp residual --config configs/mode.ini
    python -m uhyp convergence --config configs/default.ini

Every command copies its config into the output directory and writes a CSV
report there. The exit status is nonzero when a reported check fails.
"""

import functools
import logging
import math
import sys
from pathlib import Path
from typing import Callable, List, Optional

import click
import numpy as np
import pandas as pd
from tqdm import tqdm

from .cone import ConeSolver
from .config import RunConfig, central_node_indices, load_run_config
from .corpus import default_corpus, run_identity_checks
from .errors import ConfigError, UhypError
from .grid import sample
from .propagator import convergence_study, evolve, evolve_trajectory, residual_profile
from .settings import CONFIG, output_dir_override
from .snapshot import atomic_write_bytes, write_snapshot, write_table

logger = logging.getLogger(__name__)


def handle_errors(command: Callable) -> Callable:
    """Turn expected failures into a one-line message and exit status 1"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except UhypError as error:
            click.echo(f"❌ {error.detail}", err=True)
            sys.exit(1)

    return wrapper


def config_options(command: Callable) -> Callable:
    command = click.option(
        "--output-dir",
        type=click.Path(file_okay=False, path_type=Path),
        default=None,
        help="Output directory (overrides UHYP_OUTPUT_DIR and [output] directory)",
    )(command)
    command = click.option(
        "--config",
        "config_path",
        required=True,
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        help="Run config file",
    )(command)
    return command


def prepare(config_path: Path, output_dir: Optional[Path]):
    config = load_run_config(config_path)
    directory = Path(output_dir or output_dir_override() or config.output.directory)
    directory.mkdir(parents=True, exist_ok=True)
    atomic_write_bytes(directory / "config.ini", config_path.read_bytes())
    return config, directory


def finish(name: str, passed: bool, report: Path) -> None:
    click.echo(f"📝 Report written to {report}")
    if passed:
        click.echo(f"🎉 {name}: all checks passed")
        return
    click.echo(f"❌ {name}: at least one check failed", err=True)
    sys.exit(1)


def banner(title: str) -> None:
    click.echo(f"\n🔍 {title}")
    click.echo("=" * 50)


@click.group()
def cli():
    """Pseudospectral solver for the characteristic problem of ∂²_ts + Δ_x̄ - Δ_ȳ"""
    logging.basicConfig(
        level=CONFIG["LOG_LEVEL"],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@config_options
@handle_errors
def run(config_path: Path, output_dir: Optional[Path]):
    """Evolve the initial data and write one snapshot per time"""
    config, directory = prepare(config_path, output_dir)
    banner("EVOLVING INITIAL DATA")
    field = config.initial_field()
    trajectory = evolve_trajectory(field, config.run.times, config.policy, workers=config.run.workers)

    for index, (t, snapshot) in enumerate(zip(trajectory.times, trajectory.fields)):
        write_snapshot(snapshot, directory / f"snapshot_{index}.{config.output.format}")

    tolerance = config.verify.conservation_tolerance
    table = pd.DataFrame(
        {
            "t": trajectory.times,
            "l2_norm": trajectory.norms(),
            "deviation": trajectory.conservation_deviations(),
            "plane_fraction": trajectory.plane_fraction,
        }
    )
    table["status"] = np.where(table["deviation"] < tolerance, "PASS", "FAIL")
    for row in table.itertuples():
        icon = "✅" if row.status == "PASS" else "❌"
        click.echo(
            f"{icon} t={row.t:g}: ‖v‖={row.l2_norm:.12g}, deviation {row.deviation:.2e}, "
            f"λ=0 fraction {row.plane_fraction:.2e}"
        )
    report = directory / "diagnostics.csv"
    if config.output.diagnostics:
        write_table(table, report)
    finish("run", bool((table["status"] == "PASS").all()), report)


@cli.command("verify-identity")
@config_options
@click.option("--scale", type=float, default=None, help="Multiply every quadrature node count")
@handle_errors
def verify_identity(config_path: Path, output_dir: Optional[Path], scale: Optional[float]):
    """Evaluate both sides of the cone identity on the test-function corpus"""
    config, directory = prepare(config_path, output_dir)
    verify = config.verify
    resolution = verify.resolution.scaled(scale if scale is not None else verify.resolution_scale)
    banner(f"CONE IDENTITY (d={config.grid.d}, n={config.grid.n})")
    checks = run_identity_checks(
        default_corpus(config.grid.d, config.grid.n),
        resolution,
        tolerance=verify.tolerance,
        include_branches=verify.include_branches,
        branch_tolerance=verify.branch_tolerance,
    )
    rows = []
    for check in checks:
        icon = "✅" if check.passed else "❌"
        click.echo(
            f"{icon} {check.name}: spherical {check.spherical.real:.10g}, "
            f"parametrized {check.parametrized.real:.10g}, gap {check.gap:.2e} {check.status}"
        )
        rows.append(
            {
                "name": check.name,
                "spherical": check.spherical.real,
                "parametrized": check.parametrized.real,
                "branches": check.branches.real if check.branches is not None else math.nan,
                "branch_gap": check.branch_gap if check.branch_gap is not None else math.nan,
                "reference": check.reference if check.reference is not None else math.nan,
                "gap": check.gap,
                "tolerance": check.tolerance,
                "status": check.status,
            }
        )
    report = write_table(pd.DataFrame(rows), directory / "identity.csv")
    finish("verify-identity", all(check.passed for check in checks), report)


@cli.command("cross-check")
@config_options
@handle_errors
def cross_check(config_path: Path, output_dir: Optional[Path]):
    """Compare the cone reconstruction with the propagator at sampled nodes"""
    config, directory = prepare(config_path, output_dir)
    if config.mode is not None:
        raise ConfigError("cross-check needs [packet] initial data, not [mode]")
    verify, grid = config.verify, config.grid
    data = config.initial_data
    field = sample(data, grid)
    solver = ConeSolver(data, grid.d, grid.n, verify.resolution.scaled(verify.resolution_scale))

    indices = central_node_indices(grid, verify.cross_check_radius, verify.cross_check_points, verify.seed)
    mesh = np.meshgrid(*grid.axes(), indexing="ij")
    coords = np.stack([axis.ravel()[indices] for axis in mesh], axis=-1)
    s, x_bar, y_bar = grid.split(coords)

    banner(f"CROSS-CHECK ({len(indices)} points)")
    frames: List[pd.DataFrame] = []
    passed = True
    for t in config.run.times:
        evolved = evolve(field, t, config.policy).flat()[indices]
        cone = np.array(
            [
                solver.evaluate(t, s[k], x_bar[k], y_bar[k])[0]
                for k in tqdm(range(len(indices)), desc=f"t={t:g}", disable=not sys.stderr.isatty())
            ]
        )
        gaps = np.abs(cone - evolved)
        tolerance = verify.initial_tolerance if t == 0 else verify.cross_check_tolerance
        worst = float(gaps.max(initial=0.0))
        ok = worst < tolerance
        passed &= ok
        click.echo(f"{'✅' if ok else '❌'} t={t:g}: max |cone - propagator| = {worst:.2e} (tolerance {tolerance:.0e})")

        frame = pd.DataFrame(coords, columns=["s"] + [f"x{i + 1}" for i in range(grid.d)] + [f"y{i + 1}" for i in range(grid.n)])
        frame.insert(0, "index", indices)
        frame.insert(0, "t", t)
        frame["cone_re"], frame["cone_im"] = cone.real, cone.imag
        frame["grid_re"], frame["grid_im"] = evolved.real, evolved.imag
        frame["abs_diff"] = gaps
        frames.append(frame)

    table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
    report = write_table(table, directory / "cross_check.csv")
    finish("cross-check", passed, report)


def _require_times(config: RunConfig, command: str) -> None:
    if len(config.run.times) < 3:
        raise click.UsageError(f"{command} needs at least three uniformly spaced times in [run] times")


@cli.command()
@config_options
@handle_errors
def residual(config_path: Path, output_dir: Optional[Path]):
    """Spectral PDE residual at every interior time"""
    config, directory = prepare(config_path, output_dir)
    _require_times(config, "residual")
    banner("PDE RESIDUAL")
    trajectory = evolve_trajectory(config.initial_field(), config.run.times, config.policy)
    tolerance = config.verify.residual_tolerance
    table = pd.DataFrame(residual_profile(trajectory), columns=["t", "residual"])
    table["status"] = np.where(table["residual"] < tolerance, "PASS", "FAIL")
    for row in table.itertuples():
        click.echo(f"{'✅' if row.status == 'PASS' else '❌'} t={row.t:g}: R = {row.residual:.3e}")
    report = write_table(table, directory / "residual.csv")
    finish("residual", bool((table["status"] == "PASS").all()), report)


@cli.command()
@config_options
@handle_errors
def convergence(config_path: Path, output_dir: Optional[Path]):
    """Residual under successive halvings of Δt and the observed order"""
    config, directory = prepare(config_path, output_dir)
    _require_times(config, "convergence")
    times = config.run.times
    middle = len(times) // 2
    dt = times[middle] - times[middle - 1]
    verify = config.verify
    banner(f"CONVERGENCE (t={times[middle]:g}, Δt={dt:g}, {verify.levels} levels)")
    study = convergence_study(config.initial_field(), times[middle], dt, verify.levels, config.policy)

    orders = [math.nan] + study.orders
    table = pd.DataFrame({"step": study.steps, "residual": study.residuals, "order": orders})
    passed = all(abs(p - verify.order_target) <= verify.order_tolerance for p in study.orders)
    for row in table.itertuples():
        order = "" if math.isnan(row.order) else f", order {row.order:.3f}"
        click.echo(f"🔍 Δt={row.step:g}: R = {row.residual:.3e}{order}")
    report = write_table(table, directory / "convergence.csv")
    finish("convergence", passed, report)


def main():
    cli()


if __name__ == "__main__":
    main()
