"""
Command-line interface for fblab.
"""

import logging
import sys
from time import time
from typing import Optional, Sequence

import click
import humanize
import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table
from rich.traceback import install as install_rich_traceback

from .config import DEFAULT_CONFIG_PATH, AppConfig
from .errors import ConfigError, ConvergenceError, FblabError
from .fbmin.descent import MinimizerReport, minimize
from .fbmin.oracle import fb_identity_residual, radial_energy_sweep, radial_optimal_radius
from .file_handler import FileHandler
from .geomlab.capsule import capsule_ruling_profile
from .reporting import Measured, Report, Status
from .verify.lab import CAPSULES, capsule_checks, load_matrix_pairs, matrix_pair_checks, matrix_trials
from .verify.suites import SuiteSpec, run_suite
from .verify.tolerances import get_tolerance

# Set up rich console and traceback handling
console = Console()
install_rich_traceback()

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2
SWEEP_SAMPLES = 64
STATUS_STYLE = {Status.PASSED: "green", Status.FAILED: "red", Status.SKIPPED: "yellow"}


def setup_logging(config: AppConfig) -> None:
    """Configure logging with rich handler."""
    logging.basicConfig(
        level=config.logging.level.upper(),
        format=config.logging.format,
        handlers=[
            RichHandler(console=console, rich_tracebacks=True),
            logging.FileHandler(config.logging.file) if config.logging.file else logging.NullHandler(),
        ],
    )


class FblabCommand(click.Command):
    """Usage errors exit with 1; 2 means non-convergence."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise


class FblabGroup(click.Group):
    command_class = FblabCommand

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise


def fail(message: str, code: int = EXIT_ERROR) -> None:
    console.print(f"[red]Error:[/red] {message}")
    sys.exit(code)


def describe(error: FblabError) -> str:
    key = getattr(error, "key", None)
    return f"{str(error)} (key: {key})" if key else str(error)


def problem_options(func):
    """Flags shared by the computing commands; a flag that is not given keeps the configured value."""
    options = [
        click.option("--p", "p", type=float, help="Exponent p > 1"),
        click.option("--n", "n", type=int, help="Cells per side of the grid"),
        click.option("--radius-R", "radius", type=float, help="Half-width R of the box [-R, R]^2"),
        click.option("--k", "k", help="Shape spec of the fixed body K, e.g. disk:1"),
        click.option("--init", "init", help="Shape spec of the starting domain"),
        click.option("--tol-fb", "tol_fb", type=float, help="Relative free boundary residual tolerance"),
        click.option("--max-iter", "max_iter", type=int, help="Maximum outer descent iterations"),
        click.option("--seed", type=int, help="Random seed"),
        click.option("--threads", type=int, help="Worker threads"),
        click.option("--deterministic/--no-deterministic", default=None, help="Force serial, ordered execution"),
        click.option("--out-dir", "out_dir", type=click.Path(file_okay=False), help="Output directory"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def apply_overrides(config: AppConfig, **flags) -> AppConfig:
    """Copy given flags onto ``config`` (flags win) and re-validate."""
    targets = {
        "p": (config.solver, "p"),
        "n": (config.grid, "n"),
        "radius": (config.grid, "radius"),
        "k": (config.problem, "k"),
        "init": (config.problem, "init"),
        "tol_fb": (config.descent, "tol_fb_residual"),
        "max_iter": (config.descent, "max_outer_iter"),
        "seed": (config, "seed"),
        "threads": (config, "threads"),
        "deterministic": (config, "deterministic"),
        "out_dir": (config, "output_dir"),
    }
    for name, value in flags.items():
        if value is not None and name in targets:
            target, attr = targets[name]
            setattr(target, attr, value)
    config.validate()
    return config


def elapsed_since(start: float) -> str:
    return humanize.naturaldelta(time() - start, minimum_unit="milliseconds")


def spinner() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[bold blue]{task.description}"),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    )


def report_table(report: Report, title: str) -> Table:
    """One row per sub-check with its status and margin."""
    table = Table(show_header=True, header_style="bold magenta", title=title)
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Margin", justify="right")
    table.add_column("Note")
    for detail in report.details or [report]:
        style = STATUS_STYLE[detail.status]
        margin = "" if detail.margin is None else f"{detail.margin:.3g}"
        note = detail.error or detail.metadata.get("skip_reason", "")
        table.add_row(detail.check, f"[{style}]{detail.status.value}[/{style}]", margin, str(note))
    return table


def write_solve_outputs(result: MinimizerReport, out_dir: str) -> FileHandler:
    handler = FileHandler(out_dir)
    handler.write_report(result.to_report(), "report.json")
    handler.write_field(result.potential, "field.csv")
    handler.write_contours(result.omega.contours, "contour.csv")
    handler.write_rows("trace.csv", ("iter", "dirichlet", "perimeter", "total", "max_residual", "step"),
                       result.trace_rows())
    handler.write_manifest()
    return handler


@click.group(cls=FblabGroup)
@click.option("--config", "-c", type=click.Path(), help="Path to configuration file")
@click.pass_context
def cli(ctx: click.Context, config: Optional[str]) -> None:
    """fblab - free boundary and p-Laplacian verification lab."""
    ctx.ensure_object(dict)
    try:
        ctx.obj["config"] = AppConfig.load(config)
    except ConfigError as e:
        fail(describe(e))
    setup_logging(ctx.obj["config"])


@cli.command()
@problem_options
@click.pass_context
def solve(ctx: click.Context, **flags) -> None:
    """Minimize the total energy around K and write report, field, contour and trace."""
    start = time()
    try:
        config = apply_overrides(ctx.obj["config"], **flags)
        cfg = config.minimize_config()
        with spinner() as progress:
            progress.add_task(f"Descending from {cfg.init} around {cfg.k} (p={cfg.p}, n={cfg.n})", total=None)
            result = minimize(cfg)
        write_solve_outputs(result, config.output_dir)
    except ConvergenceError as e:
        fail(f"inner solve did not converge: {str(e)} (residual {e.residual:.3g})", EXIT_NOT_CONVERGED)
    except FblabError as e:
        fail(describe(e))
    except KeyboardInterrupt:
        console.print("\n[yellow]Process interrupted by user[/yellow]")
        sys.exit(EXIT_ERROR)

    stats = result.residual.stats()
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("Total energy", f"{result.energy.total:.10g}")
    table.add_row("Dirichlet term", f"{result.energy.dirichlet:.10g}")
    table.add_row("Perimeter", f"{result.energy.perimeter:.10g}")
    table.add_row("Equivalent radius", f"{np.sqrt(result.omega.area / np.pi):.6g}")
    table.add_row("Max relative residual", f"{stats['max_relative']:.4g}")
    table.add_row("Outer iterations", str(len(result.trace)))
    table.add_row("Backtracks", str(result.backtracks))
    table.add_row("Elapsed", elapsed_since(start))
    border = "green" if result.converged else "red"
    console.print(Panel(table, title=f"[bold]{result.message}[/bold]", border_style=border))
    console.print(f"Outputs written to [blue]{config.output_dir}[/blue]")
    if not result.converged:
        sys.exit(EXIT_NOT_CONVERGED)


@cli.command()
@click.option("--a", "a", type=float, default=1.0, show_default=True, help="Radius of the inner ball")
@click.option("--p", "p", type=float, default=2.0, show_default=True, help="Exponent p > 1")
@click.option("--dim", "dim", type=int, default=2, show_default=True, help="Space dimension")
@click.option("--samples", type=int, default=SWEEP_SAMPLES, show_default=True, help="Points in the energy sweep")
@click.option("--out-dir", "out_dir", type=click.Path(file_okay=False), help="Output directory")
@click.pass_context
def oracle(ctx: click.Context, a: float, p: float, dim: int, samples: int, out_dir: Optional[str]) -> None:
    """Optimal radius of the radial problem and the energy profile around it."""
    out_dir = out_dir or ctx.obj["config"].output_dir
    try:
        rho, energy = radial_optimal_radius(a, p, dim)
        residual = fb_identity_residual(a, rho, p, dim)
        rhos = np.linspace(a * (1.0 + 1.0 / samples), 3.0 * rho, samples)
        sweep = radial_energy_sweep(a, p, dim, np.union1d(rhos, [rho]))
        handler = FileHandler(out_dir)
        handler.write_rows("sweep.csv", ("rho", "energy"), [tuple(map(float, row)) for row in sweep])
        relative = abs(residual) / ((dim - 1.0) / rho) if dim > 1 else abs(residual)
        report = Report.judge(
            "radial_oracle", "(p - 1)|u'|^p equals the mean curvature of the optimal sphere",
            relative, get_tolerance("oracle_identity"),
            {"rho_star": Measured(rho, "length"), "energy": Measured(energy), "residual": Measured(residual)},
            {"a": a, "p": p, "n": dim},
        )
        handler.write_report(report, "report.json")
        handler.write_manifest()
    except FblabError as e:
        fail(describe(e))

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("Optimal radius", f"{rho:.10g}")
    table.add_row("Total energy", f"{energy:.10g}")
    table.add_row("Free boundary residual", f"{residual:.3e}")
    console.print(Panel(table, title=f"[bold]Radial oracle a={a}, p={p}, n={dim}[/bold]", border_style="green"))
    if not report.passed:
        sys.exit(EXIT_ERROR)


@cli.command()
@click.option("--matrix-trials", "trials", type=int, default=1000, show_default=True, help="Random SPD pairs")
@click.option("--samples", type=int, default=65, show_default=True, help="Samples along each capsule ruling")
@click.option("--matrices", "matrices", type=click.Path(exists=True, dir_okay=False),
              help="JSON file with a list of [B1, B2] matrix pairs to check")
@click.option("--seed", type=int, help="Random seed")
@click.option("--out-dir", "out_dir", type=click.Path(file_okay=False), help="Output directory")
@click.pass_context
def lab(ctx: click.Context, trials: int, samples: int, matrices: Optional[str], seed: Optional[int],
        out_dir: Optional[str]) -> None:
    """Randomized matrix trials and capsule curvature checks."""
    config = ctx.obj["config"]
    seed = config.seed if seed is None else seed
    out_dir = out_dir or config.output_dir
    start = time()
    try:
        with spinner() as progress:
            progress.add_task(f"Running {trials} matrix trials and capsule checks", total=None)
            reports = [matrix_trials(trials, seed, config.tolerances), capsule_checks(samples, config.tolerances)]
            if matrices:
                with open(matrices, "r", encoding="utf-8") as f:
                    reports.append(matrix_pair_checks(load_matrix_pairs(f.read()), config.tolerances))
        handler = FileHandler(out_dir)
        for report in reports:
            handler.write_report(report, f"{report.check}.json")
        for name, (r1, r2, d) in CAPSULES.items():
            profile = capsule_ruling_profile(r1, r2, d, samples)
            handler.write_rows(f"profile_{name}.csv", ("s", "kappa"), [tuple(map(float, row)) for row in profile])
        handler.write_manifest()
    except FblabError as e:
        fail(describe(e))

    for report in reports:
        console.print(report_table(report, report.check))
    console.print(f"Finished in {elapsed_since(start)}; outputs in [blue]{out_dir}[/blue]")
    if any(report.status == Status.FAILED for report in reports):
        sys.exit(EXIT_ERROR)


def parse_tolerances(values: Sequence[str]) -> dict:
    overrides = {}
    for item in values:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"tolerance override '{item}' must read NAME=VALUE", key="tol")
        get_tolerance(name)
        try:
            overrides[name] = float(value)
        except ValueError:
            raise ConfigError(f"tolerance override '{item}' needs a number", key=f"tolerances.{name}")
    return overrides


@cli.command()
@click.option("--suite", "suite", required=True, help="Built-in suite name or path to a suite YAML file")
@click.option("--tol", "tol", multiple=True, help="Tolerance override NAME=VALUE (repeatable)")
@problem_options
@click.pass_context
def verify(ctx: click.Context, suite: str, tol: Sequence[str], **flags) -> None:
    """Run a property suite; exit 0 iff no check fails."""
    start = time()
    try:
        config = apply_overrides(ctx.obj["config"], **flags)
        spec = SuiteSpec.resolve(suite)
        if flags.get("n") is not None:
            spec.n = config.grid.n
        if flags.get("radius") is not None:
            spec.radius = config.grid.radius
        for name in ("seed", "threads", "deterministic"):
            if flags.get(name) is not None:
                setattr(spec, name, getattr(config, name))
        spec.tolerances = {**config.tolerances, **spec.tolerances, **parse_tolerances(tol)}
        spec.descent = {**config.descent_overrides(), **spec.descent}
        handler = FileHandler(config.output_dir)
        with spinner() as progress:
            progress.add_task(f"Running suite '{spec.name}'", total=None)
            report = run_suite(spec, handler)
        handler.write_report(report, "report.json")
        handler.write_json(spec.to_dict(), "suite.json")
        handler.write_manifest()
    except FblabError as e:
        fail(describe(e))

    console.print(report_table(report, f"Suite {spec.name}"))
    console.print(f"Finished in {elapsed_since(start)}; outputs in [blue]{config.output_dir}[/blue]")
    if report.status == Status.FAILED:
        sys.exit(EXIT_ERROR)


@cli.command()
@click.option("--output", "-o", type=click.Path(), help="Path to save configuration")
@click.pass_context
def config(ctx: click.Context, output: Optional[str]) -> None:
    """Save current configuration to file."""
    try:
        path = ctx.obj["config"].save(output)
        console.print(f"[green]Configuration saved to {path or DEFAULT_CONFIG_PATH}[/green]")
    except OSError as e:
        console.print(f"[red]Error saving configuration:[/red] {str(e)}")
        sys.exit(EXIT_ERROR)
