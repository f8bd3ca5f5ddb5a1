"""Main CLI entry point for the qKZB heat-equation toolkit."""

import json
import sys
from pathlib import Path

import click
import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from config import settings
from core.exceptions import ConfigError, QkzbError
from core.models import HighestWeights, SuiteConfig, to_complex
from pipelines import SUITES, get_suite
from stages.blocks.kernels import kernel_M, kernel_V
from stages.integrals.hyperfun import universal_u
from stages.integrals.rational import gauss_sum
from stages.integrals.shapovalov import q_single
from stages.special.phase import omega_phase
from stages.special.theta import theta, theta_level
from utils.io import format_complex, load_json, to_jsonable

console = Console()

EXIT_FAILED = 1
EXIT_USAGE = 2

# target -> (required arguments, defaults)
EVAL_TARGETS = {
    "theta": (("t",), {"tau": 0.9j}),
    "omega": (("a",), {"z": 0.1 + 0.05j, "tau": 0.9j, "p": 0.7j}),
    "u": (("lam", "mu"), {"tau": 0.13 + 0.9j, "p": 0.07 + 0.7j, "eta": -0.05j}),
    "Q": (("k", "Lambda", "mu"), {"tau": 0.9j, "eta": -0.05j}),
    "V": (("lam", "mu"), {"tau": 0.9j, "sigma": 0.9j + 0.4, "eta": -0.05j}),
    "M": (("m", "lam", "mu"), {"tau": 0.9j, "p": 0.7j, "eta": -0.05j}),
    "theta_level": (("j", "kappa", "lam"), {"tau": 0.9j}),
    "gauss": (("N",), {}),
}
INTEGER_ARGS = {"k", "m", "j", "kappa", "N"}


def _fail(message: str, code: int = EXIT_USAGE):
    console.print(f"[red]Error: {message}[/red]")
    sys.exit(code)


def _parse_assignments(pairs) -> dict:
    values = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"expected key=value, got '{pair}'")
        key, raw = pair.split("=", 1)
        if key in INTEGER_ARGS:
            values[key] = int(raw)
        elif key == "Lambda":
            values[key] = float(raw)
        else:
            values[key] = to_complex(raw)
    return values


def _evaluate(target: str, args: dict) -> complex:
    if target == "theta":
        return theta(args["t"], args["tau"])
    if target == "omega":
        return omega_phase(args["a"], args["z"], args["tau"], args["p"])
    if target == "u":
        value = universal_u((0j,), args["lam"], args["mu"], args["tau"], args["p"],
                            HighestWeights(lambdas=(2.0,)), args["eta"])
        return value.tensor[0, 0]
    if target == "Q":
        return q_single(args["k"], args["Lambda"], args["mu"], args["tau"], args["eta"])
    if target == "V":
        return kernel_V(args["lam"], args["mu"], args["tau"], args["sigma"], args["eta"])
    if target == "M":
        return kernel_M(args["m"], args["lam"], args["mu"], args["tau"], args["p"], args["eta"])
    if target == "theta_level":
        return theta_level(args["j"], args["kappa"], args["lam"], args["tau"])
    return gauss_sum(args["N"])


def _load_config(suite: str, config_path, seed) -> SuiteConfig:
    if config_path:
        config = SuiteConfig.model_validate(load_json(Path(config_path)))
    else:
        config = SuiteConfig(suite=suite)
    if seed is not None:
        config = config.model_copy(update={"seed": seed})
    return config


@click.group()
def cli():
    """qKZB heat-equation toolkit CLI."""
    pass


@cli.command(name="list")
def list_suites():
    """List the available suites."""
    table = Table(title="Suites")
    table.add_column("Suite", style="cyan")
    table.add_column("Checks", style="white")

    for name, suite_cls in SUITES.items():
        table.add_row(name, (suite_cls.__doc__ or "").strip())

    console.print(table)


@cli.command()
@click.argument('suite')
@click.option('--config', '-c', 'config_path', type=click.Path(), help='JSON suite configuration')
@click.option('--out', '-o', type=click.Path(), help='Report file')
@click.option('--seed', '-s', type=int, help='Seed for generic draws')
@click.option('--tolerance-scale', '-t', type=float, help='Multiply every tolerance')
def verify(suite, config_path, out, seed, tolerance_scale):
    """Run a verification suite and write its report."""
    try:
        config = _load_config(suite, config_path, seed)
        if tolerance_scale is not None:
            settings.tolerance_scale = tolerance_scale
        runner = get_suite(suite, config)
    except (ValidationError, ConfigError, OSError, json.JSONDecodeError) as e:
        _fail(str(e))

    console.print(f"[bold blue]Running suite {suite}...[/bold blue]")
    report = runner.run(Path(out) if out else None)

    # Display results
    table = Table(title=f"{suite} (seed {report.seed})")
    table.add_column("Check", style="cyan")
    table.add_column("Residual", style="white")
    table.add_column("Tolerance", style="yellow")
    table.add_column("Status")

    for check in report.checks:
        residual = "error" if check.residual is None else f"{check.residual:.3e}"
        status = "[green]PASS[/green]" if check.passed else "[red]FAIL[/red]"
        table.add_row(escape(check.name), residual, f"{check.tolerance:.1e}", status)

    console.print(table)
    for check in report.checks:
        if not check.passed and check.note:
            console.print(f"[yellow]{escape(check.name)}: {escape(check.note)}[/yellow]")

    if not report.passed:
        failed = sum(not c.passed for c in report.checks)
        console.print(f"[red]✗ {failed} of {len(report.checks)} checks failed[/red]")
        sys.exit(EXIT_FAILED)
    console.print(f"[green]✓ All {len(report.checks)} checks passed[/green]")


@cli.command(name="eval")
@click.argument('target', type=click.Choice(sorted(EVAL_TARGETS)))
@click.argument('assignments', nargs=-1)
def eval_value(target, assignments):
    """Evaluate one quantity, arguments given as key=value."""
    required, defaults = EVAL_TARGETS[target]
    try:
        args = {**defaults, **_parse_assignments(assignments)}
    except (ConfigError, ValueError) as e:
        _fail(str(e))
    missing = [name for name in required if name not in args]
    if missing:
        _fail(f"{target} needs {', '.join(missing)}")

    try:
        value = complex(np.asarray(_evaluate(target, args)).reshape(-1)[0])
    except QkzbError as e:
        _fail(f"{type(e).__name__}: {e}", EXIT_FAILED)

    console.print(format_complex(value))
    click.echo(json.dumps({"target": target, "args": to_jsonable(args), "value": to_jsonable(value)}))


if __name__ == '__main__':
    cli()
