"""Command-line interface.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from . import harness
from .data import format_csv, load_csv
from .errors import DataError, SDCError
from .metrics import MAPPINGS, evaluate
from .sdc import METHODS, anonymize as run_method


def _write(text: str, output) -> None:
    if output is None:
        click.echo(text, nl=False)
        return
    try:
        Path(output).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {output}: {exc}") from None


@click.group()
def cli():
    """Confidentiality and utility metrics for anonymized microdata."""


@cli.command()
@click.argument("original", type=click.Path(dir_okay=False))
@click.argument("anonymized", type=click.Path(dir_okay=False))
@click.option("--cm3/--no-cm3", "cm3", default=None, help="Compute CM3 (default: only for --mapping absent).")
@click.option("--mapping", type=click.Choice(MAPPINGS), default="paired", show_default=True,
              help="Whether rows of ANONYMIZED correspond to rows of ORIGINAL.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for record-count alignment.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def measure(original, anonymized, cm3, mapping, seed, output):
    """Compute CM1, CM2, CM3 and UM for two CSV files; prints a JSON report."""
    x = load_csv(original)
    y = load_csv(anonymized)
    report = evaluate(x, y, compute_cm3=cm3, mapping=mapping, seed=seed)
    _write(report.to_json() + "\n", output)


@cli.command()
@click.argument("original", type=click.Path(dir_okay=False))
@click.option("--method", "-m", type=click.Choice(list(METHODS)), required=True)
@click.option("--param", "-p", type=float, default=None,
              help="k (mdav), epsilon (laplace), alpha (additive), beta (multiplicative), n_out (ipso).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def anonymize(original, method, param, seed, output):
    """Anonymize a CSV file with one of the bundled methods."""
    x = load_csv(original)
    y = run_method(x, method, param, seed)
    _write(format_csv(y), output)


@cli.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--cm3/--no-cm3", "cm3", default=None, help="Override compute_cm3.")
@click.option("--mapping", type=click.Choice(MAPPINGS), default=None, help="Override the mapping.")
@click.option("--jobs", type=int, default=None, help="Worker processes.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def sweep(config, fmt, seed, cm3, mapping, jobs, output):
    """Run the parameter sweep described by a key = value CONFIG file."""
    cfg = harness.load_config(config, seed=seed, compute_cm3=cm3, mapping=mapping, jobs=jobs)
    result = harness.run_sweep(cfg)
    _write(harness.render_report(result, fmt), output)


@cli.command()
@click.option("--n", "n", type=int, default=1080, show_default=True)
@click.option("--m", "m", type=int, default=4, show_default=True)
@click.option("--rho", type=float, default=0.99, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def simulate(n, m, rho, seed, output):
    """Write a correlated Gaussian dataset as CSV."""
    _write(format_csv(harness.simulate_correlated(n, m, rho, seed)), output)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="sdcmetrics", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except SDCError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
