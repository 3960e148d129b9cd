#!/usr/bin/env python3
import logging
import os
import sys

import click

# Add the parent directory to sys.path to allow imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from cli.commands.certify import certify
from cli.commands.example import example_constant
from cli.commands.fields import dirac, schrodinger
from cli.commands.oned import oned
from cli.commands.rr import rr
from cli.commands.spec import genus, validate
from cli.params import parse_tolerance_overrides
from finitegap import __version__
from finitegap.core.exceptions import DocumentError, FiniteGapError

# Configure logging; stderr stays quiet on success
logging.basicConfig(
    level=logging.WARNING,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger("finitegap")

EXIT_INADMISSIBLE = 1
EXIT_DOCUMENT = 2
EXIT_INFEASIBLE = 3
EXIT_ERROR = 4


class FiniteGapGroup(click.Group):
    """Maps library errors to exit codes; --debug re-raises them."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except DocumentError as e:
            self._report(ctx, e, EXIT_DOCUMENT)
        except FiniteGapError as e:
            self._report(ctx, e, EXIT_ERROR)

    @staticmethod
    def _report(ctx: click.Context, error: FiniteGapError, code: int) -> None:
        if ctx.obj and ctx.obj.get("DEBUG"):
            raise error
        where = error.details.get("field")
        prefix = f"{where}: " if where and not error.message.startswith(str(where)) else ""
        click.echo(f"Error: {prefix}{error.message}", err=True)
        ctx.exit(code)


@click.group(cls=FiniteGapGroup)
@click.version_option(version=__version__)
@click.option("--debug", is_flag=True, help="Enable debug output and re-raise errors")
@click.option("--verbose", "-v", is_flag=True, help="Enable informational output")
@click.option("--tol", multiple=True, metavar="NAME=VALUE", help="Override a tolerance (repeatable)")
@click.pass_context
def cli(ctx, debug: bool, verbose: bool, tol) -> None:
    """
    Finite-gap 2D Schrödinger and Dirac operators from singular rational
    spectral curves.

    Commands read a spec document (JSON, or YAML by file extension) and
    emit fields as CSV/JSON or reports as tables/JSON.
    """
    if debug:
        logging.getLogger().setLevel(logging.DEBUG)
    elif verbose:
        logging.getLogger().setLevel(logging.INFO)

    ctx.ensure_object(dict)
    ctx.obj["DEBUG"] = debug
    ctx.obj["TOLERANCE_OVERRIDES"] = parse_tolerance_overrides(tol)
    logger.debug(f"Tolerance overrides: {ctx.obj['TOLERANCE_OVERRIDES']}")


# Add commands
cli.add_command(validate)
cli.add_command(genus)
cli.add_command(schrodinger)
cli.add_command(dirac)
cli.add_command(certify)
cli.add_command(rr)
cli.add_command(oned)
cli.add_command(example_constant)


def main():
    """Entry point for the CLI."""
    try:
        cli(obj={})
    except Exception as e:
        logger.error(f"Error: {str(e)}")
        if "--debug" in sys.argv:
            raise
        sys.exit(EXIT_ERROR)


if __name__ == "__main__":
    main()
