import logging

import click

from cli.output import emit_json, table
from cli.params import load_spec
from finitegap.analysis.validation import validate as validate_spec
from finitegap.core.models import OperatorKind, arithmetic_genus, delta_invariant

logger = logging.getLogger(__name__)


@click.command()
@click.argument("spec", type=click.Path(dir_okay=False))
@click.option(
    "--kind", "-k", default="schrodinger", type=click.Choice([k.value for k in OperatorKind]),
    help="Operator whose divisor rules apply",
)
@click.option("--format", "-f", "fmt", default="text", type=click.Choice(["text", "json"]), help="Output format")
@click.pass_context
def validate(ctx, spec, kind, fmt):
    """
    Check a spec document for admissibility.

    Exits with status 1 when any issue is found.
    """
    document, tolerances = load_spec(ctx, spec)
    report = validate_spec(document.to_curve(), document.to_divisor(), OperatorKind(kind), tolerances)
    if fmt == "json":
        emit_json(report.to_dict())
    else:
        click.echo(
            table(
                [
                    ("operator", report.kind.value),
                    ("p_a", report.arithmetic_genus),
                    ("required deg D", report.required_degree),
                    ("deg D", report.divisor_degree),
                ],
                ["quantity", "value"],
            )
        )
        if report.issues:
            click.echo()
            click.echo(table([(i.code, i.message) for i in report.issues], ["issue", "message"]))
        click.echo()
        click.echo("admissible" if report.admissible else "not admissible")
    if not report.admissible:
        ctx.exit(1)


@click.command()
@click.argument("spec", type=click.Path(dir_okay=False))
@click.option("--format", "-f", "fmt", default="text", type=click.Choice(["text", "json"]), help="Output format")
@click.pass_context
def genus(ctx, spec, fmt):
    """Print δ per gluing class and the arithmetic genus."""
    document, _ = load_spec(ctx, spec)
    curve = document.to_curve()
    deltas = [delta_invariant(cls) for cls in curve.classes]
    p_a = arithmetic_genus(curve)
    if fmt == "json":
        emit_json({"classes": [str(cls) for cls in curve.classes], "delta": deltas, "p_a": p_a})
        return
    if curve.classes:
        click.echo(table([(str(cls), cls.degree, d) for cls, d in zip(curve.classes, deltas)], ["class", "degree", "delta"]))
        click.echo()
    click.echo(f"delta: {', '.join(str(d) for d in deltas) or '-'}; p_a = {p_a}")
