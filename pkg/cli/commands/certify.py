import logging

import click

from cli.output import emit_json, format_value, table
from cli.params import load_spec
from finitegap.services.certificates import (
    CertificateKind,
    CertificateRequest,
    Infeasible,
    assert_consequences,
    find_certificate,
    residue_balance,
)

logger = logging.getLogger(__name__)

KINDS = {kind.value.replace("_", "-"): kind for kind in CertificateKind}


@click.command()
@click.argument("spec", type=click.Path(dir_okay=False))
@click.option("--kind", "-k", required=True, type=click.Choice(sorted(KINDS)), help="Certificate kind")
@click.option("--format", "-f", "fmt", default="text", type=click.Choice(["text", "json"]), help="Output format")
@click.option("--consequences/--no-consequences", default=True, help="Measure the implied symmetry over the grid")
@click.option("--residues", is_flag=True, help="Print the residue balance at the first grid node")
@click.pass_context
def certify(ctx, spec, kind, fmt, consequences, residues):
    """
    Find and verify a certificate differential.

    Exits with status 3 when no certificate exists for the request and
    with status 1 when a measured consequence misses its threshold.
    """
    document, tolerances = load_spec(ctx, spec)
    request = CertificateRequest(document.to_curve(), document.to_divisor(), KINDS[kind])
    result = find_certificate(request, tolerances)

    if isinstance(result, Infeasible):
        if fmt == "json":
            emit_json(result.to_dict())
        else:
            click.echo(f"{kind}: infeasible: {result.reason}")
        ctx.exit(3)

    data = result.to_dict()
    report = None
    if consequences:
        report = assert_consequences(request, result, document.to_grid(), tolerances)
        data["consequences"] = report.to_dict()
    balance = []
    if residues:
        x, y = document.to_grid().nodes()[0]
        balance = residue_balance(request, result, x, y, tolerances)
        data["residue_balance"] = [entry.to_dict() for entry in balance]

    if fmt == "json":
        emit_json(data)
    else:
        _print_certificate(kind, result, report, balance)
    if report is not None and not report.passed:
        ctx.exit(1)


def _print_certificate(kind, result, report, balance):
    f = result.differential.f
    click.echo(f"{kind}: certificate found (solution space dim {result.solution_space_dim})")
    click.echo(f"normalization: {result.report.normalization}")
    click.echo()
    click.echo(table([(f"λ^{k}", c) for k, c in enumerate(f.numerator.coefficients)], ["numerator", "coefficient"]))
    click.echo()
    budget = [("∞" if r is None else format_value(r), m, k) for r, m, k in result.pole_budget()]
    click.echo(table(budget, ["pole", "budget", "order"]))
    click.echo()
    click.echo(table([(c.name, "ok" if c.passed else "FAILED", c.value) for c in result.report.checks], ["check", "status", "value"]))
    if report is not None:
        click.echo()
        rows = [(name, value, report.thresholds.get(name)) for name, value in report.measured.items()]
        click.echo(table(rows, ["consequence", "measured", "threshold"]))
        click.echo(f"consequences: {'passed' if report.passed else 'FAILED'}")
    for entry in balance:
        click.echo()
        click.echo(
            table(
                [("∞₊", entry.plus), ("∞₋", entry.minus)]
                + [(f"D {k}", v) for k, v in entry.divisor.items()]
                + [(f"class {i}", v) for i, v in enumerate(entry.classes)]
                + [("total", entry.total)],
                [entry.product, "residue"],
            )
        )
