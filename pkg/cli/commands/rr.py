import logging

import click

from cli.output import emit_json, table
from cli.params import load_spec, parse_divisor
from finitegap.analysis.sampling import random_rr_instance, seeded_rng
from finitegap.core.config import resolve_tolerances
from finitegap.services.riemann_roch import rr_report

logger = logging.getLogger(__name__)

COLUMNS = ["deg_D", "p_a", "dim_L", "dim_Omega", "regular_differentials", "identity_residual"]


@click.command()
@click.argument("spec", required=False, type=click.Path(dir_okay=False))
@click.option("--divisor", "-d", help='Divisor overriding the document poles, e.g. "0.5, 1+2i:2, inf"')
@click.option("--random", "-r", "count", type=int, help="Report on N seeded random configurations instead")
@click.option("--seed", "-s", type=int, help="Seed for --random (defaults to the document seed, else 0)")
@click.option("--format", "-f", "fmt", default="text", type=click.Choice(["text", "json"]), help="Output format")
@click.pass_context
def rr(ctx, spec, divisor, count, seed, fmt):
    """
    Print the Riemann–Roch report: dim L(D), dim Ω′(D) and the residual of
    dim L − dim Ω′ = deg D + 1 − p_a.
    """
    overrides = ctx.obj.get("TOLERANCE_OVERRIDES")
    records = []
    if count is not None:
        tolerances = resolve_tolerances().merged(overrides)
        if spec:
            document, tolerances = load_spec(ctx, spec)
            seed = document.seed if seed is None else seed
        rng = seeded_rng(0 if seed is None else seed)
        for _ in range(count):
            instance = random_rr_instance(rng)
            report = rr_report(instance.spec, instance.divisor, tolerances)
            records.append({"curve": " ".join(str(c) for c in instance.spec.classes) or "-", "D": str(instance.divisor), **report.to_dict()})
    else:
        if not spec:
            raise click.UsageError("A spec document is required unless --random is given")
        document, tolerances = load_spec(ctx, spec)
        target = parse_divisor(divisor) if divisor else document.to_divisor()
        report = rr_report(document.to_curve(), target, tolerances)
        records.append({"curve": " ".join(str(c) for c in document.to_curve().classes) or "-", "D": str(target), **report.to_dict()})

    if fmt == "json":
        emit_json(records if count is not None else records[0])
        return
    click.echo(table([[r["curve"], r["D"]] + [r[c] for c in COLUMNS] for r in records], ["curve", "D"] + COLUMNS))
    failures = sum(1 for r in records if r["identity_residual"] != 0)
    if count is not None:
        click.echo()
        click.echo(f"{count} instances, {failures} with nonzero residual")
