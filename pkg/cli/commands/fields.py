import logging
from typing import List

import click
import numpy as np

from cli.output import field_frame, metadata, write_frames
from cli.params import load_spec
from finitegap.analysis.sampling import random_points, seeded_rng
from finitegap.core.exceptions import FiniteGapError
from finitegap.core.models import CurveSpec, PoleDivisor, arithmetic_genus
from finitegap.services.dirac import dirac_potential_field, dirac_residual
from finitegap.services.schrodinger import operator_residual, potential_field

logger = logging.getLogger(__name__)


def _residual_samples(spec: CurveSpec, divisor: PoleDivisor, seed: int, count: int) -> List[complex]:
    avoid = [q for q, _ in spec.supports()] + [p for p, _ in divisor.finite_entries()]
    return random_points(seeded_rng(seed), count, avoid=avoid, r_min=0.2, r_max=3.0)


def _max_residual(fn, ok: np.ndarray, nodes) -> float:
    worst = 0.0
    for flag, (x, y) in zip(ok.ravel(), nodes):
        if not flag:
            continue
        try:
            worst = max(worst, fn(x, y))
        except FiniteGapError as e:
            logger.warning(f"Residual skipped at ({x:g}, {y:g}): {e.message}")
    return worst


def _field_options(command):
    command = click.option("--samples", default=8, show_default=True, help="λ samples per node for the residual")(command)
    command = click.option("--check", type=click.Choice(["fd"]), help="Cross-check derivatives by finite differences")(command)
    command = click.option("--output-dir", "-o", type=click.Path(file_okay=False), help="Directory for field files")(command)
    command = click.option(
        "--format", "-f", "fmt", default="csv", type=click.Choice(["csv", "json"]), help="Output format"
    )(command)
    return click.argument("spec", type=click.Path(dir_okay=False))(command)


@click.command()
@_field_options
@click.pass_context
def schrodinger(ctx, spec, fmt, output_dir, check, samples):
    """
    Emit the u, A, ξ and c fields of the Schrödinger operator and the
    largest operator residual over the grid.
    """
    document, tolerances = load_spec(ctx, spec)
    curve, divisor, grid = document.to_curve(), document.to_divisor(), document.to_grid()
    sample = potential_field(curve, divisor, grid, check=check, tolerances=tolerances)
    lams = _residual_samples(curve, divisor, document.seed, samples)
    residual = _max_residual(
        lambda x, y: operator_residual(curve, divisor, x, y, lams, tolerances), sample.ok, grid.nodes()
    )
    extra = {"max_operator_residual": residual, "failed_nodes": int(np.sum(~sample.ok))}
    if sample.fd_deviation is not None:
        extra["fd_deviation"] = sample.fd_deviation
    meta = metadata(document.spec_hash, arithmetic_genus(curve), tolerances, operator="schrodinger")
    frames = {name: field_frame(grid, values, sample.ok) for name, values in sample.fields.items()}
    write_frames(frames, meta, fmt, output_dir, extra)
    if residual > tolerances.residual:
        logger.warning(f"Operator residual {residual:.3e} exceeds {tolerances.residual:g}")


@click.command()
@_field_options
@click.pass_context
def dirac(ctx, spec, fmt, output_dir, check, samples):
    """
    Emit the U and V fields (with the ξ₁⁺, ξ₂⁻ diagnostics) of the Dirac
    operator and the largest Dirac residual over the grid.
    """
    document, tolerances = load_spec(ctx, spec)
    curve, divisor, grid = document.to_curve(), document.to_divisor(), document.to_grid()
    sample = dirac_potential_field(curve, divisor, grid, check=check, tolerances=tolerances)
    lams = _residual_samples(curve, divisor, document.seed, samples)
    residual = _max_residual(
        lambda x, y: dirac_residual(curve, divisor, x, y, lams, tolerances), sample.ok, grid.nodes()
    )
    extra = {"max_dirac_residual": residual, "failed_nodes": int(np.sum(~sample.ok))}
    if sample.fd_deviation is not None:
        extra["fd_deviation"] = sample.fd_deviation
    meta = metadata(document.spec_hash, arithmetic_genus(curve), tolerances, operator="dirac")
    frames = {name: field_frame(grid, values, sample.ok) for name, values in sample.fields.items()}
    write_frames(frames, meta, fmt, output_dir, extra)
    if residual > tolerances.residual:
        logger.warning(f"Dirac residual {residual:.3e} exceeds {tolerances.residual:g}")
