import hashlib
import json
import logging

import click
import numpy as np

from cli.output import metadata, series_frame, write_frames
from cli.params import COMPLEX
from finitegap.analysis.sampling import seeded_rng
from finitegap.core.config import resolve_tolerances
from finitegap.core.exceptions import DegeneratePosition, InvalidSpecification
from finitegap.services.oned import OneDConfig, OneDGluing, potential_1d, residual_1d

logger = logging.getLogger(__name__)


@click.command()
@click.argument("gluing", type=click.Choice([g.value for g in OneDGluing]))
@click.option("--p", "p", required=True, type=COMPLEX, help="Pole of the prefactor")
@click.option("--q", "q", type=COMPLEX, help="Glued pair ±q (pair gluing only)")
@click.option("--x-min", default=-3.0, show_default=True)
@click.option("--x-max", default=3.0, show_default=True)
# spacing 6/59 keeps the default grid off simple fractions such as x = −1/p
@click.option("--n", "n", default=60, show_default=True, help="Number of x samples")
@click.option("--samples", default=16, show_default=True, help="Random (w, x) samples for the residual")
@click.option("--seed", default=0, show_default=True)
@click.option("--format", "-f", "fmt", default="csv", type=click.Choice(["csv", "json"]), help="Output format")
@click.option("--output-dir", "-o", type=click.Path(file_okay=False), help="Directory for field files")
@click.pass_context
def oned(ctx, gluing, p, q, x_min, x_max, n, samples, seed, fmt, output_dir):
    """
    One-dimensional degenerations: emit u(x) for a double point at w = 0
    or a glued pair ±q, and the residual of ψ″ + uψ = w²ψ.
    """
    tolerances = resolve_tolerances().merged(ctx.obj.get("TOLERANCE_OVERRIDES"))
    if n < 1:
        raise InvalidSpecification("--n must be positive", {"field": "n"})
    config = OneDConfig(gluing, p, q)
    xs = np.linspace(x_min, x_max, n)
    profile = potential_1d(config, xs)

    rng = seeded_rng(seed)
    forbidden = [0j, config.p] + config.glued_points
    pairs = []
    while len(pairs) < samples:
        w = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if any(abs(w - f) < 0.1 for f in forbidden):
            continue
        pairs.append((w, float(rng.choice(xs[profile.ok])) if profile.ok.any() else 0.0))
    try:
        residual = residual_1d(config, pairs, tolerances)
    except DegeneratePosition:
        residual = float("nan")

    canonical = json.dumps({"gluing": gluing, "p": [p.real, p.imag], "q": None if q is None else [q.real, q.imag]}, sort_keys=True)
    spec_hash = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
    # both gluings have δ = 1
    meta = metadata(spec_hash, 1, tolerances, gluing=gluing, p=str(p), q=str(q))
    frames = {"u": series_frame(xs, profile.u, profile.ok), "xi1": series_frame(xs, profile.xi1, profile.ok)}
    write_frames(frames, meta, fmt, output_dir, {"residual": residual, "degenerate_positions": len(profile.errors)})
