import logging

import click
import numpy as np

from cli.output import emit_json, table
from finitegap.core.config import resolve_tolerances
from finitegap.core.exceptions import InvalidSpecification
from finitegap.core.models import CurveSpec, PoleDivisor
from finitegap.services.certificates import (
    Certificate,
    CertificateKind,
    CertificateRequest,
    assert_consequences,
    find_certificate,
)
from finitegap.services.dirac import dirac_potential_field, solve_dirac_wave
from finitegap.services.grid import Grid

logger = logging.getLogger(__name__)

CONSTANT_TOL = 1e-10


def constant_example(c: float):
    """
    The smooth curve with α = 1, β = −c², D = {c}: both σ and τ (t = c²)
    are declared, and the potentials are U = V = c.
    """
    if c == 0:
        raise InvalidSpecification("--c must be nonzero", {"field": "c"})
    spec = CurveSpec(alpha=1.0, beta=-(c**2), sigma_declared=True, tau_param=c**2)
    return spec, PoleDivisor.points(c)


def _closed_form_deviation(spec: CurveSpec, divisor: PoleDivisor, c: float, seed: int, count: int, tolerances) -> float:
    """ψ = (λ/(λ − c), c/(c − λ))·exp(λz − (c²/λ)z̄) at seeded random (λ, x, y)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    while checked < count:
        lam = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if abs(lam) < 0.1 or abs(lam - c) < 0.1:
            continue
        x, y = rng.uniform(-1, 1, size=2)
        wave = solve_dirac_wave(spec, divisor, x, y, tolerances)
        z = complex(x, y)
        e = np.exp(lam * z - c**2 / lam * z.conjugate())
        expected = (lam / (lam - c) * e, c / (c - lam) * e)
        for got, want in zip(wave.psi(lam), expected):
            worst = max(worst, abs(got - want) / max(abs(want), np.finfo(float).tiny))
        checked += 1
    return worst


@click.command(name="example-constant")
@click.option("--c", "c", required=True, type=float, help="The real nonzero constant potential")
@click.option("--nx", default=21, show_default=True)
@click.option("--ny", default=21, show_default=True)
@click.option("--samples", default=50, show_default=True, help="Random (λ, x, y) samples for the closed form")
@click.option("--seed", default=0, show_default=True)
@click.option("--format", "-f", "fmt", default="text", type=click.Choice(["text", "json"]), help="Output format")
@click.pass_context
def example_constant(ctx, c, nx, ny, samples, seed, fmt):
    """
    Run the constant-potential example end to end: solve, extract U and V,
    compare ψ with its closed form and certify both σ and τ.

    Exits with status 1 when any check fails.
    """
    tolerances = resolve_tolerances().merged(ctx.obj.get("TOLERANCE_OVERRIDES"))
    spec, divisor = constant_example(c)
    grid = Grid(nx=nx, ny=ny)

    sample = dirac_potential_field(spec, divisor, grid, tolerances=tolerances)
    u_error = float(np.max(np.abs(sample.U - c))) if sample.ok.all() else float("inf")
    v_error = float(np.max(np.abs(sample.V - c))) if sample.ok.all() else float("inf")
    psi_error = _closed_form_deviation(spec, divisor, c, seed, samples, tolerances)

    checks = [
        ("max |U - c|", u_error, u_error <= CONSTANT_TOL),
        ("max |V - c|", v_error, v_error <= CONSTANT_TOL),
        ("psi closed form", psi_error, psi_error <= CONSTANT_TOL),
    ]
    certificates = {}
    for kind in (CertificateKind.DIRAC_SIGMA, CertificateKind.DIRAC_TAU):
        request = CertificateRequest(spec, divisor, kind)
        result = find_certificate(request, tolerances)
        if not isinstance(result, Certificate):
            checks.append((f"{kind.value} certificate", result.reason, False))
            continue
        certificates[kind.value] = result.to_dict()
        consequences = assert_consequences(request, result, grid, tolerances)
        checks.append((f"{kind.value} certificate", "verified", result.report.passed))
        for name, value in consequences.measured.items():
            checks.append((f"{kind.value} {name}", value, value <= consequences.thresholds[name]))

    passed = all(ok for _, _, ok in checks)
    if fmt == "json":
        emit_json(
            {
                "c": c,
                "passed": passed,
                "checks": [{"name": n, "value": v, "passed": ok} for n, v, ok in checks],
                "certificates": certificates,
            }
        )
    else:
        click.echo(table([(n, v, "pass" if ok else "FAIL") for n, v, ok in checks], ["check", "value", "status"]))
        click.echo()
        click.echo(f"U = V = {c:g}: {'PASS' if passed else 'FAIL'}")
    if not passed:
        ctx.exit(1)
