import numpy as np
import pytest

from finitegap.analysis.sampling import random_instance, random_points
from finitegap.core.exceptions import InvalidSpecification, NonGenericDivisor
from finitegap.core.models import CurveSpec, GluingClass, OperatorKind, PoleDivisor
from finitegap.services import gluing
from finitegap.services.grid import Grid
from finitegap.services.schrodinger import (
    assemble_gluing_system,
    extract_c,
    operator_residual,
    potential_field,
    potentials,
    solve_wave,
    solve_wave_elementary,
)

LAMBDAS = [0.7 + 0.9j, -1.3 + 0.2j, 2.1 - 1.4j, -0.4 - 1.7j, 3.2 + 0.5j]


def test_trivial_curve_constant_potential(rng):
    """Test u = −αβ and A = 0 on the smooth sphere."""
    for _ in range(5):
        alpha = complex(*rng.uniform(0.5, 1.5, size=2))
        beta = complex(*rng.uniform(-1.5, -0.5, size=2))
        spec = CurveSpec(alpha=alpha, beta=beta)
        x, y = rng.uniform(-1, 1, size=2)
        wave = solve_wave(spec, PoleDivisor(), x, y)
        u, a = potentials(wave)
        assert abs(u + alpha * beta) <= 1e-10
        assert abs(a) <= 1e-10
        assert operator_residual(spec, PoleDivisor(), x, y, LAMBDAS) <= 1e-12


def test_node_wave_satisfies_gluing_and_operator(node_curve):
    """Test descent and the operator identity for one double point."""
    divisor = PoleDivisor.points(0.3 + 1.1j)
    for x, y in [(0.0, 0.0), (0.4, -0.3), (-0.8, 0.6)]:
        wave = solve_wave(node_curve, divisor, x, y)
        assert gluing.descent_residual(wave.core, node_curve.classes, wave.prefactor) <= 1e-10
        assert operator_residual(node_curve, divisor, x, y, LAMBDAS) <= 1e-8


def test_cusp_wave(cusp_curve):
    """Test a class with a multiplicity-two point."""
    divisor = PoleDivisor.points(-0.6 + 0.9j)
    wave = solve_wave(cusp_curve, divisor, 0.2, 0.5)
    assert gluing.descent_residual(wave.core, cusp_curve.classes, wave.prefactor) <= 1e-10
    assert operator_residual(cusp_curve, divisor, 0.2, 0.5, LAMBDAS) <= 1e-8


def test_random_singular_curves(rng, generic_solve):
    """Test descent and the operator identity on 25 seeded random configurations."""
    for _ in range(25):
        instance = random_instance(rng, OperatorKind.SCHRODINGER)
        spec, divisor = instance.spec, instance.divisor
        avoid = [q for q, _ in spec.supports()] + [p for p, _ in divisor.finite_entries()]
        samples = random_points(rng, 100, avoid=avoid, r_min=0.3, r_max=3.0)
        x, y, wave = generic_solve(lambda xx, yy: solve_wave(spec, divisor, xx, yy))
        assert gluing.descent_residual(wave.core, spec.classes, wave.prefactor) <= 1e-10
        assert operator_residual(spec, divisor, x, y, samples) <= 1e-8


def test_random_fd_cross_check(rng, generic_solve):
    """Test analytic gradients of ξ and log c against finite differences on 10 random configurations."""
    for _ in range(10):
        instance = random_instance(rng, OperatorKind.SCHRODINGER)
        spec, divisor = instance.spec, instance.divisor
        x, y, _ = generic_solve(lambda xx, yy: solve_wave(spec, divisor, xx, yy))
        sample = potential_field(spec, divisor, Grid(x, x, y, y, 1, 1), check="fd")
        assert sample.ok.all()
        assert sample.fd_deviation <= 1e-6


def test_perturbed_potential_fails(node_curve):
    """Test that a perturbed u no longer annihilates ψ."""
    divisor = PoleDivisor.points(0.3 + 1.1j)
    assert operator_residual(node_curve, divisor, 0.1, 0.2, LAMBDAS, perturbation=1e-3) > 1e-5


def test_non_generic_divisor():
    """Test that a singular gluing system is reported."""
    spec = CurveSpec(alpha=1.0, beta=-1.0, classes=(GluingClass.of([(1.0, 2)]),))
    with pytest.raises(NonGenericDivisor):
        solve_wave(spec, PoleDivisor.points(0.5), 1.0, 0.0)


def test_inadmissible_divisor_rejected(node_curve):
    """Test that the wrong divisor degree is structural."""
    with pytest.raises(InvalidSpecification):
        solve_wave(node_curve, PoleDivisor.points(0.3, 0.4), 0.0, 0.0)


def test_gluing_system_shape(node_curve):
    """Test the g×g system."""
    matrix, rhs = assemble_gluing_system(node_curve, PoleDivisor.points(0.3 + 1.1j), 0.1, 0.1)
    assert matrix.shape == (1, 1)
    assert rhs.shape == (1,)


def test_elementary_parameterization_agrees(node_curve):
    """Test the affine combination of elementary waves against the monic form."""
    divisor = PoleDivisor.points(0.3 + 1.1j)
    wave = solve_wave(node_curve, divisor, 0.3, -0.2)
    elementary = solve_wave_elementary(node_curve, divisor, 0.3, -0.2)
    for lam in LAMBDAS:
        assert elementary.psi(lam) == pytest.approx(wave.psi(lam), rel=1e-10)


def test_potential_field_with_fd_check(node_curve):
    """Test grid sampling and the finite-difference cross-check."""
    divisor = PoleDivisor.points(0.3 + 1.1j)
    grid = Grid(-0.5, 0.5, -0.5, 0.5, 3, 3)
    sample = potential_field(node_curve, divisor, grid, check="fd")
    assert sample.u.shape == (3, 3)
    assert sample.ok.all()
    assert sample.fd_deviation <= 1e-6
    wave = solve_wave(node_curve, divisor, grid.xs[2], grid.ys[0])
    assert sample.c[2, 0] == pytest.approx(extract_c(wave))
    assert sample.u[2, 0] == pytest.approx(potentials(wave)[0])


def test_potential_field_is_thread_independent(node_curve):
    """Test that worker count does not change the samples."""
    divisor = PoleDivisor.points(0.3 + 1.1j)
    grid = Grid(-0.5, 0.5, -0.5, 0.5, 4, 3)
    serial = potential_field(node_curve, divisor, grid, threads=1)
    pooled = potential_field(node_curve, divisor, grid, threads=3)
    assert np.array_equal(serial.u, pooled.u)
    assert np.array_equal(serial.A, pooled.A)


def test_degeneration_to_cusp():
    """Test first-order convergence of {q, q + ε} to {q·2}."""
    q, p = 1.0, 2.5
    divisor = PoleDivisor.points(p)
    grid = Grid(-0.5, 0.5, -0.5, 0.5, 5, 5)

    def field(classes):
        spec = CurveSpec(alpha=1.0, beta=1.0, classes=classes)
        return potential_field(spec, divisor, grid).u

    cusp = field((GluingClass.of([(q, 2)]),))
    errors = [
        float(np.max(np.abs(field((GluingClass.of([(q, 1), (q + eps, 1)]),)) - cusp)))
        for eps in (1e-3, 1e-4)
    ]
    assert errors[1] <= 0.15 * errors[0]
