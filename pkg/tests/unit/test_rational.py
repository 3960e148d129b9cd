import numpy as np
import pytest

from finitegap.algebra import series
from finitegap.algebra.rational import (
    MARKED_MINUS,
    MARKED_PLUS,
    Poly,
    RationalDifferential,
    RationalFunction,
    derivative,
    evaluate,
    laurent_at_infinity,
    principal_part_in_parameter,
    residue,
    taylor_jet,
)
from finitegap.core.exceptions import (
    DegenerateConfig,
    EvaluationAtPole,
    PoleOrderExceeded,
    UnboundedAtInfinity,
)


def _shifted(c):
    """λ/(λ − c)"""
    return RationalFunction(Poly([0, 1]), [(c, 1)])


def test_poly_trims_and_degree():
    """Test trailing zero trimming and the zero polynomial."""
    assert Poly([1, 2, 0, 0]).degree == 1
    assert Poly([0, 0]).is_zero
    assert Poly([0]).degree == -1
    assert Poly.from_roots([(1.0, 2)]).coefficients.tolist() == [1, -2, 1]


def test_evaluation_and_derivative():
    """Test eval and the quotient-rule derivative of λ/(λ − c)."""
    c = 2.0
    rf = _shifted(c)
    assert evaluate(rf, 0.0) == 0
    d = derivative(rf)
    assert d.poles == ((c, 2),)
    assert complex(d(0.0)) == pytest.approx(-1 / c)
    with pytest.raises(EvaluationAtPole):
        rf(c)


def test_taylor_jet_geometric():
    """Test the jet of 1/(λ − 1) at 0."""
    rf = RationalFunction(Poly([1]), [(1.0, 1)])
    assert np.allclose(taylor_jet(rf, 0.0, 2), [-1, -1])


@pytest.mark.parametrize(
    "rf, expected",
    [
        (RationalFunction(Poly([1, 1]), [(0.0, 1)]), [1, 1]),
        (_shifted(3.0), [1, 3]),
        (RationalFunction.constant(1.0), [1, 0]),
    ],
)
def test_laurent_at_infinity(rf, expected):
    """Test expansions in λ⁻¹ of bounded functions."""
    assert np.allclose(laurent_at_infinity(rf, 2), expected)


def test_laurent_unbounded():
    """Test that λ²/(λ − 1) is rejected at ∞."""
    with pytest.raises(UnboundedAtInfinity):
        RationalFunction(Poly([0, 0, 1]), [(1.0, 1)]).laurent_at_infinity(3)


def test_coincident_roots_rejected():
    """Test that a directly constructed denominator needs distinct roots."""
    with pytest.raises(DegenerateConfig):
        RationalFunction(Poly([1]), [(1.0, 1), (1.0 + 1e-12, 1)])
    merged = RationalFunction.from_parts(Poly([1]), [(1.0, 1), (1.0, 2)])
    assert merged.poles == ((1.0, 3),)


def test_residues():
    """Test residues at finite points and at ∞."""
    c = 1.5
    assert residue(RationalDifferential.from_numerator([1], [(0.0, 1)]), 0.0) == pytest.approx(1)
    omega = RationalDifferential.from_numerator([-(c**2), 0, 1], [(0.0, 2)])
    assert residue(omega, 0.0) == pytest.approx(0)
    assert residue(RationalDifferential.from_numerator([-1], [(0.0, 1)]), None) == pytest.approx(1)
    assert residue(omega, 7.0) == 0


def test_moments():
    """Test Res (λ − 1)ʲ ω for λ dλ/(λ − 1)³ = [(λ − 1)⁻³ + (λ − 1)⁻²] dλ."""
    omega = RationalDifferential.from_numerator([0, 1], [(1.0, 3)])
    assert omega.moment(1.0, 0) == pytest.approx(0, abs=1e-12)
    assert omega.moment(1.0, 1) == pytest.approx(1)
    assert omega.moment(1.0, 2) == pytest.approx(1)
    assert omega.moment(1.0, 3) == 0
    assert omega.moment(2.0, 0) == 0


def test_residue_sum_vanishes(rng):
    """Test the residue theorem on random differentials."""
    for _ in range(20):
        n_poles = int(rng.integers(1, 4))
        poles = [(complex(*rng.normal(size=2)) * 2, int(rng.integers(1, 4))) for _ in range(n_poles)]
        degree = int(rng.integers(0, 6))
        numerator = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
        omega = RationalDifferential.from_numerator(numerator, poles)
        scale = max(abs(omega.residue(r)) for r, _ in poles) + abs(omega.residue(None)) + 1.0
        assert abs(omega.residue_sum()) <= 1e-9 * scale


def test_residue_is_linear():
    """Test residue linearity over a common denominator."""
    poles = [(1.0, 2), (-2.0 + 1j, 1)]
    a = RationalDifferential.from_numerator([1, 2, 3], poles)
    b = RationalDifferential.from_numerator([0, -1, 0, 1], poles)
    combined = RationalDifferential.from_numerator(
        np.polynomial.polynomial.polyadd(2 * a.f.numerator.coefficients, 3j * b.f.numerator.coefficients), poles
    )
    for point in (1.0, -2.0 + 1j, None):
        assert combined.residue(point) == pytest.approx(2 * a.residue(point) + 3j * b.residue(point))


def test_series_agree_with_evaluation():
    """Test truncated Taylor and Laurent series against direct evaluation."""
    rf = RationalFunction(Poly([1, -2, 1j]), [(1.0, 1), (2.0 - 1j, 2)])
    jet = rf.taylor_jet(0.3, 12)
    h = 0.05
    assert np.polyval(jet[::-1], h) == pytest.approx(rf(0.3 + h), rel=1e-10)
    coeffs = rf.laurent_at_infinity(14)
    lam = 40.0 + 10j
    assert np.polyval(coeffs[::-1], 1 / lam) == pytest.approx(rf(lam), rel=1e-12)


def test_derivative_against_finite_differences():
    """Test the derivative against central differences at step 1e-5."""
    rf = RationalFunction(Poly([2, 0, 1, 1]), [(0.5j, 2), (-1.0, 1)])
    d = rf.derivative()
    for lam in (0.7 + 0.2j, -2.0, 1.5 - 1j):
        h = 1e-5
        numeric = (rf(lam + h) - rf(lam - h)) / (2 * h)
        assert complex(d(lam)) == pytest.approx(numeric, rel=1e-7)


def test_pole_and_zero_orders():
    """Test signed orders including the point ∞."""
    c = 2.0
    omega = RationalDifferential.from_numerator([-(c**2), 0, 1], [(0.0, 2)])
    assert omega.pole_order(0.0) == 2
    assert omega.pole_order(None) == 2
    assert omega.zero_order(c) == 1
    assert omega.zero_order(-c) == 1
    prime = RationalDifferential.from_numerator([c**2, -2 * c, 1], [(0.0, 2)])
    assert prime.zero_order(c) == 2
    # dλ/λ³ has a zero of order 1 at ∞
    assert RationalDifferential.from_numerator([1], [(0.0, 3)]).zero_order(None) == 1


def test_principal_parts_of_constant_example():
    """Test the leading terms ∓k² of the certificate differentials."""
    c = 2.0
    omega = RationalDifferential.from_numerator([-(c**2), 0, 1], [(0.0, 2)])
    plus = principal_part_in_parameter(omega, MARKED_PLUS, 1.0, -(c**2), 2)
    minus = principal_part_in_parameter(omega, MARKED_MINUS, 1.0, -(c**2), 2)
    assert plus.leading == pytest.approx(-1)
    assert minus.leading == pytest.approx(1)
    assert plus.residue == pytest.approx(0)
    prime = RationalDifferential.from_numerator([c**2, -2 * c, 1], [(0.0, 2)])
    assert principal_part_in_parameter(prime, MARKED_PLUS, 1.0, -(c**2), 2).leading == pytest.approx(-1)
    with pytest.raises(PoleOrderExceeded):
        principal_part_in_parameter(omega, MARKED_PLUS, 1.0, -(c**2), 1)


def test_reflections():
    """Test σ and τ reflections pointwise."""
    rf = RationalFunction(Poly([1, 2j, -1]), [(0.5 + 0.5j, 1), (2.0, 2)])
    lam = 0.3 - 1.2j
    assert complex(rf.reflect_sigma()(lam)) == pytest.approx(complex(rf(-lam)))
    t = 1.7
    assert complex(rf.reflect_tau(t)(lam)) == pytest.approx(np.conj(complex(rf(t / np.conj(lam)))))


def test_series_helpers():
    """Test exp and shifted powers against closed forms."""
    e = series.exp_series(np.array([0, 1.0]), 6)
    assert np.allclose(e, [1, 1, 1 / 2, 1 / 6, 1 / 24, 1 / 120])
    assert np.allclose(series.shifted_power(2.0, -1, 3), [0.5, -0.25, 0.125])
    assert np.allclose(series.shifted_power(2.0, 2, 4), [4, 4, 1, 0])
