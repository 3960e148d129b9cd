import numpy as np
import pytest

from finitegap.core.exceptions import DegeneratePosition, InvalidSpecification, SampleTooClose
from finitegap.services.oned import (
    OneDConfig,
    OneDGluing,
    closed_form_potential,
    potential_1d,
    residual_1d,
    solve_1d_wave,
)

XS = np.linspace(-0.4, 0.4, 9)
SAMPLES = [(0.7 + 0.9j, 0.1), (-1.3 + 0.2j, -0.3), (2.1 - 1.4j, 0.25), (-0.4 - 1.7j, 0.0), (3.2 + 0.5j, 0.4)]


def test_double_point_values():
    """Test a = −p/(px + 1) at known positions."""
    config = OneDConfig.double(1.0)
    assert solve_1d_wave(config, 0.0).a == pytest.approx(-1.0)
    assert solve_1d_wave(config, 1.0).a == pytest.approx(-0.5)
    assert solve_1d_wave(config, 1.0).xi1 == pytest.approx(0.5)


def test_pair_starts_at_minus_p():
    """Test a(0) = −p for the pair gluing."""
    config = OneDConfig.pair(2.0, 1.0)
    assert solve_1d_wave(config, 0.0).a == pytest.approx(-2.0)


@pytest.mark.parametrize(
    "config",
    [OneDConfig.double(1.0), OneDConfig.double(-0.8), OneDConfig.pair(2.0, 1.0), OneDConfig.pair(0.5, 1.0)],
)
def test_closed_forms(config):
    """Test the computed potential against the rational, sinh⁻² and sech² profiles."""
    result = potential_1d(config, XS)
    assert result.ok.all()
    assert np.allclose(result.u, closed_form_potential(config, XS), rtol=1e-10, atol=1e-12)


def test_sech_branch_is_a_well():
    """Test that (p + q)/(p − q) < 0 gives the smooth reflectionless profile."""
    config = OneDConfig.pair(0.5, 1.0)
    xs = np.linspace(-3, 3, 61)
    u = potential_1d(config, xs).u
    assert np.max(np.abs(u.imag)) <= 1e-10
    assert np.all(u.real > 0)
    assert np.max(u.real) <= 2.0 + 1e-12


@pytest.mark.parametrize("config", [OneDConfig.double(1.0), OneDConfig.pair(2.0, 1.0), OneDConfig.pair(0.5, 0.7)])
def test_eigenvalue_equation(config):
    """Test ψ″ + uψ = w²ψ."""
    assert residual_1d(config, SAMPLES) <= 1e-10


def test_perturbed_potential_fails():
    """Test the negative control."""
    assert residual_1d(OneDConfig.pair(2.0, 1.0), SAMPLES, perturbation=1e-3) > 1e-5


def test_samples_near_glued_points_rejected():
    """Test that w must avoid ±q."""
    with pytest.raises(SampleTooClose):
        residual_1d(OneDConfig.pair(2.0, 1.0), [(1.0 + 1e-6, 0.0)])


def test_degenerate_position():
    """Test the double-point singularity at x = −1/p."""
    config = OneDConfig.double(2.0)
    with pytest.raises(DegeneratePosition):
        solve_1d_wave(config, -0.5)
    result = potential_1d(config, [-1.0, -0.5, 0.0])
    assert result.ok.tolist() == [True, False, True]
    assert len(result.errors) == 1
    assert np.isnan(result.u[1])


def test_small_q_limit():
    """Test that the pair gluing tends to the double point as q → 0."""
    double = potential_1d(OneDConfig.double(1.0), XS).u
    pair = potential_1d(OneDConfig.pair(1.0, 1e-4), XS).u
    assert np.allclose(pair, double, rtol=1e-6)


def test_large_p_limit():
    """Test first-order convergence of the double point to −2/x² as p → ∞."""
    xs = np.linspace(0.5, 2.0, 7)
    limit = -2.0 / xs**2
    errors = [float(np.max(np.abs(potential_1d(OneDConfig.double(p), xs).u - limit))) for p in (1e2, 1e3)]
    assert errors[1] <= 0.15 * errors[0]


@pytest.mark.parametrize("p", [1e2, 1e3])
def test_limits_agree(p):
    """Test that the pair with q = 1/p and the double point differ only at second order in 1/p."""
    xs = np.linspace(0.5, 2.0, 7)
    double = potential_1d(OneDConfig.double(p), xs).u
    pair = potential_1d(OneDConfig.pair(p, 1.0 / p), xs).u
    assert np.max(np.abs(pair - double)) <= 1.0 / p**2
    assert np.max(np.abs(pair + 2.0 / xs**2)) <= 40.0 / p


def test_invalid_configurations():
    """Test rejected pole and gluing data."""
    with pytest.raises(InvalidSpecification):
        OneDConfig.double(0.0)
    with pytest.raises(InvalidSpecification):
        OneDConfig.pair(1.0, -1.0)
    with pytest.raises(InvalidSpecification):
        OneDConfig(OneDGluing.DOUBLE, 1.0, 0.5)
    with pytest.raises(InvalidSpecification):
        closed_form_potential(OneDConfig.pair(1.0, 1j), XS)
