import numpy as np
import pytest

from finitegap.analysis.sampling import random_rr_instance, seeded_rng
from finitegap.core.models import CurveSpec, GluingClass, PoleDivisor, arithmetic_genus
from finitegap.services.riemann_roch import (
    function_space_dim,
    function_space_rank,
    numerical_rank,
    omega_dim,
    regular_differential_dim,
    rr_report,
)

NODE = CurveSpec(classes=(GluingClass.of([(1.0, 1), (-1.5 + 0.5j, 1)]),))
QUADRUPLE = CurveSpec(classes=(GluingClass.of([(1.0, 1), (-1.0, 1), (1j, 1), (-1j, 1)]),))
GENERIC_POINTS = [0.5 + 0.7j, -1.8 + 0.3j, 0.2 - 1.6j, 2.3 + 1.1j, -0.7 - 0.9j, 1.4 - 0.4j]


def test_numerical_rank():
    """Test equilibrated rank decisions."""
    assert numerical_rank(np.zeros((0, 3)), 1e-10) == 0
    assert numerical_rank(np.array([[1.0, 2.0], [2.0, 4.0]]), 1e-10) == 1
    assert numerical_rank(np.array([[1e-8, 0.0], [0.0, 1e8]]), 1e-10) == 2


def test_node_generic_divisor():
    """Test dim L(D) = 2 for one node and two generic poles."""
    divisor = PoleDivisor.points(*GENERIC_POINTS[:2])
    assert function_space_dim(NODE, divisor) == 2
    assert omega_dim(NODE, divisor) == 0


def test_trivial_divisor_on_node():
    """Test constants and the single regular differential."""
    report = rr_report(NODE, PoleDivisor())
    assert (report.dim_L, report.dim_Omega, report.identity_residual) == (1, 1, 0)


def test_quadruple_point():
    """Test p_a = 3 and dim L(D) = deg D − 2 for the sphere with a quadruple point."""
    assert arithmetic_genus(QUADRUPLE) == 3
    assert regular_differential_dim(QUADRUPLE) == 3
    for degree in range(3, 7):
        divisor = PoleDivisor.points(*GENERIC_POINTS[:degree])
        report = rr_report(QUADRUPLE, divisor)
        assert report.dim_L == degree - 2
        assert report.identity_residual == 0


@pytest.mark.parametrize("degree", range(0, 5))
def test_no_classes(degree):
    """Test dim L(D) = deg D + 1 on the smooth sphere."""
    divisor = PoleDivisor.points(*GENERIC_POINTS[:degree])
    assert function_space_dim(CurveSpec(), divisor) == degree + 1
    assert regular_differential_dim(CurveSpec()) == 0


def test_marked_points_in_divisor():
    """Test divisors at 0 and ∞ with a cusp."""
    cusp = CurveSpec(classes=(GluingClass.of([(1.5, 2)]),))
    divisor = PoleDivisor.of([(None, 2), (0.0, 1)])
    report = rr_report(cusp, divisor)
    assert report.identity_residual == 0
    assert report.dim_L == 3


def test_divisor_at_infinity():
    """Test D = ∞ on a node, where the regular differential has a double zero at ∞ but not a triple one."""
    report = rr_report(NODE, PoleDivisor.of([(None, 1)]))
    assert report.identity_residual == 0
    assert report.dim_Omega == 0
    assert report.dim_L == 1


def test_function_space_rank():
    """Test that the rank record reports ambient size and rank."""
    record = function_space_rank(QUADRUPLE, PoleDivisor.points(*GENERIC_POINTS[:4]))
    assert record.ambient_size == 5
    assert record.rank == 3
    assert record.dimension == 2


def test_random_suite():
    """Test the identity and regular dimension on fifty seeded instances."""
    rng = seeded_rng(7)
    for _ in range(50):
        instance = random_rr_instance(rng)
        report = rr_report(instance.spec, instance.divisor)
        assert report.identity_residual == 0, instance
        assert report.regular_differentials == arithmetic_genus(instance.spec)


def test_monotonicity():
    """Test that one more pole raises dim L(D) by 0 or 1."""
    rng = seeded_rng(11)
    for _ in range(20):
        instance = random_rr_instance(rng, max_degree=4, min_classes=1)
        extra = complex(*rng.uniform(2.5, 3.5, size=2))
        before = function_space_dim(instance.spec, instance.divisor)
        after = function_space_dim(instance.spec, instance.divisor.plus(extra))
        assert before <= after <= before + 1


def test_report_to_dict():
    """Test the serialized keys."""
    data = rr_report(NODE, PoleDivisor.points(GENERIC_POINTS[0])).to_dict()
    assert data == {
        "deg_D": 1,
        "p_a": 1,
        "dim_L": 1,
        "dim_Omega": 0,
        "regular_differentials": 1,
        "identity_residual": 0,
    }
