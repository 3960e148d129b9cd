import pytest

from finitegap.analysis.validation import SIGMA_OBSTRUCTION, require_admissible, validate
from finitegap.core.exceptions import InvalidSpecification
from finitegap.core.models import CurveSpec, GluingClass, OperatorKind, PoleDivisor


def _codes(report):
    return {issue.code for issue in report.issues}


def test_admissible_node(node_curve):
    """Test that a generic node with one pole is admissible for Schrödinger."""
    report = validate(node_curve, PoleDivisor.points(0.3 + 1.1j), OperatorKind.SCHRODINGER)
    assert report.admissible
    assert report.arithmetic_genus == 1
    assert report.required_degree == 1


def test_wrong_degree(node_curve):
    """Test that the Dirac kind needs one more pole."""
    report = validate(node_curve, PoleDivisor.points(0.3 + 1.1j), OperatorKind.DIRAC)
    assert "divisor_degree" in _codes(report)
    assert not report.structurally_admissible


def test_divisor_on_marked_point_and_support(node_curve):
    """Test divisor points at 0 or on the support."""
    assert "divisor_marked_point" in _codes(validate(node_curve, PoleDivisor.points(0.0)))
    assert "divisor_marked_point" in _codes(validate(node_curve, PoleDivisor.of([(None, 1)])))
    assert "divisor_on_support" in _codes(validate(node_curve, PoleDivisor.points(1.0)))


def test_overlapping_classes():
    """Test that two classes may not share a point."""
    spec = CurveSpec(classes=(GluingClass.of([(1.0, 1), (2.0, 1)]), GluingClass.of([(1.0, 1), (3.0, 1)])))
    report = validate(spec, PoleDivisor.points(5.0, 6.0))
    assert "support_overlap" in _codes(report)


def test_sigma_obstruction():
    """Test that σ with any singular support is rejected but not structurally."""
    spec = CurveSpec(classes=(GluingClass.of([(1.0, 1), (-1.0, 1)]),), sigma_declared=True)
    report = validate(spec, PoleDivisor.points(0.5))
    assert [i.message for i in report.issues] == [SIGMA_OBSTRUCTION]
    assert report.structurally_admissible
    assert not report.admissible


def test_sigma_on_smooth_curve(constant_example):
    """Test that the smooth σ case is admissible."""
    spec, divisor = constant_example(1.0)
    assert validate(spec, divisor, OperatorKind.DIRAC).admissible


def test_tau_conditions(reality_setup):
    """Test the τ hypotheses and their violations."""
    spec, divisor = reality_setup
    assert validate(spec, divisor, OperatorKind.DIRAC).admissible
    broken = PoleDivisor.points(1.3 + 0.4j, 0.5)
    assert "tau_divisor" in _codes(validate(spec, broken, OperatorKind.DIRAC))
    off_circle = CurveSpec(
        alpha=1.0, beta=-1.0, classes=(GluingClass.of([(2.0, 1), (3.0, 1)]),), tau_param=1.0
    )
    assert "tau_support" in _codes(validate(off_circle, divisor, OperatorKind.DIRAC))
    wrong_beta = CurveSpec(alpha=1.0, beta=1.0, tau_param=1.0)
    assert "tau_beta" in _codes(validate(wrong_beta, PoleDivisor.points(1.0), OperatorKind.DIRAC))


def test_require_admissible_raises(node_curve):
    """Test that structural failures raise with the issue codes."""
    with pytest.raises(InvalidSpecification) as excinfo:
        require_admissible(node_curve, PoleDivisor(), OperatorKind.SCHRODINGER)
    assert excinfo.value.details["issues"] == ["divisor_degree"]


def test_report_to_dict(node_curve):
    """Test the serializable form of a report."""
    data = validate(node_curve, PoleDivisor()).to_dict()
    assert data["admissible"] is False
    assert data["issues"][0]["code"] == "divisor_degree"
