"""
Admissibility checks for a curve spec together with a pole divisor.

`validate` reports every violated condition and never raises;
`require_admissible` is the solver-side guard built on it.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from finitegap.core.config import Tolerances, resolve_tolerances
from finitegap.core.exceptions import InvalidSpecification
from finitegap.core.models import (
    CurveSpec,
    OperatorKind,
    PoleDivisor,
    arithmetic_genus,
    required_divisor_degree,
    tau_image,
)

logger = logging.getLogger(__name__)

SIGMA_OBSTRUCTION = "σ-fixed singular support impossible at genus 0"


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str
    # Structural issues block the wave solvers; symmetry issues only block certificates
    structural: bool = True
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ValidationReport:
    kind: OperatorKind
    arithmetic_genus: int
    required_degree: int
    divisor_degree: int
    issues: List[ValidationIssue] = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return not self.issues

    @property
    def structurally_admissible(self) -> bool:
        return not any(issue.structural for issue in self.issues)

    def add(self, code: str, message: str, structural: bool = True, **details: Any) -> None:
        self.issues.append(ValidationIssue(code, message, structural, details))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "admissible": self.admissible,
            "arithmetic_genus": self.arithmetic_genus,
            "required_degree": self.required_degree,
            "divisor_degree": self.divisor_degree,
            "issues": [
                {"code": i.code, "message": i.message, "structural": i.structural, **i.details}
                for i in self.issues
            ],
        }


def _multiset_equal(left: List, right: List, rtol: float) -> bool:
    """Compare lists of (ProjPoint, multiplicity) as multisets within tolerance."""
    remaining = list(right)
    for point, mult in left:
        for i, (other, other_mult) in enumerate(remaining):
            if other_mult == mult and point.coincides(other, rtol):
                del remaining[i]
                break
        else:
            return False
    return not remaining


def validate(
    spec: CurveSpec,
    divisor: PoleDivisor,
    kind: OperatorKind = OperatorKind.SCHRODINGER,
    tolerances: Optional[Tolerances] = None,
) -> ValidationReport:
    """
    Check the hypotheses under which the wave function exists.

    Args:
        spec: curve specification
        divisor: divisor of allowed poles
        kind: operator family fixing the required divisor degree
        tolerances: coincidence tolerance source

    Returns:
        Report listing every violated condition; empty means admissible
    """
    tolerances = resolve_tolerances(tolerances)
    rtol = tolerances.coincidence
    kind = OperatorKind(kind)
    report = ValidationReport(
        kind=kind,
        arithmetic_genus=arithmetic_genus(spec),
        required_degree=required_divisor_degree(spec, kind),
        divisor_degree=divisor.degree,
    )

    if divisor.degree != report.required_degree:
        report.add(
            "divisor_degree",
            f"Divisor degree {divisor.degree} differs from required {report.required_degree}",
            expected=report.required_degree,
            actual=divisor.degree,
        )

    for entry in divisor:
        if entry.point.is_infinity or entry.point.is_zero:
            report.add("divisor_marked_point", f"Divisor point {entry.point} is a marked point", point=str(entry.point))

    supports = [(i, m.point) for i, cls in enumerate(spec.classes) for m in cls.members]
    for a in range(len(supports)):
        for b in range(a + 1, len(supports)):
            (i, p), (j, q) = supports[a], supports[b]
            if p.coincides(q, rtol):
                code = "support_overlap" if i != j else "coincident_points"
                report.add(code, f"Support points {p} and {q} coincide", classes=[i, j])

    for entry in divisor:
        for i, point in supports:
            if entry.point.coincides(point, rtol):
                report.add("divisor_on_support", f"Divisor point {entry.point} lies on class {i}", point=str(point))

    entries = list(divisor)
    for a in range(len(entries)):
        for b in range(a + 1, len(entries)):
            if entries[a].point.coincides(entries[b].point, rtol):
                report.add("coincident_points", f"Divisor points {entries[a].point} and {entries[b].point} coincide")

    if spec.sigma_declared and spec.classes:
        report.add("sigma_fixed_support", SIGMA_OBSTRUCTION, structural=False)

    if spec.tau_param is not None:
        t = spec.tau_param
        expected_beta = -spec.alpha.conjugate() * t
        if abs(spec.beta - expected_beta) > rtol * max(abs(spec.beta), abs(expected_beta), 1.0):
            report.add(
                "tau_beta",
                "τ requires β = −ᾱ·t",
                structural=False,
                expected=str(expected_beta),
                actual=str(spec.beta),
            )
        for i, point in supports:
            value = point.coordinate()
            if abs(abs(value) ** 2 - t) > rtol * max(abs(t), 1.0):
                report.add(
                    "tau_support",
                    f"Support point {point} is not on the τ-fixed circle |λ|² = {t:g}",
                    structural=False,
                    point=str(point),
                )
        original = [(e.point, e.multiplicity) for e in divisor]
        image = [(tau_image(spec, e.point), e.multiplicity) for e in divisor]
        if not _multiset_equal(original, image, rtol):
            report.add("tau_divisor", "Divisor is not τ-invariant", structural=False)

    for issue in report.issues:
        logger.info(f"Validation issue [{issue.code}]: {issue.message}")
    return report


def require_admissible(
    spec: CurveSpec,
    divisor: PoleDivisor,
    kind: OperatorKind,
    tolerances: Optional[Tolerances] = None,
) -> ValidationReport:
    """
    Raises:
        InvalidSpecification: a structural condition fails
    """
    report = validate(spec, divisor, kind, tolerances)
    if not report.structurally_admissible:
        issues = [i for i in report.issues if i.structural]
        raise InvalidSpecification(
            "; ".join(i.message for i in issues),
            {"issues": [i.code for i in issues]},
        )
    return report
