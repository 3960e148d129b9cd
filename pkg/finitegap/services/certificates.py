"""
Symmetry certificates: rational differentials whose residue bookkeeping
forces A ≡ 0 (schrodinger_sigma), U = V (dirac_sigma) or real potentials
(dirac_tau).

The ansatz is ω = N(λ) / (λ^s ∏_Q (λ − q)^{2n_Q}) dλ with s = 1 and
deg N ≤ S for schrodinger_sigma, s = 2 and deg N ≤ S + 2 for the Dirac
kinds, where S = Σ 2n_Q. Every condition is linear in the coefficients of
N, so finding a certificate is a constrained least-squares problem whose
feasibility is decided by ranks.

The products the symmetry arguments integrate, such as ψ₁(λ)·conj ψ₁(τλ),
descend to the glued curve: at a class they take one common value and
their λ-jets of orders 1 … n−1 vanish at a member of multiplicity n.
Pairing ω against every such local function must give a zero residue sum
over the class. Within the pole budget this is the class residue sum
together with Res_q (λ − q)ʲ ω = 0 for n ≤ j < 2n at every member.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as spla

from finitegap.algebra import series
from finitegap.algebra.rational import (
    MARKED_MINUS,
    MARKED_PLUS,
    Poly,
    RationalDifferential,
    RationalFunction,
    principal_part_in_parameter,
)
from finitegap.analysis.validation import SIGMA_OBSTRUCTION, validate
from finitegap.core.config import Tolerances, resolve_tolerances
from finitegap.core.exceptions import InvalidRequest, PoleOrderExceeded
from finitegap.core.models import CurveSpec, OperatorKind, PoleDivisor, sigma_image, tau_image
from finitegap.services.dirac import dirac_potential_field, solve_dirac_wave
from finitegap.services.grid import Grid
from finitegap.services.schrodinger import potential_field, solve_wave

logger = logging.getLogger(__name__)


class CertificateKind(str, enum.Enum):
    SCHRODINGER_SIGMA = "schrodinger_sigma"
    DIRAC_SIGMA = "dirac_sigma"
    DIRAC_TAU = "dirac_tau"

    @property
    def operator(self) -> OperatorKind:
        return OperatorKind.SCHRODINGER if self is CertificateKind.SCHRODINGER_SIGMA else OperatorKind.DIRAC

    @property
    def uses_sigma(self) -> bool:
        return self is not CertificateKind.DIRAC_TAU

    @property
    def marked_order(self) -> int:
        """Pole order of ω at both marked points."""
        return 1 if self is CertificateKind.SCHRODINGER_SIGMA else 2


@dataclass(frozen=True)
class CertificateRequest:
    spec: CurveSpec
    divisor: PoleDivisor
    kind: CertificateKind

    def __post_init__(self):
        object.__setattr__(self, "kind", CertificateKind(self.kind))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: Any = None
    detail: str = ""


@dataclass
class VerificationReport:
    kind: CertificateKind
    checks: List[CheckResult] = field(default_factory=list)
    surplus_zeros: List[complex] = field(default_factory=list)
    normalization: str = ""

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, passed: bool, value: Any = None, detail: str = "") -> None:
        self.checks.append(CheckResult(name, bool(passed), value, detail))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "passed": self.passed,
            "normalization": self.normalization,
            "checks": [
                {"name": c.name, "passed": c.passed, "value": _jsonable(c.value), "detail": c.detail}
                for c in self.checks
            ],
            "surplus_zeros": [_jsonable(z) for z in self.surplus_zeros],
        }


@dataclass(frozen=True, eq=False)
class Certificate:
    kind: CertificateKind
    differential: RationalDifferential
    report: VerificationReport
    solution_space_dim: int

    def pole_budget(self, rtol: float = 1e-9) -> List[Tuple[Optional[complex], int, int]]:
        """(point, allowed order, actual order) at ∞, 0 and every support point; None is ∞."""
        omega = self.differential
        budget = [(None, self.kind.marked_order, omega.pole_order(None, rtol))]
        budget.extend((r, m, omega.pole_order(r, rtol)) for r, m in omega.f.poles)
        return budget

    def to_dict(self) -> Dict[str, Any]:
        f = self.differential.f
        return {
            "kind": self.kind.value,
            "numerator": [_jsonable(c) for c in f.numerator.coefficients],
            "poles": [{"lambda": _jsonable(r), "order": m} for r, m in f.poles],
            "pole_budget": [
                {"lambda": "inf" if r is None else _jsonable(r), "budget": m, "order": k}
                for r, m, k in self.pole_budget()
            ],
            "solution_space_dim": self.solution_space_dim,
            "verification": self.report.to_dict(),
        }


@dataclass(frozen=True)
class Infeasible:
    kind: CertificateKind
    reason: str
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "feasible": False, "reason": self.reason, **self.details}


def _jsonable(value: Any) -> Any:
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _merge(points: Sequence[Tuple[complex, int]], rtol: float) -> List[Tuple[complex, int]]:
    merged: List[List] = []
    for value, mult in points:
        for entry in merged:
            if abs(entry[0] - value) <= rtol * max(abs(entry[0]), abs(value), 1.0):
                entry[1] += mult
                break
        else:
            merged.append([complex(value), mult])
    return [(v, m) for v, m in merged]


def required_zeros(req: CertificateRequest, rtol: float) -> List[Tuple[complex, int]]:
    """D + σ(D) or D + τ(D) with coincident points merged."""
    images = []
    for entry in req.divisor:
        image = sigma_image(entry.point) if req.kind.uses_sigma else tau_image(req.spec, entry.point)
        images.append((image.coordinate(), entry.multiplicity))
    return _merge(req.divisor.finite_entries() + images, rtol)


def _ansatz_poles(req: CertificateRequest) -> Tuple[Tuple[Tuple[complex, int], ...], int]:
    s = req.kind.marked_order
    supports = [(q, 2 * n) for q, n in req.spec.supports()]
    budget = sum(m for _, m in supports)
    degree = budget if req.kind is CertificateKind.SCHRODINGER_SIGMA else budget + 2
    return tuple([(0j, s)] + supports), degree


def _check_request(req: CertificateRequest, tolerances: Tolerances) -> Optional[Infeasible]:
    """
    Raises:
        InvalidRequest: the request misuses its kind or fails a hypothesis
    """
    kind = req.kind
    report = validate(req.spec, req.divisor, kind.operator, tolerances)
    structural = [i for i in report.issues if i.structural]
    if structural:
        raise InvalidRequest(
            "; ".join(i.message for i in structural), {"issues": [i.code for i in structural]}
        )
    if kind.uses_sigma:
        if not req.spec.sigma_declared:
            raise InvalidRequest(f"{kind.value} requires a spec with sigma declared")
        if req.spec.classes:
            return Infeasible(kind, SIGMA_OBSTRUCTION, {"classes": len(req.spec.classes)})
    else:
        if req.spec.tau_param is None:
            raise InvalidRequest("dirac_tau requires tau_param")
        tau_issues = [i for i in report.issues if i.code.startswith("tau_")]
        if tau_issues:
            raise InvalidRequest(
                "; ".join(i.message for i in tau_issues), {"issues": [i.code for i in tau_issues]}
            )
    return None


def _constraint_rows(req: CertificateRequest, basis: List[RationalDifferential], degree: int, rtol: float):
    """Homogeneous rows plus the normalization row and its right-hand side."""
    spec = req.spec
    rows: List[np.ndarray] = []
    for z, m in required_zeros(req, rtol):
        jets = np.array([series.shifted_power(z, k, m) for k in range(degree + 1)])
        rows.extend(jets.T)
    for cls in spec.classes:
        rows.append(np.array([sum(w.residue(m.point) for m in cls.members) for w in basis]))
        for member in cls.members:
            q, n = member.point.coordinate(), member.multiplicity
            rows.extend(np.array([w.moment(q, j) for w in basis]) for j in range(n, 2 * n))
    kind = req.kind
    if kind is CertificateKind.SCHRODINGER_SIGMA:
        plus = np.array([w.residue(None) for w in basis])
        minus = np.array([w.residue(0.0) for w in basis])
        rows.append(plus + minus)
        return np.array(rows), plus, 1.0
    plus = np.array([_lead(w, MARKED_PLUS, spec) for w in basis])
    minus = np.array([_lead(w, MARKED_MINUS, spec) for w in basis])
    rows.append(plus + minus if kind is CertificateKind.DIRAC_SIGMA else plus - minus)
    return np.array(rows), plus, -1.0


def _lead(omega: RationalDifferential, which: str, spec: CurveSpec) -> complex:
    return principal_part_in_parameter(omega, which, spec.alpha, spec.beta, 2).leading


def _rank(matrix: np.ndarray, rtol: float) -> int:
    if matrix.size == 0:
        return 0
    singular_values = spla.svdvals(matrix)
    if singular_values[0] == 0:
        return 0
    return int(np.sum(singular_values > rtol * singular_values[0]))


def _equilibrate(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1)
    keep = norms > 0
    return matrix[keep] / norms[keep][:, None]


def find_certificate(
    req: CertificateRequest, tolerances: Optional[Tolerances] = None
) -> Union[Certificate, Infeasible]:
    """
    Solve the certificate constraints for the request.

    Returns:
        A verified Certificate, or Infeasible when the normalization
        functional vanishes on the whole homogeneous solution space

    Raises:
        InvalidRequest: structural misuse of the request kind
    """
    tolerances = resolve_tolerances(tolerances)
    infeasible = _check_request(req, tolerances)
    if infeasible is not None:
        logger.info(f"{req.kind.value}: {infeasible.reason}")
        return infeasible

    poles, degree = _ansatz_poles(req)
    basis = [RationalDifferential(RationalFunction(Poly.monomial(k), poles)) for k in range(degree + 1)]
    homogeneous, normalizer, target = _constraint_rows(req, basis, degree, tolerances.coincidence)
    scaled = _equilibrate(homogeneous)
    rank_h = _rank(scaled, tolerances.rank)
    null_dim = degree + 1 - rank_h
    norm_row = normalizer / np.linalg.norm(normalizer) if np.any(normalizer) else normalizer
    rank_full = _rank(np.vstack([scaled, norm_row[None, :]]), tolerances.rank)
    logger.debug(f"{req.kind.value}: {degree + 1} unknowns, rank {rank_h}, null space {null_dim}")
    if null_dim == 0 or rank_full == rank_h:
        return Infeasible(
            req.kind,
            "no differential satisfies the constraints with a nonzero normalization",
            {"unknowns": degree + 1, "rank": rank_h, "solution_space_dim": null_dim},
        )

    system = np.vstack([homogeneous, normalizer[None, :]])
    rhs = np.zeros(system.shape[0], dtype=complex)
    rhs[-1] = target
    row_norms = np.linalg.norm(system, axis=1)
    row_norms[row_norms == 0] = 1.0
    coefficients, *_ = spla.lstsq(system / row_norms[:, None], rhs / row_norms)
    omega = RationalDifferential(RationalFunction(Poly(coefficients), poles))
    report = verify_certificate(omega, req, tolerances)
    report.normalization = "Res_∞₊ ω = 1" if req.kind is CertificateKind.SCHRODINGER_SIGMA else "lead_∞₊ ω = −1"
    if report.surplus_zeros:
        logger.info(f"{req.kind.value}: certificate has surplus zeros {report.surplus_zeros}")
    if not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        return Infeasible(req.kind, "solution failed verification", {"failed_checks": failed})
    return Certificate(req.kind, omega, report, null_dim)


def verify_certificate(
    certificate: Union[Certificate, RationalDifferential],
    req: CertificateRequest,
    tolerances: Optional[Tolerances] = None,
) -> VerificationReport:
    """
    Recompute every certificate condition from scratch; never raises.

    All conditions are homogeneous or ratio conditions, so any nonzero
    multiple of a certificate passes as well.
    """
    tolerances = resolve_tolerances(tolerances)
    omega = certificate.differential if isinstance(certificate, Certificate) else certificate
    kind = CertificateKind(req.kind)
    spec = req.spec
    tol = tolerances.zero_check
    report = VerificationReport(kind)
    order = kind.marked_order

    report.add("pole_order_plus", omega.pole_order(None, tol) == order, omega.pole_order(None, tol))
    report.add("pole_order_minus", omega.pole_order(0.0, tol) == order, omega.pole_order(0.0, tol))

    if kind is CertificateKind.SCHRODINGER_SIGMA:
        res_plus, res_minus = omega.residue(None), omega.residue(0.0)
        ratio_ok = res_plus != 0 and abs(res_minus / res_plus + 1.0) <= tol
        report.add("marked_residues", ratio_ok, [res_plus, res_minus], "Res∞₋ = −Res∞₊ ≠ 0")
    else:
        try:
            lead_plus = _lead(omega, MARKED_PLUS, spec)
            lead_minus = _lead(omega, MARKED_MINUS, spec)
        except PoleOrderExceeded as e:
            report.add("principal_parts", False, None, e.message)
        else:
            sign = -1.0 if kind is CertificateKind.DIRAC_SIGMA else 1.0
            ratio_ok = lead_plus != 0 and abs(lead_minus / lead_plus - sign) <= tol
            report.add("principal_parts", ratio_ok, [lead_plus, lead_minus], f"lead∞₋ = {sign:+g}·lead∞₊ ≠ 0")

    support_orders = []
    for q, n in spec.supports():
        support_orders.append(omega.pole_order(q, tol) <= 2 * n)
    report.add("support_pole_orders", all(support_orders), len(support_orders))

    allowed = [0j] + [q for q, _ in spec.supports()]
    stray = [
        r for r, _ in omega.f.poles
        if not any(abs(r - a) <= tolerances.coincidence * max(abs(a), 1.0) for a in allowed)
        and omega.pole_order(r, tol) > 0
    ]
    report.add("no_other_poles", not stray, [complex(r) for r in stray])

    sums, pairings = [], []
    for cls in spec.classes:
        scale = _local_scale(omega, cls)
        residues = [omega.residue(m.point) for m in cls.members]
        sums.append(abs(sum(residues)) / scale)
        for member in cls.members:
            q, n = member.point.coordinate(), member.multiplicity
            pairings.extend(abs(omega.moment(q, j)) / scale for j in range(n, 2 * n))
    report.add("class_residue_sums", all(s <= tol for s in sums), sums)
    report.add("class_pairings", all(p <= tol for p in pairings), max(pairings, default=0.0),
               "Res_q (λ − q)ʲ ω = 0 for n ≤ j < 2n")

    zeros = required_zeros(req, tolerances.coincidence)
    missing = [(z, m) for z, m in zeros if omega.order_at(z, tol) < m]
    report.add("required_zeros", not missing, [complex(z) for z, _ in missing])

    report.surplus_zeros = _surplus_zeros(omega, zeros, tolerances)
    return report


def _local_scale(omega: RationalDifferential, cls) -> float:
    """Largest principal-part coefficient of ω over the class and the marked residues."""
    values = [abs(omega.residue(None)), abs(omega.residue(0.0))]
    for member in cls.members:
        q = member.point.coordinate()
        mult = omega.f.pole_multiplicity(q)
        if mult:
            values.extend(np.abs(omega.f.laurent_at(q, mult)[1]))
    return max(max(values), 1e-300)


def _surplus_zeros(omega: RationalDifferential, zeros, tolerances: Tolerances) -> List[complex]:
    numerator = omega.f.numerator
    pending = {i: m for i, (_, m) in enumerate(zeros)}
    surplus = []
    for root in numerator.roots():
        for i, (z, _) in enumerate(zeros):
            if pending.get(i, 0) > 0 and abs(root - z) <= 1e-6 * max(abs(z), 1.0):
                pending[i] -= 1
                break
        else:
            if not any(abs(root - r) <= 1e-6 * max(abs(r), 1.0) for r, _ in omega.f.poles):
                surplus.append(complex(root))
    return surplus


@dataclass
class ConsequenceReport:
    kind: CertificateKind
    measured: Dict[str, float]
    thresholds: Dict[str, float]
    failed_nodes: int = 0

    @property
    def passed(self) -> bool:
        return self.failed_nodes == 0 and all(
            self.measured[name] <= limit for name, limit in self.thresholds.items()
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "passed": self.passed,
            "measured": self.measured,
            "thresholds": self.thresholds,
            "failed_nodes": self.failed_nodes,
        }


def _max_abs(values: np.ndarray) -> float:
    values = values[np.isfinite(values)]
    return float(np.max(np.abs(values))) if values.size else 0.0


def assert_consequences(
    req: CertificateRequest,
    certificate: Certificate,
    grid: Grid,
    tolerances: Optional[Tolerances] = None,
    threads: Optional[int] = None,
) -> ConsequenceReport:
    """
    Run the wave construction over the grid and measure the consequence the
    certificate implies: max|A| and max|c² − 1|, max|U − V|, or
    max(|Im U|, |Im V|) together with the τ-mirror deviation
    max|U(−z) − conj V(z)| on grids symmetric about the origin.
    """
    tolerances = resolve_tolerances(tolerances)
    if not certificate.report.passed:
        raise InvalidRequest("Consequences need a verified certificate")
    kind = req.kind
    if kind is CertificateKind.SCHRODINGER_SIGMA:
        sample = potential_field(req.spec, req.divisor, grid, tolerances=tolerances, threads=threads)
        measured = {"max_abs_A": _max_abs(sample.A), "max_abs_c2_minus_1": _max_abs(sample.c ** 2 - 1)}
        limit = tolerances.consequence_sigma
        return ConsequenceReport(kind, measured, {k: limit for k in measured}, int(np.sum(~sample.ok)))
    sample = dirac_potential_field(req.spec, req.divisor, grid, tolerances=tolerances, threads=threads)
    failed = int(np.sum(~sample.ok))
    if kind is CertificateKind.DIRAC_SIGMA:
        measured = {"max_abs_U_minus_V": _max_abs(sample.U - sample.V)}
        return ConsequenceReport(kind, measured, {"max_abs_U_minus_V": tolerances.consequence_sigma}, failed)
    measured = {"max_abs_im_U": _max_abs(sample.U.imag), "max_abs_im_V": _max_abs(sample.V.imag)}
    thresholds = {k: tolerances.consequence_tau for k in measured}
    if grid.x_min == -grid.x_max and grid.y_min == -grid.y_max:
        measured["tau_mirror_deviation"] = _max_abs(sample.U[::-1, ::-1] - sample.V.conj())
        thresholds["tau_mirror_deviation"] = tolerances.consequence_tau
    return ConsequenceReport(kind, measured, thresholds, failed)


@dataclass(frozen=True)
class ResidueEntry:
    product: str
    plus: complex
    minus: complex
    divisor: Dict[str, complex]
    classes: List[complex]
    total: complex

    def to_dict(self) -> Dict[str, Any]:
        return {
            "product": self.product,
            "plus": _jsonable(self.plus),
            "minus": _jsonable(self.minus),
            "divisor": {k: _jsonable(v) for k, v in self.divisor.items()},
            "classes": [_jsonable(v) for v in self.classes],
            "total": _jsonable(self.total),
        }


def _balance(name: str, product: RationalDifferential, spec: CurveSpec, points: List[complex]) -> ResidueEntry:
    return ResidueEntry(
        product=name,
        plus=product.residue(None),
        minus=product.residue(0.0),
        divisor={f"{p:.6g}": product.residue(p) for p in points},
        classes=[sum(product.residue(m.point) for m in cls.members) for cls in spec.classes],
        total=product.residue_sum(),
    )


def residue_balance(
    req: CertificateRequest,
    certificate: Certificate,
    x: float,
    y: float,
    tolerances: Optional[Tolerances] = None,
) -> List[ResidueEntry]:
    """
    Residues of the products whose vanishing residue sum drives each
    symmetry argument: ψ(λ)ψ(σλ)ω, ψ₁(λ)ψ₂(σλ)ω, and ψᵢ(λ)·conj ψᵢ(τλ)·ω′.

    The exponential factors cancel exactly in each product, which leaves
    rational differentials.
    """
    tolerances = resolve_tolerances(tolerances)
    spec, kind = req.spec, req.kind
    f = certificate.differential.f
    points = [z for z, _ in required_zeros(req, tolerances.coincidence)]
    if kind is CertificateKind.SCHRODINGER_SIGMA:
        r = solve_wave(spec, req.divisor, x, y, tolerances).prefactor
        product = RationalDifferential(r * r.reflect_sigma() * f)
        return [_balance("psi*psi_sigma*omega", product, spec, points)]
    wave = solve_dirac_wave(spec, req.divisor, x, y, tolerances)
    r1, r2 = wave.prefactor1, wave.prefactor2
    if kind is CertificateKind.DIRAC_SIGMA:
        product = RationalDifferential(r1 * r2.reflect_sigma() * f)
        return [_balance("psi1*psi2_sigma*omega", product, spec, points)]
    t = spec.tau_param
    return [
        _balance("psi1*conj_psi1_tau*omega", RationalDifferential(r1 * r1.reflect_tau(t) * f), spec, points),
        _balance("psi2*conj_psi2_tau*omega", RationalDifferential(r2 * r2.reflect_tau(t) * f), spec, points),
    ]
