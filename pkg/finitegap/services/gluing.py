"""
Gluing systems: linear conditions that make E·N/Q descend to the singular curve.

Per gluing class the conditions are the value chain ψ(Q₁) = ψ(Qⱼ) across
members and the vanishing of the Taylor coefficients 1 … n−1 of ψ at a
member of multiplicity n, δ rows in total. The unknowns are selected
coefficients of the numerator N; the remaining part of N is fixed and feeds
the right-hand side.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as spla

from finitegap.algebra import series
from finitegap.algebra.rational import Poly, RationalFunction
from finitegap.core.config import Tolerances, resolve_tolerances
from finitegap.core.exceptions import NonGenericDivisor
from finitegap.core.models import GluingClass
from finitegap.services.exponential import ExponentialCore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NumeratorAnsatz:
    """N(λ) = fixed(λ) + Σ aₖ λ^{powers[k]} over the denominator ∏(λ − pⱼ)^{nⱼ}."""

    poles: Tuple[Tuple[complex, int], ...]
    unknown_powers: Tuple[int, ...]
    fixed: Poly

    @property
    def size(self) -> int:
        return len(self.unknown_powers)

    def numerator(self, coefficients: Sequence[complex]) -> Poly:
        numerator = self.fixed
        for power, value in zip(self.unknown_powers, coefficients):
            numerator = numerator + Poly.monomial(power, value)
        return numerator

    def varying_numerator(self, coefficients: Sequence[complex]) -> Poly:
        """Only the unknown part; used for z- and z̄-derivatives of the prefactor."""
        numerator = Poly([0])
        for power, value in zip(self.unknown_powers, coefficients):
            numerator = numerator + Poly.monomial(power, value)
        return numerator

    def prefactor(self, coefficients: Sequence[complex]) -> RationalFunction:
        return RationalFunction(self.numerator(coefficients), self.poles)


def condition_count(classes: Sequence[GluingClass]) -> int:
    return sum(cls.degree - 1 for cls in classes)


def _point_jets(core: ExponentialCore, functions: Sequence[RationalFunction], q: complex, n: int) -> np.ndarray:
    """Rows: jets of E·f at q for every f."""
    e_jet = core.jet(q, n)
    return np.array([series.multiply(e_jet, f.taylor_jet(q, n), n) for f in functions])


def _condition_rows(classes: Sequence[GluingClass], jets: Dict[complex, np.ndarray]) -> List[np.ndarray]:
    rows = []
    for cls in classes:
        members = [(m.point.coordinate(), m.multiplicity) for m in cls.members]
        first = members[0][0]
        for q, _ in members[1:]:
            rows.append(jets[first][:, 0] - jets[q][:, 0])
        for q, n in members:
            for order in range(1, n):
                rows.append(jets[q][:, order])
    return rows


def assemble(
    core: ExponentialCore,
    classes: Sequence[GluingClass],
    ansatz: NumeratorAnsatz,
    weight: str = "plain",
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Assemble M a = b for the ansatz.

    `weight` selects which z/z̄-derivative of E multiplies every entry
    ("plain", "z", "zbar", "zzbar"); the unknown coefficients do not enter
    the weighted entries, so the same routine yields ∂M and ∂b.
    """
    size = ansatz.size
    if size == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros(0, dtype=complex)
    multiplier = core.weight(weight)
    functions = [
        multiplier * RationalFunction(Poly.monomial(power), ansatz.poles) for power in ansatz.unknown_powers
    ]
    functions.append(multiplier * RationalFunction(ansatz.fixed, ansatz.poles))
    rows = condition_matrix(core, classes, functions)
    return rows[:, :size], -rows[:, size]


def condition_matrix(
    core: ExponentialCore, classes: Sequence[GluingClass], functions: Sequence[RationalFunction]
) -> np.ndarray:
    """One row per gluing condition, one column per E·f."""
    jets = {}
    for cls in classes:
        for member in cls.members:
            q = member.point.coordinate()
            jets[q] = _point_jets(core, functions, q, member.multiplicity)
    rows = _condition_rows(classes, jets)
    if not rows:
        return np.zeros((0, len(functions)), dtype=complex)
    return np.array(rows, dtype=complex)


class EquilibratedLU:
    """
    Dense LU of a row-equilibrated square system.

    Rows are scaled by the norm of the augmented row [Mᵢ | bᵢ]; genericity is
    measured on the scaled matrix as max(σ_max/σ_min, 1/σ_min).
    """

    def __init__(self, matrix: np.ndarray, rhs: np.ndarray, condition_limit: float):
        augmented = np.hstack([matrix, rhs[:, None]])
        scales = np.linalg.norm(augmented, axis=1)
        if np.any(scales == 0) or not np.all(np.isfinite(augmented)):
            raise NonGenericDivisor("Gluing system has a vanishing or non-finite row")
        self.scales = 1.0 / scales
        scaled = matrix * self.scales[:, None]
        singular_values = spla.svdvals(scaled)
        smallest = singular_values[-1]
        self.condition = float("inf") if smallest == 0 else max(
            singular_values[0] / smallest, 1.0 / smallest
        )
        logger.debug(f"Gluing system of size {matrix.shape[0]}, condition {self.condition:.3e}")
        if self.condition > condition_limit:
            raise NonGenericDivisor(
                "Divisor is not generic at this position",
                {"condition": self.condition, "limit": condition_limit},
            )
        self.factor = spla.lu_factor(scaled)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return spla.lu_solve(self.factor, rhs * self.scales)


@dataclass(frozen=True)
class GluingSolution:
    """Coefficients of the unknown monomials and their z, z̄ and z z̄ derivatives."""

    coefficients: np.ndarray
    dz: np.ndarray
    dzbar: np.ndarray
    dzzbar: np.ndarray
    condition: float = 1.0


def solve(
    core: ExponentialCore,
    classes: Sequence[GluingClass],
    ansatz: NumeratorAnsatz,
    tolerances: Optional[Tolerances] = None,
) -> GluingSolution:
    """
    Solve the gluing system and propagate derivatives analytically.

    ∂a = M⁻¹(∂b − (∂M)a) and
    ∂∂̄a = M⁻¹(∂∂̄b − (∂∂̄M)a − (∂M)∂̄a − (∂̄M)∂a).

    Raises:
        NonGenericDivisor: the system is numerically singular
    """
    tolerances = resolve_tolerances(tolerances)
    if ansatz.size == 0:
        empty = np.zeros(0, dtype=complex)
        return GluingSolution(empty, empty, empty, empty)
    matrix, rhs = assemble(core, classes, ansatz)
    solver = EquilibratedLU(matrix, rhs, tolerances.condition_limit)
    a = solver.solve(rhs)
    m_z, b_z = assemble(core, classes, ansatz, "z")
    m_zbar, b_zbar = assemble(core, classes, ansatz, "zbar")
    m_zzbar, b_zzbar = assemble(core, classes, ansatz, "zzbar")
    a_z = solver.solve(b_z - m_z @ a)
    a_zbar = solver.solve(b_zbar - m_zbar @ a)
    a_zzbar = solver.solve(b_zzbar - m_zzbar @ a - m_z @ a_zbar - m_zbar @ a_z)
    return GluingSolution(a, a_z, a_zbar, a_zzbar, solver.condition)


def descent_residual(core: ExponentialCore, classes: Sequence[GluingClass], prefactor: RationalFunction) -> float:
    """
    Largest violation of the gluing conditions by ψ = E·R, relative per class
    to the largest jet magnitude of ψ over its members.
    """
    worst = 0.0
    for cls in classes:
        members = [(m.point.coordinate(), m.multiplicity) for m in cls.members]
        jets = {q: _point_jets(core, [prefactor], q, n)[0] for q, n in members}
        scale = max(float(np.max(np.abs(jet))) for jet in jets.values()) or 1.0
        first = members[0][0]
        for q, _ in members[1:]:
            worst = max(worst, abs(jets[first][0] - jets[q][0]) / scale)
        for q, n in members:
            if n > 1:
                worst = max(worst, float(np.max(np.abs(jets[q][1:]))) / scale)
    return worst
