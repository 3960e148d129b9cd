"""
Dimension counts on singular rational curves by explicit bases and ranks.

L(D): functions on the normalization with (f) ≥ −D that descend to the
singular curve (equal values across each gluing class, vanishing jets of
orders 1 … n−1 at a member of multiplicity n).

Ω′(D): regular differentials, i.e. poles of order ≤ n_Q at the support
points, zero residue sum per class, no other poles, with zeros of order
≥ n_P at the points of D.

Here D may contain 0 and ∞; the marked points play no role.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as spla

from finitegap.algebra import series
from finitegap.core.config import Tolerances, resolve_tolerances
from finitegap.core.models import CurveSpec, PoleDivisor, arithmetic_genus

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearSpaceRank:
    description: str
    ambient_size: int
    rank: int

    @property
    def dimension(self) -> int:
        return self.ambient_size - self.rank


@dataclass(frozen=True)
class RRReport:
    divisor_degree: int
    arithmetic_genus: int
    dim_L: int
    dim_Omega: int
    regular_differentials: int

    @property
    def identity_residual(self) -> int:
        """dim L − dim Ω′ − (deg D + 1 − p_a)."""
        return self.dim_L - self.dim_Omega - (self.divisor_degree + 1 - self.arithmetic_genus)

    def to_dict(self):
        return {
            "deg_D": self.divisor_degree,
            "p_a": self.arithmetic_genus,
            "dim_L": self.dim_L,
            "dim_Omega": self.dim_Omega,
            "regular_differentials": self.regular_differentials,
            "identity_residual": self.identity_residual,
        }


def numerical_rank(matrix: np.ndarray, rtol: float) -> int:
    """Rank after row and column equilibration, threshold rtol·σ_max."""
    if matrix.size == 0:
        return 0
    columns = np.linalg.norm(matrix, axis=0)
    columns[columns == 0] = 1.0
    scaled = matrix / columns
    rows = np.linalg.norm(scaled, axis=1)
    scaled = scaled[rows > 0] / rows[rows > 0][:, None]
    if scaled.size == 0:
        return 0
    singular_values = spla.svdvals(scaled)
    return int(np.sum(singular_values > rtol * singular_values[0]))


def _descent_rows(spec: CurveSpec, jets_of) -> List[np.ndarray]:
    """Value chains and jets per class; `jets_of(q, n)` gives one column per basis element."""
    rows = []
    for cls in spec.classes:
        members = [(m.point.coordinate(), m.multiplicity) for m in cls.members]
        jets = {q: jets_of(q, n) for q, n in members}
        first = members[0][0]
        for q, _ in members[1:]:
            rows.append(jets[first][0] - jets[q][0])
        for q, n in members:
            for order in range(1, n):
                rows.append(jets[q][order])
    return rows


def function_space_rank(spec: CurveSpec, divisor: PoleDivisor, tolerances: Optional[Tolerances] = None) -> LinearSpaceRank:
    tolerances = resolve_tolerances(tolerances)
    finite = divisor.finite_entries()
    at_infinity = divisor.multiplicity_at_infinity()
    # basis: 1, (λ − p)^{−m}, λ^m
    terms: List[Tuple[str, complex, int]] = [("const", 0j, 0)]
    terms += [("pole", p, m) for p, n in finite for m in range(1, n + 1)]
    terms += [("power", 0j, m) for m in range(1, at_infinity + 1)]

    def jets_of(q: complex, n: int) -> np.ndarray:
        columns = []
        for kind, p, m in terms:
            if kind == "const":
                columns.append(series.as_series([1.0], n))
            elif kind == "pole":
                columns.append(series.shifted_power(q - p, -m, n))
            else:
                columns.append(series.shifted_power(q, m, n))
        return np.array(columns).T

    rows = _descent_rows(spec, jets_of)
    matrix = np.array(rows) if rows else np.zeros((0, len(terms)), dtype=complex)
    return LinearSpaceRank("L(D)", len(terms), numerical_rank(matrix, tolerances.rank))


def function_space_dim(spec: CurveSpec, divisor: PoleDivisor, tolerances: Optional[Tolerances] = None) -> int:
    return function_space_rank(spec, divisor, tolerances).dimension


def differential_space_rank(
    spec: CurveSpec, divisor: Optional[PoleDivisor] = None, tolerances: Optional[Tolerances] = None
) -> LinearSpaceRank:
    """
    Regular differentials, restricted to (ω) ≥ D when a divisor is given.

    Basis (λ − q)^{−j} dλ, 1 ≤ j ≤ n_q; a zero of order n at ∞ asks the
    coefficients of λ^{−2} … λ^{−n−1} of f to vanish.
    """
    tolerances = resolve_tolerances(tolerances)
    terms = [(q, j) for q, n in spec.supports() for j in range(1, n + 1)]
    rows: List[np.ndarray] = []
    index = {}
    for i, (q, j) in enumerate(terms):
        index[(q, j)] = i
    for cls in spec.classes:
        row = np.zeros(len(terms), dtype=complex)
        for member in cls.members:
            row[index[(member.point.coordinate(), 1)]] = 1.0
        rows.append(row)
    description = "regular differentials"
    if divisor is not None:
        description = "Ω′(D)"
        for p, n in divisor.finite_entries():
            if terms:
                rows.extend(np.array([series.shifted_power(p - q, -j, n) for q, j in terms]).T)
        n_inf = divisor.multiplicity_at_infinity()
        if n_inf:
            length = n_inf + 2
            # (λ − q)^{−j} = Σ_i C(j+i−1, i) q^i λ^{−j−i}
            expansions = np.zeros((length, len(terms)), dtype=complex)
            for col, (q, j) in enumerate(terms):
                coeffs = series.inverse_binomial_at_infinity(q, j, length)
                for i, c in enumerate(coeffs):
                    if j + i < length:
                        expansions[j + i, col] = c
            rows.extend(expansions[2: n_inf + 2])
    matrix = np.array(rows) if rows else np.zeros((0, len(terms)), dtype=complex)
    return LinearSpaceRank(description, len(terms), numerical_rank(matrix, tolerances.rank))


def regular_differential_dim(spec: CurveSpec, tolerances: Optional[Tolerances] = None) -> int:
    return differential_space_rank(spec, None, tolerances).dimension


def omega_dim(spec: CurveSpec, divisor: PoleDivisor, tolerances: Optional[Tolerances] = None) -> int:
    return differential_space_rank(spec, divisor, tolerances).dimension


def rr_report(spec: CurveSpec, divisor: PoleDivisor, tolerances: Optional[Tolerances] = None) -> RRReport:
    report = RRReport(
        divisor_degree=divisor.degree,
        arithmetic_genus=arithmetic_genus(spec),
        dim_L=function_space_dim(spec, divisor, tolerances),
        dim_Omega=omega_dim(spec, divisor, tolerances),
        regular_differentials=regular_differential_dim(spec, tolerances),
    )
    if report.identity_residual != 0:
        logger.warning(f"Riemann–Roch identity residual {report.identity_residual} for D = {divisor}")
    return report
