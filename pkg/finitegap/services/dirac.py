"""
Two-component Dirac Baker–Akhiezer functions.

ψ = (E·R₁, E·R₂) with R₁ = P₁/Q, P₁ monic of degree g+1 with P₁(0) = 0, and
R₂ = P₂/Q, deg P₂ ≤ g with P₂(0) = Q(0). The operator is
𝒟 = [[0, ∂], [−∂̄, 0]] + diag(U, V) and 𝒟ψ = 0 gives U = −ξ₂⁺, V = ξ₁⁻.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from finitegap.algebra.rational import Poly, RationalFunction
from finitegap.analysis.validation import require_admissible
from finitegap.core.config import Tolerances, resolve_tolerances
from finitegap.core.models import CurveSpec, OperatorKind, PoleDivisor
from finitegap.services import gluing
from finitegap.services.exponential import ExponentialCore
from finitegap.services.grid import (
    Grid,
    check_samples,
    map_nodes,
    relative_deviation,
    wirtinger_richardson,
)

logger = logging.getLogger(__name__)


def _denominator_at_zero(poles) -> complex:
    value = 1.0 + 0j
    for p, n in poles:
        value *= (-p) ** n
    return value


def _ansatze(divisor: PoleDivisor) -> Tuple[gluing.NumeratorAnsatz, gluing.NumeratorAnsatz]:
    poles = tuple(divisor.finite_entries())
    g = divisor.degree - 1
    powers = tuple(range(1, g + 1))
    first = gluing.NumeratorAnsatz(poles, powers, Poly.monomial(g + 1))
    second = gluing.NumeratorAnsatz(poles, powers, Poly([_denominator_at_zero(poles)]))
    return first, second


@dataclass(frozen=True, eq=False)
class DiracWave:
    spec: CurveSpec
    divisor: PoleDivisor
    x: float
    y: float
    ansatz1: gluing.NumeratorAnsatz
    solution1: gluing.GluingSolution
    ansatz2: gluing.NumeratorAnsatz
    solution2: gluing.GluingSolution

    @property
    def core(self) -> ExponentialCore:
        return ExponentialCore.at(self.spec, self.x, self.y)

    @property
    def genus(self) -> int:
        return self.ansatz1.size

    @property
    def prefactor1(self) -> RationalFunction:
        return self.ansatz1.prefactor(self.solution1.coefficients)

    @property
    def prefactor2(self) -> RationalFunction:
        return self.ansatz2.prefactor(self.solution2.coefficients)

    def prefactor_derivative(self, component: int, which: str) -> RationalFunction:
        ansatz, solution = (self.ansatz1, self.solution1) if component == 1 else (self.ansatz2, self.solution2)
        values = {"z": solution.dz, "zbar": solution.dzbar, "zzbar": solution.dzzbar}[which]
        return RationalFunction(ansatz.varying_numerator(values), ansatz.poles)

    def psi(self, lam: complex) -> Tuple[complex, complex]:
        e = self.core(lam)
        return e * complex(self.prefactor1(lam)), e * complex(self.prefactor2(lam))


@dataclass(frozen=True)
class DiracPotentials:
    U: complex
    V: complex
    xi1_plus: complex
    xi2_minus: complex


def solve_dirac_wave(
    spec: CurveSpec,
    divisor: PoleDivisor,
    x: float,
    y: float,
    tolerances: Optional[Tolerances] = None,
) -> DiracWave:
    """
    Solve both component systems at (x, y); they decouple and are factored
    independently.

    Raises:
        NonGenericDivisor: a component system is numerically singular
        InvalidSpecification: the data are structurally inadmissible
    """
    tolerances = resolve_tolerances(tolerances)
    require_admissible(spec, divisor, OperatorKind.DIRAC, tolerances)
    first, second = _ansatze(divisor)
    core = ExponentialCore.at(spec, x, y)
    solution1 = gluing.solve(core, spec.classes, first, tolerances)
    solution2 = gluing.solve(core, spec.classes, second, tolerances)
    return DiracWave(spec, divisor, float(x), float(y), first, solution1, second, solution2)


def extract_dirac_potentials(wave: DiracWave) -> DiracPotentials:
    core = wave.core
    alpha, beta = core.alpha, core.beta
    g = wave.genus
    p2 = wave.ansatz2.numerator(wave.solution2.coefficients).coefficients
    b_top = p2[g] if g < p2.size else 0j
    p1 = wave.ansatz1.numerator(wave.solution1.coefficients).coefficients
    a_one = p1[1] if p1.size > 1 else 0j
    q0 = _denominator_at_zero(wave.ansatz1.poles)
    r1_inf = wave.prefactor1.laurent_at_infinity(2)[1]
    r2_slope = wave.prefactor2.taylor_jet(0.0, 2)[1]
    return DiracPotentials(
        U=complex(-alpha * b_top),
        V=complex(beta * a_one / q0),
        xi1_plus=complex(alpha * beta * core.zbar + alpha * r1_inf),
        xi2_minus=complex(alpha * beta * core.z + beta * r2_slope),
    )


def dirac_residual(
    spec: CurveSpec,
    divisor: PoleDivisor,
    x: float,
    y: float,
    samples: Sequence[complex],
    tolerances: Optional[Tolerances] = None,
    perturbation: complex = 0.0,
) -> float:
    """
    max over samples of |∂ψ₂ + Uψ₁| and |−∂̄ψ₁ + Vψ₂|, each relative to its
    largest term; `perturbation` is added to U.

    Raises:
        SampleTooClose: a sample is near 0, a support point or a pole
    """
    tolerances = resolve_tolerances(tolerances)
    forbidden = [0j] + [q for q, _ in spec.supports()] + [p for p, _ in divisor.finite_entries()]
    samples = check_samples(samples, forbidden, tolerances.sample_distance)
    wave = solve_dirac_wave(spec, divisor, x, y, tolerances)
    pots = extract_dirac_potentials(wave)
    u = pots.U + perturbation
    alpha, beta = spec.alpha, spec.beta
    r1, r2 = wave.prefactor1, wave.prefactor2
    r1_zbar = wave.prefactor_derivative(1, "zbar")
    r2_z = wave.prefactor_derivative(2, "z")
    worst = 0.0
    eps = np.finfo(float).eps
    for lam in samples:
        first, second = complex(r1(lam)), complex(r2(lam))
        d_second = alpha * lam * second + complex(r2_z(lam))
        dbar_first = beta / lam * first + complex(r1_zbar(lam))
        eq1 = d_second + u * first
        eq2 = -dbar_first + pots.V * second
        worst = max(
            worst,
            abs(eq1) / max(abs(d_second), abs(u * first), eps),
            abs(eq2) / max(abs(dbar_first), abs(pots.V * second), eps),
        )
    logger.debug(f"Dirac residual at ({x:g}, {y:g}): {worst:.3e}")
    return worst


@dataclass(frozen=True, eq=False)
class DiracPotentialSample:
    grid: Grid
    U: np.ndarray
    V: np.ndarray
    xi1_plus: np.ndarray
    xi2_minus: np.ndarray
    ok: np.ndarray
    errors: List[str]
    fd_deviation: Optional[float] = None

    @property
    def fields(self):
        return {"U": self.U, "V": self.V, "xi1_plus": self.xi1_plus, "xi2_minus": self.xi2_minus}


def _coefficients(wave: DiracWave, attribute: str = "coefficients") -> np.ndarray:
    return np.concatenate([getattr(wave.solution1, attribute), getattr(wave.solution2, attribute)])


def dirac_potential_field(
    spec: CurveSpec,
    divisor: PoleDivisor,
    grid: Grid,
    check: Optional[str] = None,
    tolerances: Optional[Tolerances] = None,
    threads: Optional[int] = None,
) -> DiracPotentialSample:
    """
    Sample U, V and the diagnostics ξ₁⁺, ξ₂⁻ over the grid.

    With `check="fd"` the analytic z- and z̄-derivatives of both coefficient
    vectors are compared against Richardson finite differences.
    """
    tolerances = resolve_tolerances(tolerances)
    require_admissible(spec, divisor, OperatorKind.DIRAC, tolerances)

    def evaluate(x: float, y: float):
        wave = solve_dirac_wave(spec, divisor, x, y, tolerances)
        pots = extract_dirac_potentials(wave)
        deviation = None
        if check == "fd":
            dz, dzbar = wirtinger_richardson(
                lambda xx, yy: _coefficients(solve_dirac_wave(spec, divisor, xx, yy, tolerances)), x, y
            )
            analytic = np.concatenate([_coefficients(wave, "dz"), _coefficients(wave, "dzbar")])
            deviation = relative_deviation(analytic, np.concatenate([dz, dzbar]))
        return pots, deviation

    results = map_nodes(evaluate, grid.nodes(), threads)
    shape = grid.shape
    arrays = [np.full(shape, np.nan + 0j) for _ in range(4)]
    ok = np.zeros(shape, dtype=bool)
    errors: List[str] = []
    deviations = []
    for index, result in enumerate(results):
        i, j = divmod(index, grid.ny)
        if not result.ok:
            errors.append(f"({result.x:g}, {result.y:g}): {result.error}")
            continue
        pots, deviation = result.value
        for array, value in zip(arrays, (pots.U, pots.V, pots.xi1_plus, pots.xi2_minus)):
            array[i, j] = value
        ok[i, j] = True
        if deviation is not None:
            deviations.append(deviation)
    return DiracPotentialSample(
        grid, *arrays, ok=ok, errors=errors, fd_deviation=max(deviations) if deviations else None
    )


def tau_conjugate_relation(
    spec: CurveSpec,
    divisor: PoleDivisor,
    x: float,
    y: float,
    tolerances: Optional[Tolerances] = None,
) -> float:
    """
    max(|U(−z) − conj V(z)|, |V(−z) − conj U(z)|).

    With τ-invariant data (β = −ᾱt, τ(D) = D, supports on |λ|² = t) the
    vector (conj ψ₂(τλ; z), conj ψ₁(τλ; z)) has the defining properties of
    ψ(λ; −z), so the deviation vanishes up to rounding.
    """
    here = extract_dirac_potentials(solve_dirac_wave(spec, divisor, x, y, tolerances))
    mirrored = extract_dirac_potentials(solve_dirac_wave(spec, divisor, -x, -y, tolerances))
    return max(abs(mirrored.U - here.V.conjugate()), abs(mirrored.V - here.U.conjugate()))
