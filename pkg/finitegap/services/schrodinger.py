"""
Schrödinger Baker–Akhiezer functions on singular rational curves.

ψ(λ) = E(λ)·P(λ)/Q(λ) with Q = ∏(λ − pⱼ)^{nⱼ} over the divisor and P monic of
degree g = deg D. The gluing conditions fix the lower coefficients of P; the
potentials of L = ∂∂̄ + A∂̄ + u follow from the asymptotics
ψ ≈ e^{k₊z}(1 + ξk₊⁻¹ + …) at ∞₊ and ψ ≈ c·e^{k₋z̄}(1 + …) at ∞₋:
u = −∂̄ξ and A = −∂ log c.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from finitegap.algebra.rational import Poly, RationalFunction
from finitegap.analysis.validation import require_admissible
from finitegap.core.config import Tolerances, resolve_tolerances
from finitegap.core.exceptions import DegeneratePosition, InvalidSpecification
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


def _ansatz(divisor: PoleDivisor) -> gluing.NumeratorAnsatz:
    g = divisor.degree
    return gluing.NumeratorAnsatz(
        poles=tuple(divisor.finite_entries()),
        unknown_powers=tuple(range(g)),
        fixed=Poly.monomial(g),
    )


@dataclass(frozen=True, eq=False)
class SchrodingerWave:
    spec: CurveSpec
    divisor: PoleDivisor
    x: float
    y: float
    ansatz: gluing.NumeratorAnsatz
    solution: gluing.GluingSolution

    @property
    def core(self) -> ExponentialCore:
        return ExponentialCore.at(self.spec, self.x, self.y)

    @property
    def genus(self) -> int:
        return self.ansatz.size

    @property
    def coefficients(self) -> np.ndarray:
        """a₀ … a_{g−1} of the monic numerator."""
        return self.solution.coefficients

    @property
    def prefactor(self) -> RationalFunction:
        return self.ansatz.prefactor(self.coefficients)

    def prefactor_derivative(self, which: str) -> RationalFunction:
        """∂R for which ∈ {"z", "zbar", "zzbar"}; the monic term does not move."""
        values = {"z": self.solution.dz, "zbar": self.solution.dzbar, "zzbar": self.solution.dzzbar}[which]
        return RationalFunction(self.ansatz.varying_numerator(values), self.ansatz.poles)

    def psi(self, lam: complex) -> complex:
        return self.core(lam) * complex(self.prefactor(lam))

    @property
    def denominator_at_zero(self) -> complex:
        value = 1.0 + 0j
        for p, n in self.ansatz.poles:
            value *= (-p) ** n
        return value


def assemble_gluing_system(
    spec: CurveSpec,
    divisor: PoleDivisor,
    x: float,
    y: float,
    tolerances: Optional[Tolerances] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """g×g matrix and right-hand side of the gluing conditions in a₀ … a_{g−1}."""
    require_admissible(spec, divisor, OperatorKind.SCHRODINGER, tolerances)
    core = ExponentialCore.at(spec, x, y)
    return gluing.assemble(core, spec.classes, _ansatz(divisor))


def solve_wave(
    spec: CurveSpec,
    divisor: PoleDivisor,
    x: float,
    y: float,
    tolerances: Optional[Tolerances] = None,
) -> SchrodingerWave:
    """
    Solve the gluing system at (x, y).

    Raises:
        NonGenericDivisor: the system is numerically singular at (x, y)
        InvalidSpecification: the data are structurally inadmissible
    """
    tolerances = resolve_tolerances(tolerances)
    require_admissible(spec, divisor, OperatorKind.SCHRODINGER, tolerances)
    ansatz = _ansatz(divisor)
    core = ExponentialCore.at(spec, x, y)
    solution = gluing.solve(core, spec.classes, ansatz, tolerances)
    return SchrodingerWave(spec, divisor, float(x), float(y), ansatz, solution)


def solve_wave_elementary(
    spec: CurveSpec,
    divisor: PoleDivisor,
    x: float,
    y: float,
    tolerances: Optional[Tolerances] = None,
) -> "ElementaryWave":
    """
    Solve for ψ = Σ cᵢψᵢ with Σcᵢ = 1 over the elementary waves E and
    E·λ/(λ − pᵢ); requires a multiplicity-free divisor.
    """
    tolerances = resolve_tolerances(tolerances)
    require_admissible(spec, divisor, OperatorKind.SCHRODINGER, tolerances)
    entries = divisor.finite_entries()
    if any(n != 1 for _, n in entries):
        raise InvalidSpecification("Elementary waves need a multiplicity-free divisor")
    functions = [RationalFunction.constant(1.0)]
    functions += [RationalFunction(Poly([0, 1]), [(p, 1)]) for p, _ in entries]
    core = ExponentialCore.at(spec, x, y)
    rows = gluing.condition_matrix(core, spec.classes, functions)
    matrix = np.vstack([rows, np.ones((1, len(functions)), dtype=complex)])
    rhs = np.zeros(len(functions), dtype=complex)
    rhs[-1] = 1.0
    solver = gluing.EquilibratedLU(matrix, rhs, tolerances.condition_limit)
    return ElementaryWave(core, tuple(functions), solver.solve(rhs))


@dataclass(frozen=True, eq=False)
class ElementaryWave:
    core: ExponentialCore
    functions: Tuple[RationalFunction, ...]
    weights: np.ndarray

    def psi(self, lam: complex) -> complex:
        total = sum(w * complex(f(lam)) for w, f in zip(self.weights, self.functions))
        return self.core(lam) * total


def extract_xi(wave: SchrodingerWave) -> complex:
    """ξ = αβz̄ + α·r₁ with r₁ the λ⁻¹ coefficient of R at ∞."""
    core = wave.core
    r1 = wave.prefactor.laurent_at_infinity(2)[1]
    return core.alpha * core.beta * core.zbar + core.alpha * r1


def xi_gradient(wave: SchrodingerWave) -> Tuple[complex, complex]:
    """(∂ξ, ∂̄ξ); r₁ = a_{g−1} + Σ nⱼpⱼ moves only through a_{g−1}."""
    core = wave.core
    if wave.genus == 0:
        return 0j, core.alpha * core.beta
    return (
        core.alpha * wave.solution.dz[-1],
        core.alpha * core.beta + core.alpha * wave.solution.dzbar[-1],
    )


def extract_c(wave: SchrodingerWave) -> complex:
    """c = R(0)."""
    return complex(wave.prefactor(0.0))


def c_gradient(wave: SchrodingerWave) -> Tuple[complex, complex]:
    if wave.genus == 0:
        return 0j, 0j
    q0 = wave.denominator_at_zero
    return wave.solution.dz[0] / q0, wave.solution.dzbar[0] / q0


def potentials(wave: SchrodingerWave) -> Tuple[complex, complex]:
    """
    (u, A) at the wave's position.

    Raises:
        DegeneratePosition: c vanishes, so log c is undefined
    """
    c = extract_c(wave)
    if c == 0:
        raise DegeneratePosition("c vanishes at this position", {"x": wave.x, "y": wave.y})
    u = -xi_gradient(wave)[1]
    a = -c_gradient(wave)[0] / c
    return u, a


@dataclass(frozen=True, eq=False)
class SchrodingerPotentialSample:
    grid: Grid
    u: np.ndarray
    A: np.ndarray
    xi: np.ndarray
    c: np.ndarray
    ok: np.ndarray
    errors: List[str]
    fd_deviation: Optional[float] = None

    @property
    def fields(self):
        return {"u": self.u, "A": self.A, "xi": self.xi, "c": self.c}


def _node_values(spec, divisor, tolerances, check):
    def evaluate(x: float, y: float):
        wave = solve_wave(spec, divisor, x, y, tolerances)
        u, a = potentials(wave)
        xi, c = extract_xi(wave), extract_c(wave)
        deviation = None
        if check == "fd":
            def sample(xx, yy):
                other = solve_wave(spec, divisor, xx, yy, tolerances)
                return np.array([extract_xi(other), extract_c(other)])

            dz, dzbar = wirtinger_richardson(sample, x, y)
            xi_z, xi_zbar = xi_gradient(wave)
            c_z, c_zbar = c_gradient(wave)
            analytic = np.array([xi_z, xi_zbar, c_z / c, c_zbar / c])
            numeric = np.array([dz[0], dzbar[0], dz[1] / c, dzbar[1] / c])
            deviation = relative_deviation(analytic, numeric)
        return u, a, xi, c, deviation

    return evaluate


def potential_field(
    spec: CurveSpec,
    divisor: PoleDivisor,
    grid: Grid,
    check: Optional[str] = None,
    tolerances: Optional[Tolerances] = None,
    threads: Optional[int] = None,
) -> SchrodingerPotentialSample:
    """
    Sample u, A, ξ and c over the grid.

    Derivatives are analytic; `check="fd"` additionally compares the
    gradients of ξ and log c against Richardson finite differences and
    records the largest relative deviation. Failed nodes are flagged in
    `ok` and left as NaN.
    """
    tolerances = resolve_tolerances(tolerances)
    require_admissible(spec, divisor, OperatorKind.SCHRODINGER, tolerances)
    results = map_nodes(_node_values(spec, divisor, tolerances, check), grid.nodes(), threads)
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
        *values, deviation = result.value
        for array, value in zip(arrays, values):
            array[i, j] = value
        ok[i, j] = True
        if deviation is not None:
            deviations.append(deviation)
    fd_deviation = max(deviations) if deviations else None
    return SchrodingerPotentialSample(grid, *arrays, ok=ok, errors=errors, fd_deviation=fd_deviation)


def operator_residual(
    spec: CurveSpec,
    divisor: PoleDivisor,
    x: float,
    y: float,
    samples: Sequence[complex],
    tolerances: Optional[Tolerances] = None,
    perturbation: complex = 0.0,
) -> float:
    """
    max |∂∂̄ψ + A∂̄ψ + uψ| / scale over the λ samples.

    The common factor E cancels, so the residual is evaluated on
    ψ/E = R, ∂̄ψ/E = (β/λ)R + ∂̄R and
    ∂∂̄ψ/E = αβR + αλ∂̄R + (β/λ)∂R + ∂∂̄R. `perturbation` is added to u.

    Raises:
        SampleTooClose: a sample is near 0, a support point or a pole
    """
    tolerances = resolve_tolerances(tolerances)
    forbidden = [0j] + [q for q, _ in spec.supports()] + [p for p, _ in divisor.finite_entries()]
    samples = check_samples(samples, forbidden, tolerances.sample_distance)
    wave = solve_wave(spec, divisor, x, y, tolerances)
    u, a = potentials(wave)
    u = u + perturbation
    alpha, beta = spec.alpha, spec.beta
    r = wave.prefactor
    r_z, r_zbar, r_zzbar = (wave.prefactor_derivative(k) for k in ("z", "zbar", "zzbar"))
    worst = 0.0
    for lam in samples:
        value = complex(r(lam))
        dzbar = beta / lam * value + complex(r_zbar(lam))
        dzzbar = (
            alpha * beta * value
            + alpha * lam * complex(r_zbar(lam))
            + beta / lam * complex(r_z(lam))
            + complex(r_zzbar(lam))
        )
        residual = dzzbar + a * dzbar + u * value
        scale = max(abs(dzzbar), abs(u * value), abs(a * dzbar), np.finfo(float).eps)
        worst = max(worst, abs(residual) / scale)
    logger.debug(f"Operator residual at ({x:g}, {y:g}): {worst:.3e}")
    return worst
