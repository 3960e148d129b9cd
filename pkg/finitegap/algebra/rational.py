"""
Rational functions and differentials over ℂ with factored denominators.

Denominators are kept as (root, multiplicity) pairs. Every denominator in
this package is built from known divisor, support or marked points, so no
polynomial GCD is ever computed; coincident roots are merged (products,
reflections) or rejected (direct construction).
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from finitegap.algebra import series
from finitegap.core.exceptions import (
    DegenerateConfig,
    EvaluationAtPole,
    PoleOrderExceeded,
    UnboundedAtInfinity,
)
from finitegap.core.models import ProjPoint

logger = logging.getLogger(__name__)

# Relative distance below which an evaluation point is treated as a pole
POLE_TOL = 1e-14
# Relative distance below which two constructed roots are the same root
ROOT_TOL = 1e-9

Pointish = Union[ProjPoint, complex, float, int, None]


def _as_point(point: Pointish) -> ProjPoint:
    if isinstance(point, ProjPoint):
        return point
    if point is None:
        return ProjPoint.infinity()
    return ProjPoint.finite(point)


def _close(a: complex, b: complex, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1.0)


class Poly:
    """Complex polynomial, coefficients lowest degree first; trailing zeros trimmed."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable[complex] = (0,)):
        coeffs = np.atleast_1d(np.asarray(list(coefficients) if not isinstance(coefficients, np.ndarray)
                                          else coefficients, dtype=complex))
        nonzero = np.flatnonzero(coeffs)
        if nonzero.size == 0:
            coeffs = np.zeros(1, dtype=complex)
        else:
            coeffs = coeffs[: nonzero[-1] + 1].copy()
        coeffs.setflags(write=False)
        self.coefficients = coeffs

    @classmethod
    def monomial(cls, degree: int, coefficient: complex = 1.0) -> "Poly":
        coeffs = np.zeros(degree + 1, dtype=complex)
        coeffs[degree] = coefficient
        return cls(coeffs)

    @classmethod
    def from_roots(cls, roots: Sequence[Tuple[complex, int]]) -> "Poly":
        """Monic ∏(λ − r)^m."""
        flat = [r for r, m in roots for _ in range(m)]
        if not flat:
            return cls([1.0])
        return cls(npoly.polyfromroots(flat))

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else self.coefficients.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coefficients.size == 1 and self.coefficients[0] == 0

    @property
    def leading(self) -> complex:
        return complex(self.coefficients[-1])

    def __call__(self, lam):
        return npoly.polyval(lam, self.coefficients)

    def deriv(self) -> "Poly":
        if self.coefficients.size == 1:
            return Poly([0])
        return Poly(npoly.polyder(self.coefficients))

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(npoly.polyadd(self.coefficients, other.coefficients))

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly(npoly.polysub(self.coefficients, other.coefficients))

    def __mul__(self, other: Union["Poly", complex, float]) -> "Poly":
        if isinstance(other, Poly):
            return Poly(npoly.polymul(self.coefficients, other.coefficients))
        return Poly(self.coefficients * complex(other))

    __rmul__ = __mul__

    def divide_linear(self, root: complex) -> "Poly":
        """Quotient of synthetic division by (λ − root); the remainder is dropped."""
        quotient, _ = npoly.polydiv(self.coefficients, np.array([-root, 1.0], dtype=complex))
        return Poly(quotient)

    def taylor(self, center: complex, length: int) -> np.ndarray:
        return series.polynomial_taylor(self.coefficients, center, length)

    def roots(self) -> np.ndarray:
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return npoly.polyroots(self.coefficients)

    def scale(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    def __repr__(self) -> str:
        return f"Poly({self.coefficients.tolist()})"


def _merge_roots(poles: Iterable[Tuple[complex, int]], rtol: float) -> Tuple[Tuple[complex, int], ...]:
    merged: List[List] = []
    for root, mult in poles:
        root = complex(root)
        if mult == 0:
            continue
        for entry in merged:
            if _close(entry[0], root, rtol):
                entry[1] += mult
                break
        else:
            merged.append([root, mult])
    return tuple((r, m) for r, m in merged if m > 0)


class RationalFunction:
    """
    f(λ) = N(λ) / ∏ (λ − rᵢ)^{mᵢ}.

    Args:
        numerator: numerator polynomial
        poles: distinct denominator roots with multiplicities

    Raises:
        DegenerateConfig: two denominator roots coincide within ROOT_TOL
    """

    __slots__ = ("numerator", "poles")

    def __init__(self, numerator: Union[Poly, Sequence[complex]], poles: Sequence[Tuple[complex, int]] = ()):
        self.numerator = numerator if isinstance(numerator, Poly) else Poly(numerator)
        cleaned = tuple((complex(r), int(m)) for r, m in poles if int(m) > 0)
        for i, (a, _) in enumerate(cleaned):
            for b, _ in cleaned[i + 1:]:
                if _close(a, b, ROOT_TOL):
                    raise DegenerateConfig(
                        "Denominator roots coincide", {"roots": [str(a), str(b)]}
                    )
        self.poles = cleaned

    @classmethod
    def from_parts(cls, numerator: Poly, poles: Iterable[Tuple[complex, int]], rtol: float = ROOT_TOL):
        """Build while merging coincident roots (products, reflections)."""
        return cls(numerator, _merge_roots(poles, rtol))

    @classmethod
    def constant(cls, value: complex) -> "RationalFunction":
        return cls(Poly([value]))

    @classmethod
    def polynomial(cls, coefficients: Sequence[complex]) -> "RationalFunction":
        return cls(Poly(coefficients))

    @property
    def denominator_degree(self) -> int:
        return sum(m for _, m in self.poles)

    def denominator(self) -> Poly:
        return Poly.from_roots(self.poles)

    def pole_multiplicity(self, lam: complex, rtol: float = ROOT_TOL) -> int:
        for root, mult in self.poles:
            if _close(root, lam, rtol):
                return mult
        return 0

    def _check_not_pole(self, lam) -> None:
        lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
        for root, _ in self.poles:
            if np.any(np.abs(lam_arr - root) <= POLE_TOL * np.maximum(1.0, np.abs(root))):
                raise EvaluationAtPole(f"Evaluation at the pole {root}", {"pole": str(root)})

    def __call__(self, lam):
        return self.evaluate(lam)

    def evaluate(self, lam):
        self._check_not_pole(lam)
        value = self.numerator(lam)
        for root, mult in self.poles:
            value = value / (np.asarray(lam) - root) ** mult
        return value

    def derivative(self) -> "RationalFunction":
        """Quotient rule keeping the factored denominator; multiplicities grow by one."""
        if not self.poles:
            return RationalFunction(self.numerator.deriv())
        linear = Poly.from_roots([(r, 1) for r, _ in self.poles])
        correction = Poly([0])
        for i, (root, mult) in enumerate(self.poles):
            others = Poly.from_roots([(r, 1) for j, (r, _) in enumerate(self.poles) if j != i])
            correction = correction + others * float(mult)
        numerator = self.numerator.deriv() * linear - self.numerator * correction
        return RationalFunction(numerator, [(r, m + 1) for r, m in self.poles])

    def __mul__(self, other: Union["RationalFunction", complex, float]) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return RationalFunction.from_parts(self.numerator * other.numerator, self.poles + other.poles)
        return RationalFunction(self.numerator * complex(other), self.poles)

    __rmul__ = __mul__

    def taylor_jet(self, center: complex, length: int) -> np.ndarray:
        """Taylor coefficients at a regular point."""
        self._check_not_pole(center)
        jet = self.numerator.taylor(center, length)
        for root, mult in self.poles:
            jet = series.multiply(jet, series.shifted_power(center - root, -mult, length), length)
        return jet

    def laurent_at(self, center: complex, length: int) -> Tuple[int, np.ndarray]:
        """(lowest exponent, coefficients) of the Laurent expansion in (λ − center)."""
        mult = self.pole_multiplicity(center)
        if mult == 0:
            return 0, self.taylor_jet(center, length)
        remaining = [(r, m) for r, m in self.poles if not _close(r, center, ROOT_TOL)]
        regular = RationalFunction(self.numerator, remaining)
        return -mult, regular.taylor_jet(center, length)

    def laurent_at_infinity_full(self, length: int) -> Tuple[int, np.ndarray]:
        """
        Expansion at ∞ as Σᵢ cᵢ λ^{e−i}.

        Returns:
            Tuple of (top exponent e = deg N − deg denominator, coefficients c₀…)
        """
        if self.numerator.is_zero:
            return 0, np.zeros(length, dtype=complex)
        d = self.numerator.degree
        top = d - self.denominator_degree
        expansion = series.as_series(self.numerator.coefficients[::-1], length)
        for root, mult in self.poles:
            expansion = series.multiply(
                expansion, series.inverse_binomial_at_infinity(root, mult, length), length
            )
        return top, expansion

    def laurent_at_infinity(self, length: int) -> np.ndarray:
        """Coefficients of λ⁰, λ⁻¹, … for a function bounded at ∞."""
        top, expansion = self.laurent_at_infinity_full(length)
        if top > 0:
            raise UnboundedAtInfinity(
                "Function is unbounded at infinity", {"degree_excess": top}
            )
        out = np.zeros(length, dtype=complex)
        shift = -top
        if shift < length:
            out[shift:] = expansion[: length - shift]
        return out

    def vanishing_order(self, center: complex, limit: int, rtol: float) -> int:
        """Order of vanishing of the numerator at `center`, capped at `limit`."""
        if self.numerator.is_zero:
            return limit
        jet = self.numerator.taylor(center, limit)
        reference = self.numerator.scale() * max(1.0, abs(center)) ** max(self.numerator.degree, 0)
        for order, coefficient in enumerate(jet):
            if abs(coefficient) > rtol * reference:
                return order
        return limit

    def reduced(self, rtol: float = 1e-9) -> "RationalFunction":
        """Cancel numerator factors at denominator roots."""
        numerator = self.numerator
        poles = []
        for root, mult in self.poles:
            while mult > 0 and not numerator.is_zero:
                reference = numerator.scale() * max(1.0, abs(root)) ** numerator.degree
                if abs(numerator(root)) > rtol * reference:
                    break
                numerator = numerator.divide_linear(root)
                mult -= 1
            poles.append((root, mult))
        return RationalFunction(numerator, poles)

    def reflect_sigma(self) -> "RationalFunction":
        """λ ↦ f(−λ)."""
        signs = np.array([(-1) ** k for k in range(self.numerator.coefficients.size)])
        overall = (-1) ** self.denominator_degree
        numerator = Poly(self.numerator.coefficients * signs * overall)
        return RationalFunction(numerator, [(-r, m) for r, m in self.poles])

    def reflect_tau(self, t: float) -> "RationalFunction":
        """λ ↦ conj(f(t/λ̄)), again a rational function of λ."""
        coeffs = self.numerator.coefficients
        d = self.numerator.degree if not self.numerator.is_zero else 0
        reversed_coeffs = np.array([np.conj(coeffs[k]) * t ** k for k in range(d + 1)])[::-1]
        numerator = Poly(reversed_coeffs)
        constant = 1.0 + 0j
        poles: List[Tuple[complex, int]] = []
        for root, mult in self.poles:
            if root == 0:
                constant *= t ** mult
            else:
                constant *= (-np.conj(root)) ** mult
                poles.append((t / np.conj(root), mult))
        excess = self.denominator_degree - d
        if excess >= 0:
            numerator = numerator * Poly.monomial(excess)
        else:
            poles.append((0j, -excess))
        return RationalFunction.from_parts(numerator * (1.0 / constant), poles)

    def __repr__(self) -> str:
        return f"RationalFunction({self.numerator!r}, poles={list(self.poles)})"


@dataclass(frozen=True)
class PrincipalPart:
    """
    Coefficients of kʲ dk⁻¹ for j = order … 1 in a local parameter k.

    `coefficients[0]` is the j = order term; the last entry (j = 1) is the
    residue term.
    """

    order: int
    coefficients: Tuple[complex, ...]

    def coefficient(self, j: int) -> complex:
        if j < 1 or j > self.order:
            return 0j
        return self.coefficients[self.order - j]

    @property
    def leading(self) -> complex:
        return self.coefficient(self.order)

    @property
    def residue(self) -> complex:
        return self.coefficient(1)


class RationalDifferential:
    """ω = f(λ) dλ."""

    __slots__ = ("f",)

    def __init__(self, f: RationalFunction):
        self.f = f

    @classmethod
    def from_numerator(cls, numerator: Sequence[complex], poles: Sequence[Tuple[complex, int]]):
        return cls(RationalFunction(Poly(numerator), poles))

    def __mul__(self, other: Union[RationalFunction, complex, float]) -> "RationalDifferential":
        return RationalDifferential(self.f * other)

    __rmul__ = __mul__

    def scaled(self, factor: complex) -> "RationalDifferential":
        return RationalDifferential(self.f * factor)

    def residue(self, point: Pointish) -> complex:
        """Residue at a finite point (zero away from poles) or at ∞."""
        point = _as_point(point)
        if point.is_infinity:
            top, expansion = self.f.laurent_at_infinity_full(max(top_needed(self.f), 1))
            index = top + 1
            if index < 0:
                return 0j
            return complex(-expansion[index])
        center = point.coordinate()
        mult = self.f.pole_multiplicity(center)
        if mult == 0:
            return 0j
        _, coefficients = self.f.laurent_at(center, mult)
        return complex(coefficients[mult - 1])

    def moment(self, point: complex, j: int) -> complex:
        """Res_p (λ − p)ʲ ω at a finite point; j = 0 is the residue."""
        center = complex(point)
        mult = self.f.pole_multiplicity(center)
        if j >= mult:
            return 0j
        _, coefficients = self.f.laurent_at(center, mult)
        return complex(coefficients[mult - 1 - j])

    def finite_poles(self) -> List[complex]:
        return [r for r, _ in self.f.poles]

    def residue_sum(self) -> complex:
        """Σ of residues over all poles including ∞; zero up to rounding."""
        total = sum((self.residue(r) for r in self.finite_poles()), 0j)
        return total + self.residue(None)

    def pole_order(self, point: Pointish, rtol: float = 1e-12) -> int:
        """Pole order (0 when regular) at a finite point or ∞."""
        point = _as_point(point)
        order = -self.order_at(point, rtol)
        return max(order, 0)

    def order_at(self, point: Pointish, rtol: float = 1e-12, limit: int = 64) -> int:
        """Signed order of ω: positive for zeros, negative for poles."""
        point = _as_point(point)
        if self.f.numerator.is_zero:
            return limit
        if point.is_infinity:
            top, expansion = self.f.laurent_at_infinity_full(limit)
            reference = float(np.max(np.abs(expansion))) or 1.0
            first = next((i for i, c in enumerate(expansion) if abs(c) > rtol * reference), limit)
            # ω = −Σ cᵢ w^{i−top−2} dw in w = 1/λ
            return first - top - 2
        center = point.coordinate()
        mult = self.f.pole_multiplicity(center)
        return self.f.vanishing_order(center, limit, rtol) - mult

    def zero_order(self, point: Pointish, rtol: float = 1e-12) -> int:
        return max(self.order_at(point, rtol), 0)

    def __repr__(self) -> str:
        return f"RationalDifferential({self.f!r})"


def top_needed(f: RationalFunction) -> int:
    """Expansion length at ∞ that reaches the λ⁻¹ coefficient."""
    if f.numerator.is_zero:
        return 1
    return max(f.numerator.degree - f.denominator_degree + 2, 1)


# Operation-level API

def evaluate(rf: RationalFunction, lam):
    return rf.evaluate(lam)


def derivative(rf: RationalFunction) -> RationalFunction:
    return rf.derivative()


def taylor_jet(rf: RationalFunction, center: complex, length: int) -> np.ndarray:
    return rf.taylor_jet(center, length)


def laurent_at_infinity(rf: RationalFunction, length: int) -> np.ndarray:
    return rf.laurent_at_infinity(length)


def residue(omega: RationalDifferential, point: Pointish) -> complex:
    return omega.residue(point)


MARKED_PLUS = "plus"
MARKED_MINUS = "minus"


def principal_part_in_parameter(
    omega: RationalDifferential,
    which: str,
    alpha: complex,
    beta: complex,
    order: int,
) -> PrincipalPart:
    """
    Principal part of ω in k₊ = αλ at ∞ ("plus") or k₋ = β/λ at 0 ("minus").

    The result lists the coefficients of kʲ dk⁻¹ for j = order … 1.

    Raises:
        PoleOrderExceeded: ω has a pole of order greater than `order` there
    """
    f = omega.f
    coefficients: List[complex] = []
    if which == MARKED_PLUS:
        top = f.numerator.degree - f.denominator_degree if not f.numerator.is_zero else -2
        pole = top + 2
        if pole > order:
            raise PoleOrderExceeded(
                f"Pole of order {pole} at ∞₊ exceeds {order}", {"point": "plus", "order": pole}
            )
        _, expansion = f.laurent_at_infinity_full(max(top + 2, 1))
        for j in range(order, 0, -1):
            index = top + 2 - j
            value = -expansion[index] * alpha ** (1 - j) if 0 <= index < expansion.size else 0j
            coefficients.append(complex(value))
    elif which == MARKED_MINUS:
        lowest, expansion = f.laurent_at(0j, max(order, f.pole_multiplicity(0j)) + 1)
        first = next((i for i, c in enumerate(expansion) if c != 0), expansion.size)
        pole = -(lowest + first)
        if pole > order:
            raise PoleOrderExceeded(
                f"Pole of order {pole} at ∞₋ exceeds {order}", {"point": "minus", "order": pole}
            )
        for j in range(order, 0, -1):
            index = -j - lowest
            value = expansion[index] * beta ** (1 - j) if 0 <= index < expansion.size else 0j
            coefficients.append(complex(value))
    else:
        raise ValueError(f"Unknown marked point: {which}")
    return PrincipalPart(order, tuple(coefficients))
