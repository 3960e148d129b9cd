"""
Data model for singular rational spectral curves.

The normalization is always the Riemann sphere realized as the λ-plane plus
the point ∞. The marked points are fixed once: ∞₊ is λ = ∞ with local
parameter k₊ = αλ and ∞₋ is λ = 0 with k₋ = β/λ. A singular curve is
obtained by contracting each gluing class (a set of points with
multiplicities) to one singular point.
"""
import enum
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from finitegap.core.exceptions import InvalidSpecification

logger = logging.getLogger(__name__)

Complexish = Union[complex, float, int]


class OperatorKind(str, enum.Enum):
    SCHRODINGER = "schrodinger"
    DIRAC = "dirac"


@dataclass(frozen=True)
class ProjPoint:
    """A point of ℂP¹: a finite coordinate λ, or ∞ when `value` is None."""

    value: Optional[complex] = None

    def __post_init__(self):
        if self.value is not None:
            value = complex(self.value)
            if value != value or abs(value) == float("inf"):
                raise InvalidSpecification(f"Point coordinate must be finite, got {self.value!r}")
            object.__setattr__(self, "value", value)

    @classmethod
    def finite(cls, value: Complexish) -> "ProjPoint":
        return cls(complex(value))

    @classmethod
    def infinity(cls) -> "ProjPoint":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    @property
    def is_zero(self) -> bool:
        return self.value is not None and self.value == 0

    def coordinate(self) -> complex:
        if self.value is None:
            raise InvalidSpecification("The point ∞ has no finite coordinate")
        return self.value

    def coincides(self, other: "ProjPoint", rtol: float = 1e-9) -> bool:
        """Tolerance comparison, relative in |λ| with `rtol` as absolute floor near 0."""
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        a, b = self.coordinate(), other.coordinate()
        return abs(a - b) <= rtol * max(abs(a), abs(b), 1.0)

    def __str__(self) -> str:
        if self.value is None:
            return "∞"
        return _format_complex(self.value)


INFINITY = ProjPoint.infinity()
ZERO = ProjPoint.finite(0)


def _format_complex(value: complex) -> str:
    if value.imag == 0:
        return f"{value.real:.6g}"
    return f"{value.real:.6g}{value.imag:+.6g}i"


def _as_point(point: Union[ProjPoint, Complexish, None]) -> ProjPoint:
    if isinstance(point, ProjPoint):
        return point
    if point is None:
        return INFINITY
    return ProjPoint.finite(point)


@dataclass(frozen=True)
class WeightedPoint:
    point: ProjPoint
    multiplicity: int = 1

    def __post_init__(self):
        if isinstance(self.multiplicity, bool) or int(self.multiplicity) != self.multiplicity:
            raise InvalidSpecification(f"Multiplicity must be an integer, got {self.multiplicity!r}")
        if self.multiplicity < 1:
            raise InvalidSpecification(f"Multiplicity must be >= 1, got {self.multiplicity}")
        object.__setattr__(self, "multiplicity", int(self.multiplicity))


def _weighted(entries: Iterable) -> Tuple[WeightedPoint, ...]:
    result = []
    for entry in entries:
        if isinstance(entry, WeightedPoint):
            result.append(entry)
        else:
            point, multiplicity = entry
            result.append(WeightedPoint(_as_point(point), multiplicity))
    return tuple(result)


def _check_distinct(members: Sequence[WeightedPoint], what: str) -> None:
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            if a.point.coincides(b.point, 0.0):
                raise InvalidSpecification(f"{what} points must be pairwise distinct: {a.point} repeats")


@dataclass(frozen=True)
class GluingClass:
    """Points of the normalization contracted to one singular point."""

    members: Tuple[WeightedPoint, ...]

    def __post_init__(self):
        members = _weighted(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise InvalidSpecification("A gluing class needs at least one member")
        if sum(m.multiplicity for m in members) < 2:
            raise InvalidSpecification("A gluing class must have total degree >= 2")
        for m in members:
            if m.point.is_infinity or m.point.is_zero:
                raise InvalidSpecification(
                    "Gluing class members must avoid the marked points 0 and ∞",
                    {"point": str(m.point)},
                )
        _check_distinct(members, "Gluing class")

    @classmethod
    def of(cls, entries: Iterable) -> "GluingClass":
        """Build from (λ, multiplicity) pairs."""
        return cls(_weighted(entries))

    @property
    def degree(self) -> int:
        return sum(m.multiplicity for m in self.members)

    def __iter__(self) -> Iterator[WeightedPoint]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{m.point}·{m.multiplicity}" for m in self.members) + "}"


@dataclass(frozen=True)
class PoleDivisor:
    """An effective divisor Σ nₚ P of allowed poles."""

    entries: Tuple[WeightedPoint, ...] = ()

    def __post_init__(self):
        entries = _weighted(self.entries)
        object.__setattr__(self, "entries", entries)
        _check_distinct(entries, "Divisor")

    @classmethod
    def of(cls, entries: Iterable = ()) -> "PoleDivisor":
        return cls(_weighted(entries))

    @classmethod
    def points(cls, *values: Complexish) -> "PoleDivisor":
        """Multiplicity-one divisor through the given finite points."""
        return cls(tuple(WeightedPoint(ProjPoint.finite(v), 1) for v in values))

    @property
    def degree(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def finite_entries(self) -> List[Tuple[complex, int]]:
        return [(e.point.coordinate(), e.multiplicity) for e in self.entries if not e.point.is_infinity]

    def multiplicity_at_infinity(self) -> int:
        return sum(e.multiplicity for e in self.entries if e.point.is_infinity)

    def plus(self, point: Union[ProjPoint, Complexish, None], multiplicity: int = 1) -> "PoleDivisor":
        """Return D + n·P, merging with an existing entry at P."""
        point = _as_point(point)
        entries = list(self.entries)
        for i, e in enumerate(entries):
            if e.point.coincides(point, 0.0):
                entries[i] = WeightedPoint(e.point, e.multiplicity + multiplicity)
                return PoleDivisor(tuple(entries))
        entries.append(WeightedPoint(point, multiplicity))
        return PoleDivisor(tuple(entries))

    def __iter__(self) -> Iterator[WeightedPoint]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "0"
        return " + ".join(f"{e.multiplicity}·{e.point}" if e.multiplicity > 1 else str(e.point) for e in self.entries)


@dataclass(frozen=True)
class CurveSpec:
    """
    A singular rational spectral curve with its marked-point data.

    Relational conditions (disjoint supports, the τ constraint β = −ᾱt,
    σ-compatibility) are checked by `finitegap.analysis.validation.validate`
    rather than at construction, so that inadmissible data can be reported.
    """

    alpha: complex = 1.0
    beta: complex = 1.0
    classes: Tuple[GluingClass, ...] = ()
    sigma_declared: bool = False
    tau_param: Optional[float] = None

    def __post_init__(self):
        alpha, beta = complex(self.alpha), complex(self.beta)
        if alpha == 0 or beta == 0:
            raise InvalidSpecification("alpha and beta must be nonzero")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "classes", tuple(self.classes))
        if self.tau_param is not None:
            t = self.tau_param
            if isinstance(t, complex):
                if t.imag != 0:
                    raise InvalidSpecification("tau_param must be real")
                t = t.real
            t = float(t)
            if t == 0:
                raise InvalidSpecification("tau_param must be nonzero")
            object.__setattr__(self, "tau_param", t)

    def supports(self) -> List[Tuple[complex, int]]:
        """All support points with multiplicities, class by class."""
        return [(m.point.coordinate(), m.multiplicity) for cls in self.classes for m in cls.members]

    def k_plus(self, lam: complex) -> complex:
        return self.alpha * lam

    def k_minus(self, lam: complex) -> complex:
        return self.beta / lam


def delta_invariant(gluing_class: GluingClass) -> int:
    """δ of the singular point obtained by contracting the class: deg B − 1."""
    return gluing_class.degree - 1


def arithmetic_genus(spec: CurveSpec) -> int:
    """p_a = p_g + Σ δ with p_g = 0 for the rational normalization."""
    return sum(delta_invariant(cls) for cls in spec.classes)


def sigma_image(point: ProjPoint) -> ProjPoint:
    """σ(λ) = −λ; fixes 0 and ∞."""
    if point.is_infinity:
        return INFINITY
    return ProjPoint.finite(-point.coordinate())


def tau_image(spec: CurveSpec, point: ProjPoint) -> ProjPoint:
    """τ(λ) = t/λ̄; exchanges 0 and ∞."""
    if spec.tau_param is None:
        raise InvalidSpecification("tau_image requires tau_param")
    if point.is_infinity:
        return ZERO
    value = point.coordinate()
    if value == 0:
        return INFINITY
    return ProjPoint.finite(spec.tau_param / value.conjugate())


def required_divisor_degree(spec: CurveSpec, kind: OperatorKind) -> int:
    genus = arithmetic_genus(spec)
    return genus if OperatorKind(kind) is OperatorKind.SCHRODINGER else genus + 1
