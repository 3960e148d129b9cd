"""
Seeded random admissible configurations for property suites and `rr --random`.

Points are drawn in the annulus r_min ≤ |λ| ≤ r_max and kept at least
`min_separation` apart from each other and from anything in `avoid`, which
keeps the dimension counts and the gluing systems well conditioned.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from finitegap.core.exceptions import InvalidRequest
from finitegap.core.models import (
    CurveSpec,
    GluingClass,
    OperatorKind,
    PoleDivisor,
    ProjPoint,
    WeightedPoint,
    arithmetic_genus,
    required_divisor_degree,
)

logger = logging.getLogger(__name__)

MIN_SEPARATION = 0.1
MAX_ATTEMPTS = 1000


@dataclass(frozen=True)
class RandomInstance:
    spec: CurveSpec
    divisor: PoleDivisor


def random_points(
    rng: np.random.Generator,
    count: int,
    avoid: Sequence[complex] = (),
    min_separation: float = MIN_SEPARATION,
    r_min: float = 0.4,
    r_max: float = 2.0,
) -> List[complex]:
    """
    Raises:
        InvalidRequest: no admissible set was found
    """
    taken = [complex(a) for a in avoid] + [0j]
    points: List[complex] = []
    for _ in range(MAX_ATTEMPTS):
        if len(points) == count:
            return points
        radius = rng.uniform(r_min, r_max)
        angle = rng.uniform(0.0, 2 * np.pi)
        candidate = complex(radius * np.cos(angle), radius * np.sin(angle))
        if all(abs(candidate - other) >= min_separation for other in taken + points):
            points.append(candidate)
    if len(points) == count:
        return points
    raise InvalidRequest(f"Could not place {count} points {min_separation:g} apart", {"count": count})


def random_curve(
    rng: np.random.Generator,
    max_genus: int = 4,
    max_classes: int = 3,
    max_multiplicity: int = 3,
    min_classes: int = 1,
    unit_exponents: bool = False,
) -> CurveSpec:
    """A curve with min_classes … max_classes gluing classes and p_a ≤ max_genus."""
    if max_genus < min_classes:
        raise InvalidRequest("Every class adds at least 1 to the genus", {"max_genus": max_genus})
    n_classes = int(rng.integers(min_classes, max_classes + 1))
    n_classes = min(n_classes, max_genus)
    budget = max_genus
    shapes = []
    for index in range(n_classes):
        # each class keeps δ ≥ 1 and leaves δ = 1 for every class still to come
        remaining = n_classes - index - 1
        delta = int(rng.integers(1, budget - remaining + 1))
        budget -= delta
        degree = delta + 1
        multiplicities = []
        while degree > 0:
            m = int(rng.integers(1, min(max_multiplicity, degree) + 1))
            multiplicities.append(m)
            degree -= m
        shapes.append(multiplicities)
    points = random_points(rng, sum(len(s) for s in shapes))
    classes = []
    for multiplicities in shapes:
        members, points = points[: len(multiplicities)], points[len(multiplicities):]
        classes.append(GluingClass(tuple(WeightedPoint(ProjPoint.finite(q), m) for q, m in zip(members, multiplicities))))
    if unit_exponents:
        alpha, beta = 1.0, 1.0
    else:
        alpha = complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5))
        beta = complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5))
    spec = CurveSpec(alpha=alpha, beta=beta, classes=tuple(classes))
    logger.debug(f"Random curve with p_a = {arithmetic_genus(spec)}")
    return spec


def random_divisor(
    rng: np.random.Generator,
    spec: CurveSpec,
    degree: int,
    allow_marked: bool = False,
    max_multiplicity: int = 1,
) -> PoleDivisor:
    """
    A divisor of the given degree away from the supports. With
    `allow_marked` the points 0 and ∞ may carry part of the degree.
    """
    supports = [q for q, _ in spec.supports()]
    divisor = PoleDivisor()
    remaining = degree
    if allow_marked:
        for point in (ProjPoint.infinity(), ProjPoint.finite(0)):
            if remaining and rng.random() < 0.3:
                n = int(rng.integers(1, min(max_multiplicity, remaining) + 1))
                divisor = divisor.plus(point, n)
                remaining -= n
    multiplicities = []
    while remaining > 0:
        m = int(rng.integers(1, min(max_multiplicity, remaining) + 1))
        multiplicities.append(m)
        remaining -= m
    for p, m in zip(random_points(rng, len(multiplicities), avoid=supports), multiplicities):
        divisor = divisor.plus(p, m)
    return divisor


def random_instance(
    rng: np.random.Generator,
    kind: OperatorKind = OperatorKind.SCHRODINGER,
    max_genus: int = 4,
    max_classes: int = 3,
    max_multiplicity: int = 3,
) -> RandomInstance:
    """An admissible Baker–Akhiezer configuration with a multiplicity-free divisor."""
    spec = random_curve(rng, max_genus, max_classes, max_multiplicity)
    degree = required_divisor_degree(spec, kind)
    return RandomInstance(spec, random_divisor(rng, spec, degree))


def random_rr_instance(
    rng: np.random.Generator,
    max_genus: int = 4,
    max_degree: int = 6,
    max_multiplicity: int = 3,
    min_classes: int = 0,
) -> RandomInstance:
    """A curve and a divisor of degree 0 … max_degree that may touch 0 and ∞."""
    if min_classes == 0 and rng.random() < 0.1:
        spec = CurveSpec()
    else:
        spec = random_curve(rng, max_genus, 3, max_multiplicity, min_classes=max(min_classes, 1), unit_exponents=True)
    degree = int(rng.integers(0, max_degree + 1))
    return RandomInstance(spec, random_divisor(rng, spec, degree, allow_marked=True, max_multiplicity=2))


def seeded_rng(seed: Optional[int] = 0) -> np.random.Generator:
    return np.random.default_rng(seed)
