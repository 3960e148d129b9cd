"""
One-dimensional degenerations on the rational curve w² = E.

ψ(w, x) = e^{wx}(w + a(x))/(w − p) with one pole p, glued either as a
double point at w = 0 or as the pair {q, −q}. With ξ₁ = a + p the
potential u = −2∂ₓξ₁ satisfies ψ″ + uψ = w²ψ.
"""
import enum
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from finitegap.core.config import Tolerances, resolve_tolerances
from finitegap.core.exceptions import DegeneratePosition, InvalidSpecification
from finitegap.services.grid import check_samples

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-12


class OneDGluing(str, enum.Enum):
    DOUBLE = "double"
    PAIR = "pair"


@dataclass(frozen=True)
class OneDConfig:
    gluing: OneDGluing
    p: complex
    q: Optional[complex] = None

    def __post_init__(self):
        object.__setattr__(self, "gluing", OneDGluing(self.gluing))
        p = complex(self.p)
        if p == 0:
            raise InvalidSpecification("The pole p must differ from the glued point 0")
        object.__setattr__(self, "p", p)
        if self.gluing is OneDGluing.PAIR:
            if self.q is None or complex(self.q) == 0:
                raise InvalidSpecification("A pair gluing needs q ≠ 0")
            q = complex(self.q)
            if p == q or p == -q:
                raise InvalidSpecification("The pole p must avoid ±q", {"p": str(p), "q": str(q)})
            object.__setattr__(self, "q", q)
        elif self.q is not None:
            raise InvalidSpecification("q applies to the pair gluing only")

    @classmethod
    def double(cls, p: complex) -> "OneDConfig":
        return cls(OneDGluing.DOUBLE, p)

    @classmethod
    def pair(cls, p: complex, q: complex) -> "OneDConfig":
        return cls(OneDGluing.PAIR, p, q)

    @property
    def glued_points(self) -> List[complex]:
        if self.gluing is OneDGluing.DOUBLE:
            return [0j]
        return [self.q, -self.q]


@dataclass(frozen=True)
class OneDWave:
    """R(w) = (w + a)/(w − p) with the analytic x-derivatives of a."""

    config: OneDConfig
    x: float
    a: complex
    da: complex
    d2a: complex

    @property
    def xi1(self) -> complex:
        return self.a + self.config.p

    @property
    def potential(self) -> complex:
        return -2 * self.da

    def prefactor(self, w: complex) -> complex:
        return (w + self.a) / (w - self.config.p)

    def psi(self, w: complex) -> complex:
        return np.exp(w * self.x) * self.prefactor(w)


def _phase(config: OneDConfig, x: float) -> complex:
    """ℓ/2 with ℓ = 2qx + log((p + q)/(p − q)), so that r = e^ℓ."""
    p, q = config.p, config.q
    return q * x + 0.5 * np.log((p + q) / (p - q))


def solve_1d_wave(config: OneDConfig, x: float) -> OneDWave:
    """
    Solve the 1×1 gluing condition at x.

    Double point: ∂_w ψ = 0 at w = 0 gives a = −p/(px + 1).
    Pair: ψ(q) = ψ(−q) gives a = −q coth(ℓ/2).

    Raises:
        DegeneratePosition: the gluing equation has no solution at x
    """
    x = float(x)
    p = config.p
    if config.gluing is OneDGluing.DOUBLE:
        s = p * x + 1
        if abs(s) <= DEGENERACY_TOL * max(abs(p * x), 1.0):
            raise DegeneratePosition(f"Double-point gluing degenerates at x = {x:g}", {"x": x, "p": str(p)})
        return OneDWave(config, x, -p / s, p**2 / s**2, -2 * p**3 / s**3)
    q = config.q
    half = _phase(config, x)
    sh = np.sinh(half)
    if abs(sh) <= DEGENERACY_TOL:
        raise DegeneratePosition(f"Pair gluing degenerates at x = {x:g}", {"x": x, "p": str(p), "q": str(q)})
    coth = np.cosh(half) / sh
    return OneDWave(config, x, complex(-q * coth), complex(q**2 / sh**2), complex(-2 * q**3 * coth / sh**2))


@dataclass(frozen=True, eq=False)
class OneDPotential:
    xs: np.ndarray
    u: np.ndarray
    xi1: np.ndarray
    ok: np.ndarray
    errors: List[str]


def potential_1d(config: OneDConfig, xs: Sequence[float]) -> OneDPotential:
    """u(x) = −2∂ₓξ₁ sampled at `xs`; degenerate positions are flagged, not fatal."""
    xs = np.asarray(xs, dtype=float)
    u = np.full(xs.shape, np.nan + 0j)
    xi1 = np.full(xs.shape, np.nan + 0j)
    ok = np.zeros(xs.shape, dtype=bool)
    errors = []
    for i, x in enumerate(xs):
        try:
            wave = solve_1d_wave(config, x)
        except DegeneratePosition as e:
            errors.append(f"x = {x:g}: {e.message}")
            continue
        u[i], xi1[i], ok[i] = wave.potential, wave.xi1, True
    if errors:
        logger.info(f"{len(errors)} of {xs.size} positions are degenerate")
    return OneDPotential(xs, u, xi1, ok, errors)


def closed_form_potential(config: OneDConfig, xs: Sequence[float]) -> np.ndarray:
    """
    Reference profiles: −2/(x + 1/p)² for the double point; for the pair
    +2q²/cosh²(qx + φ) when (p + q)/(p − q) < 0 and −2q²/sinh²(qx + φ)
    when it is positive, φ = ½ log|(p + q)/(p − q)|.
    """
    xs = np.asarray(xs, dtype=float)
    if config.gluing is OneDGluing.DOUBLE:
        return -2.0 / (xs + 1.0 / config.p) ** 2
    p, q = config.p, config.q
    ratio = (p + q) / (p - q)
    if ratio.imag != 0 or q.imag != 0:
        raise InvalidSpecification("Closed-form profiles need real q and real (p + q)/(p − q)")
    q = q.real
    theta = q * xs + 0.5 * np.log(abs(ratio.real))
    if ratio.real < 0:
        return 2 * q**2 / np.cosh(theta) ** 2
    return -2 * q**2 / np.sinh(theta) ** 2


def residual_1d(
    config: OneDConfig,
    samples: Sequence[Tuple[complex, float]],
    tolerances: Optional[Tolerances] = None,
    perturbation: complex = 0.0,
) -> float:
    """
    max over (w, x) of |ψ″ + uψ − w²ψ| relative to the largest term, with
    ψ″ = e^{wx}[w²(w + a) + 2wa′ + a″]/(w − p).

    Raises:
        SampleTooClose: w is near 0, ±q or p
    """
    tolerances = resolve_tolerances(tolerances)
    forbidden = [0j, config.p] + config.glued_points
    worst = 0.0
    eps = np.finfo(float).eps
    for w, x in samples:
        (w,) = check_samples([w], forbidden, tolerances.sample_distance)
        wave = solve_1d_wave(config, x)
        u = wave.potential + perturbation
        psi = wave.psi(w)
        second = np.exp(w * wave.x) * (w**2 * (w + wave.a) + 2 * w * wave.da + wave.d2a) / (w - config.p)
        scale = max(abs(second), abs(u * psi), abs(w**2 * psi), eps)
        worst = max(worst, abs(second + u * psi - w**2 * psi) / scale)
    logger.debug(f"1D residual over {len(samples)} samples: {worst:.3e}")
    return float(worst)
