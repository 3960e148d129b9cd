"""
The exponential core E(λ) = exp(αλz + (β/λ)z̄) shared by every wave.
"""
import cmath
from dataclasses import dataclass

import numpy as np

from finitegap.algebra import series
from finitegap.algebra.rational import RationalFunction, Poly
from finitegap.core.exceptions import EvaluationAtPole
from finitegap.core.models import CurveSpec


@dataclass(frozen=True)
class ExponentialCore:
    alpha: complex
    beta: complex
    x: float
    y: float

    @classmethod
    def at(cls, spec: CurveSpec, x: float, y: float) -> "ExponentialCore":
        return cls(spec.alpha, spec.beta, float(x), float(y))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @property
    def zbar(self) -> complex:
        return complex(self.x, -self.y)

    def phase(self, lam: complex) -> complex:
        if lam == 0:
            raise EvaluationAtPole("The exponential core is singular at λ = 0")
        return self.alpha * lam * self.z + self.beta * self.zbar / lam

    def __call__(self, lam: complex) -> complex:
        return cmath.exp(self.phase(lam))

    def d_lambda(self, lam: complex) -> complex:
        """∂_λE / E."""
        return self.alpha * self.z - self.beta * self.zbar / lam ** 2

    def jet(self, center: complex, length: int) -> np.ndarray:
        """Taylor coefficients of E at `center`."""
        increments = np.zeros(length, dtype=complex)
        for k in range(1, length):
            increments[k] = self.beta * self.zbar * (-1) ** k / center ** (k + 1)
        if length > 1:
            increments[1] += self.alpha * self.z
        return self(center) * series.exp_series(increments, length)

    # Multipliers produced by differentiating E in z and z̄
    def weight(self, name: str) -> RationalFunction:
        if name == "plain":
            return RationalFunction.constant(1.0)
        if name == "z":
            return RationalFunction(Poly([0, self.alpha]))
        if name == "zbar":
            return RationalFunction(Poly([self.beta]), [(0j, 1)])
        if name == "zzbar":
            return RationalFunction.constant(self.alpha * self.beta)
        raise ValueError(f"Unknown weight: {name}")


WEIGHTS = ("plain", "z", "zbar", "zzbar")
