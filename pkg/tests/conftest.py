import json
import os
import sys

import numpy as np
import pytest

# Add the project root to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from finitegap.core.config import Tolerances, get_settings
from finitegap.core.exceptions import NonGenericDivisor
from finitegap.core.models import CurveSpec, GluingClass, PoleDivisor

# Serial grids in tests
os.environ["FINITEGAP_THREADS"] = "1"


@pytest.fixture(scope="session")
def test_settings():
    """Get test settings"""
    return get_settings()


@pytest.fixture
def tolerances():
    """Default tolerances"""
    return Tolerances()


@pytest.fixture
def rng():
    """Seeded random generator"""
    return np.random.default_rng(20240517)


@pytest.fixture
def constant_example():
    """Factory for the smooth curve with U = V = c: α = 1, β = −c², D = {c}, σ and τ declared"""

    def build(c: float = 2.0):
        spec = CurveSpec(alpha=1.0, beta=-(c**2), sigma_declared=True, tau_param=c**2)
        return spec, PoleDivisor.points(c)

    return build


@pytest.fixture
def node_curve():
    """One ordinary double point {1, −0.5 + 0.8i} with generic exponents"""
    return CurveSpec(
        alpha=1.2 + 0.3j,
        beta=0.7 - 0.4j,
        classes=(GluingClass.of([(1.0, 1), (-0.5 + 0.8j, 1)]),),
    )


@pytest.fixture
def cusp_curve():
    """One class {1.5·2}: a single point of multiplicity two"""
    return CurveSpec(alpha=1.0, beta=0.8, classes=(GluingClass.of([(1.5, 2)]),))


REALITY_ANGLE = np.pi / 5


@pytest.fixture
def reality_setup():
    """t = 1, class {e^{iπ/5}, e^{−iπ/5}}, D = {1, −1}, α = 1, β = −1; U and V are real"""
    q = np.exp(1j * REALITY_ANGLE)
    spec = CurveSpec(
        alpha=1.0,
        beta=-1.0,
        classes=(GluingClass.of([(q, 1), (q.conjugate(), 1)]),),
        tau_param=1.0,
    )
    return spec, PoleDivisor.points(1.0, -1.0)


@pytest.fixture
def skewed_reality_setup():
    """The same class with D = {p, 1/p̄}, p = 1.3 + 0.4i: τ-invariant but without a regular ω′"""
    q = np.exp(1j * REALITY_ANGLE)
    p = 1.3 + 0.4j
    spec = CurveSpec(
        alpha=1.0,
        beta=-1.0,
        classes=(GluingClass.of([(q, 1), (q.conjugate(), 1)]),),
        tau_param=1.0,
    )
    return spec, PoleDivisor.points(p, 1 / p.conjugate())


@pytest.fixture
def generic_solve(rng):
    """Solve at a random (x, y) in [−1, 1]², redrawing the position where the divisor is non-generic"""

    def solve(fn, attempts: int = 5):
        for _ in range(attempts):
            x, y = (float(v) for v in rng.uniform(-1, 1, size=2))
            try:
                return x, y, fn(x, y)
            except NonGenericDivisor:
                continue
        pytest.fail(f"No generic position in {attempts} attempts")

    return solve


@pytest.fixture
def write_spec(tmp_path):
    """Write a spec document and return its path"""

    def write(document, name="spec.json"):
        path = tmp_path / name
        if name.endswith((".yaml", ".yml")):
            path.write_text(document)
        else:
            path.write_text(json.dumps(document))
        return str(path)

    return write
