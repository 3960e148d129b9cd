"""
Sampling grids, the per-node worker pool and finite-difference helpers.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Tuple

import numpy as np

from finitegap.core.config import get_settings
from finitegap.core.exceptions import FiniteGapError, InvalidSpecification, SampleTooClose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grid:
    x_min: float = -1.0
    x_max: float = 1.0
    y_min: float = -1.0
    y_max: float = 1.0
    nx: int = 21
    ny: int = 21

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise InvalidSpecification("Grid sizes must be positive", {"nx": self.nx, "ny": self.ny})

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nx, self.ny

    def nodes(self) -> List[Tuple[float, float]]:
        """Row-major in x then y."""
        return [(float(x), float(y)) for x in self.xs for y in self.ys]


@dataclass(frozen=True)
class NodeResult:
    x: float
    y: float
    value: Any = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def map_nodes(
    fn: Callable[[float, float], Any],
    nodes: List[Tuple[float, float]],
    threads: Optional[int] = None,
) -> List[NodeResult]:
    """
    Evaluate `fn` at every node, collecting library errors per node.

    Results keep the input order whatever the worker count.
    """
    threads = threads or get_settings().THREADS

    def run(node: Tuple[float, float]) -> NodeResult:
        x, y = node
        try:
            return NodeResult(x, y, fn(x, y))
        except FiniteGapError as e:
            return NodeResult(x, y, error=f"{type(e).__name__}: {e.message}")

    if threads <= 1:
        results = [run(node) for node in nodes]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(run, nodes))
    failed = sum(1 for r in results if not r.ok)
    if failed:
        logger.info(f"{failed} of {len(results)} grid nodes failed")
    return results


def wirtinger_richardson(
    fn: Callable[[float, float], np.ndarray], x: float, y: float, h: float = 1e-3
) -> Tuple[np.ndarray, np.ndarray]:
    """
    ∂_z f and ∂_z̄ f by Richardson-extrapolated central differences.

    ∂_z = (∂_x − i∂_y)/2 and ∂_z̄ = (∂_x + i∂_y)/2.
    """

    def central(step: float) -> Tuple[np.ndarray, np.ndarray]:
        fx = (np.asarray(fn(x + step, y)) - np.asarray(fn(x - step, y))) / (2 * step)
        fy = (np.asarray(fn(x, y + step)) - np.asarray(fn(x, y - step))) / (2 * step)
        return fx, fy

    fx_h, fy_h = central(h)
    fx_half, fy_half = central(h / 2)
    fx = (4 * fx_half - fx_h) / 3
    fy = (4 * fy_half - fy_h) / 3
    return (fx - 1j * fy) / 2, (fx + 1j * fy) / 2


def check_samples(samples, forbidden, min_distance: float) -> List[complex]:
    """
    Reject λ samples within `min_distance` (relative) of a forbidden point.

    Raises:
        SampleTooClose: a sample is non-finite or too close to a forbidden point
    """
    checked = []
    for lam in samples:
        lam = complex(lam)
        if not np.isfinite(lam):
            raise SampleTooClose("Sample is not finite", {"sample": str(lam)})
        for point in forbidden:
            if abs(lam - point) <= min_distance * max(abs(point), 1.0):
                raise SampleTooClose(
                    f"Sample {lam} is within {min_distance:g} of {point}",
                    {"sample": str(lam), "point": str(point)},
                )
        checked.append(lam)
    return checked


def relative_deviation(analytic: np.ndarray, numeric: np.ndarray) -> float:
    analytic = np.atleast_1d(analytic)
    numeric = np.atleast_1d(numeric)
    if analytic.size == 0:
        return 0.0
    scale = max(float(np.max(np.abs(analytic))), 1.0)
    return float(np.max(np.abs(analytic - numeric))) / scale
