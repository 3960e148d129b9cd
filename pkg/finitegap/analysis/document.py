"""
Spec documents: the JSON (or YAML) description of a curve, a pole divisor,
a sampling grid and tolerance overrides.

Complex numbers are written as two-element arrays [re, im]; a bare number
is read as a real value. Divisor points may be "inf".
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from finitegap.core.config import Tolerances, resolve_tolerances
from finitegap.core.exceptions import DocumentError, InvalidSpecification
from finitegap.core.models import CurveSpec, GluingClass, PoleDivisor, ProjPoint, WeightedPoint
from finitegap.services.grid import Grid

logger = logging.getLogger(__name__)

ComplexPair = Tuple[float, float]


def _complex_pair(value: Any) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return (float(value), 0.0)
    return value


def _to_complex(pair: ComplexPair) -> complex:
    return complex(pair[0], pair[1])


# Models
class PointEntry(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lambda_: Union[Literal["inf"], ComplexPair] = Field(alias="lambda")
    multiplicity: int = Field(default=1, ge=1)

    @field_validator("lambda_", mode="before")
    @classmethod
    def coerce_lambda(cls, value: Any) -> Any:
        return _complex_pair(value)

    def to_weighted(self) -> WeightedPoint:
        if self.lambda_ == "inf":
            return WeightedPoint(ProjPoint.infinity(), self.multiplicity)
        return WeightedPoint(ProjPoint.finite(_to_complex(self.lambda_)), self.multiplicity)


class PointSet(BaseModel):
    model_config = ConfigDict(extra="forbid")

    points: List[PointEntry] = Field(default_factory=list)


class GridEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x_min: float = -1.0
    x_max: float = 1.0
    y_min: float = -1.0
    y_max: float = 1.0
    nx: int = Field(default=21, ge=1)
    ny: int = Field(default=21, ge=1)


class SpecDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: ComplexPair = (1.0, 0.0)
    beta: ComplexPair = (1.0, 0.0)
    classes: List[PointSet] = Field(default_factory=list)
    poles: PointSet = Field(default_factory=PointSet)
    sigma: bool = False
    tau: Optional[float] = None
    grid: GridEntry = Field(default_factory=GridEntry)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    seed: int = 0

    @field_validator("alpha", "beta", mode="before")
    @classmethod
    def coerce_complex(cls, value: Any) -> Any:
        return _complex_pair(value)

    @field_validator("tolerances")
    @classmethod
    def known_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        unknown = set(value) - set(Tolerances.model_fields)
        if unknown:
            raise ValueError(f"unknown tolerance fields: {', '.join(sorted(unknown))}")
        return value

    def to_curve(self) -> CurveSpec:
        classes = []
        for i, entry in enumerate(self.classes):
            with _field(f"classes.{i}"):
                for j, point in enumerate(entry.points):
                    if point.lambda_ == "inf":
                        raise DocumentError(
                            "Gluing classes cannot contain ∞", {"field": f"classes.{i}.points.{j}.lambda"}
                        )
                classes.append(GluingClass(tuple(p.to_weighted() for p in entry.points)))
        with _field("$"):
            return CurveSpec(
                alpha=_to_complex(self.alpha),
                beta=_to_complex(self.beta),
                classes=tuple(classes),
                sigma_declared=self.sigma,
                tau_param=self.tau,
            )

    def to_divisor(self) -> PoleDivisor:
        with _field("poles"):
            return PoleDivisor(tuple(p.to_weighted() for p in self.poles.points))

    def to_grid(self) -> Grid:
        return Grid(**self.grid.model_dump())

    def to_tolerances(self, base: Optional[Tolerances] = None) -> Tolerances:
        return resolve_tolerances(base).merged(self.tolerances)

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json", by_alias=True), sort_keys=True, separators=(",", ":"))

    @property
    def spec_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


class _field:
    """Re-raise domain construction errors as DocumentError addressed at `name`."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None and issubclass(exc_type, InvalidSpecification):
            raise DocumentError(exc.message, {"field": self.name, **exc.details}) from exc
        return False


def parse_document(data: Any) -> SpecDocument:
    """Validate an already-decoded document."""
    if not isinstance(data, dict):
        raise DocumentError("Spec document must be an object", {"field": "$"})
    try:
        return SpecDocument.model_validate(data)
    except ValidationError as e:
        errors = e.errors()
        first = errors[0]
        field = ".".join(str(part) for part in first["loc"]) or "$"
        raise DocumentError(
            f"{field}: {first['msg']}",
            {"field": field, "errors": [{"field": ".".join(map(str, err["loc"])), "message": err["msg"]} for err in errors]},
        ) from e


def parse_text(text: str, fmt: str = "json") -> SpecDocument:
    try:
        data = json.loads(text) if fmt == "json" else yaml.safe_load(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"Invalid JSON: {e.msg}", {"field": "$", "line": e.lineno, "column": e.colno}) from e
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        details: Dict[str, Any] = {"field": "$"}
        if mark is not None:
            details.update(line=mark.line + 1, column=mark.column + 1)
        raise DocumentError(f"Invalid YAML: {e}", details) from e
    return parse_document(data)


def load_document(path: Union[str, Path]) -> SpecDocument:
    """Read a spec document; `.yaml`/`.yml` files are parsed as YAML, anything else as JSON."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"Cannot read {path}: {e.strerror}", {"field": "$", "path": str(path)}) from e
    fmt = "yaml" if path.suffix.lower() in (".yaml", ".yml") else "json"
    logger.info(f"Loading {fmt} spec document {path}")
    return parse_text(text, fmt)
