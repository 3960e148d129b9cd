import logging
from typing import Dict, Tuple

import click

from finitegap.analysis.document import SpecDocument, load_document
from finitegap.core.config import Tolerances
from finitegap.core.exceptions import DocumentError
from finitegap.core.models import PoleDivisor, ProjPoint, WeightedPoint

logger = logging.getLogger(__name__)


def parse_complex(text: str) -> complex:
    """Accept 1.5, -2, 1+2i or 1+2j."""
    return complex(text.strip().replace(" ", "").replace("i", "j"))


class ComplexParam(click.ParamType):
    name = "complex"

    def convert(self, value, param, ctx):
        if isinstance(value, complex):
            return value
        try:
            return parse_complex(str(value))
        except ValueError:
            self.fail(f"{value!r} is not a complex number", param, ctx)


COMPLEX = ComplexParam()


def parse_divisor(text: str) -> PoleDivisor:
    """
    Parse "p1, p2:2, inf" into a divisor; ":n" sets a multiplicity.

    Raises:
        DocumentError: a token is malformed
    """
    entries = []
    for i, token in enumerate(t.strip() for t in text.split(",")):
        if not token:
            continue
        value, _, multiplicity = token.partition(":")
        try:
            n = int(multiplicity) if multiplicity else 1
            point = ProjPoint.infinity() if value.strip().lower() in ("inf", "∞") else ProjPoint.finite(parse_complex(value))
            entries.append(WeightedPoint(point, n))
        except ValueError as e:
            raise DocumentError(f"Bad divisor entry {token!r}: {e}", {"field": f"divisor.{i}"}) from e
    try:
        return PoleDivisor(tuple(entries))
    except ValueError as e:
        raise DocumentError(str(e), {"field": "divisor"}) from e


def parse_tolerance_overrides(pairs: Tuple[str, ...]) -> Dict[str, float]:
    overrides = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or name not in Tolerances.model_fields:
            raise DocumentError(f"Bad tolerance override {pair!r}", {"field": f"tol.{name}"})
        try:
            overrides[name] = float(value)
        except ValueError as e:
            raise DocumentError(f"Bad tolerance value {value!r}", {"field": f"tol.{name}"}) from e
    return overrides


def load_spec(ctx: click.Context, path: str) -> Tuple[SpecDocument, Tolerances]:
    """Load a document and merge tolerances: defaults, then document, then --tol flags."""
    document = load_document(path)
    tolerances = document.to_tolerances().merged(ctx.obj.get("TOLERANCE_OVERRIDES"))
    return document, tolerances
