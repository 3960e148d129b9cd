import json

import pytest

from finitegap.analysis.document import load_document, parse_document, parse_text
from finitegap.core.config import Tolerances
from finitegap.core.exceptions import DocumentError

NODE_DOCUMENT = {
    "alpha": [1.2, 0.3],
    "beta": 0.7,
    "classes": [{"points": [{"lambda": 1.0}, {"lambda": [-0.5, 0.8]}]}],
    "poles": {"points": [{"lambda": [0.3, 1.1]}]},
    "grid": {"nx": 3, "ny": 4},
    "tolerances": {"residual": 1e-7},
    "seed": 5,
}


def test_parse_node_document():
    """Test conversion to curve, divisor, grid and tolerances."""
    document = parse_document(NODE_DOCUMENT)
    spec = document.to_curve()
    assert spec.alpha == 1.2 + 0.3j
    assert spec.beta == 0.7
    assert len(spec.classes) == 1
    divisor = document.to_divisor()
    assert divisor.finite_entries() == [(0.3 + 1.1j, 1)]
    assert document.to_grid().shape == (3, 4)
    tolerances = document.to_tolerances(Tolerances())
    assert tolerances.residual == 1e-7
    assert tolerances.rank == Tolerances().rank


def test_divisor_at_infinity_and_multiplicity():
    """Test "inf" entries and multiplicities."""
    document = parse_document({"poles": {"points": [{"lambda": "inf", "multiplicity": 2}, {"lambda": 2.0}]}})
    divisor = document.to_divisor()
    assert divisor.multiplicity_at_infinity() == 2
    assert divisor.degree == 3


def test_infinity_in_class_rejected():
    """Test that gluing classes stay finite."""
    with pytest.raises(DocumentError) as excinfo:
        parse_document({"classes": [{"points": [{"lambda": 1.0}, {"lambda": "inf"}]}]}).to_curve()
    assert excinfo.value.details["field"] == "classes.0.points.1.lambda"


def test_validation_error_names_field():
    """Test that schema errors carry the dotted field path."""
    with pytest.raises(DocumentError) as excinfo:
        parse_document({"poles": {"points": [{"lambda": 1.0, "multiplicity": 0}]}})
    assert excinfo.value.details["field"] == "poles.points.0.multiplicity"
    with pytest.raises(DocumentError) as excinfo:
        parse_document({"gamma": 1})
    assert excinfo.value.details["field"] == "gamma"
    with pytest.raises(DocumentError):
        parse_document({"tolerances": {"nonsense": 1.0}})
    with pytest.raises(DocumentError):
        parse_document([1, 2])


def test_domain_error_names_field():
    """Test that coincident class points are reported against their class."""
    document = parse_document({"classes": [{"points": [{"lambda": 1.0}, {"lambda": 1.0}]}]})
    with pytest.raises(DocumentError) as excinfo:
        document.to_curve()
    assert excinfo.value.details["field"] == "classes.0"


def test_malformed_json_position():
    """Test line and column of a JSON syntax error."""
    with pytest.raises(DocumentError) as excinfo:
        parse_text('{\n  "alpha": [1, 0],\n  "beta": \n}')
    assert excinfo.value.details["line"] == 4


def test_yaml_document(tmp_path):
    """Test that .yaml files are read as YAML."""
    path = tmp_path / "node.yaml"
    path.write_text("alpha: [1.2, 0.3]\nbeta: 0.7\npoles:\n  points:\n    - lambda: [0.3, 1.1]\n")
    document = load_document(path)
    assert document.to_curve().alpha == 1.2 + 0.3j
    assert document.to_divisor().degree == 1


def test_missing_file(tmp_path):
    """Test unreadable paths."""
    with pytest.raises(DocumentError):
        load_document(tmp_path / "absent.json")


def test_spec_hash_is_canonical(tmp_path):
    """Test that key order and formatting do not change the hash."""
    first = parse_document(NODE_DOCUMENT)
    reordered = json.loads(json.dumps(NODE_DOCUMENT, sort_keys=True))
    path = tmp_path / "node.json"
    path.write_text(json.dumps(reordered, indent=4))
    assert load_document(path).spec_hash == first.spec_hash
    changed = dict(NODE_DOCUMENT, seed=6)
    assert parse_document(changed).spec_hash != first.spec_hash
