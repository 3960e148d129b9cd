"""
Writers for field samples (CSV with a commented metadata header, or JSON)
and for reports (tabulate tables, or JSON).
"""
import json
import logging
import math
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence

import click
import numpy as np
import pandas as pd
import tabulate

from finitegap import __version__
from finitegap.core.config import Tolerances, get_settings
from finitegap.services.grid import Grid

logger = logging.getLogger(__name__)


def jsonable(value: Any) -> Any:
    """Complex → [re, im], numpy scalars → Python, non-finite floats → None."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [jsonable(float(value.real)), jsonable(float(value.imag))]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def emit_json(data: Any, output: Optional[str] = None) -> None:
    text = json.dumps(jsonable(data), indent=2)
    if output:
        with open(output, "w") as f:
            f.write(text + "\n")
        logger.info(f"JSON written to {output}")
    else:
        click.echo(text)


def metadata(spec_hash: str, p_a: int, tolerances: Tolerances, **extra: Any) -> Dict[str, Any]:
    meta = {"spec_hash": spec_hash, "p_a": p_a, "version": __version__}
    meta.update(extra)
    meta["tolerances"] = tolerances.model_dump()
    return meta


def field_frame(grid: Grid, values: np.ndarray, ok: np.ndarray) -> pd.DataFrame:
    """One row per node, x outer and y inner."""
    xs, ys = np.meshgrid(grid.xs, grid.ys, indexing="ij")
    values = np.asarray(values, dtype=complex)
    return pd.DataFrame(
        {
            "x": xs.ravel(),
            "y": ys.ravel(),
            "re": values.real.ravel(),
            "im": values.imag.ravel(),
            "ok": np.asarray(ok, dtype=bool).ravel(),
        }
    )


def series_frame(xs: np.ndarray, values: np.ndarray, ok: np.ndarray) -> pd.DataFrame:
    values = np.asarray(values, dtype=complex)
    return pd.DataFrame({"x": xs, "re": values.real, "im": values.imag, "ok": np.asarray(ok, dtype=bool)})


def _header(meta: Dict[str, Any], name: str) -> str:
    lines = [f"# field: {name}"]
    for key, value in meta.items():
        if isinstance(value, dict):
            value = json.dumps(jsonable(value), sort_keys=True)
        lines.append(f"# {key}: {value}")
    return "\n".join(lines) + "\n"


def frame_csv(frame: pd.DataFrame, meta: Dict[str, Any], name: str) -> str:
    fmt = get_settings().FLOAT_FORMAT
    return _header(meta, name) + frame.to_csv(index=False, float_format=fmt, lineterminator="\n")


def write_frames(
    frames: Dict[str, pd.DataFrame],
    meta: Dict[str, Any],
    fmt: str,
    output_dir: Optional[str] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> None:
    """
    CSV: one file per field in `output_dir`, or all fields to stdout one
    after another. JSON: one combined document.
    """
    if fmt == "json":
        document = {
            "metadata": meta,
            "fields": {name: frame.to_dict(orient="list") for name, frame in frames.items()},
        }
        if extra:
            document.update(extra)
        emit_json(document, os.path.join(output_dir, "fields.json") if output_dir else None)
        return
    if output_dir:
        os.makedirs(output_dir, exist_ok=True)
        for name, frame in frames.items():
            path = os.path.join(output_dir, f"{name}.csv")
            with open(path, "w") as f:
                f.write(frame_csv(frame, meta, name))
            logger.info(f"Field {name} written to {path}")
    else:
        for name, frame in frames.items():
            click.echo(frame_csv(frame, meta, name), nl=False)
    if extra:
        click.echo(table([(k, format_value(v)) for k, v in extra.items()], ["quantity", "value"]))


def format_value(value: Any) -> str:
    if isinstance(value, (complex, np.complexfloating)):
        if value.imag == 0:
            return f"{value.real:.17g}"
        return f"{value.real:.17g}{value.imag:+.17g}i"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (list, tuple)):
        return ", ".join(format_value(v) for v in value)
    return str(value)


def table(rows: Iterable[Sequence[Any]], headers: List[str]) -> str:
    return tabulate.tabulate([[format_value(c) for c in row] for row in rows], headers=headers, tablefmt="simple")
