"""Byte-stable JSON and CSV output for runs, reports, matrices and ledgers.

Keys are sorted and every float is written with 17 significant digits, so
the same object always produces the same bytes.
"""
import csv
import io
import json
import logging
import math
from dataclasses import asdict
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from .errors import ConfigError, StorageError
from .jacobian import JacobianMatrix
from .ledger import DiscrepancyLedger
from .simulation import RunResult
from .spectral import StabilityReport, StabilityThresholds

logger = logging.getLogger(__name__)

TRACE_HEADER = ("round", "node", "gap", "desync_error")

Exportable = Union[RunResult, StabilityReport, JacobianMatrix, StabilityThresholds, DiscrepancyLedger]


class ExportFormat(str, Enum):
    JSON = "json"
    CSV = "csv"

    @classmethod
    def for_path(cls, path: Union[str, Path]) -> "ExportFormat":
        return cls.CSV if Path(path).suffix.lower() == ".csv" else cls.JSON


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


def _encode(value: Any, level: int = 0) -> str:
    pad = "  " * (level + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(key)}: {_encode(value[key], level + 1)}" for key in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in value):
            return "[" + ", ".join(_encode(v, level + 1) for v in value) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, level + 1) for v in value) + "\n" + "  " * level + "]"
    if isinstance(value, float):
        return format_float(value) if math.isfinite(value) else "null"
    return json.dumps(value)


def _complex_pairs(values: np.ndarray) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def to_document(obj: Exportable) -> Dict[str, Any]:
    """Plain JSON-ready structure for any exportable object."""
    if isinstance(obj, RunResult):
        document = asdict(obj)
        document["trace"] = [asdict(record) for record in obj.trace]
        return _plain(document)
    if isinstance(obj, StabilityReport):
        return _plain({
            "n": obj.n,
            "mode": obj.mode,
            "eigenvalues": _complex_pairs(obj.eigenvalues),
            "spectral_radius": obj.spectral_radius,
            "margin": obj.margin,
            "certificates": [asdict(c) for c in obj.certificates],
            "thresholds": obj.thresholds.as_dict(),
            "verdict": obj.verdict,
            "perception_mode": obj.perception_mode,
            "variant": obj.variant,
            "diagnostics": obj.diagnostics,
        })
    if isinstance(obj, JacobianMatrix):
        return _plain({
            "n": obj.n,
            "provenance": obj.provenance,
            "variant": obj.variant,
            "entries": obj.entries,
        })
    if isinstance(obj, StabilityThresholds):
        return _plain({"thresholds": obj.as_dict(), "max_nodes": obj.max_nodes()})
    if isinstance(obj, DiscrepancyLedger):
        return _plain({
            "tolerance": obj.tolerance,
            "certified_variant": obj.certified_variant,
            "star": [asdict(entry) for entry in obj.star],
            "single_hop": [asdict(entry) for entry in obj.single_hop],
        })
    raise ConfigError(f"cannot export objects of type {type(obj).__name__}")


def dumps(obj: Exportable) -> str:
    return _encode(to_document(obj)) + "\n"


def _csv_rows(obj: Exportable) -> List[List[str]]:
    if isinstance(obj, RunResult):
        rows = [list(TRACE_HEADER)]
        for record in obj.trace:
            error = format_float(record.desync_error)
            for node, gap in enumerate(record.gaps):
                rows.append([str(record.round), str(node), format_float(gap), error])
        return rows
    if isinstance(obj, JacobianMatrix):
        return [[format_float(v) for v in row] for row in obj.entries]
    if isinstance(obj, StabilityReport):
        rows = [["index", "real", "imag", "modulus"]]
        for index, z in enumerate(np.asarray(obj.eigenvalues, dtype=complex)):
            rows.append([str(index), format_float(z.real), format_float(z.imag), format_float(abs(z))])
        return rows
    if isinstance(obj, StabilityThresholds):
        rows = [["name", "value", "max_nodes"]]
        limits = obj.max_nodes()
        for name, value in obj.as_dict().items():
            rows.append([name, format_float(value), str(limits[name])])
        return rows
    raise ConfigError(f"CSV export is not available for {type(obj).__name__}")


def to_csv(obj: Exportable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(_csv_rows(obj))
    return buffer.getvalue()


def export(obj: Exportable, path: Union[str, Path], fmt: Union[ExportFormat, str, None] = None) -> Path:
    """Write ``obj`` to ``path`` as JSON or CSV (inferred from the suffix when omitted)."""
    path = Path(path)
    fmt = ExportFormat.for_path(path) if fmt is None else ExportFormat(fmt)
    text = dumps(obj) if fmt is ExportFormat.JSON else to_csv(obj)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as e:
        raise StorageError(f"cannot write export ({e.strerror or e})", str(path)) from e
    logger.info("Wrote %s export to %s", fmt.value, path)
    return path
