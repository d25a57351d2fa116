"""JSON persistence for matrices, vectors, and machine-readable reports.

Matrix file schema (UTF-8 JSON):

    {"dim": d, "matrices": [{"name": str, "re": [[...]], "im": [[...]]}]}

Real and imaginary parts are separate ``d x d`` arrays of decimal
numbers, so writing and re-parsing is bit-faithful for representable
values. Dimensions above 64 are rejected at parse time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError
from .linalg import MAX_DIM

TOOL_VERSION = "isoposet 0.1.0"

STATUS_OK = "ok"
STATUS_VIOLATION = "violation"
STATUS_ERROR = "error"
EXIT_CODES = {STATUS_OK: 0, STATUS_VIOLATION: 1, STATUS_ERROR: 2}


@dataclass(frozen=True, eq=False)
class NamedMatrix:
    name: str
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class MatrixFile:
    dim: int
    entries: tuple[NamedMatrix, ...]

    @property
    def matrices(self) -> list[np.ndarray]:
        return [entry.matrix for entry in self.entries]

    def named(self, name: str) -> np.ndarray:
        for entry in self.entries:
            if entry.name == name:
                return entry.matrix
        raise ParseError(f"no matrix named {name!r} in file")


def _check_grid(values, dim: int, where: str) -> np.ndarray:
    if not isinstance(values, list) or len(values) != dim:
        raise ParseError(f"{where}: expected {dim} rows")
    grid = []
    for i, row in enumerate(values):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{where}[{i}]: expected {dim} columns")
        for j, v in enumerate(row):
            if not isinstance(v, (int, float)) or isinstance(v, bool) \
                    or not math.isfinite(v):
                raise ParseError(f"{where}[{i}][{j}]: not a finite number")
        grid.append([float(v) for v in row])
    return np.array(grid, dtype=float)


def parse_matrix_document(doc, where: str = "document") -> MatrixFile:
    """Validate a decoded JSON document against the matrix file schema."""
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: expected a JSON object")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"{where}.dim: expected a positive integer")
    if dim > MAX_DIM:
        raise ParseError(f"{where}.dim: {dim} exceeds the supported maximum {MAX_DIM}")
    raw = doc.get("matrices")
    if not isinstance(raw, list):
        raise ParseError(f"{where}.matrices: expected a list")
    entries = []
    for k, item in enumerate(raw):
        where_k = f"{where}.matrices[{k}]"
        if not isinstance(item, dict):
            raise ParseError(f"{where_k}: expected an object")
        name = item.get("name")
        if not isinstance(name, str) or not name:
            raise ParseError(f"{where_k}.name: expected a non-empty string")
        re_part = _check_grid(item.get("re"), dim, f"{where_k}.re")
        im_part = _check_grid(item.get("im"), dim, f"{where_k}.im")
        entries.append(NamedMatrix(name, re_part + 1j * im_part))
    return MatrixFile(dim=dim, entries=tuple(entries))


def parse_matrix_file(path) -> MatrixFile:
    """Parse a matrix file; raises :class:`ParseError` with diagnostics."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    return parse_matrix_document(doc, where=str(path))


def encode_matrix(m: np.ndarray) -> dict:
    a = np.asarray(m, dtype=complex)
    return {
        "re": [[float(v.real) for v in row] for row in a],
        "im": [[float(v.imag) for v in row] for row in a],
    }


def encode_vector(v: np.ndarray) -> dict:
    a = np.asarray(v, dtype=complex).reshape(-1)
    return {
        "re": [float(x.real) for x in a],
        "im": [float(x.imag) for x in a],
    }


def matrix_document(dim: int, named: list[tuple[str, np.ndarray]]) -> dict:
    return {
        "dim": dim,
        "matrices": [
            {"name": name, **encode_matrix(m)} for name, m in named
        ],
    }


def write_matrix_file(path, dim: int, named: list[tuple[str, np.ndarray]]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(matrix_document(dim, named), handle, indent=2, sort_keys=True)
        handle.write("\n")


def parse_inline_vector(text: str) -> np.ndarray:
    """Vector from an inline JSON array or from a file containing one.

    Entries are numbers or two-element ``[re, im]`` pairs.
    """
    source = text.strip()
    if not source.startswith("["):
        try:
            with open(source, "r", encoding="utf-8") as handle:
                source = handle.read().strip()
        except OSError as exc:
            raise ParseError(f"vector file {text!r}: {exc}") from exc
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"vector {text!r}: invalid JSON: {exc.msg}") from exc
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"vector {text!r}: expected a non-empty JSON array")
    values = []
    for i, item in enumerate(raw):
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            values.append(complex(item))
        elif (
            isinstance(item, list)
            and len(item) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                    for v in item)
        ):
            values.append(complex(item[0], item[1]))
        else:
            raise ParseError(f"vector entry [{i}]: expected number or [re, im]")
    arr = np.array(values, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ParseError("vector entries must be finite")
    return arr


@dataclass(eq=False)
class Report:
    """Machine-readable command outcome; the status fixes the exit code."""

    command: str
    status: str
    payload: dict
    tool_version: str = TOOL_VERSION
    seed: int | None = None
    tolerances: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> str:
        body = {
            "command": self.command,
            "status": self.status,
            "payload": self.payload,
            "tool_version": self.tool_version,
            "seed": self.seed,
            "tolerances": self.tolerances,
        }
        return json.dumps(body, indent=2, sort_keys=True)
