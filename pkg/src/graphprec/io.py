"""File formats: numeric CSV, adjacency/edge-list structure files, atomic writes."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .structure import GraphStructure


class ParseError(ValueError):
    """Malformed input file. ``str()`` names the file and line."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


def format_float(x: float) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(x))


def format_row(values) -> str:
    return ",".join(format_float(v) for v in values)


def matrix_to_csv(a) -> str:
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    return "".join(format_row(row) + "\n" for row in a)


def atomic_write_text(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _read_lines(path):
    try:
        with open(path, newline="") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise ParseError(path, None, exc.strerror or str(exc)) from None


def read_matrix_csv(path) -> np.ndarray:
    """Comma-separated numeric matrix, no header. Blank lines are skipped."""
    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise ParseError(path, lineno, f"non-numeric field in {line!r}") from None
        if not all(np.isfinite(row)):
            raise ParseError(path, lineno, "NaN or Inf is not allowed")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(path, lineno, f"expected {width} fields, got {len(row)}")
        rows.append(row)
    if not rows:
        raise ParseError(path, None, "file contains no data")
    return np.array(rows, dtype=np.float64)


def read_structure(path, p: int, fmt: str = "auto") -> GraphStructure:
    """Read a structure file.

    ``fmt`` is ``"dense"`` (p x p 0/1 CSV), ``"edges"`` (one ``i,j`` pair
    per line, 0-based, undirected) or ``"auto"``: dense when the file is a
    p x p grid, edges otherwise.
    """
    lines = [(k, ln) for k, ln in enumerate(_read_lines(path), start=1) if ln.strip()]
    if fmt == "auto":
        is_grid = len(lines) == p and all(len(ln.split(",")) == p for _, ln in lines)
        # a 2x2 grid also parses as two edges; the grid reading wins
        fmt = "dense" if is_grid else "edges"
    if fmt == "dense":
        a = read_matrix_csv(path)
        if a.shape != (p, p):
            raise ParseError(path, None, f"adjacency must be {p}x{p}, got {a.shape[0]}x{a.shape[1]}")
        try:
            return GraphStructure.from_adjacency(a)
        except ValueError as exc:
            raise ParseError(path, None, str(exc)) from None
    if fmt != "edges":
        raise ValueError(f"unknown structure format {fmt!r}")
    edges = []
    for lineno, line in lines:
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 2:
            raise ParseError(path, lineno, f"expected 'i,j', got {line!r}")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(path, lineno, f"non-integer index in {line!r}") from None
        if not (0 <= i < p and 0 <= j < p):
            raise ParseError(path, lineno, f"index outside [0, {p})")
        edges.append((i, j))
    return GraphStructure.from_edges(edges, p)
