"""Plain-text file formats: DMAT matrices and SUPP / SUPP2D support sets.

DMAT::

    DMAT <rows> <cols>
    <cols floats>        (one line per row, 17 significant digits)

A vector is stored as a one-column DMAT. Supports::

    SUPP <count>         SUPP2D <count>
    <index>              <row> <col>
"""
from pathlib import Path

import numpy as np

from .errors import FormatError

__all__ = [
    "format_dmat", "parse_dmat", "write_dmat", "read_dmat",
    "format_support", "parse_support", "write_support", "read_support",
]


def _fmt(v):
    return "%.17g" % v


def format_dmat(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise FormatError("DMAT holds only vectors and matrices")
    if not np.all(np.isfinite(X)):
        raise FormatError("DMAT entries must be finite")
    lines = [f"DMAT {X.shape[0]} {X.shape[1]}"]
    lines += [" ".join(_fmt(v) for v in row) for row in X]
    return "\n".join(lines) + "\n"


def _lines(text):
    return [ln.strip() for ln in text.splitlines() if ln.strip()]


def parse_dmat(text):
    """Parse DMAT text into a 2-D float array."""
    lines = _lines(text)
    if not lines:
        raise FormatError("empty DMAT input")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "DMAT":
        raise FormatError(f"bad DMAT header: {lines[0]!r}")
    try:
        rows, cols = int(head[1]), int(head[2])
        body = [[float(v) for v in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if rows < 1 or cols < 1 or len(body) != rows or any(len(r) != cols for r in body):
        raise FormatError(f"DMAT body does not match header {rows}x{cols}")
    X = np.array(body, dtype=float).reshape(rows, cols)
    if not np.all(np.isfinite(X)):
        raise FormatError("DMAT entries must be finite")
    return X


def write_dmat(path, X):
    Path(path).write_text(format_dmat(X))


def read_dmat(path):
    return parse_dmat(Path(path).read_text())


def format_support(support):
    """Serialize a support; pairs ``(row, col)`` produce SUPP2D."""
    items = sorted(support)
    if items and isinstance(items[0], tuple):
        body = [f"{r} {c}" for r, c in items]
        return "\n".join([f"SUPP2D {len(items)}"] + body) + "\n"
    return "\n".join([f"SUPP {len(items)}"] + [str(int(i)) for i in items]) + "\n"


def parse_support(text):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty SUPP input")
    head = lines[0].split()
    if len(head) != 2 or head[0] not in ("SUPP", "SUPP2D"):
        raise FormatError(f"bad support header: {lines[0]!r}")
    try:
        count = int(head[1])
        if head[0] == "SUPP":
            items = [int(ln) for ln in lines[1:]]
        else:
            items = [tuple(int(v) for v in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if len(items) != count or (head[0] == "SUPP2D" and any(len(p) != 2 for p in items)):
        raise FormatError("support body does not match header")
    return sorted(items)


def write_support(path, support):
    Path(path).write_text(format_support(support))


def read_support(path):
    return parse_support(Path(path).read_text())
