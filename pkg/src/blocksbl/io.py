"""Matrix and vector file I/O for the CLI.

Structured-text format (the native format)::

    # optional comment lines
    <rows> <cols> <real|complex>
    <row 0 entries, whitespace separated>
    ...

Complex entries are written as ``re,im`` pairs (no spaces inside a pair).
Vectors are stored as single-column matrices.  Files whose first data line
is not a valid header are parsed as comma-separated real matrices instead
(the CSV fallback).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError

_FIELD_TAGS = ("real", "complex")


def write_matrix(path, arr: np.ndarray) -> None:
    """Write a vector or matrix in the structured-text format."""
    arr = np.asarray(arr)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ParseError(f"can only write 1-D or 2-D arrays, got ndim = {arr.ndim}")
    is_complex = np.iscomplexobj(arr)
    tag = "complex" if is_complex else "real"
    with open(path, "w") as fh:
        fh.write(f"{arr.shape[0]} {arr.shape[1]} {tag}\n")
        for row in arr:
            if is_complex:
                fh.write(" ".join(f"{v.real:.17g},{v.imag:.17g}" for v in row))
            else:
                fh.write(" ".join(f"{v:.17g}" for v in row))
            fh.write("\n")


def _parse_entry(token: str, is_complex: bool) -> complex | float:
    try:
        if is_complex:
            re_s, im_s = token.split(",")
            return complex(float(re_s), float(im_s))
        return float(token)
    except ValueError:
        raise ParseError(f"bad matrix entry {token!r}") from None


def read_matrix(path) -> np.ndarray:
    """Read a matrix in the structured-text format or as CSV fallback."""
    path = Path(path)
    lines = [
        ln.strip()
        for ln in path.read_text().splitlines()
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) == 3 and header[2] in _FIELD_TAGS:
        try:
            rows, cols = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError(f"{path}: malformed header {lines[0]!r}") from None
        is_complex = header[2] == "complex"
        body = lines[1:]
        if len(body) != rows:
            raise ParseError(f"{path}: expected {rows} rows, found {len(body)}")
        out = np.empty((rows, cols), dtype=complex if is_complex else float)
        for r, ln in enumerate(body):
            tokens = ln.split()
            if len(tokens) != cols:
                raise ParseError(
                    f"{path}: row {r} has {len(tokens)} entries, expected {cols}"
                )
            out[r] = [_parse_entry(t, is_complex) for t in tokens]
        return out
    if path.suffix.lower() == ".csv" or ("," in lines[0] and len(header) == 1):
        try:
            out = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{path}: CSV parse failed: {exc}") from None
        return out
    raise ParseError(f"{path}: malformed header {lines[0]!r}")


def read_vector(path) -> np.ndarray:
    """Read a vector (a single-row or single-column matrix)."""
    arr = read_matrix(path)
    if arr.shape[1] == 1:
        return arr[:, 0]
    if arr.shape[0] == 1:
        return arr[0]
    raise ParseError(f"{path}: expected a vector, got shape {arr.shape}")
