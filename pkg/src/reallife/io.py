"""Pattern files (P1-ext), binary PGM frames and kernel CSV dumps.

P1-ext layout::

    dims D
    epsilon <repr of float>
    origin z1 .. zD
    extent n1 .. nD
    boundary b1 .. bD        (optional; growable when absent)
    <prod(n1..n_{D-1}) rows of n_D characters '0'/'1'>

Rows are row-major with the last axis fastest.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .grid import BOUNDARY_MODES, GROWABLE, BinaryConfig, Domain
from .kernel import DiscreteKernel


class PatternFormatError(InvalidArgumentError):
    pass


def format_pattern(a: BinaryConfig) -> str:
    lines = [
        f"dims {a.dim}",
        f"epsilon {a.epsilon!r}",
        "origin " + " ".join(str(o) for o in a.origin),
        "extent " + " ".join(str(n) for n in a.extent),
    ]
    if any(b != GROWABLE for b in a.domain.boundary):
        lines.append("boundary " + " ".join(a.domain.boundary))
    rows = a.data.reshape(-1, a.extent[-1])
    table = np.array([ord("0"), ord("1")], dtype=np.uint8)
    lines.extend(table[r].tobytes().decode("ascii") for r in rows)
    return "\n".join(lines) + "\n"


def _header(lines, i, key, count=None):
    if i >= len(lines):
        raise PatternFormatError(f"line {i + 1}: expected '{key}', got end of file")
    parts = lines[i].split()
    if not parts or parts[0] != key:
        raise PatternFormatError(f"line {i + 1}: expected '{key} ...', got {lines[i]!r}")
    vals = parts[1:]
    if count is not None and len(vals) != count:
        raise PatternFormatError(f"line {i + 1}: '{key}' needs {count} values, got {len(vals)}")
    return vals


def parse_pattern(text: str) -> BinaryConfig:
    lines = [ln.rstrip("\r") for ln in text.split("\n")]
    while lines and not lines[-1].strip():
        lines.pop()
    try:
        (d,) = _header(lines, 0, "dims", 1)
        dim = int(d)
        (e,) = _header(lines, 1, "epsilon", 1)
        eps = float(e)
        origin = [int(v) for v in _header(lines, 2, "origin", dim)]
        extent = [int(v) for v in _header(lines, 3, "extent", dim)]
    except ValueError as exc:
        if isinstance(exc, PatternFormatError):
            raise
        raise PatternFormatError(f"bad header value: {exc}") from None
    i = 4
    boundary = (GROWABLE,) * dim
    if i < len(lines) and lines[i].startswith("boundary"):
        boundary = tuple(_header(lines, i, "boundary", dim))
        for b in boundary:
            if b not in BOUNDARY_MODES:
                raise PatternFormatError(f"line {i + 1}: unknown boundary mode {b!r}")
        i += 1
    if dim < 1 or any(n < 1 for n in extent):
        raise PatternFormatError("dims and extents must be positive")
    nrows = int(np.prod(extent[:-1])) if dim > 1 else 1
    body = lines[i:]
    if len(body) != nrows:
        raise PatternFormatError(f"expected {nrows} cell rows, found {len(body)}")
    cells = np.zeros((nrows, extent[-1]), dtype=np.uint8)
    for j, row in enumerate(body):
        row = row.strip()
        if len(row) != extent[-1] or set(row) - {"0", "1"}:
            raise PatternFormatError(
                f"line {i + j + 1}: expected {extent[-1]} characters of '0'/'1'"
            )
        cells[j] = np.frombuffer(row.encode("ascii"), dtype=np.uint8) - ord("0")
    dom = Domain.make(extent, eps, boundary)
    return BinaryConfig(dom, cells.reshape(extent), origin)


def write_pattern(a: BinaryConfig, path) -> None:
    Path(path).write_text(format_pattern(a), encoding="ascii", newline="\n")


def read_pattern(path) -> BinaryConfig:
    try:
        text = Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise PatternFormatError(f"cannot read pattern {os.fspath(path)!r}: {exc}") from None
    return parse_pattern(text)


def pgm_bytes(a: BinaryConfig, scale: int = 1, viewport=None) -> bytes:
    """Binary PGM of a 1D or 2D config: live 0 (black), dead 255 (white).

    ``viewport`` = (lo, shape) in grid coordinates fixes the drawn window;
    it defaults to the array itself.
    """
    if a.dim > 2:
        raise InvalidArgumentError("PGM rendering supports 1D and 2D configurations")
    scale = int(scale)
    if scale < 1:
        raise InvalidArgumentError("scale must be a positive integer")
    if viewport is None:
        data = a.data
    else:
        data = a.embedded(*viewport)
    data = np.atleast_2d(data)
    img = np.where(data.astype(bool), 0, 255).astype(np.uint8)
    img = np.repeat(np.repeat(img, scale, axis=0), scale, axis=1)
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def write_pgm(a: BinaryConfig, path, scale: int = 1, viewport=None) -> None:
    Path(path).write_bytes(pgm_bytes(a, scale, viewport))


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5":
        raise InvalidArgumentError("not a binary PGM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4], dtype=np.uint8, count=w * h).reshape(h, w)


def write_kernel_csv(k: DiscreteKernel, path) -> None:
    Path(path).write_text(k.to_csv(), encoding="ascii", newline="\n")
