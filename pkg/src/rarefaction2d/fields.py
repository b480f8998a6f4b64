"""Uniform 2D grids, grid functions, and their on-disk formats.

Binary dump: one ASCII header line
``t=<t> n1=<n1> n2=<n2> b1=<lo,hi> b2=<lo,hi>`` terminated by ``\\n``,
then ``n1*n2`` little-endian float64 values in row-major order (axis 1
slowest).
"""
from __future__ import annotations

import io
import re
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteValue

_HEADER = re.compile(
    r"t=(?P<t>\S+) n1=(?P<n1>\d+) n2=(?P<n2>\d+) b1=(?P<b1lo>[^,\s]+),(?P<b1hi>\S+) b2=(?P<b2lo>[^,\s]+),(?P<b2hi>\S+)"
)


@dataclass(frozen=True)
class Grid2D:
    lo1: float
    hi1: float
    n1: int
    lo2: float
    hi2: float
    n2: int

    def __post_init__(self):
        if self.n1 < 8 or self.n2 < 8:
            raise ValueError("grids need at least 8 nodes per axis")
        if not (self.hi1 > self.lo1 and self.hi2 > self.lo2):
            raise ValueError("grid bounds must be increasing")

    @property
    def h1(self):
        return (self.hi1 - self.lo1) / (self.n1 - 1)

    @property
    def h2(self):
        return (self.hi2 - self.lo2) / (self.n2 - 1)

    @property
    def shape(self):
        return (self.n1, self.n2)

    def axis1(self):
        return np.linspace(self.lo1, self.hi1, self.n1)

    def axis2(self):
        return np.linspace(self.lo2, self.hi2, self.n2)

    def mesh(self):
        return np.meshgrid(self.axis1(), self.axis2(), indexing="ij")

    def boundary_mask(self):
        m = np.zeros(self.shape, dtype=bool)
        m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
        return m

    @classmethod
    def square(cls, half, n, center=(0.0, 0.0)):
        return cls(center[0] - half, center[0] + half, n, center[1] - half, center[1] + half, n)


@dataclass
class Field2D:
    grid: Grid2D
    t: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            if self.values.size != self.grid.n1 * self.grid.n2:
                raise ValueError("value count does not match the grid")
            self.values = self.values.reshape(self.grid.shape)
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteValue(f"non-finite value in field at t={self.t}")

    def replace(self, values, t=None):
        return Field2D(self.grid, self.t if t is None else t, values)


def _fmt(x):
    return repr(float(x))


def header_line(field):
    g = field.grid
    return (
        f"t={_fmt(field.t)} n1={g.n1} n2={g.n2} "
        f"b1={_fmt(g.lo1)},{_fmt(g.hi1)} b2={_fmt(g.lo2)},{_fmt(g.hi2)}"
    )


def dump_field(field, path):
    """Write the binary dump format."""
    with open(path, "wb") as fh:
        fh.write(header_line(field).encode("ascii") + b"\n")
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def _parse_header(line):
    m = _HEADER.fullmatch(line.strip())
    if not m:
        raise ValueError(f"bad field header: {line!r}")
    d = m.groupdict()
    grid = Grid2D(
        float(d["b1lo"]), float(d["b1hi"]), int(d["n1"]), float(d["b2lo"]), float(d["b2hi"]), int(d["n2"])
    )
    return float(d["t"]), grid


def load_field(path):
    with open(path, "rb") as fh:
        t, grid = _parse_header(fh.readline().decode("ascii"))
        data = np.frombuffer(fh.read(), dtype="<f8")
    return Field2D(grid, t, data.astype(float).reshape(grid.shape))


def field_to_csv(field, comment=None):
    """Small-grid CSV: comment lines, the header line as a comment, then ``x1,x2,u`` rows."""
    out = io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write(f"# {line}\n")
    out.write(f"# {header_line(field)}\n")
    out.write("x1,x2,u\n")
    X1, X2 = field.grid.mesh()
    for a, b, v in zip(X1.ravel(), X2.ravel(), field.values.ravel()):
        out.write(f"{float(a)!r},{float(b)!r},{float(v)!r}\n")
    return out.getvalue()


def load_field_csv(text):
    lines = text.splitlines()
    header = None
    body = []
    for line in lines:
        if line.startswith("# t="):
            header = line[2:]
        elif line and not line.startswith("#") and not line.startswith("x1,"):
            body.append(float(line.rsplit(",", 1)[1]))
    if header is None:
        raise ValueError("missing field header comment")
    t, grid = _parse_header(header)
    return Field2D(grid, t, np.array(body).reshape(grid.shape))
