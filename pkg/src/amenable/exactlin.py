"""Exact rational linear algebra on sparse vectors.

Vectors are ``dict[int, Fraction]`` keyed by column, with no zero entries.
A :class:`Subspace` stores its basis in reduced row-echelon form, so two
subspaces of the same ambient are equal exactly when their stored rows are.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

AMBIENT_CAP = 8192

Vector = dict


class DimensionError(ValueError):
    """Shapes or ambient dimensions do not line up."""


class CapExceeded(ValueError):
    """An ambient or basis would exceed :data:`AMBIENT_CAP`."""


def check_cap(size: int, what: str = "ambient") -> None:
    if size > AMBIENT_CAP:
        raise CapExceeded(f"{what} size {size} exceeds cap {AMBIENT_CAP}")


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        p, q = text.split("/", 1)
        if int(q) <= 0:
            raise ValueError(f"bad rational {text!r}")
        return Fraction(int(p), int(q))
    return Fraction(int(text))


def _clean(vec: Mapping[int, object]) -> Vector:
    return {c: Fraction(v) for c, v in vec.items() if v != 0}


def axpy(y: Vector, a: Fraction, x: Mapping[int, Fraction]) -> None:
    """In place ``y += a*x``."""
    for c, xv in x.items():
        nv = y.get(c, 0) + a * xv
        if nv:
            y[c] = nv
        else:
            y.pop(c, None)


@dataclass(frozen=True)
class Matrix:
    """Sparse rational matrix, stored column by column.

    Columns are the natural access pattern here: an operator matrix has one
    column per source basis vector.
    """

    rows: int
    cols: int
    columns: tuple  # tuple of Vector (row index -> value)

    def __post_init__(self):
        if len(self.columns) != self.cols:
            raise DimensionError("column count mismatch")

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, object]]) -> "Matrix":
        cols = tuple(_clean(c) for c in columns)
        for c in cols:
            if c and max(c) >= rows:
                raise DimensionError("row index out of range")
        return cls(rows, len(cols), cols)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]], cols: int | None = None) -> "Matrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        columns = [dict() for _ in range(cols)]
        for i, row in enumerate(rows):
            if len(row) != cols:
                raise DimensionError("ragged rows")
            for j, v in enumerate(row):
                if v != 0:
                    columns[j][i] = Fraction(v)
        return cls(len(rows), cols, tuple(columns))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple({i: Fraction(1)} for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, tuple({} for _ in range(cols)))

    @cached_property
    def row_vectors(self) -> list:
        out = [dict() for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def to_rows(self) -> list:
        return [[r.get(j, Fraction(0)) for j in range(self.cols)] for r in self.row_vectors]

    def apply(self, vec: Mapping[int, Fraction]) -> Vector:
        out: Vector = {}
        for j, v in vec.items():
            if j >= self.cols:
                raise DimensionError("vector longer than matrix width")
            axpy(out, v, self.columns[j])
        return out


class Echelon:
    """Incremental row-echelon builder.

    Rows are stored with pivot entry 1 but are not back-reduced until
    :meth:`to_subspace`. Each inserted vector may carry a tag vector that
    is transformed alongside it, which is how kernels are computed.
    """

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self.pivots: dict[int, Vector] = {}
        self.tags: dict[int, Vector] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _reduce(self, vec: Vector, tag: Vector | None) -> tuple[Vector, Vector | None]:
        heap = list(vec)
        heapq.heapify(heap)
        seen = set()
        while heap:
            c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            a = vec.get(c)
            if a is None or c not in self.pivots:
                continue
            row = self.pivots[c]
            axpy(vec, -a, row)
            if tag is not None:
                axpy(tag, -a, self.tags[c])
            for k in row:
                if k > c and k not in seen:
                    heapq.heappush(heap, k)
        return vec, tag

    def reduce(self, vec: Mapping[int, Fraction]) -> Vector:
        return self._reduce(dict(vec), None)[0]

    def add(self, vec: Mapping[int, object], tag: Mapping[int, object] | None = None):
        """Insert ``vec``; return True if it raised the rank.

        With a tag, a dependent vector returns its reduced tag instead (a
        combination of the inserted tags that maps to zero).
        """
        v = _clean(vec)
        if v and max(v) >= self.ambient_dim:
            raise DimensionError("vector outside ambient")
        t = None if tag is None else _clean(tag)
        v, t = self._reduce(v, t)
        if not v:
            return t if tag is not None else False
        p = min(v)
        inv = 1 / v[p]
        if inv != 1:
            v = {c: x * inv for c, x in v.items()}
            if t is not None:
                t = {c: x * inv for c, x in t.items()}
        self.pivots[p] = v
        if t is not None:
            self.tags[p] = t
        return True if tag is None else None

    def to_subspace(self) -> "Subspace":
        order = sorted(self.pivots, reverse=True)
        done: dict[int, Vector] = {}
        for p in order:
            row = dict(self.pivots[p])
            for c in sorted(k for k in row if k > p and k in done):
                a = row.get(c)
                if a:
                    axpy(row, -a, done[c])
            done[p] = row
        rows = tuple(tuple(sorted(done[p].items())) for p in sorted(done))
        return Subspace(self.ambient_dim, rows)


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    rows: tuple  # RREF rows, each a sorted tuple of (col, Fraction)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(((i, Fraction(1)),) for i in range(ambient_dim)))

    @classmethod
    def span(cls, vectors: Iterable[Mapping[int, object]], ambient_dim: int) -> "Subspace":
        ech = Echelon(ambient_dim)
        for v in vectors:
            ech.add(v)
        return ech.to_subspace()

    @classmethod
    def coordinate(cls, indices: Iterable[int], ambient_dim: int) -> "Subspace":
        idx = sorted(set(indices))
        if idx and (idx[0] < 0 or idx[-1] >= ambient_dim):
            raise DimensionError("coordinate index outside ambient")
        return cls(ambient_dim, tuple(((i, Fraction(1)),) for i in idx))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @cached_property
    def pivots(self) -> tuple:
        return tuple(r[0][0] for r in self.rows)

    @cached_property
    def vectors(self) -> list:
        return [dict(r) for r in self.rows]

    @cached_property
    def _pivot_rows(self) -> dict:
        return {r[0][0]: dict(r) for r in self.rows}

    def residual(self, vec: Mapping[int, Fraction]) -> Vector:
        """Linear projection killing this subspace; zero exactly on members."""
        out = dict(vec)
        for p, row in self._pivot_rows.items():
            a = vec.get(p)
            if a:
                axpy(out, -a, row)
        return out

    def contains(self, vec: Mapping[int, Fraction]) -> bool:
        return not self.residual(_clean(vec))

    def contains_subspace(self, other: "Subspace") -> bool:
        _same_ambient(self, other)
        return all(self.contains(v) for v in other.vectors)

    def embed(self, ambient_dim: int) -> "Subspace":
        """Same rows viewed in a larger ambient whose basis extends this one."""
        if ambient_dim < self.ambient_dim:
            if any(r[-1][0] >= ambient_dim for r in self.rows):
                raise DimensionError("subspace does not fit the smaller ambient")
        return Subspace(ambient_dim, self.rows)

    def dense_rows(self) -> list:
        return [[dict(r).get(j, Fraction(0)) for j in range(self.ambient_dim)] for r in self.rows]

    def __le__(self, other: "Subspace") -> bool:
        return other.contains_subspace(self)


def _same_ambient(u: Subspace, w: Subspace) -> None:
    if u.ambient_dim != w.ambient_dim:
        raise DimensionError(f"ambient mismatch: {u.ambient_dim} vs {w.ambient_dim}")


def rref(m: Matrix | Sequence[Sequence[object]]) -> Subspace:
    """Row space of ``m`` in canonical form."""
    if not isinstance(m, Matrix):
        m = Matrix.from_rows(m)
    return Subspace.span(m.row_vectors, m.cols)


def rank(m: Matrix | Sequence[Sequence[object]]) -> int:
    return rref(m).dim


def sum_spaces(*spaces: Subspace) -> Subspace:
    if not spaces:
        raise ValueError("need at least one subspace")
    n = spaces[0].ambient_dim
    for s in spaces[1:]:
        _same_ambient(spaces[0], s)
    ech = Echelon(n)
    for s in spaces:
        for v in s.vectors:
            ech.add(v)
    return ech.to_subspace()


def kernel_tags(vectors: Sequence[Mapping[int, Fraction]], ambient_dim: int) -> list:
    """Basis (as coefficient dicts over positions) of ``{c : sum c_i v_i = 0}``."""
    ech = Echelon(ambient_dim)
    out = []
    for i, v in enumerate(vectors):
        t = ech.add(v, {i: Fraction(1)})
        if t is not None:
            out.append(t)
    return out


def preimage_into(op: Matrix, v: Subspace, target: Subspace) -> Subspace:
    """Largest subspace ``u`` of ``v`` with ``op(u)`` inside ``target``."""
    if op.cols != v.ambient_dim or op.rows != target.ambient_dim:
        raise DimensionError(
            f"operator {op.rows}x{op.cols} incompatible with {v.ambient_dim} -> {target.ambient_dim}"
        )
    basis = v.vectors
    residuals = [target.residual(op.apply(b)) for b in basis]
    combos = kernel_tags(residuals, target.ambient_dim)
    ech = Echelon(v.ambient_dim)
    for c in combos:
        x: Vector = {}
        for i, a in c.items():
            axpy(x, a, basis[i])
        ech.add(x)
    return ech.to_subspace()


def intersect(u: Subspace, w: Subspace) -> Subspace:
    _same_ambient(u, w)
    if u.dim > w.dim:
        u, w = w, u
    return preimage_into(Matrix.identity(u.ambient_dim), u, w)


def image(op: Matrix, v: Subspace) -> Subspace:
    if op.cols != v.ambient_dim:
        raise DimensionError(f"operator width {op.cols} != ambient {v.ambient_dim}")
    return Subspace.span((op.apply(b) for b in v.vectors), op.rows)
