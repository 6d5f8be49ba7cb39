"""Sparse exact matrices over Z, Z/n and Q.

Storage is a dict {(i, j): scalar} holding only nonzero entries; scalars
are exact (python int / Fraction).  Dense row lists are materialized on
demand for the elimination cores, which is the "dense fallback below
64x64" regime; everything bigger stays sparse.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import BaseMismatch
from .rings import BaseRing, ZZ


class ExactMatrix:
    __slots__ = ("ring", "rows", "cols", "data")

    def __init__(self, ring: BaseRing, rows: int, cols: int, data=None):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        d = {}
        if data:
            norm = ring.normalize
            for (i, j), v in data.items():
                v = norm(v)
                if v != 0:
                    if not (0 <= i < rows and 0 <= j < cols):
                        raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
                    d[(i, j)] = v
        self.data = d

    # -- constructors ----------------------------------------------

    @classmethod
    def zeros(cls, ring, rows, cols):
        return cls(ring, rows, cols)

    @classmethod
    def identity(cls, ring, n):
        one = ring.one()
        return cls(ring, n, n, {(i, i): one for i in range(n)})

    @classmethod
    def from_rows(cls, ring, rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        data = {}
        for i, row in enumerate(rows_list):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                data[(i, j)] = v
        return cls(ring, rows, cols, data)

    @classmethod
    def column(cls, ring, entries):
        return cls.from_rows(ring, [[v] for v in entries])

    # -- access ----------------------------------------------------

    def get(self, i, j):
        return self.data.get((i, j), self.ring.zero())

    def to_rows(self):
        z = self.ring.zero()
        out = [[z] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.data.items():
            out[i][j] = v
        return out

    def column_vector(self, j):
        z = self.ring.zero()
        col = [z] * self.rows
        for (i, jj), v in self.data.items():
            if jj == j:
                col[i] = v
        return col

    def nnz(self):
        return len(self.data)

    def is_zero(self):
        return not self.data

    # -- arithmetic ------------------------------------------------

    def _check(self, other):
        if self.ring != other.ring:
            raise BaseMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other):
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in +")
        data = dict(self.data)
        norm = self.ring.normalize
        for k, v in other.data.items():
            w = norm(data.get(k, 0) + v)
            if w == 0:
                data.pop(k, None)
            else:
                data[k] = w
        m = ExactMatrix(self.ring, self.rows, self.cols)
        m.data = data
        return m

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = self.ring.normalize(c)
        m = ExactMatrix(self.ring, self.rows, self.cols)
        if c == 0:
            return m
        norm = self.ring.normalize
        for k, v in self.data.items():
            w = norm(c * v)
            if w != 0:
                m.data[k] = w
        return m

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch in @: {self.shape} {other.shape}")
        # group left entries by column for sparse traversal
        by_col = {}
        for (i, k), v in self.data.items():
            by_col.setdefault(k, []).append((i, v))
        acc = {}
        for (k, j), w in other.data.items():
            hits = by_col.get(k)
            if not hits:
                continue
            for i, v in hits:
                key = (i, j)
                acc[key] = acc.get(key, 0) + v * w
        m = ExactMatrix(self.ring, self.rows, other.cols)
        norm = self.ring.normalize
        for k, v in acc.items():
            v = norm(v)
            if v != 0:
                m.data[k] = v
        return m

    def apply(self, vec):
        """Matrix times a dense column vector (list of scalars)."""
        z = self.ring.zero()
        out = [z] * self.rows
        for (i, j), v in self.data.items():
            w = vec[j]
            if w:
                out[i] = out[i] + v * w
        norm = self.ring.normalize
        return [norm(x) for x in out]

    def transpose(self):
        m = ExactMatrix(self.ring, self.cols, self.rows)
        m.data = {(j, i): v for (i, j), v in self.data.items()}
        return m

    def hstack(self, other):
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        m = ExactMatrix(self.ring, self.rows, self.cols + other.cols)
        m.data = dict(self.data)
        off = self.cols
        for (i, j), v in other.data.items():
            m.data[(i, j + off)] = v
        return m

    def vstack(self, other):
        self._check(other)
        if self.cols != other.cols:
            raise ValueError("col mismatch in vstack")
        m = ExactMatrix(self.ring, self.rows + other.rows, self.cols)
        m.data = dict(self.data)
        off = self.rows
        for (i, j), v in other.data.items():
            m.data[(i + off, j)] = v
        return m

    def submatrix(self, row_idx, col_idx):
        rpos = {r: a for a, r in enumerate(row_idx)}
        cpos = {c: a for a, c in enumerate(col_idx)}
        m = ExactMatrix(self.ring, len(row_idx), len(col_idx))
        for (i, j), v in self.data.items():
            if i in rpos and j in cpos:
                m.data[(rpos[i], cpos[j])] = v
        return m

    def kron(self, other):
        self._check(other)
        m = ExactMatrix(self.ring, self.rows * other.rows, self.cols * other.cols)
        norm = self.ring.normalize
        for (i, j), v in self.data.items():
            for (k, l), w in other.data.items():
                val = norm(v * w)
                if val != 0:
                    m.data[(i * other.rows + k, j * other.cols + l)] = val
        return m

    # -- conversions ------------------------------------------------

    def lift_to_Z(self) -> "ExactMatrix":
        """Entry-wise lift of a Z/n matrix to Z (representatives in [0, n))."""
        if self.ring.kind == "Z":
            return self
        if self.ring.kind != "Zn":
            raise ValueError("no canonical Z-lift for Q matrices")
        m = ExactMatrix(ZZ, self.rows, self.cols)
        m.data = dict(self.data)
        return m

    def change_ring(self, ring: BaseRing) -> "ExactMatrix":
        return ExactMatrix(ring, self.rows, self.cols, dict(self.data))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.ring == other.ring
            and self.shape == other.shape
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.ring, self.shape, frozenset(self.data.items())))

    def __repr__(self):
        if self.rows * self.cols <= 64:
            return f"ExactMatrix({self.ring}, {self.to_rows()})"
        return f"ExactMatrix({self.ring}, {self.rows}x{self.cols}, nnz={self.nnz()})"


def det_bareiss(mat: ExactMatrix):
    """Exact determinant (fraction-free Bareiss over Z, plain Gauss over Q)."""
    n = mat.rows
    if n != mat.cols:
        raise ValueError("det of non-square matrix")
    if n == 0:
        return mat.ring.one()
    a = mat.to_rows()
    if mat.ring.kind == "Q":
        det = Fraction(1)
        a = [row[:] for row in a]
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                det = -det
            det *= a[k][k]
            for i in range(k + 1, n):
                f = a[i][k] / a[k][k]
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
        return det
    # integer (or lifted Z/n) Bareiss
    a = [[int(v) for v in row] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    det = sign * a[n - 1][n - 1]
    return mat.ring.normalize(det) if mat.ring.kind == "Zn" else det
