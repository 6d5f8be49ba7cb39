"""Smith normal form and exact linear solving over Z, Z/n, Q.

The integer SNF is the single workhorse: Z/n questions are lifted to Z by
adjoining n*I relation columns, Q questions go through fraction Gaussian
elimination.  Entries are arbitrary-precision python ints throughout; the
elimination keeps matrices in sparse dict-of-rows form and prefers unit
pivots (Markowitz-flavored) so that the presentation matrices coming out
of bar and Tambara constructions, which are overwhelmingly +-1 entries,
reduce without coefficient blowup.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .matrix import ExactMatrix
from .rings import BaseRing, QQ, ZZ


@dataclass
class SNFResult:
    U: ExactMatrix | None
    D: ExactMatrix
    V: ExactMatrix | None
    diag: list[int]


class _Work:
    """Mutable elimination state with optional transform tracking."""

    def __init__(self, mat: ExactMatrix, want_u: bool, want_v: bool):
        self.m = mat.rows
        self.n = mat.cols
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, dict[int, int]] = {}
        for (i, j), v in mat.data.items():
            self.rows.setdefault(i, {})[j] = int(v)
            self.cols.setdefault(j, {})[i] = int(v)
        self.U = {i: {i: 1} for i in range(self.m)} if want_u else None
        self.V = {j: {j: 1} for j in range(self.n)} if want_v else None

    # A[i][j] convention: rows[i][j] == cols[j][i]

    def entry(self, i, j):
        return self.rows.get(i, {}).get(j, 0)

    def set_entry(self, i, j, v):
        if v:
            self.rows.setdefault(i, {})[j] = v
            self.cols.setdefault(j, {})[i] = v
        else:
            r = self.rows.get(i)
            if r and j in r:
                del r[j]
                c = self.cols[j]
                del c[i]

    def row_axpy(self, i, j, c):
        """row_i += c * row_j, also applied to U."""
        if c == 0:
            return
        for jj, v in list(self.rows.get(j, {}).items()):
            self.set_entry(i, jj, self.entry(i, jj) + c * v)
        if self.U is not None:
            ui = self.U.setdefault(i, {})
            for k, v in self.U.get(j, {}).items():
                w = ui.get(k, 0) + c * v
                if w:
                    ui[k] = w
                else:
                    ui.pop(k, None)

    def col_axpy(self, j, k, c):
        """col_j += c * col_k, also applied to V."""
        if c == 0:
            return
        for ii, v in list(self.cols.get(k, {}).items()):
            self.set_entry(ii, j, self.entry(ii, j) + c * v)
        if self.V is not None:
            vj = self.V.setdefault(j, {})
            for kk, v in self.V.get(k, {}).items():
                w = vj.get(kk, 0) + c * v
                if w:
                    vj[kk] = w
                else:
                    vj.pop(kk, None)

    def row_swap(self, i, j):
        if i == j:
            return
        ri, rj = self.rows.get(i, {}), self.rows.get(j, {})
        for jj in set(ri) | set(rj):
            a, b = ri.get(jj, 0), rj.get(jj, 0)
            c = self.cols[jj]
            for idx, val in ((i, b), (j, a)):
                if val:
                    c[idx] = val
                else:
                    c.pop(idx, None)
        self.rows[i], self.rows[j] = rj, ri
        if self.U is not None:
            self.U[i], self.U[j] = self.U.get(j, {}), self.U.get(i, {})

    def col_swap(self, j, k):
        if j == k:
            return
        cj, ck = self.cols.get(j, {}), self.cols.get(k, {})
        for ii in set(cj) | set(ck):
            a, b = cj.get(ii, 0), ck.get(ii, 0)
            r = self.rows[ii]
            for idx, val in ((j, b), (k, a)):
                if val:
                    r[idx] = val
                else:
                    r.pop(idx, None)
        self.cols[j], self.cols[k] = ck, cj
        if self.V is not None:
            self.V[j], self.V[k] = self.V.get(k, {}), self.V.get(j, {})

    def row_negate(self, i):
        for jj, v in list(self.rows.get(i, {}).items()):
            self.set_entry(i, jj, -v)
        if self.U is not None:
            self.U[i] = {k: -v for k, v in self.U.get(i, {}).items()}

    def row_combine2(self, i, j, a11, a12, a21, a22):
        """(row_i, row_j) <- (a11 row_i + a12 row_j, a21 row_i + a22 row_j)."""
        ri = dict(self.rows.get(i, {}))
        rj = dict(self.rows.get(j, {}))
        for jj in set(ri) | set(rj):
            x, y = ri.get(jj, 0), rj.get(jj, 0)
            self.set_entry(i, jj, a11 * x + a12 * y)
            self.set_entry(j, jj, a21 * x + a22 * y)
        if self.U is not None:
            ui = dict(self.U.get(i, {}))
            uj = dict(self.U.get(j, {}))
            newi, newj = {}, {}
            for k in set(ui) | set(uj):
                x, y = ui.get(k, 0), uj.get(k, 0)
                wi = a11 * x + a12 * y
                wj = a21 * x + a22 * y
                if wi:
                    newi[k] = wi
                if wj:
                    newj[k] = wj
            self.U[i], self.U[j] = newi, newj

    def col_combine2(self, j, k, b11, b21, b12, b22):
        """(col_j, col_k) <- (b11 col_j + b21 col_k, b12 col_j + b22 col_k)."""
        cj = dict(self.cols.get(j, {}))
        ck = dict(self.cols.get(k, {}))
        for ii in set(cj) | set(ck):
            x, y = cj.get(ii, 0), ck.get(ii, 0)
            self.set_entry(ii, j, b11 * x + b21 * y)
            self.set_entry(ii, k, b12 * x + b22 * y)
        if self.V is not None:
            vj = dict(self.V.get(j, {}))
            vk = dict(self.V.get(k, {}))
            newj, newk = {}, {}
            for kk in set(vj) | set(vk):
                x, y = vj.get(kk, 0), vk.get(kk, 0)
                wj = b11 * x + b21 * y
                wk = b12 * x + b22 * y
                if wj:
                    newj[kk] = wj
                if wk:
                    newk[kk] = wk
            self.V[j], self.V[k] = newj, newk


def _pick_pivot(w: _Work, t: int):
    """Best remaining pivot at or beyond (t, t): smallest |value|, then least fill."""
    best = None
    best_key = None
    for i, row in w.rows.items():
        if i < t:
            continue
        rl = len(row)
        for j, v in row.items():
            if j < t:
                continue
            key = (abs(v), (rl - 1) * (len(w.cols[j]) - 1))
            if best_key is None or key < best_key:
                best_key = key
                best = (i, j)
                if key[0] == 1 and key[1] == 0:
                    return best
    return best


def smith_normal_form_Z(mat: ExactMatrix, want_u=True, want_v=True) -> SNFResult:
    """U * mat * V = D over Z, with U, V unimodular and D a divisibility chain."""
    if mat.ring.kind != "Z":
        raise ValueError("smith_normal_form_Z wants an integer matrix")
    w = _Work(mat, want_u, want_v)
    m, n = w.m, w.n
    t = 0
    limit = min(m, n)
    while t < limit:
        piv = _pick_pivot(w, t)
        if piv is None:
            break
        w.row_swap(t, piv[0])
        w.col_swap(t, piv[1])
        while True:
            p = w.entry(t, t)
            if p < 0:
                w.row_negate(t)
                p = -p
            # clear row t by column operations
            row_items = [(j, v) for j, v in w.rows.get(t, {}).items() if j != t]
            for j, v in row_items:
                w.col_axpy(j, t, -(v // p))
            rest = [(j, v) for j, v in w.rows.get(t, {}).items() if j != t]
            if rest:
                jmin = min(rest, key=lambda jv: abs(jv[1]))[0]
                w.col_swap(t, jmin)
                continue
            # clear column t by row operations
            col_items = [(i, v) for i, v in w.cols.get(t, {}).items() if i != t]
            for i, v in col_items:
                w.row_axpy(i, t, -(v // p))
            cres = [(i, v) for i, v in w.cols.get(t, {}).items() if i != t]
            if cres:
                imin = min(cres, key=lambda iv: abs(iv[1]))[0]
                w.row_swap(t, imin)
                continue
            break
        t += 1
    rank = t
    diag = [w.entry(i, i) for i in range(rank)]
    # positive diagonal
    for i in range(rank):
        if diag[i] < 0:
            w.row_negate(i)
            diag[i] = -diag[i]
    # divisibility chain via 2x2 unimodular moves on the diagonal block
    for i in range(rank):
        for j in range(i + 1, rank):
            a, b = w.entry(i, i), w.entry(j, j)
            if a == 0 or b % a == 0:
                continue
            g, u, v = _xgcd(a, b)
            # L = [[u, v], [-b/g, a/g]], R = [[1, -v*b/g], [1, u*a/g]]
            w.row_combine2(i, j, u, v, -(b // g), a // g)
            w.col_combine2(i, j, 1, 1, -(v * b // g), u * a // g)
            assert w.entry(i, j) == 0 and w.entry(j, i) == 0
            diag[i], diag[j] = w.entry(i, i), w.entry(j, j)
    # drop trivial 1|1|... reordering concerns: chain pass above leaves d1 | d2 | ...
    diag = [w.entry(i, i) for i in range(rank)]
    D = ExactMatrix(ZZ, m, n, {(i, i): d for i, d in enumerate(diag) if d})
    U = None
    if want_u:
        U = ExactMatrix(ZZ, m, m)
        for i, urow in w.U.items():
            for k, v in urow.items():
                if v:
                    U.data[(i, k)] = v
    V = None
    if want_v:
        V = ExactMatrix(ZZ, n, n)
        for j, vcol in w.V.items():
            for k, v in vcol.items():
                if v:
                    V.data[(k, j)] = v
    return SNFResult(U, D, V, [d for d in diag if d])


def _xgcd(a: int, b: int):
    """g, u, v with u*a + v*b == g == gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _unit_lift(d: int, n: int) -> int:
    """A unit u mod n with d = u * gcd(d, n) mod n."""
    d %= n
    if d == 0:
        return 1
    g = gcd(d, n)
    step = n // g
    u = d // g
    while gcd(u, n) != 1:
        u += step
    return u % n


def smith_normal_form(mat: ExactMatrix, want_u=True, want_v=True) -> SNFResult:
    """SNF over Z or Z/n.

    Over Z/n the result is the reduction of an integer SNF with the
    diagonal canonicalized to gcd(d, n); U and V stay invertible mod n.
    """
    ring = mat.ring
    if ring.kind == "Z":
        return smith_normal_form_Z(mat, want_u, want_v)
    if ring.kind != "Zn":
        raise ValueError("smith_normal_form is defined over Z and Z/n only")
    n = ring.n
    res = smith_normal_form_Z(mat.lift_to_Z(), True, want_v)
    U, D, V = res.U, res.D, res.V
    diag = []
    for i in range(min(mat.rows, mat.cols)):
        d = D.get(i, i) % n
        g = gcd(d, n) % n
        if d != g:
            u = _unit_lift(d, n)
            uinv = pow(u, -1, n)
            # scale row i of U (and of D) by the inverse unit
            for k in range(U.cols):
                v = U.get(i, k)
                if v:
                    U.data[(i, k)] = v * uinv
            d = g
        if d:
            diag.append(d)
        D.data.pop((i, i), None)
        if d:
            D.data[(i, i)] = d
    Un = U.change_ring(ring) if want_u else None
    return SNFResult(
        Un,
        D.change_ring(ring),
        V.change_ring(ring) if want_v else None,
        diag,
    )


# ----------------------------------------------------------------------
# kernels and solving


def kernel(mat: ExactMatrix) -> ExactMatrix:
    """Columns spanning {x : mat @ x = 0} over the matrix's ring.

    Over Z this is an honest lattice basis; over Z/n it is a spanning set
    (kernel of the reduction, computed via the n*I lift); over Q a basis.
    """
    ring = mat.ring
    if ring.kind == "Q":
        return _kernel_q(mat)
    if ring.kind == "Z":
        res = smith_normal_form_Z(mat, want_u=False, want_v=True)
        r = len(res.diag)
        cols = list(range(r, mat.cols))
        return res.V.submatrix(list(range(mat.cols)), cols)
    # Z/n: x with A x = 0 mod n  <=>  (x, y) with A x + n y = 0 over Z
    n = ring.n
    A = mat.lift_to_Z()
    aug = A.hstack(ExactMatrix.identity(ZZ, mat.rows).scale(n))
    K = kernel(aug)
    X = K.submatrix(list(range(mat.cols)), list(range(K.cols)))
    return X.change_ring(ring)


def _kernel_q(mat: ExactMatrix) -> ExactMatrix:
    rows = [[Fraction(v) for v in row] for row in mat.to_rows()]
    m, n = mat.rows, mat.cols
    pivots = []
    r = 0
    for j in range(n):
        piv = next((i for i in range(r, m) if rows[i][j] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][j]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][j] != 0:
                f = rows[i][j]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(j)
        r += 1
        if r == m:
            break
    free = [j for j in range(n) if j not in pivots]
    data = {}
    for a, j in enumerate(free):
        data[(j, a)] = Fraction(1)
        for b, pj in enumerate(pivots):
            v = rows[b][j]
            if v != 0:
                data[(pj, a)] = -v
    return ExactMatrix(QQ, n, len(free), data)


def rank(mat: ExactMatrix) -> int:
    ring = mat.ring
    if ring.kind == "Q":
        return mat.cols - _kernel_q(mat).cols
    if ring.kind == "Z":
        return len(smith_normal_form_Z(mat, want_u=False, want_v=False).diag)
    raise ValueError("rank over Z/n is not well defined; use module normal forms")


def solve(mat: ExactMatrix, b: list) -> list | None:
    """One solution x of mat @ x = b over the matrix's ring, or None."""
    ring = mat.ring
    if ring.kind == "Q":
        return _solve_q(mat, b)
    if ring.kind == "Zn":
        n = ring.n
        A = mat.lift_to_Z().hstack(ExactMatrix.identity(ZZ, mat.rows).scale(n))
        x = solve(A, [int(v) for v in b])
        if x is None:
            return None
        return [ring.normalize(v) for v in x[: mat.cols]]
    res = smith_normal_form_Z(mat)
    y = res.U.apply([int(v) for v in b])
    z = [0] * mat.cols
    for k in range(min(mat.rows, mat.cols)):
        d = res.D.get(k, k)
        if d:
            if y[k] % d:
                return None
            z[k] = y[k] // d
        elif y[k]:
            return None
    for k in range(min(mat.rows, mat.cols), mat.rows):
        if y[k]:
            return None
    return res.V.apply(z)


def _solve_q(mat: ExactMatrix, b: list):
    m, n = mat.rows, mat.cols
    rows = [[Fraction(v) for v in row] for row in mat.to_rows()]
    rhs = [Fraction(v) for v in b]
    piv_of = {}
    r = 0
    for j in range(n):
        piv = next((i for i in range(r, m) if rows[i][j] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        rhs[r], rhs[piv] = rhs[piv], rhs[r]
        pv = rows[r][j]
        rows[r] = [x / pv for x in rows[r]]
        rhs[r] /= pv
        for i in range(m):
            if i != r and rows[i][j] != 0:
                f = rows[i][j]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                rhs[i] -= f * rhs[r]
        piv_of[j] = r
        r += 1
    for i in range(r, m):
        if rhs[i] != 0:
            return None
    x = [Fraction(0)] * n
    for j, i in piv_of.items():
        x[j] = rhs[i]
    return x


def solve_matrix(mat: ExactMatrix, B: ExactMatrix) -> ExactMatrix | None:
    """X with mat @ X = B, or None.  Shares one SNF across all columns."""
    ring = mat.ring
    if ring != B.ring:
        raise ValueError("ring mismatch in solve_matrix")
    if mat.rows != B.rows:
        raise ValueError("shape mismatch in solve_matrix")
    cols = []
    if ring.kind == "Zn":
        n = ring.n
        A = mat.lift_to_Z().hstack(ExactMatrix.identity(ZZ, mat.rows).scale(n))
        res = smith_normal_form_Z(A)
        for j in range(B.cols):
            x = _solve_with_snf(res, A.rows, A.cols, B.lift_to_Z().column_vector(j))
            if x is None:
                return None
            cols.append([ring.normalize(v) for v in x[: mat.cols]])
        return _cols_to_matrix(ring, mat.cols, cols)
    if ring.kind == "Q":
        for j in range(B.cols):
            x = _solve_q(mat, B.column_vector(j))
            if x is None:
                return None
            cols.append(x)
        return _cols_to_matrix(ring, mat.cols, cols)
    res = smith_normal_form_Z(mat)
    for j in range(B.cols):
        x = _solve_with_snf(res, mat.rows, mat.cols, B.column_vector(j))
        if x is None:
            return None
        cols.append(x)
    return _cols_to_matrix(ring, mat.cols, cols)


def _solve_with_snf(res: SNFResult, m, n, b):
    y = res.U.apply([int(v) for v in b])
    z = [0] * n
    for k in range(min(m, n)):
        d = res.D.get(k, k)
        if d:
            if y[k] % d:
                return None
            z[k] = y[k] // d
        elif y[k]:
            return None
    for k in range(min(m, n), m):
        if y[k]:
            return None
    return res.V.apply(z)


def _cols_to_matrix(ring, nrows, cols):
    data = {}
    for j, col in enumerate(cols):
        for i, v in enumerate(col):
            if v:
                data[(i, j)] = v
    return ExactMatrix(ring, nrows, len(cols), data)
