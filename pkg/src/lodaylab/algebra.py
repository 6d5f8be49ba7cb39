"""Finite-dimensional unital algebras with (anti-)involution.

An algebra is given by structure constants c[i][j][k] on a free basis
(e_i e_j = sum_k c[i][j][k] e_k), a unit vector and an involution matrix.
Everything downstream insists on a clean validation report, which checks
associativity, the unit, and the involution axioms exhaustively on basis
triples.  Giving algebras by structure constants on a free basis is also
what makes the standing flatness hypotheses hold by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BaseMismatch, FlavorMismatch, IncompatibleBimodule, ValidationFailed
from .matrix import ExactMatrix
from .rings import BaseRing

INVOLUTION = "involution"
ANTI = "anti-involution"


@dataclass
class Violation:
    axiom: str
    witness: tuple
    detail: str = ""

    def __str__(self):
        w = f" at {self.witness}" if self.witness else ""
        d = f": {self.detail}" if self.detail else ""
        return f"{self.axiom}{w}{d}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def add(self, axiom, witness=(), detail=""):
        self.violations.append(Violation(axiom, witness, detail))

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(v) for v in self.violations)


class InvolutiveAlgebra:
    def __init__(
        self,
        base: BaseRing,
        dim: int,
        mul,  # dict (i, j) -> dict k -> scalar
        unit,  # coefficient vector, length dim
        involution: ExactMatrix,
        flavor: str,
        commutative: bool,
        labels=None,
        name: str = "",
    ):
        if flavor not in (INVOLUTION, ANTI):
            raise FlavorMismatch(f"unknown flavor {flavor!r}")
        self.base = base
        self.dim = dim
        norm = base.normalize
        self.mul = {}
        for (i, j), row in mul.items():
            clean = {k: norm(v) for k, v in row.items() if norm(v) != 0}
            if clean:
                self.mul[(i, j)] = clean
        self.unit = tuple(norm(v) for v in unit)
        self.involution = involution
        self.flavor = flavor
        self.commutative = commutative
        self.labels = list(labels) if labels else [f"e{i}" for i in range(dim)]
        self.name = name or "algebra"
        self._np_cache = None

    # -- basic algebra operations ------------------------------------

    def mul_basis(self, i: int, j: int) -> dict:
        return self.mul.get((i, j), {})

    def mul_vec(self, x, y):
        """Product of two coefficient vectors."""
        acc = {}
        for i, xv in enumerate(x):
            if not xv:
                continue
            for j, yv in enumerate(y):
                if not yv:
                    continue
                c = xv * yv
                for k, s in self.mul_basis(i, j).items():
                    acc[k] = acc.get(k, 0) + c * s
        norm = self.base.normalize
        out = [self.base.zero()] * self.dim
        for k, v in acc.items():
            out[k] = norm(v)
        return out

    def involution_vec(self, x):
        return self.involution.apply(list(x))

    @property
    def unit_vec(self):
        return list(self.unit)

    def basis_vec(self, i):
        v = [self.base.zero()] * self.dim
        v[i] = self.base.one()
        return v

    @property
    def effective_anti(self) -> bool:
        """Whether the involution reverses products (trivially so if commutative)."""
        return self.flavor == ANTI or self.commutative

    # numpy int64 tensors, only for Z/n bases
    def np_tensors(self):
        if self._np_cache is None:
            if self.base.kind != "Zn":
                raise ValueError("numpy tensors only for Z/n algebras")
            n = self.base.n
            c = np.zeros((self.dim, self.dim, self.dim), dtype=np.int64)
            for (i, j), row in self.mul.items():
                for k, v in row.items():
                    c[i, j, k] = v % n
            t = np.zeros((self.dim, self.dim), dtype=np.int64)
            for (a, b), v in self.involution.data.items():
                t[a, b] = int(v) % n
            u = np.array([int(v) % n for v in self.unit], dtype=np.int64)
            self._np_cache = (c, t, u)
        return self._np_cache

    def mult_matrix(self) -> ExactMatrix:
        """Multiplication A (x) A -> A as a (dim) x (dim^2) matrix."""
        data = {}
        for (i, j), row in self.mul.items():
            for k, v in row.items():
                data[(k, i * self.dim + j)] = v
        return ExactMatrix(self.base, self.dim, self.dim * self.dim, data)

    def __repr__(self):
        return f"InvolutiveAlgebra({self.name}, dim={self.dim} over {self.base}, {self.flavor})"


def validate(a: InvolutiveAlgebra) -> ValidationReport:
    """Exhaustive axiom check on basis triples/pairs."""
    rep = ValidationReport()
    d = a.dim
    if a.base.kind == "Zn":
        _validate_np(a, rep)
    else:
        _validate_py(a, rep)
    # commutativity flag
    comm = all(a.mul_basis(i, j) == a.mul_basis(j, i) for i in range(d) for j in range(d))
    if comm != a.commutative:
        rep.add("commutative-flag", (), f"declared {a.commutative}, actual {comm}")
    return rep


def _validate_np(a: InvolutiveAlgebra, rep: ValidationReport):
    n = a.base.n
    d = a.dim
    c, t, u = a.np_tensors()
    left = np.einsum("ijm,mkl->ijkl", c, c) % n
    right = np.einsum("jkm,iml->ijkl", c, c) % n
    bad = np.argwhere((left != right).any(axis=3))
    for i, j, k in bad[:200]:
        rep.add("associativity", (int(i), int(j), int(k)))
    prod_u = np.einsum("i,ijk->jk", u, c) % n
    eye = np.eye(d, dtype=np.int64)
    if not np.array_equal(prod_u, eye):
        rep.add("unit-left", tuple(int(x) for x in np.argwhere(prod_u != eye)[0]))
    prod_u2 = np.einsum("j,ijk->ik", u, c) % n
    if not np.array_equal(prod_u2, eye):
        rep.add("unit-right", tuple(int(x) for x in np.argwhere(prod_u2 != eye)[0]))
    if not np.array_equal((t @ t) % n, eye):
        rep.add("involution-squared", ())
    if not np.array_equal((t @ u) % n, u % n):
        rep.add("involution-fixes-unit", ())
    lhs = np.einsum("ijk,lk->ijl", c, t) % n  # tau(e_i e_j)
    tei_tej = np.einsum("ai,bj,abl->ijl", t, t, c) % n
    tej_tei = np.einsum("aj,bi,abl->ijl", t, t, c) % n
    want = tej_tei if a.flavor == ANTI else tei_tej
    bad = np.argwhere((lhs != want).any(axis=2))
    for i, j in bad[:200]:
        rep.add(f"involution-flavor({a.flavor})", (int(i), int(j)))


def _validate_py(a: InvolutiveAlgebra, rep: ValidationReport):
    d = a.dim
    basis = [a.basis_vec(i) for i in range(d)]
    for i in range(d):
        for j in range(d):
            eij = a.mul_vec(basis[i], basis[j])
            for k in range(d):
                lhs = a.mul_vec(eij, basis[k])
                rhs = a.mul_vec(basis[i], a.mul_vec(basis[j], basis[k]))
                if lhs != rhs:
                    rep.add("associativity", (i, j, k))
    for j in range(d):
        if a.mul_vec(a.unit_vec, basis[j]) != basis[j]:
            rep.add("unit-left", (j,))
        if a.mul_vec(basis[j], a.unit_vec) != basis[j]:
            rep.add("unit-right", (j,))
    for j in range(d):
        if a.involution_vec(a.involution_vec(basis[j])) != basis[j]:
            rep.add("involution-squared", (j,))
    if a.involution_vec(a.unit_vec) != a.unit_vec:
        rep.add("involution-fixes-unit", ())
    for i in range(d):
        for j in range(d):
            lhs = a.involution_vec(a.mul_vec(basis[i], basis[j]))
            ti = a.involution_vec(basis[i])
            tj = a.involution_vec(basis[j])
            rhs = a.mul_vec(tj, ti) if a.flavor == ANTI else a.mul_vec(ti, tj)
            if lhs != rhs:
                rep.add(f"involution-flavor({a.flavor})", (i, j))


def require_valid(a: InvolutiveAlgebra) -> InvolutiveAlgebra:
    rep = validate(a)
    if not rep.ok:
        raise ValidationFailed(rep)
    return a


# ----------------------------------------------------------------------
# derived algebras


def opposite(a: InvolutiveAlgebra) -> InvolutiveAlgebra:
    mul = {}
    for (i, j), row in a.mul.items():
        mul[(j, i)] = dict(row)
    return InvolutiveAlgebra(
        a.base, a.dim, mul, a.unit, a.involution, a.flavor, a.commutative,
        labels=a.labels, name=f"{a.name}^op",
    )


def tensor(a: InvolutiveAlgebra, b: InvolutiveAlgebra) -> InvolutiveAlgebra:
    """A (x) B with basis (i, j) -> i * dim(B) + j and involution tau_A (x) tau_B."""
    if a.base != b.base:
        raise BaseMismatch(f"{a.base} vs {b.base}")
    if a.flavor != b.flavor:
        raise FlavorMismatch(f"{a.flavor} vs {b.flavor}")
    db = b.dim
    mul = {}
    for (i1, j1), row1 in a.mul.items():
        for (i2, j2), row2 in b.mul.items():
            tgt = mul.setdefault((i1 * db + i2, j1 * db + j2), {})
            for k1, v1 in row1.items():
                for k2, v2 in row2.items():
                    key = k1 * db + k2
                    tgt[key] = tgt.get(key, 0) + v1 * v2
    unit = [a.base.zero()] * (a.dim * db)
    for i, va in enumerate(a.unit):
        for j, vb in enumerate(b.unit):
            unit[i * db + j] = a.base.mul(va, vb)
    inv = a.involution.kron(b.involution)
    comm = a.commutative and b.commutative
    labels = [f"{la}*{lb}" for la in a.labels for lb in b.labels]
    return InvolutiveAlgebra(
        a.base, a.dim * db, mul, unit, inv, a.flavor, comm,
        labels=labels, name=f"{a.name}(x){b.name}",
    )


def enveloping(a: InvolutiveAlgebra) -> InvolutiveAlgebra:
    """A (x) A^op with the flip involution tau(x (x) y) = ybar (x) xbar."""
    if not a.effective_anti:
        raise FlavorMismatch(
            "enveloping flip needs an anti-involution (or a commutative algebra)"
        )
    e = tensor(a, opposite(a))
    d = a.dim
    # flip(e_i (x) e_j) = taubar e_j (x) taubar e_i
    data = {}
    for i in range(d):
        for j in range(d):
            for (bi, vi) in _matrix_column(a.involution, i):
                for (bj, vj) in _matrix_column(a.involution, j):
                    data[(bj * d + bi, i * d + j)] = a.base.mul(vi, vj)
    flip = ExactMatrix(a.base, d * d, d * d, data)
    e.involution = flip
    e.flavor = INVOLUTION  # the flip is multiplicative on A (x) A^op
    e.name = f"{a.name}^e"
    e._np_cache = None
    return e


def _matrix_column(mat: ExactMatrix, j):
    return [(i, v) for (i, jj), v in mat.data.items() if jj == j]


def involutive_enveloping(a: InvolutiveAlgebra) -> InvolutiveAlgebra:
    """A^ie = (A (x) A^op)[C2] as a twisted group algebra.

    Basis (eps, i, j) -> eps * dim^2 + i * dim + j, so the eps = 0 block is
    the enveloping algebra with matching structure constants.
    """
    if not a.effective_anti:
        raise FlavorMismatch("involutive enveloping needs an anti-involution")
    env = enveloping(a)
    d2 = env.dim
    flip = env.involution
    mul = {}
    # (x (x) tau^e1) (y (x) tau^e2) = x . flip^e1(y) (x) tau^(e1+e2)
    for x in range(d2):
        for y in range(d2):
            for eps1 in (0, 1):
                ytw = [(y, a.base.one())] if eps1 == 0 else _matrix_column(flip, y)
                for eps2 in (0, 1):
                    eps = (eps1 + eps2) % 2
                    tgt = mul.setdefault((eps1 * d2 + x, eps2 * d2 + y), {})
                    for yy, w in ytw:
                        for k, v in env.mul_basis(x, yy).items():
                            key = eps * d2 + k
                            tgt[key] = tgt.get(key, 0) + w * v
    unit = [a.base.zero()] * (2 * d2)
    for i, v in enumerate(env.unit):
        unit[i] = v
    # declared involution: identity (valid, multiplicative); the C2-twist is
    # carried by the tau-grading of the multiplication itself
    inv = ExactMatrix.identity(a.base, 2 * d2)
    labels = [f"{l}|t^{e}" for e in (0, 1) for l in env.labels]
    comm = _is_commutative(mul, 2 * d2, a.base)
    return InvolutiveAlgebra(
        a.base, 2 * d2, mul, unit, inv, INVOLUTION, comm,
        labels=labels, name=f"{a.name}^ie",
    )


def _is_commutative(mul, dim, base):
    norm = base.normalize
    for i in range(dim):
        for j in range(i + 1, dim):
            a = {k: norm(v) for k, v in mul.get((i, j), {}).items() if norm(v)}
            b = {k: norm(v) for k, v in mul.get((j, i), {}).items() if norm(v)}
            if a != b:
                return False
    return True


# ----------------------------------------------------------------------
# bimodules


class InvolutiveBimodule:
    """A-bimodule with involution compatible with the algebra's flavor.

    left[(i, p)] -> dict q -> c   encodes e_i . m_p = sum c m_q
    right[(p, i)] -> dict q -> c  encodes m_p . e_i = sum c m_q
    """

    def __init__(self, algebra: InvolutiveAlgebra, dim: int, left, right, involution: ExactMatrix, name=""):
        self.algebra = algebra
        self.dim = dim
        norm = algebra.base.normalize
        self.left = {
            k: {q: norm(v) for q, v in row.items() if norm(v) != 0} for k, row in left.items()
        }
        self.right = {
            k: {q: norm(v) for q, v in row.items() if norm(v) != 0} for k, row in right.items()
        }
        self.left = {k: row for k, row in self.left.items() if row}
        self.right = {k: row for k, row in self.right.items() if row}
        self.involution = involution
        self.name = name or f"{algebra.name}-bimodule"

    def left_vec(self, avec, mvec):
        acc = [0] * self.dim
        for i, av in enumerate(avec):
            if not av:
                continue
            for p, mv in enumerate(mvec):
                if not mv:
                    continue
                c = av * mv
                for q, s in self.left.get((i, p), {}).items():
                    acc[q] = acc[q] + c * s
        norm = self.algebra.base.normalize
        return [norm(v) for v in acc]

    def right_vec(self, mvec, avec):
        acc = [0] * self.dim
        for p, mv in enumerate(mvec):
            if not mv:
                continue
            for i, av in enumerate(avec):
                if not av:
                    continue
                c = mv * av
                for q, s in self.right.get((p, i), {}).items():
                    acc[q] = acc[q] + c * s
        norm = self.algebra.base.normalize
        return [norm(v) for v in acc]

    def involution_vec(self, mvec):
        return self.involution.apply(list(mvec))

    def left_matrix(self) -> ExactMatrix:
        """Action A (x) M -> M as a (dim M) x (dim A * dim M) matrix."""
        d = self.dim
        data = {}
        for (i, p), row in self.left.items():
            for q, v in row.items():
                data[(q, i * d + p)] = v
        return ExactMatrix(self.algebra.base, d, self.algebra.dim * d, data)

    def right_matrix(self) -> ExactMatrix:
        """Action M (x) A -> M as a (dim M) x (dim M * dim A) matrix."""
        d = self.algebra.dim
        data = {}
        for (p, i), row in self.right.items():
            for q, v in row.items():
                data[(q, p * d + i)] = v
        return ExactMatrix(self.algebra.base, self.dim, self.dim * d, data)

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        a = self.algebra
        abasis = [a.basis_vec(i) for i in range(a.dim)]
        mbasis = []
        for p in range(self.dim):
            v = [a.base.zero()] * self.dim
            v[p] = a.base.one()
            mbasis.append(v)
        for i in range(a.dim):
            for j in range(a.dim):
                prod = a.mul_vec(abasis[i], abasis[j])
                for p in range(self.dim):
                    if self.left_vec(prod, mbasis[p]) != self.left_vec(
                        abasis[i], self.left_vec(abasis[j], mbasis[p])
                    ):
                        rep.add("left-associativity", (i, j, p))
                    if self.right_vec(mbasis[p], prod) != self.right_vec(
                        self.right_vec(mbasis[p], abasis[i]), abasis[j]
                    ):
                        rep.add("right-associativity", (p, i, j))
                    if self.right_vec(self.left_vec(abasis[i], mbasis[p]), abasis[j]) != self.left_vec(
                        abasis[i], self.right_vec(mbasis[p], abasis[j])
                    ):
                        rep.add("bimodule-commuting", (i, p, j))
        for p in range(self.dim):
            if self.left_vec(a.unit_vec, mbasis[p]) != mbasis[p]:
                rep.add("unit-left", (p,))
            if self.right_vec(mbasis[p], a.unit_vec) != mbasis[p]:
                rep.add("unit-right", (p,))
            if self.involution_vec(self.involution_vec(mbasis[p])) != mbasis[p]:
                rep.add("involution-squared", (p,))
        # involution compatibility
        for i in range(a.dim):
            ti = a.involution_vec(abasis[i])
            for p in range(self.dim):
                tp = self.involution_vec(mbasis[p])
                if a.effective_anti:
                    for j in range(a.dim):
                        tj = a.involution_vec(abasis[j])
                        lhs = self.involution_vec(
                            self.right_vec(self.left_vec(abasis[i], mbasis[p]), abasis[j])
                        )
                        rhs = self.left_vec(tj, self.right_vec(tp, ti))
                        if lhs != rhs:
                            rep.add("involution-sandwich", (i, p, j))
                else:
                    if self.involution_vec(self.left_vec(abasis[i], mbasis[p])) != self.left_vec(ti, tp):
                        rep.add("involution-left-compat", (i, p))
                    if self.involution_vec(self.right_vec(mbasis[p], abasis[i])) != self.right_vec(tp, ti):
                        rep.add("involution-right-compat", (p, i))
        return rep

    def require_valid(self):
        rep = self.validate()
        if not rep.ok:
            raise IncompatibleBimodule(str(rep))
        return self


def module_action_on_self(a: InvolutiveAlgebra) -> InvolutiveBimodule:
    """A as an involutive bimodule over itself."""
    left = {}
    right = {}
    for (i, j), row in a.mul.items():
        left[(i, j)] = dict(row)
        right[(i, j)] = dict(row)
    return InvolutiveBimodule(a, a.dim, left, right, a.involution, name=f"{a.name} on itself")
