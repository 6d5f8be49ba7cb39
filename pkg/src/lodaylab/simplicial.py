"""Simplicial modules, two-sided bar constructions, and C2-actions.

Two backends share one interface: an exact ModuleMap-based one for small
or non-Z/n inputs, and a scipy int64 one for the large free complexes the
bar construction produces over Z/n.  Levels of B(L, Gamma, R) are indexed
mixed-radix as (l, g_1, ..., g_n, r) with the leftmost factor slowest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import config
from .algebra import InvolutiveAlgebra, InvolutiveBimodule
from .errors import IncompatibleBimodule, NotInvolution, TwoNotInvertible
from .fastcomplex import ChainComplex, FreeComplexZn, csr_from_exact, exact_from_csr
from .matrix import ExactMatrix
from .modules import FgModule, ModuleMap, NormalForm
from .rings import BaseRing
from .snf import solve_matrix


@dataclass
class BarSlot:
    """One end of a two-sided bar: a module with its action of the middle.

    For the left end the matrix encodes the right action L (x) Gamma -> L
    (column index l * dim_mid + g); for the right end the left action
    Gamma (x) R -> R (column index g * dim_right + r).
    """

    dim: int
    action: ExactMatrix


def left_slot_over_enveloping(a: InvolutiveAlgebra, env: InvolutiveAlgebra) -> BarSlot:
    """A as a right A(x)A^op-module: x . (a (x) b) = b x a."""
    d = a.dim
    data = {}
    for x in range(d):
        for i in range(d):
            for j in range(d):
                # e_j * e_x * e_i
                acc = {}
                for m, v in a.mul_basis(j, x).items():
                    for y, w in a.mul_basis(m, i).items():
                        acc[y] = acc.get(y, 0) + v * w
                col = x * env.dim + (i * d + j)
                for y, v in acc.items():
                    data[(y, col)] = v
    return BarSlot(d, ExactMatrix(a.base, d, d * env.dim, data))


def right_slot_over_enveloping(bim: InvolutiveBimodule, env: InvolutiveAlgebra) -> BarSlot:
    """M as a left A(x)A^op-module: (a (x) b) . m = a m b."""
    a = bim.algebra
    d = a.dim
    m = bim.dim
    data = {}
    for i in range(d):
        for j in range(d):
            for p in range(m):
                acc = {}
                for q, v in bim.left.get((i, p), {}).items():
                    for s, w in bim.right.get((q, j), {}).items():
                        acc[s] = acc.get(s, 0) + v * w
                col = (i * d + j) * m + p
                for s, v in acc.items():
                    data[(s, col)] = v
    return BarSlot(m, ExactMatrix(a.base, m, env.dim * m, data))


def left_slot_over_ie(a: InvolutiveAlgebra, ie: InvolutiveAlgebra) -> BarSlot:
    """A as a right A^ie-module: x . (a (x) b (x) tau^e) = tau^e(b x a)."""
    d = a.dim
    d2 = d * d
    data = {}
    for x in range(d):
        for eps in (0, 1):
            for i in range(d):
                for j in range(d):
                    acc = {}
                    for m_, v in a.mul_basis(j, x).items():
                        for y, w in a.mul_basis(m_, i).items():
                            acc[y] = acc.get(y, 0) + v * w
                    if eps:
                        twisted = {}
                        for y, v in acc.items():
                            for (yy, _j), tv in a.involution.data.items():
                                if _j == y:
                                    twisted[yy] = twisted.get(yy, 0) + tv * v
                        acc = twisted
                    col = x * ie.dim + (eps * d2 + i * d + j)
                    for y, v in acc.items():
                        data[(y, col)] = v
    return BarSlot(d, ExactMatrix(a.base, d, d * ie.dim, data))


def right_slot_over_ie(bim: InvolutiveBimodule, ie: InvolutiveAlgebra) -> BarSlot:
    """M as a left A^ie-module: (a (x) b (x) tau^e) . m = a tau_M^e(m) b."""
    a = bim.algebra
    d = a.dim
    d2 = d * d
    m = bim.dim
    data = {}
    inv_cols = {}
    for (q, p), v in bim.involution.data.items():
        inv_cols.setdefault(p, []).append((q, v))
    for eps in (0, 1):
        for i in range(d):
            for j in range(d):
                for p in range(m):
                    src = [(p, a.base.one())] if eps == 0 else inv_cols.get(p, [])
                    acc = {}
                    for pp, tv in src:
                        for q, v in bim.left.get((i, pp), {}).items():
                            for s, w in bim.right.get((q, j), {}).items():
                                acc[s] = acc.get(s, 0) + tv * v * w
                    col = (eps * d2 + i * d + j) * m + p
                    for s, v in acc.items():
                        data[(s, col)] = v
    return BarSlot(m, ExactMatrix(a.base, m, ie.dim * m, data))


def mult_slots(a: InvolutiveAlgebra) -> tuple[BarSlot, BarSlot]:
    """A as a module over itself on both sides (for B(A, A, A))."""
    d = a.dim
    left_data = {}
    right_data = {}
    for (i, j), row in a.mul.items():
        for k, v in row.items():
            left_data[(k, i * d + j)] = v  # x . g = x g  at column (x=i, g=j)
            right_data[(k, i * d + j)] = v  # g . x = g x at column (g=i, x=j)
    return (
        BarSlot(d, ExactMatrix(a.base, d, d * d, left_data)),
        BarSlot(d, ExactMatrix(a.base, d, d * d, right_data)),
    )


# ----------------------------------------------------------------------
# the bar construction


class BarComplex:
    """Two-sided bar B(L, Gamma, R) truncated at simplicial degree N.

    Exposes faces, degeneracies, boundaries, and the associated chain
    complex; backend is scipy CSR over Z/n, ExactMatrix otherwise.
    """

    def __init__(self, left: BarSlot, mid: InvolutiveAlgebra, right: BarSlot,
                 N: int, normalized: bool = False, cap: int | None = None):
        self.base = mid.base
        self.left = left
        self.mid = mid
        self.right = right
        self.N = N
        self.normalized = normalized
        self._fast = self.base.kind == "Zn"
        self._build(cap)

    # -- construction -------------------------------------------------

    def _build(self, cap):
        base = self.base
        gdim = self.mid.dim
        mul = self.mid.mult_matrix()
        act_l = self.left.action
        act_r = self.right.action
        if self.normalized:
            T, Tinv = unit_adapted_change(self.mid)
            gdim = gdim - 1
            keep = list(range(1, self.mid.dim))
            mul_ad = Tinv @ mul @ T.kron(T)
            mul = mul_ad.submatrix(keep, [i * self.mid.dim + j for i in keep for j in keep])
            IL = ExactMatrix.identity(base, self.left.dim)
            IR = ExactMatrix.identity(base, self.right.dim)
            act_l = (act_l @ IL.kron(T)).submatrix(
                list(range(self.left.dim)),
                [x * self.mid.dim + g for x in range(self.left.dim) for g in keep],
            )
            act_r = (act_r @ T.kron(IR)).submatrix(
                list(range(self.right.dim)),
                [g * self.right.dim + r for g in keep for r in range(self.right.dim)],
            )
        self.gdim = gdim
        self.dims = []
        for n in range(self.N + 1):
            size = self.left.dim * (gdim**n) * self.right.dim
            config.check_level_cap(size, cap, f"bar degree {n}")
            self.dims.append(size)
        if self._fast:
            self._mul = csr_from_exact(mul)
            self._act_l = csr_from_exact(act_l)
            self._act_r = csr_from_exact(act_r)
        else:
            self._mul = mul
            self._act_l = act_l
            self._act_r = act_r

    def _eye(self, k):
        if self._fast:
            return sparse.identity(k, dtype=np.int64, format="csr")
        return ExactMatrix.identity(self.base, k)

    def _kron(self, a, b):
        if self._fast:
            return sparse.kron(a, b, format="csr")
        return a.kron(b)

    def face(self, n: int, i: int):
        """d_i : level n -> level n - 1."""
        if not (0 <= i <= n and 1 <= n <= self.N):
            raise IndexError(f"face {i} at level {n}")
        g = self.gdim
        L, R = self.left.dim, self.right.dim
        if i == 0:
            rest = g ** (n - 1) * R
            m = self._kron(self._act_l, self._eye(rest))
        elif i == n:
            pre = L * g ** (n - 1)
            m = self._kron(self._eye(pre), self._act_r)
        else:
            pre = L * g ** (i - 1)
            post = g ** (n - 1 - i) * R
            m = self._kron(self._kron(self._eye(pre), self._mul), self._eye(post))
        return self._reduce(m)

    def degeneracy(self, n: int, i: int):
        """s_i : level n -> level n + 1 (unnormalized only)."""
        if self.normalized:
            raise ValueError("degeneracies live on the unnormalized bar")
        if not (0 <= i <= n and 0 <= n < self.N):
            raise IndexError(f"degeneracy {i} at level {n}")
        g = self.gdim
        L, R = self.left.dim, self.right.dim
        unit = ExactMatrix(self.base, g, 1, {(k, 0): v for k, v in enumerate(self.mid.unit) if v})
        u = csr_from_exact(unit) if self._fast else unit
        pre = L * g**i
        post = g ** (n - i) * R
        return self._reduce(self._kron(self._kron(self._eye(pre), u), self._eye(post)))

    def boundary(self, n: int):
        """sum (-1)^i d_i : level n -> level n - 1."""
        total = None
        for i in range(n + 1):
            f = self.face(n, i)
            if i % 2:
                f = -f if self._fast else f.scale(-1)
            total = f if total is None else total + f
        return self._reduce(total)

    def _reduce(self, m):
        if self._fast:
            m = m.tocsr()
            m.data %= self.base.n
            m.eliminate_zeros()
        return m

    # -- products -----------------------------------------------------

    def to_chain_complex(self):
        bnds = [self.boundary(n) for n in range(1, self.N + 1)]
        if self._fast:
            return FreeComplexZn(self.base.n, self.dims, bnds)
        levels = [FgModule.free(self.base, d) for d in self.dims]
        maps = [
            ModuleMap(levels[n], levels[n - 1], bnds[n - 1], check=False)
            for n in range(1, self.N + 1)
        ]
        return ChainComplex(levels, maps)

    def homology_list(self, N: int) -> list[NormalForm]:
        return self.to_chain_complex().homology_list(N)

    def check_simplicial_identities(self):
        """d_i d_j = d_{j-1} d_i (i < j), plus the degeneracy identities."""
        for n in range(2, self.N + 1):
            faces = [self.face(n, i) for i in range(n + 1)]
            lower = [self.face(n - 1, i) for i in range(n)]
            for j in range(1, n + 1):
                for i in range(j):
                    if not self._equal(lower[i] @ faces[j], lower[j - 1] @ faces[i]):
                        raise AssertionError(f"d_{i} d_{j} != d_{j-1} d_{i} at level {n}")
        if self.normalized:
            return
        for n in range(0, self.N):
            degs = [self.degeneracy(n, i) for i in range(n + 1)]
            faces_up = [self.face(n + 1, i) for i in range(n + 2)]
            eye = self._eye(self.dims[n])
            for j in range(n + 1):
                if not self._equal(faces_up[j] @ degs[j], eye):
                    raise AssertionError(f"d_{j} s_{j} != id at level {n}")
                if not self._equal(faces_up[j + 1] @ degs[j], eye):
                    raise AssertionError(f"d_{j+1} s_{j} != id at level {n}")

    def _equal(self, a, b):
        if self._fast:
            diff = (a - b).tocoo()
            return diff.nnz == 0 or not np.any(diff.data % self.base.n)
        return a == b


def unit_adapted_change(alg: InvolutiveAlgebra) -> tuple[ExactMatrix, ExactMatrix]:
    """Basis change T with first new basis vector the unit; returns (T, T^-1)."""
    base = alg.base
    pivot = None
    for i, v in enumerate(alg.unit):
        if base.is_unit(v):
            pivot = i
            break
    if pivot is None:
        raise ValueError("unit vector has no unit coordinate; cannot normalize")
    d = alg.dim
    cols = []
    order = [pivot] + [i for i in range(d) if i != pivot]
    data = {}
    for new_j, old_j in enumerate(order):
        if new_j == 0:
            for k, v in enumerate(alg.unit):
                if v:
                    data[(k, 0)] = v
        else:
            data[(old_j, new_j)] = base.one()
    T = ExactMatrix(base, d, d, data)
    Tinv = solve_matrix(T, ExactMatrix.identity(base, d))
    if Tinv is None:
        raise ValueError("unit-adapted change of basis is not invertible")
    return T, Tinv


# ----------------------------------------------------------------------
# the diagonal C2-action and equivariant complexes


def flip_matrix(a: InvolutiveAlgebra) -> ExactMatrix:
    """tau(x (x) y) = ybar (x) xbar on A (x) A^op."""
    d = a.dim
    data = {}
    inv_cols = {}
    for (i, j), v in a.involution.data.items():
        inv_cols.setdefault(j, []).append((i, v))
    for i in range(d):
        for j in range(d):
            for (bi, vi) in inv_cols.get(i, []):
                for (bj, vj) in inv_cols.get(j, []):
                    data[(bj * d + bi, i * d + j)] = a.base.mul(vi, vj)
    return ExactMatrix(a.base, d * d, d * d, data)


class EquivariantComplex:
    """Chain complex with a degreewise involution commuting with d.

    kind records whether the action came from a simplicial map ("simplicial")
    or from a sign-adjusted chain-level operator ("signed-chain").
    """

    def __init__(self, complex_, actions, kind: str, check=True):
        self.complex = complex_
        self.actions = actions
        self.kind = kind
        self.fast = isinstance(complex_, FreeComplexZn)
        if check:
            self.validate()

    @property
    def base(self) -> BaseRing:
        from .rings import Zmod

        return Zmod(self.complex.n) if self.fast else self.complex.base

    def validate(self):
        if self.fast:
            n = self.complex.n
            for k, act in enumerate(self.actions):
                eye = sparse.identity(act.shape[0], dtype=np.int64, format="csr")
                diff = (act @ act - eye).tocoo()
                if diff.nnz and np.any(diff.data % n):
                    raise NotInvolution(f"action at level {k} does not square to 1")
            for k in range(1, len(self.actions)):
                d = self.complex.boundaries[k - 1]
                diff = (d @ self.actions[k] - self.actions[k - 1] @ d).tocoo()
                if diff.nnz and np.any(diff.data % n):
                    raise ValueError(f"action does not commute with d at level {k}")
        else:
            for k, act in enumerate(self.actions):
                if not (act @ act).equals(ModuleMap.identity(act.source)):
                    raise NotInvolution(f"action at level {k} does not square to 1")
            for k in range(1, len(self.actions)):
                d = self.complex.boundaries[k - 1]
                if not (d @ self.actions[k]).equals(self.actions[k - 1] @ d):
                    raise ValueError(f"action does not commute with d at level {k}")

    # -- subcomplexes ---------------------------------------------------

    def subcomplex_homology(self, part: str, N: int) -> list[NormalForm]:
        if part in ("plus-eigen", "minus-eigen") and not self.base.two_invertible():
            raise TwoNotInvertible(f"{part} needs 2 invertible in {self.base}")
        sub = self.subcomplex(part)
        return sub.homology_list(N)

    def subcomplex(self, part: str):
        if part in ("fixed", "plus-eigen"):
            sign = 1
        elif part == "minus-eigen":
            sign = -1
        elif part == "coinvariant":
            return self._coinvariant_complex()
        else:
            raise ValueError(f"unknown part {part!r}")
        if self.fast:
            return self._eigen_fast(sign)[0]
        return self._eigen_exact(sign)

    def _eigen_fast(self, sign: int):
        n = self.complex.n
        incls = []
        projs = []
        dims = []
        for k, act in enumerate(self.actions):
            perm, s = signed_permutation_of(act, n)
            if perm is None:
                return self._eigen_fast_general(sign)
            E, P = _orbit_basis(perm, s, sign, n)
            incls.append(E)
            projs.append(P)
            dims.append(E.shape[1])
        bnds = []
        for k in range(1, len(dims)):
            d = self.complex.boundaries[k - 1]
            dk = projs[k - 1] @ d @ incls[k]
            dk.data %= n
            dk.eliminate_zeros()
            check = (incls[k - 1] @ dk - d @ incls[k]).tocoo()
            if check.nnz and np.any(check.data % n):
                raise AssertionError("restricted boundary left the eigenspace")
            bnds.append(dk)
        return FreeComplexZn(n, dims, bnds, check=False), incls, projs

    def _eigen_fast_general(self, sign: int):
        # rare path: action is not a signed permutation; go through the
        # exact machinery (sizes must be moderate)
        cc = self.complex.to_chain_complex()
        acts = [
            ModuleMap(cc.levels[k], cc.levels[k], exact_from_csr(a, cc.base), check=False)
            for k, a in enumerate(self.actions)
        ]
        eq = EquivariantComplex(cc, acts, self.kind, check=False)
        return eq._eigen_exact(sign), None, None

    def _eigen_exact(self, sign: int) -> ChainComplex:
        cc = self.complex
        levels = []
        incls = []
        for k, act in enumerate(self.actions):
            ident = ModuleMap.identity(cc.levels[k])
            one_minus = ident - act if sign == 1 else ident + act
            sub, incl = one_minus.kernel()
            levels.append(sub)
            incls.append(incl)
        bnds = []
        from .modules import _express_in_span

        for k in range(1, len(levels)):
            img = cc.boundaries[k - 1].matrix @ incls[k].matrix
            Y = _express_in_span(incls[k - 1].matrix, img, cc.levels[k - 1])
            bnds.append(ModuleMap(levels[k], levels[k - 1], Y, check=False))
        return ChainComplex(levels, bnds, check=False)

    def _coinvariant_complex(self) -> ChainComplex:
        cc = self.complex if not self.fast else self.complex.to_chain_complex()
        actions = self.actions
        if self.fast:
            actions = [
                ModuleMap(cc.levels[k], cc.levels[k], exact_from_csr(a, cc.base), check=False)
                for k, a in enumerate(self.actions)
            ]
        levels = []
        for k, act in enumerate(actions):
            ident = ModuleMap.identity(cc.levels[k])
            coker, _ = (ident - act).cokernel()
            levels.append(coker)
        bnds = [
            ModuleMap(levels[k], levels[k - 1], cc.boundaries[k - 1].matrix, check=False)
            for k in range(1, len(levels))
        ]
        return ChainComplex(levels, bnds, check=False)


def signed_permutation_of(act, n: int):
    """(perm, sign) arrays if the action matrix is a signed permutation."""
    coo = act.tocoo()
    size = act.shape[0]
    if coo.nnz != size:
        return None, None
    perm = np.full(size, -1, dtype=np.int64)
    sign = np.zeros(size, dtype=np.int64)
    data = coo.data % n
    for i, j, v in zip(coo.row, coo.col, data):
        if perm[j] != -1:
            return None, None
        if v != 1 and v != n - 1:
            return None, None
        perm[j] = i
        sign[j] = 1 if v == 1 else -1
    if np.any(perm < 0) or len(np.unique(perm)) != size:
        return None, None
    return perm, sign


def _orbit_basis(perm, sign, eigen_sign: int, n: int):
    """Inclusion/projection CSRs of the (+-1)-eigenspace of a signed permutation."""
    size = len(perm)
    rows_e, cols_e, vals_e = [], [], []
    rows_p, cols_p, vals_p = [], [], []
    g = 0
    for i in range(size):
        p = int(perm[i])
        if p < i:
            continue
        s = int(sign[i])
        if p == i:
            if (s == 1) != (eigen_sign == 1):
                continue
            rows_e.append(i)
            cols_e.append(g)
            vals_e.append(1)
        else:
            coef = s if eigen_sign == 1 else -s
            rows_e.extend((i, p))
            cols_e.extend((g, g))
            vals_e.extend((1, coef % n))
        rows_p.append(g)
        cols_p.append(i)
        vals_p.append(1)
        g += 1
    E = sparse.csr_matrix(
        (
            np.array(vals_e, dtype=np.int64),
            (np.array(rows_e, dtype=np.int64), np.array(cols_e, dtype=np.int64)),
        ),
        shape=(size, g),
    )
    P = sparse.csr_matrix(
        (
            np.array(vals_p, dtype=np.int64),
            (np.array(rows_p, dtype=np.int64), np.array(cols_p, dtype=np.int64)),
        ),
        shape=(g, size),
    )
    return E, P


def diagonal_c2_action(bar: BarComplex, bim: InvolutiveBimodule) -> EquivariantComplex:
    """tau acting by the involution on each slot, flipping the middle factors.

    bar must be a bar over A (x) A^op with coefficients in bim; the action
    is simplicial, hence commutes with the boundary on the nose.
    """
    a = bim.algebra
    if not a.effective_anti:
        raise IncompatibleBimodule("diagonal action needs an anti-involution")
    flip = flip_matrix(a)
    tau_l = a.involution
    tau_m = bim.involution
    if bar.normalized:
        T, Tinv = unit_adapted_change(bar.mid)
        keep = list(range(1, bar.mid.dim))
        flip = (Tinv @ flip @ T).submatrix(keep, keep)
    cc = bar.to_chain_complex()
    actions = []
    if bar._fast:
        mod = bar.base.n
        tau_l_f = csr_from_exact(tau_l)
        tau_m_f = csr_from_exact(tau_m)
        flip_f = csr_from_exact(flip)
        for n in range(bar.N + 1):
            act = tau_l_f
            for _ in range(n):
                act = sparse.kron(act, flip_f, format="csr")
            act = sparse.kron(act, tau_m_f, format="csr")
            act.data %= mod
            act.eliminate_zeros()
            actions.append(act)
    else:
        for n in range(bar.N + 1):
            act = tau_l
            for _ in range(n):
                act = act.kron(flip)
            act = act.kron(tau_m)
            actions.append(ModuleMap(cc.levels[n], cc.levels[n], act, check=False))
    return EquivariantComplex(cc, actions, kind="simplicial")
