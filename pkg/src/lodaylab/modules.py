"""Finitely generated modules over Z, Z/n, Q given by presentations.

An FgModule is Z^g (resp. (Z/n)^g, Q^g) modulo the column span of its
relation matrix.  The canonical normal form (free rank + invariant factor
chain) is the library's isomorphism test; maps between presented modules
are matrices on generators, with well-definedness checked at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import (
    CompositionNonzero,
    InfiniteLevel,
    NotInvolution,
    TwoNotInvertible,
)
from .matrix import ExactMatrix
from .rings import BaseRing, QQ, ZZ, prime_power_factors
from . import snf as _snf


@dataclass(frozen=True)
class NormalForm:
    """free rank plus invariant factor chain d1 | d2 | ... (each >= 2)."""

    ring: str
    free_rank: int
    torsion: tuple[int, ...]

    def __str__(self):
        parts = []
        if self.free_rank:
            base = {"Z": "Z", "Q": "Q"}.get(self.ring, self.ring)
            parts.append(base if self.free_rank == 1 else f"{base}^{self.free_rank}")
        for d in self.torsion:
            parts.append(f"Z/{d}")
        return " + ".join(parts) if parts else "0"

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def order(self):
        """Number of elements, or None if infinite."""
        if self.free_rank or self.ring == "Q":
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n


def chain_from_factors(factors) -> tuple[int, ...]:
    """Canonical divisibility chain of a multiset of cyclic orders."""
    primary: dict[int, list[int]] = {}
    for d in factors:
        for p, e in prime_power_factors(d):
            primary.setdefault(p, []).append(e)
    for lst in primary.values():
        lst.sort(reverse=True)
    width = max((len(v) for v in primary.values()), default=0)
    chain = []
    for i in range(width):
        d = 1
        for p, es in primary.items():
            if i < len(es):
                d *= p ** es[i]
        chain.append(d)
    chain.reverse()  # ascending, d1 | d2 | ...
    return tuple(chain)


class FgModule:
    def __init__(self, base: BaseRing, ngens: int, relations: ExactMatrix | None = None):
        self.base = base
        self.ngens = ngens
        if relations is None:
            relations = ExactMatrix(base, ngens, 0)
        if relations.ring != base or relations.rows != ngens:
            raise ValueError("relation matrix does not match the module")
        self.relations = relations

    @classmethod
    def free(cls, base: BaseRing, ngens: int) -> "FgModule":
        return cls(base, ngens)

    @classmethod
    def zero(cls, base: BaseRing) -> "FgModule":
        return cls(base, 0)

    # -- presentation plumbing --------------------------------------

    @cached_property
    def lifted_relations(self) -> ExactMatrix:
        """Relations as a Z-lattice (Z/n adds the n*I columns)."""
        if self.base.kind == "Zn":
            nI = ExactMatrix.identity(ZZ, self.ngens).scale(self.base.n)
            return self.relations.lift_to_Z().hstack(nI)
        return self.relations

    @cached_property
    def _rel_snf(self):
        if self.base.kind == "Q":
            return None
        return _snf.smith_normal_form_Z(self.lifted_relations)

    def contains_in_relations(self, vec) -> bool:
        """Is the generator-coordinate vector zero in the module?"""
        if self.base.kind == "Q":
            return _snf._solve_q(self.relations, vec) is not None
        res = self._rel_snf
        A = self.lifted_relations
        return _snf._solve_with_snf(res, A.rows, A.cols, [int(v) for v in vec]) is not None

    def matrix_in_relations(self, mat: ExactMatrix) -> bool:
        return all(
            self.contains_in_relations(mat.column_vector(j)) for j in range(mat.cols)
        )

    # -- normal form -------------------------------------------------

    @cached_property
    def normal_form(self) -> NormalForm:
        label = str(self.base)
        if self.base.kind == "Q":
            r = _snf.rank(self.relations)
            return NormalForm(label, self.ngens - r, ())
        diag = (
            self._rel_snf.diag
            if self._rel_snf is not None
            else _snf.smith_normal_form_Z(self.lifted_relations, False, False).diag
        )
        free = self.ngens - len(diag)
        torsion = tuple(d for d in diag if d != 1)
        return NormalForm(label, free, torsion)

    def is_isomorphic_to(self, other: "FgModule") -> bool:
        return self.base == other.base and self.normal_form == other.normal_form

    # -- element enumeration (finite modules only) -------------------

    @cached_property
    def _decomposition(self):
        """(orders, rep_matrix, proj) with module = prod Z/orders[i].

        rep_matrix columns are generator-coordinate representatives of the
        cyclic summand generators; proj maps a generator-coordinate vector
        to its tuple of cyclic coordinates.
        """
        res = self._rel_snf
        if res is None:
            raise InfiniteLevel("no canonical decomposition over Q")
        diag = list(res.diag) + [0] * (self.ngens - len(res.diag))
        U = res.U
        Uinv = _snf.solve_matrix(U, ExactMatrix.identity(ZZ, self.ngens))
        orders = diag
        return orders, Uinv, U

    def element_count(self):
        nf = self.normal_form
        return nf.order()

    def elements(self, cap=200_000):
        """All elements as generator-coordinate tuples (finite modules)."""
        count = self.element_count()
        if count is None:
            raise InfiniteLevel(f"module {self.normal_form} is infinite")
        if count > cap:
            raise InfiniteLevel(f"module has {count} elements, cap {cap}")
        orders, Uinv, _ = self._decomposition
        idx = [i for i, d in enumerate(orders) if d not in (1,)]
        reps = [Uinv.column_vector(i) for i in idx]
        ords = [orders[i] for i in idx]
        out = []
        total = 1
        for d in ords:
            total *= d
        norm = self.base.normalize
        for code in range(total):
            vec = [0] * self.ngens
            c = code
            for rep, d in zip(reps, ords):
                t = c % d
                c //= d
                if t:
                    for k in range(self.ngens):
                        vec[k] += t * rep[k]
            out.append(tuple(norm(v) for v in vec))
        return out

    def reduce_vector(self, vec):
        """Canonical coordinates of an element (for equality/hashing)."""
        orders, _, U = self._decomposition
        y = U.apply([int(v) for v in vec])
        return tuple(
            (y[i] % d) if d else y[i] for i, d in enumerate(orders)
        )

    # -- misc ---------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FgModule)
            and self.base == other.base
            and self.ngens == other.ngens
            and self.relations == other.relations
        )

    def __hash__(self):
        return hash((self.base, self.ngens, self.relations))

    def __repr__(self):
        return f"FgModule({self.base}, gens={self.ngens}, nf={self.normal_form})"


def tensor_modules(a: FgModule, b: FgModule) -> FgModule:
    """a (x) b with generator (i, j) at index i * b.ngens + j."""
    if a.base != b.base:
        raise ValueError("tensor over different bases")
    Ia = ExactMatrix.identity(a.base, a.ngens)
    Ib = ExactMatrix.identity(b.base, b.ngens)
    rel = a.relations.kron(Ib).hstack(Ia.kron(b.relations))
    return FgModule(a.base, a.ngens * b.ngens, rel)


def direct_sum_modules(mods) -> tuple[FgModule, list[int]]:
    mods = list(mods)
    base = mods[0].base
    offs = []
    g = 0
    for m in mods:
        offs.append(g)
        g += m.ngens
    data = {}
    c = 0
    for off, m in zip(offs, mods):
        for (i, j), v in m.relations.data.items():
            data[(off + i, c + j)] = v
        c += m.relations.cols
    return FgModule(base, g, ExactMatrix(base, g, c, data)), offs


class ModuleMap:
    def __init__(self, source: FgModule, target: FgModule, matrix: ExactMatrix, check=True):
        if source.base != target.base:
            raise ValueError("map between different bases")
        if matrix.shape != (target.ngens, source.ngens):
            raise ValueError(
                f"matrix shape {matrix.shape} does not map {source.ngens} gens "
                f"to {target.ngens} gens"
            )
        self.source = source
        self.target = target
        self.matrix = matrix
        if check and source.relations.cols:
            img = matrix @ source.relations
            if not target.matrix_in_relations(img):
                raise ValueError("map does not respect relations (ill defined)")

    @classmethod
    def identity(cls, mod: FgModule) -> "ModuleMap":
        return cls(mod, mod, ExactMatrix.identity(mod.base, mod.ngens), check=False)

    @classmethod
    def zero(cls, source: FgModule, target: FgModule) -> "ModuleMap":
        return cls(source, target, ExactMatrix(source.base, target.ngens, source.ngens), check=False)

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        if other.target.ngens != self.source.ngens:
            raise ValueError("composition shape mismatch")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __add__(self, other):
        return ModuleMap(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other):
        return ModuleMap(self.source, self.target, self.matrix - other.matrix, check=False)

    def scale(self, c):
        return ModuleMap(self.source, self.target, self.matrix.scale(c), check=False)

    def equals(self, other: "ModuleMap") -> bool:
        """Equality as maps of presented modules (difference lands in relations)."""
        if self.matrix.shape != other.matrix.shape:
            return False
        return self.target.matrix_in_relations(self.matrix - other.matrix)

    def is_zero_map(self) -> bool:
        return self.target.matrix_in_relations(self.matrix)

    def apply(self, vec):
        return self.matrix.apply(vec)

    def kernel(self) -> tuple[FgModule, "ModuleMap"]:
        """(K, inclusion K -> source) with K = ker as a presented module."""
        base = self.source.base
        if base.kind == "Q":
            A = self.matrix.hstack(self.target.relations) if self.target.relations.cols else self.matrix
            K = _snf.kernel(A)
            X = K.submatrix(list(range(self.source.ngens)), list(range(K.cols)))
            W = _relations_of_span(X, self.source)
            mod = FgModule(base, X.cols, W)
            return mod, ModuleMap(mod, self.source, X, check=False)
        A = _lift(self.matrix).hstack(self.target.lifted_relations)
        K = _snf.kernel(A)
        X = K.submatrix(list(range(self.source.ngens)), list(range(K.cols)))
        W = _relations_of_span(X, self.source)
        mod = FgModule(base, X.cols, _back(W, base))
        return mod, ModuleMap(mod, self.source, _back(X, base), check=False)

    def cokernel(self) -> tuple[FgModule, "ModuleMap"]:
        """(C, projection target -> C)."""
        rel = self.target.relations.hstack(self.matrix)
        mod = FgModule(self.target.base, self.target.ngens, rel)
        proj = ModuleMap(
            self.target, mod, ExactMatrix.identity(self.target.base, self.target.ngens), check=False
        )
        return mod, proj

    def __repr__(self):
        return f"ModuleMap({self.source.ngens} gens -> {self.target.ngens} gens over {self.source.base})"


def _lift(mat: ExactMatrix) -> ExactMatrix:
    return mat.lift_to_Z() if mat.ring.kind == "Zn" else mat


def _back(mat: ExactMatrix, base: BaseRing) -> ExactMatrix:
    return mat.change_ring(base) if base.kind == "Zn" else mat


def _relations_of_span(X: ExactMatrix, ambient: FgModule) -> ExactMatrix:
    """Relations of the submodule spanned by the columns of X inside ambient."""
    if ambient.base.kind == "Q":
        A = X.hstack(ambient.relations) if ambient.relations.cols else X
        K = _snf.kernel(A)
        return K.submatrix(list(range(X.cols)), list(range(K.cols)))
    A = _lift(X).hstack(ambient.lifted_relations)
    K = _snf.kernel(A)
    return K.submatrix(list(range(X.cols)), list(range(K.cols)))


# ----------------------------------------------------------------------
# homology of a two-step piece


class HomologyData:
    """ker(d_out)/im(d_in) together with cycle representatives.

    module: the subquotient in presented form
    cycles: matrix whose columns are middle-coordinate lifts of generators
    """

    def __init__(self, module: FgModule, cycles: ExactMatrix, _express):
        self.module = module
        self.cycles = cycles
        self._express = _express

    def express(self, vec):
        """Coordinates of a middle-coordinate cycle in the homology generators."""
        return self._express(vec)


def homology_at(d_in: ModuleMap, d_out: ModuleMap) -> FgModule:
    return homology_data(d_in, d_out).module


def homology_data(d_in: ModuleMap, d_out: ModuleMap) -> HomologyData:
    if d_in.target is not d_out.source and d_in.target != d_out.source:
        raise ValueError("homology_at needs target(d_in) = source(d_out)")
    comp = d_out @ d_in
    if not comp.is_zero_map():
        raise CompositionNonzero("d_out . d_in is not zero")
    mid = d_out.source
    base = mid.base
    K, incl = d_out.kernel()
    X = incl.matrix
    # relations of H: w with X w in  im(d_in) + relations(mid)
    if base.kind == "Q":
        stack = X.hstack(d_in.matrix)
        if mid.relations.cols:
            stack = stack.hstack(mid.relations)
        Kw = _snf.kernel(stack)
    else:
        stack = _lift(X).hstack(_lift(d_in.matrix)).hstack(mid.lifted_relations)
        Kw = _snf.kernel(stack)
    W = Kw.submatrix(list(range(X.cols)), list(range(Kw.cols)))
    H = FgModule(base, X.cols, _back(W, base) if base.kind != "Q" else W)

    if base.kind == "Q":
        def express(vec, _stack=stack, _k=X.cols):
            sol = _snf._solve_q(_stack, vec)
            return None if sol is None else sol[:_k]
    else:
        res = _snf.smith_normal_form_Z(stack)

        def express(vec, _res=res, _stack=stack, _k=X.cols, _base=base):
            sol = _snf._solve_with_snf(_res, _stack.rows, _stack.cols, [int(v) for v in vec])
            if sol is None:
                return None
            return [_base.normalize(v) for v in sol[:_k]]

    return HomologyData(H, incl.matrix, express)


# ----------------------------------------------------------------------
# fixed points and coinvariants of an involution


@dataclass
class FixedCoinvResult:
    fixed: FgModule
    inclusion: ModuleMap
    coinvariants: FgModule
    projection: ModuleMap
    # x -> [x] and [x] -> x + tau(x); defined in every characteristic
    naive_fixed_to_coinv: ModuleMap
    naive_coinv_to_fixed: ModuleMap
    # the two_invertible() extras (None otherwise)
    idempotent: ModuleMap | None = None
    comparison_fixed_to_coinv: ModuleMap | None = None
    comparison_coinv_to_fixed: ModuleMap | None = None


def fixed_and_coinvariants(mod: FgModule, action: ModuleMap) -> FixedCoinvResult:
    if action.source != mod or action.target != mod:
        raise ValueError("action must be an endomorphism of the module")
    ident = ModuleMap.identity(mod)
    if not (action @ action).equals(ident):
        raise NotInvolution("action squared is not the identity")
    one_minus = ident - action
    fixed, incl = one_minus.kernel()
    coinv, proj = one_minus.cokernel()
    one_plus = ident + action

    # [x] -> x + tau x, landing in the fixed part
    Y = _express_in_span(incl.matrix, one_plus.matrix, mod)
    naive_c2f = ModuleMap(coinv, fixed, Y, check=False)
    naive_f2c = proj @ incl

    result = FixedCoinvResult(fixed, incl, coinv, proj, naive_f2c, naive_c2f)
    if mod.base.two_invertible():
        half = mod.base.half()
        result.idempotent = one_plus.scale(half)
        result.comparison_fixed_to_coinv = naive_f2c.scale(half)
        result.comparison_coinv_to_fixed = naive_c2f
    return result


def _express_in_span(X: ExactMatrix, B: ExactMatrix, ambient: FgModule) -> ExactMatrix:
    """Y with X @ Y = B modulo ambient relations (must exist)."""
    base = ambient.base
    if base.kind == "Q":
        stack = X.hstack(ambient.relations) if ambient.relations.cols else X
        sol = _snf.solve_matrix(stack, B)
    else:
        stack = _lift(X).hstack(ambient.lifted_relations)
        sol = _snf.solve_matrix(stack, _lift(B))
    if sol is None:
        raise ValueError("vector not in span; inconsistent presentation data")
    Y = sol.submatrix(list(range(X.cols)), list(range(B.cols)))
    return _back(Y, base) if base.kind != "Q" else Y
