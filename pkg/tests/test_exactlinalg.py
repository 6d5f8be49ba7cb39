"""Smith normal form, module normal forms, homology_at, fixed/coinvariants."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from lodaylab.matrix import ExactMatrix, det_bareiss
from lodaylab.modules import (
    FgModule,
    ModuleMap,
    NormalForm,
    fixed_and_coinvariants,
    homology_at,
    tensor_modules,
)
from lodaylab.rings import QQ, ZZ, Zmod
from lodaylab.snf import kernel, smith_normal_form, solve
from lodaylab.errors import CompositionNonzero, NotInvolution


def M(ring, rows):
    return ExactMatrix.from_rows(ring, rows)


def check_snf_contract(mat):
    res = smith_normal_form(mat)
    prod = res.U @ mat @ res.V
    assert prod == res.D
    # unimodular transforms
    if mat.ring.kind == "Z":
        assert det_bareiss(res.U) in (1, -1)
        assert det_bareiss(res.V) in (1, -1)
        for d in res.diag:
            assert d > 0
    else:
        n = mat.ring.n
        assert mat.ring.is_unit(det_bareiss(res.U))
        assert mat.ring.is_unit(det_bareiss(res.V))
    # divisibility chain
    for a, b in zip(res.diag, res.diag[1:]):
        if a != 0:
            assert b % a == 0
    return res


class TestSNF:
    def test_identity_3x3(self):
        res = check_snf_contract(ExactMatrix.identity(ZZ, 3))
        assert res.diag == [1, 1, 1]

    def test_diag_2_3(self):
        # 2x2 oracle by hand: d1 = gcd of entries = 1, d1*d2 = |det| = 6
        res = check_snf_contract(M(ZZ, [[2, 0], [0, 3]]))
        assert res.diag == [1, 6]

    def test_zero_matrix(self):
        res = check_snf_contract(ExactMatrix(ZZ, 3, 4))
        assert res.diag == []
        assert res.D.is_zero()

    def test_textbook(self):
        # minor-gcd oracle: d1 = gcd(entries) = 1, d1*d2 = gcd(2x2 minors) = 3,
        # det = 0 so rank 2
        res = check_snf_contract(M(ZZ, [[1, 2, 3], [4, 5, 6], [7, 8, 9]]))
        assert res.diag == [1, 3]

    def test_over_zn_unit_canonicalization(self):
        # 3 is a unit mod 4, so its SNF over Z/4 must be the 1x1 identity
        res = check_snf_contract(M(Zmod(4), [[3]]))
        assert res.diag == [1]

    def test_over_zn(self):
        res = check_snf_contract(M(Zmod(6), [[2, 0], [0, 4]]))
        assert all(6 % d == 0 or d == 0 for d in res.diag)

    def test_random_small(self):
        rng = random.Random(7)
        for _ in range(40):
            rows = rng.randrange(1, 5)
            cols = rng.randrange(1, 5)
            mat = M(ZZ, [[rng.randrange(-9, 10) for _ in range(cols)] for _ in range(rows)])
            check_snf_contract(mat)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.lists(st.integers(min_value=-9, max_value=9), min_size=1, max_size=4),
            min_size=1,
            max_size=4,
        ).filter(lambda rs: len({len(r) for r in rs}) == 1)
    )
    def test_snf_property(self, rows):
        check_snf_contract(M(ZZ, rows))

    def test_kernel_and_solve(self):
        A = M(ZZ, [[1, 2, 3], [2, 4, 6]])
        K = kernel(A)
        assert K.cols == 2
        assert (A @ K).is_zero()
        x = solve(A, [3, 6])
        assert x is not None
        assert A.apply(x) == [3, 6]
        assert solve(A, [1, 1]) is None


class TestNormalForms:
    def test_free(self):
        assert FgModule.free(ZZ, 2).normal_form == NormalForm("Z", 2, ())

    def test_z_mod_2(self):
        mod = FgModule(ZZ, 1, M(ZZ, [[2]]))
        assert mod.normal_form == NormalForm("Z", 0, (2,))

    def test_zn_free(self):
        mod = FgModule.free(Zmod(15), 2)
        assert mod.normal_form == NormalForm("Z/15", 0, (15, 15))

    def test_canonical_equality_contract(self):
        # isomorphic presentations get equal normal forms
        a = FgModule(ZZ, 2, M(ZZ, [[2, 0], [0, 3]]))
        b = FgModule(ZZ, 1, M(ZZ, [[6]]))
        assert a.is_isomorphic_to(b)

    def test_str(self):
        assert str(NormalForm("Z", 1, (2,))) == "Z + Z/2"
        assert str(NormalForm("Z/3", 0, (3, 3))) == "Z/3 + Z/3"
        assert str(NormalForm("Q", 0, ())) == "0"

    def test_elements_of_z4(self):
        mod = FgModule(ZZ, 2, M(ZZ, [[2, 0], [0, 2]]))
        els = mod.elements()
        assert len(els) == 4
        assert len({mod.reduce_vector(list(e)) for e in els}) == 4


class TestHomologyAt:
    def test_zero_maps_free_rank2(self):
        mid = FgModule.free(ZZ, 2)
        z = FgModule.zero(ZZ)
        d_in = ModuleMap.zero(z, mid)
        d_out = ModuleMap.zero(mid, z)
        assert homology_at(d_in, d_out).normal_form == NormalForm("Z", 2, ())

    def test_times_two(self):
        # Z --x2--> Z --0--> 0 has middle homology Z/2
        Zmod1 = FgModule.free(ZZ, 1)
        z = FgModule.zero(ZZ)
        d_in = ModuleMap(Zmod1, Zmod1, M(ZZ, [[2]]))
        d_out = ModuleMap.zero(Zmod1, z)
        assert homology_at(d_in, d_out).normal_form == NormalForm("Z", 0, (2,))

    def test_rank_oracle_over_q(self):
        # Q --(1;-1)--> Q^2 --(1 1)--> Q: ker dim 1 = im dim 1, H = 0
        a = FgModule.free(QQ, 1)
        b = FgModule.free(QQ, 2)
        c = FgModule.free(QQ, 1)
        d_in = ModuleMap(a, b, M(QQ, [[1], [-1]]))
        d_out = ModuleMap(b, c, M(QQ, [[1, 1]]))
        assert homology_at(d_in, d_out).normal_form.is_trivial

    def test_composition_nonzero(self):
        a = FgModule.free(ZZ, 1)
        with pytest.raises(CompositionNonzero):
            homology_at(ModuleMap.identity(a), ModuleMap.identity(a))

    def test_isomorphism_invariance(self):
        # conjugating by invertible change of basis keeps normal forms
        rng = random.Random(5)
        for _ in range(10):
            d_in_m = M(ZZ, [[rng.randrange(-4, 5) for _ in range(2)] for _ in range(3)])
            # build d_out with d_out @ d_in = 0: use kernel transpose trick
            d_out_m = M(ZZ, [[0, 0, 0]])
            mid = FgModule.free(ZZ, 3)
            src = FgModule.free(ZZ, 2)
            tgt = FgModule.free(ZZ, 1)
            h1 = homology_at(ModuleMap(src, mid, d_in_m), ModuleMap(mid, tgt, d_out_m))
            # random unimodular conjugation on the middle
            P = _random_unimodular(rng, 3)
            Pm = ModuleMap(mid, mid, P)
            h2 = homology_at(
                ModuleMap(src, mid, P @ d_in_m),
                ModuleMap(mid, tgt, d_out_m @ _inverse_unimodular(P)),
            )
            assert h1.normal_form == h2.normal_form


def _random_unimodular(rng, n):
    mat = ExactMatrix.identity(ZZ, n)
    rows = mat.to_rows()
    for _ in range(6):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.randrange(-2, 3)
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return M(ZZ, rows)


def _inverse_unimodular(P):
    from lodaylab.snf import solve_matrix

    return solve_matrix(P, ExactMatrix.identity(ZZ, P.rows))


class TestFixedCoinvariants:
    def test_trivial_action_on_z3(self):
        mod = FgModule(ZZ, 1, M(ZZ, [[3]]))
        act = ModuleMap.identity(mod)
        res = fixed_and_coinvariants(mod, act)
        z3 = NormalForm("Z", 0, (3,))
        assert res.fixed.normal_form == z3
        assert res.coinvariants.normal_form == z3
        # comparisons defined (2 invertible is false over Z!) -> only naive maps
        assert res.idempotent is None

    def test_trivial_action_on_z3_mod3(self):
        mod = FgModule.free(Zmod(3), 1)
        res = fixed_and_coinvariants(mod, ModuleMap.identity(mod))
        assert res.comparison_fixed_to_coinv is not None
        f2c, c2f = res.comparison_fixed_to_coinv, res.comparison_coinv_to_fixed
        assert (c2f @ f2c).equals(ModuleMap.identity(res.fixed))
        assert (f2c @ c2f).equals(ModuleMap.identity(res.coinvariants))

    def test_swap_on_f3_squared(self):
        # eigenspace oracle on the 2x2 swap: fixed rank 1, coinv rank 1
        mod = FgModule.free(Zmod(3), 2)
        swap = ModuleMap(mod, mod, M(Zmod(3), [[0, 1], [1, 0]]))
        res = fixed_and_coinvariants(mod, swap)
        assert res.fixed.normal_form == NormalForm("Z/3", 0, (3,))
        assert res.coinvariants.normal_form == NormalForm("Z/3", 0, (3,))
        f2c, c2f = res.comparison_fixed_to_coinv, res.comparison_coinv_to_fixed
        assert (c2f @ f2c).equals(ModuleMap.identity(res.fixed))
        assert (f2c @ c2f).equals(ModuleMap.identity(res.coinvariants))

    def test_swap_on_f2_squared(self):
        # enumerate all 4 elements of F2^2 under swap:
        #   fixed = {00, 11} -> rank 1; coinv = F2^2/(e0+e1) -> rank 1;
        #   naive comparison maps compose to 1 + tau = 0 on coinv: NOT inverse
        mod = FgModule.free(Zmod(2), 2)
        swap = ModuleMap(mod, mod, M(Zmod(2), [[0, 1], [1, 0]]))
        res = fixed_and_coinvariants(mod, swap)
        assert res.fixed.normal_form == NormalForm("Z/2", 0, (2,))
        assert res.coinvariants.normal_form == NormalForm("Z/2", 0, (2,))
        assert res.comparison_fixed_to_coinv is None
        comp = res.naive_fixed_to_coinv @ res.naive_coinv_to_fixed
        assert not comp.equals(ModuleMap.identity(res.coinvariants))

    def test_not_involution(self):
        mod = FgModule.free(ZZ, 1)
        with pytest.raises(NotInvolution):
            fixed_and_coinvariants(mod, ModuleMap(mod, mod, M(ZZ, [[2]])))


class TestTensor:
    def test_z2_tensor_z3(self):
        a = FgModule(ZZ, 1, M(ZZ, [[2]]))
        b = FgModule(ZZ, 1, M(ZZ, [[3]]))
        assert tensor_modules(a, b).normal_form.is_trivial

    def test_z4_tensor_z6(self):
        a = FgModule(ZZ, 1, M(ZZ, [[4]]))
        b = FgModule(ZZ, 1, M(ZZ, [[6]]))
        assert tensor_modules(a, b).normal_form == NormalForm("Z", 0, (2,))

    def test_no_floats_anywhere(self):
        a = FgModule(ZZ, 2, M(ZZ, [[2, 1], [0, 3]]))
        for v in a.normal_form.torsion:
            assert isinstance(v, int)
        res = smith_normal_form(a.relations)
        for mat in (res.U, res.D, res.V):
            assert all(isinstance(v, int) for v in mat.data.values())
