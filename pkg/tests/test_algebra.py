"""InvolutiveAlgebra validation and the derived algebra constructions."""

import pytest

from lodaylab.algebra import (
    ANTI,
    INVOLUTION,
    InvolutiveAlgebra,
    enveloping,
    involutive_enveloping,
    module_action_on_self,
    opposite,
    tensor,
    validate,
)
from lodaylab.catalog import BUILTINS, builtin, f9, m2f3
from lodaylab.matrix import ExactMatrix
from lodaylab.modules import FgModule, ModuleMap, fixed_and_coinvariants
from lodaylab.rings import Zmod


class TestValidate:
    def test_f9_valid(self):
        a = f9()
        assert validate(a).ok
        assert a.commutative and a.flavor == INVOLUTION

    def test_m2f3_valid(self):
        a = m2f3()
        assert validate(a).ok
        assert not a.commutative and a.flavor == ANTI

    def test_m2f3_identity_declared_anti_invalid(self):
        # identity is not an anti-automorphism of a noncommutative algebra;
        # witness pair: e12 . e21 = e11 but e21 . e12 = e22
        a = m2f3()
        bad = InvolutiveAlgebra(
            a.base, a.dim, a.mul, a.unit, ExactMatrix.identity(a.base, 4), ANTI, False
        )
        rep = validate(bad)
        assert not rep.ok
        kinds = {v.axiom for v in rep.violations}
        assert any("flavor" in k for k in kinds)
        witnesses = [v.witness for v in rep.violations if "flavor" in v.axiom]
        assert (1, 2) in witnesses or (2, 1) in witnesses

    def test_all_builtins_validate(self):
        for name in BUILTINS:
            assert validate(builtin(name)).ok, name


class TestDerived:
    def test_opposite_of_commutative_equal(self):
        a = f9()
        assert opposite(a).mul == a.mul

    def test_tensor_dim(self):
        a, b = f9(), m2f3()
        with pytest.raises(Exception):
            tensor(a, b)  # flavor mismatch
        t = tensor(a, a)
        assert t.dim == 4
        assert validate(t).ok

    def test_enveloping_f9_flip_fixed_rank(self):
        # eigenspace oracle on the 4-dim algebra F9 (x) F9^op:
        # tau(1x1)=1x1, tau(1xx)=-(xx1), tau(xx1)=-(1xx), tau(xxx)=xxx,
        # so the fixed space is spanned by 1x1, xxx, 1xx - xx1: rank 3
        env = enveloping(f9())
        assert validate(env).ok
        mod = FgModule.free(env.base, env.dim)
        act = ModuleMap(mod, mod, env.involution)
        res = fixed_and_coinvariants(mod, act)
        assert res.fixed.normal_form.torsion == (3, 3, 3)

    def test_enveloping_is_multiplicative_involution(self):
        for name in ("f9", "m2f3", "f3x", "z15-swap"):
            env = enveloping(builtin(name))
            assert validate(env).ok, name

    def test_involutive_enveloping_trivial_is_group_algebra(self):
        # A = k with trivial involution: A^ie = k[C2]
        a = builtin("f3")
        ie = involutive_enveloping(a)
        assert ie.dim == 2
        assert validate(ie).ok
        # tau^1 * tau^1 = tau^0
        assert ie.mul_basis(1, 1) == {0: 1}

    def test_involutive_enveloping_dims(self):
        assert involutive_enveloping(f9()).dim == 8
        assert involutive_enveloping(m2f3()).dim == 32

    def test_involutive_enveloping_m2f3_associative(self):
        # the validate oracle runs the exhaustive basis-triple check
        assert validate(involutive_enveloping(m2f3())).ok

    def test_tau0_subalgebra_matches_enveloping(self):
        a = f9()
        ie = involutive_enveloping(a)
        env = tensor(a, opposite(a))
        for (i, j), row in env.mul.items():
            assert ie.mul_basis(i, j) == row
        for (i, j), row in ie.mul.items():
            if i < env.dim and j < env.dim:
                assert {k: v for k, v in row.items()} == env.mul_basis(i, j)

    def test_module_action_on_self(self):
        for name in ("f9", "m2f3", "f3x"):
            bim = module_action_on_self(builtin(name))
            assert bim.validate().ok, name
