"""Built-in example algebras used by tests, checks and the CLI."""

from __future__ import annotations

from .algebra import ANTI, INVOLUTION, InvolutiveAlgebra, require_valid
from .matrix import ExactMatrix
from .rings import Zmod


def _alg(base, dim, mul, unit, inv_rows, flavor, commutative, labels, name):
    inv = ExactMatrix.from_rows(base, inv_rows)
    return require_valid(
        InvolutiveAlgebra(base, dim, mul, unit, inv, flavor, commutative, labels, name)
    )


def f2() -> InvolutiveAlgebra:
    return _alg(Zmod(2), 1, {(0, 0): {0: 1}}, [1], [[1]], INVOLUTION, True, ["1"], "F2")


def f3() -> InvolutiveAlgebra:
    return _alg(Zmod(3), 1, {(0, 0): {0: 1}}, [1], [[1]], INVOLUTION, True, ["1"], "F3")


def f9() -> InvolutiveAlgebra:
    """F9 = F3[x]/(x^2+1) with the Frobenius involution x -> -x."""
    mul = {
        (0, 0): {0: 1},
        (0, 1): {1: 1},
        (1, 0): {1: 1},
        (1, 1): {0: -1},
    }
    return _alg(Zmod(3), 2, mul, [1, 0], [[1, 0], [0, -1]], INVOLUTION, True, ["1", "x"], "F9")


def f3_dual() -> InvolutiveAlgebra:
    """F3[x]/x^2 with x -> -x."""
    mul = {
        (0, 0): {0: 1},
        (0, 1): {1: 1},
        (1, 0): {1: 1},
        (1, 1): {},
    }
    return _alg(Zmod(3), 2, mul, [1, 0], [[1, 0], [0, -1]], INVOLUTION, True, ["1", "x"], "F3[x]/x^2")


def f3c2() -> InvolutiveAlgebra:
    """Group algebra F3[C2]; group inversion is the identity on C2."""
    mul = {
        (0, 0): {0: 1},
        (0, 1): {1: 1},
        (1, 0): {1: 1},
        (1, 1): {0: 1},
    }
    return _alg(Zmod(3), 2, mul, [1, 0], [[1, 0], [0, 1]], INVOLUTION, True, ["1", "t"], "F3[C2]")


def m2f3() -> InvolutiveAlgebra:
    """2x2 matrices over F3 with the transpose anti-involution.

    Basis e11, e12, e21, e22 in row-major order.
    """
    idx = {(r, c): 2 * r + c for r in range(2) for c in range(2)}
    mul = {}
    for (r1, c1), i in idx.items():
        for (r2, c2), j in idx.items():
            if c1 == r2:
                mul[(i, j)] = {idx[(r1, c2)]: 1}
    inv_rows = [[0] * 4 for _ in range(4)]
    for (r, c), i in idx.items():
        inv_rows[idx[(c, r)]][i] = 1
    return _alg(
        Zmod(3), 4, mul, [1, 0, 0, 1], inv_rows, ANTI, False,
        ["e11", "e12", "e21", "e22"], "M2(F3)",
    )


def z15() -> InvolutiveAlgebra:
    return _alg(Zmod(15), 1, {(0, 0): {0: 1}}, [1], [[1]], INVOLUTION, True, ["1"], "Z/15")


def z15_swap() -> InvolutiveAlgebra:
    """Z/15 x Z/15 componentwise with the coordinate-swap involution."""
    mul = {(0, 0): {0: 1}, (1, 1): {1: 1}}
    return _alg(
        Zmod(15), 2, mul, [1, 1], [[0, 1], [1, 0]], INVOLUTION, True, ["a", "b"], "Z/15 x Z/15 swap"
    )


def z15_dual() -> InvolutiveAlgebra:
    """Z/15[x]/x^2 with x -> -x."""
    mul = {
        (0, 0): {0: 1},
        (0, 1): {1: 1},
        (1, 0): {1: 1},
        (1, 1): {},
    }
    return _alg(Zmod(15), 2, mul, [1, 0], [[1, 0], [0, -1]], INVOLUTION, True, ["1", "x"], "Z/15[x]/x^2")


BUILTINS = {
    "f2": f2,
    "f3": f3,
    "f9": f9,
    "f3x": f3_dual,
    "f3c2": f3c2,
    "m2f3": m2f3,
    "z15": z15,
    "z15-swap": z15_swap,
    "z15-dual": z15_dual,
}


def builtin(name: str) -> InvolutiveAlgebra:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}") from None


# algebras with 2 invertible, used by the comparison-theorem test sweeps
ODD_CHAR = ("f3", "f9", "f3x", "f3c2", "m2f3", "z15", "z15-swap", "z15-dual")
