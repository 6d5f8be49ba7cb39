"""lodaylab: exact homology of rings with anti-involution.

Hochschild, reflexive and involutive Hochschild homology of
finite-dimensional algebras, C2-Mackey/Green/Tambara functor
presentations, and equivariant Loday constructions over the sign circle,
all in exact arbitrary-precision arithmetic.
"""

from .rings import BaseRing, ZZ, QQ, Zmod
from .matrix import ExactMatrix
from .modules import FgModule, ModuleMap, NormalForm, homology_at, fixed_and_coinvariants
from .snf import smith_normal_form

__all__ = [
    "BaseRing",
    "ZZ",
    "QQ",
    "Zmod",
    "ExactMatrix",
    "FgModule",
    "ModuleMap",
    "NormalForm",
    "homology_at",
    "fixed_and_coinvariants",
    "smith_normal_form",
]

__version__ = "0.1.0"
