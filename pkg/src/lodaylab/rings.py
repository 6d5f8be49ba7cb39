"""Base rings: Z, Z/n, Q.

Scalars are plain python ints (Z and Z/n, the latter normalized into
[0, n)) or fractions.Fraction (Q).  Nothing in the library ever touches a
float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


@dataclass(frozen=True)
class BaseRing:
    kind: str  # "Z" | "Zn" | "Q"
    n: int = 0  # modulus, only for kind == "Zn"

    def __post_init__(self):
        if self.kind not in ("Z", "Zn", "Q"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Zn" and self.n < 2:
            raise ValueError("IntegersMod needs n >= 2")
        if self.kind != "Zn" and self.n != 0:
            raise ValueError("modulus only makes sense for Zn")

    # -- predicates ------------------------------------------------

    @property
    def is_field(self) -> bool:
        if self.kind == "Q":
            return True
        return self.kind == "Zn" and _is_prime(self.n)

    def two_invertible(self) -> bool:
        if self.kind == "Q":
            return True
        if self.kind == "Zn":
            return self.n % 2 == 1
        return False

    @property
    def char(self) -> int:
        return self.n if self.kind == "Zn" else 0

    # -- scalar arithmetic ----------------------------------------

    def normalize(self, x):
        if self.kind == "Zn":
            return int(x) % self.n
        if self.kind == "Q":
            return x if isinstance(x, Fraction) else Fraction(x)
        return int(x)

    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def add(self, a, b):
        return self.normalize(a + b)

    def sub(self, a, b):
        return self.normalize(a - b)

    def mul(self, a, b):
        return self.normalize(a * b)

    def neg(self, a):
        return self.normalize(-a)

    def is_unit(self, a) -> bool:
        a = self.normalize(a)
        if self.kind == "Q":
            return a != 0
        if self.kind == "Zn":
            return gcd(a, self.n) == 1
        return a in (1, -1)

    def inv(self, a):
        a = self.normalize(a)
        if self.kind == "Q":
            if a == 0:
                raise ZeroDivisionError("0 has no inverse")
            return 1 / a
        if self.kind == "Zn":
            return pow(a, -1, self.n)
        if a in (1, -1):
            return a
        raise ZeroDivisionError(f"{a} is not a unit in Z")

    def half(self):
        """The scalar 1/2; only when two_invertible()."""
        from .errors import TwoNotInvertible

        if not self.two_invertible():
            raise TwoNotInvertible(f"2 is not invertible in {self}")
        return self.inv(self.normalize(2))

    def __str__(self):
        if self.kind == "Z":
            return "Z"
        if self.kind == "Q":
            return "Q"
        return f"Z/{self.n}"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_power_factors(n: int) -> list[tuple[int, int]]:
    """n = prod p^e as a list of (p, e), ascending p."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


ZZ = BaseRing("Z")
QQ = BaseRing("Q")


def Zmod(n: int) -> BaseRing:
    return BaseRing("Zn", n)
