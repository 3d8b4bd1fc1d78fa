"""Exact arithmetic in quadratic fields Q(sqrt d)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from sympy import factorint, isprime
from sympy.functions.combinatorial.numbers import jacobi_symbol, legendre_symbol

from .errors import DegenerateD, NonSquarefree, NotPrime, ResourceExceeded

MAX_CF_STEPS = 10**6

SPLIT = "split"
INERT = "inert"
RAMIFIED = "ramified"


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorint(abs(n)).values())


def squarefree_part(n: int) -> tuple[int, int]:
    """Write ``n = m**2 * d`` with ``d`` squarefree; return ``(d, m)``."""
    if n == 0:
        raise DegenerateD("0 has no squarefree part")
    d, m = (-1 if n < 0 else 1), 1
    for p, e in factorint(abs(n)).items():
        m *= p ** (e // 2)
        if e % 2:
            d *= p
    return d, m


def prime_factors(n: int) -> list[int]:
    return sorted(factorint(abs(n)))


@dataclass(frozen=True)
class QuadraticField:
    d: int
    disc: int = field(init=False)
    is_real: bool = field(init=False)
    ramified_primes: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.d in (0, 1):
            raise DegenerateD(f"d={self.d} does not define a quadratic field")
        if not is_squarefree(self.d):
            raise NonSquarefree(f"d={self.d} is not squarefree")
        disc = self.d if self.d % 4 == 1 else 4 * self.d
        object.__setattr__(self, "disc", disc)
        object.__setattr__(self, "is_real", self.d > 0)
        object.__setattr__(self, "ramified_primes", tuple(prime_factors(disc)))

    def __repr__(self):
        return f"QuadraticField({self.d})"

    def elem(self, a, b=0) -> "FieldElem":
        return FieldElem(self, Fraction(a), Fraction(b))

    @property
    def sqrt_d(self) -> "FieldElem":
        return self.elem(0, 1)


@lru_cache(maxsize=None)
def make_field(d: int) -> QuadraticField:
    return QuadraticField(d)


def field_of_discriminant(D: int) -> QuadraticField:
    """Field Q(sqrt D) for any non-square integer D (e.g. D = -84)."""
    d, _ = squarefree_part(D)
    return make_field(d)


@dataclass(frozen=True)
class FieldElem:
    """The element ``a + b*sqrt(d)`` with rational ``a, b``."""

    field: QuadraticField
    a: Fraction
    b: Fraction

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.field.d != self.field.d:
                raise ValueError("elements of different fields")
            return other
        return FieldElem(self.field, Fraction(other), Fraction(0))

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElem(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.field, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        d = self.field.d
        return FieldElem(self.field, self.a * o.a + d * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return FieldElem(self.field, c.a / n, c.b / n)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.elem(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.field.d == other.field.d and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.field.d, self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def conj(self) -> "FieldElem":
        return FieldElem(self.field, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.field.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        # Z[(1+sqrt d)/2] when d = 1 mod 4: both 2a, 2b integral and 2a = 2b mod 2.
        a2, b2 = 2 * self.a, 2 * self.b
        if a2.denominator != 1 or b2.denominator != 1:
            return False
        if self.field.d % 4 == 1:
            return (a2.numerator - b2.numerator) % 2 == 0
        return self.a.denominator == 1 and self.b.denominator == 1

    def sign(self) -> int:
        """Sign under the real embedding sqrt d > 0 (real fields only)."""
        if not self.field.is_real:
            raise ValueError("sign is only defined for real quadratic fields")
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with d b^2
        big_a = a * a > self.field.d * b * b
        return (1 if a > 0 else -1) if big_a else (1 if b > 0 else -1)

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.field.d}))"


def splitting_type(field: QuadraticField, p: int) -> str:
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    disc = field.disc
    if disc % p == 0:
        return RAMIFIED
    if p == 2:
        return SPLIT if disc % 8 == 1 else INERT
    return SPLIT if int(legendre_symbol(disc % p, p)) == 1 else INERT


@dataclass(frozen=True)
class UnitGroupData:
    field: QuadraticField
    torsion_order: int
    fundamental_unit: FieldElem | None = None
    fu_norm: int | None = None


def _floor_quadratic(P: int, Q: int, d: int) -> int:
    """floor((P + sqrt d) / Q) for non-square d > 0."""
    r = isqrt(d)
    if Q > 0:
        return (P + r) // Q
    return -((P + r) // (-Q)) - 1


@lru_cache(maxsize=None)
def fundamental_unit(field: QuadraticField, max_steps: int = MAX_CF_STEPS) -> UnitGroupData:
    d = field.d
    if d < 0:
        torsion = {-1: 4, -3: 6}.get(d, 2)
        return UnitGroupData(field, torsion)
    # Continued fraction of omega, written (P + sqrt d)/Q.
    if d % 4 == 1:
        P, Q = 1, 2
        omega_bar = field.elem(Fraction(1, 2), Fraction(-1, 2))
        c = (1 - d) // 4  # omega * omega_bar
        t = 1  # omega + omega_bar
    else:
        P, Q = 0, 1
        omega_bar = field.elem(0, -1)
        c, t = -d, 0
    hm2, hm1 = 0, 1
    km2, km1 = 1, 0
    for _ in range(max_steps):
        a = _floor_quadratic(P, Q, d)
        hn, kn = a * hm1 + hm2, a * km1 + km2
        hm2, hm1, km2, km1 = hm1, hn, km1, kn
        # N(h - k*omega) for the convergent h/k of omega
        norm = hn * hn - t * hn * kn + c * kn * kn
        if norm in (1, -1):
            unit = hn - kn * omega_bar
            return UnitGroupData(field, 2, unit, int(norm))
        P = a * Q - P
        Q = (d - P * P) // Q
    raise ResourceExceeded(f"continued fraction for d={d} exceeded {max_steps} steps")


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 1."""
    if n < 1:
        raise ValueError("n must be positive")
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        result *= 1 if D % 8 in (1, 7) else -1
    if n == 1:
        return result
    return result * int(jacobi_symbol(D % n, n))
