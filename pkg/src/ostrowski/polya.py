"""Ostrowski ideals and the Pólya group of a quadratic field.

For K quadratic over Q the Pólya group Po(K) is generated by the classes of
the ramified primes, and the order identity ``#Po(K) * #H^1(G, U_K) = 2^s``
(s = number of ramified primes) ties it to the unit cohomology.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sympy import factorint

from .classgroup import (
    ClassGroup,
    QuadraticForm,
    elementary_divisors_from_orders,
    class_group,
    prime_form,
)
from .cohomology import tate_cohomology, unit_module
from .errors import BadPrimePower, NotPrime, Unsupported
from .quadfield import RAMIFIED, QuadraticField, fundamental_unit, splitting_type


@dataclass
class PolyaGroup:
    field: QuadraticField
    generators: list[QuadraticForm]
    order: int
    elementary_divisors: list[int]
    elements: set = field(default_factory=set, repr=False)


@dataclass
class BrzReport:
    d: int
    disc: int
    s: int
    h: int
    h1_units_order: int
    polya_order: int
    identity_holds: bool
    trace: dict

    def as_record(self) -> dict:
        return {
            "d": self.d,
            "disc": self.disc,
            "s": self.s,
            "h": self.h,
            "polya_order": self.polya_order,
            "h1_units": self.h1_units_order,
            "brz_holds": self.identity_holds,
        }


def _split_prime_power(q: int) -> tuple[int, int]:
    fac = factorint(q)
    if q < 2 or len(fac) != 1:
        raise NotPrime(f"{q} is not a prime power")
    (p, f), = fac.items()
    return p, f


def ostrowski_ideal_class(field: QuadraticField, q: int) -> QuadraticForm:
    """Class of the product of all primes of K of absolute norm q."""
    p, f = _split_prime_power(q)
    if f > 2:
        raise BadPrimePower(f"no prime of a quadratic field has norm {p}^{f}")
    G = class_group(field)
    kind = splitting_type(field, p)
    if f == 1 and kind == RAMIFIED:
        return G.canonical(prime_form(field.disc, p))
    # split p: the two primes multiply to (p); inert p: (p) itself; otherwise
    # there is no prime of norm q and the empty product is O_K
    return G.identity


def _polya_from(G: ClassGroup, field: QuadraticField) -> PolyaGroup:
    gens = [G.canonical(prime_form(field.disc, p)) for p in field.ramified_primes]
    elems = G.subgroup(gens)
    # elementary abelian: every nontrivial element has order 2
    e = G.identity
    orders = [1 if x == e else 2 for x in elems]
    return PolyaGroup(field, gens, len(elems), elementary_divisors_from_orders(len(elems), orders), elems)


def polya_group(field: QuadraticField) -> PolyaGroup:
    return _polya_from(class_group(field), field)


def h1_units(field: QuadraticField) -> int:
    return tate_cohomology(unit_module(fundamental_unit(field))).h1_order


def brz_verify(field: QuadraticField) -> BrzReport:
    G = class_group(field)
    po = _polya_from(G, field)
    h1 = h1_units(field)
    s = len(field.ramified_primes)
    trace = {
        "ramified_primes": list(field.ramified_primes),
        "cl_order": G.h,
        "narrow_order": G.narrow_order,
        "polya_order": po.order,
        "h1_units": h1,
        "two_power_s": 2**s,
    }
    return BrzReport(field.d, field.disc, s, G.h, h1, po.order, po.order * h1 == 2**s, trace)


def ostrowski_quotient(field: QuadraticField, base=None) -> PolyaGroup:
    """Ost(K/F); only F = Q is supported, where it equals Po(K)."""
    if base not in (None, 1, "Q", "QQ"):
        raise Unsupported("relative Ostrowski quotients over F != Q are not implemented")
    return polya_group(field)


__all__ = [
    "BrzReport",
    "PolyaGroup",
    "brz_verify",
    "h1_units",
    "ostrowski_ideal_class",
    "ostrowski_quotient",
    "polya_group",
]
