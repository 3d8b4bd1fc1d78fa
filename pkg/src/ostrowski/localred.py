"""Local reduction data and the local norm indices that make up delta(E, Q, K).

``tate_algorithm`` follows the usual step structure (singular point to the
origin, then the multiplicative / additive branches, the I*_n subprocedure,
and the non-minimal restart). Local norm indices come from a shipped case
table; places the table does not cover raise ``UnsupportedLocalCase``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd

from sympy import factorint
from sympy.functions.combinatorial.numbers import legendre_symbol
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor

from .ellcurve import EllipticCurve, Iso
from .errors import UnsupportedLocalCase
from .quadfield import RAMIFIED, SPLIT, field_of_discriminant, splitting_type

INF = "inf"

GOOD = "good"
SPLIT_MULT = "split-mult"
NONSPLIT_MULT = "nonsplit-mult"
ADDITIVE = "additive"


@dataclass
class LocalInvariants:
    p: int | str
    kodaira: str
    tamagawa: int
    reduction: str
    splitting_in_K: str | None = None
    h1_local_order: int | None = None
    index_provenance: str | None = None
    conductor_exponent: int | None = None
    disc_valuation: int | None = None
    citation: str | None = None

    @property
    def n(self) -> int | None:
        """The subscript of I_n or I*_n."""
        k = self.kodaira
        if k.startswith("I") and k not in ("II", "III", "IV", "II*", "III*", "IV*"):
            return int(k[1:].rstrip("*"))
        return None


@dataclass
class DeltaBreakdown:
    delta_inf: int
    delta_f: int
    contributions: list = field(default_factory=list)  # (place, log2 index)
    places: list = field(default_factory=list)  # LocalInvariants per place of S0 and infinity

    @property
    def total(self) -> int:
        return self.delta_inf + self.delta_f


def val(n, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    n = Fraction(n)
    if n == 0:
        return 10**9
    v, a, b = 0, n.numerator, n.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


def _roots_mod(coeffs: list[int], p: int) -> list[tuple[int, int]]:
    """(root, multiplicity) of the F_p-roots of a polynomial (coefficients high to low)."""
    f = [c % p for c in coeffs]
    while f and f[0] == 0:
        f = f[1:]
    if len(f) <= 1:
        return []
    _, factors = gf_factor(f, p, ZZ)
    out = []
    for g, m in factors:
        if len(g) == 2:
            out.append(((-g[1] * pow(int(g[0]), -1, p)) % p, m))
    return sorted(out)


def _n_roots(coeffs: list[int], p: int) -> int:
    return len(_roots_mod(coeffs, p))


def _int(x: Fraction) -> int:
    if x.denominator != 1:
        raise ArithmeticError("model lost integrality")
    return x.numerator


def _singular_point(E: EllipticCurve, p: int) -> tuple[int, int]:
    a1, a2, a3, a4, a6 = (_int(a) for a in E.ainvs)
    if p <= 3:
        for x in range(p):
            for y in range(p):
                F = y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6
                Fx = a1 * y - 3 * x * x - 2 * a2 * x - a4
                Fy = 2 * y + a1 * x + a3
                if F % p == 0 and Fx % p == 0 and Fy % p == 0:
                    return x, y
        raise ArithmeticError("no singular point found")
    b2, c4, c6 = _int(E.b2), _int(E.c4), _int(E.c6)
    if c4 % p:
        x = (-(c6 + b2 * c4) * pow(12 * c4, -1, p)) % p
    else:
        x = (-b2 * pow(12, -1, p)) % p
    y = (-(a1 * x + a3) * pow(2, -1, p)) % p
    return x, y


_COMPONENTS = {"II": 1, "III": 2, "IV": 3, "IV*": 7, "III*": 8, "II*": 9}


def _result(kodaira, c, reduction, vdisc, p) -> LocalInvariants:
    if kodaira == "I0":
        m = 1
    elif kodaira in _COMPONENTS:
        m = _COMPONENTS[kodaira]
    elif kodaira.endswith("*"):
        m = int(kodaira[1:-1]) + 5
    else:
        m = int(kodaira[1:])
    f = vdisc + 1 - m  # Ogg's formula
    return LocalInvariants(p, kodaira, c, reduction, conductor_exponent=f, disc_valuation=vdisc)


def tate_algorithm(E: EllipticCurve, p: int) -> LocalInvariants:
    """Kodaira symbol, Tamagawa number and reduction type at p of a minimal model."""
    C, _ = E.integral_model
    while True:
        res = _tate_step(C, p)
        if isinstance(res, LocalInvariants):
            return res
        C = res  # a smaller (non-minimal reduced) model


def _tate_step(C: EllipticCurve, p: int):
    n = val(C.disc, p)
    if n == 0:
        return _result("I0", 1, GOOD, 0, p)
    x0, y0 = _singular_point(C, p)
    C = Iso(1, x0, 0, y0).apply(C)
    a1, a2, a3, a4, a6 = (_int(a) for a in C.ainvs)
    b2 = _int(C.b2)
    if b2 % p:
        # multiplicative: tangents at (0,0) are roots of T^2 + a1 T - a2
        if _n_roots([1, a1, -a2], p) == 2:
            return _result(f"I{n}", n, SPLIT_MULT, n, p)
        return _result(f"I{n}", 2 if n % 2 == 0 else 1, NONSPLIT_MULT, n, p)
    if val(a6, p) < 2:
        return _result("II", 1, ADDITIVE, n, p)
    if val(C.b8, p) < 3:
        return _result("III", 2, ADDITIVE, n, p)
    if val(C.b6, p) < 3:
        c = 3 if _n_roots([1, a3 // p, -(a6 // p**2)], p) == 2 else 1
        return _result("IV", c, ADDITIVE, n, p)
    # arrange p | a1, a2; p^2 | a3, a4; p^3 | a6
    if p == 2:
        s = a2 % 2
        t = 2 * ((a6 // 4) % 2)
    else:
        inv2 = pow(2, -1, p)
        s = (-a1 * inv2) % p
        t = p * ((-(a3 // p) * inv2) % p)
    C = Iso(1, 0, s, t).apply(C)
    a1, a2, a3, a4, a6 = (_int(a) for a in C.ainvs)
    cubic = [1, a2 // p, a4 // p**2, a6 // p**3]
    roots = _roots_mod(cubic, p)
    mults = sorted(m for _, m in roots)
    if _distinct_cubic(cubic, p):
        return _result("I0*", 1 + len(roots), ADDITIVE, n, p)
    if mults == [1, 2]:
        r = next(r for r, m in roots if m == 2)
        C = Iso(1, p * r, 0, 0).apply(C)
        return _i_star(C, p, n)
    # triple root
    r = roots[0][0]
    C = Iso(1, p * r, 0, 0).apply(C)
    a1, a2, a3, a4, a6 = (_int(a) for a in C.ainvs)
    xa3, xa6 = a3 // p**2, a6 // p**4
    if (xa3 * xa3 + 4 * xa6) % p:
        c = 3 if _n_roots([1, xa3, -xa6], p) == 2 else 1
        return _result("IV*", c, ADDITIVE, n, p)
    t = p**2 * (xa6 % 2 if p == 2 else (-xa3 * pow(2, -1, p)) % p)
    C = Iso(1, 0, 0, t).apply(C)
    a1, a2, a3, a4, a6 = (_int(a) for a in C.ainvs)
    if val(a4, p) < 4:
        return _result("III*", 2, ADDITIVE, n, p)
    if val(a6, p) < 6:
        return _result("II*", 1, ADDITIVE, n, p)
    # not minimal: scale down and restart
    return Iso(p, 0, 0, 0).apply(C)


def _distinct_cubic(cubic: list[int], p: int) -> bool:
    """True when the cubic has three distinct roots over an algebraic closure of F_p."""
    f = [c % p for c in cubic]
    _, factors = gf_factor(f, p, ZZ)
    return all(m == 1 for _, m in factors)


def _i_star(C: EllipticCurve, p: int, n: int) -> LocalInvariants:
    ix = iy = 3
    mx = my = p * p
    while True:
        a1, a2, a3, a4, a6 = (_int(a) for a in C.ainvs)
        xa2, xa3, xa4, xa6 = a2 // p, a3 // my, a4 // (p * mx), a6 // (mx * my)
        if (xa3 * xa3 + 4 * xa6) % p:
            c = 4 if _n_roots([1, xa3, -xa6], p) == 2 else 2
            break
        t = my * (xa6 % 2 if p == 2 else (-xa3 * pow(2, -1, p)) % p)
        C = Iso(1, 0, 0, t).apply(C)
        my *= p
        iy += 1
        a1, a2, a3, a4, a6 = (_int(a) for a in C.ainvs)
        xa2, xa3, xa4, xa6 = a2 // p, a3 // my, a4 // (p * mx), a6 // (mx * my)
        if (xa4 * xa4 - 4 * xa2 * xa6) % p:
            c = 4 if _n_roots([xa2, xa4, xa6], p) == 2 else 2
            break
        if p == 2:
            r = mx * ((xa6 * xa2) % 2)
        else:
            r = mx * ((-xa4 * pow(2 * xa2, -1, p)) % p)
        C = Iso(1, r, 0, 0).apply(C)
        mx *= p
        ix += 1
    return _result(f"I{ix + iy - 5}*", c, ADDITIVE, n, p)


def minimal_disc(E: EllipticCurve) -> int:
    """Minimal discriminant, from the valuations returned by Tate's algorithm."""
    C, _ = E.integral_model
    D = _int(C.disc)
    out = -1 if D < 0 else 1
    for p in factorint(abs(D)):
        out *= p ** tate_algorithm(E, p).disc_valuation
    return out


@lru_cache(maxsize=1024)
def bad_primes(E: EllipticCurve) -> tuple[int, ...]:
    C, _ = E.integral_model
    return tuple(
        p for p in sorted(factorint(abs(_int(C.disc)))) if tate_algorithm(E, p).kodaira != "I0"
    )


def conductor(E: EllipticCurve) -> int:
    N = 1
    for p in bad_primes(E):
        N *= p ** tate_algorithm(E, p).conductor_exponent
    return N


def bad_sets(E: EllipticCurve, D: int) -> tuple[list[int], list[int]]:
    """S = ramified-in-K or bad primes; S0 = those that are ramified or inert in K."""
    K = field_of_discriminant(D)
    S = sorted(set(K.ramified_primes) | set(bad_primes(E)))
    S0 = [p for p in S if splitting_type(K, p) != SPLIT]
    return S, S0


def delta_infty(E: EllipticCurve, D: int) -> int:
    return 1 if D < 0 and E.disc > 0 else 0


# --- local norm index table -----------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    reduction: str
    kodaira: str
    n_parity: str
    tamagawa: str
    splitting: str
    p_parity: str
    index: str
    citation: str

    def matches(self, loc: LocalInvariants, splitting: str, p: int) -> bool:
        if self.reduction != "any" and self.reduction != loc.reduction:
            return False
        if self.splitting != "any" and self.splitting != splitting:
            return False
        if self.p_parity != "any" and self.p_parity != ("even" if p == 2 else "odd"):
            return False
        if self.tamagawa != "any" and int(self.tamagawa) != loc.tamagawa:
            return False
        if self.kodaira != "any" and self.kodaira != _kodaira_family(loc.kodaira):
            return False
        if self.n_parity != "any":
            n = loc.n
            if n is None or ("even" if n % 2 == 0 else "odd") != self.n_parity:
                return False
        return True


def _kodaira_family(k: str) -> str:
    if k == "I0":
        return "I0"
    if k in ("II", "III", "IV", "II*", "III*", "IV*"):
        return k
    return "I*n" if k.endswith("*") else "In"


@lru_cache(maxsize=None)
def load_table() -> tuple[TableRow, ...]:
    text = resources.files("ostrowski").joinpath("data/local_norm_index.csv").read_text()
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return tuple(TableRow(**row) for row in csv.DictReader(lines))


def hilbert_symbol(a: Fraction, b: Fraction, p: int) -> int:
    """Hilbert symbol (a, b)_p for nonzero rationals."""
    a, b = _square_class(a), _square_class(b)
    va, vb = val(a, p), val(b, p)
    ua, ub = a // p**va, b // p**vb
    if p != 2:
        sign = (-1) ** ((va * vb * (p - 1) // 2) % 2)
        la = int(legendre_symbol(ua % p, p)) if vb % 2 else 1
        lb = int(legendre_symbol(ub % p, p)) if va % 2 else 1
        return sign * la * lb
    eps = lambda u: ((u - 1) // 2) % 2
    omega = lambda u: ((u * u - 1) // 8) % 2
    e = eps(ua) * eps(ub) + va * omega(ub) + vb * omega(ua)
    return -1 if e % 2 else 1


def _square_class(q) -> int:
    """An integer in the same square class as the nonzero rational q."""
    q = Fraction(q)
    return q.numerator * q.denominator


def _two_torsion_count(E: EllipticCurve, p: int) -> int:
    """#E(Q_p)[2] at an odd prime of good reduction, via the reduced 2-division cubic."""
    C, _ = E.integral_model
    # the integral model may be non-minimal at p; the cubic 4x^3 + b2 x^2 + 2 b4 x + b6
    # is then rescaled until its discriminant is a p-unit
    while val(C.disc, p) >= 12 and all(val(a, p) >= i for a, i in zip(C.ainvs, (1, 2, 3, 4, 6))):
        C = Iso(p, 0, 0, 0).apply(C)
    if val(C.disc, p) != 0:
        raise UnsupportedLocalCase(f"could not find a model with good reduction at {p}", [p])
    cubic = [4, _int(C.b2), 2 * _int(C.b4), _int(C.b6)]
    return 1 + _n_roots(cubic, p)


def local_norm_index(E: EllipticCurve, p: int, D: int, overrides: dict | None = None) -> LocalInvariants:
    """Local invariants at p with (E(Q_p) : N E(K_w)) filled in as h1_local_order."""
    K = field_of_discriminant(D)
    loc = tate_algorithm(E, p)
    loc.splitting_in_K = splitting_type(K, p)
    if overrides and p in overrides:
        idx, prov = overrides[p]
        loc.h1_local_order, loc.index_provenance, loc.citation = idx, prov, "override"
        return loc
    for row in load_table():
        if row.matches(loc, loc.splitting_in_K, p):
            loc.h1_local_order = _apply_rule(row.index, E, p, D, loc)
            loc.index_provenance = "table"
            loc.citation = row.citation
            return loc
    raise UnsupportedLocalCase(
        f"no table row for p={p}: {loc.reduction} {loc.kodaira} c={loc.tamagawa}, "
        f"{loc.splitting_in_K} in Q(sqrt {K.d})",
        [p],
    )


def _apply_rule(rule: str, E, p, D, loc) -> int:
    if rule.isdigit():
        return int(rule)
    if rule == "gcd2n":
        return gcd(2, loc.n)
    if rule == "residual_2_torsion":
        return _two_torsion_count(E, p)
    if rule == "tate_parameter_norm":
        return 2 if hilbert_symbol(1 / E.j, Fraction(D), p) == 1 else 1
    raise ValueError(f"unknown table rule {rule!r}")


def delta(E: EllipticCurve, D: int, overrides: dict | None = None) -> DeltaBreakdown:
    _, S0 = bad_sets(E, D)
    d_inf = delta_infty(E, D)
    inf = LocalInvariants(INF, "-", 1, "-", RAMIFIED if D < 0 else SPLIT, 2**d_inf, "table")
    places, contributions, missing = [inf], [(INF, d_inf)], []
    for p in S0:
        try:
            loc = local_norm_index(E, p, D, overrides)
        except UnsupportedLocalCase:
            missing.append(p)
            continue
        places.append(loc)
        contributions.append((p, loc.h1_local_order.bit_length() - 1))
    if missing:
        raise UnsupportedLocalCase(f"local norm index unavailable at {missing}", missing)
    d_f = sum(c for pl, c in contributions if pl != INF)
    return DeltaBreakdown(d_inf, d_f, contributions, places)
