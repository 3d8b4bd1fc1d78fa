"""Class groups of quadratic fields via binary quadratic forms.

Imaginary fields: classes are the reduced positive definite forms.
Real fields: forms give the narrow class group (cycles of reduced forms); the
ordinary class group is the quotient by the class of the form ``(-1, b, c)``,
which is trivial exactly when a unit of norm -1 exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd, isqrt

from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod

from .errors import DiscMismatch, ImprimitiveForm, NotPrime, ResourceExceeded
from .quadfield import INERT, RAMIFIED, SPLIT, QuadraticField, splitting_type

MAX_ABS_DISC = 10**6


@dataclass(frozen=True, order=True)
class QuadraticForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def conj(self) -> "QuadraticForm":
        """Form of the conjugate ideal; also the inverse class."""
        return QuadraticForm(self.a, -self.b, self.c)

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __repr__(self):
        return f"({self.a},{self.b},{self.c})"


@dataclass(frozen=True)
class Split:
    forms: tuple[QuadraticForm, QuadraticForm]


@dataclass(frozen=True)
class Inert:
    p: int


def _check(f: QuadraticForm, disc: int | None = None):
    if disc is not None and f.disc != disc:
        raise DiscMismatch(f"{f} has discriminant {f.disc}, expected {disc}")
    if not f.is_primitive():
        raise ImprimitiveForm(f"{f} is not primitive")


# --- comparisons against sqrt(D) for non-square D > 0 -------------------------

def _lt_sqrt(x: int, D: int) -> bool:
    return x < 0 or x * x < D


def _gt_sqrt(x: int, D: int) -> bool:
    return x > 0 and x * x > D


def is_reduced(f: QuadraticForm) -> bool:
    a, b, c = f
    D = f.disc
    if D < 0:
        if a <= 0:
            return False
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True
    # |sqrt D - 2|a|| < b < sqrt D
    if not (b > 0 and _lt_sqrt(b, D)):
        return False
    two_a = 2 * abs(a)
    return _lt_sqrt(two_a - b, D) and _gt_sqrt(two_a + b, D)


def _reduce_definite(f: QuadraticForm) -> QuadraticForm:
    a, b, c = f
    while True:
        # normalize: -a < b <= a
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            b, c = b + 2 * k * a, a * k * k + b * k + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadraticForm(a, b, c)


def _r_indef(b: int, c: int, D: int) -> int:
    """The integer r = b mod 2|c| in the range used by the rho operator."""
    m = 2 * abs(c)
    if _gt_sqrt(abs(c), D):
        # -|c| < r <= |c|
        r = b % m
        if r > abs(c):
            r -= m
        return r
    # sqrt D - 2|c| < r < sqrt D
    s = isqrt(D)
    r = b % m
    # largest r' = b mod m with r' <= s (r' < sqrt D since D is not a square)
    r += ((s - r) // m) * m
    return r


def rho(f: QuadraticForm) -> QuadraticForm:
    a, b, c = f
    D = f.disc
    r = _r_indef(-b, c, D)
    return QuadraticForm(c, r, (r * r - D) // (4 * c))


def _reduce_indefinite(f: QuadraticForm) -> QuadraticForm:
    steps = 0
    while not is_reduced(f):
        f = rho(f)
        steps += 1
        if steps > 10**5:
            raise ResourceExceeded("indefinite reduction did not terminate")
    return f


def reduce(f: QuadraticForm) -> QuadraticForm:
    """Reduced representative: the reduced form for D < 0; the canonical
    (lexicographically least, a > 0) member of the reduction cycle for D > 0."""
    _check(f)
    if f.disc < 0:
        if f.a < 0:
            raise ValueError("negative definite forms are not handled")
        return _reduce_definite(f)
    return _cycle_data(f.disc)[1][_reduce_indefinite(f)]


def cycle(f: QuadraticForm) -> list[QuadraticForm]:
    """The rho-cycle of reduced forms containing the reduction of ``f``."""
    g = _reduce_indefinite(f)
    out = [g]
    h = rho(g)
    while h != g:
        out.append(h)
        h = rho(h)
    return out


def reduced_forms(D: int) -> list[QuadraticForm]:
    """All primitive reduced forms of discriminant D, by direct enumeration."""
    out = []
    if D < 0:
        amax = isqrt(-D // 3)
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (b - D) % 2:
                    continue
                num = b * b - D
                if num % (4 * a):
                    continue
                c = num // (4 * a)
                if c < a or (c == a and b < 0):
                    continue
                f = QuadraticForm(a, b, c)
                if f.is_primitive():
                    out.append(f)
        return out
    s = isqrt(D)
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        ac = (b * b - D) // 4  # negative
        n = -ac
        for a in _divisors(n):
            for sa in (a, -a):
                f = QuadraticForm(sa, b, ac // sa)
                if is_reduced(f) and f.is_primitive():
                    out.append(f)
    return out


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorint(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


@lru_cache(maxsize=4096)
def _cycle_data(D: int):
    """(canonical reps, map reduced form -> canonical rep) for D > 0."""
    seen = {}
    reps = []
    for f in reduced_forms(D):
        if f in seen:
            continue
        cyc = cycle(f)
        rep = min(g for g in cyc if g.a > 0)
        for g in cyc:
            seen[g] = rep
        reps.append(rep)
    return sorted(reps), seen


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def compose_raw(f: QuadraticForm, g: QuadraticForm) -> QuadraticForm:
    """Dirichlet composition of two primitive forms of equal discriminant (unreduced)."""
    D = f.disc
    if g.disc != D:
        raise DiscMismatch(f"cannot compose {f} (disc {D}) with {g} (disc {g.disc})")
    a1, b1, _ = f
    a2, b2, _ = g
    h = (b1 + b2) // 2
    e1, u1, v1 = _xgcd(a1, a2)
    e, u2, w = _xgcd(e1, h)
    u, v = u2 * u1, u2 * v1
    A = a1 * a2 // (e * e)
    B = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + D) // 2) // e
    B %= 2 * abs(A)
    C = (B * B - D) // (4 * A)
    return QuadraticForm(A, B, C)


def compose(f: QuadraticForm, g: QuadraticForm) -> QuadraticForm:
    _check(f)
    _check(g, f.disc)
    return reduce(compose_raw(f, g))


def principal_form(D: int) -> QuadraticForm:
    b = D % 2
    return QuadraticForm(1, b, (b * b - D) // 4)


def identity_form(D: int) -> QuadraticForm:
    return reduce(principal_form(D))


def negative_principal_form(D: int) -> QuadraticForm:
    b = D % 2
    return QuadraticForm(-1, b, (D - b * b) // 4)


def inverse(f: QuadraticForm) -> QuadraticForm:
    return reduce(f.conj())


@dataclass
class ClassGroup:
    """Ideal class group Cl(K); elements are canonical form representatives."""

    disc: int
    elements: list[QuadraticForm]
    narrow_order: int
    minus_one_class: QuadraticForm | None = None  # nontrivial narrow class of (-1,b,c)
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {x: i for i, x in enumerate(self.elements)}

    @property
    def h(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> QuadraticForm:
        return self.canonical(principal_form(self.disc))

    def canonical(self, f: QuadraticForm) -> QuadraticForm:
        g = reduce(f)
        if self.minus_one_class is None:
            return g
        g2 = reduce(compose_raw(g, self.minus_one_class))
        return min(g, g2)

    def mul(self, f: QuadraticForm, g: QuadraticForm) -> QuadraticForm:
        return self.canonical(compose_raw(f, g))

    def inv(self, f: QuadraticForm) -> QuadraticForm:
        return self.canonical(f.conj())

    def power(self, f: QuadraticForm, n: int) -> QuadraticForm:
        result, base = self.identity, self.canonical(f)
        if n < 0:
            base, n = self.inv(base), -n
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def order_of(self, f: QuadraticForm) -> int:
        e = self.identity
        x, n = self.canonical(f), 1
        while x != e:
            x = self.mul(x, f)
            n += 1
        return n

    def index_of(self, f: QuadraticForm) -> int:
        return self._index[self.canonical(f)]

    def subgroup(self, gens) -> set[QuadraticForm]:
        """Elements of the subgroup generated by ``gens`` (breadth-first closure)."""
        e = self.identity
        group = {e}
        frontier = [e]
        gens = [self.canonical(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in group:
                        group.add(y)
                        nxt.append(y)
            frontier = nxt
        return group

    @cached_property
    def elementary_divisors(self) -> list[int]:
        return elementary_divisors_from_orders(self.h, [self.order_of(x) for x in self.elements])


def elementary_divisors_from_orders(h: int, orders: list[int]) -> list[int]:
    """Invariant factors of a finite abelian group from the orders of all its elements."""
    if h == 1:
        return []
    # for each p: #{x : p^k x = 0} = p^{sum_i min(k, e_i)}
    per_prime = {}
    for p, e in factorint(h).items():
        counts = []
        for k in range(e + 1):
            counts.append(sum(1 for o in orders if (p**k) % o == 0))
        logs = [_ilog(c, p) for c in counts]
        # number of cyclic factors of exponent >= k is logs[k] - logs[k-1]
        ge = [logs[k] - logs[k - 1] for k in range(1, e + 1)]
        exps = []
        for k in range(len(ge)):
            n_exact = ge[k] - (ge[k + 1] if k + 1 < len(ge) else 0)
            exps += [k + 1] * n_exact
        per_prime[p] = sorted(exps, reverse=True)
    width = max(len(v) for v in per_prime.values())
    invariants = []
    for i in range(width):
        d = 1
        for p, exps in per_prime.items():
            if i < len(exps):
                d *= p ** exps[i]
        invariants.append(d)
    return sorted(invariants)


def _ilog(n: int, p: int) -> int:
    k = 0
    while n > 1:
        if n % p:
            raise ValueError("count is not a prime power")
        n //= p
        k += 1
    return k


@lru_cache(maxsize=4096)
def _class_group_for_disc(D: int) -> ClassGroup:
    if abs(D) > MAX_ABS_DISC:
        raise ResourceExceeded(f"|disc|={abs(D)} exceeds the scan cap {MAX_ABS_DISC}")
    if D < 0:
        forms = reduced_forms(D)
        return ClassGroup(D, forms, len(forms))
    narrow, _ = _cycle_data(D)
    J = reduce(negative_principal_form(D))
    if J == reduce(principal_form(D)):
        return ClassGroup(D, list(narrow), len(narrow))
    reps = sorted({min(f, reduce(compose_raw(f, J))) for f in narrow})
    return ClassGroup(D, reps, len(narrow), minus_one_class=J)


def class_group(field: QuadraticField) -> ClassGroup:
    return _class_group_for_disc(field.disc)


def narrow_is_ordinary(field: QuadraticField) -> bool:
    """True when the narrow and ordinary class groups coincide (by forms only)."""
    return class_group(field).minus_one_class is None


def prime_form(D: int, p: int) -> QuadraticForm:
    """The form (p, b, c) attached to a prime ideal above a split or ramified p."""
    if p == 2:
        b = D % 2
        if (b * b - D) % 8:
            b += 2
    else:
        root = sqrt_mod(D % p, p)
        if root is None:
            raise ValueError(f"{p} is inert for discriminant {D}")
        b = root if (root - D) % 2 == 0 else root + p
    c = (b * b - D) // (4 * p)
    return QuadraticForm(p, b, c)


def prime_class(field: QuadraticField, p: int):
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    kind = splitting_type(field, p)
    if kind == INERT:
        return Inert(p)
    G = class_group(field)
    f = prime_form(field.disc, p)
    if kind == RAMIFIED:
        return G.canonical(f)
    assert kind == SPLIT
    return Split((G.canonical(f), G.canonical(f.conj())))
