"""Weierstrass curves over Q, points over Q or Q(sqrt d), twists and the norm map.

All arithmetic is exact (``Fraction`` and ``FieldElem``). A point carries the
squarefree ``d`` of its coordinate field, or ``None`` for rational points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import isqrt, lcm

from sympy import divisors, factorint

from . import fingroup
from .errors import CurveMismatch, MissingGenerators, ShortFormUnavailable
from .quadfield import FieldElem, field_of_discriminant, make_field, squarefree_part


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class EllipticCurve:
    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, _q(getattr(self, name)))
        if self.disc == 0:
            raise ValueError(f"singular Weierstrass equation {self.ainvs}")

    @classmethod
    def from_ainvs(cls, ainvs) -> "EllipticCurve":
        ainvs = list(ainvs)
        if len(ainvs) == 2:
            ainvs = [0, 0, 0] + ainvs
        if len(ainvs) != 5:
            raise ValueError("expected 2 or 5 a-invariants")
        return cls(*ainvs)

    @property
    def ainvs(self) -> tuple[Fraction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self):
        return self.a1**2 + 4 * self.a2

    @property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self):
        return self.a3**2 + 4 * self.a6

    @property
    def b8(self):
        a1, a2, a3, a4, a6 = self.ainvs
        return a1**2 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3**2 - a4**2

    @property
    def c4(self):
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self):
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def disc(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -(b2**2) * b8 - 8 * b4**3 - 27 * b6**2 + 9 * b2 * b4 * b6

    @property
    def j(self):
        return self.c4**3 / self.disc

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.ainvs)

    def is_short(self) -> bool:
        return self.a1 == 0 and self.a2 == 0 and self.a3 == 0

    def on_curve(self, x, y) -> bool:
        a1, a2, a3, a4, a6 = self.ainvs
        return y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6) == 0

    @cached_property
    def integral_model(self) -> tuple["EllipticCurve", "Iso"]:
        """An integral model and the scaling isomorphism to it."""
        k = 1
        for i, a in zip((1, 2, 3, 4, 6), self.ainvs):
            den = a.denominator
            # smallest m with m^i * a integral
            m = 1
            for p, e in factorint(den).items():
                m *= p ** (-(-e // i))
            k = lcm(k, m)
        iso = Iso(Fraction(1, k), 0, 0, 0)
        return iso.apply(self), iso

    @cached_property
    def short_model(self) -> tuple["EllipticCurve", "Iso"]:
        """Model y^2 = x^3 + a x + b and the isomorphism to it."""
        if self.is_short():
            return self, Iso(1, 0, 0, 0)
        r = -self.b2 / 12
        s = -self.a1 / 2
        t = -(self.a3 + r * self.a1) / 2
        iso = Iso(1, r, s, t)
        E = iso.apply(self)
        if not E.is_short():
            raise ShortFormUnavailable(f"short form conversion failed for {self.ainvs}")
        return E, iso

    def __repr__(self):
        return "EllipticCurve([" + ",".join(str(a) for a in self.ainvs) + "])"


@dataclass(frozen=True)
class Iso:
    """Change of variables x = u^2 x' + r, y = u^3 y' + s u^2 x' + t."""

    u: Fraction
    r: Fraction
    s: Fraction
    t: Fraction

    def __post_init__(self):
        for name in ("u", "r", "s", "t"):
            object.__setattr__(self, name, _q(getattr(self, name)))
        if self.u == 0:
            raise ValueError("u must be nonzero")

    def apply(self, E: EllipticCurve) -> EllipticCurve:
        u, r, s, t = self.u, self.r, self.s, self.t
        a1, a2, a3, a4, a6 = E.ainvs
        return EllipticCurve(
            (a1 + 2 * s) / u,
            (a2 - s * a1 + 3 * r - s * s) / u**2,
            (a3 + r * a1 + 2 * t) / u**3,
            (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4,
            (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6,
        )

    def map_coords(self, x, y):
        u, r, s, t = self.u, self.r, self.s, self.t
        x2 = (x - r) / u**2
        return x2, (y - s * (x - r) - t) / u**3

    def unmap_coords(self, x, y):
        u, r, s, t = self.u, self.r, self.s, self.t
        return u**2 * x + r, u**3 * y + s * u**2 * x + t

    def then(self, other: "Iso") -> "Iso":
        """Composite: apply self, then other."""
        u1, r1, s1, t1 = self.u, self.r, self.s, self.t
        u2, r2, s2, t2 = other.u, other.r, other.s, other.t
        return Iso(u1 * u2, r1 + u1**2 * r2, s1 + u1 * s2, t1 + u1**2 * r2 * s1 + u1**3 * t2)

    def inverse(self) -> "Iso":
        u, r, s, t = self.u, self.r, self.s, self.t
        return Iso(1 / u, -r / u**2, -s / u, (r * s - t) / u**3)


def is_isomorphic(E1: EllipticCurve, E2: EllipticCurve) -> bool:
    """Isomorphism over Q: c4, c6 agree up to u^4, u^6 for some rational u."""
    if E1.j != E2.j:
        return False
    c4a, c6a, c4b, c6b = E1.c4, E1.c6, E2.c4, E2.c6
    if c4a == 0:
        # j = 0: need c6b/c6a a sixth power
        return _is_power(c6b / c6a, 6)
    if c6a == 0:
        return _is_power(c4b / c4a, 4)
    # u^2 = (c6b/c6a) / (c4b/c4a)
    u2 = (c6b / c6a) / (c4b / c4a)
    return _is_power(u2, 2) and c4b == u2 * u2 * c4a


def _is_power(q: Fraction, n: int) -> bool:
    if q == 0:
        return False
    if q < 0:
        return n % 2 == 1 and _is_power(-q, n)
    return _iroot_exact(q.numerator, n) is not None and _iroot_exact(q.denominator, n) is not None


def _iroot_exact(m: int, n: int) -> int | None:
    r = _inth_root(m, n)
    return r if r**n == m else None


def _inth_root(m: int, n: int) -> int:
    lo, hi = 0, 1 << (m.bit_length() // n + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**n <= m:
            lo = mid
        else:
            hi = mid - 1
    return lo


# --- points -----------------------------------------------------------------


@dataclass(frozen=True)
class KPoint:
    """A point of E over Q (d=None) or over Q(sqrt d); x = y = None is O."""

    curve: EllipticCurve
    x: object = None
    y: object = None
    d: int | None = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("both coordinates must be given")
        if self.x is not None:
            object.__setattr__(self, "x", _coerce(self.x, self.d))
            object.__setattr__(self, "y", _coerce(self.y, self.d))
            if not self.curve.on_curve(self.x, self.y):
                raise ValueError(f"({self.x}, {self.y}) is not on {self.curve}")

    @property
    def is_zero(self) -> bool:
        return self.x is None

    def origin(self) -> "KPoint":
        return KPoint(self.curve, d=self.d)

    def __repr__(self):
        if self.is_zero:
            return "O"
        return f"({self.x}, {self.y})"


def _coerce(v, d):
    if d is None:
        if isinstance(v, FieldElem):
            if v.b != 0:
                raise ValueError("irrational coordinate on a rational point")
            return v.a
        return _q(v)
    K = make_field(d)
    if isinstance(v, FieldElem):
        if v.field.d != d:
            raise ValueError("coordinate from a different field")
        return v
    return K.elem(_q(v))


def origin(E: EllipticCurve, d: int | None = None) -> KPoint:
    return KPoint(E, d=d)


def base_change(P: KPoint, d: int | None) -> KPoint:
    if P.d == d:
        return P
    if P.is_zero:
        return KPoint(P.curve, d=d)
    return KPoint(P.curve, P.x, P.y, d)


def descend(P: KPoint) -> KPoint:
    """View a point with rational coordinates as a point over Q."""
    if P.d is None:
        return P
    if P.is_zero:
        return KPoint(P.curve)
    if P.x.b != 0 or P.y.b != 0:
        raise ValueError(f"{P} is not rational")
    return KPoint(P.curve, P.x.a, P.y.a)


def _check_same(P: KPoint, Q: KPoint):
    if P.curve != Q.curve:
        raise CurveMismatch(f"points on different curves: {P.curve} vs {Q.curve}")
    if P.d != Q.d:
        raise CurveMismatch(f"points over different fields: d={P.d} vs d={Q.d}")


def neg(P: KPoint) -> KPoint:
    if P.is_zero:
        return P
    E = P.curve
    return KPoint(E, P.x, -P.y - E.a1 * P.x - E.a3, P.d)


def add(P: KPoint, Q: KPoint) -> KPoint:
    _check_same(P, Q)
    if P.is_zero:
        return Q
    if Q.is_zero:
        return P
    E = P.curve
    a1, a2, a3, a4, a6 = E.ainvs
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return P.origin()
        den = 2 * y1 + a1 * x1 + a3
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
        nu = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) / den
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return KPoint(E, x3, y3, P.d)


def sub(P: KPoint, Q: KPoint) -> KPoint:
    return add(P, neg(Q))


def scalar_mul(P: KPoint, n: int) -> KPoint:
    if n < 0:
        return scalar_mul(neg(P), -n)
    return fingroup.multiple(P, n, add, P.origin())


def conj_point(P: KPoint) -> KPoint:
    """Galois conjugate: conjugate each coordinate."""
    if P.is_zero or P.d is None:
        return P
    return KPoint(P.curve, P.x.conj(), P.y.conj(), P.d)


def norm_point(P: KPoint) -> KPoint:
    """P + sigma(P), returned as a rational point."""
    return descend(add(P, conj_point(P)))


def point_order(P: KPoint, bound: int = 12) -> int:
    """Order of P if at most ``bound``, else 0."""
    Q = P
    for n in range(1, bound + 1):
        if Q.is_zero:
            return n
        Q = add(Q, P)
    return 0


def transport(P: KPoint, iso: Iso, target: EllipticCurve) -> KPoint:
    """Image of P under the change of variables ``iso`` (source -> target model)."""
    if P.is_zero:
        return KPoint(target, d=P.d)
    x, y = iso.map_coords(P.x, P.y)
    return KPoint(target, x, y, P.d)


def torsion_group_of(points, zero: KPoint | None = None) -> fingroup.FiniteAbelian:
    points = list(points)
    if zero is None:
        if not points:
            raise ValueError("need at least one point or an explicit zero")
        zero = points[0].origin()
    return fingroup.structure(points, add, zero, neg)


# --- Mordell-Weil data -------------------------------------------------------


@dataclass
class MordellWeilData:
    curve: EllipticCurve
    rank: int | None
    free_generators: list[KPoint] = field(default_factory=list)
    torsion_generators: list[KPoint] = field(default_factory=list)
    provenance: str = "computed"

    def __post_init__(self):
        for P in self.free_generators + self.torsion_generators:
            if P.curve != self.curve:
                raise CurveMismatch("generator is on a different curve")
        for T in self.torsion_generators:
            if point_order(T) == 0:
                raise ValueError(f"{T} is not a torsion point")

    @property
    def torsion_orders(self) -> list[int]:
        return [point_order(T) for T in self.torsion_generators]

    @cached_property
    def torsion(self) -> fingroup.FiniteAbelian:
        return torsion_group_of(self.torsion_generators, origin(self.curve))

    @property
    def torsion_order(self) -> int:
        return self.torsion.order


def _monotone_root(f, lo: int, hi: int, increasing: bool) -> int | None:
    """Integer root of f on [lo, hi] where f is monotone, by bisection."""
    if lo > hi:
        return None
    sign = 1 if increasing else -1
    while lo < hi:
        mid = (lo + hi) // 2
        if sign * f(mid) < 0:
            lo = mid + 1
        else:
            hi = mid
    return lo if f(lo) == 0 else None


def _cubic_integer_roots(A: int, c: int) -> list[int]:
    """Integer roots of x^3 + A x + c."""
    def f(x):
        return x * x * x + A * x + c

    R = 1 + max(abs(A), abs(c))  # Cauchy bound
    if A >= 0:
        pieces = [(-R, R, True)]
    else:
        # f' = 3x^2 + A is positive for |x| >= s and non-positive for |x| < s
        s = isqrt(-A // 3)
        while 3 * s * s + A <= 0:
            s += 1
        pieces = [(-R, -s, True), (-s + 1, s - 1, False), (s, R, True)]
    roots = {_monotone_root(f, lo, hi, inc) for lo, hi, inc in pieces}
    return sorted(r for r in roots if r is not None)


def _short_integral(E: EllipticCurve) -> tuple[EllipticCurve, Iso]:
    """Integral short model of E and the isomorphism E -> model."""
    S, iso1 = E.short_model
    Z, iso2 = S.integral_model
    return Z, iso1.then(iso2)


def torsion_subgroup(E: EllipticCurve) -> MordellWeilData:
    """Full rational torsion by Lutz-Nagell on an integral short model."""
    Z, iso = _short_integral(E)
    A, B = int(Z.a4), int(Z.a6)
    disc = abs(4 * A**3 + 27 * B**2)
    candidates = []
    for y in [0] + [y for y in divisors(_square_part_root(disc)) if y > 0]:
        if y and disc % (y * y):
            continue
        for x in _cubic_integer_roots(A, B - y * y):
            candidates.append((x, y))
            if y:
                candidates.append((x, -y))
    zero = origin(Z)
    pts = []
    for x, y in candidates:
        P = KPoint(Z, x, y)
        if _lutz_nagell_torsion(P):
            pts.append(P)
    inv = iso.inverse()
    back = [transport(P, inv, E) for P in pts]
    group = torsion_group_of(back, origin(E))
    return MordellWeilData(E, None, [], list(group.generators), "computed")


def _square_part_root(n: int) -> int:
    """Largest m with m^2 | n."""
    m = 1
    for p, e in factorint(n).items():
        m *= p ** (e // 2)
    return m


def _lutz_nagell_torsion(P: KPoint) -> bool:
    # torsion iff all multiples stay integral and one of them is O (Mazur: order <= 12)
    Q = P
    for _ in range(12):
        if Q.is_zero:
            return True
        if Q.x.denominator != 1 or Q.y.denominator != 1:
            return False
        Q = add(Q, P)
    return Q.is_zero


# --- twists -------------------------------------------------------------------


def twist(E: EllipticCurve, D: int) -> EllipticCurve:
    """Quadratic twist y^2 = x^3 + a D^2 x + b D^3 of the short model y^2 = x^3 + a x + b."""
    if D in (0, 1):
        raise ValueError("D must differ from 0 and 1")
    S, _ = E.short_model
    return EllipticCurve(0, 0, 0, S.a4 * D * D, S.a6 * D**3)


def sqrt_of(D: int) -> FieldElem:
    """sqrt(D) as an element of Q(sqrt d), d the squarefree part of D."""
    d, m = squarefree_part(D)
    return field_of_discriminant(D).elem(0, m)


def twist_embed(P: KPoint, D: int, E: EllipticCurve) -> KPoint:
    """Map a rational point of twist(E, D) into E(Q(sqrt D)).

    On short models (X, Y) -> (X/D, Y/(D sqrt D)); the image is carried back
    to the given model of E. It satisfies sigma(image) = -image.
    """
    S, iso = E.short_model
    d = field_of_discriminant(D).d
    if P.is_zero:
        return origin(E, d)
    if P.curve != twist(E, D):
        raise CurveMismatch("point is not on the twist model")
    root = sqrt_of(D)
    x = field_of_discriminant(D).elem(P.x / D)
    y = (P.y / D) / root
    Q = KPoint(S, x, y, d)
    return transport(Q, iso.inverse(), E)


# --- norm index ---------------------------------------------------------------


@dataclass
class NormIndex:
    index: int
    saturation_flag: str
    dimension: int  # dim of E(Q)/2E(Q)
    image_rank: int


def _f2_rank(rows: list[list[int]]) -> int:
    rows = [r[:] for r in rows if any(r)]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def mod2_coordinates(Q: KPoint, mw: MordellWeilData, bound: int = 4) -> list[int] | None:
    """Coordinates of Q in E(Q)/2E(Q), by bounded search over the generators."""
    tors = mw.torsion
    even = [i for i, n in enumerate(tors.invariants) if n % 2 == 0]
    gens = mw.free_generators
    for coeffs in product(range(-bound, bound + 1), repeat=len(gens)):
        R = Q
        for c, G in zip(coeffs, gens):
            if c:
                R = sub(R, scalar_mul(G, c))
        t = tors.dlog(R)
        if t is not None:
            return [c % 2 for c in coeffs] + [t[i] % 2 for i in even]
    return None


def norm_index(
    E: EllipticCurve,
    D: int,
    mw_F: MordellWeilData,
    mw_twist: MordellWeilData,
    extra_points=(),
    search_bound: int = 4,
) -> NormIndex:
    """(E(Q) : N(E')) with E' generated by E(Q), the embedded twist points and ``extra_points``."""
    for mw, name in ((mw_F, "E(Q)"), (mw_twist, "E_D(Q)")):
        if mw.rank is None:
            raise MissingGenerators(f"rank of {name} is not known")
        if len(mw.free_generators) < mw.rank:
            raise MissingGenerators(
                f"{name} has rank {mw.rank} but {len(mw.free_generators)} generators"
            )
    d = field_of_discriminant(D).d
    dim = len(mw_F.free_generators) + sum(1 for n in mw_F.torsion.invariants if n % 2 == 0)
    gens_K = [base_change(P, d) for P in mw_F.free_generators + mw_F.torsion_generators]
    gens_K += [twist_embed(P, D, E) for P in mw_twist.free_generators + mw_twist.torsion_generators]
    gens_K += list(extra_points)
    rows = []
    for P in gens_K:
        c = mod2_coordinates(norm_point(P), mw_F, search_bound)
        if c is None:
            raise MissingGenerators(f"norm of {P} not located in the span of E(Q) generators")
        rows.append(c)
    rk = _f2_rank(rows) if dim else 0
    return NormIndex(2 ** (dim - rk), "proxy", dim, rk)
