"""Tate cohomology of a group of order 2 acting on a finitely generated abelian group.

A module is presented as ``Z^rank + Z/t_1 + ... + Z/t_k`` with the involution
given by an integer matrix acting on coordinate column vectors. For the
cyclic group <sigma> of order 2 with norm ``N = 1 + sigma``::

    H^0 (Tate) = M^G / N M          H^1 = ker N / (sigma - 1) M
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from . import intlin
from .errors import ActionNotClosed, MalformedAction
from .quadfield import UnitGroupData


@dataclass(frozen=True)
class InvolutionModule:
    rank: int
    torsion: tuple[int, ...]
    sigma: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        object.__setattr__(self, "sigma", tuple(tuple(int(x) for x in row) for row in self.sigma))
        n = self.ngens
        if len(self.sigma) != n or any(len(row) != n for row in self.sigma):
            raise MalformedAction(f"sigma must be {n}x{n}")
        if any(t <= 1 for t in self.torsion):
            raise MalformedAction("torsion invariants must exceed 1")
        S = [list(row) for row in self.sigma]
        for j in range(n):
            if not self._in_relations([S[i][j] * self._col_order(j) for i in range(n)]):
                raise MalformedAction(f"sigma does not preserve the relation of generator {j}")
        S2 = intlin.matmul(S, S)
        for j in range(n):
            col = [S2[i][j] - (i == j) for i in range(n)]
            if not self._in_relations(col):
                raise MalformedAction("sigma is not an involution")

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    def _col_order(self, j: int) -> int:
        # 0 for free generators: the relation vector is then just zero
        return 0 if j < self.rank else self.torsion[j - self.rank]

    def _in_relations(self, v) -> bool:
        for i, x in enumerate(v):
            t = self._col_order(i)
            if t == 0:
                if x != 0:
                    return False
            elif x % t:
                return False
        return True

    def relation_columns(self) -> list[list[int]]:
        n = self.ngens
        return [[t if i == self.rank + k else 0 for i in range(n)] for k, t in enumerate(self.torsion)]

    def matrix(self) -> list[list[int]]:
        return [list(row) for row in self.sigma]

    @classmethod
    def trivial_action(cls, rank: int, torsion=()) -> "InvolutionModule":
        n = rank + len(torsion)
        return cls(rank, tuple(torsion), tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def direct_sum(self, other: "InvolutionModule") -> "InvolutionModule":
        # reorder to keep free generators first
        a, b = self, other
        order = (
            [("a", i) for i in range(a.rank)]
            + [("b", i) for i in range(b.rank)]
            + [("a", a.rank + i) for i in range(len(a.torsion))]
            + [("b", b.rank + i) for i in range(len(b.torsion))]
        )
        n = len(order)
        S = [[0] * n for _ in range(n)]
        for J, (sj, j) in enumerate(order):
            for I, (si, i) in enumerate(order):
                if si == sj:
                    src = a if si == "a" else b
                    S[I][J] = src.sigma[i][j]
        return InvolutionModule(a.rank + b.rank, a.torsion + b.torsion, tuple(map(tuple, S)))


@dataclass(frozen=True)
class TateCohomology:
    h0_order: int
    h1_order: int
    h0_generators: tuple[tuple[int, ...], ...] = field(default=())
    h1_generators: tuple[tuple[int, ...], ...] = field(default=())
    h0_invariants: tuple[int, ...] = field(default=())
    h1_invariants: tuple[int, ...] = field(default=())


def _lattice_basis(gens: list[list[int]], n: int) -> list[list[int]]:
    """A basis of the lattice spanned by the vectors ``gens`` in Z^n."""
    gens = [g for g in gens if any(g)]
    if not gens:
        return []
    M = intlin.transpose(gens)  # n x g
    U, D, _ = intlin.smith(M)
    Uinv = intlin.inverse_unimodular(U)
    basis = []
    for i, d in enumerate(intlin.diagonal(D)):
        if d:
            basis.append([Uinv[a][i] * d for a in range(n)])
    return basis


def _preimage(M: InvolutionModule, A: list[list[int]]) -> list[list[int]]:
    """Basis of {x in Z^n : A x lies in the relation lattice}."""
    n = M.ngens
    R = M.relation_columns()
    # kernel of [A | -R] projected to the x block
    Rt = intlin.transpose(R) if R else [[] for _ in range(n)]
    big = [list(A[i]) + [-c for c in (Rt[i] if R else [])] for i in range(n)]
    ker = intlin.kernel_basis(big, n + len(R))
    return _lattice_basis([v[:n] for v in ker], n)


def _subquotient(M: InvolutionModule, kernel_of, image_of):
    n = M.ngens
    X = _preimage(M, kernel_of)
    Y = [[image_of[i][j] for i in range(n)] for j in range(n)] + M.relation_columns()
    Y = [y for y in Y if any(y)]
    factors, gens = intlin.quotient_structure(X, Y)
    if any(f == 0 for f in factors):
        raise MalformedAction("cohomology group is infinite; presentation is inconsistent")
    order = 1
    for f in factors:
        order *= f
    reduced = []
    for g in gens:
        reduced.append(tuple(x % M._col_order(i) if M._col_order(i) else x for i, x in enumerate(g)))
    return order, tuple(reduced), tuple(factors)


def tate_cohomology(M: InvolutionModule) -> TateCohomology:
    n = M.ngens
    if n == 0:
        return TateCohomology(1, 1)
    S = M.matrix()
    N = [[S[i][j] + (i == j) for j in range(n)] for i in range(n)]
    T = [[S[i][j] - (i == j) for j in range(n)] for i in range(n)]
    h0, g0, f0 = _subquotient(M, T, N)
    h1, g1, f1 = _subquotient(M, N, T)
    return TateCohomology(h0, h1, g0, g1, f0, f1)


def brute_force_cohomology(M: InvolutionModule) -> tuple[int, int]:
    """Orders of (H^0, H^1) by enumerating every element; finite modules only."""
    if not M.is_finite:
        raise ValueError("brute force needs a finite module")
    ts = M.torsion
    S = M.matrix()

    def red(v):
        return tuple(x % t for x, t in zip(v, ts))

    def act(v):
        return red(intlin.matvec(S, list(v)))

    elems = [tuple(v) for v in product(*(range(t) for t in ts))]
    zero = tuple(0 for _ in ts)
    norm = {v: red([a + b for a, b in zip(v, act(v))]) for v in elems}
    fixed = {v for v in elems if act(v) == v}
    norm_image = set(norm.values())
    ker_norm = {v for v in elems if norm[v] == zero}
    aug_image = {red([b - a for a, b in zip(v, act(v))]) for v in elems}
    return len(fixed) // len(norm_image), len(ker_norm) // len(aug_image)


def unit_module(u: UnitGroupData) -> InvolutionModule:
    if u.fundamental_unit is None:
        w = u.torsion_order
        # conjugation inverts roots of unity
        return InvolutionModule(0, (w,), ((-1 % w if w > 2 else 1,),))
    # generators: fundamental unit eps (free), -1 (order 2)
    # sigma(eps) = N(eps) * eps^{-1}
    flip = 1 if u.fu_norm == -1 else 0
    return InvolutionModule(1, (2,), ((-1, 0), (flip, 1)))


def mw_module(free_gens, torsion_gens, search_bound: int = 2) -> InvolutionModule:
    """Presentation of the subgroup of E(K) generated by the given points.

    Free generators are assumed independent modulo torsion (no saturation).
    The action of sigma on each generator is located by a bounded search over
    integer combinations of the generators.
    """
    from .ellcurve import add, conj_point, neg, scalar_mul, torsion_group_of

    pts = list(free_gens) + list(torsion_gens)
    if not pts:
        return InvolutionModule(0, (), ())
    sub = torsion_group_of(torsion_gens, pts[0].origin())
    for t in torsion_gens:
        if sub.dlog(conj_point(t)) is None:
            raise ActionNotClosed("torsion subgroup is not sigma-stable")
    r = len(free_gens)
    n = r + len(sub.invariants)
    S = [[0] * n for _ in range(n)]
    for j, g in enumerate(sub.generators):
        for i, c in enumerate(sub.dlog(conj_point(g))):
            S[r + i][r + j] = c
    for j, P in enumerate(free_gens):
        target = conj_point(P)
        found = None
        for coeffs in product(range(-search_bound, search_bound + 1), repeat=r):
            Q = target
            for c, G in zip(coeffs, free_gens):
                if c:
                    Q = add(Q, neg(scalar_mul(G, c)))
            coords = sub.dlog(Q)
            if coords is not None:
                found = (coeffs, coords)
                break
        if found is None:
            raise ActionNotClosed(
                f"sigma image of free generator {j} not found within bound {search_bound}"
            )
        coeffs, coords = found
        for i, c in enumerate(coeffs):
            S[i][j] = c
        for i, c in enumerate(coords):
            S[r + i][j] = c
    return InvolutionModule(r, tuple(sub.invariants), tuple(map(tuple, S)))
