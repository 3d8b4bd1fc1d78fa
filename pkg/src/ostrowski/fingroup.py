"""Structure of small finite abelian groups given by explicit generators."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Hashable

from . import intlin


@dataclass
class FiniteAbelian:
    invariants: list[int]  # d_1 | d_2 | ... , all > 1
    generators: list  # one element per invariant factor
    elements: dict  # element -> coordinate tuple w.r.t. generators

    @property
    def order(self) -> int:
        n = 1
        for d in self.invariants:
            n *= d
        return n

    def dlog(self, x) -> tuple[int, ...] | None:
        return self.elements.get(x)


def element_order(x, add: Callable, zero: Hashable, bound: int = 10**4) -> int:
    y, n = x, 1
    while y != zero:
        y = add(y, x)
        n += 1
        if n > bound:
            raise ValueError("element order exceeds bound")
    return n


def multiple(x, n: int, add: Callable, zero):
    result, base = zero, x
    while n:
        if n & 1:
            result = add(result, base)
        base = add(base, base)
        n >>= 1
    return result


def _prune(gens: list, add: Callable, zero: Hashable) -> list:
    """Drop generators already in the span of the earlier ones."""
    span = {zero}
    kept = []
    for g in gens:
        if g in span:
            continue
        kept.append(g)
        frontier = list(span)
        while frontier:
            nxt = []
            for x in frontier:
                y = add(x, g)
                if y not in span:
                    span.add(y)
                    nxt.append(y)
            frontier = nxt
    return kept


def structure(gens: list, add: Callable, zero: Hashable, neg: Callable) -> FiniteAbelian:
    """Invariant factors, generators and a discrete-log table for <gens>."""
    gens = _prune(gens, add, zero)
    if not gens:
        return FiniteAbelian([], [], {zero: ()})
    orders = [element_order(g, add, zero) for g in gens]
    k = len(gens)
    elem_of = {}
    relations = []
    for i, o in enumerate(orders):
        relations.append([o if j == i else 0 for j in range(k)])
    for v in product(*(range(o) for o in orders)):
        x = zero
        for g, c in zip(gens, v):
            x = add(x, multiple(g, c, add, zero))
        if x in elem_of:
            w = elem_of[x]
            relations.append([a - b for a, b in zip(v, w)])
        else:
            elem_of[x] = v
    R = intlin.transpose(relations)  # k x m
    U, D, _ = intlin.smith(R)
    diag = intlin.diagonal(D)
    Uinv = intlin.inverse_unimodular(U)
    keep = [i for i, d in enumerate(diag) if d != 1]
    new_gens = []
    for i in keep:
        x = zero
        for j in range(k):
            c = Uinv[j][i] % orders[j]
            x = add(x, multiple(gens[j], c, add, zero))
        new_gens.append(x)
    invariants = [diag[i] for i in keep]
    table = {}
    for x, v in elem_of.items():
        w = intlin.matvec(U, list(v))
        table[x] = tuple(w[i] % diag[i] for i in keep)
    return FiniteAbelian(invariants, new_gens, table)
