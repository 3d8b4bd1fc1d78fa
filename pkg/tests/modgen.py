"""Random finite modules over the group of order 2, for property tests."""

from __future__ import annotations

import random
from math import gcd

from ostrowski.cohomology import InvolutionModule
from ostrowski.errors import MalformedAction

SMALL_INVARIANTS = [(2, 2), (2, 4), (4, 4), (3, 3), (2, 2, 2), (2, 6), (2, 8), (4, 8), (3, 9), (5, 5), (2, 2, 4)]


def cyclic_block(rng: random.Random) -> InvolutionModule:
    n = rng.randint(2, 24)
    units = [u for u in range(n) if gcd(u, n) == 1 and (u * u) % n == 1]
    return InvolutionModule(0, (n,), ((rng.choice(units),),))


def swap_block(rng: random.Random) -> InvolutionModule:
    n = rng.randint(2, 9)
    return InvolutionModule(0, (n, n), ((0, 1), (1, 0)))


def sampled_block(rng: random.Random, tries: int = 200) -> InvolutionModule:
    """Rejection-sample an involution on a small invariant tuple."""
    ts = rng.choice(SMALL_INVARIANTS)
    k = len(ts)
    for _ in range(tries):
        # column j is the image of generator j; entry i must kill t_j in Z/t_i
        S = [[0] * k for _ in range(k)]
        for i in range(k):
            for j in range(k):
                g = gcd(ts[i], ts[j])
                S[i][j] = rng.randrange(g) * (ts[i] // g)
        try:
            return InvolutionModule(0, ts, tuple(map(tuple, S)))
        except MalformedAction:
            continue
    return InvolutionModule.trivial_action(0, ts)


BLOCKS = (cyclic_block, swap_block, sampled_block)


def random_finite_module(rng: random.Random, max_blocks: int = 3) -> InvolutionModule:
    M = rng.choice(BLOCKS)(rng)
    for _ in range(rng.randint(0, max_blocks - 1)):
        M = M.direct_sum(rng.choice(BLOCKS)(rng))
    return M


def random_module(rng: random.Random) -> InvolutionModule:
    """Finite part plus up to two free blocks (Z with +-1, or Z^2 swapped)."""
    M = random_finite_module(rng, 2)
    for _ in range(rng.randint(0, 2)):
        kind = rng.randrange(3)
        if kind == 0:
            F = InvolutionModule(1, (), ((1,),))
        elif kind == 1:
            F = InvolutionModule(1, (), ((-1,),))
        else:
            F = InvolutionModule(2, (), ((0, 1), (1, 0)))
        M = M.direct_sum(F)
    return M
