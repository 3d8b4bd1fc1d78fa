import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from modgen import random_finite_module, random_module
from ostrowski.cohomology import (
    InvolutionModule,
    brute_force_cohomology,
    mw_module,
    tate_cohomology,
    unit_module,
)
from ostrowski.ellcurve import EllipticCurve, KPoint, twist, twist_embed
from ostrowski.errors import MalformedAction
from ostrowski.quadfield import fundamental_unit, make_field

seeds = st.integers(0, 2**32 - 1)


def orders(M):
    T = tate_cohomology(M)
    return T.h0_order, T.h1_order


def herbrand(M):
    h0, h1 = orders(M)
    return Fraction(h0, h1)


@pytest.mark.parametrize(
    "M, expected",
    [
        (InvolutionModule(1, (), ((1,),)), (2, 1)),
        (InvolutionModule(1, (), ((-1,),)), (1, 2)),
        (InvolutionModule(0, (5,), ((1,),)), (1, 1)),
        (InvolutionModule(0, (2, 2), ((1, 0), (0, 1))), (4, 4)),
        (InvolutionModule(2, (), ((0, 1), (1, 0))), (1, 1)),
        (InvolutionModule(0, (), ()), (1, 1)),
    ],
)
def test_small_modules(M, expected):
    assert orders(M) == expected


def test_malformed_actions():
    with pytest.raises(MalformedAction):
        InvolutionModule(1, (), ((2,),))  # not an involution
    with pytest.raises(MalformedAction):
        InvolutionModule(0, (2, 3), ((1, 0), (0, 1), (0, 0)))
    with pytest.raises(MalformedAction):
        InvolutionModule(0, (4, 2), ((1, 1), (0, 1)))  # generator of order 2 sent to order 4


@pytest.mark.parametrize("d, h1", [(-5, 2), (-1, 2), (-3, 2), (2, 2), (3, 4), (5, 2), (-21, 2)])
def test_unit_cohomology(d, h1):
    assert tate_cohomology(unit_module(fundamental_unit(make_field(d)))).h1_order == h1


def test_mw_module_examples():
    E = EllipticCurve.from_ainvs([0, 0, 0, -1, 0])
    tors = [KPoint(E, 0, 0, 17), KPoint(E, 1, 0, 17)]
    assert tate_cohomology(mw_module([], tors)).h1_order == 4
    E1 = EllipticCurve.from_ainvs([0, 0, 0, -1, Fraction(1, 4)])
    P = KPoint(E1, 0, Fraction(1, 2), -7)
    assert tate_cohomology(mw_module([P], [])).h1_order == 1
    # an anti-invariant free generator: a point of the twist carried into E(K)
    # (0, 1/2) on E1 reappears as (0, 343/2) on the double twist
    ED = twist(E1, -7)
    Q = KPoint(twist(ED, -7), 0, Fraction(343, 2))
    assert tate_cohomology(mw_module([twist_embed(Q, -7, ED)], [])).h1_order == 2


@given(seeds)
def test_snf_matches_brute_force(seed):
    M = random_finite_module(random.Random(seed))
    assert orders(M) == brute_force_cohomology(M)


@given(seeds)
def test_herbrand_quotient_finite_is_one(seed):
    h0, h1 = orders(random_finite_module(random.Random(seed)))
    assert h0 == h1


@given(seeds, seeds)
def test_direct_sum_multiplies(s1, s2):
    M, N = random_module(random.Random(s1)), random_module(random.Random(s2))
    a0, a1 = orders(M)
    b0, b1 = orders(N)
    assert orders(M.direct_sum(N)) == (a0 * b0, a1 * b1)
    assert herbrand(M.direct_sum(N)) == herbrand(M) * herbrand(N)


@given(seeds)
def test_herbrand_of_free_part(seed):
    # h(M) depends only on the free part: 2^(#trivial lines) / 2^(#sign lines)
    rng = random.Random(seed)
    plus, minus, swaps = rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 1)
    M = random_finite_module(rng, 2)
    for _ in range(plus):
        M = M.direct_sum(InvolutionModule(1, (), ((1,),)))
    for _ in range(minus):
        M = M.direct_sum(InvolutionModule(1, (), ((-1,),)))
    for _ in range(swaps):
        M = M.direct_sum(InvolutionModule(2, (), ((0, 1), (1, 0))))
    assert herbrand(M) == Fraction(2**plus, 2**minus)
