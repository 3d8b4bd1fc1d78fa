from itertools import product

import pytest
from hypothesis import given, strategies as st

from oracles import cayley_axioms, class_number_analytic, class_number_forms, is_fundamental
from ostrowski.classgroup import (
    Inert,
    QuadraticForm,
    Split,
    class_group,
    compose,
    cycle,
    inverse,
    is_reduced,
    narrow_is_ordinary,
    prime_class,
    principal_form,
    reduce,
    reduced_forms,
    _class_group_for_disc,
)
from ostrowski.errors import DiscMismatch, ImprimitiveForm, ResourceExceeded
from ostrowski.quadfield import fundamental_unit, is_squarefree, make_field

F = QuadraticForm


def _equivalent_bruteforce(f, g, bound=6):
    """Search SL2(Z) matrices with entries in [-bound, bound] mapping f to g."""
    a, b, c = f
    for p, q, r, s in product(range(-bound, bound + 1), repeat=4):
        if p * s - q * r != 1:
            continue
        A = a * p * p + b * p * r + c * r * r
        B = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s
        C = a * q * q + b * q * s + c * s * s
        if (A, B, C) == tuple(g):
            return True
    return False


def test_reduce_definite_examples():
    assert reduce(F(6, 2, 1)) == F(1, 0, 5)
    assert _equivalent_bruteforce(F(6, 2, 1), F(1, 0, 5))
    assert reduce(F(1, 1, 2)) == F(1, 1, 2)


def test_reduce_indefinite_examples():
    g = reduce(F(3, 2, -3))
    assert g == F(2, 4, -3)
    assert reduce(g) == g and g in cycle(g)
    assert [x for x in class_group(make_field(10)).elements] == [F(1, 6, -1), F(2, 4, -3)]


@pytest.mark.parametrize("D", [-20, -23, -47, -56, -84, -71])
def test_reduced_forms_pairwise_inequivalent(D):
    forms = reduced_forms(D)
    assert all(is_reduced(f) for f in forms)
    for f, g in product(forms, repeat=2):
        if f != g:
            assert not _equivalent_bruteforce(f, g, 4)


def test_compose_examples():
    assert compose(F(2, 1, 3), F(2, 1, 3)) == F(2, -1, 3)
    f = F(2, 2, 3)
    assert compose(f, inverse(f)) == reduce(principal_form(-20))


def test_compose_errors():
    with pytest.raises(DiscMismatch):
        compose(F(1, 1, 6), F(1, 0, 5))
    with pytest.raises(ImprimitiveForm):
        compose(F(2, 2, 6), F(2, 2, 6))


@pytest.mark.parametrize(
    "d, h, divisors",
    [(-1, 1, []), (-23, 3, [3]), (-21, 4, [2, 2]), (-47, 5, [5]), (-5, 2, [2]),
     (10, 2, [2]), (79, 3, [3]), (226, 8, [8]), (229, 3, [3]), (82, 4, [4])],
)
def test_class_group_examples(d, h, divisors):
    G = class_group(make_field(d))
    assert G.h == h and G.elementary_divisors == divisors


def test_class_group_larger_examples():
    assert class_group(make_field(10001)).h == 16
    assert class_group(make_field(-15015)).elementary_divisors == [2, 2, 2, 12]
    assert class_group(make_field(79)).narrow_order == 6


def test_resource_cap():
    with pytest.raises(ResourceExceeded):
        _class_group_for_disc(-(10**6) - 3)


def test_class_number_oracles_agree():
    # the two oracles are independent of each other and of the package
    for D in range(-3, -3001, -1):
        if is_fundamental(D):
            assert class_number_forms(D) == class_number_analytic(D), D


@pytest.mark.parametrize("d", [d for d in range(2, 400) if is_squarefree(d)])
def test_narrow_versus_unit_norm(d):
    # form-theoretic decision cross-checked against the sign of N(eps)
    K = make_field(d)
    assert narrow_is_ordinary(K) == (fundamental_unit(K).fu_norm == -1)
    G = class_group(K)
    assert G.narrow_order == G.h * (1 if narrow_is_ordinary(K) else 2)


@pytest.mark.parametrize("d", [d for d in range(2, 700) if is_squarefree(d)])
def test_real_group_axioms(d):
    G = class_group(make_field(d))
    if G.h <= 16:
        assert cayley_axioms(G.elements, G.mul, G.identity)


def test_prime_class_examples():
    K = make_field(-5)
    assert prime_class(K, 2) == F(2, 2, 3)
    s = prime_class(K, 3)
    assert isinstance(s, Split)
    G = class_group(K)
    assert G.mul(*s.forms) == G.identity
    assert isinstance(prime_class(make_field(-1), 3), Inert)
    s7 = prime_class(make_field(-5), 7)
    assert isinstance(s7, Split) and G.mul(*s7.forms) == G.identity


@st.composite
def group_elements(draw):
    D = draw(st.sampled_from([-23, -47, -71, -84, -104, -231, -399, -1155, 40, 85, 136, 229, 316, 1001]))
    G = _class_group_for_disc(D)
    xs = draw(st.lists(st.sampled_from(G.elements), min_size=3, max_size=3))
    return G, xs


@given(group_elements())
def test_group_law_properties(data):
    G, (x, y, z) = data
    assert G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z))
    assert G.mul(x, y) == G.mul(y, x)
    assert G.mul(x, G.inv(x)) == G.identity
    assert G.power(x, G.h) == G.identity


@given(st.integers(-4000, -3).filter(is_fundamental), st.integers(1, 30), st.integers(-30, 30))
def test_reduce_is_class_invariant(D, a, b):
    # any primitive form of disc D, reduced, lands on a reduced form in the list
    if (b * b - D) % (4 * a):
        return
    f = F(a, b, (b * b - D) // (4 * a))
    if not f.is_primitive():
        return
    g = reduce(f)
    assert is_reduced(g) and g.disc == D
    assert g in reduced_forms(D)
