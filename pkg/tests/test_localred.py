import json
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from ostrowski.datastore import fixture_dir, load_tate_rows
from ostrowski.ellcurve import EllipticCurve, Iso
from ostrowski.errors import UnsupportedLocalCase
from ostrowski.localred import (
    ADDITIVE,
    GOOD,
    INF,
    bad_sets,
    conductor,
    delta,
    delta_infty,
    hilbert_symbol,
    load_table,
    local_norm_index,
    tate_algorithm,
)

E32 = EllipticCurve.from_ainvs([-1, 0])
E1 = EllipticCurve.from_ainvs([0, 0, 0, -1, Fraction(1, 4)])
E11 = EllipticCurve.from_ainvs([0, -1, 1, 0, 0])
TATE_ROWS = load_tate_rows(fixture_dir() / "tate.jsonl")


def test_tate_examples():
    loc = tate_algorithm(E32, 3)
    assert (loc.kodaira, loc.tamagawa, loc.reduction) == ("I0", 1, GOOD)
    loc = tate_algorithm(E11, 11)
    assert (loc.kodaira, loc.tamagawa) == ("I1", 1)
    loc = tate_algorithm(E32, 2)
    assert loc.reduction == ADDITIVE and loc.tamagawa in (1, 2, 4)
    fixture = next(r for r in TATE_ROWS if r["label"] == "32a2" and r["p"] == 2)
    assert (loc.kodaira, loc.tamagawa) == (fixture["kodaira"], fixture["tamagawa"])


@pytest.mark.parametrize("row", TATE_ROWS, ids=lambda r: f"{r['label']}@{r['p']}")
def test_tate_matches_fixture(row):
    E = EllipticCurve.from_ainvs([Fraction(a) for a in row["a_invariants"]])
    loc = tate_algorithm(E, row["p"])
    assert (loc.kodaira, loc.tamagawa) == (row["kodaira"], row["tamagawa"])


def test_conductor_from_ogg():
    assert conductor(E11) == 11
    assert conductor(E32) == 32
    assert conductor(EllipticCurve.from_ainvs([0, 0, 1, -1, 0])) == 37


CURVES = [E32, E1, E11, EllipticCurve.from_ainvs([1, -1, 1, -122, 1721]), EllipticCurve.from_ainvs([1, 0, 0, -1070, 7812])]


@given(st.sampled_from(CURVES), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.sampled_from([1, 2, 3, Fraction(1, 2)]))
def test_tate_invariant_under_coordinate_change(E, r, s, t, u):
    F = Iso(u, r, s, t).apply(E)
    for p in (2, 3, 5, 7, 11, 37):
        a, b = tate_algorithm(E, p), tate_algorithm(F, p)
        assert (a.kodaira, a.tamagawa, a.reduction) == (b.kodaira, b.tamagawa, b.reduction)


def test_bad_sets_examples():
    assert bad_sets(E32, 17) == ([2, 17], [17])
    assert bad_sets(E32, -1) == ([2], [2])
    # 11a3 is bad only at 11; D = 5 ramifies at 5 alone and 11 splits there
    S, S0 = bad_sets(E11, 5)
    assert S == [5, 11] and S0 == [5]


def test_delta_infty():
    assert delta_infty(E32, 17) == 0
    assert delta_infty(E32, -7) == 1
    assert E11.disc < 0 and delta_infty(E11, -7) == 0


def test_local_norm_index_examples():
    loc = local_norm_index(E32, 17, 17)
    assert loc.h1_local_order == 4 and loc.index_provenance == "table"
    assert local_norm_index(E32, 3, -1).h1_local_order == 1  # 3 inert in Q(i), good reduction
    with pytest.raises(UnsupportedLocalCase) as err:
        local_norm_index(E32, 2, -1)
    assert list(err.value.places) == [2]
    over = local_norm_index(E32, 2, -1, overrides={2: (2, "back-solved")})
    assert (over.h1_local_order, over.index_provenance) == (2, "back-solved")


@pytest.mark.parametrize("p", [17, 41, 73, 89, 97, 113])
def test_delta_family(p):
    br = delta(E32, p)
    assert (br.delta_inf, br.delta_f, br.total) == (0, 2, 2)


def test_delta_breakdown_product():
    for E, D in ((E32, 17), (E11, 5), (E11, -3), (E1, 13)):
        br = delta(E, D)
        prod = 1
        for loc in br.places:
            prod *= loc.h1_local_order
        assert prod == 2**br.total
        _, S0 = bad_sets(E, D)
        assert [loc.p for loc in br.places] == [INF] + S0


def test_delta_trivial():
    # 11a3 at D = 5: S0 = {5}, good reduction at the ramified odd prime
    br = delta(E11, 5)
    assert br.delta_inf == 0 and br.total == br.delta_f


def test_delta_example_curve():
    # odd ramified primes have good reduction, so only the real place counts
    for D in (-7, -11, -47):
        br = delta(E1, D)
        assert (br.delta_inf, br.delta_f) == (1, 0)
    # D = -84 ramifies at 2, an additive wild place outside the table
    with pytest.raises(UnsupportedLocalCase) as err:
        delta(E1, -84)
    assert list(err.value.places) == [2]


def test_table_rows_are_cited():
    rows = load_table()
    assert rows and all(r.citation for r in rows)


# --- Hilbert symbol -------------------------------------------------------------


def _hilbert_bruteforce(a: int, b: int, p: int) -> int:
    """Solve a x^2 + b y^2 = z^2 primitively modulo a high enough power of p."""
    k = 2 if p != 2 else 5  # enough for squarefree a, b
    m = p**k
    for x, y, z in product(range(m), repeat=3):
        if x % p == y % p == z % p == 0:
            continue
        if (a * x * x + b * y * y - z * z) % m == 0:
            return 1
    return -1


_SQUAREFREE = [-15, -10, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 15]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_hilbert_bruteforce(p):
    for a, b in product(_SQUAREFREE, repeat=2):
        if p == 2 and (a, b) > (3, 3):
            continue  # 2^15 triples per pair; a sample is enough
        assert hilbert_symbol(Fraction(a), Fraction(b), p) == _hilbert_bruteforce(a, b, p), (a, b)


@given(st.integers(-200, 200).filter(bool), st.integers(-200, 200).filter(bool))
def test_hilbert_product_formula(a, b):
    from sympy import primefactors

    primes = set(primefactors(abs(2 * a * b)))
    total = -1 if a < 0 and b < 0 else 1
    for p in primes:
        total *= hilbert_symbol(Fraction(a), Fraction(b), p)
    assert total == 1


def test_tate_fixture_shape():
    raw = (fixture_dir() / "tate.jsonl").read_text().splitlines()
    assert len(raw) == len(TATE_ROWS) == 70
    assert all({"label", "p", "kodaira", "tamagawa", "source"} <= json.loads(r).keys() for r in raw)
