from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ostrowski.cli import ASSERTED, FAMILIES, FIXTURE, assemble, run_ostc
from ostrowski.ellcurve import EllipticCurve, KPoint, MordellWeilData, torsion_subgroup, twist
from ostrowski.errors import InconsistentRanks, NonIntegralOrder, UnsupportedLocalCase
from ostrowski.shaengine import (
    ANCHORS,
    INCONSISTENT,
    NO,
    UNDETERMINED,
    YES,
    OstcInputs,
    ShaInput,
    back_solve_delta,
    exactness_verdict,
    h1_global,
    ker_trans_two_ways,
    ostc_report,
    prepare_inputs,
    replay,
    sha_ratio_check,
    structure_name,
)

E1 = EllipticCurve.from_ainvs([0, 0, 0, -1, Fraction(1, 4)])


def inputs(r, rD, idx, d_inf, d_f, sha, prov="table", label="t", D=-7):
    return OstcInputs(label, D, 1, r, rD, idx, "proxy", d_inf, d_f, prov, [], sha)


EXAMPLE = inputs(1, 0, 2, 1, 0, ShaInput(1, 1, 1))
FAMILY = inputs(0, 0, 4, 0, 2, ShaInput(1, 4, 1), D=17)
TRIVIAL = inputs(0, 0, 1, 0, 0, ShaInput(1, 1, 1), D=5)


def test_h1_global():
    assert h1_global(0, 0, 4) == 4
    assert h1_global(3, 3, 1) == 1
    assert h1_global(1, 2, 2) == 4
    with pytest.raises(InconsistentRanks):
        h1_global(2, 0, 2)


def test_sha_ratio_check():
    assert sha_ratio_check(0, 0, 2, 4, ShaInput(1, 4, 1)) == ("consistent", 1)
    status, residual = sha_ratio_check(0, 0, 2, 4, ShaInput(1, 1, 1))
    assert status == "inconsistent" and residual == Fraction(1, 4)
    assert sha_ratio_check(0, 0, 0, 1, ShaInput(1, 1, 1))[0] == "consistent"
    assert sha_ratio_check(0, 0, 0, 1, ShaInput(1, 1, None))[0] == "incomplete"


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_family_constraint(eK, r, k):
    # with sha_E_F = 1, idx = 4, equal ranks, delta = 2: (ii-1) reads sha_ED = 4 * sha_E_K
    sha_EK = 4**eK
    ok = sha_ratio_check(r, r, 2, 4, ShaInput(1, 4 * sha_EK, sha_EK))[0]
    bad = sha_ratio_check(r, r, 2, 4, ShaInput(1, 4 * sha_EK * 2 ** (k + 1), sha_EK))[0]
    assert ok == "consistent" and bad == "inconsistent"


def test_ker_trans_two_ways():
    assert ker_trans_two_ways(ShaInput(1, 1, 1), 2, 1, 0, 1) == (2, 2)
    assert ker_trans_two_ways(ShaInput(1, 1, 1), 1, 0, 0, 0) == (1, 1)
    assert ker_trans_two_ways(ShaInput(1, 4, 1), 4, 0, 0, 2)[1] == 1
    assert ker_trans_two_ways(ShaInput(1, None, None), 4, 0, 0, 2) == (None, 1)
    with pytest.raises(NonIntegralOrder):
        ker_trans_two_ways(ShaInput(1, 4, 1), 2, 0, 0, 0)


def test_exactness_verdict():
    assert exactness_verdict(ShaInput(1, 1, 1), 2, 2, 2)[0] == NO
    assert exactness_verdict(ShaInput(9, 9, 9), None, None, 1)[0] == YES
    assert exactness_verdict(ShaInput(1, 9, 9), None, None, 2)[0] == UNDETERMINED
    assert exactness_verdict(ShaInput(1, 1, 1), 1, 2, 2)[0] == INCONSISTENT


def test_structure_name():
    assert structure_name(1) == "0"
    assert structure_name(2) == "Z/2Z"
    assert structure_name(4) == "order 4, exponent <= 2"
    assert structure_name([2, 2]) == "Z/2Z"
    assert structure_name([1, 4]) == "order in [1, 4], exponent <= 2"


def test_example_report():
    rep = ostc_report(EXAMPLE)
    assert rep.h1_global_order == 1
    assert (rep.t1, rep.t2, rep.ker_trans_order) == (2, 2, 1)
    assert rep.ecbrz_exact == NO
    assert (rep.kernel_part_order, rep.image_part_order, rep.ostc_order) == (1, 2, 2)
    assert rep.ostc_structure == "Z/2Z"


def test_family_report():
    rep = ostc_report(FAMILY)
    assert rep.h1_global_order == 4
    assert rep.sha_check == "consistent"
    assert (rep.t1, rep.t2) == (1, 1)
    assert rep.ecbrz_exact == YES and rep.ostc_structure == "0"


def test_trivial_report():
    rep = ostc_report(TRIVIAL)
    assert rep.ecbrz_exact == YES and rep.ostc_order == 1 and rep.ostc_structure == "0"


@pytest.mark.parametrize("inp", [EXAMPLE, FAMILY, TRIVIAL])
def test_derivation_is_anchored_and_replayable(inp):
    rep = ostc_report(inp)
    assert rep.derivation
    for s in rep.derivation:
        assert set(s) == {"formula", "anchor", "step"}
        assert ANCHORS[s["formula"]] == s["anchor"]
    assert replay(rep)


def test_ostc_order_is_product_when_exact():
    for inp in (EXAMPLE, FAMILY, TRIVIAL):
        rep = ostc_report(inp)
        if isinstance(rep.kernel_part_order, int) and isinstance(rep.image_part_order, int):
            assert rep.ostc_order == rep.kernel_part_order * rep.image_part_order


def _mw(E, rank, free=()):
    return MordellWeilData(E, rank, list(free), torsion_subgroup(E).torsion_generators)


def test_back_solve_delta():
    assert back_solve_delta(1, 0, 2, ShaInput(1, 1, 1)) == 1
    assert back_solve_delta(0, 0, 4, ShaInput(1, 4, 1)) == 2
    with pytest.raises(UnsupportedLocalCase):
        back_solve_delta(0, 0, 4, ShaInput(1, None, 1))
    with pytest.raises(InconsistentRanks):
        back_solve_delta(0, 0, 4, ShaInput(1, 3, 1))


def test_prepare_inputs_backsolves_wild_place():
    P = KPoint(E1, 0, Fraction(1, 2))
    D = -84
    inp = prepare_inputs(E1, D, _mw(E1, 1, [P]), _mw(twist(E1, D), 0), ShaInput(1, 1, 1))
    assert inp.norm_index == 2
    assert inp.delta_provenance == "back-solved"
    assert (inp.delta_inf, inp.delta_f) == (1, 0)
    assert (2, 0, "back-solved") in inp.local
    rep = ostc_report(inp)
    assert rep.sha_check.startswith("consistent (by construction")
    assert any(s["formula"] == "backsolve" for s in rep.derivation)
    assert rep.ostc_structure == "Z/2Z"
    with pytest.raises(UnsupportedLocalCase):
        prepare_inputs(E1, D, _mw(E1, 1, [P]), _mw(twist(E1, D), 0), ShaInput(1, 1, 1), allow_backsolve=False)


def test_prepare_inputs_table_path():
    P = KPoint(E1, 0, Fraction(1, 2))
    inp = prepare_inputs(E1, -7, _mw(E1, 1, [P]), _mw(twist(E1, -7), 0), ShaInput(1, 1, 1))
    assert (inp.norm_index, inp.delta, inp.delta_provenance) == (2, 1, "table")
    assert inp.h1_module == h1_global(1, 0, 2)


def test_true_data_p41_goes_through_saturation(fx):
    # fixtures give rank 2 for the 41-twist; the generated subgroup then has too
    # small a norm image, and the H^1-into-local-sum bound pins the index
    _, _, _, claim = FAMILIES["legendre-pmod8"]
    rep = run_ostc(fx, "32a2", 41, FIXTURE, claim)
    assert rep.inputs.r_DF == 2
    assert any(s["formula"] == "saturation" for s in rep.derivation)
    assert rep.ostc_structure == "0"


def test_fixture_pairs_consistent(fx):
    counts = {}
    for pair in fx.pairs:
        # asserted rows lack an independent Sha(E/K) for the wild 2-adic twists
        inp, _ = assemble(fx, pair.curve, pair.D, ASSERTED if pair.asserted else FIXTURE)
        rep = ostc_report(inp)
        counts[rep.ecbrz_exact] = counts.get(rep.ecbrz_exact, 0) + 1
        if rep.ecbrz_exact == YES and rep.t1 is not None and rep.t2 is not None:
            assert rep.t1 == rep.t2, (pair.curve, pair.D)
        assert rep.sha_check != "inconsistent", (pair.curve, pair.D)
    assert INCONSISTENT not in counts
    assert counts.get(YES, 0) > 0 and counts.get(NO, 0) > 0
