from fractions import Fraction as F

import pytest

from _models import (
    K4,
    NO_PARADOX_SPEC,
    PARADOX_SPEC,
    QUASI,
    QUASI_SPEC,
    SIX,
    SIX_SPEC,
)
from matchbraess.errors import DeltaOutOfDomain, EdgeExists, NotAffine, UnstableOnDomain
from matchbraess.model import ArrivalSpec, MatchingGraph, build_model, enumerate_independent_sets
from matchbraess.paradox import expectation_gap
from matchbraess.parametric import (
    CONTAINS_ENDPOINT,
    EXTENDS_TO_ENDPOINT,
    NEIGHBORS_BOTH,
    Verdict,
    classify_edge_addition,
    cleared_gap_numerator,
    find_saturated_sets,
    gap_decomposition,
    isolate_paradox_regions,
    set_category,
    small_delta_sign,
    symbolic_gap,
    symbolic_mean_items,
)
from matchbraess.poly import Polynomial
from matchbraess.product_form import mean_items


def test_symbolic_mean_items_values():
    assert symbolic_mean_items(QUASI, QUASI_SPEC)(F(1, 8)) == F(11, 6)
    assert symbolic_mean_items(K4, QUASI_SPEC)(F(1, 8)) == F(71, 39)


def test_symbolic_mean_constant_spec():
    spec = ArrivalSpec.affine({"1": F(1, 3), "2": F(1, 3), "3": F(1, 3)}, {}, F(1, 10))
    g = MatchingGraph.from_edges("123", [("1", "2"), ("2", "3"), ("1", "3")])
    r = symbolic_mean_items(g, spec)
    assert r.degree == 0 and r(F(1, 20)) == F(3, 2)


def test_symbolic_mean_agrees_on_grid():
    r = symbolic_mean_items(SIX, SIX_SPEC)
    for k in range(1, 12):
        d = SIX_SPEC.delta_max * k / 11
        assert r(d) == mean_items(build_model(SIX, SIX_SPEC, d))


def test_unstable_domain_rejected():
    wide = ArrivalSpec.affine(QUASI_SPEC.a, QUASI_SPEC.b, F(1, 5))
    with pytest.raises(UnstableOnDomain):
        symbolic_mean_items(QUASI, wide)


def test_saturated_sets_examples():
    six = find_saturated_sets(SIX, SIX_SPEC)
    assert six.saturated_sets == (("5",),) and six.assumption_holds
    quasi = find_saturated_sets(QUASI, QUASI_SPEC)
    assert set(quasi.saturated_sets) == {("3",), ("1", "2")} and not quasi.assumption_holds
    assert find_saturated_sets(QUASI, NO_PARADOX_SPEC).saturated_sets == (("1", "2"),)
    for s in six.saturated_sets:
        const, slope = six.gaps[s]
        assert const == 0 and slope > 0


def test_classification_examples():
    c = classify_edge_addition(SIX, SIX_SPEC, "1", "2")
    assert (c.verdict, c.witness, c.category) == (Verdict.OPEN, ("5",), EXTENDS_TO_ENDPOINT)
    c = classify_edge_addition(QUASI, NO_PARADOX_SPEC, "1", "2")
    assert (c.verdict, c.witness, c.category) == (Verdict.NO_PARADOX, ("1", "2"), CONTAINS_ENDPOINT)
    c = classify_edge_addition(QUASI, PARADOX_SPEC, "1", "2")
    assert (c.verdict, c.witness, c.category) == (Verdict.PARADOX, ("3",), NEIGHBORS_BOTH)
    assert classify_edge_addition(QUASI, QUASI_SPEC, "1", "2").verdict == Verdict.VIOLATED
    with pytest.raises(EdgeExists):
        classify_edge_addition(QUASI, QUASI_SPEC, "1", "3")


def test_category_partition():
    isets = enumerate_independent_sets(SIX)
    star = [s for s in isets if set_category(SIX, s, "1", "2") == CONTAINS_ENDPOINT]
    assert star == [s for s in isets if {"1", "2"} & set(s)]


@pytest.mark.parametrize("spec", [QUASI_SPEC, PARADOX_SPEC, NO_PARADOX_SPEC])
def test_decomposition_sign_matches_gap(spec):
    dec = gap_decomposition(QUASI, spec, "1", "2")
    for d in (F(1, 1000), F(1, 100)):
        if d > spec.delta_max:
            continue
        assert dec.sign_at(d) == expectation_gap(QUASI, spec, "1", "2", d).sign


def test_decomposition_six_class():
    dec = gap_decomposition(SIX, SIX_SPEC, "1", "2")
    for d in (F(1, 1000), F(1, 100)):
        assert dec.sign_at(d) == expectation_gap(SIX, SIX_SPEC, "1", "2", d).sign


def test_cleared_numerator_constant_term_sign():
    assert cleared_gap_numerator(QUASI, PARADOX_SPEC, "1", "2").num(0) > 0
    assert cleared_gap_numerator(QUASI, NO_PARADOX_SPEC, "1", "2").num(0) < 0


def test_symbolic_gap_matches_exact_gap():
    g = symbolic_gap(SIX, SIX_SPEC, "1", "2")
    assert g(F(1, 1000)) == F(35207444451445543, 389884828806070752)


def test_regions_frozen():
    res = isolate_paradox_regions(QUASI, QUASI_SPEC, "1", "2")
    assert res.numerator == Polynomial((1, -26, 152, -112, 384, -2304))
    assert [r.sign for r in res.regions] == [1, -1, 1]
    assert [(r.lo, r.hi) for r in res.roots] == [
        (F(44321, 786432), F(88643, 1572864)),
        (F(105373, 786432), F(70249, 524288)),
    ]
    for root in res.roots:
        assert res.numerator.sign_at(root.lo) * res.numerator.sign_at(root.hi) < 0
        assert root.hi - root.lo <= F(1, 10**6)


def test_regions_agree_with_gap_on_grid():
    res = isolate_paradox_regions(QUASI, QUASI_SPEC, "1", "2")
    for k in range(1, 60):
        d = F(k, 360)
        region = [r for r in res.regions if r.lo < d < r.hi]
        if region:
            assert region[0].sign == expectation_gap(QUASI, QUASI_SPEC, "1", "2", d).sign


def test_no_paradox_spec_gives_negative_interval_at_zero():
    res = isolate_paradox_regions(QUASI, NO_PARADOX_SPEC, "1", "2")
    assert res.regions[0].lo == 0 and res.regions[0].sign == -1
    assert small_delta_sign(symbolic_gap(QUASI, NO_PARADOX_SPEC, "1", "2")) == -1


def test_regions_zero_gap():
    # found by search: adding {4,5} here leaves the mean unchanged
    g = MatchingGraph.from_edges("12345", [("1", "2"), ("1", "4"), ("1", "5"), ("2", "3"), ("2", "5"), ("3", "4")])
    a = {"1": F(2, 15), "2": F(4, 15), "3": F(4, 15), "4": F(2, 15), "5": F(1, 5)}
    spec = ArrivalSpec.affine(a, {}, F(1, 10))
    res = isolate_paradox_regions(g, spec, "4", "5")
    assert len(res.regions) == 1 and res.regions[0].sign == 0 and not res.roots


def test_regions_errors():
    fixed = ArrivalSpec.fixed({c: F(1, 4) for c in "1234"})
    with pytest.raises(NotAffine):
        isolate_paradox_regions(QUASI, fixed, "1", "2")
    with pytest.raises(DeltaOutOfDomain):
        isolate_paradox_regions(QUASI, QUASI_SPEC, "1", "2", domain=(0, 1))
