import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _models import K3, K3_SPEC, K4, PATH, QUASI, QUASI_SPEC, SIX, random_graph
from matchbraess.errors import (
    BadDistribution,
    DeltaOutOfDomain,
    EdgeExists,
    MalformedInput,
    SelfLoop,
    Unstable,
    UnknownClass,
)
from matchbraess.model import (
    ArrivalSpec,
    MatchingGraph,
    add_edge,
    as_fraction,
    build_model,
    check_stability,
    enumerate_independent_sets,
    model_to_json,
    neighborhood,
    parse_model,
    parse_word,
    relabel_graph,
    require_stable,
)


def test_as_fraction_literals():
    assert as_fraction("0.05") == F(1, 20)
    assert as_fraction("-3/2") == F(-3, 2)
    assert as_fraction(7) == 7
    assert as_fraction(0.1) == F(1, 10)
    for bad in (True, None, "x", "1/0", [1], float("nan"), "1e99999"):
        with pytest.raises(MalformedInput):
            as_fraction(bad)


def test_build_k3():
    m = build_model(K3, K3_SPEC)
    assert m.alpha == {"1": F(1, 3), "2": F(1, 3), "3": F(1, 3)}
    assert m.connected and not m.bipartite


def test_build_affine_at_eighth():
    m = build_model(QUASI, QUASI_SPEC, F(1, 8))
    assert [m.alpha[c] for c in "1234"] == [F(1, 8), F(1, 8), F(3, 8), F(3, 8)]


def test_build_path_is_flagged_bipartite():
    m = build_model(PATH, ArrivalSpec.fixed({"1": F(1, 2), "2": F(1, 2)}))
    assert m.bipartite


def test_build_errors():
    with pytest.raises(SelfLoop):
        MatchingGraph.from_edges("12", [("1", "1")])
    with pytest.raises(UnknownClass):
        MatchingGraph.from_edges("12", [("1", "3")])
    with pytest.raises(BadDistribution):
        ArrivalSpec.fixed({"1": F(1, 2), "2": F(1, 3)})
    with pytest.raises(BadDistribution):
        ArrivalSpec.fixed({"1": F(1), "2": F(0)})
    with pytest.raises(DeltaOutOfDomain):
        build_model(QUASI, QUASI_SPEC, F(1, 5))
    with pytest.raises(DeltaOutOfDomain):
        build_model(QUASI, QUASI_SPEC)
    with pytest.raises(DeltaOutOfDomain):
        build_model(K3, K3_SPEC, F(1, 8))
    with pytest.raises(UnknownClass):
        build_model(K3, ArrivalSpec.fixed({"1": F(1, 2), "4": F(1, 2)}))


def test_neighborhood():
    assert neighborhood(QUASI, {"3"}) == {"1", "2", "4"}
    assert neighborhood(QUASI, {"1", "2"}) == {"3", "4"}
    assert neighborhood(QUASI, set()) == frozenset()
    with pytest.raises(UnknownClass):
        neighborhood(QUASI, {"9"})


def test_independent_sets_examples():
    assert enumerate_independent_sets(QUASI) == [("1",), ("2",), ("3",), ("4",), ("1", "2")]
    assert enumerate_independent_sets(K4) == [("1",), ("2",), ("3",), ("4",)]
    assert enumerate_independent_sets(K3) == [("1",), ("2",), ("3",)]


def _brute_force_isets(g):
    out = set()
    for k in range(1, len(g.classes) + 1):
        for sub in combinations(g.classes, k):
            if all(not g.has_edge(u, v) for u, v in combinations(sub, 2)):
                out.add(sub)
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.floats(0, 1), st.integers(0, 10**6))
def test_independent_sets_match_brute_force(n, p, seed):
    g = random_graph(random.Random(seed), n, p)
    found = enumerate_independent_sets(g)
    assert len(found) == len(set(found))
    assert set(found) == _brute_force_isets(g)
    assert len(found) >= n


def test_stability_examples():
    # same arrivals on a domain wide enough to reach delta = 1/5
    wide = ArrivalSpec.affine(QUASI_SPEC.a, QUASI_SPEC.b, F(1, 5))
    rep = check_stability(build_model(QUASI, wide, F(1, 5)))
    assert not rep.stable
    assert (("4",), F(3, 5), F(2, 5)) in rep.violations
    assert check_stability(build_model(QUASI, QUASI_SPEC, F(1, 8))).stable
    path = check_stability(build_model(PATH, ArrivalSpec.fixed({"1": F(1, 2), "2": F(1, 2)})))
    assert not path.stable
    assert {v[0] for v in path.violations} == {("1",), ("2",)}
    with pytest.raises(Unstable):
        require_stable(build_model(PATH, ArrivalSpec.fixed({"1": F(1, 2), "2": F(1, 2)})))


def test_add_edge():
    assert add_edge(QUASI, "1", "2") == K4
    with pytest.raises(EdgeExists):
        add_edge(K3, "1", "2")
    with pytest.raises(SelfLoop):
        add_edge(QUASI, "1", "1")
    with pytest.raises(UnknownClass):
        add_edge(QUASI, "1", "9")
    bar = add_edge(SIX, "1", "2")
    assert bar.has_edge("1", "2") and len(bar.edges) == len(SIX.edges) + 1


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 7), st.integers(0, 10**6))
def test_add_edge_monotone(n, seed):
    rng = random.Random(seed)
    g = random_graph(rng, n, 0.5)
    missing = [(u, v) for u, v in combinations(g.classes, 2) if not g.has_edge(u, v)]
    if not missing:
        return
    u, v = rng.choice(missing)
    gb = add_edge(g, u, v)
    isets = set(enumerate_independent_sets(g))
    for s in enumerate_independent_sets(gb):
        assert s in isets
        assert neighborhood(g, s) <= neighborhood(gb, s)
    alpha = {c: F(1, n) for c in g.classes}
    m = build_model(g, ArrivalSpec.fixed(alpha))
    if check_stability(m).stable:
        assert check_stability(build_model(gb, ArrivalSpec.fixed(alpha))).stable


def test_relabel_commutes_with_enumeration():
    mapping = {"1": "d", "2": "c", "3": "b", "4": "a"}
    g = relabel_graph(QUASI, mapping)
    renamed = {frozenset(mapping[c] for c in s) for s in enumerate_independent_sets(QUASI)}
    assert {frozenset(s) for s in enumerate_independent_sets(g)} == renamed
    assert neighborhood(g, {"b"}) == {mapping[c] for c in neighborhood(QUASI, {"3"})}


def test_model_json_round_trip():
    obj = model_to_json(QUASI, QUASI_SPEC)
    g, s = parse_model(obj)
    assert g == QUASI and s == QUASI_SPEC


def test_parse_model_rejects_garbage():
    for bad in ([], {"nodes": "1"}, {"nodes": ["1"], "edges": [1], "arrivals": {}}, {"nodes": ["1"], "arrivals": {"1": {}}}):
        with pytest.raises(MalformedInput):
            parse_model(bad)


def test_parse_word():
    assert parse_word("121", K3) == ("1", "2", "1")
    assert parse_word("1,2", K3) == ("1", "2")
    assert parse_word("", K3) == ()
    with pytest.raises(UnknownClass):
        parse_word("14", K3)
