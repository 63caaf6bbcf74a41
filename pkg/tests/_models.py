"""Shared instances and random model generators for the test suite."""

import random
from fractions import Fraction as F
from itertools import combinations

from matchbraess.model import ArrivalSpec, MatchingGraph, build_model, check_stability

QC_EDGES = [("4", "2"), ("1", "3"), ("2", "3"), ("3", "4"), ("4", "1")]

# K4 minus the edge {1,2}; classes 1 and 2 are twins
QUASI = MatchingGraph.from_edges("1234", QC_EDGES)
K4 = MatchingGraph.from_edges("1234", QC_EDGES + [("1", "2")])
K3 = MatchingGraph.from_edges("123", [("1", "2"), ("2", "3"), ("1", "3")])
PATH = MatchingGraph.from_edges("12", [("1", "2")])

QUASI_SPEC = ArrivalSpec.affine(
    {"1": F(1, 4), "2": F(1, 4), "3": F(1, 2), "4": 0},
    {"1": -1, "2": -1, "3": -1, "4": 3},
    F(1, 6),
)
K3_SPEC = ArrivalSpec.fixed({"1": F(1, 3), "2": F(1, 3), "3": F(1, 3)})

# saturation of {3} only: the added edge joins two neighbors of 3
PARADOX_SPEC = ArrivalSpec.affine(
    {"1": F(1, 5), "2": F(1, 5), "3": F(1, 2), "4": F(1, 10)},
    {"1": 1, "2": 1, "3": -3, "4": 1},
    F(1, 100),
)
# saturation of {1,2} only: the saturated set holds both endpoints
NO_PARADOX_SPEC = ArrivalSpec.affine(
    {"1": F(1, 4), "2": F(1, 4), "3": F(3, 20), "4": F(7, 20)},
    {"1": -1, "2": -1, "3": 1, "4": 1},
    F(1, 100),
)

SIX = MatchingGraph.from_edges(
    "123456",
    QC_EDGES + [("5", "1"), ("5", "4"), ("6", "1"), ("6", "2"), ("6", "3"), ("6", "4")],
)
SIX_SPEC = ArrivalSpec.affine(
    {"1": F(1, 10), "2": F(1, 10), "3": F(1, 10), "4": F(1, 4), "5": F(7, 20), "6": F(1, 10)},
    {"1": 1, "2": 1, "3": 1, "4": 1, "5": -5, "6": 1},
    F(1, 20),
)

# K3 on {1,2,3} plus x joined to 2 and 3
TWIN_TARGET = MatchingGraph.from_edges(["1", "2", "3", "x"], [("1", "2"), ("1", "3"), ("2", "3"), ("2", "x"), ("3", "x")])
TWIN_TARGET_SPEC = ArrivalSpec.fixed({"1": F(1, 8), "2": F(5, 16), "3": F(5, 16), "x": F(1, 4)})


def quasi_model(delta):
    return build_model(QUASI, QUASI_SPEC, delta)


def k3_model():
    return build_model(K3, K3_SPEC)


def random_graph(rng, n, p):
    labels = [str(k) for k in range(1, n + 1)]
    edges = [(u, v) for u, v in combinations(labels, 2) if rng.random() < p]
    return MatchingGraph.from_edges(labels, edges)


def random_alpha(rng, classes, top=9):
    w = [rng.randint(1, top) for _ in classes]
    s = sum(w)
    return {c: F(x, s) for c, x in zip(classes, w)}


def random_stable_models(seed, count, n_min=3, n_max=7, p=0.6, alpha0=0):
    """``count`` stable models with fixed arrivals, drawn reproducibly."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        g = random_graph(rng, rng.randint(n_min, n_max), p)
        if not g.connected or g.bipartite:
            continue
        spec = ArrivalSpec.fixed(random_alpha(rng, g.classes), alpha0)
        m = build_model(g, spec)
        if check_stability(m).stable:
            out.append(m)
    return out


def compositions(n, denom):
    """Positive fractions ``k_i / denom`` summing to one."""
    if n == 1:
        yield (F(1),)
        return
    for k in range(1, denom - n + 2):
        for rest in compositions(n - 1, denom - k):
            yield (F(k, denom),) + tuple(r * F(denom - k, denom) for r in rest)


def connected_graphs(n):
    labels = [str(k) for k in range(1, n + 1)]
    pairs = list(combinations(labels, 2))
    for mask in range(1 << len(pairs)):
        g = MatchingGraph.from_edges(labels, [p for k, p in enumerate(pairs) if mask >> k & 1])
        if g.connected:
            yield g


def small_paradox_candidates(max_n=3, denom=12):
    """Stable (graph, arrivals, edge) triples on at most ``max_n`` classes
    where adding the edge raises the mean. Returns the list found and the
    number of stable instances that had any edge to add."""
    from matchbraess.paradox import expectation_gap

    found, admissible = [], 0
    for n in range(1, max_n + 1):
        for g in connected_graphs(n):
            missing = [(u, v) for u, v in combinations(g.classes, 2) if not g.has_edge(u, v)]
            for alpha in compositions(n, denom):
                spec = ArrivalSpec.fixed(dict(zip(g.classes, alpha)))
                if not check_stability(build_model(g, spec)).stable or not missing:
                    continue
                admissible += 1
                for u, v in missing:
                    if expectation_gap(g, spec, u, v).gap > 0:
                        found.append((g, spec, (u, v)))
    return found, admissible
