"""Symbolic analysis in the arrival parameter delta.

Arrival probabilities are affine, ``alpha_i = a_i + b_i * delta``, so every
stationary quantity is a rational function of delta. This module computes
those functions exactly, locates saturated independent sets, classifies an
edge addition by the saturated set's position relative to the new edge, and
isolates the delta-intervals on which the expectation gap has a fixed sign.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DeltaOutOfDomain, NotAffine, UnknownClass, UnstableOnDomain
from .model import (
    ArrivalSpec,
    MatchingGraph,
    add_edge,
    as_fraction,
    build_model,
    enumerate_independent_sets,
    neighborhood,
)
from .poly import Polynomial, RationalFunction, _positive_scale, isolate_real_roots
from .product_form import mean_items, subset_terms
from .report import format_decimal

ONE = RationalFunction.constant(1)
ZERO = RationalFunction.constant(0)


class Verdict(str, enum.Enum):
    PARADOX = "ParadoxPredicted"
    NO_PARADOX = "NoParadoxPredicted"
    OPEN = "OpenCase"
    VIOLATED = "AssumptionViolated"


# Position of an independent set relative to the added edge (i*, j*).
CONTAINS_ENDPOINT = "contains-endpoint"            # in I*
NEIGHBORS_BOTH = "neighbors-both-endpoints"         # in I-* minus all subsets of I* sets
EXTENDS_TO_ENDPOINT = "extends-to-endpoint"         # in I-* and a subset of some I* set


def symbolic_alpha(spec: ArrivalSpec) -> dict:
    return {c: RationalFunction.linear(spec.a[c], spec.b[c]) for c in spec.a}


def affine_gap(graph: MatchingGraph, spec: ArrivalSpec, iset) -> tuple:
    """``(constant, slope)`` of ``|alpha_E(I)| - |alpha_I|`` in delta."""
    nbrs = neighborhood(graph, iset)
    const = sum((spec.a[c] for c in nbrs), Fraction(0)) - sum((spec.a[c] for c in iset), Fraction(0))
    slope = sum((spec.b[c] for c in nbrs), Fraction(0)) - sum((spec.b[c] for c in iset), Fraction(0))
    return const, slope


def _positive_on_domain(const, slope, delta_max) -> bool:
    if delta_max is None:
        return const > 0
    # linear in delta, so checking the open interval's closure suffices
    return (const > 0 or (const == 0 and slope > 0)) and const + slope * delta_max >= 0 and (
        const > 0 or const + slope * delta_max > 0
    )


def domain_violations(graph: MatchingGraph, spec: ArrivalSpec) -> list:
    """Independent sets whose stability gap is not positive on (0, delta_max)."""
    bad = []
    for iset in enumerate_independent_sets(graph):
        const, slope = affine_gap(graph, spec, iset)
        if not _positive_on_domain(const, slope, spec.delta_max):
            bad.append(iset)
    return bad


def require_stable_on_domain(graph: MatchingGraph, spec: ArrivalSpec) -> None:
    if set(graph.classes) != spec.classes:
        raise UnknownClass("classes of graph and arrivals differ")
    bad = domain_violations(graph, spec)
    if bad:
        raise UnstableOnDomain(
            f"stability fails on the delta domain for independent set {{{','.join(bad[0])}}}", bad
        )


def _symbolic_terms(graph, spec, isets):
    return subset_terms(graph, symbolic_alpha(spec), isets, ZERO, ONE)


def _sample_points(spec: ArrivalSpec, k: int = 3) -> list:
    if not spec.is_affine:
        return []
    return [spec.delta_max * Fraction(j, k + 1) for j in range(1, k + 1)]


def symbolic_mean_items(graph: MatchingGraph, spec: ArrivalSpec, check_points: int = 3) -> RationalFunction:
    """``E[Q]`` as an exact rational function of delta.

    The result is evaluated against the numeric product form at
    ``check_points`` interior deltas before being returned.
    """
    require_stable_on_domain(graph, spec)
    isets = enumerate_independent_sets(graph)
    table = _symbolic_terms(graph, spec, isets)
    t_sum = ONE
    e_sum = ZERO
    for s in isets:
        t, e = table[frozenset(s)]
        t_sum = t_sum + t
        e_sum = e_sum + e
    result = e_sum / t_sum
    for d in _sample_points(spec, check_points):
        expected = mean_items(build_model(graph, spec, d))
        if result(d) != expected:
            raise ArithmeticError(f"symbolic mean disagrees with product form at delta={d}")
    return result


# ------------------------------------------------------------- saturation


@dataclass(frozen=True)
class SaturationReport:
    saturated_sets: tuple
    gaps: dict  # independent set -> (constant, slope)
    positive_constants: bool
    stable_on_domain: bool

    @property
    def assumption_holds(self) -> bool:
        return len(self.saturated_sets) == 1 and self.positive_constants and self.stable_on_domain


def find_saturated_sets(graph: MatchingGraph, spec: ArrivalSpec) -> SaturationReport:
    isets = enumerate_independent_sets(graph)
    gaps = {s: affine_gap(graph, spec, s) for s in isets}
    saturated = tuple(s for s in isets if gaps[s][0] == 0)
    return SaturationReport(
        saturated_sets=saturated,
        gaps=gaps,
        positive_constants=all(v > 0 for v in spec.a.values()),
        stable_on_domain=not domain_violations(graph, spec),
    )


def set_category(graph: MatchingGraph, iset, i_star, j_star) -> str:
    isets = enumerate_independent_sets(graph)
    members = set(iset)
    if i_star in members or j_star in members:
        return CONTAINS_ENDPOINT
    endpoint_sets = [set(s) for s in isets if i_star in s or j_star in s]
    if any(members <= s for s in endpoint_sets):
        return EXTENDS_TO_ENDPOINT
    return NEIGHBORS_BOTH


_CATEGORY_VERDICT = {
    CONTAINS_ENDPOINT: Verdict.NO_PARADOX,
    NEIGHBORS_BOTH: Verdict.PARADOX,
    EXTENDS_TO_ENDPOINT: Verdict.OPEN,
}


@dataclass(frozen=True)
class ParadoxClassification:
    verdict: Verdict
    witness: tuple | None
    category: str | None
    saturated: tuple
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "witness": list(self.witness) if self.witness is not None else None,
            "category": self.category,
            "saturated": [list(s) for s in self.saturated],
            "reason": self.reason,
        }


def classify_edge_addition(
    graph: MatchingGraph, spec: ArrivalSpec, i_star, j_star, allow_same_category: bool = False
) -> ParadoxClassification:
    """Predict the small-delta sign of ``E[Qbar] - E[Q]`` from saturation.

    With exactly one saturated set the verdict follows from its category.
    Several saturated sets are ``AssumptionViolated`` unless
    ``allow_same_category`` is set and they all share one category.
    """
    i_star, j_star = str(i_star), str(j_star)
    add_edge(graph, i_star, j_star)  # raises EdgeExists / SelfLoop / UnknownClass
    report = find_saturated_sets(graph, spec)
    sat = report.saturated_sets

    def violated(reason, witness=None, category=None):
        return ParadoxClassification(Verdict.VIOLATED, witness, category, sat, reason)

    if not spec.is_affine:
        return violated("arrivals are not parametrized by delta")
    if not report.stable_on_domain:
        return violated("stability fails somewhere on the delta domain")
    if not report.positive_constants:
        return violated("some arrival constant a_i is not positive")
    if not sat:
        return violated("no saturated independent set")
    categories = [set_category(graph, s, i_star, j_star) for s in sat]
    if len(sat) > 1:
        if not allow_same_category:
            return violated(f"{len(sat)} saturated independent sets")
        if len(set(categories)) > 1:
            return violated("saturated sets fall in different categories")
        return ParadoxClassification(
            _CATEGORY_VERDICT[categories[0]], sat[0], categories[0], sat,
            "same-category extension over several saturated sets",
        )
    return ParadoxClassification(_CATEGORY_VERDICT[categories[0]], sat[0], categories[0], sat)


# ----------------------------------------------------- gap decomposition


@dataclass(frozen=True)
class GapDecomposition:
    a1: RationalFunction
    a2: RationalFunction
    b1: RationalFunction
    b2: RationalFunction
    c1: RationalFunction
    c2: RationalFunction
    extras: dict = field(default_factory=dict, repr=False, compare=False)

    def combined(self) -> RationalFunction:
        return self.a1 * self.a2 - self.b1 * self.b2 + self.c1 * self.c2

    def sign_at(self, delta) -> int:
        v = self.combined()(as_fraction(delta))
        return (v > 0) - (v < 0)


def _sum(values):
    total = ZERO
    for v in values:
        total = total + v
    return total


def gap_decomposition(graph: MatchingGraph, spec: ArrivalSpec, i_star, j_star) -> GapDecomposition:
    """The six factors with ``A1*A2 - B1*B2 + C1*C2`` having the sign of
    ``E[Qbar] - E[Q]`` wherever both means are finite."""
    i_star, j_star = str(i_star), str(j_star)
    gbar = add_edge(graph, i_star, j_star)
    require_stable_on_domain(graph, spec)
    isets = enumerate_independent_sets(graph)
    isets_bar = enumerate_independent_sets(gbar)
    terms = _symbolic_terms(graph, spec, isets)
    terms_bar = _symbolic_terms(gbar, spec, isets_bar)

    def star(s):
        return i_star in s or j_star in s

    star_sets = [s for s in isets if star(s)]
    other_sets = [s for s in isets if not star(s)]
    star_bar = [s for s in isets_bar if star(s)]

    def T(s):
        return terms[frozenset(s)][0]

    def E(s):
        return terms[frozenset(s)][1]

    def Tb(s):
        return terms_bar[frozenset(s)][0]

    def Eb(s):
        return terms_bar[frozenset(s)][1]

    return GapDecomposition(
        a1=_sum(Eb(s) for s in star_bar),
        a2=ONE + _sum(T(s) for s in isets),
        b1=_sum(E(s) for s in star_sets),
        b2=ONE + _sum(Tb(s) for s in isets_bar),
        c1=_sum(E(s) for s in other_sets),
        c2=_sum(T(s) for s in star_sets) - _sum(Tb(s) for s in star_bar),
        extras={
            "e_total": _sum(E(s) for s in isets),
            "e_bar_total": _sum(Eb(s) for s in isets_bar),
            "t_total": _sum(T(s) for s in isets),
            "t_bar_total": _sum(Tb(s) for s in isets_bar),
        },
    )


def cleared_gap_numerator(graph: MatchingGraph, spec: ArrivalSpec, i_star, j_star) -> RationalFunction:
    """``A - B + C`` multiplied by the common denominator built from the
    stability gaps: cubes over subsets of endpoint sets that avoid the
    endpoints, squares over endpoint sets and the remaining sets, squares of
    the post-edge gaps over post-edge endpoint sets.

    The product is positive on the delta domain, so the result has the sign
    of the expectation gap; its value at ``delta = 0`` is the constant term
    the saturation argument is about.
    """
    i_star, j_star = str(i_star), str(j_star)
    gbar = add_edge(graph, i_star, j_star)
    dec = gap_decomposition(graph, spec, i_star, j_star)
    isets = enumerate_independent_sets(graph)
    isets_bar = enumerate_independent_sets(gbar)
    alpha = symbolic_alpha(spec)

    def gap(g, s):
        return _sum(alpha[c] for c in neighborhood(g, s)) - _sum(alpha[c] for c in s)

    star = [set(s) for s in isets if i_star in s or j_star in s]
    star_plus = {s for s in isets if any(set(s) <= t for t in star)}
    den = ONE
    for s in isets:
        is_star = i_star in s or j_star in s
        if s in star_plus and not is_star:
            power = 3
        else:
            power = 2
        g = gap(graph, s)
        for _ in range(power):
            den = den * g
    for s in isets_bar:
        if i_star in s or j_star in s:
            g = gap(gbar, s)
            den = den * g * g
    return dec.combined() * den


def symbolic_gap(graph: MatchingGraph, spec: ArrivalSpec, i_star, j_star) -> RationalFunction:
    gbar = add_edge(graph, str(i_star), str(j_star))
    return symbolic_mean_items(gbar, spec) - symbolic_mean_items(graph, spec)


# ------------------------------------------------------- region isolation


@dataclass(frozen=True)
class Region:
    lo: Fraction
    hi: Fraction
    sign: int

    @property
    def label(self) -> str:
        return {1: "+", -1: "-", 0: "0"}[self.sign]

    def to_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi), "sign": self.label}


@dataclass(frozen=True)
class RootBracket:
    lo: Fraction
    hi: Fraction
    sign_change: bool

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def to_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi), "approx": format_decimal(self.midpoint), "sign_change": self.sign_change}


@dataclass(frozen=True)
class RegionAnalysis:
    regions: tuple
    roots: tuple
    numerator: Polynomial
    gap: RationalFunction

    @property
    def sign_change_roots(self) -> tuple:
        return tuple(r for r in self.roots if r.sign_change)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def isolate_paradox_regions(
    graph: MatchingGraph,
    spec: ArrivalSpec,
    i_star,
    j_star,
    domain=None,
    width=Fraction(1, 10**6),
) -> RegionAnalysis:
    """Split the delta domain into open intervals of constant gap sign.

    Roots of the integer-cleared gap numerator are isolated with Sturm
    sequences and bisected to ``width``; the regions are the open intervals
    between consecutive root brackets, each labelled by the exact sign of
    the gap at its midpoint.
    """
    if not spec.is_affine:
        raise NotAffine("region isolation needs a delta-parametrized specification")
    lo, hi = (Fraction(0), spec.delta_max) if domain is None else map(as_fraction, domain)
    if not (0 <= lo < hi <= spec.delta_max):
        raise DeltaOutOfDomain(f"domain ({lo}, {hi}) not inside (0, {spec.delta_max}]")
    width = as_fraction(width)
    gap = symbolic_gap(graph, spec, i_star, j_star)
    numerator = _positive_scale(gap.num) if not gap.num.is_zero() else gap.num
    if gap.den.degree > 0 and isolate_real_roots(gap.den, lo, hi, width):
        raise UnstableOnDomain("expectation gap has a pole inside the domain")
    if numerator.is_zero():
        return RegionAnalysis((Region(lo, hi, 0),), (), numerator, gap)
    brackets = isolate_real_roots(numerator, lo, hi, width)
    edges = [lo]
    for a, b in brackets:
        edges.extend([a, b])
    edges.append(hi)
    regions = []
    for k in range(0, len(edges), 2):
        a, b = edges[k], edges[k + 1]
        if a < b:
            regions.append(Region(a, b, _sign(gap((a + b) / 2))))
    roots = []
    for k, (a, b) in enumerate(brackets):
        left = _sign(gap((edges[2 * k] + a) / 2)) if edges[2 * k] < a else None
        right = _sign(gap((b + edges[2 * k + 3]) / 2)) if b < edges[2 * k + 3] else None
        roots.append(RootBracket(a, b, left is not None and right is not None and left != right))
    return RegionAnalysis(tuple(regions), tuple(roots), numerator, gap)


def small_delta_sign(gap: RationalFunction) -> int:
    """Sign of the gap as delta tends to zero from above."""
    def low(p):
        for c in p.coeffs:
            if c:
                return _sign(c)
        return 0

    return low(gap.num) * low(gap.den)
