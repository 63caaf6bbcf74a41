"""Twin classes: splitting one class into two with the same neighborhood,
merging such a pair back, and growing paradox instances by splitting.

Splitting ``x`` into ``y`` and ``z`` with ``alpha_y + alpha_z = alpha_x``
leaves the chain lumpable onto the original one (exchange ``y`` and ``z``
freely inside a word), so the mean word length does not move.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import (
    Adjacent,
    BadDistribution,
    BadSplit,
    DeltaOutOfDomain,
    InvalidWord,
    LabelCollision,
    ModelsUnrelated,
    NeighborhoodMismatch,
    NoParadoxAtDelta,
    StateSpaceTooLarge,
    TargetIsEndpoint,
    UnknownClass,
)
from .model import ArrivalSpec, MatchingGraph, Model, as_fraction, build_model, require_stable
from .oracle import enumerate_words
from .paradox import expectation_gap
from .product_form import mean_items, normalization_constant, word_probability

DEFAULT_WORD_CAP = 100_000


def _share(value):
    """A split share: a fraction, or an ``(a, b)`` pair meaning ``a + b*delta``."""
    if isinstance(value, (tuple, list)):
        if len(value) != 2:
            raise BadSplit(f"affine share must be an (a, b) pair, got {value!r}")
        return (as_fraction(value[0]), as_fraction(value[1]))
    return as_fraction(value)


@dataclass(frozen=True)
class DecompositionPlan:
    """Split ``target`` into fresh classes ``y`` and ``z``.

    Shares are either exact values (they must add up to the target's
    arrival probability) or ``(a, b)`` affine pairs. For an affine
    specification, plain values are read as a ratio ``beta_y : beta_z``
    applied to the target's affine arrival probability.
    """

    target: str
    y: str
    z: str
    beta_y: object
    beta_z: object

    def __post_init__(self):
        for name in ("target", "y", "z"):
            object.__setattr__(self, name, str(getattr(self, name)))
        object.__setattr__(self, "beta_y", _share(self.beta_y))
        object.__setattr__(self, "beta_z", _share(self.beta_z))
        if self.y == self.z:
            raise LabelCollision(f"split labels coincide: {self.y!r}")

    @property
    def affine_shares(self) -> bool:
        return isinstance(self.beta_y, tuple) or isinstance(self.beta_z, tuple)


def _check_labels(graph: MatchingGraph, plan: DecompositionPlan):
    if plan.target not in graph.classes:
        raise UnknownClass(f"unknown class {plan.target!r}")
    for label in (plan.y, plan.z):
        if label in graph.classes and label != plan.target:
            raise LabelCollision(f"label {label!r} already names a class")


def split_graph(graph: MatchingGraph, x, y, z) -> MatchingGraph:
    """``x`` replaced in place by twins ``y`` and ``z``."""
    nbrs = graph.neighbors(x)
    classes = []
    for c in graph.classes:
        classes.extend((y, z) if c == x else (c,))
    edges = {e for e in graph.edges if x not in e}
    edges |= {frozenset((t, n)) for t in (y, z) for n in nbrs}
    return MatchingGraph(tuple(classes), frozenset(edges))


def _split_arrivals(spec: ArrivalSpec, plan: DecompositionPlan) -> tuple:
    """Affine pairs ``(a, b)`` for ``y`` and ``z``."""
    x = plan.target
    ax, bx = spec.a[x], spec.b[x]
    by, bz = plan.beta_y, plan.beta_z
    if plan.affine_shares:
        py = by if isinstance(by, tuple) else (by, Fraction(0))
        pz = bz if isinstance(bz, tuple) else (bz, Fraction(0))
        if py[0] + pz[0] != ax or py[1] + pz[1] != bx:
            raise BadSplit(f"shares do not add up to the arrival probability of {x!r}")
        return py, pz
    if by <= 0 or bz <= 0:
        raise BadSplit("split shares must be positive")
    if not spec.is_affine:
        if by + bz != ax:
            raise BadSplit(f"shares add up to {by + bz}, not {ax}")
        return (by, Fraction(0)), (bz, Fraction(0))
    r = by / (by + bz)
    return (r * ax, r * bx), ((1 - r) * ax, (1 - r) * bx)


def decompose_spec(graph: MatchingGraph, spec: ArrivalSpec, plan: DecompositionPlan) -> tuple:
    """``(graph, spec)`` with ``plan.target`` split into twins."""
    _check_labels(graph, plan)
    (ay, by), (az, bz) = _split_arrivals(spec, plan)
    a = {k: v for k, v in spec.a.items() if k != plan.target}
    b = {k: v for k, v in spec.b.items() if k != plan.target}
    a.update({plan.y: ay, plan.z: az})
    b.update({plan.y: by, plan.z: bz})
    try:
        new_spec = ArrivalSpec(a, b, spec.delta_max, spec.alpha0)
    except BadDistribution as exc:
        raise BadSplit(str(exc)) from None
    return split_graph(graph, plan.target, plan.y, plan.z), new_spec


def decompose(model: Model, plan: DecompositionPlan) -> Model:
    """Split a class of a concrete model.

    With plain shares on a model built from an affine specification the
    shares must add up to the target's probability at the model's delta,
    and the result carries fixed arrivals.
    """
    graph, spec = model.graph, model.spec
    if spec.is_affine and not plan.affine_shares:
        if plan.beta_y + plan.beta_z != model.alpha[plan.target]:
            raise BadSplit(f"shares add up to {plan.beta_y + plan.beta_z}, not {model.alpha[plan.target]}")
        spec = ArrivalSpec.fixed(model.alpha, spec.alpha0)
        g2, s2 = decompose_spec(graph, spec, plan)
        return build_model(g2, s2)
    g2, s2 = decompose_spec(graph, spec, plan)
    return build_model(g2, s2, model.delta)


def _check_twins(graph: MatchingGraph, y, z, x):
    for c in (y, z):
        if c not in graph.classes:
            raise UnknownClass(f"unknown class {c!r}")
    if y == z:
        raise NeighborhoodMismatch("cannot merge a class with itself")
    # compare neighborhoods outside the pair first, so Adjacent means
    # "twins except for the edge between them"
    if graph.neighbors(y) - {z} != graph.neighbors(z) - {y}:
        raise NeighborhoodMismatch(f"classes {y!r} and {z!r} have different neighborhoods")
    if graph.has_edge(y, z):
        raise Adjacent(f"classes {y!r} and {z!r} are compatible")
    if x in graph.classes and x not in (y, z):
        raise LabelCollision(f"label {x!r} already names a class")


def merge_graph(graph: MatchingGraph, y, z, x) -> MatchingGraph:
    nbrs = graph.neighbors(y)
    classes = tuple(x if c == y else c for c in graph.classes if c != z)
    edges = {e for e in graph.edges if y not in e and z not in e}
    edges |= {frozenset((x, n)) for n in nbrs}
    return MatchingGraph(classes, frozenset(edges))


def aggregate_spec(graph: MatchingGraph, spec: ArrivalSpec, y, z, x) -> tuple:
    y, z, x = str(y), str(z), str(x)
    _check_twins(graph, y, z, x)
    a = {k: v for k, v in spec.a.items() if k not in (y, z)}
    b = {k: v for k, v in spec.b.items() if k not in (y, z)}
    a[x] = spec.a[y] + spec.a[z]
    b[x] = spec.b[y] + spec.b[z]
    return merge_graph(graph, y, z, x), ArrivalSpec(a, b, spec.delta_max, spec.alpha0)


def aggregate(model: Model, y, z, x) -> Model:
    """Merge twin classes ``y`` and ``z`` into ``x`` with ``alpha_x = alpha_y + alpha_z``."""
    graph, spec = aggregate_spec(model.graph, model.spec, y, z, x)
    return build_model(graph, spec, model.delta)


def macro_state(word, plan: DecompositionPlan, graph: MatchingGraph | None = None) -> tuple:
    """The aggregated word and the number of words it stands for."""
    word = tuple(map(str, word))
    if graph is not None:
        for c in word:
            graph.neighbors(c)
        if not graph.is_independent(set(word)):
            raise InvalidWord(f"word {word!r} contains compatible letters")
    twins = (plan.y, plan.z)
    image = tuple(plan.target if c in twins else c for c in word)
    return image, 2 ** sum(c in twins for c in word)


def expand_macro_state(word, x, y, z):
    """Every word whose image under ``y, z -> x`` is ``word``."""
    slots = [k for k, c in enumerate(word) if c == x]
    for choice in product((y, z), repeat=len(slots)):
        w = list(word)
        for k, c in zip(slots, choice):
            w[k] = c
        yield tuple(w)


@dataclass(frozen=True)
class AggregationReport:
    split: tuple  # (x, y, z)
    mean_decomposed: Fraction
    mean_aggregated: Fraction
    max_len: int
    macro_states_checked: int
    mismatches: tuple

    @property
    def means_equal(self) -> bool:
        return self.mean_decomposed == self.mean_aggregated

    @property
    def passed(self) -> bool:
        return self.means_equal and not self.mismatches


def relate_models(decomposed: Model, aggregated: Model) -> tuple:
    """Find ``(x, y, z)`` such that merging ``y, z`` into ``x`` maps one
    model onto the other; ``ModelsUnrelated`` if there is none."""
    dec, agg = set(decomposed.classes), set(aggregated.classes)
    gone, new = dec - agg, agg - dec
    candidates = []
    if len(gone) == 2 and len(new) == 1:
        y, z = sorted(gone, key=decomposed.graph.index)
        candidates.append((new.pop(), y, z))
    elif len(gone) == 1 and not new:
        (z,) = gone
        candidates += [(y, y, z) for y in decomposed.classes if y != z]
    for x, y, z in candidates:
        try:
            merged = aggregate(decomposed, y, z, x)
        except (NeighborhoodMismatch, Adjacent, LabelCollision):
            continue
        if merged.graph.edges == aggregated.graph.edges and merged.alpha == aggregated.alpha:
            return x, y, z
    raise ModelsUnrelated("the models are not related by merging one pair of twin classes")


def verify_aggregation_consistency(
    decomposed: Model, aggregated: Model, max_len: int, *, word_cap: int = DEFAULT_WORD_CAP
) -> AggregationReport:
    """Check equal means and, for every aggregated word of length at most
    ``max_len``, that the probabilities of the words it stands for add up
    to its own probability. All comparisons are exact.

    ``max_len`` is lowered until the decomposed words fit under
    ``word_cap``; the report records the length actually used.
    """
    x, y, z = relate_models(decomposed, aggregated)
    require_stable(decomposed)
    require_stable(aggregated)
    length = max_len
    while True:
        try:
            enumerate_words(decomposed.graph, length, word_cap)
            break
        except StateSpaceTooLarge:
            length -= 1
            if length < 0:
                raise
    pi0_d = normalization_constant(decomposed)
    pi0_a = normalization_constant(aggregated)
    mismatches = []
    words = enumerate_words(aggregated.graph, length)
    for v in words:
        total = sum(
            (word_probability(decomposed, w, pi0_d) for w in expand_macro_state(v, x, y, z)),
            Fraction(0),
        )
        target = word_probability(aggregated, v, pi0_a)
        if total != target:
            mismatches.append((v, total, target))
    return AggregationReport(
        (x, y, z),
        mean_items(decomposed),
        mean_items(aggregated),
        length,
        len(words),
        tuple(mismatches),
    )


@dataclass(frozen=True)
class Extension:
    graph: MatchingGraph
    spec: ArrivalSpec
    edge: tuple
    delta: Fraction | None
    gap_before: Fraction
    gap_after: Fraction


def extend_preserving_paradox(graph, spec, i_star, j_star, plan: DecompositionPlan, delta=None) -> Extension:
    """Split a class away from the added edge; the gap at ``delta`` is unchanged.

    The original instance must show a paradox (positive gap) at ``delta``.
    """
    i_star, j_star = str(i_star), str(j_star)
    if plan.target in (i_star, j_star):
        raise TargetIsEndpoint(f"class {plan.target!r} is an endpoint of the added edge")
    if spec.is_affine and delta is None:
        raise DeltaOutOfDomain("affine arrivals need a delta value")
    before = expectation_gap(graph, spec, i_star, j_star, delta)
    if before.gap <= 0:
        raise NoParadoxAtDelta(f"gap {before.gap} at delta={delta} is not positive")
    g2, s2 = decompose_spec(graph, spec, plan)
    after = expectation_gap(g2, s2, i_star, j_star, delta)
    return Extension(g2, s2, (i_star, j_star), before.delta, before.gap, after.gap)
