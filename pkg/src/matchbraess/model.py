"""Compatibility graphs, arrival specifications and validated models.

All arithmetic is exact: arrival probabilities are ``fractions.Fraction``
and an affine specification stores ``alpha_i(delta) = a_i + b_i * delta``.
A fixed specification is the special case ``b_i = 0`` with no delta domain.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import (
    BadDistribution,
    DeltaOutOfDomain,
    EdgeExists,
    MalformedInput,
    SelfLoop,
    Unstable,
    UnknownClass,
)

Word = tuple  # ordered tuple of class labels
IndependentSet = tuple  # class labels in graph order


def as_fraction(value) -> Fraction:
    """Parse an exact rational from ``Fraction``, ``int`` or a string.

    Strings may be ``"p/q"``, integers or decimals (``"0.05"``), the latter
    converted by literal place value. Floats are read through ``repr`` so
    ``0.1`` means one tenth, not the nearest binary double.
    """
    if isinstance(value, bool):
        raise MalformedInput(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        value = repr(value)
    if isinstance(value, str):
        text = value.strip()
        # keep "1e999999999" from expanding into a billion-digit integer
        m = _EXPONENT.search(text)
        if len(text) > MAX_LITERAL or (m and abs(int(m.group(1))) > MAX_LITERAL):
            raise MalformedInput(f"rational literal too large: {text[:40]!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise MalformedInput(f"not a rational: {value!r}") from exc
    raise MalformedInput(f"not a rational: {value!r}")


MAX_LITERAL = 4000
_EXPONENT = re.compile(r"[eE]([+-]?\d+)\s*$")


@dataclass(frozen=True)
class MatchingGraph:
    """Simple undirected compatibility graph over item classes."""

    classes: tuple
    edges: frozenset
    _adj: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        classes = tuple(str(c) for c in self.classes)
        if len(set(classes)) != len(classes):
            raise MalformedInput("duplicate class label")
        if any(not c for c in classes):
            raise MalformedInput("empty class label")
        known = set(classes)
        adj = {c: set() for c in classes}
        edges = set()
        for e in self.edges:
            pair = tuple(str(x) for x in e)
            if len(pair) == 1 or (len(pair) == 2 and pair[0] == pair[1]):
                raise SelfLoop(f"self-loop on class {pair[0]!r}")
            if len(pair) != 2:
                raise MalformedInput(f"edge must have two endpoints: {e!r}")
            for x in pair:
                if x not in known:
                    raise UnknownClass(f"edge references unknown class {x!r}")
            adj[pair[0]].add(pair[1])
            adj[pair[1]].add(pair[0])
            edges.add(frozenset(pair))
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "edges", frozenset(edges))
        object.__setattr__(self, "_adj", {c: frozenset(v) for c, v in adj.items()})

    @classmethod
    def from_edges(cls, classes: Iterable, edges: Iterable) -> "MatchingGraph":
        return cls(tuple(classes), frozenset(frozenset(e) for e in _checked_pairs(edges)))

    def __hash__(self):
        return hash((self.classes, self.edges))

    def neighbors(self, v) -> frozenset:
        try:
            return self._adj[v]
        except KeyError:
            raise UnknownClass(f"unknown class {v!r}") from None

    def has_edge(self, u, v) -> bool:
        return v in self.neighbors(u)

    def index(self, v) -> int:
        try:
            return self.classes.index(v)
        except ValueError:
            raise UnknownClass(f"unknown class {v!r}") from None

    def canonical(self, members: Iterable) -> tuple:
        members = set(members)
        for m in members:
            self.neighbors(m)
        return tuple(c for c in self.classes if c in members)

    def is_independent(self, members: Iterable) -> bool:
        members = list(members)
        return all(not self.has_edge(u, v) for u, v in combinations(members, 2))

    @property
    def connected(self) -> bool:
        if not self.classes:
            return False
        seen = {self.classes[0]}
        stack = [self.classes[0]]
        while stack:
            for nb in self._adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(self.classes)

    @property
    def bipartite(self) -> bool:
        color = {}
        for root in self.classes:
            if root in color:
                continue
            color[root] = 0
            stack = [root]
            while stack:
                u = stack.pop()
                for v in self._adj[u]:
                    if v not in color:
                        color[v] = 1 - color[u]
                        stack.append(v)
                    elif color[v] == color[u]:
                        return False
        return True

    def edge_list(self) -> list:
        out = [tuple(self.canonical(e)) for e in self.edges]
        return sorted(out, key=lambda p: (self.index(p[0]), self.index(p[1])))


def _checked_pairs(edges):
    for e in edges:
        if isinstance(e, (str, bytes)) or len(e) != 2:
            raise MalformedInput(f"edge must be a pair: {e!r}")
        yield tuple(str(x) for x in e)


def neighborhood(graph: MatchingGraph, members: Iterable) -> frozenset:
    out = set()
    for v in members:
        out |= graph.neighbors(v)
    return frozenset(out)


def enumerate_independent_sets(graph: MatchingGraph) -> list:
    """All nonempty independent sets, canonical order, sorted by size.

    Branches on inclusion/exclusion of each class in graph order, pruning
    once a chosen class conflicts. Exponential in the worst case, which is
    fine for the tens-of-classes graphs this package targets.
    """
    classes = graph.classes
    n = len(classes)
    nbr_mask = [0] * n
    for i, c in enumerate(classes):
        for nb in graph.neighbors(c):
            nbr_mask[i] |= 1 << classes.index(nb)

    found = []

    def grow(start, chosen, forbidden):
        for k in range(start, n):
            if forbidden >> k & 1:
                continue
            mask = chosen | (1 << k)
            found.append(mask)
            grow(k + 1, mask, forbidden | nbr_mask[k])

    grow(0, 0, 0)
    sets = [tuple(classes[k] for k in range(n) if m >> k & 1) for m in found]
    return sorted(sets, key=lambda s: (len(s), [classes.index(c) for c in s]))


def add_edge(graph: MatchingGraph, u, v) -> MatchingGraph:
    u, v = str(u), str(v)
    graph.neighbors(u)
    graph.neighbors(v)
    if u == v:
        raise SelfLoop(f"self-loop on class {u!r}")
    if graph.has_edge(u, v):
        raise EdgeExists(f"edge ({u},{v}) already present")
    return MatchingGraph(graph.classes, graph.edges | {frozenset((u, v))})


def relabel_graph(graph: MatchingGraph, mapping: Mapping) -> MatchingGraph:
    return MatchingGraph(
        tuple(mapping[c] for c in graph.classes),
        frozenset(frozenset(mapping[x] for x in e) for e in graph.edges),
    )


@dataclass(frozen=True)
class ArrivalSpec:
    """Per-class arrival probabilities ``a_i + b_i * delta``.

    ``delta_max`` is ``None`` for a fixed specification (all ``b_i`` zero).
    ``alpha0`` is the per-slot idle probability; it only adds self-loops and
    never enters a stationary computation.
    """

    a: Mapping
    b: Mapping
    delta_max: Fraction | None = None
    alpha0: Fraction = Fraction(0)

    def __post_init__(self):
        a = {str(k): as_fraction(v) for k, v in self.a.items()}
        b = {str(k): as_fraction(self.b.get(k, 0)) for k in self.a}
        extra = set(map(str, self.b)) - set(a)
        if extra:
            raise UnknownClass(f"slope for unknown class {sorted(extra)[0]!r}")
        dmax = None if self.delta_max is None else as_fraction(self.delta_max)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "delta_max", dmax)
        object.__setattr__(self, "alpha0", as_fraction(self.alpha0))
        self._validate()

    @classmethod
    def fixed(cls, alphas: Mapping, alpha0=0) -> "ArrivalSpec":
        return cls(dict(alphas), {}, None, alpha0)

    @classmethod
    def affine(cls, a: Mapping, b: Mapping, delta_max, alpha0=0) -> "ArrivalSpec":
        return cls(dict(a), dict(b), delta_max, alpha0)

    @property
    def is_affine(self) -> bool:
        return self.delta_max is not None

    @property
    def classes(self) -> frozenset:
        return frozenset(self.a)

    def _validate(self):
        if not 0 <= self.alpha0 < 1:
            raise BadDistribution("alpha0 must lie in [0, 1)")
        if not self.a:
            raise BadDistribution("no arrival classes")
        if sum(self.a.values()) != 1:
            raise BadDistribution(f"arrival constants sum to {sum(self.a.values())}, not 1")
        if not self.is_affine:
            if any(self.b.values()):
                raise BadDistribution("fixed specification with nonzero slope; give delta_max")
            bad = [k for k, v in self.a.items() if v <= 0]
            if bad:
                raise BadDistribution(f"nonpositive arrival probability for class {bad[0]!r}")
            return
        if self.delta_max <= 0:
            raise BadDistribution("delta_max must be positive")
        if sum(self.b.values()) != 0:
            raise BadDistribution("arrival slopes must sum to 0")
        for k in self.a:
            a, b = self.a[k], self.b[k]
            # positive on the open domain (0, delta_max)
            if a < 0 or (a == 0 and b <= 0) or a + b * self.delta_max < 0:
                raise BadDistribution(f"arrival probability of class {k!r} not positive on the delta domain")

    def at(self, delta=None) -> dict:
        if not self.is_affine:
            return dict(self.a)
        if delta is None:
            raise DeltaOutOfDomain("affine arrivals need a delta value")
        d = as_fraction(delta)
        if not 0 < d <= self.delta_max:
            raise DeltaOutOfDomain(f"delta={d} outside (0, {self.delta_max}]")
        return {k: self.a[k] + self.b[k] * d for k in self.a}

    def relabel(self, mapping: Mapping) -> "ArrivalSpec":
        return ArrivalSpec(
            {mapping[k]: v for k, v in self.a.items()},
            {mapping[k]: v for k, v in self.b.items()},
            self.delta_max,
            self.alpha0,
        )


@dataclass(frozen=True)
class Model:
    """A graph together with concrete exact arrival probabilities."""

    graph: MatchingGraph
    spec: ArrivalSpec
    delta: Fraction | None
    alpha: dict

    @property
    def alpha0(self) -> Fraction:
        return self.spec.alpha0

    @property
    def classes(self) -> tuple:
        return self.graph.classes

    @property
    def connected(self) -> bool:
        return self.graph.connected

    @property
    def bipartite(self) -> bool:
        return self.graph.bipartite

    def mass(self, members: Iterable) -> Fraction:
        return sum((self.alpha[c] for c in members), Fraction(0))

    def with_graph(self, graph: MatchingGraph) -> "Model":
        return build_model(graph, self.spec, self.delta)


def build_model(graph, spec: ArrivalSpec | None = None, delta=None) -> Model:
    """Validate ``graph`` and ``spec`` and evaluate arrivals at ``delta``.

    ``graph`` may also be a parsed model-file dictionary, in which case the
    specification is read from it.
    """
    if isinstance(graph, Mapping):
        graph, spec = parse_model(graph)
    if spec is None:
        raise MalformedInput("missing arrival specification")
    if set(graph.classes) != spec.classes:
        missing = sorted(set(graph.classes) ^ spec.classes)
        raise UnknownClass(f"classes of graph and arrivals differ: {missing}")
    if spec.is_affine:
        if delta is None:
            raise DeltaOutOfDomain("affine arrivals need a delta value")
        delta = as_fraction(delta)
    elif delta is not None:
        raise DeltaOutOfDomain("delta given for a fixed arrival specification")
    alpha = spec.at(delta)
    bad = [k for k, v in alpha.items() if v <= 0]
    if bad:
        raise BadDistribution(f"nonpositive arrival probability for class {bad[0]!r}")
    return Model(graph, spec, delta, {c: alpha[c] for c in graph.classes})


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    violations: tuple  # (independent set, |alpha_I|, |alpha_E(I)|)

    def __bool__(self):
        return self.stable


def check_stability(model: Model) -> StabilityReport:
    """Check ``|alpha_I| < |alpha_E(I)|`` for every independent set."""
    violations = []
    for iset in enumerate_independent_sets(model.graph):
        lhs = model.mass(iset)
        rhs = model.mass(neighborhood(model.graph, iset))
        if not lhs < rhs:
            violations.append((iset, lhs, rhs))
    return StabilityReport(not violations, tuple(violations))


def require_stable(model: Model) -> None:
    report = check_stability(model)
    if not report.stable:
        iset, lhs, rhs = report.violations[0]
        raise Unstable(
            f"unstable: independent set {{{','.join(iset)}}} has |alpha_I|={lhs} >= |alpha_E(I)|={rhs}",
            report.violations,
        )


def parse_model(obj) -> tuple:
    """Parse the JSON model-file structure into ``(graph, spec)``."""
    if not isinstance(obj, Mapping):
        raise MalformedInput("model file must be a JSON object")
    try:
        nodes = obj["nodes"]
        edges = obj.get("edges", [])
        arrivals = obj["arrivals"]
    except KeyError as exc:
        raise MalformedInput(f"model file missing key {exc.args[0]!r}") from None
    if not isinstance(nodes, list) or not isinstance(edges, list) or not isinstance(arrivals, Mapping):
        raise MalformedInput("nodes/edges must be lists and arrivals an object")
    if not all(isinstance(n, (str, int)) and not isinstance(n, bool) for n in nodes):
        raise MalformedInput("node labels must be strings or integers")
    for e in edges:
        if not isinstance(e, list) or not all(isinstance(x, (str, int)) and not isinstance(x, bool) for x in e):
            raise MalformedInput(f"edge must be a list of labels: {e!r}")
    graph = MatchingGraph.from_edges([str(n) for n in nodes], edges)
    affine = any(isinstance(v, Mapping) for v in arrivals.values())
    a, b = {}, {}
    for k, v in arrivals.items():
        if isinstance(v, Mapping):
            if "a" not in v:
                raise MalformedInput(f"affine arrival for {k!r} lacks 'a'")
            a[k], b[k] = as_fraction(v["a"]), as_fraction(v.get("b", 0))
        else:
            a[k], b[k] = as_fraction(v), Fraction(0)
    alpha0 = obj.get("alpha0", 0)
    if affine:
        if obj.get("delta_max") is None:
            raise MalformedInput("affine arrivals require delta_max")
        spec = ArrivalSpec(a, b, as_fraction(obj["delta_max"]), alpha0)
    else:
        spec = ArrivalSpec(a, {}, None, alpha0)
    if set(graph.classes) != spec.classes:
        missing = sorted(set(graph.classes) ^ spec.classes)
        raise UnknownClass(f"classes of graph and arrivals differ: {missing}")
    return graph, spec


def load_model(path) -> tuple:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"invalid JSON in {path}: {exc.msg}") from None
    return parse_model(obj)


def model_to_json(graph: MatchingGraph, spec: ArrivalSpec) -> dict:
    if spec.is_affine:
        arrivals = {c: {"a": str(spec.a[c]), "b": str(spec.b[c])} for c in graph.classes}
    else:
        arrivals = {c: str(spec.a[c]) for c in graph.classes}
    out = {
        "nodes": list(graph.classes),
        "edges": [list(e) for e in graph.edge_list()],
        "arrivals": arrivals,
        "alpha0": str(spec.alpha0),
    }
    if spec.is_affine:
        out["delta_max"] = str(spec.delta_max)
    return out


def parse_word(text: str, graph: MatchingGraph) -> Word:
    """Read a word given as comma-separated labels or, for single-character
    labels, as a plain string such as ``"121"``."""
    text = text.strip()
    if not text:
        return ()
    if "," in text:
        letters = tuple(s.strip() for s in text.split(","))
    elif text in graph.classes:
        letters = (text,)
    else:
        letters = tuple(text)
    for c in letters:
        graph.neighbors(c)
    return letters


def is_word(graph: MatchingGraph, word: Sequence) -> bool:
    return graph.is_independent(set(word))
