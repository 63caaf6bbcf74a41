"""Ground truth that does not use the product form.

* ``truncated_stationary`` builds the word chain on words of length at most
  ``L`` and solves for its stationary law numerically (exactly for small
  state spaces).
* ``simulate`` runs the FCFS chain itself and reports a batch-means
  confidence interval for the long-run mean word length.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidWord, MalformedInput, StateSpaceTooLarge
from .kernel import FCFSChain, PyFCFSChain
from .model import (
    ArrivalSpec,
    MatchingGraph,
    Model,
    build_model,
    enumerate_independent_sets,
    neighborhood,
    require_stable,
)
from .product_form import unnormalized_word_weight

DEFAULT_MAX_STATES = 200_000


def max_states_from_env() -> int:
    raw = os.environ.get("MATCHBRAESS_MAX_STATES")
    if not raw:
        return DEFAULT_MAX_STATES
    try:
        value = int(raw)
    except ValueError:
        raise MalformedInput(f"MATCHBRAESS_MAX_STATES must be an integer, got {raw!r}") from None
    if value <= 0:
        raise MalformedInput("MATCHBRAESS_MAX_STATES must be positive")
    return value


def step(graph: MatchingGraph, word, arriving):
    """One FCFS transition: the arrival takes the oldest compatible item,
    or joins the end of the word if there is none."""
    word = tuple(word)
    nbrs = graph.neighbors(arriving)
    for c in word:
        graph.neighbors(c)
    if not graph.is_independent(set(word)):
        raise InvalidWord(f"word {word!r} contains compatible letters")
    for k, c in enumerate(word):
        if c in nbrs:
            return word[:k] + word[k + 1:]
    return word + (arriving,)


# ----------------------------------------------------------- truncated chain


def twin_groups(graph: MatchingGraph) -> list:
    """Classes grouped by identical neighborhoods, in graph order."""
    groups = {}
    for c in graph.classes:
        groups.setdefault(graph.neighbors(c), []).append(c)
    return [tuple(g) for g in groups.values()]


def lump_twins(model: Model) -> tuple:
    """Aggregate every group of twin classes into its first member.

    Twin classes are interchangeable for the FCFS dynamics, so the chain on
    words with twins relabelled to one representative is an exact lumping
    of the original chain and has the same word-length distribution.
    """
    groups = twin_groups(model.graph)
    rep = {c: g[0] for g in groups for c in g}
    classes = tuple(g[0] for g in groups)
    edges = {frozenset((rep[u], rep[v])) for u, v in (tuple(e) for e in model.graph.edges)}
    graph = MatchingGraph(classes, frozenset(edges))
    alpha = {g[0]: sum((model.alpha[c] for c in g), Fraction(0)) for g in groups}
    spec = ArrivalSpec.fixed(alpha, model.spec.alpha0)
    return build_model(graph, spec), {g[0]: g for g in groups}


def enumerate_words(graph: MatchingGraph, max_len: int, cap: int | None = None) -> list:
    """Words of length at most ``max_len``, shortest first."""
    words = [()]
    frontier = [((), frozenset())]
    for _ in range(max_len):
        nxt = []
        for w, blocked in frontier:
            for c in graph.classes:
                if c not in blocked:
                    nxt.append((w + (c,), blocked | graph.neighbors(c)))
        words.extend(w for w, _ in nxt)
        if cap is not None and len(words) > cap:
            raise StateSpaceTooLarge(f"more than {cap} words of length <= {max_len}")
        frontier = nxt
    return words


@dataclass(frozen=True)
class TruncatedSolution:
    max_len: int
    probabilities: dict
    mass_captured: Fraction | float | None
    mean_bounds: tuple
    tail_ratio: Fraction | None
    exact: bool
    lumped: dict = field(default_factory=dict)

    @property
    def mean_estimate(self):
        return self.mean_bounds[0]

    @property
    def width(self):
        return self.mean_bounds[1] - self.mean_bounds[0]


def _gth(rows, n, zero, one):
    """Stationary vector by Grassmann-Taksar-Heyman state reduction.

    ``rows[i]`` maps successor ``j`` to the transition probability. States
    are eliminated from the last index down. The reduction never subtracts,
    and on the nearly tree-shaped word chains the fill-in stays small.
    """
    rows = [dict(r) for r in rows]
    cols = [dict() for _ in range(n)]
    for i, r in enumerate(rows):
        r.pop(i, None)
        for j, p in r.items():
            cols[j][i] = p
    saved = [None] * n
    for k in range(n - 1, 0, -1):
        out = {j: p for j, p in rows[k].items() if j < k}
        s = zero
        for p in out.values():
            s = s + p
        inc = {i: p for i, p in cols[k].items() if i < k}
        saved[k] = (inc, s)
        for i, pik in inc.items():
            f = pik / s
            ri = rows[i]
            del ri[k]
            for j, pkj in out.items():
                if j == i:
                    continue
                v = ri.get(j, zero) + f * pkj
                ri[j] = v
                cols[j][i] = v
        for j in out:
            cols[j].pop(k, None)
    pi = [zero] * n
    pi[0] = one
    total = one
    for k in range(1, n):
        inc, s = saved[k]
        acc = zero
        for i, p in inc.items():
            acc = acc + pi[i] * p
        pi[k] = acc / s
        total = total + pi[k]
    return [p / total for p in pi]


def _sparse_solve(rows, n):
    from scipy.sparse import csr_matrix
    from scipy.sparse.linalg import spsolve

    data, ri, ci = [], [], []
    for i, r in enumerate(rows):
        for j, p in r.items():
            # transpose of (P - I)
            ri.append(j)
            ci.append(i)
            data.append(float(p) - (1.0 if i == j else 0.0))
        if i not in r:
            ri.append(i)
            ci.append(i)
            data.append(-1.0)
    a = csr_matrix((data, (ri, ci)), shape=(n, n)).tolil()
    a[0, :] = np.ones(n)
    b = np.zeros(n)
    b[0] = 1.0
    pi = spsolve(a.tocsr(), b)
    return list(np.clip(pi, 0.0, None))


def truncated_stationary(
    model: Model,
    max_len: int,
    *,
    lump: bool = True,
    exact_limit: int = 400,
    max_states: int | None = None,
) -> TruncatedSolution:
    """Stationary law of the word chain restricted to ``|w| <= max_len``.

    Arrivals that would lengthen a word beyond ``max_len`` are discarded.
    The mean of that chain is the lower end of ``mean_bounds``. The upper
    end adds a geometric tail: the flow balance across each length level
    gives ``P(n+1) <= r P(n)`` with ``r = max_S (1 - |alpha_E(S)|) /
    min_S |alpha_E(S)|`` over independent sets ``S``; when ``r >= 1`` the
    upper bound is infinite. The bounds are exact for chains whose
    truncation equals conditioning on ``|w| <= max_len`` (complete graphs,
    and any graph after twin lumping to a complete graph) and a close
    approximation otherwise.
    """
    require_stable(model)
    if max_len < 1:
        raise MalformedInput("max_len must be at least 1")
    cap = max_states_from_env() if max_states is None else max_states
    lumped = {}
    work = model
    if lump:
        work, lumped = lump_twins(model)
        if all(len(g) == 1 for g in lumped.values()):
            lumped = {}
    graph = work.graph
    words = enumerate_words(graph, max_len, cap)
    index = {w: k for k, w in enumerate(words)}
    exact = len(words) <= exact_limit
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    alpha = {c: (work.alpha[c] if exact else float(work.alpha[c])) for c in graph.classes}
    rows = []
    for w in words:
        row = {}
        for c in graph.classes:
            nxt = step(graph, w, c)
            j = index.get(nxt, index[w])
            row[j] = row.get(j, zero) + alpha[c]
        rows.append(row)
    if exact:
        pi = _gth(rows, len(words), zero, one)
    else:
        pi = [float(p) for p in _sparse_solve(rows, len(words))]
    probabilities = dict(zip(words, pi))

    mean_lo = sum((len(w) * p for w, p in probabilities.items()), zero)
    top = sum((p for w, p in probabilities.items() if len(w) == max_len), zero)
    isets = enumerate_independent_sets(graph)
    down = [work.mass(neighborhood(graph, s)) for s in isets]
    ratio = max(1 - d for d in down) / min(down)
    if ratio < 1:
        r = ratio if exact else float(ratio)
        tail_mass = top * r / (1 - r)
        tail_mean = top * (max_len * r / (1 - r) + r / (1 - r) ** 2)
        mean_hi = mean_lo + tail_mean
        captured = 1 - tail_mass if tail_mass < 1 else None
    else:
        mean_hi = math.inf
        captured = None
    return TruncatedSolution(max_len, probabilities, captured, (mean_lo, mean_hi), ratio, exact, lumped)


def truncated_balance_residual(model: Model, max_len: int) -> dict:
    """Residuals of the product-form vector in the truncated balance
    equations, over interior words ``|w| <= max_len - 1``.

    Every predecessor of an interior word has length at most ``max_len``,
    so the equations are the untruncated ones and the residuals must be
    exactly zero. Returns only the nonzero residuals. Idle slots add the
    same self-loop mass to both sides and are left out.
    """
    graph = model.graph
    words = enumerate_words(graph, max_len)
    weight = {w: unnormalized_word_weight(model, w) for w in words}
    inflow = {w: Fraction(0) for w in words if len(w) < max_len}
    for w in words:
        for c in graph.classes:
            nxt = step(graph, w, c)
            if nxt in inflow:
                inflow[nxt] += weight[w] * model.alpha[c]
    return {w: weight[w] - inflow[w] for w in inflow if weight[w] != inflow[w]}


# ---------------------------------------------------------------- simulation


@dataclass(frozen=True)
class SimulationResult:
    mean_estimate: float
    ci_halfwidth: float
    steps: int
    seed: int
    alpha0_used: Fraction
    batches: int
    warmup: int
    backend: str

    def contains(self, value, k: float = 1.0) -> bool:
        return abs(self.mean_estimate - float(value)) <= k * self.ci_halfwidth


def arrival_cdf(model: Model) -> np.ndarray:
    """Cumulative probabilities of ``[idle, class_0, class_1, ...]``,
    accumulated exactly and converted to floats once."""
    a0 = model.alpha0
    probs = [a0] + [(1 - a0) * model.alpha[c] for c in model.classes]
    cum = []
    acc = Fraction(0)
    for p in probs:
        acc += p
        cum.append(float(acc))
    cum[-1] = 1.0
    return np.array(cum)


def draw_arrivals(rng: np.random.Generator, cdf: np.ndarray, n: int) -> np.ndarray:
    """Class index per slot, ``-1`` for an idle slot (inverse CDF)."""
    u = rng.random(n)
    return (np.searchsorted(cdf, u, side="right") - 1).astype(np.int32)


def _student_t975(df: int) -> float:
    from scipy.stats import t

    return float(t.ppf(0.975, df))


CHUNK = 1 << 18


def simulate(
    model: Model,
    steps: int,
    seed: int,
    *,
    batches: int = 50,
    warmup: int | None = None,
    chain_cls=None,
) -> SimulationResult:
    """Long-run mean word length by simulation, 95% batch-means interval.

    The generator is PCG64 seeded through ``numpy.random.SeedSequence(seed)``;
    independent replications use ``SeedSequence(seed).spawn(k)`` (see
    ``simulate_replications``). The chain starts empty and ``warmup`` slots
    (default ``steps // 100``) are discarded before measuring ``steps`` slots.
    """
    require_stable(model)
    if steps < 10_000:
        raise MalformedInput("steps must be at least 10000")
    if batches < 2 or steps // batches < 1:
        raise MalformedInput("need at least two nonempty batches")
    return _simulate(model, steps, np.random.SeedSequence(seed), seed, batches, warmup, chain_cls)


def _simulate(model, steps, seedseq, seed, batches, warmup, chain_cls):
    rng = np.random.Generator(np.random.PCG64(seedseq))
    cdf = arrival_cdf(model)
    classes = model.classes
    nbrs = [[classes.index(j) for j in sorted(model.graph.neighbors(c), key=classes.index)] for c in classes]
    cls = chain_cls or FCFSChain
    chain = cls(len(classes), nbrs)
    warmup = steps // 100 if warmup is None else int(warmup)

    def run(n):
        acc = 0
        while n > 0:
            k = min(n, CHUNK)
            acc += chain.advance(draw_arrivals(rng, cdf, k))
            n -= k
        return acc

    run(warmup)
    size = steps // batches
    means = np.array([run(size) / size for _ in range(batches)])
    est = float(means.mean())
    half = _student_t975(batches - 1) * float(means.std(ddof=1)) / math.sqrt(batches)
    backend = "python" if cls is PyFCFSChain else "cython"
    return SimulationResult(est, half, size * batches, seed, model.alpha0, batches, warmup, backend)


def simulate_replications(model: Model, steps: int, seed: int, n: int, **kwargs) -> list:
    """``n`` independent runs on child streams of ``SeedSequence(seed)``."""
    require_stable(model)
    children = np.random.SeedSequence(seed).spawn(n)
    batches = kwargs.pop("batches", 50)
    warmup = kwargs.pop("warmup", None)
    chain_cls = kwargs.pop("chain_cls", None)
    return [_simulate(model, steps, child, seed, batches, warmup, chain_cls) for child in children]
