"""Exact FCFS stationary quantities.

The stationary law of the word chain is

    pi(w) = pi_0 * prod_k alpha_{w_k} / |alpha_E({w_1..w_k})|

and the mean number of waiting items is a finite sum over independent sets,
``E[Q] = (sum_I E_I) / (1 + sum_I T_I)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .errors import InvalidWord
from .model import Model, enumerate_independent_sets, neighborhood, require_stable


@dataclass(frozen=True)
class SetTerms:
    set: tuple
    t_value: Fraction
    e_value: Fraction


def subset_terms(graph, alpha, isets, zero=Fraction(0), one=Fraction(1)):
    """Return ``{frozenset(I): (T_I, E_I)}`` for every set in ``isets``.

    Uses the recursion over subsets instead of summing over orderings:

        f(S) = (1/D(S)) * sum_{j in S} alpha_j f(S - j)
        g(S) = (1/D(S)) * sum_{j in S} alpha_j g(S - j) + f(S) N(S) / D(S)

    where ``N(S) = |alpha_E(S)|`` and ``D(S) = N(S) - |alpha_S|``. ``alpha``
    may hold any field elements (fractions or rational functions); ``zero``
    and ``one`` are that field's identities.
    """
    table = {frozenset(): (one, zero)}

    def mass(members):
        total = zero
        for c in members:
            total = total + alpha[c]
        return total

    def solve(key):
        if key in table:
            return table[key]
        n_s = mass(neighborhood(graph, key))
        d_s = n_s - mass(key)
        acc_f, acc_g = zero, zero
        for j in key:
            f_sub, g_sub = solve(key - {j})
            acc_f = acc_f + alpha[j] * f_sub
            acc_g = acc_g + alpha[j] * g_sub
        f = acc_f / d_s
        g = acc_g / d_s + f * n_s / d_s
        table[key] = (f, g)
        return f, g

    return {frozenset(s): solve(frozenset(s)) for s in isets}


def terms_by_permutations(model: Model, iset) -> SetTerms:
    """Literal sum over all orderings of ``iset``; reference for the DP."""
    t_total = Fraction(0)
    e_total = Fraction(0)
    for order in permutations(iset):
        prod = Fraction(1)
        ratio_sum = Fraction(0)
        for k in range(1, len(order) + 1):
            prefix = order[:k]
            n_k = model.mass(neighborhood(model.graph, prefix))
            d_k = n_k - model.mass(prefix)
            prod *= model.alpha[order[k - 1]] / d_k
            ratio_sum += n_k / d_k
        t_total += prod
        e_total += prod * ratio_sum
    return SetTerms(model.graph.canonical(iset), t_total, e_total)


def independent_set_terms(model: Model, iset) -> SetTerms:
    require_stable(model)
    iset = model.graph.canonical(iset)
    if not iset or not model.graph.is_independent(iset):
        raise InvalidWord(f"{{{','.join(iset)}}} is not an independent set")
    t, e = subset_terms(model.graph, model.alpha, [iset])[frozenset(iset)]
    return SetTerms(iset, t, e)


def all_set_terms(model: Model) -> list:
    require_stable(model)
    isets = enumerate_independent_sets(model.graph)
    table = subset_terms(model.graph, model.alpha, isets)
    return [SetTerms(s, *table[frozenset(s)]) for s in isets]


def normalization_constant(model: Model) -> Fraction:
    terms = all_set_terms(model)
    return 1 / (1 + sum(t.t_value for t in terms))


def mean_items(model: Model) -> Fraction:
    terms = all_set_terms(model)
    return sum(t.e_value for t in terms) / (1 + sum(t.t_value for t in terms))


def unnormalized_word_weight(model: Model, word) -> Fraction:
    """``pi(w) / pi_0``; no stability check."""
    weight = Fraction(1)
    seen = set()
    for letter in word:
        seen.add(letter)
        weight *= model.alpha[letter] / model.mass(neighborhood(model.graph, seen))
    return weight


def word_probability(model: Model, word, pi0: Fraction | None = None) -> Fraction:
    word = tuple(word)
    for c in word:
        model.graph.neighbors(c)
    if not model.graph.is_independent(set(word)):
        raise InvalidWord(f"word {''.join(word)!r} contains compatible letters")
    if pi0 is None:
        pi0 = normalization_constant(model)
    return pi0 * unnormalized_word_weight(model, word)
