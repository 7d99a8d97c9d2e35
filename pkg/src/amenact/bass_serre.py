"""Kernel structure of epimorphism amalgams via the quotient graph.

For an amalgam equipped with an epimorphism of the G factor onto the H factor,
folding every word into H cuts out a normal subgroup that misses the
identified subgroup.  The quotient of the coset tree by that subgroup has one
vertex per side and one edge per coset of the identified image in H, so its
first Betti number is the coset count minus one; a two-edge circuit is
witnessed by an explicit kernel word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .amalgam import (
    AmalgamError,
    AmalgamWord,
    DoubleSpec,
    G_TAG,
    H_TAG,
    amalgam_inverse,
    amalgam_multiply,
    psi,
    reduce_word,
    surjectivity_failure,
)
from .groups import Element, FiniteSubgroup, FiniteTableGroup, inverse, multiply


class BassSerreError(ValueError):
    pass


@dataclass(frozen=True)
class HypothesesReport:
    surjective: bool
    injective_on_sub: bool
    index_at_least_two: bool
    index: Optional[int]          # None when only a lower bound is known
    index_lower_bound: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class QuotientGraph:
    g_side_vertices: int
    h_side_vertices: int
    edge_reps: tuple[str, ...]    # canonical coset representative names
    edge_count: int
    edge_count_exact: bool
    connected: bool
    betti: Optional[int]          # None when the edge count is a lower bound

    @property
    def vertices(self) -> int:
        return self.g_side_vertices + self.h_side_vertices


def image_subgroup(d: DoubleSpec) -> FiniteSubgroup:
    """The identified subgroup's image in the H factor."""
    imgs = [d.pi.apply(a) for a in d.base.a_in_g]
    return FiniteSubgroup(d.base.h, imgs, name=f"pi({d.base.a_in_g.name})")


def _coset_reps(d: DoubleSpec, cutoff: int) -> tuple[list[Element], bool]:
    """Canonical reps of the right cosets of the image subgroup in H.

    Exact for finite-table H; otherwise a prefix scan that stops at the
    cutoff, reporting inexactness.
    """
    h = d.base.h
    img = image_subgroup(d)
    reps: dict[Element, None] = {}
    scanned = 0
    for x in h.elements():
        scanned += 1
        r = min((multiply(p, x) for p in img), key=h.element_key)
        reps.setdefault(r, None)
        if h.order is not None and scanned >= h.order:
            return list(reps), True
        if h.order is None and scanned >= cutoff:
            return list(reps), False
    return list(reps), True


def check_hypotheses(d: DoubleSpec, cutoff: int = 10000) -> HypothesesReport:
    """Verify the epimorphism hypotheses, naming each failed one."""
    failures = []
    problem = surjectivity_failure(d.pi)
    surjective = problem is None
    if problem:
        failures.append(f"not surjective: {problem}")
    seen: dict[Element, Element] = {}
    injective = True
    for a in d.base.a_in_g:
        im = d.pi.apply(a)
        if im in seen:
            injective = False
            failures.append(
                f"not injective on the identified subgroup: "
                f"{d.base.g.element_name(seen[im])} and {d.base.g.element_name(a)} share an image"
            )
            break
        seen[im] = a
    reps, exact = _coset_reps(d, cutoff)
    index = len(reps) if exact else None
    at_least_two = len(reps) >= 2
    if not at_least_two:
        failures.append("identified image has index 1 in the H factor")
    return HypothesesReport(
        surjective=surjective,
        injective_on_sub=injective,
        index_at_least_two=at_least_two,
        index=index,
        index_lower_bound=len(reps),
        failures=tuple(failures),
    )


def quotient_graph(d: DoubleSpec, cutoff: int = 10000) -> QuotientGraph:
    """Quotient of the coset tree by the fold kernel, via the coset formula.

    Folding is onto H from both factors, so each vertex side collapses to a
    single orbit and the edges biject with cosets of the identified image.
    """
    rep = check_hypotheses(d, cutoff)
    if not rep.ok:
        raise BassSerreError("; ".join(rep.failures))
    reps, exact = _coset_reps(d, cutoff)
    names = tuple(d.base.h.element_name(r) for r in reps)
    betti = len(reps) - 2 + 1 if exact else None
    return QuotientGraph(
        g_side_vertices=1,
        h_side_vertices=1,
        edge_reps=names,
        edge_count=len(reps),
        edge_count_exact=exact,
        connected=True,
        betti=betti,
    )


@dataclass(frozen=True)
class CircuitWitness:
    x: Element                      # in G, outside the identified subgroup
    word: AmalgamWord               # the kernel word x * pi(x^{-1})
    folds_to_identity: bool
    x_outside_sub: bool
    tail_single_h_syllable: bool

    @property
    def ok(self) -> bool:
        return self.folds_to_identity and self.x_outside_sub and self.tail_single_h_syllable


def witness_circuit(d: DoubleSpec, cutoff: int = 100000) -> CircuitWitness:
    """Explicit kernel word showing the quotient graph has a 2-circuit.

    Takes the enumeration-least x in G whose image leaves the identified
    image, forms x * pi(x^{-1}), and audits: the word folds to the identity,
    x lies outside the identified subgroup, and x^{-1} times the word reduces
    to a single H-syllable outside the subgroup.
    """
    rep = check_hypotheses(d)
    if not rep.ok:
        raise BassSerreError("; ".join(rep.failures))
    g = d.base.g
    img = image_subgroup(d)
    x = None
    for scanned, cand in enumerate(g.elements()):
        if scanned >= cutoff:
            break
        if cand in d.base.a_in_g:
            continue
        if d.pi.apply(cand) in img:
            continue
        x = cand
        break
    if x is None:
        raise BassSerreError(f"no suitable element found within {cutoff} candidates")
    word = reduce_word(
        d.base, [(G_TAG, x), (H_TAG, d.pi.apply(inverse(x)))]
    )
    folds = psi(d, word) == d.base.h.identity()
    outside = x not in d.base.a_in_g
    x_word = reduce_word(d.base, [(G_TAG, x)])
    tail = amalgam_multiply(amalgam_inverse(x_word), word)
    tail_ok = tail.syllable_length == 1 and tail.syllables[0][0] == H_TAG
    return CircuitWitness(
        x=x,
        word=word,
        folds_to_identity=folds,
        x_outside_sub=outside,
        tail_single_h_syllable=tail_ok,
    )


def export_graph_text(q: QuotientGraph) -> str:
    """Plain adjacency text: one line per edge, vertex ids G0/H0, edge names."""
    lines = [f"G0 H0 {name}" for name in q.edge_reps]
    return "\n".join(lines) + "\n"
