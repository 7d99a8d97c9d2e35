"""Amalgamated free products over a finite identified subgroup.

Elements are kept in the alternating normal form ``a * s_n * ... * s_1`` where
``a`` lies in the identified finite subgroup (stored in its G-side copy) and
each syllable ``s_i`` is a canonical right-coset representative outside that
subgroup, with factor tags strictly alternating.  Reading the word as a
permutation, the rightmost syllable acts first and the head acts last.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .groups import (
    Element,
    FiniteSubgroup,
    FiniteTableGroup,
    FreeAbelianGroup,
    GroupError,
    GroupSpec,
    Homomorphism,
    SubgroupIso,
    closure,
    coset_rep,
    inverse,
    multiply,
    _integer_basis_coefficients,
)

G_TAG = "G"
H_TAG = "H"


class AmalgamError(ValueError):
    """Raised for malformed words or mismatched amalgam data."""


class AmalgamSpec:
    """Two factor groups glued along isomorphic finite subgroups."""

    def __init__(
        self,
        g: GroupSpec,
        h: GroupSpec,
        a_in_g: FiniteSubgroup,
        a_in_h: FiniteSubgroup,
        phi: SubgroupIso,
        name: str = "amalgam",
    ) -> None:
        if a_in_g.ambient is not g or a_in_h.ambient is not h:
            raise AmalgamError("subgroups must live in the corresponding factors")
        if phi.src is not a_in_g or phi.dst is not a_in_h:
            raise AmalgamError("identification must map the G-side subgroup onto the H-side one")
        if len(a_in_g) != len(a_in_h):
            raise AmalgamError("identified subgroups must have equal order")
        self.g = g
        self.h = h
        self.a_in_g = a_in_g
        self.a_in_h = a_in_h
        self.phi = phi
        self.name = name

    def factor(self, tag: str) -> GroupSpec:
        if tag == G_TAG:
            return self.g
        if tag == H_TAG:
            return self.h
        raise AmalgamError(f"unknown factor tag {tag!r}")

    def sub(self, tag: str) -> FiniteSubgroup:
        return self.a_in_g if tag == G_TAG else self.a_in_h

    def head_in(self, tag: str, head: Element) -> Element:
        """Translate a head (G-side copy of A) into the given factor."""
        if head not in self.a_in_g:
            raise AmalgamError(f"head {head!r} is outside the identified subgroup")
        return head if tag == G_TAG else self.phi.forward(head)

    def to_g_head(self, a: Element, tag: str) -> Element:
        """Translate a subgroup element of either factor into the G-side copy."""
        return a if tag == G_TAG else self.phi.backward(a)

    def in_sub(self, x: Element, tag: str) -> bool:
        return x in self.sub(tag)

    def decompose(self, x: Element, tag: str) -> tuple[Element, Element]:
        """Split x = a * rep with rep the canonical right-coset representative."""
        rep = coset_rep(x, self.sub(tag), side="right")
        a = multiply(x, inverse(rep))
        return a, rep

    def transversal(self, tag: str, within: Optional[Iterable[Element]] = None) -> list[Element]:
        """Nontrivial coset representatives, canonically ordered.

        With ``within=None`` the factor must be finite and the full transversal
        is returned; otherwise representatives are collected from the supplied
        finite ball of elements.
        """
        factor = self.factor(tag)
        if within is None:
            if factor.order is None:
                raise AmalgamError(
                    f"factor {factor.name} is infinite; supply a finite ball of elements"
                )
            within = factor.elements()
        reps = {}
        for x in within:
            r = coset_rep(x, self.sub(tag), side="right")
            reps[r] = True
        out = [r for r in reps if r not in self.sub(tag)]
        out.sort(key=factor.element_key)
        return out

    def identity_word(self) -> "AmalgamWord":
        return AmalgamWord(self, self.g.identity(), ())

    def __repr__(self) -> str:
        return f"AmalgamSpec({self.name}: {self.g.name} *_{self.a_in_g.name} {self.h.name})"


@dataclass(frozen=True)
class AmalgamWord:
    """Normal-form word; syllables are stored leftmost first."""

    spec: AmalgamSpec
    head: Element
    syllables: tuple[tuple[str, Element], ...]

    def __post_init__(self) -> None:
        spec = self.spec
        if self.head not in spec.a_in_g:
            raise AmalgamError(f"word head {self.head!r} is outside the identified subgroup")
        prev = None
        for tag, x in self.syllables:
            factor = spec.factor(tag)
            factor._require_owned(x)
            if x in spec.sub(tag):
                raise AmalgamError(f"syllable {x!r} lies in the identified subgroup")
            if x != coset_rep(x, spec.sub(tag), side="right"):
                raise AmalgamError(f"syllable {x!r} is not a canonical coset representative")
            if prev == tag:
                raise AmalgamError("adjacent syllables share a factor")
            prev = tag

    @property
    def syllable_length(self) -> int:
        return len(self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables and self.head == self.spec.g.identity()

    def letters(self) -> list[tuple[str, Element]]:
        """The word as raw letters, head included, leftmost first."""
        return [(G_TAG, self.head)] + list(self.syllables)

    def sort_key(self):
        spec = self.spec
        return (
            len(self.syllables),
            tuple(0 if tag == G_TAG else 1 for tag, _ in self.syllables),
            tuple(spec.factor(tag).element_key(x) for tag, x in self.syllables),
            spec.g.element_key(self.head),
        )

    def __repr__(self) -> str:
        return f"AmalgamWord({word_to_text(self)})"


def reduce_word(spec: AmalgamSpec, raw: Sequence[tuple[str, Element]]) -> AmalgamWord:
    """Normal form of a product of factor letters (leftmost applied last).

    Letters are absorbed right to left: adjacent same-factor letters merge,
    subgroup parts are transported across the identification and pushed into
    the head, and every remaining letter is replaced by its canonical
    right-coset representative.
    """
    head = spec.g.identity()
    syls: deque[tuple[str, Element]] = deque()
    for tag, x in reversed(list(raw)):
        factor = spec.factor(tag)
        factor._require_owned(x)
        z = multiply(x, spec.head_in(tag, head))
        if syls and syls[0][0] == tag:
            z = multiply(z, syls[0][1])
            syls.popleft()
        if spec.in_sub(z, tag):
            head = spec.to_g_head(z, tag)
        else:
            a, rep = spec.decompose(z, tag)
            head = spec.to_g_head(a, tag)
            syls.appendleft((tag, rep))
    return AmalgamWord(spec, head, tuple(syls))


def amalgam_multiply(u: AmalgamWord, v: AmalgamWord) -> AmalgamWord:
    if u.spec is not v.spec:
        raise AmalgamError("cannot multiply words over different amalgams")
    return reduce_word(u.spec, u.letters() + v.letters())


def amalgam_inverse(u: AmalgamWord) -> AmalgamWord:
    raw = [(tag, inverse(x)) for tag, x in reversed(u.syllables)]
    raw.append((G_TAG, inverse(u.head)))
    return reduce_word(u.spec, raw)


def enumerate_words(
    spec: AmalgamSpec,
    max_syllables: int,
    g_reps: Optional[Iterable[Element]] = None,
    h_reps: Optional[Iterable[Element]] = None,
) -> list[AmalgamWord]:
    """Every distinct normal-form word of syllable length <= max_syllables.

    For infinite factors a finite ball of elements must be supplied; its
    coset representatives then bound the syllable alphabet.  Order is
    deterministic: syllable count, then leading factor, then syllables in
    canonical order, then heads in canonical order.
    """
    reps = {
        G_TAG: spec.transversal(G_TAG, g_reps),
        H_TAG: spec.transversal(H_TAG, h_reps),
    }
    heads = list(spec.a_in_g.elements)
    out: list[AmalgamWord] = []
    for n in range(max_syllables + 1):
        if n == 0:
            for head in heads:
                out.append(AmalgamWord(spec, head, ()))
            continue
        for lead in (G_TAG, H_TAG):
            tags = []
            cur = lead
            for _ in range(n):
                tags.append(cur)
                cur = H_TAG if cur == G_TAG else G_TAG
            pools = [reps[t] for t in tags]
            if any(not p for p in pools):
                continue
            for combo in itertools.product(*pools):
                syllables = tuple(zip(tags, combo))
                for head in heads:
                    out.append(AmalgamWord(spec, head, syllables))
    return out


# -- text form -----------------------------------------------------------------


def word_to_text(w: AmalgamWord) -> str:
    head = w.spec.g.element_name(w.head)
    syls = " ".join(
        f"{tag}:{w.spec.factor(tag).element_name(x)}" for tag, x in w.syllables
    )
    return f"{head} | {syls}".rstrip()


def word_from_text(spec: AmalgamSpec, text: str) -> AmalgamWord:
    if "|" not in text:
        raise AmalgamError(f"word text {text!r} lacks the head separator")
    head_part, _, syl_part = text.partition("|")
    head = spec.g.parse_element(head_part.strip())
    syllables = []
    for token in syl_part.split():
        tag, _, name = token.partition(":")
        if tag not in (G_TAG, H_TAG) or not name:
            raise AmalgamError(f"bad syllable token {token!r}")
        syllables.append((tag, spec.factor(tag).parse_element(name)))
    return AmalgamWord(spec, head, tuple(syllables))


# -- epimorphism doubles --------------------------------------------------------


class DoubleSpec:
    """An amalgam together with an epimorphism of the G factor onto H.

    The epimorphism must agree with the subgroup identification (hence be
    injective there) and be onto; both are verified as far as the group kinds
    allow at construction time.
    """

    def __init__(self, base: AmalgamSpec, pi: Homomorphism, name: str = "double") -> None:
        if pi.source is not base.g or pi.target is not base.h:
            raise AmalgamError("epimorphism must map the G factor onto the H factor")
        for a in base.a_in_g:
            if pi.apply(a) != base.phi.forward(a):
                raise AmalgamError(
                    f"epimorphism disagrees with the subgroup identification at {a!r}"
                )
        seen = {}
        for a in base.a_in_g:
            im = pi.apply(a)
            if im in seen:
                raise AmalgamError("epimorphism is not injective on the identified subgroup")
            seen[im] = a
        problem = surjectivity_failure(pi)
        if problem:
            raise AmalgamError(problem)
        self.base = base
        self.pi = pi
        self.name = name

    def __repr__(self) -> str:
        return f"DoubleSpec({self.name})"


def surjectivity_failure(pi: Homomorphism) -> Optional[str]:
    """None if the generator images provably generate the target, else a reason."""
    target = pi.target
    images = [pi.apply(g) for g in pi.source.generators]
    if isinstance(target, FiniteTableGroup):
        got = closure(target, images)
        if len(got) != target.order:
            return (
                f"{pi.name}: images generate only {len(got)} of {target.order} target elements"
            )
        return None
    if isinstance(target, FreeAbelianGroup):
        try:
            _integer_basis_coefficients([im.value for im in images], target.rank)
        except GroupError:
            return f"{pi.name}: images do not span the target lattice"
        return None
    return f"{pi.name}: cannot verify surjectivity onto {target.name}"


def make_double(g: GroupSpec, a: FiniteSubgroup, name: str = "double") -> DoubleSpec:
    """The double of a group over a subgroup: both factors are g, glued along a."""
    from .groups import identity_hom, subgroup_iso_from_hom

    pi = identity_hom(g)
    phi = subgroup_iso_from_hom(a, a, pi)
    base = AmalgamSpec(g, g, a, a, phi, name=f"{g.name}*{g.name}")
    return DoubleSpec(base, pi, name=name)


def psi(d: DoubleSpec, w: AmalgamWord) -> Element:
    """Fold a word to the H factor: G-letters through the epimorphism, H-letters as is."""
    if w.spec is not d.base:
        raise AmalgamError("word belongs to a different amalgam")
    acc = d.pi.apply(w.head)
    for tag, x in w.syllables:
        acc = multiply(acc, d.pi.apply(x) if tag == G_TAG else x)
    return acc
