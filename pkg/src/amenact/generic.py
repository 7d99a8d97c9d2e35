"""Equivariant partial-permutation construction with replayable certificates.

The two witness actions are aligned block-by-block into one workspace (the
regular G carrier), where a finite injective block map grows in two phases:
one extension per nontrivial word making the word move a witness point, then
one extension matching a Folner pair exactly.  The result ships as a
certificate whose every claim re-verifies against the finished map with
exact arithmetic; construction is sequential and fully deterministic.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .amalgam import (
    AmalgamSpec,
    AmalgamWord,
    G_TAG,
    H_TAG,
    enumerate_words,
    word_from_text,
    word_to_text,
)
from .actions import ABlockSpace, ActionError, ConstructionWitness, _ball_elements
from .groups import Element, GroupError, inverse, multiply
from .report import Report, parse_fraction, render_value


class GenericError(ValueError):
    pass


class BlockAlignment:
    """Pairs the A-blocks of the workspace with those of the H carrier.

    Block k of one side corresponds to block k of the other, base to base,
    with subgroup offsets translated through the identification; transporting
    the H action along this pairing makes the two subgroup actions literally
    coincide on the workspace.
    """

    def __init__(self, witness: ConstructionWitness) -> None:
        self.witness = witness
        self.x_blocks = ABlockSpace(witness.x_action, witness.a_in_g)
        self.y_blocks = ABlockSpace(witness.yprime_action, witness.a_in_h)
        self.phi = witness.phi

    def to_x(self, y):
        k, a_h = self.y_blocks.locate(y)
        a_g = self.phi.backward(a_h)
        return self.witness.x_action.apply(a_g, self.x_blocks.base(k))

    def to_y(self, x):
        k, a_g = self.x_blocks.locate(x)
        a_h = self.phi.forward(a_g)
        return self.witness.yprime_action.apply(a_h, self.y_blocks.base(k))


class AmalgamSystem:
    """One workspace carrying the G action and the transported H action."""

    def __init__(self, spec: AmalgamSpec, witness: ConstructionWitness, audit_prefix: int = 32) -> None:
        if spec.g is not witness.g or spec.h is not witness.h:
            raise GenericError("amalgam factors differ from the witness groups")
        if spec.a_in_g is not witness.a_in_g or spec.a_in_h is not witness.a_in_h:
            raise GenericError("identified subgroups differ from the witness data")
        self.spec = spec
        self.witness = witness
        self.x_action = witness.x_action
        self.space = witness.x_action.space
        self.align = BlockAlignment(witness)
        self.blocks = self.align.x_blocks
        self.sub = witness.a_in_g
        for x in self.space.prefix(audit_prefix):
            for a in self.sub:
                left = self.g_apply(a, x)
                right = self.h_apply(witness.phi.forward(a), x)
                if left != right:
                    raise GenericError(
                        "transported subgroup action disagrees with the native one "
                        f"at {self.space.point_name(x)}"
                    )

    def g_apply(self, g: Element, x):
        return self.x_action.apply(g, x)

    def h_apply(self, h: Element, x):
        return self.align.to_x(self.witness.yprime_action.apply(h, self.align.to_y(x)))

    def syllable_apply(self, tag: str, s: Element, x):
        return self.g_apply(s, x) if tag == G_TAG else self.h_apply(s, x)


class PartialPermutation:
    """Finite injective block map, extended over blocks by the subgroup action.

    The forward table maps block base points to image points; domain and
    range are unions of whole blocks, and the defining identity
    sigma(a*x) = a*sigma(x) holds by construction and is re-audited on demand.
    """

    def __init__(self, system: AmalgamSystem) -> None:
        self.system = system
        self._fwd: dict = {}     # dom block base -> image point
        self._ran: dict = {}     # image block base -> dom block base

    def copy(self) -> "PartialPermutation":
        out = PartialPermutation(self.system)
        out._fwd = dict(self._fwd)
        out._ran = dict(self._ran)
        return out

    def __len__(self) -> int:
        return len(self._fwd)

    def dom_bases(self) -> list:
        blocks = self.system.blocks
        return sorted(self._fwd, key=lambda b: blocks.locate(b)[0])

    def ran_bases(self) -> set:
        return set(self._ran)

    def items(self):
        return [(b, self._fwd[b]) for b in self.dom_bases()]

    def assign(self, x, y) -> None:
        """Record sigma(x) = y and extend over both blocks equivariantly."""
        blocks = self.system.blocks
        kx, ax = blocks.locate(x)
        bx = blocks.base(kx)
        if bx in self._fwd:
            raise GenericError(f"block of {self.system.space.point_name(x)} is already mapped")
        y0 = self.system.g_apply(inverse(ax), y)
        ky, _ = blocks.locate(y0)
        by = blocks.base(ky)
        if by in self._ran:
            raise GenericError(f"image block of {self.system.space.point_name(y)} is already used")
        self._fwd[bx] = y0
        self._ran[by] = bx

    def apply(self, x):
        blocks = self.system.blocks
        kx, ax = blocks.locate(x)
        y0 = self._fwd.get(blocks.base(kx))
        if y0 is None:
            return None
        return self.system.g_apply(ax, y0)

    def apply_inv(self, y):
        blocks = self.system.blocks
        ky, ay = blocks.locate(y)
        by = blocks.base(ky)
        bx = self._ran.get(by)
        if bx is None:
            return None
        _, aprime = blocks.locate(self._fwd[bx])
        return self.system.g_apply(multiply(ay, inverse(aprime)), bx)

    def restricted_equals(self, other: "PartialPermutation") -> bool:
        """True when self agrees with other on all of other's domain."""
        return all(self._fwd.get(b) == y for b, y in other._fwd.items())

    def digest(self) -> str:
        space = self.system.space
        rows = sorted(
            (space.index_of(b), space.index_of(y)) for b, y in self._fwd.items()
        )
        text = "\n".join(f"{i}:{j}" for i, j in rows)
        return hashlib.sha256(text.encode()).hexdigest()


def audit_equivariance(sigma: PartialPermutation) -> Optional[str]:
    """Re-check sigma(a*x) = a*sigma(x) over the whole domain; None if clean."""
    system = sigma.system
    for b, y0 in sigma.items():
        for a in system.sub:
            got = sigma.apply(system.g_apply(a, b))
            want = system.g_apply(a, y0)
            if got != want:
                return (
                    f"equivariance broken at block of {system.space.point_name(b)} "
                    f"with offset {system.spec.g.element_name(a)}"
                )
    ran = {}
    for b, y0 in sigma._fwd.items():
        kb, _ = system.blocks.locate(y0)
        base = system.blocks.base(kb)
        if base in ran:
            return f"two blocks map onto the block of {system.space.point_name(base)}"
        ran[base] = b
    if ran != sigma._ran:
        return "inverse table is out of step with the forward table"
    return None


# -- word evaluation ---------------------------------------------------------------


def evaluate_word_trace(
    system: AmalgamSystem, sigma: PartialPermutation, w: AmalgamWord, x
) -> tuple[Optional[object], list]:
    """Evaluation path of the word at x: right syllable first, head last.

    H syllables act through the map: into the map, the H action, back out.
    Returns (endpoint, trace); the endpoint is None as soon as the map is
    undefined somewhere along the way (never a guess).
    """
    cur = x
    trace = [x]
    for tag, s in reversed(w.syllables):
        if tag == G_TAG:
            cur = system.g_apply(s, cur)
            trace.append(cur)
        else:
            y = sigma.apply(cur)
            if y is None:
                return None, trace
            trace.append(y)
            z = system.h_apply(s, y)
            trace.append(z)
            cur = sigma.apply_inv(z)
            if cur is None:
                return None, trace
            trace.append(cur)
    return system.g_apply(w.head, cur), trace


def evaluate_word(system: AmalgamSystem, sigma: PartialPermutation, w: AmalgamWord, x):
    end, _ = evaluate_word_trace(system, sigma, w, x)
    return end


# -- extension steps ----------------------------------------------------------------


@dataclass(frozen=True)
class WordWitness:
    word: AmalgamWord
    start: object
    trace: tuple
    endpoint: object


def _seed_reserved(sigma: PartialPermutation) -> set:
    out = set(sigma._fwd)
    out.update(sigma._ran)
    return out


class _FreshPicker:
    """Least-index fresh block search over a shared reservation set."""

    def __init__(self, system: AmalgamSystem, reserved: set, cutoff: int = 200000) -> None:
        self.system = system
        self.reserved = reserved
        self.cutoff = cutoff
        self._watermark = 0

    def _advance(self) -> None:
        blocks = self.system.blocks
        while blocks.base(self._watermark) in self.reserved:
            self._watermark += 1

    def reserve_point(self, p) -> None:
        self.reserved.add(self.system.blocks.block_base_of(p))

    def pick_plain(self):
        self._advance()
        base = self.system.blocks.base(self._watermark)
        self.reserved.add(base)
        return base

    def pick_displaced(self, tag: str, s: Element, label: str):
        """Fresh block whose members are moved clear of everything by s."""
        system = self.system
        blocks = system.blocks
        self._advance()
        k = self._watermark
        scanned = 0
        while scanned < self.cutoff:
            base = blocks.base(k)
            if base not in self.reserved:
                members = blocks.members(blocks.locate(base)[0])
                image = [system.syllable_apply(tag, s, p) for p in members]
                if not (set(members) & set(image)) and all(
                    blocks.block_base_of(q) not in self.reserved for q in image
                ):
                    self.reserved.add(base)
                    for q in image:
                        self.reserved.add(blocks.block_base_of(q))
                    return base
            k += 1
            scanned += 1
        raise GenericError(
            f"no fresh displaced block for {label} within {self.cutoff} blocks; "
            "the displacement set is too thin on the scanned prefix"
        )


def extend_avoid_word(
    system: AmalgamSystem,
    sigma: PartialPermutation,
    w: AmalgamWord,
    reserved: Optional[set] = None,
    cutoff: int = 200000,
) -> tuple[PartialPermutation, WordWitness]:
    """Pure extension making the word move a witness point.

    Walks the syllables right to left over freshly reserved blocks: each H
    syllable consumes two new block assignments (into and out of the map),
    each G syllable moves the current point directly from a block chosen
    displaced for it.  All four leading/trailing shapes are handled; no point
    of the existing domain is ever remapped.
    """
    if w.is_identity():
        raise GenericError("cannot witness the identity word")
    sigma2 = sigma.copy()
    if reserved is None:
        reserved = _seed_reserved(sigma2)
    picker = _FreshPicker(system, reserved, cutoff)
    rightmost = list(reversed(w.syllables))

    if rightmost and rightmost[0][0] == G_TAG:
        tag, s = rightmost[0]
        x0 = picker.pick_displaced(tag, s, f"G-syllable {system.spec.g.element_name(s)}")
    else:
        x0 = picker.pick_plain()

    cur = x0
    trace = [x0]
    for j, (tag, s) in enumerate(rightmost):
        if tag == G_TAG:
            cur = system.g_apply(s, cur)
            trace.append(cur)
            continue
        y = picker.pick_displaced(tag, s, f"H-syllable {system.spec.h.element_name(s)}")
        sigma2.assign(cur, y)
        trace.append(y)
        z = system.h_apply(s, y)
        picker.reserve_point(z)
        trace.append(z)
        nxt = rightmost[j + 1] if j + 1 < len(rightmost) else None
        if nxt is not None and nxt[0] == G_TAG:
            u = picker.pick_displaced(
                nxt[0], nxt[1], f"G-syllable {system.spec.g.element_name(nxt[1])}"
            )
        else:
            u = picker.pick_plain()
        sigma2.assign(u, z)
        trace.append(u)
        cur = u

    endpoint = system.g_apply(w.head, cur)
    picker.reserve_point(endpoint)
    if endpoint == x0:
        raise GenericError("construction failed: the word fixed its witness point")
    replay, replay_trace = evaluate_word_trace(system, sigma2, w, x0)
    if replay != endpoint or replay_trace != trace:
        raise GenericError("construction failed: the recorded trace does not replay")
    bases = [system.blocks.block_base_of(p) for p in trace]
    if len(set(bases)) != len(bases):
        raise GenericError("construction failed: trace points share a block")
    return sigma2, WordWitness(w, x0, tuple(trace), endpoint)


def _block_profiles(system: AmalgamSystem, points) -> list[tuple[object, frozenset]]:
    """Blocks meeting the set, as (base, offsets) sorted by block index."""
    blocks = system.blocks
    per: dict = {}
    for p in points:
        k, a = blocks.locate(p)
        per.setdefault(k, set()).add(a)
    return [(blocks.base(k), frozenset(per[k])) for k in sorted(per)]


def _profile_class(system: AmalgamSystem, offsets: frozenset):
    """Offset set up to right subgroup translation, canonically."""
    g = system.spec.g
    best = None
    for t in system.sub:
        key = tuple(sorted(g.element_key(multiply(o, t)) for o in offsets))
        if best is None or key < best:
            best = key
    return best


def extend_match_folner(
    system: AmalgamSystem,
    sigma: PartialPermutation,
    c_points: frozenset,
    d_points: frozenset,
    reserved: Optional[set] = None,
) -> PartialPermutation:
    """Pure extension with sigma(C) = D as exact set equality.

    Both sets live in the workspace; they are paired block by block, matching
    offset profiles up to subgroup translation so the equivariant extension
    is consistent.  Blocks of C must be outside the domain and blocks of D
    outside the range; violations name the offending block.
    """
    if len(c_points) != len(d_points):
        raise GenericError(f"set sizes differ: {len(c_points)} vs {len(d_points)}")
    sigma2 = sigma.copy()
    cprof = _block_profiles(system, c_points)
    dprof = _block_profiles(system, d_points)
    for base, _ in cprof:
        if base in sigma2._fwd:
            raise GenericError(
                f"source block of {system.space.point_name(base)} already lies in the domain"
            )
    for base, _ in dprof:
        if base in sigma2._ran:
            raise GenericError(
                f"target block of {system.space.point_name(base)} already lies in the range"
            )
    buckets: dict = {}
    for base, offs in dprof:
        buckets.setdefault(_profile_class(system, offs), []).append((base, offs))
    g = system.spec.g
    for base, offs in cprof:
        cls = _profile_class(system, offs)
        if not buckets.get(cls):
            raise GenericError(
                f"no matching block profile for the block of {system.space.point_name(base)}"
            )
        dbase, doffs = buckets[cls].pop(0)
        align = None
        for t in system.sub:
            if frozenset(multiply(o, t) for o in offs) == doffs:
                align = t
                break
        if align is None:
            raise GenericError(
                f"offset profiles cannot be aligned at the block of {system.space.point_name(base)}"
            )
        sigma2.assign(base, system.g_apply(align, dbase))
    image = {sigma2.apply(p) for p in c_points}
    if image != set(d_points):
        raise GenericError("matched extension missed exact set equality")
    if reserved is not None:
        for p in itertools.chain(c_points, d_points):
            reserved.add(system.blocks.block_base_of(p))
    return sigma2


def extend_cover(
    system: AmalgamSystem,
    sigma: PartialPermutation,
    points,
    reserved: Optional[set] = None,
) -> PartialPermutation:
    """Pure extension pulling the given points into the range of the map."""
    sigma2 = sigma.copy()
    if reserved is None:
        reserved = _seed_reserved(sigma2)
    picker = _FreshPicker(system, reserved)
    for p in points:
        base = system.blocks.block_base_of(p)
        if base in sigma2._ran:
            continue
        u = picker.pick_plain()
        sigma2.assign(u, base)
        reserved.add(base)
    return sigma2


# -- certificates --------------------------------------------------------------------


@dataclass(frozen=True)
class WordRecord:
    text: str
    start: int
    trace: tuple[int, ...]
    endpoint: int


@dataclass(frozen=True)
class MatchRecord:
    pair_index: int
    size: int
    c_indices: tuple[int, ...]        # workspace indices
    d_x_indices: tuple[int, ...]      # workspace indices of the transported set
    d_y_indices: tuple[int, ...]      # indices in the H carrier
    g_ratios: tuple[tuple[str, Fraction], ...]
    h_ratios: tuple[tuple[str, Fraction], ...]


@dataclass(frozen=True)
class Certificate:
    max_len: int
    eps: Fraction
    prefix: int
    g_radius: Optional[int]
    h_radius: Optional[int]
    words: tuple[WordRecord, ...]
    matches: tuple[MatchRecord, ...]
    digest: str


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    failure: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def _word_reps(system: AmalgamSystem, g_radius: Optional[int], h_radius: Optional[int]):
    spec = system.spec
    g_reps = None
    h_reps = None
    if spec.g.order is None:
        if g_radius is None:
            raise GenericError("the G factor is infinite; a word ball radius is required")
        g_reps = _ball_elements(spec.g, g_radius)
    if spec.h.order is None:
        if h_radius is None:
            raise GenericError("the H factor is infinite; a word ball radius is required")
        h_reps = _ball_elements(spec.h, h_radius)
    return g_reps, h_reps


def build_generic(
    spec: AmalgamSpec,
    witness: ConstructionWitness,
    max_len: int,
    eps,
    prefix: int = 64,
    g_radius: Optional[int] = 2,
    h_radius: Optional[int] = 2,
    matches: int = 1,
    pair_cutoff: int = 512,
) -> tuple[PartialPermutation, Certificate]:
    """Grow the block map through all word constraints, then match Folner pairs.

    Words of syllable length <= max_len (syllables drawn from the full
    transversal for finite factors, from the given radius ball otherwise) are
    processed in deterministic order; afterwards the first matched pair whose
    saturations clear the domain and range is fixed exactly.  The returned
    certificate re-verifies from scratch before this function returns.
    """
    from . import folner

    eps = Fraction(eps)
    system = AmalgamSystem(spec, witness, audit_prefix=min(prefix, 64))
    g_reps, h_reps = _word_reps(system, g_radius, h_radius)
    words = [
        w
        for w in enumerate_words(spec, max_len, g_reps=g_reps, h_reps=h_reps)
        if not w.is_identity()
    ]

    sigma = PartialPermutation(system)
    reserved: set = set()
    records: list[WordRecord] = []
    space = system.space
    for w in words:
        sigma, ww = extend_avoid_word(system, sigma, w, reserved)
        records.append(
            WordRecord(
                text=word_to_text(w),
                start=space.index_of(ww.start),
                trace=tuple(space.index_of(p) for p in ww.trace),
                endpoint=space.index_of(ww.endpoint),
            )
        )

    pair_stream = folner.matched_pair_stream(witness, eps)
    match_records: list[MatchRecord] = []
    matched = 0
    for _ in range(pair_cutoff):
        pair = next(pair_stream)
        taken = set(sigma._fwd) | set(sigma._ran)
        c_bases = {system.blocks.block_base_of(p) for p in pair.c_saturation}
        d_x = frozenset(system.align.to_x(p) for p in pair.d_set.points)
        d_bases = {system.blocks.block_base_of(p) for p in d_x}
        if (c_bases | d_bases) & taken:
            continue
        sigma = extend_match_folner(system, sigma, pair.c_set.points, d_x, reserved)

        for h in spec.h.generators:
            moved = {system.h_apply(h, p) for p in d_x}
            sigma = extend_cover(system, sigma, moved, reserved)

        c_pts = pair.c_set.points
        g_ratios = []
        for g in spec.g.generators:
            moved = {system.g_apply(g, p) for p in c_pts}
            g_ratios.append(
                (spec.g.element_name(g), Fraction(len(c_pts ^ moved), len(c_pts)))
            )
        h_ratios = []
        for h in spec.h.generators:
            conj = set()
            for p in c_pts:
                q = sigma.apply(p)
                q = system.h_apply(h, q)
                q = sigma.apply_inv(q)
                if q is None:
                    raise GenericError("conjugated generator left the covered range")
                conj.add(q)
            d_moved = {system.h_apply(h, p) for p in d_x}
            if len(c_pts ^ conj) != len(d_x ^ d_moved):
                raise GenericError("Folner transfer equality failed")
            h_ratios.append(
                (spec.h.element_name(h), Fraction(len(c_pts ^ conj), len(c_pts)))
            )
        bad = [n for n, r in g_ratios + h_ratios if not r < eps]
        if bad:
            raise GenericError(f"matched set misses the ratio bound at {bad[0]}")

        yspace = witness.yprime_action.space
        match_records.append(
            MatchRecord(
                pair_index=pair.index,
                size=len(c_pts),
                c_indices=tuple(sorted(space.index_of(p) for p in c_pts)),
                d_x_indices=tuple(sorted(space.index_of(p) for p in d_x)),
                d_y_indices=tuple(sorted(yspace.index_of(p) for p in pair.d_set.points)),
                g_ratios=tuple(g_ratios),
                h_ratios=tuple(h_ratios),
            )
        )
        matched += 1
        if matched >= matches:
            break
    if matched < matches:
        raise GenericError(
            f"only {matched} of {matches} Folner pairs cleared the map within {pair_cutoff} candidates"
        )

    problem = audit_equivariance(sigma)
    if problem:
        raise GenericError(problem)
    cert = Certificate(
        max_len=max_len,
        eps=eps,
        prefix=prefix,
        g_radius=g_radius if spec.g.order is None else None,
        h_radius=h_radius if spec.h.order is None else None,
        words=tuple(records),
        matches=tuple(match_records),
        digest=sigma.digest(),
    )
    outcome = verify_certificate(sigma, cert, spec, witness)
    if not outcome:
        raise GenericError(f"fresh certificate failed verification: {outcome.failure}")
    return sigma, cert


def verify_certificate(
    sigma: PartialPermutation,
    cert: Certificate,
    spec: AmalgamSpec,
    witness: ConstructionWitness,
) -> VerifyResult:
    """Independent replay of every certificate claim against the map.

    Re-audits equivariance and injectivity over the whole domain, recomputes
    the digest, replays every word witness point by point, re-checks the
    matched set equalities and recomputes all ratios exactly.  The first
    discrepancy is named in the result.
    """
    system = sigma.system
    space = system.space
    if system.spec is not spec or system.witness is not witness:
        return VerifyResult(False, "certificate presented against foreign data")

    problem = audit_equivariance(sigma)
    if problem:
        return VerifyResult(False, problem)
    if sigma.digest() != cert.digest:
        return VerifyResult(False, "map digest differs from the certificate")

    for i, rec in enumerate(cert.words):
        try:
            w = word_from_text(spec, rec.text)
        except Exception as exc:
            return VerifyResult(False, f"word {i} does not parse: {exc}")
        x0 = space.point_at(rec.start)
        endpoint, trace = evaluate_word_trace(system, sigma, w, x0)
        if endpoint is None:
            return VerifyResult(False, f"word {i} ({rec.text}) runs outside the map")
        if tuple(space.index_of(p) for p in trace) != rec.trace:
            return VerifyResult(False, f"word {i} ({rec.text}) trace does not replay")
        if space.index_of(endpoint) != rec.endpoint:
            return VerifyResult(False, f"word {i} ({rec.text}) endpoint does not replay")
        if endpoint == x0:
            return VerifyResult(False, f"word {i} ({rec.text}) fixes its witness point")
        bases = [system.blocks.block_base_of(p) for p in trace]
        if len(set(bases)) != len(bases):
            return VerifyResult(False, f"word {i} ({rec.text}) trace blocks collide")

    yspace = witness.yprime_action.space
    for i, m in enumerate(cert.matches):
        c_pts = frozenset(space.point_at(j) for j in m.c_indices)
        d_x = frozenset(space.point_at(j) for j in m.d_x_indices)
        d_y = frozenset(yspace.point_at(j) for j in m.d_y_indices)
        if not (len(c_pts) == len(d_x) == len(d_y) == m.size):
            return VerifyResult(False, f"match {i}: recorded sizes are inconsistent")
        image = {sigma.apply(p) for p in c_pts}
        if None in image or image != set(d_x):
            return VerifyResult(False, f"match {i}: map image of C is not exactly D")
        if frozenset(system.align.to_x(p) for p in d_y) != d_x:
            return VerifyResult(False, f"match {i}: transported D differs from recorded D")
        for name, recorded in m.g_ratios:
            g = spec.g.parse_element(name)
            moved = {system.g_apply(g, p) for p in c_pts}
            got = Fraction(len(c_pts ^ moved), len(c_pts))
            if got != recorded:
                return VerifyResult(False, f"match {i}: G ratio at {name} is {got}, recorded {recorded}")
            if not got < cert.eps:
                return VerifyResult(False, f"match {i}: G ratio at {name} is not below eps")
        for name, recorded in m.h_ratios:
            h = spec.h.parse_element(name)
            conj = set()
            for p in c_pts:
                q = sigma.apply(p)
                if q is None:
                    return VerifyResult(False, f"match {i}: C left the domain at {name}")
                q = system.h_apply(h, q)
                q = sigma.apply_inv(q)
                if q is None:
                    return VerifyResult(False, f"match {i}: conjugation left the range at {name}")
                conj.add(q)
            got = Fraction(len(c_pts ^ conj), len(c_pts))
            d_moved = {system.h_apply(h, p) for p in d_x}
            raw = Fraction(len(d_x ^ d_moved), len(d_x))
            y_moved = {witness.yprime_action.apply(h, p) for p in d_y}
            raw_y = Fraction(len(d_y ^ y_moved), len(d_y))
            if got != raw or raw != raw_y:
                return VerifyResult(
                    False, f"match {i}: transfer equality fails at {name} ({got} vs {raw} vs {raw_y})"
                )
            if got != recorded:
                return VerifyResult(False, f"match {i}: H ratio at {name} is {got}, recorded {recorded}")
            if not got < cert.eps:
                return VerifyResult(False, f"match {i}: H ratio at {name} is not below eps")
    return VerifyResult(True, None)


# -- serialization -------------------------------------------------------------------


def sigma_to_text(sigma: PartialPermutation) -> str:
    system = sigma.system
    space = system.space
    rep = Report("sigma")
    blocks_sec = rep.section("blocks")
    seen_blocks = []
    for b in sigma.dom_bases():
        seen_blocks.append(system.blocks.locate(b)[0])
    for by in sorted(sigma._ran, key=lambda b: system.blocks.locate(b)[0]):
        seen_blocks.append(system.blocks.locate(by)[0])
    for k in sorted(set(seen_blocks)):
        members = sigma.system.blocks.members(k)
        blocks_sec[str(k)] = [space.index_of(p) for p in members]
    map_sec = rep.section("map")
    for b, y in sigma.items():
        map_sec[str(space.index_of(b))] = space.index_of(y)
    return rep.to_text()


def sigma_from_text(system: AmalgamSystem, text: str) -> PartialPermutation:
    rep = Report.parse(text)
    if rep.kind != "sigma":
        raise GenericError(f"not a sigma report: {rep.kind!r}")
    out = PartialPermutation(system)
    entries = []
    for k, v in rep.section("map").items():
        entries.append((int(k), int(v)))
    entries.sort()
    for dom_idx, img_idx in entries:
        out.assign(system.space.point_at(dom_idx), system.space.point_at(img_idx))
    return out


def certificate_to_text(cert: Certificate) -> str:
    rep = Report("certificate")
    sec = rep.section("params")
    sec["max_len"] = cert.max_len
    sec["eps"] = cert.eps
    sec["prefix"] = cert.prefix
    sec["g_radius"] = cert.g_radius if cert.g_radius is not None else "none"
    sec["h_radius"] = cert.h_radius if cert.h_radius is not None else "none"
    sec["digest"] = cert.digest
    sec["words"] = len(cert.words)
    sec["matches"] = len(cert.matches)
    for i, w in enumerate(cert.words):
        sec = rep.section(f"word {i}")
        sec["text"] = w.text
        sec["start"] = w.start
        sec["trace"] = list(w.trace)
        sec["endpoint"] = w.endpoint
    for i, m in enumerate(cert.matches):
        sec = rep.section(f"match {i}")
        sec["pair_index"] = m.pair_index
        sec["size"] = m.size
        sec["c_indices"] = list(m.c_indices)
        sec["d_x_indices"] = list(m.d_x_indices)
        sec["d_y_indices"] = list(m.d_y_indices)
        for name, r in m.g_ratios:
            sec[f"g_ratio {name}"] = r
        for name, r in m.h_ratios:
            sec[f"h_ratio {name}"] = r
    return rep.to_text()


def certificate_from_text(text: str) -> Certificate:
    rep = Report.parse(text)
    if rep.kind != "certificate":
        raise GenericError(f"not a certificate report: {rep.kind!r}")
    params = rep.section("params")

    def ints(s: str) -> tuple[int, ...]:
        s = s.strip()
        if not s:
            return ()
        return tuple(int(x.strip()) for x in s.split(","))

    words = []
    for i in range(int(params["words"])):
        sec = rep.section(f"word {i}")
        words.append(
            WordRecord(
                text=sec["text"],
                start=int(sec["start"]),
                trace=ints(sec["trace"]),
                endpoint=int(sec["endpoint"]),
            )
        )
    matches = []
    for i in range(int(params["matches"])):
        sec = rep.section(f"match {i}")
        g_ratios = []
        h_ratios = []
        for k, v in sec.items():
            if k.startswith("g_ratio "):
                g_ratios.append((k[len("g_ratio "):], parse_fraction(v)))
            elif k.startswith("h_ratio "):
                h_ratios.append((k[len("h_ratio "):], parse_fraction(v)))
        matches.append(
            MatchRecord(
                pair_index=int(sec["pair_index"]),
                size=int(sec["size"]),
                c_indices=ints(sec["c_indices"]),
                d_x_indices=ints(sec["d_x_indices"]),
                d_y_indices=ints(sec["d_y_indices"]),
                g_ratios=tuple(g_ratios),
                h_ratios=tuple(h_ratios),
            )
        )

    def radius(s: str) -> Optional[int]:
        return None if s == "none" else int(s)

    return Certificate(
        max_len=int(params["max_len"]),
        eps=parse_fraction(params["eps"]),
        prefix=int(params["prefix"]),
        g_radius=radius(params["g_radius"]),
        h_radius=radius(params["h_radius"]),
        words=tuple(words),
        matches=tuple(matches),
        digest=params["digest"],
    )
