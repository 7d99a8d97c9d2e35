"""Group actions on indexed countable point spaces.

Carriers are the regular action, coset spaces, disjoint unions and countably
many copies.  Every space assigns its points deterministic, prefix-stable
integer indices (lazily materialized under a single-writer discipline, then
read-shareable).  Checks never claim anything about infinitely many points:
verdicts are always "certified on a prefix" with the prefix recorded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .groups import (
    Element,
    FiniteSubgroup,
    GroupError,
    GroupSpec,
    Sublattice,
    inverse,
    multiply,
)


class ActionError(ValueError):
    pass


class PointSpace:
    """Base class: a countable carrier with a fixed group action."""

    group: GroupSpec
    size: Optional[int]

    def __init__(self) -> None:
        self._cache: list = []
        self._index: dict = {}
        self._iter: Optional[Iterator] = None
        self._exhausted = False

    def apply(self, g: Element, p):
        raise NotImplementedError

    def _enumerate_points(self) -> Iterator:
        raise NotImplementedError

    def point_key(self, p):
        raise NotImplementedError

    def point_name(self, p) -> str:
        raise NotImplementedError

    def contains(self, p) -> bool:
        raise NotImplementedError

    # -- lazy index table ------------------------------------------------------

    def _extend(self) -> bool:
        if self._exhausted:
            return False
        if self._iter is None:
            self._iter = self._enumerate_points()
        try:
            p = next(self._iter)
        except StopIteration:
            self._exhausted = True
            return False
        self._index[p] = len(self._cache)
        self._cache.append(p)
        return True

    def point_at(self, i: int):
        while i >= len(self._cache):
            if not self._extend():
                raise IndexError(f"space has only {len(self._cache)} points")
        return self._cache[i]

    def index_of(self, p) -> int:
        if not self.contains(p):
            raise ActionError(f"{p!r} is not a point of this space")
        while p not in self._index:
            if not self._extend():
                raise ActionError(f"{p!r} was not reached by the point enumeration")
        return self._index[p]

    def points(self) -> Iterator:
        i = 0
        while True:
            if i < len(self._cache):
                yield self._cache[i]
                i += 1
                continue
            if not self._extend():
                return

    def prefix(self, n: int) -> list:
        """The first n points (fewer when the space is smaller)."""
        out = []
        for i in range(n):
            try:
                out.append(self.point_at(i))
            except IndexError:
                break
        return out


class RegularSpace(PointSpace):
    """The group acting on itself by left multiplication."""

    def __init__(self, group: GroupSpec) -> None:
        super().__init__()
        self.group = group
        self.size = group.order

    def apply(self, g: Element, p):
        return multiply(g, p)

    def _enumerate_points(self):
        return self.group.elements()

    def point_key(self, p):
        return self.group.element_key(p)

    def point_name(self, p) -> str:
        return self.group.element_name(p)

    def contains(self, p) -> bool:
        return isinstance(p, Element) and p.group is self.group


class CosetSpace(PointSpace):
    """Left cosets of a subgroup, represented by canonical-minimum elements."""

    def __init__(self, group: GroupSpec, subgroup) -> None:
        super().__init__()
        self.group = group
        self.subgroup = subgroup
        if isinstance(subgroup, FiniteSubgroup):
            if subgroup.ambient is not group:
                raise ActionError("subgroup lives in a different group")
            self.size = None if group.order is None else group.order // len(subgroup)
        elif isinstance(subgroup, Sublattice):
            if subgroup.ambient is not group:
                raise ActionError("sublattice lives in a different group")
            self.size = subgroup.index
        else:
            raise ActionError(f"unsupported subgroup description {subgroup!r}")

    def rep(self, g: Element) -> Element:
        if isinstance(self.subgroup, Sublattice):
            return self.subgroup.reduce(g)
        cos = [multiply(g, n) for n in self.subgroup]
        return min(cos, key=self.group.element_key)

    def apply(self, g: Element, p):
        return self.rep(multiply(g, p))

    def _enumerate_points(self):
        seen = set()
        for g in self.group.elements():
            r = self.rep(g)
            if r not in seen:
                seen.add(r)
                yield r
                if self.size is not None and len(seen) == self.size:
                    return

    def point_key(self, p):
        return self.group.element_key(p)

    def point_name(self, p) -> str:
        return self.group.element_name(p)

    def contains(self, p) -> bool:
        return isinstance(p, Element) and p.group is self.group and self.rep(p) == p


class DisjointUnionSpace(PointSpace):
    """Disjoint union of spaces for the same group; points are (part, point).

    Indexing interleaves the parts round-robin, skipping exhausted finite
    parts, so the part tag round-trips through the integer index.
    """

    def __init__(self, parts: Sequence[PointSpace]) -> None:
        super().__init__()
        if not parts:
            raise ActionError("empty disjoint union")
        g = parts[0].group
        for s in parts:
            if s.group is not g:
                raise ActionError("all parts must carry the same group")
        self.parts = tuple(parts)
        self.group = g
        sizes = [s.size for s in self.parts]
        self.size = None if any(x is None for x in sizes) else sum(sizes)

    def apply(self, g: Element, p):
        i, q = p
        return (i, self.parts[i].apply(g, q))

    def _enumerate_points(self):
        cursors = [0] * len(self.parts)
        alive = [True] * len(self.parts)
        while any(alive):
            for i, part in enumerate(self.parts):
                if not alive[i]:
                    continue
                try:
                    p = part.point_at(cursors[i])
                except IndexError:
                    alive[i] = False
                    continue
                cursors[i] += 1
                yield (i, p)

    def point_key(self, p):
        i, q = p
        return (i, self.parts[i].point_key(q))

    def point_name(self, p) -> str:
        i, q = p
        return f"[{i}]{self.parts[i].point_name(q)}"

    def contains(self, p) -> bool:
        if not (isinstance(p, tuple) and len(p) == 2):
            return False
        i, q = p
        return isinstance(i, int) and 0 <= i < len(self.parts) and self.parts[i].contains(q)


class CopiesSpace(PointSpace):
    """Countably many copies of one space; points are (copy, point).

    Pair-diagonal interleaving visits every copy infinitely often with
    prefix-stable indices.
    """

    def __init__(self, base: PointSpace) -> None:
        super().__init__()
        self.base = base
        self.group = base.group
        self.size = None

    def apply(self, g: Element, p):
        i, q = p
        return (i, self.base.apply(g, q))

    def _enumerate_points(self):
        for total in itertools.count(0):
            for copy in range(total + 1):
                j = total - copy
                if self.base.size is not None and j >= self.base.size:
                    continue
                yield (copy, self.base.point_at(j))

    def point_key(self, p):
        i, q = p
        return (i, self.base.point_key(q))

    def point_name(self, p) -> str:
        i, q = p
        return f"[{i}]{self.base.point_name(q)}"

    def contains(self, p) -> bool:
        if not (isinstance(p, tuple) and len(p) == 2):
            return False
        i, q = p
        return isinstance(i, int) and i >= 0 and self.base.contains(q)


# -- actions --------------------------------------------------------------------


class ActionSpec:
    """A group acting on a point space; axioms are spot-checked at construction."""

    def __init__(self, group: GroupSpec, space: PointSpace, check_prefix: int = 8) -> None:
        if space.group is not group:
            raise ActionError("space carries a different group")
        self.group = group
        self.space = space
        ident = group.identity()
        pts = space.prefix(check_prefix)
        gens = list(group.generators)[:4]
        for p in pts:
            if space.apply(ident, p) != p:
                raise ActionError(f"identity moves the point {space.point_name(p)}")
            for g in gens:
                for h in gens:
                    if space.apply(g, space.apply(h, p)) != space.apply(multiply(g, h), p):
                        raise ActionError("action is not compatible with the group product")

    def apply(self, g: Element, p):
        return self.space.apply(g, p)

    def __repr__(self) -> str:
        return f"ActionSpec({self.group.name} on {type(self.space).__name__})"


_regular_spaces: dict[int, RegularSpace] = {}
_regular_actions: dict[int, ActionSpec] = {}


def regular_space(group: GroupSpec) -> RegularSpace:
    """The shared regular carrier for a group (memoized per group instance)."""
    key = id(group)
    if key not in _regular_spaces:
        _regular_spaces[key] = RegularSpace(group)
    return _regular_spaces[key]


def regular_action(group: GroupSpec) -> ActionSpec:
    key = id(group)
    if key not in _regular_actions:
        _regular_actions[key] = ActionSpec(group, regular_space(group))
    return _regular_actions[key]


def coset_action(group: GroupSpec, subgroup) -> ActionSpec:
    return ActionSpec(group, CosetSpace(group, subgroup))


def disjoint_union_action(actions: Sequence[ActionSpec]) -> ActionSpec:
    group = actions[0].group
    return ActionSpec(group, DisjointUnionSpace([a.space for a in actions]))


def copies_action(action: ActionSpec) -> ActionSpec:
    return ActionSpec(action.group, CopiesSpace(action.space))


# -- checks ----------------------------------------------------------------------


def orbit(act: ActionSpec, x, depth: int) -> set:
    """Points reachable from x by at most `depth` generator applications."""
    if depth < 0:
        raise ActionError("depth must be >= 0")
    got = {x}
    frontier = [x]
    for _ in range(depth):
        nxt = []
        for p in frontier:
            for g in act.group.generators:
                q = act.apply(g, p)
                if q not in got:
                    got.add(q)
                    nxt.append(q)
        if not nxt:
            break
        frontier = nxt
    return got


@dataclass(frozen=True)
class TransitivityReport:
    certified: bool
    prefix: int
    depth: int
    counterexample: Optional[object]

    def describe(self, space: PointSpace) -> str:
        if self.certified:
            return f"transitive on the first {self.prefix} points (depth {self.depth})"
        return (
            f"not transitive within depth {self.depth}: "
            f"{space.point_name(self.counterexample)} not reached"
        )


def is_transitive(act: ActionSpec, prefix: int, depth: int) -> TransitivityReport:
    """Check that the first `prefix` points lie in one orbit ball around point 0.

    Only a prefix claim; infinite spaces are never certified globally.
    """
    pts = act.space.prefix(prefix)
    if not pts:
        raise ActionError("empty space")
    reach = orbit(act, pts[0], depth)
    for p in pts:
        if p not in reach:
            return TransitivityReport(False, len(pts), depth, p)
    return TransitivityReport(True, len(pts), depth, None)


def supp_points(act: ActionSpec, sub: FiniteSubgroup, g: Element, prefix: int) -> list:
    """Points x among the first `prefix` whose block Ax misses g(Ax) entirely."""
    out = []
    for x in act.space.prefix(prefix):
        if block_displaced(act, sub, g, x):
            out.append(x)
    return out


def block_displaced(act: ActionSpec, sub: FiniteSubgroup, g: Element, x) -> bool:
    ax = {act.apply(a, x) for a in sub}
    gax = {act.apply(g, p) for p in ax}
    return not (ax & gax)


@dataclass(frozen=True)
class FreenessReport:
    free: bool
    prefix: int
    witness: Optional[tuple]      # (a, x) with a*x == x
    blocks: Optional["ABlockSpace"]


def is_free(act: ActionSpec, sub: FiniteSubgroup, prefix: int) -> FreenessReport:
    """Check a*x != x on an A-saturated prefix; on success return the blocks."""
    ident = act.group.identity()
    pts = list(act.space.prefix(prefix))
    seen = set(pts)
    for x in list(pts):
        for a in sub:
            q = act.apply(a, x)
            if q not in seen:
                seen.add(q)
                pts.append(q)
    for x in pts:
        for a in sub:
            if a != ident and act.apply(a, x) == x:
                return FreenessReport(False, len(pts), (a, x), None)
    return FreenessReport(True, len(pts), None, ABlockSpace(act, sub))


class ABlockSpace:
    """Partition of a space into free A-orbit blocks, scanned in index order.

    Each block gets the canonical-minimum member as its base point; blocks are
    numbered in order of first appearance along the point enumeration, so the
    numbering is deterministic however lazily the scan is driven.
    """

    def __init__(self, act: ActionSpec, sub: FiniteSubgroup) -> None:
        if sub.ambient is not act.group:
            raise ActionError("subgroup acts through a different group")
        self.act = act
        self.sub = sub
        self._loc: dict = {}          # point -> (block index, offset element)
        self._bases: list = []
        self._scan_pos = 0

    def _scan_next(self) -> bool:
        try:
            p = self.act.space.point_at(self._scan_pos)
        except IndexError:
            return False
        self._scan_pos += 1
        if p in self._loc:
            return True
        orb = [(a, self.act.apply(a, p)) for a in self.sub]
        pts = [q for _, q in orb]
        if len(set(pts)) != len(self.sub):
            raise ActionError(
                f"A-action is not free at {self.act.space.point_name(p)}"
            )
        base = min(pts, key=self.act.space.point_key)
        a0 = next(a for a, q in orb if q == base)
        a0inv = inverse(a0)
        k = len(self._bases)
        self._bases.append(base)
        for a, q in orb:
            self._loc[q] = (k, multiply(a, a0inv))
        return True

    def locate(self, p) -> tuple[int, Element]:
        """Block index and offset a with p == a * base."""
        while p not in self._loc:
            if not self._scan_next():
                raise ActionError(f"point {p!r} not reached by the block scan")
        return self._loc[p]

    def base(self, k: int):
        while k >= len(self._bases):
            if not self._scan_next():
                raise IndexError(f"only {len(self._bases)} blocks exist")
        return self._bases[k]

    def block_base_of(self, p):
        k, _ = self.locate(p)
        return self._bases[k]

    def members(self, k: int) -> list:
        b = self.base(k)
        return [self.act.apply(a, b) for a in self.sub]

    def scanned_blocks(self) -> int:
        return len(self._bases)

    def saturate(self, points) -> frozenset:
        """Union of the full blocks of the given points."""
        out = set()
        for p in points:
            k, _ = self.locate(p)
            out.update(self.members(k))
        return frozenset(out)


# -- the witness construction -----------------------------------------------------


@dataclass
class ConstructionWitness:
    """Everything the permutation builder needs from the two actions.

    X is the regular G-carrier; the H carrier is the group itself disjoint
    union countably many copies of the supplied H-set.  The report certifies
    transitivity, block displacement richness, freeness and the matched
    disjoint Folner pair supply on finite prefixes.
    """

    g: GroupSpec
    h: GroupSpec
    a_in_g: FiniteSubgroup
    a_in_h: FiniteSubgroup
    phi: object                     # SubgroupIso
    x_action: ActionSpec
    y_action: ActionSpec
    yprime_action: ActionSpec
    report: "object"

    def y_copies_part(self) -> int:
        """Index of the copies part inside the H carrier."""
        return 1

    def lift_to_copies(self, copy: int, y) -> object:
        """Place a point of the base H-set into a numbered copy of it."""
        return (1, (copy, y))


def build_aprime_witness(
    g: GroupSpec,
    h: GroupSpec,
    a_in_g: FiniteSubgroup,
    a_in_h: FiniteSubgroup,
    phi,
    y_action: ActionSpec,
    prefix: int = 200,
    depth: Optional[int] = None,
    displacement_radius: int = 2,
    min_displaced: int = 8,
    eps=None,
    check_pairs: int = 2,
):
    """Assemble and certify the inputs for the permutation construction.

    Returns (x_action, yprime_action, report); the full bundle is available
    via `make_witness`.  Freeness of the identified subgroup on the supplied
    H-set is a hard precondition; the other conditions are certified on the
    requested prefix and reported, never assumed.
    """
    w = make_witness(
        g, h, a_in_g, a_in_h, phi, y_action,
        prefix=prefix, depth=depth,
        displacement_radius=displacement_radius,
        min_displaced=min_displaced,
        eps=eps, check_pairs=check_pairs,
    )
    return w.x_action, w.yprime_action, w.report


def make_witness(
    g: GroupSpec,
    h: GroupSpec,
    a_in_g: FiniteSubgroup,
    a_in_h: FiniteSubgroup,
    phi,
    y_action: ActionSpec,
    prefix: int = 200,
    depth: Optional[int] = None,
    displacement_radius: int = 2,
    min_displaced: int = 8,
    eps=None,
    check_pairs: int = 2,
) -> ConstructionWitness:
    from fractions import Fraction

    from . import folner
    from .report import Report

    if a_in_g.ambient is not g or a_in_h.ambient is not h:
        raise ActionError("identified subgroups must live in the two factors")
    if y_action.group is not h:
        raise ActionError("the supplied set must carry the H action")
    if g.order is not None:
        raise ActionError("the G factor must be infinite for this construction")
    free_y = is_free(y_action, a_in_h, prefix)
    if not free_y.free:
        a, x = free_y.witness
        raise ActionError(
            f"identified subgroup does not act freely on the supplied H-set: "
            f"{h.element_name(a)} fixes {y_action.space.point_name(x)}"
        )

    x_action = regular_action(g)
    yprime_action = disjoint_union_action([regular_action(h), copies_action(y_action)])

    if eps is None:
        eps = Fraction(1, 4)
    if depth is None:
        depth = prefix

    rep = Report("premise-check")
    sec = rep.section("inputs")
    sec["g"] = g.name
    sec["h"] = h.name
    sec["subgroup_order"] = len(a_in_g)
    sec["prefix"] = prefix

    trans = is_transitive(x_action, prefix, depth)
    sec = rep.section("transitivity")
    sec["space"] = "regular-G"
    sec["prefix"] = trans.prefix
    sec["verdict"] = "certified-on-prefix" if trans.certified else "counterexample"
    if not trans.certified:
        sec["counterexample"] = x_action.space.point_name(trans.counterexample)

    sec = rep.section("displacement")
    sec["radius"] = displacement_radius
    sec["threshold"] = min_displaced
    ok_disp = True
    for spec_name, act, sub, ball_group in (
        ("g-side", x_action, a_in_g, g),
        ("h-side", yprime_action, a_in_h, h),
    ):
        tested = 0
        worst = None
        for cand in _ball_elements(ball_group, displacement_radius):
            if cand in sub:
                continue
            moved = len(supp_points(act, sub, cand, prefix))
            tested += 1
            if worst is None or moved < worst:
                worst = moved
            if moved < min_displaced:
                ok_disp = False
                sec[f"{spec_name}_thin_element"] = ball_group.element_name(cand)
        sec[f"{spec_name}_elements_tested"] = tested
        sec[f"{spec_name}_min_displaced"] = worst if worst is not None else "n/a"
    sec["verdict"] = "certified-on-prefix" if ok_disp else "failed"

    free_x = is_free(x_action, a_in_g, prefix)
    free_yp = is_free(yprime_action, a_in_h, prefix)
    sec = rep.section("freeness")
    sec["x_verdict"] = "free-on-prefix" if free_x.free else "fixed-point"
    sec["yprime_verdict"] = "free-on-prefix" if free_yp.free else "fixed-point"
    if not (free_x.free and free_yp.free):
        raise ActionError("free A-action certification failed")

    witness = ConstructionWitness(
        g=g, h=h, a_in_g=a_in_g, a_in_h=a_in_h, phi=phi,
        x_action=x_action, y_action=y_action,
        yprime_action=yprime_action, report=rep,
    )

    sec = rep.section("folner-pairs")
    sec["epsilon"] = eps
    pairs = folner.matched_pair_stream(witness, eps)
    shown = []
    for k in range(check_pairs):
        pair = next(pairs)
        shown.append(pair)
        sec[f"pair{k}_size"] = len(pair.c_set.points)
        sec[f"pair{k}_sizes_equal"] = len(pair.c_set.points) == len(pair.d_set.points)
        sec[f"pair{k}_c_folner"] = pair.c_report.verdict
        sec[f"pair{k}_d_folner"] = pair.d_report.verdict
    disjoint = True
    for i in range(len(shown)):
        for j in range(i + 1, len(shown)):
            if shown[i].c_saturation & shown[j].c_saturation:
                disjoint = False
            if shown[i].d_saturation & shown[j].d_saturation:
                disjoint = False
    sec["saturations_pairwise_disjoint"] = disjoint
    sec["verdict"] = (
        "certified-on-prefix"
        if disjoint and all(
            p.c_report.verdict and p.d_report.verdict
            and len(p.c_set.points) == len(p.d_set.points)
            for p in shown
        )
        else "failed"
    )
    return witness


def _ball_elements(group: GroupSpec, radius: int) -> list[Element]:
    """Elements of word length <= radius in the group generators."""
    got = {group.identity()}
    frontier = [group.identity()]
    for _ in range(radius):
        nxt = []
        for p in frontier:
            for s in group.generators:
                q = multiply(p, s)
                if q not in got:
                    got.add(q)
                    nxt.append(q)
        frontier = nxt
    return sorted(got, key=group.element_key)
