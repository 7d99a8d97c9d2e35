"""Exact-rational Folner machinery.

Boundary ratios, strict epsilon checks, the equal-cardinality matching
procedure, disjointification of set sequences, Cayley balls with their edge
boundaries, and prescribed-size Folner sequences for polynomial-growth
groups.  Every verdict is computed with `fractions.Fraction`; floating point
never enters a comparison.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .actions import (
    ABlockSpace,
    ActionError,
    ActionSpec,
    CopiesSpace,
    PointSpace,
    RegularSpace,
    regular_space,
)
from .groups import (
    DirectProductGroup,
    Element,
    FiniteSubgroup,
    FiniteTableGroup,
    FreeAbelianGroup,
    GroupSpec,
    inverse,
    multiply,
)
from .report import Report


class FolnerError(ValueError):
    pass


@dataclass(frozen=True)
class FolnerSet:
    """A finite nonempty set of points of one space."""

    space: PointSpace
    points: frozenset

    def __post_init__(self) -> None:
        if not self.points:
            raise FolnerError("empty point set")

    def __len__(self) -> int:
        return len(self.points)

    def sorted_by_index(self) -> list:
        return sorted(self.points, key=self.space.index_of)

    def indices(self) -> list[int]:
        return sorted(self.space.index_of(p) for p in self.points)


def symmetric_difference(act: ActionSpec, c: FolnerSet, g: Element) -> int:
    moved = {act.apply(g, x) for x in c.points}
    return len(c.points ^ moved)


def ratio(act: ActionSpec, c: FolnerSet, g: Element) -> Fraction:
    """|C symdiff g.C| / |C| as an exact rational."""
    return Fraction(symmetric_difference(act, c, g), len(c.points))


@dataclass(frozen=True)
class FolnerReport:
    epsilon: Fraction
    ratios: tuple[tuple[Element, Fraction], ...]
    verdict: bool          # true iff every ratio < epsilon, strictly

    def worst(self) -> Optional[Fraction]:
        return max((r for _, r in self.ratios), default=None)


def is_folner(act: ActionSpec, c: FolnerSet, test_set: Sequence[Element], eps) -> FolnerReport:
    eps = Fraction(eps)
    rows = tuple((g, ratio(act, c, g)) for g in test_set)
    return FolnerReport(eps, rows, all(r < eps for _, r in rows))


def a_saturate(act: ActionSpec, sub: FiniteSubgroup, points: Iterable) -> frozenset:
    out = set()
    for x in points:
        for a in sub:
            out.add(act.apply(a, x))
    return frozenset(out)


# -- equal-cardinality matching ---------------------------------------------------


@dataclass
class MatchResult:
    c_prime: FolnerSet
    d_prime: FolnerSet
    lam: Fraction
    stream_index: int          # position of the accepted set in the stream
    big_size: int
    d: int                     # number of translates / copies
    r: int                     # deleted points
    placements: tuple          # translate elements or copy indices
    c0_report: FolnerReport
    scanned_report: FolnerReport
    c_report: FolnerReport
    d_report: FolnerReport
    size_ratio: Fraction       # |big| / |trimmed|, must be < 2
    deletion_ratio: Fraction   # r / |big|, must be < eps/8

    @property
    def ok(self) -> bool:
        return (
            len(self.c_prime.points) == len(self.d_prime.points)
            and self.c_report.verdict
            and self.d_report.verdict
            and self.size_ratio < 2
            and self.deletion_ratio < self.c_report.epsilon / 8
        )

    def to_report(self, name: str = "match") -> Report:
        rep = Report(name)
        sec = rep.section("parameters")
        sec["epsilon"] = self.c_report.epsilon
        sec["lambda"] = self.lam
        sec = rep.section("procedure")
        sec["stream_index"] = self.stream_index
        sec["big_size"] = self.big_size
        sec["translate_count"] = self.d
        sec["deleted"] = self.r if self.r else "0 (no deletion)"
        sec["deleted_rule"] = "canonically largest by point index"
        sec = rep.section("verification")
        sec["sizes_equal"] = len(self.c_prime.points) == len(self.d_prime.points)
        sec["size"] = len(self.c_prime.points)
        sec["c_folner"] = self.c_report.verdict
        sec["d_folner"] = self.d_report.verdict
        sec["size_ratio_lt_2"] = self.size_ratio < 2
        sec["size_ratio"] = self.size_ratio
        sec["deletion_ratio_lt_eps8"] = self.deletion_ratio < self.c_report.epsilon / 8
        sec["deletion_ratio"] = self.deletion_ratio
        return rep


def _scan_stream(
    act_d: ActionSpec,
    d_seq: Iterable[FolnerSet],
    e_test: Sequence[Element],
    eps: Fraction,
    lam: Fraction,
    small_size: int,
    scan_cutoff: int,
):
    last_reason = "stream was empty"
    for idx, dn in enumerate(d_seq):
        if idx >= scan_cutoff:
            raise FolnerError(f"stream scan cutoff {scan_cutoff} exceeded; last: {last_reason}")
        rep = is_folner(act_d, dn, e_test, eps / 4)
        if not rep.verdict:
            last_reason = f"set #{idx} not (eps/4)-Folner (worst ratio {rep.worst()})"
            continue
        if not (len(dn.points) > lam * small_size):
            last_reason = f"set #{idx} too small ({len(dn.points)} <= lambda*{small_size})"
            continue
        return idx, dn, rep
    raise FolnerError(f"stream exhausted: {last_reason}")


def _trim_largest(space: PointSpace, points: frozenset, r: int) -> frozenset:
    if r == 0:
        return points
    ordered = sorted(points, key=space.index_of)
    return frozenset(ordered[: len(ordered) - r])


def match_cardinalities(
    act_c: ActionSpec,
    c0: FolnerSet,
    act_d: ActionSpec,
    d_seq: Iterable[FolnerSet],
    eps,
    f_test: Sequence[Element],
    e_test: Sequence[Element],
    translate_cutoff: int = 10**6,
    scan_cutoff: int = 10**5,
) -> MatchResult:
    """Equal-cardinality Folner pair from a small set and a growing stream.

    Scans the stream for the first set that is (eps/4)-Folner and larger than
    lambda = max(8/eps, 2) times |c0|; Euclidean division gives d translates
    of c0 (greedy over the group enumeration, pairwise disjoint) on one side
    and the scanned set minus its r canonically-largest points on the other.
    The declared Folner quality of c0 is recorded, not enforced; the outputs
    are verified exactly.
    """
    eps = Fraction(eps)
    if not isinstance(act_c.space, RegularSpace):
        raise FolnerError("translates need the regular carrier on the small side")
    c0_report = is_folner(act_c, c0, f_test, eps)
    lam = max(Fraction(8) / eps, Fraction(2))
    idx, dn, scanned_report = _scan_stream(
        act_d, d_seq, e_test, eps, lam, len(c0.points), scan_cutoff
    )
    d_count, r = divmod(len(dn.points), len(c0.points))

    translates: list[Element] = []
    occupied: set = set()
    group = act_c.group
    for i, cand in enumerate(group.elements()):
        if i >= translate_cutoff:
            raise FolnerError(f"translate search cutoff {translate_cutoff} exceeded")
        shifted = {multiply(x, cand) for x in c0.points}
        if shifted & occupied:
            continue
        occupied.update(shifted)
        translates.append(cand)
        if len(translates) == d_count:
            break
    else:
        raise FolnerError("group enumeration ended before enough disjoint translates")

    c_prime = FolnerSet(act_c.space, frozenset(occupied))
    d_prime = FolnerSet(act_d.space, _trim_largest(act_d.space, dn.points, r))
    c_report = is_folner(act_c, c_prime, f_test, eps)
    d_report = is_folner(act_d, d_prime, e_test, eps)
    return MatchResult(
        c_prime=c_prime,
        d_prime=d_prime,
        lam=lam,
        stream_index=idx,
        big_size=len(dn.points),
        d=d_count,
        r=r,
        placements=tuple(translates),
        c0_report=c0_report,
        scanned_report=scanned_report,
        c_report=c_report,
        d_report=d_report,
        size_ratio=Fraction(len(dn.points), len(d_prime.points)),
        deletion_ratio=Fraction(r, len(dn.points)),
    )


def match_for_actions(
    act_c_copies: ActionSpec,
    c0: FolnerSet,
    act_d: ActionSpec,
    d_seq: Iterable[FolnerSet],
    eps,
    f_test: Sequence[Element],
    e_test: Sequence[Element],
    start_copy: int = 0,
    scan_cutoff: int = 10**5,
) -> MatchResult:
    """Actions version of the matching: copies replace group translates.

    c0 lives in the base space; the matched set consists of d copies of c0
    placed in d distinct copies inside the copies carrier.
    """
    eps = Fraction(eps)
    space = act_c_copies.space
    if not isinstance(space, CopiesSpace):
        raise FolnerError("the small side must act on a copies carrier")
    base = space.base
    for p in c0.points:
        if not base.contains(p):
            raise FolnerError("small set must live in the base space of the copies")
    base_act = ActionSpec(act_c_copies.group, base)
    c0_report = is_folner(base_act, c0, f_test, eps)
    lam = max(Fraction(8) / eps, Fraction(2))
    idx, dn, scanned_report = _scan_stream(
        act_d, d_seq, e_test, eps, lam, len(c0.points), scan_cutoff
    )
    d_count, r = divmod(len(dn.points), len(c0.points))
    copies = tuple(range(start_copy, start_copy + d_count))
    c_points = frozenset((copy, y) for copy in copies for y in c0.points)
    c_prime = FolnerSet(space, c_points)
    d_prime = FolnerSet(act_d.space, _trim_largest(act_d.space, dn.points, r))
    c_report = is_folner(act_c_copies, c_prime, f_test, eps)
    d_report = is_folner(act_d, d_prime, e_test, eps)
    return MatchResult(
        c_prime=c_prime,
        d_prime=d_prime,
        lam=lam,
        stream_index=idx,
        big_size=len(dn.points),
        d=d_count,
        r=r,
        placements=copies,
        c0_report=c0_report,
        scanned_report=scanned_report,
        c_report=c_report,
        d_report=d_report,
        size_ratio=Fraction(len(dn.points), len(d_prime.points)),
        deletion_ratio=Fraction(r, len(dn.points)),
    )


# -- disjointification -------------------------------------------------------------


def disjointify(
    g: GroupSpec,
    sub: FiniteSubgroup,
    c_seq: Iterable[FolnerSet],
    cutoff: int = 10**6,
) -> Iterator[FolnerSet]:
    """Right-translate each set so the A-saturations become pairwise disjoint.

    The first set passes through unchanged; each later set is shifted by the
    enumeration-least group element whose shifted A-saturation misses the
    union of the previous ones.  Right translation leaves every Folner ratio
    unchanged.
    """
    used: set = set()
    first = True
    for c in c_seq:
        if not isinstance(c.space, RegularSpace) or c.space.group is not g:
            raise FolnerError("disjointify needs sets in the regular carrier of the group")
        if first:
            shifted = c
            first = False
        else:
            shifted = None
            for i, cand in enumerate(g.elements()):
                if i >= cutoff:
                    raise FolnerError(f"translate search cutoff {cutoff} exceeded")
                pts = frozenset(multiply(x, cand) for x in c.points)
                sat = frozenset(multiply(a, x) for a in sub for x in pts)
                if not (sat & used):
                    shifted = FolnerSet(c.space, pts)
                    break
            if shifted is None:
                raise FolnerError("group enumeration ended before a disjoint shift appeared")
        used.update(multiply(a, x) for a in sub for x in shifted.points)
        yield shifted


# -- Cayley balls and boundaries ----------------------------------------------------


def _check_symmetric(group: GroupSpec, gens: Sequence[Element]) -> list[Element]:
    gens = list(dict.fromkeys(gens))
    for s in gens:
        group._require_owned(s)
        if inverse(s) not in gens:
            raise FolnerError(f"generating set is not symmetric (missing inverse of {s!r})")
    return gens


class BallStream:
    """Incremental Cayley ball enumerator; shells come out canonically sorted."""

    def __init__(self, group: GroupSpec, gens: Sequence[Element]) -> None:
        self.group = group
        self.gens = _check_symmetric(group, gens)
        self._shells: list[list[Element]] = [[group.identity()]]
        self._ball: set = {group.identity()}

    def shell(self, k: int) -> list[Element]:
        while len(self._shells) <= k:
            prev = self._shells[-1]
            nxt = set()
            for x in prev:
                for s in self.gens:
                    y = multiply(x, s)
                    if y not in self._ball:
                        nxt.add(y)
            shell = sorted(nxt, key=self.group.element_key)
            self._ball.update(shell)
            self._shells.append(shell)
        return self._shells[k]

    def ball_points(self, k: int) -> frozenset:
        self.shell(k)
        out = set()
        for j in range(k + 1):
            out.update(self._shells[j])
        return frozenset(out)

    def ball_size(self, k: int) -> int:
        self.shell(k)
        return sum(len(self._shells[j]) for j in range(k + 1))


def cayley_ball(group: GroupSpec, gens: Sequence[Element], k: int) -> FolnerSet:
    """All elements of word length <= k, as a set in the regular carrier."""
    if k < 0:
        raise FolnerError("radius must be >= 0")
    stream = BallStream(group, gens)
    return FolnerSet(regular_space(group), stream.ball_points(k))


def edge_boundary(group: GroupSpec, gens: Sequence[Element], c) -> int:
    """Directed Cayley edges (x, x*s) leaving the set, counted per generator."""
    gens = _check_symmetric(group, gens)
    pts = c.points if isinstance(c, FolnerSet) else frozenset(c)
    count = 0
    for x in pts:
        for s in gens:
            if multiply(x, s) not in pts:
                count += 1
    return count


@dataclass(frozen=True)
class PrescribedSet:
    n: int
    target: int
    points: FolnerSet
    ball_radius: int
    ball_size: int
    extra: int                      # points borrowed from the next shell
    boundary: int
    ball_boundary: int
    boundary_ratio: Fraction
    bound: Fraction                 # (1+|S|) * |bd B(k)| / |B(k)|
    bound_holds: bool


def _polynomial_growth_kind(group: GroupSpec) -> bool:
    if isinstance(group, FreeAbelianGroup):
        return True
    if isinstance(group, FiniteTableGroup):
        return True
    if isinstance(group, DirectProductGroup):
        return all(_polynomial_growth_kind(c) for c in group.components)
    return False


def prescribed_size_folner(
    group: GroupSpec,
    gens: Sequence[Element],
    sizes: Sequence[int],
) -> Iterator[PrescribedSet]:
    """Folner sets of exactly the prescribed sizes, with a verified bound.

    Each set is the largest Cayley ball not exceeding the target plus the
    canonically-least elements of the next shell; the produced boundary ratio
    is checked exactly against (1+|S|) times the ball's boundary ratio.
    """
    if not _polynomial_growth_kind(group):
        raise FolnerError(f"{group.name} is not a supported polynomial-growth kind")
    sizes = list(sizes)
    for prev, cur in zip(sizes, sizes[1:]):
        if cur <= prev:
            raise FolnerError(f"prescribed sizes must strictly ascend ({prev} then {cur})")
    if sizes and sizes[0] < 1:
        raise FolnerError("prescribed sizes must be positive")
    stream = BallStream(group, gens)
    gens = stream.gens
    space = regular_space(group)

    def run() -> Iterator[PrescribedSet]:
        k = 0
        for n, target in enumerate(sizes, start=1):
            while stream.ball_size(k + 1) <= target:
                k += 1
                if group.order is not None and stream.ball_size(k) >= group.order:
                    raise FolnerError(f"group too small for prescribed size {target}")
            while stream.ball_size(k) > target:
                k -= 1
            ball = stream.ball_points(k)
            extra = target - len(ball)
            kset = stream.shell(k + 1)[:extra]
            pts = frozenset(ball | set(kset))
            if len(pts) != target:
                raise FolnerError("internal sizing error")
            bnd = edge_boundary(group, gens, pts)
            ball_bnd = edge_boundary(group, gens, ball)
            bratio = Fraction(bnd, target)
            bound = (1 + len(gens)) * Fraction(ball_bnd, len(ball))
            yield PrescribedSet(
                n=n,
                target=target,
                points=FolnerSet(space, pts),
                ball_radius=k,
                ball_size=len(ball),
                extra=extra,
                boundary=bnd,
                ball_boundary=ball_bnd,
                boundary_ratio=bratio,
                bound=bound,
                bound_holds=bratio <= bound,
            )

    return run()


# -- matched disjoint pair supply for the permutation builder ------------------------


@dataclass
class MatchedPair:
    index: int
    c_set: FolnerSet               # in the regular G carrier
    d_set: FolnerSet               # in the H carrier (copies part)
    d_base_size: int
    copies: tuple[int, ...]
    d: int
    r: int
    raw_size: int
    c_report: FolnerReport
    d_report: FolnerReport
    size_ratio: Fraction
    deletion_ratio: Fraction
    c_saturation: frozenset
    d_saturation: frozenset


def _y_base_sets(witness, eps: Fraction, e_test: Sequence[Element]) -> Iterator[frozenset]:
    """Stream of (eps,E)-Folner sets in the base H-set, A-saturated."""
    y_act = witness.y_action
    space = y_act.space
    sub = witness.a_in_h
    if space.size is not None:
        full = frozenset(space.prefix(space.size))
        rep = is_folner(y_act, FolnerSet(space, full), e_test, eps)
        if not rep.verdict:
            raise FolnerError("finite H-set is not Folner for the H generators")
        while True:
            yield full
    if not isinstance(space, RegularSpace):
        raise FolnerError(
            "infinite H-sets are supported only as the regular carrier"
        )
    stream = BallStream(witness.h, list(witness.h.generators))
    k = 0
    while True:
        k += 1
        pts = a_saturate(y_act, sub, stream.ball_points(k))
        if is_folner(y_act, FolnerSet(space, pts), e_test, eps).verdict:
            yield pts


def matched_pair_stream(
    witness,
    eps,
    translate_cutoff: int = 10**6,
) -> Iterator[MatchedPair]:
    """Equal-size Folner pairs with pairwise disjoint A-saturations.

    The G side walks A-saturated Cayley balls (trimmed in whole A-blocks to
    hit the exact size, then right-translated apart); the H side places
    copies of a fixed-quality base set into fresh copies of the supplied
    H-set.  Every yielded pair is verified at eps with exact arithmetic.
    """
    eps = Fraction(eps)
    g = witness.g
    h = witness.h
    x_act = witness.x_action
    yp_act = witness.yprime_action
    x_space = x_act.space
    f_test = list(g.generators)
    e_test = list(h.generators)
    lam = max(Fraction(8) / eps, Fraction(2))
    sub_g = witness.a_in_g
    blocks = ABlockSpace(x_act, sub_g)

    y_bases = _y_base_sets(witness, eps, e_test)
    g_stream = BallStream(g, f_test)
    radius = 0
    copy_counter = 0
    used_x: set = set()

    for index in itertools.count(0):
        d_base = next(y_bases)
        need = lam * len(d_base)
        while True:
            radius += 1
            raw = a_saturate(x_act, sub_g, g_stream.ball_points(radius))
            if len(raw) <= need:
                continue
            if is_folner(x_act, FolnerSet(x_space, raw), f_test, eps / 4).verdict:
                break
        d_count, r = divmod(len(raw), len(d_base))
        if r % len(sub_g) != 0:
            raise FolnerError("saturated sizes must be multiples of the block size")

        # drop whole blocks from the top until exactly r points are gone
        trimmed = set(raw)
        while len(trimmed) > len(raw) - r:
            top = max(trimmed, key=x_space.index_of)
            k, _ = blocks.locate(top)
            for p in blocks.members(k):
                trimmed.discard(p)
        if len(trimmed) != len(raw) - r:
            raise FolnerError("block-aligned deletion failed to hit the exact size")

        shifted = None
        for i, cand in enumerate(g.elements()):
            if i >= translate_cutoff:
                raise FolnerError(f"translate search cutoff {translate_cutoff} exceeded")
            pts = frozenset(multiply(x, cand) for x in trimmed)
            if not (pts & used_x):
                shifted = pts
                break
        used_x.update(shifted)

        copies = tuple(range(copy_counter, copy_counter + d_count))
        copy_counter += d_count
        d_points = frozenset(witness.lift_to_copies(c, y) for c in copies for y in d_base)

        c_set = FolnerSet(x_space, shifted)
        d_set = FolnerSet(yp_act.space, d_points)
        c_report = is_folner(x_act, c_set, f_test, eps)
        d_report = is_folner(yp_act, d_set, e_test, eps)
        if len(c_set.points) != len(d_set.points):
            raise FolnerError("matched pair sizes differ")
        yield MatchedPair(
            index=index,
            c_set=c_set,
            d_set=d_set,
            d_base_size=len(d_base),
            copies=copies,
            d=d_count,
            r=r,
            raw_size=len(raw),
            c_report=c_report,
            d_report=d_report,
            size_ratio=Fraction(len(raw), len(trimmed)),
            deletion_ratio=Fraction(r, len(raw)),
            c_saturation=frozenset(shifted),
            d_saturation=a_saturate(yp_act, witness.a_in_h, d_points),
        )
