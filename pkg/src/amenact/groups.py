"""Concrete computable groups with deterministic enumeration and exact equality.

Three kinds are supported: finite groups given by a multiplication table,
free abelian groups of finite rank, and direct products of the other kinds.
Every group fixes a canonical total order on its elements (table index,
lexicographic on integer vectors, lexicographic on components); ties anywhere
in the library are broken by that order.  All values are immutable after
construction and all operations are pure functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence


class GroupError(ValueError):
    """Raised for invalid group data or mixed-group operations."""


@dataclass(frozen=True)
class Element:
    """An element tagged by its owning group.

    Elements of different GroupSpec instances never compare equal and must
    never be combined; doing so raises GroupError.
    """

    group: "GroupSpec"
    value: object

    def __mul__(self, other: "Element") -> "Element":
        return multiply(self, other)

    def inverse(self) -> "Element":
        return inverse(self)

    def __repr__(self) -> str:
        return f"<{self.group.name}:{self.group.element_name(self)}>"


class GroupSpec:
    """Base class for concrete groups.  Instances are identity-hashable."""

    name: str

    # raw-value primitives supplied by each kind
    def _id_raw(self): ...
    def _mul_raw(self, a, b): ...
    def _inv_raw(self, a): ...
    def _key_raw(self, a): ...
    def _check_raw(self, a) -> bool: ...
    def _enumerate_raw(self) -> Iterator[object]: ...
    def _name_raw(self, a) -> str: ...
    def _parse_raw(self, s: str): ...

    order: Optional[int] = None  # None means infinite
    generators: tuple[Element, ...] = ()

    def __init__(self) -> None:
        self._enum_cache: list[Element] = []
        self._enum_index: dict[Element, int] = {}
        self._enum_iter: Optional[Iterator[object]] = None

    # -- element constructors ------------------------------------------------

    def element(self, value) -> Element:
        if not self._check_raw(value):
            raise GroupError(f"{value!r} is not a valid element of {self.name}")
        return Element(self, self._canon_raw(value))

    def _canon_raw(self, value):
        return value

    def identity(self) -> Element:
        return Element(self, self._id_raw())

    def element_key(self, g: Element):
        self._require_owned(g)
        return self._key_raw(g.value)

    def element_name(self, g: Element) -> str:
        return self._name_raw(g.value)

    def parse_element(self, s: str) -> Element:
        return self.element(self._parse_raw(s))

    def _require_owned(self, g: Element) -> None:
        if g.group is not self:
            raise GroupError(
                f"element of {g.group.name} used with group {self.name}"
            )

    # -- cached deterministic enumeration -------------------------------------

    def elements(self) -> Iterator[Element]:
        """Deterministic, duplicate-free, exhaustive element stream."""
        i = 0
        while True:
            if i < len(self._enum_cache):
                yield self._enum_cache[i]
                i += 1
                continue
            if not self._extend_enum():
                return

    def _extend_enum(self) -> bool:
        if self._enum_iter is None:
            self._enum_iter = self._enumerate_raw()
        try:
            raw = next(self._enum_iter)
        except StopIteration:
            return False
        g = Element(self, raw)
        self._enum_index[g] = len(self._enum_cache)
        self._enum_cache.append(g)
        return True

    def element_at(self, i: int) -> Element:
        while i >= len(self._enum_cache):
            if not self._extend_enum():
                raise IndexError(f"{self.name} has only {len(self._enum_cache)} elements")
        return self._enum_cache[i]

    def enum_index(self, g: Element) -> int:
        """Position of g in the enumeration stream."""
        self._require_owned(g)
        while g not in self._enum_index:
            if not self._extend_enum():
                raise GroupError(f"{g!r} not reached by enumeration of {self.name}")
        return self._enum_index[g]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


# -- public operations --------------------------------------------------------


def multiply(g: Element, h: Element) -> Element:
    if g.group is not h.group:
        raise GroupError(f"cannot multiply elements of {g.group.name} and {h.group.name}")
    return Element(g.group, g.group._mul_raw(g.value, h.value))


def inverse(g: Element) -> Element:
    return Element(g.group, g.group._inv_raw(g.value))


def power(g: Element, n: int) -> Element:
    """g**n by repeated squaring; n may be negative."""
    if n < 0:
        return power(inverse(g), -n)
    acc = g.group.identity()
    base = g
    while n:
        if n & 1:
            acc = multiply(acc, base)
        base = multiply(base, base)
        n >>= 1
    return acc


def enumerate_elements(spec: GroupSpec) -> Iterator[Element]:
    return spec.elements()


def coset_rep(g: Element, a: "FiniteSubgroup", side: str = "right") -> Element:
    """Canonical-minimum representative of the coset Ag (right) or gA (left).

    Idempotent: applying it to its own output returns the same element.
    """
    if a.ambient is not g.group:
        raise GroupError("subgroup ambient group differs from element's group")
    if side == "right":
        cos = [multiply(x, g) for x in a.elements]
    elif side == "left":
        cos = [multiply(g, x) for x in a.elements]
    else:
        raise GroupError(f"unknown coset side {side!r}")
    return min(cos, key=g.group.element_key)


def apply_hom(f: "Homomorphism", g: Element) -> Element:
    return f.apply(g)


# -- finite table groups ------------------------------------------------------


class FiniteTableGroup(GroupSpec):
    """Finite group given by a full multiplication table.

    The table is validated at construction: every row and column must be a
    permutation, an identity must exist, and associativity is checked
    exhaustively.  Each element stores one factorization into generators
    (found by closure BFS) so homomorphisms extend from generator images.
    """

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        names: Optional[Sequence[str]] = None,
        generators: Optional[Sequence[int]] = None,
        name: str = "table-group",
    ) -> None:
        super().__init__()
        self.name = name
        n = len(table)
        if n == 0:
            raise GroupError("empty multiplication table")
        self.table = tuple(tuple(row) for row in table)
        for row in self.table:
            if len(row) != n or sorted(row) != list(range(n)):
                raise GroupError(f"{name}: table row {row} is not a permutation of 0..{n-1}")
        for j in range(n):
            col = [self.table[i][j] for i in range(n)]
            if sorted(col) != list(range(n)):
                raise GroupError(f"{name}: table column {j} is not a permutation")
        ident = None
        for e in range(n):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n)):
                ident = e
                break
        if ident is None:
            raise GroupError(f"{name}: table has no identity element")
        self._ident = ident
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise GroupError(f"{name}: table not associative at ({a},{b},{c})")
        self._inv = [0] * n
        for a in range(n):
            self._inv[a] = self.table[a].index(ident)
        self.order = n
        if names is None:
            names = [str(i) for i in range(n)]
        if len(names) != n or len(set(names)) != n:
            raise GroupError(f"{name}: need {n} distinct element names")
        for nm in names:
            if not nm or any(ch in nm for ch in "();,|: \t"):
                raise GroupError(f"{name}: invalid element name {nm!r}")
        self.names = tuple(names)
        self._by_name = {nm: i for i, nm in enumerate(self.names)}

        if generators is None:
            generators = [i for i in range(n) if i != ident]
        gen_idx = list(dict.fromkeys(int(g) for g in generators))
        if not gen_idx:
            raise GroupError(f"{name}: generator list is empty")
        for g in gen_idx:
            if self._inv[g] not in gen_idx:
                raise GroupError(f"{name}: generators not closed under inverse (missing inverse of {names[g]})")
        # closure BFS, recording one factorization per element
        self._word: dict[int, tuple[int, ...]] = {ident: ()}
        frontier = [ident]
        while frontier:
            nxt = []
            for cur in frontier:
                for s in gen_idx:
                    t = self.table[cur][s]
                    if t not in self._word:
                        self._word[t] = self._word[cur] + (s,)
                        nxt.append(t)
            frontier = nxt
        if len(self._word) != n:
            raise GroupError(f"{name}: generators do not generate the group")
        self.generators = tuple(Element(self, g) for g in gen_idx)

    def _id_raw(self):
        return self._ident

    def _mul_raw(self, a, b):
        return self.table[a][b]

    def _inv_raw(self, a):
        return self._inv[a]

    def _key_raw(self, a):
        return a

    def _check_raw(self, a) -> bool:
        return isinstance(a, int) and 0 <= a < self.order

    def _enumerate_raw(self) -> Iterator[object]:
        return iter(range(self.order))

    def _name_raw(self, a) -> str:
        return self.names[a]

    def _parse_raw(self, s: str):
        if s not in self._by_name:
            raise GroupError(f"{self.name}: unknown element name {s!r}")
        return self._by_name[s]

    def factorization(self, g: Element) -> tuple[Element, ...]:
        """One word in the generators multiplying out to g."""
        self._require_owned(g)
        return tuple(Element(self, s) for s in self._word[g.value])


def closure(spec: GroupSpec, elems: Sequence[Element]) -> frozenset[Element]:
    """Subgroup generated by elems in a finite-table group."""
    if not isinstance(spec, FiniteTableGroup):
        raise GroupError("closure is only computed in finite table groups")
    got = {spec.identity()}
    frontier = list(got)
    gens = [e for e in elems] + [inverse(e) for e in elems]
    while frontier:
        nxt = []
        for cur in frontier:
            for s in gens:
                t = multiply(cur, s)
                if t not in got:
                    got.add(t)
                    nxt.append(t)
        frontier = nxt
    return frozenset(got)


# -- free abelian groups ------------------------------------------------------


class FreeAbelianGroup(GroupSpec):
    """Free abelian group of rank d; elements are integer d-vectors.

    Enumeration is BFS by word length in the given generators with canonical
    (lexicographic) order inside each shell.  The generator vectors must span
    the integer lattice, which is verified at construction.
    """

    def __init__(
        self,
        rank: int,
        generators: Optional[Sequence[Sequence[int]]] = None,
        name: Optional[str] = None,
    ) -> None:
        super().__init__()
        if rank < 1:
            raise GroupError("free abelian rank must be >= 1")
        self.rank = rank
        self.name = name or f"Z^{rank}"
        self.order = None
        if generators is None:
            generators = []
            for i in range(rank):
                e = [0] * rank
                e[i] = 1
                generators.append(tuple(e))
                generators.append(tuple(-x for x in e))
        gen_vecs = [tuple(int(x) for x in v) for v in generators]
        for v in gen_vecs:
            if len(v) != rank:
                raise GroupError(f"{self.name}: generator {v} has wrong length")
            if tuple(-x for x in v) not in gen_vecs:
                raise GroupError(f"{self.name}: generators not closed under inverse (missing -{v})")
        gen_vecs = list(dict.fromkeys(gen_vecs))
        self._basis_coeffs = _integer_basis_coefficients(gen_vecs, rank)
        self.generators = tuple(Element(self, v) for v in gen_vecs)

    def _id_raw(self):
        return (0,) * self.rank

    def _mul_raw(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def _inv_raw(self, a):
        return tuple(-x for x in a)

    def _key_raw(self, a):
        return a

    def _check_raw(self, a) -> bool:
        return (
            isinstance(a, tuple)
            and len(a) == self.rank
            and all(isinstance(x, int) for x in a)
        )

    def _canon_raw(self, value):
        return tuple(int(x) for x in value)

    def _enumerate_raw(self) -> Iterator[object]:
        gens = [g.value for g in self.generators]
        seen = {self._id_raw()}
        shell = [self._id_raw()]
        yield self._id_raw()
        while shell:
            nxt = set()
            for v in shell:
                for s in gens:
                    w = self._mul_raw(v, s)
                    if w not in seen:
                        nxt.add(w)
            shell = sorted(nxt)
            seen.update(shell)
            yield from shell

    def _name_raw(self, a) -> str:
        return "(" + ",".join(str(x) for x in a) + ")"

    def _parse_raw(self, s: str):
        s = s.strip()
        if not (s.startswith("(") and s.endswith(")")):
            raise GroupError(f"{self.name}: cannot parse element {s!r}")
        body = s[1:-1]
        try:
            vec = tuple(int(x) for x in body.split(","))
        except ValueError as exc:
            raise GroupError(f"{self.name}: cannot parse element {s!r}") from exc
        if len(vec) != self.rank:
            raise GroupError(f"{self.name}: element {s!r} has wrong rank")
        return vec

    def generator_coordinates(self, g: Element) -> list[int]:
        """Exponents over the generator list multiplying out to g."""
        self._require_owned(g)
        m = len(self.generators)
        coeffs = [0] * m
        for i, x in enumerate(g.value):
            for j in range(m):
                coeffs[j] += x * self._basis_coeffs[i][j]
        return coeffs


# -- direct products ----------------------------------------------------------


class DirectProductGroup(GroupSpec):
    """Direct product of component groups; element values are value tuples.

    Enumeration is diagonal over the component enumeration indices, so every
    component is exhausted even when some factors are infinite.
    """

    def __init__(self, components: Sequence[GroupSpec], name: Optional[str] = None) -> None:
        super().__init__()
        if len(components) < 2:
            raise GroupError("direct product needs at least two components")
        self.components = tuple(components)
        self.name = name or "x".join(c.name for c in self.components)
        orders = [c.order for c in self.components]
        self.order = None
        if all(o is not None for o in orders):
            o = 1
            for x in orders:
                o *= x
            self.order = o
        gens = []
        for i, comp in enumerate(self.components):
            for cg in comp.generators:
                val = tuple(
                    cg.value if j == i else c._id_raw()
                    for j, c in enumerate(self.components)
                )
                gens.append(Element(self, val))
        self.generators = tuple(gens)

    def _id_raw(self):
        return tuple(c._id_raw() for c in self.components)

    def _mul_raw(self, a, b):
        return tuple(c._mul_raw(x, y) for c, x, y in zip(self.components, a, b))

    def _inv_raw(self, a):
        return tuple(c._inv_raw(x) for c, x in zip(self.components, a))

    def _key_raw(self, a):
        return tuple(c._key_raw(x) for c, x in zip(self.components, a))

    def _check_raw(self, a) -> bool:
        return (
            isinstance(a, tuple)
            and len(a) == len(self.components)
            and all(c._check_raw(x) for c, x in zip(self.components, a))
        )

    def _canon_raw(self, value):
        return tuple(c._canon_raw(x) for c, x in zip(self.components, value))

    def _enumerate_raw(self) -> Iterator[object]:
        k = len(self.components)
        sizes = [c.order for c in self.components]
        for total in itertools.count(0):
            produced = False
            for split in _compositions(total, k):
                if any(sizes[i] is not None and split[i] >= sizes[i] for i in range(k)):
                    continue
                try:
                    vals = tuple(
                        self.components[i].element_at(split[i]).value for i in range(k)
                    )
                except IndexError:
                    continue
                produced = True
                yield vals
            if not produced and self.order is not None and total > sum(
                s for s in sizes if s is not None
            ):
                return

    def _name_raw(self, a) -> str:
        return "(" + ";".join(
            c._name_raw(x) for c, x in zip(self.components, a)
        ) + ")"

    def _parse_raw(self, s: str):
        s = s.strip()
        if not (s.startswith("(") and s.endswith(")")):
            raise GroupError(f"{self.name}: cannot parse element {s!r}")
        parts = _split_top_level(s[1:-1], ";")
        if len(parts) != len(self.components):
            raise GroupError(f"{self.name}: element {s!r} has wrong arity")
        return tuple(c._parse_raw(p) for c, p in zip(self.components, parts))

    def embed(self, i: int, g: Element) -> Element:
        """Embed a component element with identities elsewhere."""
        self.components[i]._require_owned(g)
        val = tuple(
            g.value if j == i else c._id_raw() for j, c in enumerate(self.components)
        )
        return Element(self, val)

    def project(self, i: int, g: Element) -> Element:
        self._require_owned(g)
        return Element(self.components[i], g.value[i])


def _compositions(total: int, k: int) -> Iterator[tuple[int, ...]]:
    """All k-tuples of non-negative ints summing to total, lexicographically."""
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _split_top_level(s: str, sep: str) -> list[str]:
    parts = []
    depth = 0
    cur = []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


# -- finite subgroups ----------------------------------------------------------


class FiniteSubgroup:
    """A finite subgroup listed element by element, in canonical order."""

    def __init__(self, ambient: GroupSpec, elements: Sequence[Element], name: str = "A") -> None:
        self.ambient = ambient
        self.name = name
        elems = list(elements)
        if not elems:
            raise GroupError("subgroup element list is empty")
        for g in elems:
            ambient._require_owned(g)
        if len(set(elems)) != len(elems):
            raise GroupError(f"subgroup {name}: duplicate elements")
        eset = set(elems)
        if ambient.identity() not in eset:
            raise GroupError(f"subgroup {name}: identity missing")
        for g in elems:
            if inverse(g) not in eset:
                raise GroupError(f"subgroup {name}: not closed under inverse at {g!r}")
            for h in elems:
                if multiply(g, h) not in eset:
                    raise GroupError(f"subgroup {name}: not closed under product at {g!r}*{h!r}")
        self.elements = tuple(sorted(elems, key=ambient.element_key))
        self._set = frozenset(self.elements)

    def __contains__(self, g: Element) -> bool:
        return g in self._set

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def __repr__(self) -> str:
        return f"FiniteSubgroup({self.name} <= {self.ambient.name}, n={len(self)})"


def trivial_subgroup(spec: GroupSpec) -> FiniteSubgroup:
    return FiniteSubgroup(spec, [spec.identity()], name="1")


# -- homomorphisms -------------------------------------------------------------


class Homomorphism:
    """Group homomorphism determined by images of the source generators.

    Relations of the source are verified at construction: exhaustively for
    finite table sources, via basis consistency and commuting images for free
    abelian sources, componentwise plus cross-commuting for products.
    """

    def __init__(
        self,
        source: GroupSpec,
        target: GroupSpec,
        images: dict[Element, Element],
        name: str = "hom",
    ) -> None:
        self.source = source
        self.target = target
        self.name = name
        for g, im in images.items():
            source._require_owned(g)
            target._require_owned(im)
        missing = [g for g in source.generators if g not in images]
        if missing:
            raise GroupError(f"{name}: no image given for generator {missing[0]!r}")
        self.images = dict(images)
        self._table_map: Optional[dict[object, Element]] = None
        self._basis_images: Optional[list[Element]] = None
        self._component_homs: Optional[list["Homomorphism"]] = None
        self._validate()

    def _validate(self) -> None:
        src = self.source
        if isinstance(src, FiniteTableGroup):
            table_map = {}
            for g in src.elements():
                acc = self.target.identity()
                for s in src.factorization(g):
                    acc = multiply(acc, self.images[s])
                table_map[g.value] = acc
            for a in src.elements():
                fa = table_map[a.value]
                for b in src.elements():
                    if multiply(fa, table_map[b.value]) != table_map[multiply(a, b).value]:
                        raise GroupError(
                            f"{self.name}: generator images do not respect the relations "
                            f"(fails at {a!r}*{b!r})"
                        )
            self._table_map = table_map
        elif isinstance(src, FreeAbelianGroup):
            gens = list(src.generators)
            for i, g in enumerate(gens):
                for h in gens[i + 1:]:
                    if multiply(self.images[g], self.images[h]) != multiply(self.images[h], self.images[g]):
                        raise GroupError(f"{self.name}: images of {g!r} and {h!r} do not commute")
            basis = []
            for i in range(src.rank):
                acc = self.target.identity()
                for j, g in enumerate(gens):
                    c = src._basis_coeffs[i][j]
                    if c:
                        acc = multiply(acc, power(self.images[g], c))
                basis.append(acc)
            self._basis_images = basis
            for g in gens:
                acc = self.target.identity()
                for i, x in enumerate(g.value):
                    if x:
                        acc = multiply(acc, power(basis[i], x))
                if acc != self.images[g]:
                    raise GroupError(
                        f"{self.name}: generator images are inconsistent at {g!r}"
                    )
        elif isinstance(src, DirectProductGroup):
            comp_homs = []
            for i, comp in enumerate(src.components):
                comp_images = {
                    cg: self.images[src.embed(i, cg)] for cg in comp.generators
                }
                comp_homs.append(
                    Homomorphism(comp, self.target, comp_images, name=f"{self.name}[{i}]")
                )
            # images of distinct components must commute in the target
            for i in range(len(src.components)):
                for j in range(i + 1, len(src.components)):
                    for gi in src.components[i].generators:
                        for gj in src.components[j].generators:
                            a = self.images[src.embed(i, gi)]
                            b = self.images[src.embed(j, gj)]
                            if multiply(a, b) != multiply(b, a):
                                raise GroupError(
                                    f"{self.name}: cross-component images do not commute"
                                )
            self._component_homs = comp_homs
        else:
            raise GroupError(f"{self.name}: unsupported source group kind")

    def apply(self, g: Element) -> Element:
        src = self.source
        src._require_owned(g)
        if self._table_map is not None:
            return self._table_map[g.value]
        if self._basis_images is not None:
            acc = self.target.identity()
            for i, x in enumerate(g.value):
                if x:
                    acc = multiply(acc, power(self._basis_images[i], x))
            return acc
        assert self._component_homs is not None
        acc = self.target.identity()
        assert isinstance(src, DirectProductGroup)
        for i, _ in enumerate(src.components):
            acc = multiply(acc, self._component_homs[i].apply(src.project(i, g)))
        return acc

    def __repr__(self) -> str:
        return f"Homomorphism({self.name}: {self.source.name} -> {self.target.name})"


def identity_hom(spec: GroupSpec) -> Homomorphism:
    return Homomorphism(spec, spec, {g: g for g in spec.generators}, name=f"id_{spec.name}")


class SubgroupIso:
    """Explicit isomorphism between two finite subgroups, as an element map.

    Validated to be a homomorphic bijection on the listed elements.
    """

    def __init__(self, src: FiniteSubgroup, dst: FiniteSubgroup, pairs: dict[Element, Element]) -> None:
        if len(src) != len(dst):
            raise GroupError("subgroup isomorphism needs equal orders")
        self.src = src
        self.dst = dst
        fwd = {}
        for a, b in pairs.items():
            if a not in src or b not in dst:
                raise GroupError(f"isomorphism pair {a!r}->{b!r} leaves the subgroups")
            fwd[a] = b
        if set(fwd) != set(src.elements) or set(fwd.values()) != set(dst.elements):
            raise GroupError("subgroup isomorphism must be a bijection on the listed elements")
        for a in src:
            for b in src:
                if fwd[multiply(a, b)] != multiply(fwd[a], fwd[b]):
                    raise GroupError(f"subgroup map is not homomorphic at {a!r}*{b!r}")
        self._fwd = fwd
        self._bwd = {v: k for k, v in fwd.items()}

    def forward(self, a: Element) -> Element:
        if a not in self._fwd:
            raise GroupError(f"{a!r} is outside the isomorphism domain")
        return self._fwd[a]

    def backward(self, b: Element) -> Element:
        if b not in self._bwd:
            raise GroupError(f"{b!r} is outside the isomorphism range")
        return self._bwd[b]

    def __repr__(self) -> str:
        return f"SubgroupIso({self.src.name} ~ {self.dst.name}, n={len(self.src)})"


def subgroup_iso_from_hom(src: FiniteSubgroup, dst: FiniteSubgroup, f: Homomorphism) -> SubgroupIso:
    """Restrict a group homomorphism to a subgroup isomorphism."""
    return SubgroupIso(src, dst, {a: f.apply(a) for a in src})


# -- integer lattice helpers ---------------------------------------------------


def _integer_basis_coefficients(gen_vecs: list[tuple[int, ...]], d: int) -> list[list[int]]:
    """For each standard basis vector e_i, integer coefficients over gen_vecs.

    Raises GroupError if the generators do not span the full lattice.
    """
    m = len(gen_vecs)
    # columns of M are the generator vectors; U tracks column operations
    M = [[gen_vecs[j][i] for j in range(m)] for i in range(d)]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def col_addmul(dst: int, src: int, q: int) -> None:
        for i in range(d):
            M[i][dst] -= q * M[i][src]
        for i in range(m):
            U[i][dst] -= q * U[i][src]

    def col_swap(a: int, b: int) -> None:
        for i in range(d):
            M[i][a], M[i][b] = M[i][b], M[i][a]
        for i in range(m):
            U[i][a], U[i][b] = U[i][b], U[i][a]

    for row in range(d):
        while True:
            pivots = [j for j in range(row, m) if M[row][j] != 0]
            if not pivots:
                raise GroupError("generator vectors do not span the lattice")
            j0 = min(pivots, key=lambda j: (abs(M[row][j]), j))
            col_swap(row, j0)
            done = True
            for j in range(row + 1, m):
                if M[row][j] != 0:
                    q = M[row][j] // M[row][row]
                    col_addmul(j, row, q)
                    if M[row][j] != 0:
                        done = False
            if done:
                break
        if M[row][row] < 0:
            for i in range(d):
                M[i][row] = -M[i][row]
            for i in range(m):
                U[i][row] = -U[i][row]

    # spanning iff the triangular diagonal is all ones
    for i in range(d):
        if M[i][i] != 1:
            raise GroupError("generator vectors do not span the lattice")

    coeffs = []
    for i in range(d):
        e = [1 if k == i else 0 for k in range(d)]
        y = [0] * d
        for r in range(d):
            s = e[r] - sum(M[r][c] * y[c] for c in range(r))
            y[r] = s  # diagonal is 1, division is exact
        x = [sum(U[r][c] * y[c] for c in range(d)) for r in range(m)]
        coeffs.append(x)
    return coeffs


class Sublattice:
    """Finite-index subgroup of a free abelian group, given by basis vectors."""

    def __init__(self, ambient: FreeAbelianGroup, basis: Sequence[Sequence[int]]) -> None:
        if not isinstance(ambient, FreeAbelianGroup):
            raise GroupError("sublattice needs a free abelian ambient group")
        self.ambient = ambient
        d = ambient.rank
        rows = [list(int(x) for x in v) for v in basis]
        for v in rows:
            if len(v) != d:
                raise GroupError(f"sublattice vector {v} has wrong length")
        self._hnf = _row_hnf(rows, d)
        det = 1
        for i in range(d):
            det *= self._hnf[i][i]
        if det == 0:
            raise GroupError("sublattice does not have finite index")
        self.index = abs(det)

    def reduce(self, g: Element) -> Element:
        """Canonical residue of g modulo the lattice."""
        self.ambient._require_owned(g)
        v = list(g.value)
        d = self.ambient.rank
        for i in range(d):
            q = v[i] // self._hnf[i][i]
            for k in range(d):
                v[k] -= q * self._hnf[i][k]
        return Element(self.ambient, tuple(v))

    def __contains__(self, g: Element) -> bool:
        return self.reduce(g).value == self.ambient._id_raw()


def _row_hnf(rows: list[list[int]], d: int) -> list[list[int]]:
    """Row-style Hermite normal form with positive diagonal (square case)."""
    work = [row[:] for row in rows if any(row)]
    out: list[list[int]] = []
    for col in range(d):
        while True:
            nz = [i for i, r in enumerate(work) if r[col] != 0]
            if not nz:
                raise GroupError("sublattice basis has rank deficiency")
            if len(nz) == 1:
                break
            nz.sort(key=lambda i: (abs(work[i][col]), tuple(work[i])))
            p = nz[0]
            for i in nz[1:]:
                q = work[i][col] // work[p][col]
                work[i] = [a - q * b for a, b in zip(work[i], work[p])]
            work = [r for r in work if any(r)]
        p = next(i for i, r in enumerate(work) if r[col] != 0)
        piv = work.pop(p)
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
    # canonicalize entries above each diagonal
    for i in range(d - 1, -1, -1):
        for j in range(i):
            q = out[j][i] // out[i][i]
            if q:
                for k in range(d):
                    out[j][k] -= q * out[i][k]
    return out
