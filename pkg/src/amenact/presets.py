"""Shipped presets: groups, subgroups and amalgams from versioned config files.

The .ini files under ``presets/`` are the runtime source of truth and are
loaded through the same parser that handles user-supplied configs.  Table
builders for cyclic, dihedral, permutation and quaternion groups live here so
tests can cross-check the shipped tables against independent constructions.
"""

from __future__ import annotations

from importlib import resources

from .amalgam import AmalgamSpec
from .config import ConfigError, GroupBundle, parse_amalgam_config, parse_group_config

GROUP_PRESETS = (
    "z", "z2", "zxc2",
    "c2", "c3", "c4", "c6", "c8", "c12",
    "s3", "d4", "d6", "a4", "s4", "q8",
)

AMALGAM_PRESETS = ("zz", "zxc2-s3", "c4-c6")

_group_cache: dict[str, GroupBundle] = {}
_amalgam_cache: dict[str, AmalgamSpec] = {}


def _read(name: str) -> str:
    try:
        return (resources.files(__package__) / "presets" / name).read_text()
    except FileNotFoundError as exc:
        raise ConfigError(f"no preset file {name!r}") from exc


def load_group(name: str) -> GroupBundle:
    """Group preset by name (cached, so actions on it share one carrier)."""
    if name not in _group_cache:
        if name not in GROUP_PRESETS:
            raise ConfigError(
                f"unknown group preset {name!r} (available: {', '.join(GROUP_PRESETS)})"
            )
        _group_cache[name] = parse_group_config(_read(f"{name}.ini"), resolve=load_group)
    return _group_cache[name]


def load_amalgam(name: str) -> AmalgamSpec:
    if name not in _amalgam_cache:
        if name not in AMALGAM_PRESETS:
            raise ConfigError(
                f"unknown amalgam preset {name!r} (available: {', '.join(AMALGAM_PRESETS)})"
            )
        _amalgam_cache[name] = parse_amalgam_config(_read(f"am-{name}.ini"), resolve=load_group)
    return _amalgam_cache[name]


# -- independent table builders (also used to generate the shipped files) -----------


def cyclic_table(n: int) -> tuple[list[list[int]], list[str], list[int]]:
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    names = [str(i) for i in range(n)]
    gens = [1 % n, (n - 1) % n] if n > 1 else [0]
    return table, names, sorted(set(gens))


def _compose(p: tuple, q: tuple) -> tuple:
    """(p*q)(x) = p(q(x)): the right factor acts first."""
    return tuple(p[q[i]] for i in range(len(p)))


def perm_group_table(
    gens: list[tuple],
) -> tuple[list[list[int]], list[str], list[int]]:
    """Multiplication table of the permutation group generated by gens.

    Elements are named by their one-line images and listed in lexicographic
    order, which puts the identity first.
    """
    n = len(gens[0])
    ident = tuple(range(n))
    closure = {ident}
    frontier = [ident]
    sym_gens = list(gens) + [tuple(sorted(range(n), key=lambda i: g[i])) for g in gens]
    while frontier:
        nxt = []
        for p in frontier:
            for s in sym_gens:
                q = _compose(p, s)
                if q not in closure:
                    closure.add(q)
                    nxt.append(q)
        frontier = nxt
    elems = sorted(closure)
    index = {p: i for i, p in enumerate(elems)}
    table = [[index[_compose(p, q)] for q in elems] for p in elems]
    names = ["".join(str(x) for x in p) for p in elems]
    gen_idx = sorted({index[s] for s in sym_gens})
    return table, names, gen_idx


def quaternion_table() -> tuple[list[list[int]], list[str], list[int]]:
    units = ["1", "i", "j", "k"]
    mul = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("j", "1"): (1, "j"), ("k", "1"): (1, "k"),
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "i"): (-1, "k"),
        ("j", "k"): (1, "i"), ("k", "j"): (-1, "i"),
        ("k", "i"): (1, "j"), ("i", "k"): (-1, "j"),
    }
    elems = [(s, u) for u in units for s in (1, -1)]
    elems.sort(key=lambda e: (units.index(e[1]), -e[0]))

    def name(e):
        s, u = e
        return u if s == 1 else f"-{u}"

    index = {e: i for i, e in enumerate(elems)}

    def compose(a, b):
        s, u = mul[(a[1], b[1])]
        return (s * a[0] * b[0], u)

    table = [[index[compose(a, b)] for b in elems] for a in elems]
    names = [name(e) for e in elems]
    gens = [index[(1, "i")], index[(-1, "i")], index[(1, "j")], index[(-1, "j")]]
    return table, names, sorted(set(gens))


def dihedral_gens(n: int) -> list[tuple]:
    """Rotation and reflection of the n-gon as vertex permutations."""
    rot = tuple((i + 1) % n for i in range(n))
    refl = tuple((n - i) % n for i in range(n))
    return [rot, refl]
