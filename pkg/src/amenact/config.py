"""INI-style configuration parsing for groups, subgroups and amalgams.

The on-disk format is key-value with nested sections (configparser syntax).
Parse failures always name the offending key or section.  Bit-exactness of
the files is not required; element names are parsed through each group's own
canonical naming.
"""

from __future__ import annotations

import configparser
from typing import Callable, Optional

from .amalgam import AmalgamSpec
from .groups import (
    DirectProductGroup,
    Element,
    FiniteSubgroup,
    FiniteTableGroup,
    FreeAbelianGroup,
    GroupError,
    GroupSpec,
    SubgroupIso,
)


class ConfigError(ValueError):
    pass


def _parser(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # element names are case sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config does not parse: {exc}") from exc
    return cp


def _require(section, key: str, where: str) -> str:
    if key not in section:
        raise ConfigError(f"missing key {key!r} in section [{where}]")
    return section[key]


def _split_names(value: str) -> list[str]:
    return value.split()


class GroupBundle:
    """A parsed group together with its named subgroups."""

    def __init__(self, spec: GroupSpec, subgroups: dict[str, FiniteSubgroup]) -> None:
        self.spec = spec
        self.subgroups = subgroups

    def subgroup(self, name: str) -> FiniteSubgroup:
        if name not in self.subgroups:
            raise ConfigError(
                f"group {self.spec.name} has no subgroup preset {name!r} "
                f"(available: {', '.join(sorted(self.subgroups)) or 'none'})"
            )
        return self.subgroups[name]


def parse_group_config(
    text: str,
    resolve: Optional[Callable[[str], "GroupBundle"]] = None,
) -> GroupBundle:
    """Parse a group description; `resolve` supplies named factor presets."""
    cp = _parser(text)
    if "group" not in cp:
        raise ConfigError("missing section [group]")
    sec = cp["group"]
    kind = _require(sec, "kind", "group")
    name = _require(sec, "name", "group")

    if kind == "finite_table":
        names = _split_names(_require(sec, "elements", "group"))
        rows = []
        for nm in names:
            key = f"row_{nm}"
            row_names = _split_names(_require(sec, key, "group"))
            row = []
            for entry in row_names:
                if entry not in names:
                    raise ConfigError(f"key {key!r}: unknown element name {entry!r}")
                row.append(names.index(entry))
            rows.append(row)
        gen_names = _split_names(_require(sec, "generators", "group"))
        for nm in gen_names:
            if nm not in names:
                raise ConfigError(f"key 'generators': unknown element name {nm!r}")
        try:
            spec = FiniteTableGroup(
                rows, names=names, generators=[names.index(nm) for nm in gen_names], name=name
            )
        except GroupError as exc:
            raise ConfigError(f"section [group]: {exc}") from exc
    elif kind == "free_abelian":
        try:
            rank = int(_require(sec, "rank", "group"))
        except ValueError as exc:
            raise ConfigError("key 'rank': not an integer") from exc
        gens = None
        if "generators" in sec:
            gens = []
            tmp = FreeAbelianGroup(rank)
            for token in _split_names(sec["generators"]):
                try:
                    gens.append(tmp.parse_element(token).value)
                except GroupError as exc:
                    raise ConfigError(f"key 'generators': {exc}") from exc
        try:
            spec = FreeAbelianGroup(rank, generators=gens, name=name)
        except GroupError as exc:
            raise ConfigError(f"section [group]: {exc}") from exc
    elif kind == "direct_product":
        factor_names = _split_names(_require(sec, "factors", "group"))
        if resolve is None:
            raise ConfigError("key 'factors': no preset resolver available")
        comps = []
        for fn in factor_names:
            try:
                comps.append(resolve(fn).spec)
            except (ConfigError, KeyError) as exc:
                raise ConfigError(f"key 'factors': cannot resolve {fn!r}: {exc}") from exc
        try:
            spec = DirectProductGroup(comps, name=name)
        except GroupError as exc:
            raise ConfigError(f"section [group]: {exc}") from exc
    else:
        raise ConfigError(f"key 'kind': unknown group kind {kind!r}")

    subgroups: dict[str, FiniteSubgroup] = {}
    for section_name in cp.sections():
        if not section_name.startswith("subgroup "):
            continue
        sub_name = section_name[len("subgroup "):]
        elems = []
        for token in _split_names(_require(cp[section_name], "elements", section_name)):
            try:
                elems.append(spec.parse_element(token))
            except GroupError as exc:
                raise ConfigError(f"section [{section_name}]: {exc}") from exc
        try:
            subgroups[sub_name] = FiniteSubgroup(spec, elems, name=sub_name)
        except GroupError as exc:
            raise ConfigError(f"section [{section_name}]: {exc}") from exc
    return GroupBundle(spec, subgroups)


def _split_pair(token: str) -> tuple[str, str]:
    if "->" not in token:
        raise ConfigError(f"pair {token!r} lacks '->'")
    left, _, right = token.partition("->")
    if not left or not right:
        raise ConfigError(f"pair {token!r} is incomplete")
    return left, right


def parse_amalgam_config(
    text: str,
    resolve: Callable[[str], GroupBundle],
) -> AmalgamSpec:
    """Parse an amalgam description referring to group presets by name."""
    cp = _parser(text)
    if "amalgam" not in cp:
        raise ConfigError("missing section [amalgam]")
    sec = cp["amalgam"]
    name = _require(sec, "name", "amalgam")
    g_bundle = resolve(_require(sec, "g", "amalgam"))
    h_bundle = resolve(_require(sec, "h", "amalgam"))
    g, h = g_bundle.spec, h_bundle.spec
    if "identify" not in cp:
        raise ConfigError("missing section [identify]")
    idsec = cp["identify"]

    def parse_elems(key: str, spec: GroupSpec) -> list[Element]:
        out = []
        for token in _split_names(_require(idsec, key, "identify")):
            try:
                out.append(spec.parse_element(token))
            except GroupError as exc:
                raise ConfigError(f"key {key!r}: {exc}") from exc
        return out

    a_g = FiniteSubgroup(g, parse_elems("g_elements", g), name="A")
    a_h = FiniteSubgroup(h, parse_elems("h_elements", h), name="A")
    pairs = {}
    for token in _split_names(_require(idsec, "pairs", "identify")):
        left, right = _split_pair(token)
        try:
            pairs[g.parse_element(left)] = h.parse_element(right)
        except GroupError as exc:
            raise ConfigError(f"key 'pairs': {exc}") from exc
    try:
        phi = SubgroupIso(a_g, a_h, pairs)
        return AmalgamSpec(g, h, a_g, a_h, phi, name=name)
    except (GroupError, ValueError) as exc:
        raise ConfigError(f"section [identify]: {exc}") from exc
