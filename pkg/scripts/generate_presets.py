#!/usr/bin/env python3
"""Regenerate the shipped preset .ini files from the table builders."""

from __future__ import annotations

import pathlib
import sys

SRC = pathlib.Path(__file__).resolve().parent.parent / "src"
sys.path.insert(0, str(SRC))

from amenact.presets import (  # noqa: E402
    cyclic_table,
    dihedral_gens,
    perm_group_table,
    quaternion_table,
)

OUT = SRC / "amenact" / "presets"


def table_ini(name: str, table, names, gen_idx, subgroups: dict[str, list[str]]) -> str:
    lines = ["[group]", "kind = finite_table", f"name = {name}"]
    lines.append("elements = " + " ".join(names))
    for i, nm in enumerate(names):
        lines.append(f"row_{nm} = " + " ".join(names[x] for x in table[i]))
    lines.append("generators = " + " ".join(names[i] for i in gen_idx))
    for sub_name, elems in subgroups.items():
        lines.append("")
        lines.append(f"[subgroup {sub_name}]")
        lines.append("elements = " + " ".join(elems))
    return "\n".join(lines) + "\n"


def write(name: str, text: str) -> None:
    (OUT / name).write_text(text)
    print("wrote", name)


def cyclic_subgroups(n: int) -> dict[str, list[str]]:
    subs = {"triv": ["0"]}
    d = 2
    while d < n:
        if n % d == 0:
            subs[f"c{d}"] = [str(i) for i in range(0, n, n // d)]
        d += 1
    subs["all"] = [str(i) for i in range(n)]
    return subs


def main() -> None:
    OUT.mkdir(exist_ok=True)

    for n in (2, 3, 4, 6, 8, 12):
        table, names, gens = cyclic_table(n)
        write(f"c{n}.ini", table_ini(f"c{n}", table, names, gens, cyclic_subgroups(n)))

    table, names, gens = perm_group_table([(1, 0, 2), (1, 2, 0)])
    write("s3.ini", table_ini("s3", table, names, gens, {
        "triv": ["012"],
        "c2": ["012", "102"],
        "c3": ["012", "120", "201"],
        "all": names,
    }))

    table, names, gens = perm_group_table(dihedral_gens(4))
    write("d4.ini", table_ini("d4", table, names, gens, {
        "triv": ["0123"],
        "center": ["0123", "2301"],
        "rot": ["0123", "1230", "2301", "3012"],
        "refl": ["0123", "0321"],
    }))

    table, names, gens = perm_group_table(dihedral_gens(6))
    write("d6.ini", table_ini("d6", table, names, gens, {
        "triv": ["012345"],
        "center": ["012345", "345012"],
        "rot": ["012345", "123450", "234501", "345012", "450123", "501234"],
    }))

    table, names, gens = perm_group_table([(1, 0, 3, 2), (1, 2, 0, 3)])
    write("a4.ini", table_ini("a4", table, names, gens, {
        "triv": ["0123"],
        "c2": ["0123", "1032"],
        "c3": ["0123", "1203", "2013"],
        "v4": ["0123", "1032", "2301", "3210"],
    }))

    table, names, gens = perm_group_table([(1, 0, 2, 3), (1, 2, 3, 0)])
    write("s4.ini", table_ini("s4", table, names, gens, {
        "triv": ["0123"],
        "c2": ["0123", "1023"],
        "c4": ["0123", "1230", "2301", "3012"],
        "v4": ["0123", "1032", "2301", "3210"],
        "s3": ["0123", "0213", "1023", "1203", "2013", "2103"],
    }))

    table, names, gens = quaternion_table()
    write("q8.ini", table_ini("q8", table, names, gens, {
        "triv": ["1"],
        "center": ["1", "-1"],
        "ci": ["1", "i", "-1", "-i"],
    }))

    write("z.ini", "\n".join([
        "[group]",
        "kind = free_abelian",
        "name = z",
        "rank = 1",
        "",
        "[subgroup triv]",
        "elements = (0)",
    ]) + "\n")

    write("z2.ini", "\n".join([
        "[group]",
        "kind = free_abelian",
        "name = z2",
        "rank = 2",
        "",
        "[subgroup triv]",
        "elements = (0,0)",
    ]) + "\n")

    write("zxc2.ini", "\n".join([
        "[group]",
        "kind = direct_product",
        "name = zxc2",
        "factors = z c2",
        "",
        "[subgroup triv]",
        "elements = ((0);0)",
        "",
        "[subgroup c2]",
        "elements = ((0);0) ((0);1)",
    ]) + "\n")

    write("am-zz.ini", "\n".join([
        "[amalgam]",
        "name = zz",
        "g = z",
        "h = z",
        "",
        "[identify]",
        "g_elements = (0)",
        "h_elements = (0)",
        "pairs = (0)->(0)",
    ]) + "\n")

    write("am-zxc2-s3.ini", "\n".join([
        "[amalgam]",
        "name = zxc2-s3",
        "g = zxc2",
        "h = s3",
        "",
        "[identify]",
        "g_elements = ((0);0) ((0);1)",
        "h_elements = 012 102",
        "pairs = ((0);0)->012 ((0);1)->102",
    ]) + "\n")

    write("am-c4-c6.ini", "\n".join([
        "[amalgam]",
        "name = c4-c6",
        "g = c4",
        "h = c6",
        "",
        "[identify]",
        "g_elements = 0 2",
        "h_elements = 0 3",
        "pairs = 0->0 2->3",
    ]) + "\n")


if __name__ == "__main__":
    main()
