"""Deterministic structured-text reports.

Reports are ordered sections of key/value lines.  Values are rendered
exactly: integers as decimals, rationals as ``p/q``, booleans as
``true``/``false``.  Rendering the same report twice yields byte-identical
text; no floats, timestamps or environment data ever appear.
"""

from __future__ import annotations

from fractions import Fraction


def render_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (list, tuple)):
        return ", ".join(render_value(x) for x in v)
    return str(v)


def parse_fraction(s: str) -> Fraction:
    """Parse an exact rational "p/q" or integer string; decimals are rejected."""
    s = s.strip()
    if "/" in s:
        num, _, den = s.partition("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


class Section(dict):
    """Ordered key/value block; insertion order is the output order."""


class Report:
    def __init__(self, kind: str) -> None:
        self.kind = kind
        self._sections: list[tuple[str, Section]] = []

    def section(self, name: str) -> Section:
        for n, sec in self._sections:
            if n == name:
                return sec
        sec = Section()
        self._sections.append((name, sec))
        return sec

    def sections(self):
        return list(self._sections)

    def to_text(self) -> str:
        lines = [f"[report {self.kind}]"]
        for name, sec in self._sections:
            lines.append("")
            lines.append(f"[{name}]")
            for k, v in sec.items():
                lines.append(f"{k} = {render_value(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Report":
        rep = None
        sec = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("[report ") and line.endswith("]"):
                rep = cls(line[len("[report "):-1])
                continue
            if line.startswith("[") and line.endswith("]"):
                if rep is None:
                    raise ValueError("section before the report header")
                sec = rep.section(line[1:-1])
                continue
            if "=" not in line:
                raise ValueError(f"unparseable report line {raw!r}")
            if rep is None or sec is None:
                raise ValueError("key line outside any section")
            k, _, v = line.partition("=")
            sec[k.strip()] = v.strip()
        if rep is None:
            raise ValueError("missing report header")
        return rep
