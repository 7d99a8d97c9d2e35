"""Batch command-line surface.

Subcommands: ratio, match-folner, prescribed-folner, check-aprime,
build-action, bass-serre, presets.  Reports are deterministic structured
text (byte-identical for identical configs); rationals cross the boundary
only as "p/q" strings.  Exit codes: 0 verified success, 2 verification or
construction failure, 1 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import re
import sys
from fractions import Fraction

from .actions import ActionError, make_witness, regular_action, regular_space
from .amalgam import AmalgamError, make_double, word_to_text
from .bass_serre import (
    BassSerreError,
    check_hypotheses,
    export_graph_text,
    quotient_graph,
    witness_circuit,
)
from .config import ConfigError, parse_amalgam_config, parse_group_config
from .folner import (
    FolnerError,
    FolnerSet,
    cayley_ball,
    is_folner,
    match_cardinalities,
    prescribed_size_folner,
    ratio,
)
from .generic import GenericError, build_generic, certificate_to_text, sigma_to_text, verify_certificate
from .groups import FiniteSubgroup, GroupError
from .presets import AMALGAM_PRESETS, GROUP_PRESETS, load_amalgam, load_group
from .report import Report, render_value


class UsageError(ValueError):
    pass


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Exact "p/q" or integer string; decimal notation is rejected."""
    if not _RATIONAL_RE.match(text.strip()):
        raise UsageError(f"not an exact rational 'p/q': {text!r}")
    if "/" in text:
        p, _, q = text.partition("/")
        return Fraction(int(p), int(q))
    return Fraction(int(text))


def _resolve_group(name: str):
    if name.endswith(".ini") or os.sep in name:
        with open(name) as fh:
            return parse_group_config(fh.read(), resolve=_resolve_group)
    return load_group(name)


def _resolve_amalgam(name: str):
    if name.endswith(".ini") or os.sep in name:
        with open(name) as fh:
            return parse_amalgam_config(fh.read(), resolve=_resolve_group)
    return load_amalgam(name)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- ratio ---------------------------------------------------------------------------


def _ratio_set(args):
    if args.preset == "z-interval":
        g = load_group("z").spec
        pts = frozenset(g.element((i,)) for i in range(args.n))
    elif args.preset == "z2-box":
        g = load_group("z2").spec
        pts = frozenset(g.element((i, j)) for i in range(args.n) for j in range(args.n))
    elif args.preset == "z2-ball":
        g = load_group("z2").spec
        return g, cayley_ball(g, list(g.generators), args.k)
    else:
        raise UsageError(f"unknown ratio preset {args.preset!r}")
    if not pts:
        raise UsageError("the set is empty; pick n >= 1")
    return g, FolnerSet(regular_space(g), pts)


def cmd_ratio(args) -> int:
    g, fset = _ratio_set(args)
    act = regular_action(g)
    rep = Report("ratio")
    sec = rep.section("set")
    sec["preset"] = args.preset
    sec["size"] = len(fset.points)
    sec = rep.section("ratios")
    for gen in g.generators:
        sec[g.element_name(gen)] = ratio(act, fset, gen)
    _emit(args, rep.to_text())
    return 0


# -- match-folner --------------------------------------------------------------------


def cmd_match_folner(args) -> int:
    eps = parse_rational(args.eps)
    if eps <= 0:
        raise UsageError("eps must be positive")
    z = load_group("z").spec
    z2 = load_group("z2").spec
    act_c = regular_action(z)
    act_d = regular_action(z2)
    c0 = FolnerSet(act_c.space, frozenset(z.element((i,)) for i in range(args.c0_n)))

    def boxes():
        for n in range(1, args.box_limit + 1):
            yield FolnerSet(
                act_d.space,
                frozenset(z2.element((i, j)) for i in range(n) for j in range(n)),
            )

    res = match_cardinalities(
        act_c, c0, act_d, boxes(), eps, list(z.generators), list(z2.generators)
    )
    rep = res.to_report("match-folner")
    sec = rep.section("inputs")
    sec["c0_size"] = len(c0.points)
    sec["eps"] = eps
    sec["box_side"] = res.stream_index + 1
    sec = rep.section("translates")
    sec["count"] = res.d
    sec["first"] = [z.element_name(t) for t in res.placements[:8]]
    _emit(args, rep.to_text())
    return 0 if res.ok else 2


# -- prescribed-folner ---------------------------------------------------------------


def cmd_prescribed(args) -> int:
    bundle = _resolve_group(args.group)
    g = bundle.spec
    try:
        sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"sizes must be integers: {exc}") from exc
    rows = list(prescribed_size_folner(g, list(g.generators), sizes))
    rep = Report("prescribed-folner")
    sec = rep.section("inputs")
    sec["group"] = g.name
    sec["count"] = len(rows)
    ok = True
    for r in rows:
        sec = rep.section(f"set {r.n}")
        sec["target"] = r.target
        sec["size"] = len(r.points.points)
        sec["ball_radius"] = r.ball_radius
        sec["extra"] = r.extra
        sec["boundary"] = r.boundary
        sec["boundary_ratio"] = r.boundary_ratio
        sec["bound"] = r.bound
        sec["bound_holds"] = r.bound_holds
        ok = ok and r.bound_holds and len(r.points.points) == r.target
    rep.section("verdict")["all_exact_and_bounded"] = ok
    _emit(args, rep.to_text())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "size", "boundary", "ratio"])
            for r in rows:
                w.writerow([r.n, r.target, r.boundary, render_value(r.boundary_ratio)])
    return 0 if ok else 2


# -- check-aprime / build-action -------------------------------------------------------


def _witness_for(spec, args):
    return make_witness(
        spec.g, spec.h, spec.a_in_g, spec.a_in_h, spec.phi,
        regular_action(spec.h),
        prefix=args.prefix,
        eps=parse_rational(args.eps),
    )


def cmd_check_aprime(args) -> int:
    spec = _resolve_amalgam(args.preset)
    witness = _witness_for(spec, args)
    _emit(args, witness.report.to_text())
    verdicts = [
        sec.get("verdict", "n/a")
        for name, sec in witness.report.sections()
        if "verdict" in sec
    ]
    return 0 if all(v != "failed" for v in verdicts) else 2


def cmd_build_action(args) -> int:
    spec = _resolve_amalgam(args.preset)
    witness = _witness_for(spec, args)
    sigma, cert = build_generic(
        spec,
        witness,
        max_len=args.max_len,
        eps=parse_rational(args.eps),
        prefix=args.prefix,
        g_radius=args.g_radius,
        h_radius=args.h_radius,
        matches=args.matches,
    )
    outcome = verify_certificate(sigma, cert, spec, witness)
    rep = Report("build-action")
    sec = rep.section("run")
    sec["amalgam"] = spec.name
    sec["max_len"] = cert.max_len
    sec["eps"] = cert.eps
    sec["words_witnessed"] = len(cert.words)
    sec["matches"] = len(cert.matches)
    sec["map_size"] = len(sigma)
    sec["verified"] = outcome.ok
    if outcome.failure:
        sec["failure"] = outcome.failure
    _emit(args, rep.to_text())
    if args.cert_out:
        with open(args.cert_out, "w") as fh:
            fh.write(certificate_to_text(cert))
    if args.sigma_out:
        with open(args.sigma_out, "w") as fh:
            fh.write(sigma_to_text(sigma))
    return 0 if outcome.ok else 2


# -- bass-serre -------------------------------------------------------------------------


def _parse_subgroup(bundle, sub: str) -> FiniteSubgroup:
    spec = bundle.spec
    if sub == "all":
        if spec.order is None:
            raise UsageError("'all' needs a finite group")
        return FiniteSubgroup(spec, list(spec.elements()), name="all")
    if "," in sub:
        elems = [spec.parse_element(tok.strip()) for tok in sub.split(",")]
        return FiniteSubgroup(spec, elems, name=sub)
    return bundle.subgroup(sub)


def cmd_bass_serre(args) -> int:
    if args.mode != "double":
        raise UsageError(f"unknown mode {args.mode!r}; only 'double' is supported")
    bundle = _resolve_group(args.group)
    sub = _parse_subgroup(bundle, args.sub)
    rep = Report("bass-serre")
    sec = rep.section("inputs")
    sec["group"] = bundle.spec.name
    sec["subgroup_order"] = len(sub)
    try:
        d = make_double(bundle.spec, sub, name=f"double-{bundle.spec.name}")
    except AmalgamError as exc:
        sec = rep.section("hypotheses")
        sec["ok"] = False
        sec["failure"] = str(exc)
        _emit(args, rep.to_text())
        return 2
    hyp = check_hypotheses(d)
    sec = rep.section("hypotheses")
    sec["ok"] = hyp.ok
    sec["surjective"] = hyp.surjective
    sec["injective_on_subgroup"] = hyp.injective_on_sub
    sec["index"] = hyp.index if hyp.index is not None else f">= {hyp.index_lower_bound}"
    for i, f in enumerate(hyp.failures):
        sec[f"failure{i}"] = f
    if not hyp.ok:
        _emit(args, rep.to_text())
        return 2
    q = quotient_graph(d)
    sec = rep.section("quotient-graph")
    sec["vertices"] = q.vertices
    sec["edges"] = q.edge_count
    sec["edges_exact"] = q.edge_count_exact
    sec["connected"] = q.connected
    sec["betti"] = q.betti if q.betti is not None else "unknown"
    sec["edge_reps"] = list(q.edge_reps)
    wc = witness_circuit(d)
    sec = rep.section("circuit-witness")
    sec["x"] = bundle.spec.element_name(wc.x)
    sec["word"] = word_to_text(wc.word)
    sec["folds_to_identity"] = wc.folds_to_identity
    sec["x_outside_subgroup"] = wc.x_outside_sub
    sec["tail_single_h_syllable"] = wc.tail_single_h_syllable
    sec["audit"] = wc.ok
    _emit(args, rep.to_text())
    if args.graph_out:
        with open(args.graph_out, "w") as fh:
            fh.write(export_graph_text(q))
    return 0 if wc.ok else 2


def cmd_presets(args) -> int:
    rep = Report("presets")
    sec = rep.section("groups")
    for name in GROUP_PRESETS:
        b = load_group(name)
        order = b.spec.order if b.spec.order is not None else "infinite"
        sec[name] = f"order {order}; subgroups: {' '.join(sorted(b.subgroups))}"
    sec = rep.section("amalgams")
    for name in AMALGAM_PRESETS:
        a = load_amalgam(name)
        sec[name] = f"{a.g.name} over subgroup of order {len(a.a_in_g)} with {a.h.name}"
    _emit(args, rep.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="amenact",
        description="Finite-scale amenable, transitive, faithful amalgam actions with exact certificates.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("ratio", help="exact boundary ratios of a standard set")
    q.add_argument("--preset", required=True, choices=["z-interval", "z2-box", "z2-ball"])
    q.add_argument("--n", type=int, default=10)
    q.add_argument("--k", type=int, default=5)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_ratio)

    q = sub.add_parser("match-folner", help="equal-cardinality Folner matching replay")
    q.add_argument("--eps", required=True, help="exact rational p/q")
    q.add_argument("--c0-n", type=int, default=10, dest="c0_n")
    q.add_argument("--box-limit", type=int, default=512, dest="box_limit")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_match_folner)

    q = sub.add_parser("prescribed-folner", help="Folner sets of exactly prescribed sizes")
    q.add_argument("--group", default="z2", help="group preset name or .ini path")
    q.add_argument("--sizes", required=True, help="comma-separated strictly ascending sizes")
    q.add_argument("--csv", help="write (n,size,boundary,ratio) rows here")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_prescribed)

    q = sub.add_parser("check-aprime", help="certify the construction premises for an amalgam")
    q.add_argument("--preset", required=True, help="amalgam preset name or .ini path")
    q.add_argument("--prefix", type=int, default=200)
    q.add_argument("--eps", default="1/4")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_check_aprime)

    q = sub.add_parser("build-action", help="build and verify a faithful-action certificate")
    q.add_argument("--preset", required=True, help="amalgam preset name or .ini path")
    q.add_argument("--max-len", type=int, default=2, dest="max_len")
    q.add_argument("--eps", default="1/4")
    q.add_argument("--prefix", type=int, default=200)
    q.add_argument("--g-radius", type=int, default=2, dest="g_radius")
    q.add_argument("--h-radius", type=int, default=2, dest="h_radius")
    q.add_argument("--matches", type=int, default=1)
    q.add_argument("--cert-out", dest="cert_out")
    q.add_argument("--sigma-out", dest="sigma_out")
    q.add_argument("--seed", type=int, default=0, help="recorded only; the build is deterministic")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_build_action)

    q = sub.add_parser("bass-serre", help="quotient graph and kernel rank of a double")
    q.add_argument("mode", choices=["double"])
    q.add_argument("--group", required=True, help="group preset name or .ini path")
    q.add_argument("--sub", required=True, help="subgroup preset, comma element list, or 'all'")
    q.add_argument("--graph-out", dest="graph_out")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_bass_serre)

    q = sub.add_parser("presets", help="list shipped presets")
    q.add_argument("what", choices=["list"])
    q.add_argument("--out")
    q.set_defaults(fn=cmd_presets)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (UsageError, ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FolnerError, GenericError, BassSerreError, AmalgamError, ActionError, GroupError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
