"""Command-line front end.

Exit codes: 0 success (or non-empty intersection), 1 a negative answer or a
failed verdict, 2 a usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from math import isinf
from typing import Optional, Sequence

from . import generate as gen
from .digraph import Digraph, betti, branch_decomposition, core, is_forwards_immersion, rcore
from .errors import InvalidInput
from .fibre import labeled_product, structure_report
from .freegroup import (
    format_word,
    intersection_classes,
    maximal_cyclic_classes,
    parse_word,
    rank,
    relative_order,
    spectrum_superset,
    stallings_fold,
)
from .jsonio import SCHEMA, graph_from_json, graph_to_json, instance_from_json, instance_to_json, loads
from .longcycles import long_cycles, s_image
from .nei import nei, rabin_scott
from .verify import report_for
from .wgraph import extension_language, general_w_sinks, omega, w_sinks


class UsageError(Exception):
    pass


def _read(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    return loads(text)


def _read_graph(path: str) -> Digraph:
    return graph_from_json(_read(path))


def _read_pair(paths: Sequence[str]) -> tuple:
    """Two graph files, or one instance file holding both."""
    if len(paths) == 2:
        return _read_graph(paths[0]), _read_graph(paths[1])
    if len(paths) == 1:
        inst = instance_from_json(_read(paths[0]))
        if inst["lambda"] is None:
            raise UsageError("instance holds only one graph")
        return inst["gamma"], inst["lambda"]
    raise UsageError("expected two graph files or one instance file")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _word(text: str) -> tuple:
    """A loop word for graph commands: letters separated by commas or
    spaces, or a compact string of single-character letters."""
    text = text.strip()
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) == 1:
        parts = list(parts[0])
    return tuple(int(p) if p.lstrip("-").isdigit() else p for p in parts)


# -- subcommands --------------------------------------------------------------------
def cmd_graph(a) -> int:
    g = _read_graph(a.graph)
    if a.core:
        g = core(g)
    elif a.rcore:
        g = rcore(g)
    out = graph_to_json(g)
    dec = branch_decomposition(g)
    out["info"] = {
        "betti": list(betti(g)),
        "branch_vertices": len(dec.branch),
        "elements": len(dec.elements),
        "cycle_elements": len(dec.cycles),
        "deterministic": g.is_labeled and is_forwards_immersion(g),
    }
    _emit(out)
    return 0


def cmd_product(a) -> int:
    g, l = _read_pair(a.graphs)
    fp = labeled_product(g, l)
    p = fp.product
    if a.core:
        p = core(p)
    elif a.rcore:
        p = fp.theta
    out = {"schema": SCHEMA, "kind": "product", "product": graph_to_json(p)}
    code = 0
    if a.report:
        lc_g, lc_l = long_cycles(g), long_cycles(l)
        data = structure_report(fp, s_image(fp, lc_g, lc_l))
        out["checks"] = [c.as_dict() for c in data.checks]
        code = 0 if all(c.verdict for c in data.checks) else 1
    _emit(out)
    return code


def cmd_wgraph(a) -> int:
    g = _read_graph(a.graph)
    w = _word(a.w)
    om = omega(g, w, a.k)
    out = {
        "schema": SCHEMA,
        "kind": "wgraph",
        "w": list(w),
        "components": [
            {
                "vertices": [list(v) for v in c.vertices],
                "shape": c.shape,
                "max_w_length": c.max_w_length,
                "cycle_w_length": c.cycle_w_length,
                "meets_branch": c.meets_branch,
            }
            for c in om.components
        ],
    }
    if a.sinks:
        out["sinks"] = sorted(w_sinks(g, w), key=repr)
        shift, s = general_w_sinks(g, w)
        out["general_sinks"] = {"shift": shift, "sinks": sorted(s, key=repr)}
    if a.ext_lang:
        u, v = a.ext_lang.split(",")
        u = int(u) if u.lstrip("-").isdigit() else u
        lang = extension_language(g, w, u, int(v), a.side)
        out["extension_language"] = {"finite": sorted(lang.finite), "period": lang.period}
    _emit(out)
    return 0


def cmd_long_cycles(a) -> int:
    g = _read_graph(a.graph)
    lc = long_cycles(g, a.threshold)
    _emit({
        "schema": SCHEMA,
        "kind": "long_cycles",
        "threshold": lc.threshold,
        "betti1": lc.betti1,
        "cycles": [
            {"edges": list(c.edges), "loop": list(c.loop), "degree": c.degree} for c in lc.cycles
        ],
    })
    return 0


def cmd_nei(a) -> int:
    d1, d2 = _read_pair(a.automata)
    res = nei(d1, d2, record=bool(a.trace))
    out = {"schema": SCHEMA, "kind": "nei", **res.as_dict()}
    if a.oracle:
        out["oracle_agreement"] = rabin_scott(d1, d2) == res.answer
    if a.trace:
        with open(a.trace, "w", encoding="utf-8") as fh:
            json.dump([[kind, list(ef), x] for kind, ef, x in res.trace], fh, indent=1)
    _emit(out)
    if a.oracle and not out["oracle_agreement"]:
        return 2
    return 0 if res.answer else 1


def cmd_gen(a) -> int:
    rng = random.Random(a.seed)
    topo = a.topology
    if topo == "cyclic-family":
        k, m = a.m or 2, a.n or 2
        primes = a.primes or _first_primes(k + m)
        g, l, _ = gen.cyclic_family(k, m, primes)
        _emit(instance_to_json(g, l, expect={"core_components": k * m}))
        return 0
    if topo == "pair":
        g, l = gen.dfa_pair(rng, a.n or 300)
    elif topo in gen.DFA_FAMILIES or topo.replace("-", "_") in gen.DFA_FAMILIES:
        fam = topo.replace("-", "_")
        g, l = gen.dfa_instance(rng, fam, a.n or 300), gen.dfa_instance(rng, fam, a.n or 300)
    elif topo == "immersion":
        size = a.m or 8
        g, l = gen.random_immersion(rng, size), gen.random_immersion(rng, size)
    elif topo == "forwards-immersion":
        size = a.m or 8
        g, l = gen.random_forwards_immersion(rng, size), gen.random_forwards_immersion(rng, size)
    else:
        raise UsageError(f"unknown topology {topo!r}")
    _emit(instance_to_json(g, l, seed=a.seed, topology=topo))
    return 0


def _first_primes(n: int) -> list:
    out, x = [], 2
    while len(out) < n:
        if all(x % p for p in out):
            out.append(x)
        x += 1
    return out


def cmd_verify(a) -> int:
    rep = report_for(_read(a.instance), relative=not a.raw)
    _emit(rep)
    return 0 if rep["ok"] else 1


def cmd_subgroup(a) -> int:
    gens = [parse_word(t) for t in a.generators]
    A = stallings_fold(gens, a.rank)
    out: dict = {"schema": SCHEMA, "kind": "subgroup", "action": a.action}
    code = 0
    if a.action == "fold":
        out["vertices"] = len(A.vertices)
        out["edges"] = [[u, format_word((x,)), v] for u, x, v in A.edges]
        out["rank"] = rank(A)
    elif a.action == "rank":
        out["rank"] = rank(A)
    elif a.action == "intersect":
        if not a.other:
            raise UsageError("intersect needs --other generators")
        B = stallings_fold([parse_word(t) for t in a.other], A.rank)
        X = intersection_classes(A, B)
        out["classes"] = [c.as_dict() for c in X.classes]
        out["component_ranks"] = X.component_ranks
        out["rank_sum"] = X.rank_sum
        out["raw_rank_sum"] = X.raw_rank_sum
    elif a.action == "rel-order":
        if not a.word:
            raise UsageError("rel-order needs --word")
        n = relative_order(A, parse_word(a.word))
        out["order"] = None if isinf(n) else n
        code = 1 if isinf(n) else 0
    elif a.action == "max-cyclic":
        out["classes"] = [{"word": format_word(c.word), "index": c.index} for c in maximal_cyclic_classes(A)]
    elif a.action == "spectrum":
        out["superset"] = sorted(spectrum_superset(A))
    _emit(out)
    return code


# -- parser -------------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fibreprod", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("graph", help="normalize a graph and print its invariants")
    s.add_argument("graph")
    grp = s.add_mutually_exclusive_group()
    grp.add_argument("--core", action="store_true")
    grp.add_argument("--rcore", action="store_true")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("product", help="fibre product of two labeled graphs")
    s.add_argument("graphs", nargs="+")
    grp = s.add_mutually_exclusive_group()
    grp.add_argument("--core", action="store_true")
    grp.add_argument("--rcore", action="store_true")
    s.add_argument("--report", action="store_true")
    s.set_defaults(func=cmd_product)

    s = sub.add_parser("wgraph", help="product with a circle, sinks and extension languages")
    s.add_argument("graph")
    s.add_argument("--w", required=True)
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--sinks", action="store_true")
    s.add_argument("--ext-lang", dest="ext_lang")
    s.add_argument("--side", choices=["left", "right"], default="left")
    s.set_defaults(func=cmd_wgraph)

    s = sub.add_parser("long-cycles", help="long cycles of a deterministic graph")
    s.add_argument("graph")
    s.add_argument("--threshold", type=int)
    s.set_defaults(func=cmd_long_cycles)

    s = sub.add_parser("nei", help="intersection non-emptiness of two automata")
    s.add_argument("automata", nargs="+")
    s.add_argument("--oracle", action="store_true")
    s.add_argument("--trace")
    s.set_defaults(func=cmd_nei)

    s = sub.add_parser("gen", help="seeded random instances")
    s.add_argument("--topology", default="pair")
    s.add_argument("--m", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--primes", type=int, nargs="+")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("subgroup", help="subgroups of free groups")
    s.add_argument("action", choices=["fold", "rank", "intersect", "rel-order", "max-cyclic", "spectrum"])
    s.add_argument("generators", nargs="*")
    s.add_argument("--other", nargs="*")
    s.add_argument("--word")
    s.add_argument("--rank", type=int)
    s.set_defaults(func=cmd_subgroup)

    s = sub.add_parser("verify", help="run every applicable bound check")
    s.add_argument("instance")
    s.add_argument("--raw", action="store_true", help="skip the relative-core reduction")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args)
    except (UsageError, InvalidInput) as exc:
        print(f"fibreprod: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
