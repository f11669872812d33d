"""The bound-verdict report: every applicable check on one instance.

An instance is a pair of labeled graphs (deterministic, i.e. forwards
immersions) with optional loops ``ws`` for the circle-product checks and
optional ``expect`` values.  Reports carry no timings so that they are
byte-identical across runs.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

from .digraph import Digraph, betti, label_map, branch_decomposition, core, is_forwards_immersion, is_immersion, rcore, weak_components
from .errors import InvalidInput
from .fibre import Check, edge_count_identity, homotopy_check, homotopy_class_count, labeled_product, structure_report, worst
from .jsonio import SCHEMA, fingerprint
from .longcycles import long_cycles, s_image, w_cycles_bound_check
from .wgraph import short_element_count, submaximal_w_lengths, w_components_count, w_sinks
from .words import is_primitive


def threads() -> int:
    try:
        return max(1, int(os.environ.get("FIBREPROD_THREADS", "1")))
    except ValueError:
        return 1


def _letters_map(g: Digraph, letters):
    return label_map(g, letters)


def default_loops(letters: Sequence) -> list:
    """Every letter, and every ordered pair of distinct letters."""
    letters = sorted(letters, key=repr)
    out = [(a,) for a in letters]
    out += [(a, b) for a in letters for b in letters if a != b]
    return out


def side_checks(name: str, g: Digraph, letters, ws: Sequence) -> list:
    """Checks that concern one factor only."""
    m = _letters_map(g, letters)
    nbar = len(branch_decomposition(g).elements)
    b1 = betti(g)[1]
    lc = long_cycles(m)
    checks = [Check(f"{name}.long_cycle_count", len(lc), b1)]
    comp_p, sub_p, sink_p, circ_p = [], [], [], []
    for w in ws:
        if not is_primitive(w) or not set(w) <= set(letters):
            continue
        where = f"w={''.join(map(str, w))}"
        count, _ = w_components_count(m, w, 3)
        comp_p.append((count, 2 * nbar, where))
        sub_p.append((len(submaximal_w_lengths(m, w)), 10 * nbar + 3 * len(g.initial), where))
        sink_p.append((len(w_sinks(m, w)), 2 * short_element_count(m, w), where))
        if is_immersion(g):
            b0, b1_, _ = w_cycles_bound_check(m, w)
            circ_p.append((b0, b1_, where))
    checks.append(worst(f"{name}.omega_components", comp_p))
    checks.append(worst(f"{name}.submaximal_lengths", sub_p))
    checks.append(worst(f"{name}.w_sinks", sink_p))
    if is_immersion(g):
        checks.append(worst(f"{name}.circle_core_components", circ_p))
    return checks


def run_report(inst: dict, relative: bool = True) -> dict:
    """Run every check on ``inst`` (as returned by
    :func:`jsonio.instance_from_json`) and return the report dict."""
    gamma, lam = inst["gamma"], inst.get("lambda")
    if lam is None:
        lam = gamma
    for name, g in (("gamma", gamma), ("lambda", lam)):
        if not g.is_labeled:
            raise InvalidInput(f"{name} must be labeled")
        if not is_forwards_immersion(g):
            raise InvalidInput(f"{name} is not a forwards immersion")
    g, l = (rcore(gamma), rcore(lam)) if relative else (gamma, lam)
    letters = sorted(g.alphabet() | l.alphabet(), key=repr)
    ws = [tuple(w) for w in inst.get("ws", ())] or default_loops(letters)

    jobs: list[Callable[[], tuple]] = [
        lambda: _product_checks(g, l, letters),
        lambda: (side_checks("gamma", g, letters, ws), {}),
        lambda: (side_checks("lambda", l, letters, ws), {}),
    ]
    n = threads()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as ex:
            parts = list(ex.map(lambda f: f(), jobs))
    else:
        parts = [f() for f in jobs]
    checks = [c for part, _ in parts for c in part]
    info = parts[0][1]

    expect = inst.get("expect") or {}
    for key, want in sorted(expect.items()):
        have = info.get(key)
        checks.append(Check(f"expect.{key}", 0 if have == want else 1, 0, f"expected {want}, got {have}"))

    checks.sort(key=lambda c: c.name)
    return {
        "schema": SCHEMA,
        "kind": "report",
        "fingerprint": inst.get("_fingerprint", ""),
        "ok": all(c.verdict for c in checks),
        "checks": [c.as_dict() for c in checks],
        "info": info,
    }


def _product_checks(g: Digraph, l: Digraph, letters) -> list:
    fp = labeled_product(g, l)
    got, want = edge_count_identity(fp)
    checks = [Check("edge_count_identity", abs(got - want), 0, f"{got} vs {want}")]
    lc_g, lc_l = long_cycles(_letters_map(g, letters)), long_cycles(_letters_map(l, letters))
    simg = s_image(fp, lc_g, lc_l)
    data = structure_report(fp, simg)
    checks += data.checks
    checks.append(homotopy_check(fp))
    hc = homotopy_class_count(fp)
    info = {
        "core_components": len(weak_components(core(fp.product))),
        "theta_components": len(weak_components(fp.theta)),
        "theta_edges": len(fp.theta.edges),
        "theta_s_edges": len(data.theta_s.edges),
        "long_cycles": [len(lc_g), len(lc_l)],
        "homotopy_classes": hc.total,
        "betti": [betti(g)[1], betti(l)[1]],
    }
    return checks, info


def report_for(inst_json: dict, relative: bool = True) -> dict:
    from .jsonio import instance_from_json

    inst = instance_from_json(inst_json)
    inst["_fingerprint"] = fingerprint(inst_json)
    return run_report(inst, relative)
