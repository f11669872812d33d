"""Fibre products of graph maps and the structure of their relative cores."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .digraph import (
    Digraph,
    GraphMap,
    Path,
    betti,
    boundary,
    branch_decomposition,
    branch_vertices,
    check_map,
    component_graphs,
    rcore,
    rose,
)
from .errors import InvalidInput
from .words import least_rotation


@dataclass(frozen=True, eq=False)
class FibreProduct:
    gamma: GraphMap
    lam: GraphMap
    product: Digraph
    p_gamma: GraphMap
    p_lambda: GraphMap

    @cached_property
    def theta(self) -> Digraph:
        return rcore(self.product)


def _same_target(a: Digraph, b: Digraph) -> bool:
    return a is b or (a.vset == b.vset and a.edges == b.edges)


def fibre_product(gamma: GraphMap, lam: GraphMap) -> FibreProduct:
    if not _same_target(gamma.target, lam.target):
        raise InvalidInput("maps must share their target")
    delta = gamma.target
    src_g, src_l = gamma.source, lam.source

    vl: dict = {}
    for v in src_l.vertices:
        vl.setdefault(lam.vmap[v], []).append(v)
    verts = [(u, v) for u in src_g.vertices for v in vl.get(gamma.vmap[u], ())]

    el: dict = {}
    for f in src_l.edges:
        el.setdefault(lam.emap[f], []).append(f)
    edges, labels = {}, {}
    for e, (a, b) in src_g.edges.items():
        image = gamma.emap[e]
        letter = delta.labels[image] if delta.labels is not None else image
        for f in el.get(image, ()):
            c, d = src_l.edges[f]
            edges[(e, f)] = ((a, c), (b, d))
            labels[(e, f)] = letter

    initial = [(u, v) for u in src_g.initial for v in src_l.initial if gamma.vmap[u] == lam.vmap[v]]
    final = [(u, v) for u in src_g.final for v in src_l.final if gamma.vmap[u] == lam.vmap[v]]
    prod = Digraph(verts, edges, initial, final, labels)
    p_g = GraphMap(prod, src_g, {x: x[0] for x in verts}, {x: x[0] for x in edges})
    p_l = GraphMap(prod, src_l, {x: x[1] for x in verts}, {x: x[1] for x in edges})
    return FibreProduct(gamma, lam, prod, p_g, p_l)


def labeled_product(g1: Digraph, g2: Digraph) -> FibreProduct:
    """Fibre product of two labeled graphs over the rose on their letters."""
    letters = sorted(g1.alphabet() | g2.alphabet(), key=repr)
    delta = rose(letters, marked=bool(g1.marked or g2.marked))
    m1 = GraphMap(g1, delta, {v: 0 for v in g1.vertices}, dict(g1.labels))
    m2 = GraphMap(g2, delta, {v: 0 for v in g2.vertices}, dict(g2.labels))
    return fibre_product(m1, m2)


def edge_count_identity(fp: FibreProduct) -> tuple:
    """``(|E(product)|, sum over target edges of preimage products)``."""
    count_g: dict = {}
    count_l: dict = {}
    for x in fp.gamma.emap.values():
        count_g[x] = count_g.get(x, 0) + 1
    for x in fp.lam.emap.values():
        count_l[x] = count_l.get(x, 0) + 1
    return len(fp.product.edges), sum(n * count_l.get(x, 0) for x, n in count_g.items())


# -- components of Theta(e, f) ---------------------------------------------
CLASSES = ("sub", "super", "pref", "suff", "boundary")


@dataclass(frozen=True)
class ThetaComponent:
    """A maximal chain of ``Theta`` edges over ``(e, f)``.

    ``e_range``/``f_range`` are the half-open edge-index ranges covered in
    the two branch elements.
    """

    e_index: int
    f_index: int
    path: Path = field(compare=False)
    e_range: tuple
    f_range: tuple
    classes: frozenset


def _ends(element, start: int, stop: int) -> tuple:
    verts = element.vertices
    first = verts[start]
    last = verts[stop] if stop < len(verts) else verts[stop % len(verts)]
    if element.kind == "segment":
        return first == element.origin, last == element.terminus
    # cycle elements are read as closed segments based at their first vertex
    return first == verts[0], last == verts[0]


def theta_components(fp: FibreProduct) -> dict:
    """All components of every ``Theta(e, f)``, keyed by element indices."""
    theta = fp.theta
    dg = branch_decomposition(fp.gamma.source)
    dl = branch_decomposition(fp.lam.source)
    dtheta = boundary(theta)
    cells: dict = {}
    for x in theta.edges:
        e, f = x
        ke, i = dg.position[e]
        kf, j = dl.position[f]
        cells.setdefault((ke, kf), {})[(i, j)] = x
    out: dict = {}
    for (ke, kf), grid in cells.items():
        el_e, el_f = dg.elements[ke], dl.elements[kf]
        comps = []
        for (i, j) in sorted(grid):
            if (i - 1, j - 1) in grid:
                continue
            run = [grid[(i, j)]]
            a, b = i, j
            while (a + 1, b + 1) in grid:
                a, b = a + 1, b + 1
                run.append(grid[(a, b)])
            path = Path.of(theta, run)
            if len(set(run)) != len(run):
                raise AssertionError("component is not a segment")
            oe, te = _ends(el_e, i, a + 1)
            of, tf = _ends(el_f, j, b + 1)
            flags = set()
            if of and tf:
                flags.add("sub")
            if oe and te:
                flags.add("super")
            if oe and tf:
                flags.add("pref")
            if of and te:
                flags.add("suff")
            if path.origin in dtheta or path.terminus in dtheta:
                flags.add("boundary")
            comps.append(ThetaComponent(ke, kf, path, (i, a + 1), (j, b + 1), frozenset(flags)))
        out[(ke, kf)] = comps
    return out


def theta_segments(fp: FibreProduct, e, f) -> list:
    """Components of ``Theta(e, f)`` for branch elements ``e`` of the first
    graph and ``f`` of the second, each with its class flags."""
    dg = branch_decomposition(fp.gamma.source)
    dl = branch_decomposition(fp.lam.source)
    try:
        ke = dg.elements.index(e)
        kf = dl.elements.index(f)
    except ValueError:
        raise InvalidInput("not a branch element of the factor") from None
    return theta_components(fp).get((ke, kf), [])


def theta_s(fp: FibreProduct, s_image: Optional[Digraph]) -> Digraph:
    theta = fp.theta
    if s_image is None:
        return theta
    removed = set(s_image.edges)
    if not removed <= set(theta.edges):
        raise InvalidInput("long-cycle image is not a subgraph of the relative core")
    keep = [x for x in theta.edges if x not in removed]
    touched = {v for x in removed for v in theta.edges[x]}
    isolated = [v for v in theta.vertices if v not in touched]
    return theta.subgraph(keep, isolated)


# -- bound checks ------------------------------------------------------------
@dataclass(frozen=True)
class Check:
    name: str
    lhs: int
    rhs: int
    detail: str = ""

    @property
    def verdict(self) -> bool:
        return self.lhs <= self.rhs

    def as_dict(self) -> dict:
        d = {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "verdict": self.verdict}
        if self.detail:
            d["detail"] = self.detail
        return d


def worst(name: str, pairs: list, detail: str = "") -> Check:
    """Collapse a family of ``(lhs, rhs, where)`` checks into the one with the
    largest ratio lhs/rhs (all must pass for the verdict to be true)."""
    if not pairs:
        return Check(name, 0, 0, detail or "vacuous")
    fails = [p for p in pairs if p[0] > p[1]]
    pool = fails or pairs

    def key(p):
        lhs, rhs, _ = p
        return (lhs / rhs) if rhs else float("inf") if lhs else 0.0

    lhs, rhs, where = max(pool, key=key)
    note = f"{where}; {len(pairs)} instances"
    if fails:
        note += f"; {len(fails)} violations"
    return Check(name, lhs, rhs, note)


@dataclass
class StructureData:
    theta: Digraph
    theta_s: Digraph
    components: dict
    checks: list


def structure_report(fp: FibreProduct, s_image: Optional[Digraph]) -> StructureData:
    """Evaluate the structure bounds for the relative core of ``fp``.

    The factors are expected to be relatively core forwards immersions;
    all quantities are global over the factors.
    """
    for m in (fp.gamma, fp.lam):
        if check_map(m) not in ("forwards_immersion", "immersion"):
            raise InvalidInput("factors must be forwards immersions")
    g, l = fp.gamma.source, fp.lam.source
    dg, dl = branch_decomposition(g), branch_decomposition(l)
    nbar_g, nbar_l = len(dg.elements), len(dl.elements)
    c_g = nbar_g + len(g.initial)
    c_l = nbar_l + len(l.initial)
    theta = fp.theta
    ts = theta_s(fp, s_image)
    s_edges = set() if s_image is None else set(s_image.edges)
    dts = branch_decomposition(ts)
    dth = branch_decomposition(theta)
    comps = theta_components(fp)
    checks = []

    checks.append(Check(
        "theta_s_edges",
        len(ts.edges),
        508 * c_g * c_l * (nbar_l * len(g.edges) + nbar_g * len(l.edges)),
    ))
    checks.append(Check("theta_s_cycles", len(dts.cycles), 500 * (nbar_g * nbar_l) ** 2))
    ve_rhs = 4 * (len(g.initial) * len(l.initial) + nbar_g * nbar_l)
    checks.append(Check("theta_branch_vertices", len(dth.branch), ve_rhs))
    checks.append(Check("theta_segments", len(dth.segments), ve_rhs))

    # per (e, f) class bounds
    sub_p, sup_p, pre_p, suf_p = [], [], [], []
    boundary_edges = 0
    covered = set(s_edges)
    for (ke, kf), cs in comps.items():
        le, lf = len(dg.elements[ke]), len(dl.elements[kf])
        per_class = {c: set() for c in CLASSES}
        for comp in cs:
            for c in comp.classes:
                per_class[c].update(comp.path.edges)
        boundary_edges += len(per_class["boundary"])
        covered |= per_class["boundary"]
        for c in ("sub", "super", "pref", "suff"):
            per_class[c] -= s_edges
            covered |= per_class[c]
        where = f"e={ke},f={kf}"
        base = c_g * c_l
        sub_p.append((len(per_class["sub"]), 100 * base * le, where))
        sup_p.append((len(per_class["super"]), 100 * base * lf, where))
        pre_p.append((len(per_class["pref"]), 200 * base * min(le, lf), where))
        suf_p.append((len(per_class["suff"]), 200 * base * min(le, lf), where))
    checks.append(worst("sub_class_edges", sub_p))
    checks.append(worst("super_class_edges", sup_p))
    checks.append(worst("pref_class_edges", pre_p))
    checks.append(worst("suff_class_edges", suf_p))
    checks.append(Check(
        "boundary_class_edges", boundary_edges, 8 * c_g * c_l * min(len(g.edges), len(l.edges))
    ))
    missing = set(theta.edges) - covered
    checks.append(Check("theta_uncovered_edges", len(missing), 0))

    # lifts of each branch element of the first factor into theta_s whose
    # second projection meets a branch vertex
    vbar_l = branch_vertices(l)
    ov = []
    for ke, el in enumerate(dg.elements):
        n = 0
        for y in l.vertices:
            lift = _lift_from(ts, el.edges, (el.vertices[0], y))
            if lift is not None and any(v[1] in vbar_l for v in lift):
                n += 1
        ov.append((n, 500 * c_g * c_l * nbar_l, f"e={ke}"))
    checks.append(worst("branching_lifts", ov))
    checks.sort(key=lambda c: c.name)
    return StructureData(theta, ts, comps, checks)


def _lift_from(graph: Digraph, edges: tuple, start) -> Optional[list]:
    """Vertex sequence of the lift of a path of first-factor edges to a
    product subgraph, started at ``start``; ``None`` if it does not lift."""
    if start not in graph.vset:
        return None
    verts = [start]
    v = start
    for e in edges:
        nxt = None
        for x in graph.fstar[v]:
            if x[0] == e:
                nxt = x
                break
        if nxt is None:
            return None
        v = graph.t(nxt)
        verts.append(v)
    return verts


# -- homotopy classes ----------------------------------------------------------
@dataclass(frozen=True)
class HomotopyCount:
    total: int
    contractible: int
    cyclic_components: int
    cyclic_classes: int
    noncyclic: int


def is_cycle_component(g: Digraph) -> bool:
    return bool(g.edges) and all(g.indeg(v) == 1 and g.outdeg(v) == 1 for v in g.vertices)


def cycle_word(g: Digraph) -> tuple:
    """Label read once around a graph that is a single directed cycle."""
    e0 = next(iter(g.edges))
    out = [g.label(e0)]
    v = g.t(e0)
    while v != g.o(e0):
        (e,) = g.fstar[v]
        out.append(g.label(e))
        v = g.t(e)
    return tuple(out)


def homotopy_class_count(fp: FibreProduct) -> HomotopyCount:
    contractible = cyclic = noncyclic = 0
    classes = set()
    for comp in component_graphs(fp.theta):
        if betti(comp)[1] == 0:
            contractible += 1
        elif is_cycle_component(comp):
            cyclic += 1
            classes.add(least_rotation(cycle_word(comp)))
        else:
            noncyclic += 1
    total = (1 if contractible else 0) + len(classes) + noncyclic
    return HomotopyCount(total, contractible, cyclic, len(classes), noncyclic)


def homotopy_check(fp: FibreProduct) -> Check:
    hc = homotopy_class_count(fp)
    b_g = betti(fp.gamma.source)[1]
    b_l = betti(fp.lam.source)[1]
    rhs = 40538 * (b_g * b_l) ** 2 + (1 if hc.contractible else 0)
    return Check("homotopy_classes", hc.total, rhs)
