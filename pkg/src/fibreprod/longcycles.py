"""Long cycles: primitive cycles whose image wraps a primitive loop many
times, and the counting checks built on products with circles."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

from .digraph import Digraph, GraphMap, betti, branch_decomposition, check_map, core, weak_components
from .errors import InvalidInput
from .fibre import FibreProduct, fibre_product
from .wgraph import MapLike, as_map, circle_map
from .words import cyclic_conjugate, find_all, is_primitive, least_rotation, per, primitive_root


@dataclass(frozen=True)
class LongCycle:
    """A primitive cycle ``edges`` (based at ``vertices[0]``) whose image is
    ``loop`` repeated ``degree`` times."""

    edges: tuple
    vertices: tuple
    loop: tuple
    degree: int
    witness: int  # index of a core branch element of length >= 2|loop| it crosses


@dataclass(frozen=True)
class LongCycles:
    cycles: tuple
    threshold: int
    betti1: int

    def __len__(self) -> int:
        return len(self.cycles)

    def __iter__(self):
        return iter(self.cycles)


def _edge_order(g: Digraph) -> dict:
    return {e: i for i, e in enumerate(sorted(g.edges, key=repr))}


def _canonical(edges: tuple, order: dict) -> tuple:
    return tuple(least_rotation(tuple(order[e] for e in edges)))


def long_cycles(gamma: MapLike, threshold: Optional[int] = None) -> LongCycles:
    """All primitive cycles of degree at least ``threshold`` (default
    ``12 * beta_1``), one per cycle up to rotation."""
    gamma = as_map(gamma)
    if check_map(gamma) not in ("forwards_immersion", "immersion"):
        raise InvalidInput("map must be a forwards immersion")
    g = gamma.source
    b1 = betti(g)[1]
    if threshold is None:
        threshold = 12 * b1
    c = core(g)
    dec = branch_decomposition(c)
    lab = gamma.emap
    blocks_cap = 4 * len(dec.elements) + 1

    found = {}
    order = _edge_order(g)
    for idx, el in enumerate(dec.elements):
        x = tuple(lab[e] for e in el.edges)
        if el.kind == "cycle":
            w = tuple(primitive_root(x))
            cyc = LongCycle(el.edges, el.vertices, w, len(x) // len(w), idx)
        else:
            p = per(x)
            if len(x) < 2 * p:
                continue
            w = x[:p]
            cap = (blocks_cap + sum(len(e) // p for e in dec.elements)) * p
            cyc = _close_cycle(c, lab, el.origin, w, cap, idx)
            if cyc is None:
                continue
        if cyc.degree >= threshold:
            found.setdefault(_canonical(cyc.edges, order), cyc)
    cycles = tuple(found[k] for k in sorted(found))
    return LongCycles(cycles, threshold, b1)


def _close_cycle(g: Digraph, lab, start, w: tuple, cap: int, witness: int) -> Optional[LongCycle]:
    """Follow ``w`` repeatedly from ``start`` until the walk is back at
    ``start`` at a block boundary."""
    p = len(w)
    v, edges, verts = start, [], [start]
    seen = {(start, 0)}
    while len(edges) < cap:
        letter = w[len(edges) % p]
        nxt = [e for e in g.fstar[v] if lab[e] == letter]
        if not nxt:
            return None
        (e,) = nxt
        edges.append(e)
        v = g.t(e)
        state = (v, len(edges) % p)
        if state == (start, 0):
            return LongCycle(tuple(edges), tuple(verts), w, len(edges) // p, witness)
        if state in seen:
            return None
        seen.add(state)
        verts.append(v)
    return None


def factors_through(cycle_edges: Sequence, lc: LongCycles) -> bool:
    """Whether the cycle is a power of a rotation of one of the long cycles."""
    f = tuple(cycle_edges)
    if not f:
        return False
    for c in lc.cycles:
        n = len(c.edges)
        if len(f) % n:
            continue
        if f != f[:n] * (len(f) // n):
            continue
        if find_all(c.edges + c.edges, f[:n]):
            return True
    return False


def cycle_degree(gamma: MapLike, cycle_edges: Sequence) -> tuple:
    """``(deg of the image, deg of the cycle)`` for a closed edge sequence."""
    gamma = as_map(gamma)
    f = tuple(cycle_edges)
    x = tuple(gamma.emap[e] for e in f)
    return len(x) // len(primitive_root(x)), len(f) // len(primitive_root(f))


# -- counting checks -------------------------------------------------------------
def w_cycles_bound_check(gamma: MapLike, w: Sequence) -> tuple:
    """``(components of core(source x circle), beta_1(source), verdict)``."""
    gamma = as_map(gamma)
    if check_map(gamma) != "immersion":
        raise InvalidInput("map must be an immersion")
    prod = fibre_product(gamma, circle_map(gamma.target, w)).product
    b0 = len(weak_components(core(prod)))
    b1 = betti(gamma.source)[1]
    return b0, b1, b0 <= b1


def circles_map(delta: Digraph, loops: Sequence[Sequence]) -> GraphMap:
    """Disjoint union of circles, the ``j``-th reading ``loops[j]``.
    Vertices and edges are ``(j, i)``."""
    verts, edges, vmap, emap = [], {}, {}, {}
    for j, w in enumerate(loops):
        cm = circle_map(delta, w)
        for i in cm.source.vertices:
            verts.append((j, i))
            vmap[(j, i)] = cm.vmap[i]
        for i, (a, b) in cm.source.edges.items():
            edges[(j, i)] = ((j, a), (j, b))
            emap[(j, i)] = cm.emap[i]
    return GraphMap(Digraph(verts, edges), delta, vmap, emap)


def long_components_check(gamma: MapLike, loops: Sequence[Sequence], threshold: Optional[int] = None) -> tuple:
    """``(high-degree core components over the circles, beta_1, verdict)``.

    The circles must be primitive and pairwise not cyclically conjugate.
    """
    gamma = as_map(gamma)
    if check_map(gamma) != "immersion":
        raise InvalidInput("map must be an immersion")
    loops = [tuple(w) for w in loops]
    for w in loops:
        if not w or not is_primitive(w):
            raise InvalidInput("circle maps must be primitive")
    for a in range(len(loops)):
        for b in range(a + 1, len(loops)):
            if cyclic_conjugate(loops[a], loops[b]) is not None:
                raise InvalidInput("circles must be pairwise non-conjugate")
    b1 = betti(gamma.source)[1]
    if threshold is None:
        threshold = 12 * b1
    if not loops:
        return 0, b1, True
    prod = fibre_product(gamma, circles_map(gamma.target, loops)).product
    cp = core(prod)
    count = 0
    for comp in weak_components(cp):
        cs = set(comp)
        n_edges = sum(1 for x in cp.edges if cp.o(x) in cs)
        j = comp[0][1][0]
        if n_edges // len(loops[j]) >= threshold:
            count += 1
    return count, b1, count <= b1


# -- image of the long-cycle product in the relative core --------------------------
def s_image(fp: FibreProduct, lc_g: LongCycles, lc_l: LongCycles) -> Digraph:
    """Edges of the product lying on the image of the core of the product of
    the two long-cycle sets, as a subgraph of the relative core."""
    eg, el = fp.gamma.emap, fp.lam.emap
    keep = set()
    for c1 in lc_g.cycles:
        a = [eg[e] for e in c1.edges]
        n1 = len(a)
        for c2 in lc_l.cycles:
            b = [el[f] for f in c2.edges]
            n2 = len(b)
            g_ = gcd(n1, n2)
            orbit = n1 * n2 // g_
            for shift in range(g_):
                # the diagonal orbit through positions (shift, 0)
                if all(a[(shift + t) % n1] == b[t % n2] for t in range(orbit)):
                    for t in range(orbit):
                        keep.add((c1.edges[(shift + t) % n1], c2.edges[t % n2]))
    theta = fp.theta
    return theta.subgraph([x for x in theta.edges if x in keep])
