"""w-paths and w-graphs: the part of a graph that reads powers of a fixed
primitive loop ``w``.

A graph map is given either as a :class:`GraphMap` or as a labeled
:class:`Digraph` (the map to the rose on its letters).  ``w`` is a word
of target edges, or of letters for a labeled graph.

Omega vertices are pairs ``(u, i)`` with ``i`` the circle position, i.e.
the next letter to read is ``w[i]``; Omega edges are ``(e, i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .digraph import (
    Digraph,
    GraphMap,
    Path,
    branch_decomposition,
    branch_vertices,
    check_map,
    cycle_graph,
    label_map,
    weak_components,
)
from .errors import InvalidInput
from .fibre import fibre_product
from .words import is_primitive, rotate, w_offsets

MapLike = Union[GraphMap, Digraph]
INF = None  # marker for unbounded w-length


def as_map(gamma: MapLike) -> GraphMap:
    if isinstance(gamma, GraphMap):
        return gamma
    return label_map(gamma)


def _check_loop(delta: Digraph, w: Sequence) -> tuple:
    w = tuple(w)
    if not w:
        raise InvalidInput("empty loop")
    for x in w:
        if x not in delta.edges:
            raise InvalidInput(f"{x!r} is not an edge of the target")
    for a, b in zip(w, w[1:] + w[:1]):
        if delta.t(a) != delta.o(b):
            raise InvalidInput("word is not a loop in the target")
    if not is_primitive(w):
        raise InvalidInput("loop is not primitive")
    return w


def circle_map(delta: Digraph, w: Sequence) -> GraphMap:
    """The circle reading ``w`` once, mapped into ``delta``."""
    w = _check_loop(delta, w)
    circ = cycle_graph(w)
    return GraphMap(circ, delta, {i: delta.o(w[i]) for i in circ.vertices}, dict(circ.labels))


def w_length(offset: int, length: int, k: int) -> int:
    """Number of full blocks in a read of ``length`` letters from ``offset``."""
    a = (k - offset) % k
    return max(0, (length - a) // k)


# -- Omega -------------------------------------------------------------------
@dataclass(frozen=True)
class OmegaComponent:
    vertices: tuple
    edges: tuple
    shape: str  # "tree", "cycle_with_trees" or "general"
    max_w_length: Optional[int]  # None when unbounded
    cycle_w_length: int  # w-length of the unique cycle (0 if none)
    meets_branch: bool  # projection meets a branch vertex of the source

    def supports(self, n: int) -> bool:
        return self.max_w_length is None or self.max_w_length >= n


@dataclass(frozen=True, eq=False)
class Omega:
    gamma: GraphMap
    w: tuple
    graph: Digraph  # the full product with the circle
    components: tuple

    @property
    def k(self) -> int:
        return len(self.w)

    def component_of(self, x) -> Optional[OmegaComponent]:
        for c in self.components:
            if x in c.vertices:
                return c
        return None

    def filtered(self, n: int) -> tuple:
        return tuple(c for c in self.components if c.supports(n))


def _longest_from(g: Digraph, verts: list) -> Optional[dict]:
    """Longest path length from each vertex, or ``None`` if there is a cycle."""
    vs = set(verts)
    out = {v: [g.t(e) for e in g.fstar[v] if g.t(e) in vs] for v in verts}
    indeg = {v: 0 for v in verts}
    for v in verts:
        for u in out[v]:
            indeg[u] += 1
    order = [v for v in verts if indeg[v] == 0]
    for v in order:
        for u in out[v]:
            indeg[u] -= 1
            if indeg[u] == 0:
                order.append(u)
    if len(order) != len(verts):
        return None
    best = {}
    for v in reversed(order):
        best[v] = max((best[u] + 1 for u in out[v]), default=0)
    return best


def _cycle_vertices(g: Digraph, verts: list) -> list:
    """Vertices on the unique cycle of a component with out-degree at most one."""
    v = verts[0]
    seen = {}
    walk = []
    while v not in seen:
        seen[v] = len(walk)
        walk.append(v)
        (e,) = g.fstar[v]
        v = g.t(e)
    return walk[seen[v]:]


def omega(gamma: MapLike, w: Sequence, k: int = 0) -> Omega:
    """Components of the product with the circle that cover every circle
    edge, filtered to those supporting a w-path of w-length at least ``k``."""
    gamma = as_map(gamma)
    w = _check_loop(gamma.target, w)
    circ = circle_map(gamma.target, w)
    prod = fibre_product(gamma, circ).product
    nw = len(w)
    vbar = branch_vertices(gamma.source)
    comps = []
    for verts in weak_components(prod):
        vs = set(verts)
        es = tuple(x for x in prod.edges if prod.o(x) in vs)
        if len({x[1] for x in es}) < nw:
            continue
        b1 = len(es) - len(verts) + 1
        longest = _longest_from(prod, verts)
        functional = all(prod.outdeg(v) <= 1 for v in verts)
        if longest is None:
            max_len = None
            if b1 == 1 and functional:
                shape = "cycle_with_trees"
                cycle_w = len(_cycle_vertices(prod, verts)) // nw
            else:
                shape, cycle_w = "general", 0
        else:
            max_len = max(w_length(v[1], longest[v], nw) for v in verts)
            shape = "tree" if b1 == 0 else "general"
            cycle_w = 0
        meets = any(v[0] in vbar for v in verts)
        comps.append(OmegaComponent(tuple(verts), es, shape, max_len, cycle_w, meets))
    om = Omega(gamma, w, prod, tuple(comps))
    if k > 0:
        om = Omega(gamma, w, prod, om.filtered(k))
    return om


def w_components_count(gamma: MapLike, w: Sequence, n: int) -> tuple:
    """``(components of Omega^n meeting branch vertices, |E-bar(source)|)``."""
    gamma = as_map(gamma)
    om = omega(gamma, w, n)
    nbar = len(branch_decomposition(gamma.source).elements)
    return sum(1 for c in om.components if c.meets_branch), nbar


# -- factorisations ------------------------------------------------------------
@dataclass(frozen=True)
class WFactorisation:
    """``gamma(f) = w[offset:] * w^n * w[:tail]`` (head empty when offset is 0)."""

    offset: int
    n: int
    tail: int
    head: tuple
    suffix: tuple

    @property
    def head_length(self) -> int:
        return len(self.head)


def _path_letters(gamma: GraphMap, f) -> tuple:
    edges = f.edges if isinstance(f, Path) else tuple(f)
    return tuple(gamma.emap[e] for e in edges)


def w_factorise(f, gamma: MapLike, w: Sequence) -> WFactorisation:
    """The unique factorisation of a w-path.

    Reads of at least ``|w|`` letters have one admissible offset.  Shorter
    reads are accepted only if they wrap past the start of ``w`` (``n = 0``),
    taking the least such offset.
    """
    gamma = as_map(gamma)
    w = _check_loop(gamma.target, w)
    x = _path_letters(gamma, f)
    k, L = len(w), len(x)
    offs = w_offsets(x, w)
    if L >= k:
        if not offs:
            raise InvalidInput("path is not a w-path")
        assert len(offs) == 1
        i = offs[0]
    else:
        wrapping = [i for i in offs if i >= 1 and i + L >= k]
        if not wrapping:
            raise InvalidInput("path is not a w-path")
        i = wrapping[0]
    a = (k - i) % k
    n = (L - a) // k
    tail = L - a - n * k
    return WFactorisation(i, n, tail, w[i:] if i else (), w[:tail])


def is_simple(vertices: Sequence, k: int) -> bool:
    """No repeated vertex among positions congruent mod ``k``, except that
    the final position may repeat an earlier one."""
    last = len(vertices) - 1
    seen = set()
    for p, v in enumerate(vertices):
        if p == last:
            break
        key = (p % k, v)
        if key in seen:
            return False
        seen.add(key)
    return True


def omega_lift(f: Path, gamma: MapLike, w: Sequence) -> list:
    """Omega vertex sequence of a w-path, using its factorisation offset."""
    fac = w_factorise(f, gamma, w)
    k = len(tuple(w))
    return [(v, (fac.offset + p) % k) for p, v in enumerate(f.vertex_sequence())]


@dataclass(frozen=True)
class WDecomposition:
    """``f = stem * loop^n * rest`` with ``stem * loop`` simple."""

    stem: tuple
    loop: tuple
    n: int
    rest: tuple

    @property
    def simple(self) -> bool:
        return self.n <= 1 and not self.rest


def w_decomposition(f: Path, gamma: MapLike, w: Sequence) -> WDecomposition:
    lift = omega_lift(f, gamma, w)
    edges = f.edges
    first = {}
    for q, x in enumerate(lift):
        if x in first:
            p = first[x]
            loop = edges[p:q]
            rest = edges[q:]
            n = 1
            while rest[: len(loop)] == loop and len(rest) >= len(loop):
                rest = rest[len(loop):]
                n += 1
            if loop and not loop[: len(rest)] == rest:
                raise AssertionError("path leaves its loop")
            return WDecomposition(edges[:p], loop, n, rest)
        first[x] = q
    return WDecomposition(edges, (), 0, ())


# -- Gamma_w and w-sinks -----------------------------------------------------
def short_subgraph(gamma: MapLike, w: Sequence) -> Digraph:
    """Union of the branch elements shorter than ``|w|``."""
    g = as_map(gamma).source
    nw = len(tuple(w))
    dec = branch_decomposition(g)
    keep = [e for el in dec.elements if len(el) < nw for e in el.edges]
    return g.subgraph(keep)


def w_sinks(gamma: MapLike, w: Sequence) -> set:
    """Vertices ``f(|w'*w|)`` over paths ``f`` in the short subgraph between
    branch vertices with ``gamma(f) = w' * w * w''``."""
    gamma = as_map(gamma)
    w = _check_loop(gamma.target, w)
    g = gamma.source
    gw = short_subgraph(gamma, w)
    vbar = branch_vertices(g)
    k = len(w)
    sinks = set()
    for s in gw.vertices:
        if s not in vbar:
            continue
        for i in range(k):
            a = (k - i) % k
            lo, hi = a + k, a + 2 * k
            # depth-first over reads of w from offset i
            stack = [(s, 0, None)]
            while stack:
                v, depth, sink = stack.pop()
                if depth == a + k:
                    sink = v
                if lo <= depth < hi and v in vbar:
                    sinks.add(sink)
                if depth + 1 >= hi:
                    continue
                letter = w[(i + depth) % k]
                for e in gw.fstar[v]:
                    if gamma.emap[e] == letter:
                        stack.append((gw.t(e), depth + 1, sink))
    return sinks


def short_element_count(gamma: MapLike, w: Sequence) -> int:
    """Number of branch elements of the short subgraph itself."""
    return len(branch_decomposition(short_subgraph(gamma, w)).elements)


def general_w_sinks(gamma: MapLike, w: Sequence) -> tuple:
    """Least rotation index whose sink set has at most twice as many
    elements as the short subgraph has branch elements."""
    gamma = as_map(gamma)
    w = _check_loop(gamma.target, w)
    bound = 2 * short_element_count(gamma, w)
    for j in range(len(w)):
        s = w_sinks(gamma, rotate(w, j))
        if len(s) <= bound:
            return j, s
    raise AssertionError("no rotation meets the sink bound")


@dataclass(frozen=True)
class ShortFactorisation:
    """Split of a path at branch vertices into a head (suffix of an element),
    pieces inside the short subgraph, long elements between them, and a tail
    (prefix of an element).

    ``pieces[i]`` is a half-open position range of the path; ``longs[i]`` is
    the element index crossed between ``pieces[i]`` and ``pieces[i+1]``.
    When the path avoids branch vertices ``degenerate`` holds
    ``(element index, start, stop)`` and the other fields are empty.
    """

    head: Optional[int]
    l: int
    pieces: tuple
    longs: tuple
    tail: Optional[int]
    m: int
    degenerate: Optional[tuple] = None

    @property
    def n(self) -> int:
        return len(self.pieces)


def gamma_w_factorise(f: Path, gamma: MapLike, w: Sequence) -> ShortFactorisation:
    gamma = as_map(gamma)
    k = len(tuple(w))
    g = gamma.source
    dec = branch_decomposition(g)
    vbar = dec.branch
    verts = f.vertex_sequence()
    L = len(f)
    hits = [p for p, v in enumerate(verts) if v in vbar]
    if not hits:
        if L == 0:
            ke, i = _element_at(dec, f.start)
        else:
            ke, i = dec.position[f.edges[0]]
        return ShortFactorisation(None, 0, (), (), None, 0, (ke, i, i + L))
    p0, plast = hits[0], hits[-1]
    head = dec.position[f.edges[0]][0] if p0 > 0 else None
    tail = dec.position[f.edges[plast]][0] if plast < L else None
    pieces, longs = [], []
    start = p0
    for a, b in zip(hits, hits[1:]):
        ke = dec.position[f.edges[a]][0]
        if len(dec.elements[ke]) >= k:
            pieces.append((start, a))
            longs.append(ke)
            start = b
    pieces.append((start, plast))
    return ShortFactorisation(head, p0, tuple(pieces), tuple(longs), tail, L - plast)


def _element_at(dec, v) -> tuple:
    for ke, el in enumerate(dec.elements):
        if v in el.vertices:
            return ke, el.vertices.index(v)
    raise InvalidInput("vertex lies on no element")


def piece_w_lengths(fac: ShortFactorisation, offset: int, k: int) -> list:
    """w-lengths of the short pieces of a w-path read from ``offset``."""
    return [w_length((offset + a) % k, b - a, k) for a, b in fac.pieces]


# -- submaximal paths ------------------------------------------------------------
def _forward_deterministic(gamma: GraphMap) -> None:
    if check_map(gamma) not in ("forwards_immersion", "immersion"):
        raise InvalidInput("map must be a forwards immersion")


def _simple_walks(prod: Digraph, start, backwards: bool):
    """Yield ``(walk, extendable)`` for every simple path with one end at
    ``start``.  Forwards, ``start`` is the origin; backwards, ``start`` is
    the final vertex and the walk lists vertices from the end.

    Non-final vertices are pairwise distinct; the final one may repeat.
    """
    star = prod.bstar if backwards else prod.fstar
    end = prod.o if backwards else prod.t
    stack = [[start]]
    while stack:
        walk = stack.pop()
        if backwards:
            inner = set(walk[1:])
            nxt = [u for u in (end(e) for e in star[walk[-1]]) if u not in inner]
        else:
            inner = set(walk[:-1])
            nxt = [] if walk[-1] in inner else [end(e) for e in star[walk[-1]]]
        yield walk, bool(nxt)
        for u in nxt:
            stack.append(walk + [u])


def submaximal_w_lengths(gamma: MapLike, w: Sequence) -> set:
    """w-lengths ``n >= 1`` of right maximal, left submaximal w-paths that
    meet a branch vertex."""
    gamma = as_map(gamma)
    _forward_deterministic(gamma)
    om = omega(gamma, w)
    prod, k = om.graph, om.k
    vbar = branch_vertices(gamma.source)
    left_ok = vbar | gamma.source.initial
    out = set()
    for comp in om.components:
        for s in comp.vertices:
            # the right maximal path from s is the full deterministic walk
            walk = [s]
            seen = {s}
            while True:
                nxt = [prod.t(e) for e in prod.fstar[walk[-1]]]
                if not nxt:
                    break
                (u,) = nxt
                walk.append(u)
                if u in seen:
                    break
                seen.add(u)
            n = w_length(s[1], len(walk) - 1, k)
            if n < 1 or not any(v[0] in vbar for v in walk):
                continue
            inner = set(walk[:-1])
            if s[0] in left_ok or all(prod.o(e) in inner for e in prod.bstar[s]):
                out.add(n)
    return out


@dataclass(frozen=True)
class ExtLanguage:
    """``{s + j*period : s in finite, j >= 0}``; a finite set when the
    period is 0."""

    finite: frozenset
    period: int

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, int):
            return False
        if self.period == 0:
            return n in self.finite
        return any(n >= s and (n - s) % self.period == 0 for s in self.finite)

    def upto(self, bound: int) -> set:
        return {n for n in range(bound + 1) if n in self}

    @property
    def k(self) -> int:
        return len(self.finite)


def submaximal_lengths_at(gamma: MapLike, w: Sequence, x, side: str = "left") -> set:
    """w-lengths of simple submaximal w-paths ending (``left``) or starting
    (``right``) at the Omega vertex ``x``, by direct enumeration."""
    gamma = as_map(gamma)
    w = _check_loop(gamma.target, w)
    k = len(w)
    circ = circle_map(gamma.target, w)
    prod = fibre_product(gamma, circ).product
    if x not in prod.vset:
        return set()
    vbar = branch_vertices(gamma.source)
    if side == "left":
        stop_ok = vbar | gamma.source.initial
    elif side == "right":
        stop_ok = vbar | gamma.source.final
    else:
        raise InvalidInput(f"unknown side {side!r}")
    backwards = side == "left"
    out = set()
    for walk, extendable in _simple_walks(prod, x, backwards):
        L = len(walk) - 1
        far = walk[-1]
        offset = far[1] if backwards else x[1]
        if not _reads_w(offset, L, k):
            continue
        if far[0] in stop_ok or not extendable:
            out.add(w_length(offset, L, k))
    return out


def _reads_w(offset: int, L: int, k: int) -> bool:
    """Whether a read of ``L`` letters from ``offset`` is a w-path read."""
    return L >= k or (offset >= 1 and offset + L >= k)


def extension_language(gamma: MapLike, w: Sequence, u, v: int, side: str = "left") -> ExtLanguage:
    """A language ``(finite) * (a^period)*`` containing the w-length of every
    left (right) submaximal w-path ending (starting) at ``(u, v)``.

    The period is the w-length of the Omega cycle through ``(u, v)``, and 0
    when ``(u, v)`` is off every cycle.
    """
    gamma = as_map(gamma)
    _forward_deterministic(gamma)
    x = (u, v)
    om = omega(gamma, w)
    comp = om.component_of(x)
    if comp is None:
        return ExtLanguage(frozenset(), 0)
    lengths = submaximal_lengths_at(gamma, w, x, side)
    period = 0
    if comp.shape == "cycle_with_trees" and x in _cycle_vertices(om.graph, list(comp.vertices)):
        period = comp.cycle_w_length
    if period:
        lengths = {s for s in lengths if s - period not in lengths}
    return ExtLanguage(frozenset(lengths), period)
