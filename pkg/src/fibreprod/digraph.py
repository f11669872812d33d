"""Directed multigraphs with initial/final vertices, graph maps, cores and
the decomposition into maximal branch-free segments."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Optional, Sequence

import networkx as nx

from .errors import InvalidInput

Vertex = Hashable
Edge = Hashable


@dataclass(frozen=True, eq=False)
class Digraph:
    """Directed multigraph.  ``edges`` maps an edge id to ``(src, dst)``.

    ``labels`` (optional) maps edge ids to letters; a labeled graph stands
    for the map to the one-vertex rose with one loop per letter.
    """

    vertices: tuple
    edges: Mapping[Edge, tuple]
    initial: frozenset = frozenset()
    final: frozenset = frozenset()
    labels: Optional[Mapping[Edge, Hashable]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", dict(self.edges))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "final", frozenset(self.final))
        if self.labels is not None:
            object.__setattr__(self, "labels", dict(self.labels))
        vs = self.vset
        if len(vs) != len(self.vertices):
            raise InvalidInput("duplicate vertex ids")
        for e, (a, b) in self.edges.items():
            if a not in vs or b not in vs:
                raise InvalidInput(f"edge {e!r} has an endpoint outside the vertex set")
        if not (self.initial | self.final) <= vs:
            raise InvalidInput("marked vertices must be vertices")
        if self.labels is not None and set(self.labels) != set(self.edges):
            raise InvalidInput("labels must be given for every edge or none")

    # -- incidence -----------------------------------------------------
    @cached_property
    def vset(self) -> frozenset:
        return frozenset(self.vertices)

    @cached_property
    def fstar(self) -> dict:
        out: dict = {v: [] for v in self.vertices}
        for e, (a, _) in self.edges.items():
            out[a].append(e)
        return out

    @cached_property
    def bstar(self) -> dict:
        out: dict = {v: [] for v in self.vertices}
        for e, (_, b) in self.edges.items():
            out[b].append(e)
        return out

    @cached_property
    def step(self) -> dict:
        """``step[v][letter]`` lists the out-edges of ``v`` with that label."""
        out: dict = {v: {} for v in self.vertices}
        for e, (a, _) in self.edges.items():
            out[a].setdefault(self.label(e), []).append(e)
        return out

    def o(self, e: Edge) -> Vertex:
        return self.edges[e][0]

    def t(self, e: Edge) -> Vertex:
        return self.edges[e][1]

    def label(self, e: Edge):
        if self.labels is None:
            raise InvalidInput("graph is unlabeled")
        return self.labels[e]

    def indeg(self, v: Vertex) -> int:
        return len(self.bstar[v])

    def outdeg(self, v: Vertex) -> int:
        return len(self.fstar[v])

    @property
    def marked(self) -> frozenset:
        return self.initial | self.final

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    def word(self, path: Sequence[Edge]) -> tuple:
        return tuple(self.labels[e] for e in path)

    def alphabet(self) -> set:
        return set(self.labels.values()) if self.labels else set()

    # -- derived graphs ------------------------------------------------
    def subgraph(self, edge_ids: Iterable[Edge], extra_vertices: Iterable[Vertex] = ()) -> "Digraph":
        """Subgraph on the given edges, their endpoints and ``extra_vertices``.
        Ids are preserved and marks restricted."""
        keep = set(edge_ids)
        vs = set(extra_vertices)
        for e in keep:
            vs.update(self.edges[e])
        return Digraph(
            vertices=[v for v in self.vertices if v in vs],
            edges={e: ab for e, ab in self.edges.items() if e in keep},
            initial=self.initial & vs,
            final=self.final & vs,
            labels=None if self.labels is None else {e: self.labels[e] for e in self.edges if e in keep},
        )

    def with_marks(self, initial=(), final=()) -> "Digraph":
        return Digraph(self.vertices, self.edges, initial, final, self.labels)

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.vertices)
        for e, (a, b) in self.edges.items():
            g.add_edge(a, b, key=e)
        return g


def make_graph(edges: Iterable[tuple], initial=(), final=(), vertices=None) -> Digraph:
    """Build a labeled graph from ``(src, dst, label)`` triples; edge ids are
    0, 1, 2, ... in the given order."""
    es = {}
    labels = {}
    vs = list(vertices) if vertices is not None else []
    seen = set(vs)
    for i, (a, b, x) in enumerate(edges):
        es[i] = (a, b)
        labels[i] = x
        for v in (a, b):
            if v not in seen:
                seen.add(v)
                vs.append(v)
    for v in list(initial) + list(final):
        if v not in seen:
            seen.add(v)
            vs.append(v)
    return Digraph(vs, es, initial, final, labels)


def cycle_graph(word: Sequence, initial=(), final=(), prefix: Hashable = None) -> Digraph:
    """Directed circle reading ``word``; vertex ``i`` precedes letter ``word[i]``."""
    n = len(word)
    if n == 0:
        raise InvalidInput("empty word")
    name = (lambda i: i) if prefix is None else (lambda i: (prefix, i))
    es = {name(i): (name(i), name((i + 1) % n)) for i in range(n)}
    labels = {name(i): word[i] for i in range(n)}
    return Digraph([name(i) for i in range(n)], es, initial, final, labels)


def rose(letters: Iterable[Hashable], marked: bool = False) -> Digraph:
    letters = list(dict.fromkeys(letters))
    mark = (0,) if marked else ()
    return Digraph([0], {x: (0, 0) for x in letters}, mark, mark, {x: x for x in letters})


# -- graph maps -----------------------------------------------------------
@dataclass(frozen=True, eq=False)
class GraphMap:
    source: Digraph
    target: Digraph
    vmap: Mapping[Vertex, Vertex]
    emap: Mapping[Edge, Edge]


def label_map(g: Digraph, letters: Iterable[Hashable] = ()) -> GraphMap:
    """The map from a labeled graph to the rose on its letters."""
    if not g.is_labeled:
        raise InvalidInput("graph is unlabeled")
    target = rose(sorted(g.alphabet() | set(letters), key=repr), marked=bool(g.marked))
    return GraphMap(g, target, {v: 0 for v in g.vertices}, dict(g.labels))


def check_map(m: GraphMap) -> str:
    src, tgt = m.source, m.target
    if set(m.vmap) != src.vset or set(m.emap) != set(src.edges):
        return "not_a_map"
    for v, x in m.vmap.items():
        if x not in tgt.vset:
            return "not_a_map"
    for e, f in m.emap.items():
        if f not in tgt.edges:
            return "not_a_map"
        a, b = src.edges[e]
        if m.vmap[a] != tgt.o(f) or m.vmap[b] != tgt.t(f):
            return "not_a_map"
    if any(m.vmap[v] not in tgt.initial for v in src.initial):
        return "not_a_map"
    if any(m.vmap[v] not in tgt.final for v in src.final):
        return "not_a_map"

    def injective(star: dict) -> bool:
        for es in star.values():
            images = [m.emap[e] for e in es]
            if len(set(images)) != len(images):
                return False
        return True

    if not injective(src.fstar):
        return "map"
    if not injective(src.bstar):
        return "forwards_immersion"
    return "immersion"


def is_forwards_immersion(g: Digraph) -> bool:
    return all(len(es) == 1 for star in g.step.values() for es in star.values())


def is_immersion(g: Digraph) -> bool:
    if not is_forwards_immersion(g):
        return False
    for v, es in g.bstar.items():
        letters = [g.label(e) for e in es]
        if len(set(letters)) != len(letters):
            return False
    return True


# -- paths ---------------------------------------------------------------
@dataclass(frozen=True)
class Path:
    """Edge sequence in ``graph``; ``start`` pins down length-0 paths."""

    graph: Digraph = field(repr=False, compare=False)
    edges: tuple
    start: Vertex

    def __post_init__(self) -> None:
        v = self.start
        for e in self.edges:
            if self.graph.o(e) != v:
                raise InvalidInput("edges are not contiguous")
            v = self.graph.t(e)

    @classmethod
    def of(cls, graph: Digraph, edges: Sequence[Edge], start: Vertex = None) -> "Path":
        edges = tuple(edges)
        if start is None:
            if not edges:
                raise InvalidInput("empty path needs a start vertex")
            start = graph.o(edges[0])
        return cls(graph, edges, start)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def origin(self) -> Vertex:
        return self.start

    @property
    def terminus(self) -> Vertex:
        return self.graph.t(self.edges[-1]) if self.edges else self.start

    def vertex_at(self, i: int) -> Vertex:
        return self.start if i == 0 else self.graph.t(self.edges[i - 1])

    def vertex_sequence(self) -> list:
        return [self.start] + [self.graph.t(e) for e in self.edges]

    @property
    def is_loop(self) -> bool:
        return self.origin == self.terminus

    @property
    def is_accepting(self) -> bool:
        return self.origin in self.graph.initial and self.terminus in self.graph.final

    @property
    def is_admissible(self) -> bool:
        return self.is_accepting or self.is_loop

    def word(self) -> tuple:
        return self.graph.word(self.edges)


# -- degree-defined vertex sets -------------------------------------------
def boundary(g: Digraph) -> set:
    return {v for v in g.vertices if g.indeg(v) == 0 or g.outdeg(v) == 0}


def branch_vertices(g: Digraph) -> set:
    return {v for v in g.vertices if g.indeg(v) != 1 or g.outdeg(v) != 1}


# -- cores ---------------------------------------------------------------
def core_edges(g: Digraph) -> list:
    comp = {}
    for i, scc in enumerate(nx.strongly_connected_components(g.to_networkx())):
        for v in scc:
            comp[v] = i
    return [e for e, (a, b) in g.edges.items() if comp[a] == comp[b]]


def core(g: Digraph) -> Digraph:
    return g.subgraph(core_edges(g))


def reachable(g: Digraph, sources: Iterable[Vertex], backwards: bool = False) -> set:
    star = g.bstar if backwards else g.fstar
    end = g.o if backwards else g.t
    seen = set(sources)
    todo = deque(seen)
    while todo:
        v = todo.popleft()
        for e in star[v]:
            u = end(e)
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


def rcore(g: Digraph) -> Digraph:
    """Union of loops and accepting paths; length-0 accepting paths keep
    vertices in both marked sets."""
    fwd = reachable(g, g.initial)
    bwd = reachable(g, g.final, backwards=True)
    keep = set(core_edges(g))
    keep.update(e for e, (a, b) in g.edges.items() if a in fwd and b in bwd)
    return g.subgraph(keep, g.initial & g.final)


# -- connectivity ----------------------------------------------------------
def weak_components(g: Digraph) -> list:
    """Vertex sets of weak components, in order of first vertex."""
    ug = nx.Graph()
    ug.add_nodes_from(g.vertices)
    ug.add_edges_from(g.edges.values())
    order = {v: i for i, v in enumerate(g.vertices)}
    comps = [sorted(c, key=order.__getitem__) for c in nx.connected_components(ug)]
    comps.sort(key=lambda c: order[c[0]])
    return comps


def component_graphs(g: Digraph) -> list:
    out = []
    for comp in weak_components(g):
        cs = set(comp)
        out.append(g.subgraph([e for e, (a, _) in g.edges.items() if a in cs], cs))
    return out


def betti(g: Digraph) -> tuple:
    b0 = len(weak_components(g))
    return b0, b0 - len(g.vertices) + len(g.edges)


# -- branch decomposition --------------------------------------------------
@dataclass(frozen=True)
class BranchSegment:
    kind: str  # "segment" or "cycle"
    edges: tuple
    vertices: tuple  # length |edges|+1 for segments, |edges| for cycles

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def origin(self) -> Vertex:
        if self.kind != "segment":
            raise InvalidInput("cycles have no endpoints")
        return self.vertices[0]

    @property
    def terminus(self) -> Vertex:
        if self.kind != "segment":
            raise InvalidInput("cycles have no endpoints")
        return self.vertices[-1]


@dataclass(frozen=True, eq=False)
class BranchDecomposition:
    graph: Digraph
    elements: tuple
    position: dict  # edge -> (element index, position)
    branch: frozenset

    @property
    def segments(self) -> list:
        return [s for s in self.elements if s.kind == "segment"]

    @property
    def cycles(self) -> list:
        return [s for s in self.elements if s.kind == "cycle"]

    def locate(self, e: Edge) -> tuple:
        """``(element, i)`` with ``e`` the ``i``-th edge of ``element``."""
        if self.cycles:
            raise InvalidInput("edge lookup needs a graph without cycle elements")
        k, i = self.position[e]
        return self.elements[k], i


def branch_decomposition(g: Digraph) -> BranchDecomposition:
    vbar = branch_vertices(g)
    elements = []
    position = {}
    for v in g.vertices:
        if v not in vbar:
            continue
        for e in g.fstar[v]:
            path, verts = [e], [v, g.t(e)]
            while verts[-1] not in vbar:
                (nxt,) = g.fstar[verts[-1]]
                path.append(nxt)
                verts.append(g.t(nxt))
            for i, x in enumerate(path):
                position[x] = (len(elements), i)
            elements.append(BranchSegment("segment", tuple(path), tuple(verts)))
    for e in g.edges:
        if e in position:
            continue
        path, verts = [e], [g.o(e)]
        while True:
            position[path[-1]] = (len(elements), len(path) - 1)
            v = g.t(path[-1])
            if v == verts[0]:
                break
            verts.append(v)
            (nxt,) = g.fstar[v]
            path.append(nxt)
        elements.append(BranchSegment("cycle", tuple(path), tuple(verts)))
    return BranchDecomposition(g, tuple(elements), position, frozenset(vbar))


# -- lifts -----------------------------------------------------------------
def lifts(m: GraphMap, target_path: Sequence[Edge]) -> tuple:
    """All paths in ``m.source`` mapping onto ``target_path``.

    Returns ``(slift, olift)``: lifts avoiding ``V̄(source)`` and the rest.
    """
    target_path = tuple(target_path)
    if not target_path:
        raise InvalidInput("empty path")
    src = m.source
    pre: dict = {}
    for e, f in m.emap.items():
        pre.setdefault(f, []).append(e)
    partial = [[e] for e in pre.get(target_path[0], [])]
    for f in target_path[1:]:
        nxt = []
        for p in partial:
            v = src.t(p[-1])
            for e in src.fstar[v]:
                if m.emap[e] == f:
                    nxt.append(p + [e])
        partial = nxt
    vbar = branch_vertices(src)
    slift, olift = [], []
    for p in partial:
        path = Path.of(src, p)
        (olift if any(v in vbar for v in path.vertex_sequence()) else slift).append(path)
    return slift, olift
