"""Subgroups of free groups through graphs with involution.

Letters are nonzero integers: ``k`` is the ``k``-th generator and ``-k`` its
inverse.  A :class:`SubgroupGraph` is a folded based graph stored with one
record ``(u, a, v)`` per undirected edge (``a > 0``).  An
:class:`InvolutiveGraph` is the directed double of such a graph, possibly
with a nontrivial vertex involution; ``sp`` and ``st`` move between the two
kinds.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from math import inf
from typing import Iterable, Optional, Sequence

import networkx as nx

from .digraph import Digraph, branch_decomposition, core, weak_components
from .errors import InvalidInput
from .fibre import labeled_product
from .longcycles import long_cycles
from .words import least_rotation

Word = tuple


# -- words ---------------------------------------------------------------------------
def inverse(w: Sequence[int]) -> Word:
    return tuple(-a for a in reversed(w))


def is_reduced(w: Sequence[int]) -> bool:
    return all(a != 0 for a in w) and all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def reduce_word(w: Iterable[int]) -> Word:
    out: list = []
    for a in w:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def cyclic_split(w: Sequence[int]) -> tuple:
    """``(u, c)`` with ``w = u c u^-1`` and ``c`` cyclically reduced."""
    w = tuple(w)
    i = 0
    while i < len(w) - 1 - i and w[i] == -w[-1 - i]:
        i += 1
    return w[:i], w[i : len(w) - i]


_TOKEN = re.compile(r"([a-zA-Z])(?:\^(-?\d+))?")


def parse_word(text: str) -> Word:
    """``"a b^-1 a"``, ``"aBa"`` (capital = inverse) or ``"1 -2 1"``."""
    text = text.strip()
    if not text or text in ("1", "e"):
        return ()
    if re.fullmatch(r"-?\d+(\s+-?\d+)*", text):
        w = tuple(int(t) for t in text.split())
        if 0 in w:
            raise InvalidInput("letter 0 is not allowed")
        return w
    out = []
    pos = 0
    for m in _TOKEN.finditer(text):
        if text[pos : m.start()].strip():
            raise InvalidInput(f"cannot parse word {text!r}")
        pos = m.end()
        ch, exp = m.group(1), m.group(2)
        a = ord(ch.lower()) - ord("a") + 1
        if ch.isupper():
            a = -a
        n = 1 if exp is None else int(exp)
        out.extend([a if n > 0 else -a] * abs(n))
    if text[pos:].strip():
        raise InvalidInput(f"cannot parse word {text!r}")
    return tuple(out)


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return "".join(chr(ord("a") + abs(a) - 1) if a > 0 else chr(ord("A") + abs(a) - 1) for a in w)


# -- subgroup graphs -----------------------------------------------------------------
@dataclass(frozen=True)
class SubgroupGraph:
    """A folded based graph over the rose with ``rank`` petals."""

    rank: int
    vertices: tuple
    edges: tuple  # (u, a, v) with a > 0
    base: int = 0
    generators: tuple = ()

    @cached_property
    def _step(self) -> dict:
        out: dict = {}
        for u, a, v in self.edges:
            out[(u, a)] = v
            out[(v, -a)] = u
        return out

    def step(self, u, a: int):
        return self._step.get((u, a))

    def trace(self, w: Sequence[int], start=None):
        v = self.base if start is None else start
        for a in w:
            v = self.step(v, a)
            if v is None:
                return None
        return v

    def contains(self, w: Sequence[int]) -> bool:
        return self.trace(reduce_word(w)) == self.base

    def degree(self, v) -> int:
        return sum((u == v) + (x == v) for u, _, x in self.edges)

    def euler_rank(self) -> int:
        return len(self.edges) - len(self.vertices) + 1


def stallings_fold(generators: Iterable[Sequence[int]], rank: Optional[int] = None) -> SubgroupGraph:
    """Fold the wedge of the generator loops to an immersion."""
    gens = [tuple(g) for g in generators]
    for g in gens:
        if not is_reduced(g):
            raise InvalidInput(f"generator {format_word(g)} is not freely reduced")
    letters = max((abs(a) for g in gens for a in g), default=0)
    if rank is None:
        rank = max(letters, 1)
    elif letters > rank:
        raise InvalidInput("generator uses a letter outside the ambient rank")

    edges = set()
    n = 1
    for g in gens:
        if not g:
            continue
        prev = 0
        for i, a in enumerate(g):
            nxt = 0 if i == len(g) - 1 else n
            if nxt:
                n += 1
            edges.add((prev, a, nxt) if a > 0 else (nxt, -a, prev))
            prev = nxt
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    while True:
        seen: dict = {}
        merged = False
        for u, a, v in edges:
            u, v = find(u), find(v)
            for key, val in (((u, a), v), ((v, -a), u)):
                w = seen.get(key)
                if w is None:
                    seen[key] = val
                elif find(w) != find(val):
                    x, y = find(w), find(val)
                    parent[max(x, y)] = min(x, y)
                    merged = True
        edges = {(find(u), a, find(v)) for u, a, v in edges}
        if not merged:
            break
    return _renumber(rank, edges, find(0), tuple(gens))


def _renumber(rank: int, edges: set, base, gens: tuple = ()) -> SubgroupGraph:
    """Relabel vertices ``0..`` in breadth-first order from the base."""
    adj: dict = {}
    for u, a, v in edges:
        adj.setdefault(u, []).append((a, v))
        adj.setdefault(v, []).append((-a, u))
    num = {base: 0}
    todo = deque([base])
    while todo:
        u = todo.popleft()
        for _, v in sorted(adj.get(u, [])):
            if v not in num:
                num[v] = len(num)
                todo.append(v)
    new = tuple(sorted((num[u], a, num[v]) for u, a, v in edges))
    return SubgroupGraph(rank, tuple(range(len(num))), new, 0, gens)


def canonical_form(edges: Iterable[tuple]) -> tuple:
    """Unbased canonical code of a folded graph: minimum over base vertices
    of the breadth-first numbering code."""
    edges = list(edges)
    verts = {u for u, _, _ in edges} | {v for _, _, v in edges}
    best = None
    for b in sorted(verts):
        code = _renumber(0, set(edges), b).edges
        if best is None or code < best:
            best = code
    return best or ()


def undirected_core(edges: Iterable[tuple], keep=()) -> list:
    """Strip vertices of degree one (except those in ``keep``) until none remain."""
    edges = list(edges)
    keep = set(keep)
    while True:
        deg: dict = {}
        for u, _, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        leaves = {v for v, d in deg.items() if d == 1 and v not in keep}
        if not leaves:
            return edges
        edges = [x for x in edges if x[0] not in leaves and x[2] not in leaves]


# -- graphs with involution ------------------------------------------------------------
@dataclass
class InvolutiveGraph:
    graph: Digraph  # labels are signed letters
    einv: dict
    vinv: dict
    base: Optional[object] = None

    def __post_init__(self):
        g = self.graph
        for e in g.edges:
            f = self.einv[e]
            if f == e or self.einv[f] != e:
                raise InvalidInput("edge involution must be a fixed-point-free involution")
            if g.o(e) != self.vinv[g.t(f)]:
                raise InvalidInput("origin of an edge must invert the terminus of its inverse")
            if g.label(f) != -g.label(e):
                raise InvalidInput("inverse edges must carry inverse labels")
        for v in g.vertices:
            if self.vinv[self.vinv[v]] != v:
                raise InvalidInput("vertex involution must be an involution")
        if self.base is not None and self.vinv[self.base] != self.base:
            raise InvalidInput("basepoint must be fixed by the involution")

    @property
    def is_stallings(self) -> bool:
        return all(self.vinv[v] == v for v in self.graph.vertices)

    def edge_pairs(self) -> int:
        return len(self.graph.edges) // 2


def involutive(g: SubgroupGraph | Iterable[tuple], base=None) -> InvolutiveGraph:
    """Directed double of an undirected folded graph; edge ``i`` becomes
    ``(i, 1)`` and its inverse ``(i, -1)``."""
    if isinstance(g, SubgroupGraph):
        base = g.base
        verts, und = list(g.vertices), list(g.edges)
    else:
        und = list(g)
        verts = sorted({u for u, _, _ in und} | {v for _, _, v in und} | ({base} if base is not None else set()))
    edges, labels = {}, {}
    for i, (u, a, v) in enumerate(und):
        edges[(i, 1)] = (u, v)
        labels[(i, 1)] = a
        edges[(i, -1)] = (v, u)
        labels[(i, -1)] = -a
    d = Digraph(verts, edges, initial=[base] if base is not None else [], final=[base] if base is not None else [], labels=labels)
    einv = {(i, s): (i, -s) for i, s in edges}
    return InvolutiveGraph(d, einv, {v: v for v in verts}, base)


def st(g: InvolutiveGraph) -> InvolutiveGraph:
    """Identify every vertex with its inverse; edge ids are unchanged."""
    rep = {v: min(v, g.vinv[v], key=repr) for v in g.graph.vertices}
    d = g.graph
    verts = sorted(set(rep.values()), key=repr)
    edges = {e: (rep[a], rep[b]) for e, (a, b) in d.edges.items()}
    marks = [rep[g.base]] if g.base is not None else []
    nd = Digraph(verts, edges, initial=marks, final=marks, labels=dict(d.labels or {}))
    return InvolutiveGraph(nd, dict(g.einv), {v: v for v in verts}, rep[g.base] if g.base is not None else None)


def splittable(g: InvolutiveGraph) -> list:
    d = g.graph
    out = []
    for v in d.vertices:
        if v == g.base or g.vinv[v] != v:
            continue
        bs, fs = d.bstar[v], d.fstar[v]
        if len(bs) == 2 and len(fs) == 2 and set(fs) == {g.einv[e] for e in bs}:
            out.append(v)
    return out


def sp(g: InvolutiveGraph) -> InvolutiveGraph:
    """Split every splittable vertex ``v`` into ``(v, 1)`` (entered by ``e1``,
    left by ``e2``) and ``(v, -1)`` (entered by ``e2^-1``, left by
    ``e1^-1``).  New vertices are never splittable, so one pass is the
    unsplittable graph."""
    d = g.graph
    split = {}
    for v in splittable(g):
        e1 = min(d.bstar[v], key=repr)
        (other,) = [e for e in d.bstar[v] if e != e1] or [e1]
        split[v] = (e1, g.einv[other])  # (e1, e2)
    if not split:
        return g
    verts, vinv = [], {}
    for v in d.vertices:
        if v in split:
            verts += [(v, 1), (v, -1)]
            vinv[(v, 1)], vinv[(v, -1)] = (v, -1), (v, 1)
        else:
            verts.append(v)
            vinv[v] = g.vinv[v]
    edges = {}
    for e, (a, b) in d.edges.items():
        if a in split:
            a = (a, 1) if e == split[a][1] else (a, -1)
        if b in split:
            b = (b, 1) if e == split[b][0] else (b, -1)
        edges[e] = (a, b)
    marks = [g.base] if g.base is not None else []
    nd = Digraph(verts, edges, initial=marks, final=marks, labels=dict(d.labels or {}))
    return InvolutiveGraph(nd, dict(g.einv), vinv, g.base)


def isomorphic(g1: InvolutiveGraph, g2: InvolutiveGraph) -> bool:
    """Label-preserving isomorphism of the underlying directed graphs."""
    return nx.is_isomorphic(_labeled_nx(g1.graph), _labeled_nx(g2.graph), edge_match=_label_multiset_match)


def _labeled_nx(d: Digraph) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    g.add_nodes_from(d.vertices)
    for e, (a, b) in d.edges.items():
        g.add_edge(a, b, key=e, label=d.label(e))
    return g


def _label_multiset_match(a: dict, b: dict) -> bool:
    la = sorted(x.get("label") for x in a.values())
    lb = sorted(x.get("label") for x in b.values())
    return la == lb


def _is_connected(g: InvolutiveGraph) -> bool:
    s = st(g).graph
    return len(weak_components(s)) <= 1


def branch_rank(g: InvolutiveGraph) -> int:
    """Rank from branch elements: ``|non-cycle elements|/2 - |branch vertices| + 1``."""
    dec = branch_decomposition(g.graph)
    non_cycles = sum(1 for el in dec.elements if el.kind != "cycle")
    if non_cycles % 2:
        raise InvalidInput("branch elements do not pair up; graph has hairs")
    return non_cycles // 2 - len(dec.branch) + 1


def euler_rank(g: InvolutiveGraph) -> int:
    s = st(g).graph
    return len(s.edges) // 2 - len(s.vertices) + 1


def rank(g: InvolutiveGraph | SubgroupGraph) -> int:
    """Rank of the fundamental group of a connected graph with involution.

    The branch-element formula runs on the split undirected core (hairs
    would pair a segment with itself); the Euler rank of the quotient is
    computed alongside and the two must agree.
    """
    if isinstance(g, SubgroupGraph):
        g = involutive(g)
    if not g.graph.vertices:
        raise InvalidInput("empty graph")
    if not _is_connected(g):
        raise InvalidInput("graph is not connected")
    e = euler_rank(g)
    und = _undirected(st(g))
    cr = undirected_core(und)
    if not cr:
        r = 0
    else:
        r = branch_rank(sp(involutive(cr)))
    if r != e:
        raise AssertionError(f"rank formulas disagree: {r} != {e}")
    return r


def _undirected(g: InvolutiveGraph) -> list:
    """One record ``(u, a, v)`` with ``a > 0`` per inverse pair (Stallings input)."""
    d = g.graph
    out = []
    done = set()
    for e in sorted(d.edges, key=repr):
        if e in done:
            continue
        f = g.einv[e]
        done.update((e, f))
        if d.label(e) > 0:
            out.append((d.o(e), d.label(e), d.t(e)))
        else:
            out.append((d.o(f), d.label(f), d.t(f)))
    return out


# -- intersections ------------------------------------------------------------------------
@dataclass
class IntersectionClass:
    key: tuple  # canonical unbased core
    rank: int
    multiplicity: int
    label: Optional[Word] = None  # cyclic word, for rank one

    @property
    def reduced_rank(self) -> int:
        return max(self.rank - 1, 0)

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "multiplicity": self.multiplicity,
            "label": format_word(self.label) if self.label is not None else None,
            "core_edges": [list(x) for x in self.key],
        }


@dataclass
class Intersection:
    classes: list
    component_ranks: list  # one entry per non-trivial component (double coset)
    contractible: int

    @property
    def rank_sum(self) -> int:
        return sum(c.rank for c in self.classes)

    @property
    def raw_rank_sum(self) -> int:
        return sum(self.component_ranks)

    @property
    def reduced_rank_sum(self) -> int:
        return sum(max(r - 1, 0) for r in self.component_ranks)


def cyclic_label(core_edges: list) -> Word:
    """Cyclic word read around a graph that is a single undirected cycle,
    normalized up to rotation and inversion."""
    adj: dict = {}
    for u, a, v in core_edges:
        adj.setdefault(u, []).append((a, v))
        adj.setdefault(v, []).append((-a, u))
    start = min(adj)
    word = []
    v = start
    # walk the cycle leaving by the smallest letter first
    a, w = min(adj[v])
    while True:
        word.append(a)
        prev = v
        v = w
        if v == start and len(word) == len(core_edges):
            break
        options = [x for x in adj[v] if not (x[1] == prev and x[0] == -a)]
        a, w = options[0] if len(options) == 1 else min(options)
    return normal_cyclic_word(word)


def normal_cyclic_word(w: Sequence[int]) -> Word:
    """Representative of a cyclic word up to rotation and inversion,
    preferring the orientation with fewer inverse letters."""
    cands = [tuple(least_rotation(tuple(w))), tuple(least_rotation(inverse(w)))]
    return min(cands, key=lambda x: (sum(a < 0 for a in x), x))


def _check_pair(A: SubgroupGraph, B: SubgroupGraph) -> None:
    if A.rank != B.rank:
        raise InvalidInput("subgroups live in free groups of different rank")


def intersection_classes(A: SubgroupGraph, B: SubgroupGraph) -> Intersection:
    """Conjugacy classes of the non-trivial intersections ``A ∩ B^g``.

    Built from the directed core of the product of the split graphs; each
    pair of mutually inverse components is one double coset.
    """
    _check_pair(A, B)
    ga, gb = sp(involutive(_unbased(A))), sp(involutive(_unbased(B)))
    prod = labeled_product(ga.graph, gb.graph).product
    c = core(prod)
    inv_e = {(e, f): (ga.einv[e], gb.einv[f]) for e, f in c.edges}
    comp_of = {}
    comps = weak_components(c)
    for i, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = i
    edges_of: dict = {}
    for x in c.edges:
        edges_of.setdefault(comp_of[c.o(x)], []).append(x)
    done = set()
    classes: dict = {}
    ranks = []
    contractible = 0
    for i in range(len(comps)):
        if i in done or i not in edges_of:
            continue
        x = edges_of[i][0]
        j = comp_of[c.o(inv_e[x])]
        done.update((i, j))
        es = edges_of[i] + (edges_of[j] if j != i else [])
        sub = c.subgraph(es)
        vinv = {(u, v): (ga.vinv[u], gb.vinv[v]) for u, v in sub.vertices}
        ig = InvolutiveGraph(sub, {e: inv_e[e] for e in es}, vinv)
        und = _undirected(st(ig))
        cr = undirected_core(und)
        if not cr:
            contractible += 1
            continue
        r = len(cr) - len({u for u, _, _ in cr} | {v for _, _, v in cr}) + 1
        ranks.append(r)
        key = canonical_form(_compact(cr))
        if key in classes:
            classes[key].multiplicity += 1
        else:
            classes[key] = IntersectionClass(key, r, 1, cyclic_label(key) if r == 1 else None)
    ordered = [classes[k] for k in sorted(classes)]
    return Intersection(ordered, sorted(ranks), contractible)


def _unbased(A: SubgroupGraph) -> list:
    return list(A.edges)


def _compact(edges: list) -> list:
    num: dict = {}
    for u, _, v in sorted(edges, key=repr):
        num.setdefault(u, len(num))
        num.setdefault(v, len(num))
    return [(num[u], a, num[v]) for u, a, v in edges]


def intersection_ranks_classical(A: SubgroupGraph, B: SubgroupGraph) -> list:
    """Ranks of the non-tree components of the undirected product, sorted."""
    _check_pair(A, B)
    und = []
    for u1, a, v1 in A.edges:
        for u2, b, v2 in B.edges:
            if a == b:
                und.append(((u1, u2), a, (v1, v2)))
    parent: dict = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, _, v in und:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups: dict = {}
    for x in und:
        groups.setdefault(find(x[0]), []).append(x)
    out = []
    for es in groups.values():
        cr = undirected_core(es)
        if cr:
            out.append(len(cr) - len({u for u, _, _ in cr} | {v for _, _, v in cr}) + 1)
    return sorted(out)


def reduced_rank(A: SubgroupGraph) -> int:
    return max(rank(A) - 1, 0)


# -- orders and spectra -------------------------------------------------------------------------
def relative_order(A: SubgroupGraph, g: Sequence[int]):
    """Least ``n >= 1`` with ``g^n`` in ``A``, or ``math.inf``."""
    g = tuple(g)
    if not g:
        raise InvalidInput("the identity has no relative order")
    if not is_reduced(g):
        raise InvalidInput("word must be freely reduced")
    u, c = cyclic_split(g)
    v0 = A.trace(u)
    if v0 is None:
        return inf
    v = v0
    seen = {v0}
    for n in range(1, len(A.vertices) + 1):
        v = A.trace(c, v)
        if v is None:
            return inf
        if v == v0:
            return n
        if v in seen:
            return inf
        seen.add(v)
    return inf


@dataclass(frozen=True)
class CyclicClass:
    word: Word  # primitive, normalized up to rotation and inversion
    index: int


def maximal_cyclic_classes(A: SubgroupGraph) -> list:
    """Conjugacy classes ``[M]`` of maximal cyclic subgroups with
    ``12 rk(A) <= [M : A ∩ M] < inf``, from long cycles of the split graph."""
    r = rank(A)
    if r == 0:
        return []
    g = sp(involutive(A))
    lc = long_cycles(g.graph, threshold=12 * r)
    out = {}
    for cyc in lc:
        w = tuple(cyc.loop)
        key = normal_cyclic_word(w)
        out.setdefault(key, CyclicClass(key, cyc.degree))
    return [out[k] for k in sorted(out)]


def spectrum_superset(A: SubgroupGraph) -> set:
    r = rank(A)
    if r < 1:
        raise InvalidInput("subgroup must be non-trivial")
    return set(range(1, 12 * r)) | {c.index for c in maximal_cyclic_classes(A)}


def divides_some(n: int, N: Iterable[int]) -> bool:
    return any(m % n == 0 for m in N)
