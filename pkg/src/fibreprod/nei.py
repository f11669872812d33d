"""Intersection non-emptiness for deterministic automata.

An automaton is a labeled :class:`Digraph` with exactly one initial vertex
whose labels are deterministic (a forwards immersion into the rose).
:func:`rabin_scott` is plain reachability in the product and serves as the
reference; :func:`nei` explores only the parts of the product that the
structure theory says can matter, and answers questions about the
long-cycle part arithmetically.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional, Sequence

from .digraph import Digraph, betti, boundary, branch_decomposition, is_forwards_immersion
from .errors import InvalidInput
from .fibre import FibreProduct, is_cycle_component
from .longcycles import LongCycle, LongCycles, long_cycles
from .words import find_all, is_primitive


def check_dfa(d: Digraph, name: str = "automaton") -> None:
    if not d.is_labeled:
        raise InvalidInput(f"{name} must be labeled")
    if len(d.initial) != 1:
        raise InvalidInput(f"{name} must have exactly one initial vertex")
    if not is_forwards_immersion(d):
        raise InvalidInput(f"{name} is not deterministic")


def _check_alphabet(d1: Digraph, d2: Digraph, alphabet: Optional[Iterable]) -> None:
    if alphabet is None:
        return
    sigma = set(alphabet)
    if not (d1.alphabet() <= sigma and d2.alphabet() <= sigma):
        raise InvalidInput("automata use letters outside the declared alphabet")


def rabin_scott(d1: Digraph, d2: Digraph, alphabet: Optional[Iterable] = None) -> bool:
    """Breadth-first search of the product from the pair of initial states."""
    check_dfa(d1, "first automaton")
    check_dfa(d2, "second automaton")
    _check_alphabet(d1, d2, alphabet)
    (x,) = d1.initial
    (y,) = d2.initial
    start = (x, y)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for u, v in frontier:
            if u in d1.final and v in d2.final:
                return True
            step = d2.step[v]
            for e in d1.fstar[u]:
                fs = step.get(d1.label(e))
                if fs:
                    w = (d1.t(e), d2.t(fs[0]))
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
        frontier = nxt
    return False


# -- the product, explored lazily ------------------------------------------------
class ProductView:
    """Out-stars of the product of two deterministic labeled graphs, computed
    on demand."""

    def __init__(self, g1: Digraph, g2: Digraph):
        self.g1, self.g2 = g1, g2
        dec1, dec2 = branch_decomposition(g1), branch_decomposition(g2)
        self.vbar1, self.vbar2 = dec1.branch, dec2.branch
        self.dec1, self.dec2 = dec1, dec2

    @classmethod
    def of(cls, fp: FibreProduct) -> "ProductView":
        return cls(fp.gamma.source, fp.lam.source)

    def fstar(self, x) -> list:
        u, v = x
        g1, g2 = self.g1, self.g2
        step = g2.step[v]
        out = []
        for e in g1.fstar[u]:
            fs = step.get(g1.label(e))
            if fs:
                out.extend((e, f) for f in fs)
        return out

    def t(self, ef):
        e, f = ef
        return self.g1.t(e), self.g2.t(f)

    def o(self, ef):
        e, f = ef
        return self.g1.o(e), self.g2.o(f)

    def is_branch_pair(self, x) -> bool:
        return x[0] in self.vbar1 and x[1] in self.vbar2

    def is_final(self, x) -> bool:
        return x[0] in self.g1.final and x[1] in self.g2.final


def forced_path(view, e_pair, l: int, stop_on_repeat: bool = False) -> list:
    """Follow the unique continuation from ``e_pair`` until reaching a pair
    of branch vertices, a dead end, or ``l`` edges.  With ``stop_on_repeat``
    the walk also stops on revisiting a vertex (it would only go round)."""
    if isinstance(view, FibreProduct):
        view = ProductView.of(view)
    if l < 1:
        raise InvalidInput("length cap must be positive")
    path = [e_pair]
    seen = {view.o(e_pair)}
    v = view.t(e_pair)
    while len(path) < l and not view.is_branch_pair(v):
        if stop_on_repeat:
            if v in seen:
                break
            seen.add(v)
        nxt = view.fstar(v)
        if not nxt:
            break
        if len(nxt) != 1:
            raise AssertionError("continuation is not unique outside branch pairs")
        path.append(nxt[0])
        v = view.t(nxt[0])
    return path


# -- arithmetic on pairs of circles --------------------------------------------------
def _aligned_shift(a: Sequence, b: Sequence, p: int) -> Optional[int]:
    """Shift ``s`` (mod ``p``) with ``a[s + t] == b[t]`` for both words read
    as powers of primitive loops of length ``p``; ``None`` if the loops are
    not conjugate."""
    if len(a) % p or len(b) % p:
        return None
    hits = find_all(tuple(a[:p]) * 2, tuple(b[:p]))
    if not hits or hits[0] >= p:
        return None
    return hits[0]


def _diff_residues(pairs: Iterable, g: int, p: int, s0: int) -> set:
    """Orbit residues ``(i - j) mod g`` of aligned position pairs."""
    return {(i - j) % g for i, j in pairs if (i - j - s0) % p == 0}


def _cross(P1: Iterable, P2: Iterable, g: int) -> list:
    # positions in the second circle only matter mod g
    mods = sorted({j % g for j in P2})
    return [(i, j) for i in P1 for j in mods]


def _residue_accepting(n1, n2, p, s0, init_pairs, final_pairs) -> bool:
    g = gcd(n1, n2)
    return bool(_diff_residues(init_pairs, g, p, s0) & _diff_residues(final_pairs, g, p, s0))


def _circle_coordinates(d: Digraph) -> tuple:
    """``(vertex order, label word)`` of a graph that is one directed cycle."""
    if not is_cycle_component(d) or len(d.vertices) != len(d.edges):
        raise InvalidInput("graph is not a single directed cycle")
    v0 = d.vertices[0]
    order, word = [v0], []
    v = v0
    while True:
        (e,) = d.fstar[v]
        word.append(d.label(e))
        v = d.t(e)
        if v == v0:
            break
        order.append(v)
    return order, tuple(word)


def w_cycle_accepting(d1: Digraph, d2: Digraph, w: Sequence, k: Optional[int] = None) -> bool:
    """Whether the core of the product of two circles reading powers of the
    primitive loop ``w`` has an accepting path (length 0 allowed).

    Both circles may carry several initial and final vertices.  When ``k``
    is given, the initial vertices of each circle must lie in at most
    ``2k`` blocks of length ``|w|``.
    """
    w = tuple(w)
    if not w or not is_primitive(w):
        raise InvalidInput("loop must be primitive")
    p = len(w)
    coords = []
    for d in (d1, d2):
        order, word = _circle_coordinates(d)
        base = _aligned_shift(word, w, p)
        if base is None:
            raise InvalidInput("circle does not read a power of the loop")
        rot = word[base:] + word[:base]
        if rot != w * (len(word) // p):
            raise InvalidInput("circle does not read a power of the loop")
        pos = {v: (i - base) % len(order) for i, v in enumerate(order)}
        coords.append((pos, len(order)))
    (pos1, n1), (pos2, n2) = coords
    init1 = [pos1[v] for v in d1.initial]
    init2 = [pos2[v] for v in d2.initial]
    if k is not None:
        for init in (init1, init2):
            if len({i // p for i in init}) > 2 * k:
                raise InvalidInput("initial vertices are not covered by k blocks")
    if not init1 or not init2:
        return False
    g = gcd(n1, n2)
    fin1 = [pos1[v] for v in d1.final]
    fin2 = [pos2[v] for v in d2.final]
    return _residue_accepting(n1, n2, p, 0, _cross(init1, init2, g), _cross(fin1, fin2, g))


def core_accepting_bfs(d1: Digraph, d2: Digraph) -> bool:
    """Reference for :func:`w_cycle_accepting`: search the explicit core of
    the product from every initial pair."""
    from .digraph import core
    from .fibre import labeled_product

    c = core(labeled_product(d1, d2).product)
    starts = [x for x in c.vertices if x[0] in d1.initial and x[1] in d2.initial]
    seen = set(starts)
    todo = list(starts)
    while todo:
        x = todo.pop()
        if x[0] in d1.final and x[1] in d2.final:
            return True
        for e in c.fstar[x]:
            y = c.t(e)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return False


@dataclass(frozen=True)
class CirclePair:
    """Two long cycles over conjugate loops: position ``i`` of the first
    and ``j`` of the second lie on a core orbit iff ``(i - j - shift) % p == 0``;
    the orbit is ``(i - j) % g``."""

    first: int
    second: int
    p: int
    shift: int
    g: int


def circle_pairs(g1: Digraph, g2: Digraph, lc1: LongCycles, lc2: LongCycles) -> list:
    out = []
    for a, c1 in enumerate(lc1.cycles):
        word1 = g1.word(c1.edges)
        for b, c2 in enumerate(lc2.cycles):
            if len(c1.loop) != len(c2.loop):
                continue
            p = len(c1.loop)
            s = _aligned_shift(word1, g2.word(c2.edges), p)
            if s is not None:
                out.append(CirclePair(a, b, p, s, gcd(len(c1.edges), len(c2.edges))))
    return out


def _positions(cycle: LongCycle) -> dict:
    out: dict = {}
    for i, v in enumerate(cycle.vertices):
        out.setdefault(v, []).append(i)
    return out


def s_connectivity(g1: Digraph, g2: Digraph, lc1: LongCycles, lc2: LongCycles, e_pair, xy) -> bool:
    """Whether some path starting with ``e_pair`` and ending at ``xy`` lifts
    to the core of the product of the long-cycle sets."""
    e, f = e_pair
    x, y = xy
    for cp in circle_pairs(g1, g2, lc1, lc2):
        c1, c2 = lc1.cycles[cp.first], lc2.cycles[cp.second]
        n1, n2 = len(c1.edges), len(c2.edges)
        I1 = [i for i, a in enumerate(c1.edges) if a == e]
        I2 = [j for j, b in enumerate(c2.edges) if b == f]
        F1 = [i for i, v in enumerate(c1.vertices) if v == x]
        F2 = [j for j, v in enumerate(c2.vertices) if v == y]
        if _residue_accepting(n1, n2, cp.p, cp.shift, _cross(I1, I2, cp.g), _cross(F1, F2, cp.g)):
            return True
    return False


# -- the adjacency partition ----------------------------------------------------------
@dataclass
class AdjacencyPartition:
    """Branch pairs and their out-edges lying on the long-cycle image,
    grouped by component of that image."""

    vertex_block: dict = field(default_factory=dict)
    edge_block: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)  # block id -> set of branch pairs

    @property
    def count(self) -> int:
        return len(self.blocks)


def adjacency_partition(
    g1: Digraph, g2: Digraph, lc1: LongCycles, lc2: LongCycles, extra: Sequence = ()
) -> AdjacencyPartition:
    """Orbits of the long-cycle product are joined when they share a branch
    pair; each resulting class is one block.  Out-edges of the vertices in
    ``extra`` that lie on the image are recorded as well."""
    view_vbar1 = branch_decomposition(g1).branch
    view_vbar2 = branch_decomposition(g2).branch
    extra = set(extra)
    parent: dict = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)

    vert_orbits: dict = {}
    edge_orbit: dict = {}
    for cp in circle_pairs(g1, g2, lc1, lc2):
        c1, c2 = lc1.cycles[cp.first], lc2.cycles[cp.second]
        pos2 = _positions(c2)
        by_mod: dict = {}
        for v, js in pos2.items():
            for j in js:
                by_mod.setdefault(j % cp.g, []).append(j)
        for i, u in enumerate(c1.vertices):
            for jm, js in by_mod.items():
                if (i - jm - cp.shift) % cp.p:
                    continue
                orbit = (cp.first, cp.second, (i - jm) % cp.g)
                for j in js:
                    v = c2.vertices[j]
                    xy = (u, v)
                    branch = u in view_vbar1 and v in view_vbar2
                    if not branch and xy not in extra:
                        continue
                    parent.setdefault(orbit, orbit)
                    edge_orbit[(c1.edges[i], c2.edges[j])] = orbit
                    if branch:
                        vert_orbits.setdefault(xy, []).append(orbit)
    for orbits in vert_orbits.values():
        for o in orbits[1:]:
            union(orbits[0], o)
    ids: dict = {}
    part = AdjacencyPartition()
    for o in sorted(parent, key=repr):
        r = find(o)
        if r not in ids:
            ids[r] = len(part.blocks)
            part.blocks.append(set())
    for xy, orbits in vert_orbits.items():
        b = ids[find(orbits[0])]
        part.vertex_block[xy] = b
        part.blocks[b].add(xy)
    for ef, o in edge_orbit.items():
        part.edge_block[ef] = ids[find(o)]
    return part


# -- the main procedure -------------------------------------------------------------------
@dataclass
class NeiResult:
    answer: bool
    branch: Optional[str]  # "eps", "A", "B" or None
    m: int
    n: int
    steps: int
    cap: int
    explored_edges: set = field(repr=False, default_factory=set)
    origins: set = field(repr=False, default_factory=set)
    trace: list = field(repr=False, default_factory=list)

    def as_dict(self) -> dict:
        return {
            "answer": self.answer,
            "branch": self.branch,
            "m": self.m,
            "n": self.n,
            "steps": self.steps,
            "cap": self.cap,
            "empty_word_accepted": self.branch == "eps",
        }


def parameters(g1: Digraph, g2: Digraph) -> tuple:
    m = betti(g1)[1] + len(boundary(g1)) + betti(g2)[1] + len(boundary(g2))
    n = len(g1.edges) + len(g2.edges)
    return m, n


def path_cap(g1: Digraph, g2: Digraph) -> int:
    nb1 = len(branch_decomposition(g1).elements)
    nb2 = len(branch_decomposition(g2).elements)
    c1, c2 = nb1 + len(g1.initial), nb2 + len(g2.initial)
    return 508 * c1 * c2 * (nb2 * len(g1.edges) + nb1 * len(g2.edges)) + 1


def nei(
    d1: Digraph,
    d2: Digraph,
    alphabet: Optional[Iterable] = None,
    record: bool = False,
    exhaustive: bool = False,
) -> NeiResult:
    """Decide whether the two automata accept a common word.

    ``exhaustive`` keeps exploring after an answer is known (used to check
    the explored graph against the full product).
    """
    check_dfa(d1, "first automaton")
    check_dfa(d2, "second automaton")
    _check_alphabet(d1, d2, alphabet)
    m, n = parameters(d1, d2)
    cap = path_cap(d1, d2)
    (x,) = d1.initial
    (y,) = d2.initial
    start = (x, y)
    view = ProductView(d1, d2)
    if view.is_final(start) and not exhaustive:
        return NeiResult(True, "eps", m, n, 0, cap, set(), {start})

    lc1, lc2 = long_cycles(d1), long_cycles(d2)
    part = adjacency_partition(d1, d2, lc1, lc2, extra=[start])
    nb1, nb2 = len(view.dec1.elements), len(view.dec2.elements)

    ndir: OrderedDict = OrderedDict((ef, None) for ef in view.fstar(start))
    odir: set = set()
    theta_edges: set = set()
    theta_verts: set = {start}
    trace = []
    steps = 0
    max_steps = nb1 * nb2 + len(ndir)
    while ndir:
        ef, _ = ndir.popitem(last=False)
        assert ef not in odir
        before = len(odir)
        odir.add(ef)
        assert len(odir) > before
        steps += 1
        assert steps <= max_steps, "step bound exceeded"
        block = part.edge_block.get(ef)
        if block is not None:
            for v in part.blocks[block]:
                for nxt in view.fstar(v):
                    if nxt not in odir:
                        ndir.setdefault(nxt, None)
            if record:
                trace.append(("long", ef, block))
            continue
        g = forced_path(view, ef, cap, stop_on_repeat=True)
        end = view.t(g[-1])
        if view.is_branch_pair(end):
            theta_edges.update(g)
            theta_verts.update(view.t(e) for e in g)
            for nxt in view.fstar(end):
                if nxt not in odir:
                    ndir.setdefault(nxt, None)
            if record:
                trace.append(("forced", ef, len(g)))
        else:
            j = 0
            for i, e in enumerate(g, 1):
                if view.is_final(view.t(e)):
                    j = i
            # a walk cut short on a repeat goes round; keep the loop if it meets a final
            ends = [view.o(g[0])] + [view.t(e) for e in g]
            if j and ends[-1] in ends[:-1] and ends.index(ends[-1]) < j:
                j = len(g)
            theta_edges.update(g[:j])
            theta_verts.update(view.t(e) for e in g[:j])
            if record:
                trace.append(("truncated", ef, j))
        if not exhaustive and any(view.is_final(v) for v in theta_verts):
            break
    origins = {view.o(ef) for ef in odir}

    if any(view.is_final(v) for v in theta_verts | origins):
        branch = "eps" if view.is_final(start) else "A"
        return NeiResult(True, branch, m, n, steps, cap, theta_edges, origins, trace)
    if _long_cycle_accepting(d1, d2, lc1, lc2, origins):
        return NeiResult(True, "B", m, n, steps, cap, theta_edges, origins, trace)
    return NeiResult(False, None, m, n, steps, cap, theta_edges, origins, trace)


def _long_cycle_accepting(d1, d2, lc1: LongCycles, lc2: LongCycles, origins: set) -> bool:
    """Whether a path from some origin to a pair of final states lifts to
    the core of the long-cycle product."""
    if not origins:
        return False
    by_first: dict = {}
    for u, v in origins:
        by_first.setdefault(u, set()).add(v)
    for cp in circle_pairs(d1, d2, lc1, lc2):
        c1, c2 = lc1.cycles[cp.first], lc2.cycles[cp.second]
        pos2 = _positions(c2)
        init = []
        for i, u in enumerate(c1.vertices):
            for v in by_first.get(u, ()):
                init.extend((i, j) for j in pos2.get(v, ()))
        if not init:
            continue
        F1 = [i for i, u in enumerate(c1.vertices) if u in d1.final]
        F2 = [j for j, v in enumerate(c2.vertices) if v in d2.final]
        if _residue_accepting(len(c1.edges), len(c2.edges), cp.p, cp.shift, init, _cross(F1, F2, cp.g)):
            return True
    return False
