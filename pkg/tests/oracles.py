"""Brute-force reference implementations used by the tests.

Nothing here imports the algorithms under test; only the plain graph
container is shared.
"""

from __future__ import annotations

from collections import deque

import networkx as nx


# -- words -----------------------------------------------------------------
def period(w) -> int:
    n = len(w)
    for p in range(1, n):
        if all(w[i] == w[i + p] for i in range(n - p)):
            return p
    return n


def primitive(w) -> bool:
    n = len(w)
    return not any(n % d == 0 and w == w[:d] * (n // d) for d in range(1, n))


def sub_set(v, w) -> set:
    return {i for i in range(len(v)) if tuple(v[i : i + len(w)]) == tuple(w)}


def suff_set(v, w) -> set:
    nv, nw = len(v), len(w)
    return {i for i in range(nv) if nv - i <= nw and tuple(v[i:]) == tuple(w[: nv - i])}


def crossing(v, w, j) -> set:
    return {i for i in sub_set(v, w) if i <= j < i + len(w)}


def least_rotation(w):
    return min(w[i:] + w[:i] for i in range(len(w)))


def midpoint_crossings(w0, x) -> int:
    sq = w0 + w0
    j = len(w0) - 1
    return len(crossing(sq, x, j))


def longest_power_factor(x, w, side="left") -> int:
    """Longest prefix/suffix of x occurring inside some power of w."""
    big = w * (len(x) // len(w) + 2)
    best = 0
    for k in range(len(x) + 1):
        piece = x[:k] if side == "left" else x[len(x) - k :]
        if not piece or any(big[i : i + k] == piece for i in range(len(big) - k + 1)):
            best = k
    return best


# -- automata --------------------------------------------------------------
def product_nonempty_nx(d1, d2) -> bool:
    """Non-emptiness via networkx reachability on the explicit product."""
    g = nx.DiGraph()
    (x,) = d1.initial
    (y,) = d2.initial
    g.add_node((x, y))
    for e, (a, b) in d1.edges.items():
        for f, (c, d) in d2.edges.items():
            if d1.labels[e] == d2.labels[f]:
                g.add_edge((a, c), (b, d))
    reach = nx.descendants(g, (x, y)) | {(x, y)}
    return any(u in d1.final and v in d2.final for u, v in reach)


def accepted_words(d, max_len: int) -> set:
    """Every accepted word of length <= max_len, by explicit enumeration."""
    (x,) = d.initial
    out = set()
    frontier = [((), x)]
    for _ in range(max_len + 1):
        nxt = []
        for word, v in frontier:
            if v in d.final:
                out.add(word)
            for e, (a, b) in d.edges.items():
                if a == v:
                    nxt.append((word + (d.labels[e],), b))
        frontier = nxt
    return out


def closed_walks_by_power(g, max_len: int, min_power: int):
    """Closed walks ``(edges, word, power)`` whose label is ``w^power`` for
    a primitive ``w`` with ``power >= min_power`` and total length at most
    ``max_len``, in a deterministic labeled graph.  Exhaustive: such a walk
    is determined by its start vertex and first ``|w|`` edges."""
    step = {}
    for e, (a, _) in g.edges.items():
        step[(a, g.labels[e])] = e
    lim = max_len // max(min_power, 1)

    def prefixes(v, k):
        if k == 0:
            yield ()
            return
        for e in g.fstar[v]:
            for rest in prefixes(g.edges[e][1], k - 1):
                yield (e,) + rest

    for k in range(1, lim + 1):
        for v in g.vertices:
            for first in prefixes(v, k):
                w = tuple(g.labels[e] for e in first)
                if not primitive(w):
                    continue
                cur, edges = g.edges[first[-1]][1], list(first)
                d = 1
                while True:
                    if cur == v and d >= min_power:
                        yield tuple(edges), w, d
                    if len(edges) + k > max_len:
                        break
                    for a in w:
                        e = step.get((cur, a))
                        if e is None:
                            break
                        edges.append(e)
                        cur = g.edges[e][1]
                    else:
                        d += 1
                        continue
                    break


def primitive_root(seq):
    n = len(seq)
    for d in range(1, n + 1):
        if n % d == 0 and tuple(seq) == tuple(seq[:d]) * (n // d):
            return tuple(seq[:d])
    return tuple(seq)


# -- free groups --------------------------------------------------------------
def reduce(w):
    out = []
    for a in w:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def reduced_words(letters, length: int):
    """Every freely reduced word of the given length."""
    if length == 0:
        yield ()
        return
    for w in reduced_words(letters, length - 1):
        for a in letters:
            if not w or w[-1] != -a:
                yield w + (a,)


def subgroup_ball(gens, radius: int) -> set:
    """Reduced words of the subgroup reachable as products of at most
    ``radius`` generators or inverses."""
    letters = [tuple(g) for g in gens] + [tuple(-a for a in reversed(g)) for g in gens]
    seen = {()}
    frontier = deque([()])
    for _ in range(radius):
        nxt = deque()
        for w in frontier:
            for g in letters:
                u = reduce(w + g)
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return seen
