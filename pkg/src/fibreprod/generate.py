"""Seeded generators for automata, immersions and test instances.

Every generator takes a :class:`random.Random` so runs are reproducible.
Vertices are integers ``0..`` with ``0`` initial.
"""

from __future__ import annotations

import random
from typing import Sequence

from .digraph import Digraph, make_graph
from .words import is_primitive

LETTERS = "abcd"


def _finish(n: int, triples: list, rng: random.Random, final_prob: float, finals=None) -> Digraph:
    if finals is None:
        finals = [v for v in range(n) if rng.random() < final_prob]
    return make_graph(triples, initial=[0], final=finals, vertices=range(n))


def random_dfa(
    rng: random.Random,
    n: int,
    alphabet: str = "ab",
    density: float = 0.7,
    final_prob: float = 0.2,
) -> Digraph:
    """Partial transition function: each (state, letter) is defined with
    probability ``density`` and points anywhere."""
    triples = []
    for v in range(n):
        for a in alphabet:
            if rng.random() < density:
                triples.append((v, rng.randrange(n), a))
    return _finish(n, triples, rng, final_prob)


def tree_dfa(rng: random.Random, n: int, alphabet: str = "ab", final_prob: float = 0.3) -> Digraph:
    """A rooted out-tree with distinct letters on sibling edges."""
    free = {0: list(alphabet)}
    triples = []
    for v in range(1, n):
        parents = [u for u, ls in free.items() if ls]
        if not parents:
            n = v
            break
        u = rng.choice(parents)
        a = free[u].pop(rng.randrange(len(free[u])))
        triples.append((u, v, a))
        free[v] = list(alphabet)
    return _finish(n, triples, rng, final_prob)


def circle_tail_dfa(
    rng: random.Random, tail: int, word: Sequence, final_prob: float = 0.1, finals=None
) -> Digraph:
    """A path of ``tail`` edges from the initial vertex into a circle reading
    ``word``.  The tail reads random letters."""
    k = len(word)
    triples = []
    for i in range(tail):
        triples.append((i, i + 1, rng.choice(LETTERS[:2])))
    for i in range(k):
        triples.append((tail + i, tail + (i + 1) % k, word[i]))
    return _finish(tail + k, triples, rng, final_prob, finals)


def multi_cycle_dfa(rng: random.Random, k: int, length: int, alphabet: str = "ab", final_prob: float = 0.15) -> Digraph:
    """``k`` random cycles through the initial vertex, kept deterministic by
    merging prefixes."""
    out: dict = {0: {}}
    nxt = 1
    for _ in range(k):
        v = 0
        word = [rng.choice(alphabet) for _ in range(rng.randint(1, length))]
        for i, a in enumerate(word):
            last = i == len(word) - 1
            if a in out[v]:
                v = out[v][a]
                continue
            if last:
                out[v][a] = 0
                break
            out[v][a] = nxt
            out[nxt] = {}
            v = nxt
            nxt += 1
    triples = [(u, v, a) for u, d in out.items() for a, v in d.items()]
    return _finish(nxt, triples, rng, final_prob)


def cover_dfa(rng: random.Random, n: int, alphabet: str = "ab", final_prob: float = 0.2) -> Digraph:
    """A finite cover of the rose: each letter acts by a random permutation."""
    triples = []
    for a in alphabet:
        perm = list(range(n))
        rng.shuffle(perm)
        triples.extend((v, perm[v], a) for v in range(n))
    return _finish(n, triples, rng, final_prob)


def planted_long_cycle_dfa(
    rng: random.Random,
    loop: Sequence,
    degree: int,
    extra: int = 3,
    tail: int = 2,
    final_prob: float = 0.05,
) -> Digraph:
    """A circle reading ``loop^degree`` reached by a tail, decorated with
    ``extra`` short side branches that leave and rejoin the circle."""
    loop = tuple(loop)
    k = len(loop) * degree
    word = loop * degree
    out: dict = {}
    n = tail + k
    triples = []
    for i in range(tail):
        a = rng.choice("ab")
        triples.append((i, i + 1, a))
        out.setdefault(i, set()).add(a)
    for i in range(k):
        triples.append((tail + i, tail + (i + 1) % k, word[i]))
        out.setdefault(tail + i, set()).add(word[i])
    for _ in range(extra):
        # a detour of 1..3 edges leaving the circle and rejoining it
        u = rng.randrange(n)
        letters = [a for a in LETTERS[:3] if a not in out.get(u, set())]
        if not letters:
            continue
        prev = u
        for _ in range(rng.randint(0, 2)):
            a = rng.choice(letters) if prev == u else rng.choice("abc")
            triples.append((prev, n, a))
            out.setdefault(prev, set()).add(a)
            out[n] = set()
            prev = n
            n += 1
            letters = None
        a = rng.choice(letters) if prev == u else rng.choice("abc")
        triples.append((prev, tail + rng.randrange(k), a))
        out.setdefault(prev, set()).add(a)
    finals = [v for v in range(n) if rng.random() < final_prob]
    return make_graph(triples, initial=[0], final=finals, vertices=range(n))


DFA_FAMILIES = ("random", "tree", "circle_tail", "multi_cycle", "cover", "long_cycle")


def dfa_instance(rng: random.Random, family: str, max_edges: int = 300) -> Digraph:
    """One automaton from a named family, with at most ``max_edges`` edges."""
    if family == "random":
        return random_dfa(rng, rng.randint(1, 40), rng.choice(["ab", "abc", "abcd"]), rng.uniform(0.3, 0.9))
    if family == "tree":
        return tree_dfa(rng, rng.randint(1, 40), rng.choice(["ab", "abc"]))
    if family == "circle_tail":
        w = _primitive_word(rng, rng.randint(1, 3))
        return circle_tail_dfa(rng, rng.randint(0, 5), w * rng.randint(1, 30))
    if family == "multi_cycle":
        return multi_cycle_dfa(rng, rng.randint(1, 4), 12)
    if family == "cover":
        return cover_dfa(rng, rng.randint(1, 25), rng.choice(["ab", "abc"]))
    if family == "long_cycle":
        w = rng.choice([("a",), ("a", "b"), ("a", "a", "b")])
        d = rng.randint(13, min(90, max_edges // (2 * len(w))))
        return planted_long_cycle_dfa(rng, w, d, extra=rng.randint(0, 3), final_prob=rng.choice([0.0, 0.02, 0.1]))
    raise ValueError(f"unknown family {family!r}")


def _primitive_word(rng: random.Random, k: int, alphabet: str = "ab") -> tuple:
    while True:
        w = tuple(rng.choice(alphabet) for _ in range(k))
        if is_primitive(w):
            return w


def dfa_pair(rng: random.Random, max_edges: int = 300) -> tuple:
    """Two automata; when both come from the long-cycle family they share
    the loop, so the long-cycle part of the product is non-trivial."""
    f1 = rng.choice(DFA_FAMILIES)
    f2 = rng.choice(DFA_FAMILIES)
    if rng.random() < 0.3:
        w = rng.choice([("a",), ("a", "b"), ("a", "b", "b")])
        d1, d2 = rng.randint(13, 80), rng.randint(13, 80)
        return (
            planted_long_cycle_dfa(rng, w, d1, extra=rng.randint(0, 2), final_prob=rng.choice([0.0, 0.03])),
            planted_long_cycle_dfa(rng, w[1:] + w[:1], d2, extra=rng.randint(0, 2), final_prob=rng.choice([0.0, 0.03])),
        )
    return dfa_instance(rng, f1, max_edges), dfa_instance(rng, f2, max_edges)


# -- immersions -----------------------------------------------------------------------------
def random_immersion(rng: random.Random, n: int, alphabet: str = "ab", density: float = 0.6) -> Digraph:
    """A labeled graph that is deterministic both forwards and backwards."""
    out = {v: set() for v in range(n)}
    inn = {v: set() for v in range(n)}
    triples = []
    for v in range(n):
        for a in alphabet:
            if rng.random() >= density:
                continue
            targets = [u for u in range(n) if a not in inn[u]]
            if a in out[v] or not targets:
                continue
            u = rng.choice(targets)
            out[v].add(a)
            inn[u].add(a)
            triples.append((v, u, a))
    return make_graph(triples, vertices=range(n))


def random_forwards_immersion(rng: random.Random, n: int, alphabet: str = "ab", density: float = 0.6) -> Digraph:
    g = random_dfa(rng, n, alphabet, density, 0.0)
    return make_graph([(g.o(e), g.t(e), g.label(e)) for e in g.edges], vertices=range(n))


# -- the product with k*m cyclic components -------------------------------------------------
def rose_of_loops(words: Sequence[Sequence], initial=(), final=()) -> Digraph:
    """One branch vertex ``0`` carrying a subdivided loop per word."""
    triples = []
    n = 1
    for w in words:
        prev = 0
        for i, a in enumerate(w):
            nxt = 0 if i == len(w) - 1 else n
            if nxt:
                n += 1
            triples.append((prev, nxt, a))
            prev = nxt
    return make_graph(triples, initial=initial, final=final, vertices=range(n))


def cyclic_family(k: int, m: int, primes: Sequence[int]) -> tuple:
    """``(Gamma, Lambda, w)``: petals ``w_i^{p_i}`` for ``i <= k`` on one
    side and ``i > k`` on the other, where ``w = x1..xk y1..ym`` and
    ``w_i`` is ``w`` rotated left by ``i``.  The core of the product has
    exactly ``k*m`` components, labeled ``w^{p_i p_j}``."""
    if len(primes) != k + m or len(set(primes)) != k + m:
        raise ValueError("need k + m distinct primes")
    w = tuple(f"x{i}" for i in range(1, k + 1)) + tuple(f"y{j}" for j in range(1, m + 1))
    rot = [w[i:] + w[:i] for i in range(k + m + 1)]
    g = rose_of_loops([rot[i] * primes[i - 1] for i in range(1, k + 1)])
    lam = rose_of_loops([rot[k + j] * primes[k + j - 1] for j in range(1, m + 1)])
    return g, lam, w


def cyclic_family_generators(k: int, m: int, primes: Sequence[int]) -> tuple:
    """The same family as subgroup generators over letters ``1..k+m``."""
    w = tuple(range(1, k + m + 1))
    rot = [w[i:] + w[:i] for i in range(k + m + 1)]
    A = [rot[i] * primes[i - 1] for i in range(1, k + 1)]
    B = [rot[k + j] * primes[k + j - 1] for j in range(1, m + 1)]
    return A, B, w


# -- subgroups --------------------------------------------------------------------------------------
def random_reduced_word(rng: random.Random, rank: int, length: int) -> tuple:
    w: list = []
    while len(w) < length:
        a = rng.choice([s * i for i in range(1, rank + 1) for s in (1, -1)])
        if not w or w[-1] != -a:
            w.append(a)
    return tuple(w)


def random_generators(rng: random.Random, rank: int = 2, count: int = 2, max_len: int = 8) -> list:
    return [random_reduced_word(rng, rank, rng.randint(1, max_len)) for _ in range(count)]
