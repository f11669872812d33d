import pytest
from hypothesis import given, strategies as st

from strategies import forwards_immersions
from fibreprod.digraph import Path, branch_decomposition, branch_vertices, cycle_graph, label_map, make_graph
from fibreprod.errors import InvalidInput
from fibreprod.wgraph import (
    ExtLanguage,
    extension_language,
    gamma_w_factorise,
    omega,
    omega_lift,
    piece_w_lengths,
    short_element_count,
    short_subgraph,
    submaximal_lengths_at,
    submaximal_w_lengths,
    w_components_count,
    w_decomposition,
    w_factorise,
    w_length,
    w_sinks,
    is_simple,
)
from fibreprod.words import w_offsets

loops = st.sampled_from([("a",), ("b",), ("a", "b"), ("a", "a", "b"), ("a", "b", "b")])


def ab(g):
    return label_map(g, "ab")


def simple_w_paths(m, w):
    """Every maximal forward walk in Omega that repeats no Omega vertex,
    as ``(path in the source, offset)``."""
    om = omega(m, w)
    prod = om.graph
    out = []
    for comp in om.components:
        for s in comp.vertices:
            edges, seen, v = [], {s}, s
            while prod.fstar[v]:
                (x,) = prod.fstar[v]
                edges.append(x[0])
                v = prod.t(x)
                if v in seen:
                    break
                seen.add(v)
            if edges:
                out.append((Path.of(m.source, edges), s[1]))
    return out


# -- Omega ---------------------------------------------------------------------------
def test_circle_reading_w_is_one_cycle_component():
    om = omega(ab(cycle_graph("ab")), "ab")
    (c,) = om.components
    assert c.shape == "cycle_with_trees" and c.cycle_w_length == 1 and c.max_w_length is None


def test_no_full_read_means_empty_omega_one():
    g = make_graph([(0, 1, "b"), (1, 2, "a")])
    om = omega(ab(g), "ab")
    assert [c.shape for c in om.components] == ["tree"]  # a wrapping partial read
    assert omega(ab(g), "ab", 1).components == ()


def test_four_letter_components_bound():
    w = ("a1", "a2", "a3", "a4")
    triples = [(0, 1, "a1"), (1, 2, "a2"), (2, 3, "a3"), (3, 0, "a4"), (1, 4, "a3"), (4, 0, "a4"), (2, 5, "a1")]
    m = label_map(make_graph(triples))
    count, nbar = w_components_count(m, w, 3)
    # only the 4-cycle reads w; the detours do not
    assert count == 1 and count <= 2 * nbar


def test_imprimitive_loop_rejected():
    with pytest.raises(InvalidInput):
        omega(ab(cycle_graph("ab")), "abab")


@given(forwards_immersions(), loops)
def test_omega_shapes_and_component_bound(g, w):
    m = ab(g)
    om = omega(m, w)
    assert all(c.shape in ("tree", "cycle_with_trees") for c in om.components)
    count, nbar = w_components_count(m, w, 3)
    assert count <= 2 * nbar


# -- factorisations ----------------------------------------------------------------------
def test_factorise_examples():
    g = cycle_graph("abc")
    m = label_map(g)
    f = Path.of(g, [0, 1, 2, 0, 1, 2])
    fac = w_factorise(f, m, "abc")
    assert (fac.offset, fac.n, fac.tail) == (0, 2, 0)
    f = Path.of(g, [1, 2, 0, 1, 2, 0])
    fac = w_factorise(f, m, "abc")
    assert (fac.head, fac.n, fac.suffix) == (tuple("bc"), 1, ("a",))
    with pytest.raises(InvalidInput):
        w_factorise(Path.of(g, [0]), m, "abc")  # short and not wrapping
    fac = w_factorise(Path.of(g, [2, 0]), m, "abc")
    assert fac.n == 0 and fac.offset == 2


@given(forwards_immersions(), loops, st.data())
def test_single_offset_for_long_paths(g, w, data):
    if not g.edges:
        return
    e = data.draw(st.sampled_from(sorted(g.edges)))
    path = [e]
    while len(path) < 3 * len(w) and g.fstar[g.t(path[-1])]:
        path.append(data.draw(st.sampled_from(sorted(g.fstar[g.t(path[-1])]))))
    x = g.word(path)
    if len(x) >= len(w):
        assert len(w_offsets(x, w)) <= 1


@given(forwards_immersions(), loops)
def test_decomposition_of_w_paths(g, w):
    m = ab(g)
    for f, offset in simple_w_paths(m, w):
        if len(f) < len(w):
            continue
        dec = w_decomposition(f, m, w)
        assert dec.stem + dec.loop * dec.n + dec.rest == f.edges
        lift = omega_lift(f, m, w)
        assert dec.simple == is_simple(lift, len(lift))


def test_gamma_w_factorise_examples():
    g = cycle_graph("abab")
    f = Path.of(g, [0, 1])
    fac = gamma_w_factorise(f, ab(g), "ab")
    assert fac.degenerate == (0, 0, 2)
    g = make_graph([(0, 1, "a"), (1, 2, "b"), (1, 3, "a")])
    fac = gamma_w_factorise(Path.of(g, [0, 1]), ab(g), "ab")
    assert fac.n == 1


@given(forwards_immersions(), loops)
def test_simple_w_path_length_bound(g, w):
    m = ab(g)
    dec = branch_decomposition(g)
    nbar = len(dec.elements)
    slack = sum(len(e) // len(w) for e in dec.elements)
    short = short_element_count(m, w)
    for f, offset in simple_w_paths(m, w):
        n = w_length(offset, len(f), len(w))
        assert n <= 4 * nbar + slack
        fac = gamma_w_factorise(f, m, w)
        if fac.degenerate is None:
            assert sum(piece_w_lengths(fac, offset, len(w))) <= 2 * max(short, 1)


# -- sinks ----------------------------------------------------------------------------------
def sinks_by_enumeration(m, w):
    g = m.source
    gw = short_subgraph(m, w)
    vbar = branch_vertices(g)
    k = len(w)
    out = set()

    def walks(v, length):
        if length == 0:
            yield [v], ()
            return
        for e in gw.fstar[v]:
            for vs, lab in walks(gw.t(e), length - 1):
                yield [v] + vs, (m.emap[e],) + lab

    for s in gw.vertices:
        if s not in vbar:
            continue
        for length in range(k, 3 * k - 1):
            for vs, x in walks(s, length):
                if vs[-1] not in vbar:
                    continue
                for a in range(k):
                    b = length - a - k
                    if not 0 <= b < k:
                        continue
                    if x[a : a + k] == w and x[:a] == w[k - a :] and x[a + k :] == w[:b]:
                        out.add(vs[a + k])
    return out


def test_sinks_examples():
    # every branch element is at least as long as w: no short subgraph
    assert w_sinks(ab(cycle_graph("abab")), "ab") == set()
    g = make_graph([(0, 1, "a"), (1, 2, "b"), (2, 3, "a"), (3, 4, "b")] + [(i, 9, "c") for i in range(1, 4)])
    m = label_map(g)
    s = w_sinks(m, "ab")
    assert 2 in s and s == sinks_by_enumeration(m, ("a", "b"))


@given(forwards_immersions(size=5), loops)
def test_sinks_match_enumeration_and_bound(g, w):
    m = ab(g)
    s = w_sinks(m, w)
    assert s == sinks_by_enumeration(m, tuple(w))
    assert len(s) <= 2 * short_element_count(m, w)


# -- submaximal lengths and extension languages ------------------------------------------------
def test_submaximal_examples():
    g = cycle_graph("ab" * 5, initial=[0])
    assert len(submaximal_w_lengths(ab(g), "ab")) <= 2 + len(g.initial)
    assert submaximal_w_lengths(ab(make_graph([(0, 1, "a")])), "b") == set()


@given(forwards_immersions(), loops)
def test_submaximal_bound(g, w):
    nbar = len(branch_decomposition(g).elements)
    assert len(submaximal_w_lengths(ab(g), w)) <= 10 * nbar + 3 * len(g.initial)


def test_extension_language_examples():
    tree = make_graph([(0, 1, "a"), (1, 2, "b"), (2, 3, "a"), (3, 4, "b")])
    lang = extension_language(ab(tree), "ab", 4, 0)
    assert lang.period == 0 and lang.finite == {2}
    circ = cycle_graph("ab" * 3)
    lang = extension_language(ab(circ), "ab", 0, 0)
    assert lang.period == 3
    assert extension_language(ab(tree), "ab", 9, 0) == ExtLanguage(frozenset(), 0)


def backward_lengths(m, w, x):
    """w-lengths of simple Omega walks ending at x whose source projection is
    left submaximal: the origin is a stop vertex or no simple left extension exists."""
    om = omega(m, w)
    prod, k = om.graph, len(w)
    stop = branch_vertices(m.source) | m.source.initial
    out = set()
    # the far end may close up at x once; no other repeats
    stack = [(x, 0, frozenset())]
    while stack:
        v, L, seen = stack.pop()
        closed = L > 0 and v == x
        fresh = [] if closed else [e for e in prod.bstar[v] if prod.o(e) not in seen]
        if L and (L >= k or (v[1] >= 1 and v[1] + L >= k)):
            if v[0] in stop or not fresh:
                out.add(w_length(v[1], L, k))
        stack.extend((prod.o(e), L + 1, seen | {prod.o(e)}) for e in fresh)
    return out


@given(forwards_immersions(size=5), loops)
def test_extension_language_soundness(g, w):
    m = ab(g)
    om = omega(m, w)
    for comp in om.components:
        for u, v in comp.vertices:
            lang = extension_language(m, w, u, v)
            top = max(lang.finite, default=0) + 3 * lang.period
            seen = backward_lengths(m, w, (u, v))
            assert seen - {0} <= lang.upto(max(top, max(seen, default=0)))
            assert lang.k <= 10 * len(branch_decomposition(g).elements) + 3 * len(g.initial)


@given(forwards_immersions(size=5), loops)
def test_right_side_lengths_are_simple_walks(g, w):
    m = ab(g)
    for comp in omega(m, w).components:
        for x in comp.vertices:
            assert all(n >= 0 for n in submaximal_lengths_at(m, w, x, "right"))
