import random
from math import gcd

import pytest
from hypothesis import given, strategies as st

from strategies import dfas
from fibreprod import generate
from fibreprod.digraph import GraphMap, make_graph, betti, branch_decomposition, core, cycle_graph, rcore, rose, weak_components
from fibreprod.errors import InvalidInput
from fibreprod.fibre import (
    cycle_word,
    edge_count_identity,
    fibre_product,
    homotopy_check,
    homotopy_class_count,
    is_cycle_component,
    labeled_product,
    structure_report,
    theta_components,
    theta_s,
    theta_segments,
)
from fibreprod.longcycles import long_cycles, s_image
from fibreprod.words import least_rotation


def identity_on(g):
    return GraphMap(g, g, {v: v for v in g.vertices}, {e: e for e in g.edges})


def report(g, l):
    fp = labeled_product(g, l)
    simg = s_image(fp, long_cycles(g), long_cycles(l))
    return fp, structure_report(fp, simg)


# -- construction ------------------------------------------------------------------
def test_identity_product_is_the_target():
    delta = rose("ab")
    fp = fibre_product(identity_on(delta), identity_on(delta))
    assert len(fp.product.vertices) == 1 and len(fp.product.edges) == 2


def test_two_circles_give_one_long_cycle():
    fp = labeled_product(cycle_graph("xyxy"), cycle_graph("yxyxyx"))
    c = core(fp.product)
    assert len(weak_components(c)) == 1 and len(c.edges) == 12
    assert least_rotation(cycle_word(c)) == least_rotation(tuple("xy" * 6))


def test_disjoint_labels_give_empty_product():
    fp = labeled_product(cycle_graph("aa"), cycle_graph("bbb"))
    assert not fp.product.edges


def test_mismatched_targets_rejected():
    g = cycle_graph("ab")
    m1 = GraphMap(g, rose("ab"), {v: 0 for v in g.vertices}, dict(g.labels))
    m2 = GraphMap(g, rose("abc"), {v: 0 for v in g.vertices}, dict(g.labels))
    with pytest.raises(InvalidInput):
        fibre_product(m1, m2)


def test_marks_are_products_of_marks():
    g = generate.circle_tail_dfa(random.Random(1), 2, "ab", finals=[1, 3])
    fp = labeled_product(g, g)
    assert fp.product.initial == {(0, 0)}
    assert fp.product.final <= {(u, v) for u in g.final for v in g.final}


@given(dfas(), dfas())
def test_edge_count_identity(g, l):
    got, want = edge_count_identity(labeled_product(g, l))
    assert got == want


# -- segments of Theta(e, f) -------------------------------------------------------------
def test_diagonal_component_is_sub_and_super():
    g = cycle_graph("ab")
    fp = labeled_product(g, g)
    (el,) = branch_decomposition(g).elements
    (comp,) = theta_segments(fp, el, el)
    assert {"sub", "super"} <= comp.classes


def test_disjoint_elements_have_no_segments():
    g = generate.rose_of_loops(["aa", "bb"])
    fp = labeled_product(g, g)
    e_a, e_b = branch_decomposition(g).elements
    assert theta_segments(fp, e_a, e_b) == []


def test_cyclic_family_segments_cut_the_big_cycle():
    g, l, w = generate.cyclic_family(1, 1, [2, 3])
    fp = labeled_product(g, l)
    (e,) = branch_decomposition(g).elements
    (f,) = branch_decomposition(l).elements
    comps = theta_segments(fp, e, f)
    # the 12-edge cycle is cut at the two branch-vertex preimages of each factor
    assert sum(len(c.path) for c in comps) == len(fp.theta.edges) == 12
    assert all(len(set(c.path.edges)) == len(c.path) for c in comps)


@given(dfas(), dfas())
def test_theta_components_are_segments_covering_theta(g, l):
    fp = labeled_product(rcore(g), rcore(l))
    comps = theta_components(fp)
    edges = [x for cs in comps.values() for c in cs for x in c.path.edges]
    assert sorted(edges, key=repr) == sorted(fp.theta.edges, key=repr)


# -- theta_s --------------------------------------------------------------------------------
def test_theta_s_without_long_cycles_is_theta():
    g = generate.random_forwards_immersion(random.Random(3), 6)
    fp = labeled_product(g, g)
    assert theta_s(fp, None).edges == fp.theta.edges
    assert set(theta_s(fp, s_image(fp, long_cycles(g, 10**6), long_cycles(g, 10**6))).edges) == set(fp.theta.edges)


def test_theta_s_of_cyclic_family_is_edgeless():
    g, l, _ = generate.cyclic_family(1, 1, [13, 17])
    fp = labeled_product(g, l)
    simg = s_image(fp, long_cycles(g), long_cycles(l))
    assert set(simg.edges) == set(fp.theta.edges)
    assert not theta_s(fp, simg).edges


def test_theta_s_rejects_foreign_edges():
    g = cycle_graph("ab")
    fp = labeled_product(g, g)
    with pytest.raises(InvalidInput):
        theta_s(fp, cycle_graph("ab"))


# -- structure bounds ------------------------------------------------------------------------
@given(dfas(), dfas())
def test_structure_verdicts_hold(g, l):
    fp, data = report(rcore(g), rcore(l))
    failed = [c for c in data.checks if not c.verdict]
    assert not failed


def test_empty_product_report():
    fp, data = report(cycle_graph("aa"), cycle_graph("bb"))
    assert all(c.lhs == 0 and c.verdict for c in data.checks)


@pytest.mark.parametrize("k,m", [(1, 1), (2, 2)])
def test_cyclic_family_report(k, m):
    g, l, _ = generate.cyclic_family(k, m, [2, 3, 5, 7][: k + m])
    fp, data = report(g, l)
    assert all(c.verdict for c in data.checks)
    assert len(weak_components(core(fp.product))) == k * m


def test_structure_report_needs_forwards_immersions():
    g = make_graph([(0, 0, "a"), (0, 0, "a")])
    with pytest.raises(InvalidInput):
        structure_report(labeled_product(g, g), None)


@given(dfas(), dfas(), st.data())
def test_lifts_into_theta_s_per_progression(g, l, data):
    g, l = rcore(g), rcore(l)
    fp = labeled_product(g, l)
    ts = theta_s(fp, s_image(fp, long_cycles(g), long_cycles(l)))
    dg, dl = branch_decomposition(g), branch_decomposition(l)
    c_g = len(dg.elements) + len(g.initial)
    c_l = len(dl.elements) + len(l.initial)
    if not g.edges:
        return
    # a simple path of the first factor, by a random walk
    v = data.draw(st.sampled_from(sorted(g.vertices)))
    path, seen = [], {v}
    while g.fstar[v]:
        e = data.draw(st.sampled_from(sorted(g.fstar[v])))
        if g.t(e) in seen:
            break
        path.append(e)
        v = g.t(e)
        seen.add(v)
    if not path:
        return
    for f in dl.elements:
        positions = range(min(len(path), len(f.vertices)))
        count = 0
        for i in positions:
            start = (g.o(path[0]), f.vertices[i])
            cur = start
            for e in path:
                nxt = [x for x in ts.fstar.get(cur, []) if x[0] == e]
                if not nxt:
                    break
                cur = ts.t(nxt[0])
            else:
                count += start in ts.vset
        assert count <= 100 * c_g * c_l


# -- homotopy classes ------------------------------------------------------------------------------
def test_cyclic_family_homotopy_classes():
    g, l, w = generate.cyclic_family(2, 2, [2, 3, 5, 7])
    hc = homotopy_class_count(labeled_product(g, l))
    assert hc.cyclic_components == 4 and hc.cyclic_classes == 4 and hc.total == 4
    comps = [c for c in weak_components(labeled_product(g, l).theta)]
    assert len(comps) == 4


@pytest.mark.parametrize("n,p,q", [(2, 2, 3), (3, 1, 2), (4, 3, 5)])
def test_common_multiple_circles(n, p, q):
    g, l = cycle_graph("a" * (n * p)), cycle_graph("a" * (n * q))
    fp = labeled_product(g, l)
    assert gcd(n * p, n * q) == n
    hc = homotopy_class_count(fp)
    assert hc.cyclic_components == n and hc.cyclic_classes == 1 and hc.total == 1


def test_empty_product_has_no_classes():
    assert homotopy_class_count(labeled_product(cycle_graph("a"), cycle_graph("b"))).total == 0


@given(dfas(), dfas())
def test_homotopy_bound(g, l):
    assert homotopy_check(labeled_product(rcore(g), rcore(l))).verdict


def test_cycle_component_detection():
    assert is_cycle_component(cycle_graph("abc"))
    assert not is_cycle_component(generate.rose_of_loops(["a", "b"]))
    assert betti(cycle_graph("abc")) == (1, 1)
