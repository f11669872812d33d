"""Acceptance suite: one PASS/FAIL line per criterion, at full size."""

import math
import random
import time

import oracles
from fibreprod import generate
from fibreprod.digraph import betti, core, cycle_graph, label_map, make_graph, weak_components
from fibreprod.fibre import cycle_word, labeled_product
from fibreprod.freegroup import (
    euler_rank,
    intersection_classes,
    involutive,
    isomorphic,
    rank,
    reduced_rank,
    relative_order,
    sp,
    st,
    stallings_fold,
)
from fibreprod.longcycles import factors_through, long_cycles, w_cycles_bound_check
from fibreprod.nei import nei, rabin_scott, w_cycle_accepting
from fibreprod.verify import run_report
from fibreprod.words import (
    crossing_indices,
    cyclic_conjugate,
    good_cyclic_shift,
    least_rotation,
    period_profile,
    rotate,
    sub_decomposition,
    suff_decomposition,
)


def random_primitive(rng, max_len, alphabet="ab"):
    while True:
        w = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))
        if oracles.primitive(w):
            return w


def strip_marks(g):
    return make_graph([(g.o(e), g.t(e), g.label(e)) for e in sorted(g.edges)], vertices=g.vertices)


# -- 1 ----------------------------------------------------------------------------------
def test_nei_equals_product_search(acceptance):
    rng = random.Random(1)
    t0 = time.perf_counter()
    bad = 0
    n = 10_000
    for _ in range(n):
        d1, d2 = generate.dfa_pair(rng, max_edges=300)
        assert len(d1.edges) <= 300 and len(d2.edges) <= 300
        if nei(d1, d2).answer != rabin_scott(d1, d2):
            bad += 1
    dt = time.perf_counter() - t0
    acceptance("1 nei vs rabin_scott", bad == 0 and dt < 300, f"{n} pairs, {bad} disagreements, {dt:.1f}s")


# -- 2 ----------------------------------------------------------------------------------
def test_cyclic_family_components(acceptance):
    primes = [2, 3, 5, 7]
    notes, ok = [], True
    for k, m in [(1, 1), (1, 2), (2, 2)]:
        t0 = time.perf_counter()
        g, l, w = generate.cyclic_family(k, m, primes[: k + m])
        c = core(labeled_product(g, l).product)
        comps = weak_components(c)
        words = [cycle_word(c.subgraph([x for x in c.edges if c.o(x) in set(comp)])) for comp in comps]
        want = sorted(least_rotation(w * (primes[i] * primes[k + j])) for i in range(k) for j in range(m))
        got = sorted(least_rotation(x) for x in words)
        distinct = all(cyclic_conjugate(a, b) is None for i, a in enumerate(words) for b in words[i + 1 :])
        dt = time.perf_counter() - t0
        good = len(comps) == k * m and got == want and distinct and dt < 1
        ok &= good
        notes.append(f"({k},{m}) {len(comps)} comps {dt * 1000:.0f}ms")
    acceptance("2 cyclic family k*m components", ok, "; ".join(notes))


# -- 3 ----------------------------------------------------------------------------------
def test_w_cycles_bound(acceptance):
    rng = random.Random(3)
    n, bad = 2000, 0
    for _ in range(n):
        g = generate.random_immersion(rng, rng.randint(1, 12), "ab", rng.uniform(0.4, 1.0))
        w = random_primitive(rng, 12)
        b0, b1, ok = w_cycles_bound_check(label_map(g, "ab"), w)
        bad += not (ok and b0 <= b1)
    acceptance("3 w-cycles bound", bad == 0, f"{n} immersions, {bad} violations")


# -- 4 ----------------------------------------------------------------------------------
def test_long_cycles_complete(acceptance):
    rng = random.Random(4)
    n_random, n_planted = 1000, 200
    bound_bad = missing = found = 0
    graphs = [generate.random_forwards_immersion(rng, rng.randint(1, 10), "ab", rng.uniform(0.5, 1.0)) for _ in range(n_random)]
    for _ in range(n_planted):
        loop = rng.choice([("a",), ("a", "b"), ("a", "a", "b"), ("a", "b", "b")])
        extra = rng.randint(0, 2)
        degree = rng.randint(12 * (1 + extra), 12 * (1 + extra) + 10)
        graphs.append(strip_marks(generate.planted_long_cycle_dfa(rng, loop, degree, extra=extra)))
    for g in graphs:
        lc = long_cycles(g)
        found += len(lc)
        bound_bad += len(lc) > betti(g)[1]
        for edges, _, _ in oracles.closed_walks_by_power(g, 2 * len(g.edges), lc.threshold):
            if oracles.primitive_root(edges) == edges and not factors_through(edges, lc):
                missing += 1
    acceptance(
        "4 long cycles",
        bound_bad == 0 and missing == 0,
        f"{n_random} random + {n_planted} planted, {found} long cycles, {bound_bad} bound violations, {missing} missed",
    )


# -- 5 ----------------------------------------------------------------------------------
def overlap_pair(rng):
    kind = rng.random()
    if kind < 0.4:
        # periodic words over a tiny alphabet give large overlap sets
        base = "".join(rng.choice("ab") for _ in range(rng.randint(1, 4)))
        v = (base * 64)[rng.randint(0, 3) : rng.randint(1, 64) + 3][:64]
        w = (base * 64)[rng.randint(0, 3) : rng.randint(1, 64) + 3][:64]
    elif kind < 0.6:
        v, w = "a" * rng.randint(1, 64), "a" * rng.randint(1, 64)
    else:
        alpha = rng.choice(["ab", "abc"])
        v = "".join(rng.choice(alpha) for _ in range(rng.randint(1, 64)))
        w = "".join(rng.choice(alpha) for _ in range(rng.randint(1, 16)))
    return v or "a", w or "a"


def decomposition_violations(v, w, js):
    bad = 0
    sub = sub_decomposition(v, w)
    if set().union(*map(set, sub)) != oracles.sub_set(v, w):
        bad += 1
    if len(sub) > len(v) // len(w) or any(p.p * p.q > len(w) for p in sub):
        bad += 1
    suff = suff_decomposition(v, w)
    want = oracles.suff_set(v, w)
    if set().union(*map(set, suff)) != want:
        bad += 1
    if want:
        bound = min(int(math.log2(len(v))), int(math.log2(len(w))))
        if len(suff) > max(bound, 1):
            bad += 1
        if any(2 * suff[i].q > suff[i - 1].q for i in range(1, len(suff))):
            bad += 1
    prof = period_profile(w)
    for j in js:
        c = crossing_indices(v, w, j)
        if (set(c) if c else set()) != oracles.crossing(v, w, j):
            bad += 1
        elif c and (c.q < prof.per or c.p > prof.ord):
            bad += 1
    return bad


def test_overlap_decompositions(acceptance):
    rng = random.Random(5)
    n, bad = 100_000, 0
    for _ in range(n):
        v, w = overlap_pair(rng)
        # crossing sets at a few positions per pair
        js = [rng.randrange(len(v)) for _ in range(4)]
        bad += decomposition_violations(v, w, js)
    acceptance("5 overlap decompositions", bad == 0, f"{n} pairs, {bad} violations")


# -- 6 ----------------------------------------------------------------------------------
def test_structure_bounds(acceptance):
    rng = random.Random(6)
    n, bad, logged = 1000, 0, True
    for _ in range(n):
        g = generate.random_forwards_immersion(rng, rng.randint(1, 9), "ab", rng.uniform(0.5, 1.0))
        l = generate.random_forwards_immersion(rng, rng.randint(1, 9), "ab", rng.uniform(0.5, 1.0))
        rep = run_report({"gamma": g, "lambda": l}, relative=False)
        bad += sum(not c["verdict"] for c in rep["checks"])
        logged &= all("lhs" in c and "rhs" in c for c in rep["checks"])
    acceptance("6 structure bounds", bad == 0 and logged, f"{n} pairs, {bad} violated checks, lhs/rhs logged: {logged}")


# -- 7 ----------------------------------------------------------------------------------
def test_free_group_layer(acceptance):
    rng = random.Random(7)
    iso_bad = rank_bad = sum_bad = 0
    n = 500
    for _ in range(n):
        r = rng.randint(1, 4)
        A = stallings_fold(generate.random_generators(rng, r, rng.randint(1, 4), 8), r)
        B = stallings_fold(generate.random_generators(rng, r, rng.randint(1, 4), 8), r)
        for X in (A, B):
            g = involutive(X)
            iso_bad += not isomorphic(st(sp(g)), g)
            rank_bad += rank(g) != euler_rank(g)
        inter = intersection_classes(A, B)
        sum_bad += inter.reduced_rank_sum > 2 * reduced_rank(A) * reduced_rank(B)
    A = stallings_fold([(1, 1), (2,)], 2)
    orders = (relative_order(A, (1,)), relative_order(A, (2,)), relative_order(A, (1, 2)))
    ok = iso_bad == rank_bad == sum_bad == 0 and orders == (2, 1, math.inf)
    acceptance(
        "7 free-group layer",
        ok,
        f"{2 * n} graphs st(sp) failures {iso_bad}, rank mismatches {rank_bad}; {n} pairs rank-sum violations {sum_bad}; orders {orders}",
    )


# -- 8 ----------------------------------------------------------------------------------
def test_good_cyclic_shift_exists(acceptance):
    rng = random.Random(8)
    n, fails = 10_000, 0
    for _ in range(n):
        alpha = rng.choice(["ab", "abc"])
        w = random_primitive(rng, 10, alpha)
        xs = []
        for _ in range(rng.randint(0, 5)):
            if rng.random() < 0.5:
                # factors of powers of w are the hard case
                s = rng.randrange(len(w))
                xs.append((w * 8)[s : s + rng.randint(1, 4 * len(w))])
            else:
                xs.append("".join(rng.choice(alpha) for _ in range(rng.randint(1, 20))))
        try:
            i = good_cyclic_shift(w, xs)
        except Exception:
            fails += 1
            continue
        w0 = rotate(w, i)
        fails += any(oracles.midpoint_crossings(w0, x) > 2 for x in xs)
    acceptance("8 good cyclic shift", fails == 0, f"{n} instances, {fails} failures")


# -- 9 ----------------------------------------------------------------------------------
def circle_pair(rng, w, a, b):
    p = len(w)
    n1, n2 = p * a, p * b
    i1, i2 = p * rng.randrange(a), p * rng.randrange(b)
    g = math.gcd(n1, n2)
    # plant a final pair on the initial orbit about half the time
    fin1 = rng.sample(range(n1), min(n1, rng.randint(0, 2)))
    fin2 = rng.sample(range(n2), min(n2, rng.randint(0, 2)))
    if rng.random() < 0.5:
        t = rng.randrange(n1 * n2 // g)
        fin1.append((i1 + t) % n1)
        fin2.append((i2 + t) % n2)
    d1 = cycle_graph(tuple(w) * a, initial=[i1], final=sorted(set(fin1)))
    d2 = cycle_graph(tuple(w) * b, initial=[i2], final=sorted(set(fin2)))
    return d1, d2


def test_unary_generalisation(acceptance):
    rng = random.Random(9)
    cases = {"gcd 1": 0, "gcd m": 0, "gcd composite": 0}
    n, bad, accepted = 5000, 0, 0
    for i in range(n):
        w = tuple(random_primitive(rng, 4))
        kind = list(cases)[i % 3]
        if kind == "gcd 1":
            a = rng.randint(1, 20)
            b = rng.choice([x for x in range(1, 30) if math.gcd(a, x) == 1])
        elif kind == "gcd m":
            a = rng.randint(1, 10)
            b = a * rng.randint(1, 4)
        else:
            g = rng.choice([4, 6, 8, 9, 10, 12])
            a, b = g * rng.randint(1, 3), g * rng.randint(1, 3)
            while math.gcd(a, b) != g:
                a, b = g * rng.randint(1, 3), g * rng.randint(1, 3)
        cases[kind] += 1
        d1, d2 = circle_pair(rng, w, a, b)
        got = w_cycle_accepting(d1, d2, w)
        accepted += got
        bad += got != rabin_scott(d1, d2)
    detail = ", ".join(f"{k}: {v}" for k, v in cases.items())
    acceptance("9 circle pairs vs rabin_scott", bad == 0, f"{n} instances ({detail}), {accepted} accepting, {bad} disagreements")
