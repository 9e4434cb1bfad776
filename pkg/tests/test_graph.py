from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oddpack.generators import random_instance
from oddpack.graph import (MalformedWalkError, Multigraph, Network, Packing, PackingItem, Step,
                           Walk, as_fraction, classify_walk, is_inner_eulerian, is_trail,
                           validate_packing, walk_parity)


def test_no_loops_and_unique_ids():
    with pytest.raises(ValueError):
        Multigraph(["a"], [("e", "a", "a")])
    with pytest.raises(ValueError):
        Multigraph(["a", "b"], [("e", "a", "b"), ("e", "b", "a")])


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert as_fraction("3/6") == Fraction(1, 2)


def test_walk_parity(i3):
    g = i3.graph
    assert walk_parity(Walk.along(g, "s", ["st"])) == "odd"
    assert walk_parity(Walk.along(g, "s", ["su", "ut"])) == "even"
    assert walk_parity(Walk.along(g, "s", ["st", "st", "st"])) == "odd"


def test_classify_walk(i3):
    g, T = i3.graph, i3.terminals
    k = classify_walk(Walk.along(g, "s", ["st"]), T)
    assert (k.kind, k.t_walk, k.cyclic) == ("path", True, False)
    k = classify_walk(Walk.along(g, "s", ["su", "ut", "st"]), T)
    assert (k.kind, k.t_walk, k.cyclic) == ("trail", False, True)
    k = classify_walk(Walk.along(g, "s", ["st", "st", "st"]), T)
    assert (k.kind, k.t_walk) == ("walk", True)


def test_malformed_walk_reports_index(i3):
    with pytest.raises(MalformedWalkError) as ex:
        Walk((Step("su", "s", "u"), Step("st", "s", "t")))
    assert ex.value.index == 1
    with pytest.raises(MalformedWalkError) as ex:
        Walk((Step("su", "s", "u"), Step("st", "u", "t"))).check_in(i3.graph)
    assert ex.value.index == 1


def test_validate_packing(i1, i3):
    st_ = Walk.along(i1.graph, "s", ["st"])
    rep = validate_packing(i1, Packing.of([(2, st_)]))
    assert rep.ok and rep.value == 2
    rep = validate_packing(i1, Packing.of([(3, st_)]))
    assert not rep.ok
    v = rep.violations[0]
    assert (v.edge, v.load, v.cap) == ("st", 3, 2)
    long = Walk.along(i3.graph, "s", ["su", "ut", "st", "su", "ut"])
    rep = validate_packing(i3, Packing.of([(1, Walk.along(i3.graph, "s", ["st"])), (1, long)]))
    assert rep.ok and rep.value == 2
    assert rep.loads == {"st": 2, "su": 2, "ut": 2}


def test_unknown_edge_is_an_error(i1):
    with pytest.raises(Exception):
        validate_packing(i1, Packing.of([(1, Walk((Step("zz", "s", "t"),)))]))


def test_inner_eulerian(i2, i3):
    assert is_inner_eulerian(i2)
    assert is_inner_eulerian(i3)
    star = Network.build(["c", "a", "b", "d"], ["a", "b", "d"],
                         [("1", "c", "a", 1), ("2", "c", "b", 1), ("3", "c", "d", 1)])
    assert not is_inner_eulerian(star)


@given(st.integers(0, 10_000), st.integers(1, 8), st.data())
@settings(max_examples=60, deadline=None)
def test_reversal_preserves_properties(seed, length, data):
    n = random_instance(seed)
    g = n.graph
    x = data.draw(st.sampled_from(g.vertices))
    steps = []
    for _ in range(length):
        e = data.draw(st.sampled_from(g.incident(x)))
        y = e.other(x)
        steps.append(Step(e.id, x, y))
        x = y
    w = Walk(tuple(steps))
    r = w.reversed()
    a, b = classify_walk(w, n.terminals), classify_walk(r, n.terminals)
    assert len(w) == len(r) and walk_parity(w) == walk_parity(r)
    assert is_trail(w) == is_trail(r)
    assert a.t_walk == b.t_walk and a.cyclic == b.cyclic


@given(st.integers(0, 10_000), st.fractions(min_value=0, max_value=5))
@settings(max_examples=40, deadline=None)
def test_loads_additive_and_scaling(seed, alpha):
    n = random_instance(seed)
    g = n.graph
    ws = [Walk.along(g, e.u, [e.id]) for e in g.edges]
    p = Packing.of([(1, w) for w in ws[::2]])
    q = Packing.of([(Fraction(1, 2), w) for w in ws])
    lp, lq, lpq = (validate_packing(n, x).loads for x in (p, q, p + q))
    for e in g.edges:
        assert lpq.get(e.id, 0) == lp.get(e.id, 0) + lq.get(e.id, 0)
    if alpha > 0:
        assert p.scale(alpha).value == alpha * p.value
    # brute recount of n_i(e)
    recount = {}
    for w, walk in (p + q).items:
        for s in walk.steps:
            recount[s.edge] = recount.get(s.edge, 0) + w
    assert recount == {k: v for k, v in lpq.items() if v}
