"""Relations, allegory laws, division and map extraction."""

import random

import pytest

from finitopos.presheaf import Subobject
from finitopos.rel import (Relation, all_relations, diagonal_rel,
                           division_adjunction_holds, empty_rel, graph_rel,
                           is_map, left_division, maps_between, membership,
                           modular_law_holds, power_laws_check, rel_compose,
                           rel_of_span, relation_from_pairs, right_division,
                           right_division_oracle, span_of_rel,
                           symmetric_division, ungraph)
from finitopos.spans import graph_span, kernel_pair_span
from finitopos.topos import STAR, finset_topos, sierpinski_topos


@pytest.fixture(scope="module")
def T():
    return finset_topos()


def rand_rel(T, rng, X, Y, density=0.5):
    P, _, _ = T.product(X, Y)
    pts = {p for p in P.carriers[STAR] if rng.random() < density}
    return Relation(T, X, Y, Subobject(P, {STAR: pts}, check=False))


def test_composition_and_involution(T):
    A, B, C = T.finset([0, 1]), T.finset(["x", "y"]), T.finset(["q", "w"])
    r = relation_from_pairs(T, A, B, {STAR: {(0, "x")}})
    s = relation_from_pairs(T, B, C, {STAR: {("x", "q"), ("y", "q")}})
    assert rel_compose(r, s).pairs(STAR) == {(0, "q")}
    assert r.converse().converse() == r
    assert rel_compose(diagonal_rel(T, A), r) == r
    assert rel_compose(r, diagonal_rel(T, B)) == r


def test_modular_law_exhaustive_size_2(T):
    A, B, C = T.finset([0, 1]), T.finset(["x", "y"]), T.finset(["q", "w"])
    for phi in all_relations(T, A, B):
        for psi in all_relations(T, B, C):
            for chi in all_relations(T, A, C):
                assert modular_law_holds(psi, phi, chi)


def test_division_formula_vs_oracle_exhaustive_size_2(T):
    A, B, C = T.finset([0, 1]), T.finset(["x", "y"]), T.finset(["q", "w"])
    for phi in all_relations(T, A, B):
        for r in all_relations(T, A, C):
            assert right_division(r, phi) == right_division_oracle(r, phi)
            assert division_adjunction_holds(r, phi)


def test_division_worked_example(T):
    A = T.finset(["a0", "a1"])
    B = T.finset(["b0", "b1"])
    C = T.finset(["c0"])
    phi = relation_from_pairs(T, A, B, {STAR: {("a0", "b0")}})
    r = relation_from_pairs(T, A, C, {STAR: {("a0", "c0")}})
    assert right_division(r, phi).pairs(STAR) == {("b0", "c0"), ("b1", "c0")}


def test_random_size_3_laws(T):
    A = T.finset([0, 1, 2])
    B = T.finset(["x", "y", "z"])
    C = T.finset(["q", "w", "e"])
    rng = random.Random(5)
    for _ in range(2000):
        phi = rand_rel(T, rng, A, B)
        psi = rand_rel(T, rng, B, C)
        chi = rand_rel(T, rng, A, C)
        X = rand_rel(T, rng, B, C)
        assert modular_law_holds(psi, phi, chi)
        assert rel_compose(phi, psi).converse() == \
            rel_compose(psi.converse(), phi.converse())
        assert rel_compose(phi, X).leq(chi) == \
            X.leq(right_division(chi, phi))


def test_power_laws(T):
    A = T.finset([0, 1])
    assert power_laws_check(T, A) == (True, True)
    PA = membership(T, A).dom
    assert symmetric_division(membership(T, A), membership(T, A)) \
        == diagonal_rel(T, PA)


def test_power_laws_sierpinski_representable():
    S = sierpinski_topos()
    AS = S.obj({"0": ("a",), "1": ("t",)}, {"u": {"t": "a"}})
    assert power_laws_check(S, AS) == (True, True)


def test_map_counts_and_roundtrip(T):
    for na in range(4):
        for nb in range(4):
            A = T.finset(list(range(na)))
            B = T.finset(["e%d" % i for i in range(nb)])
            ms = maps_between(T, A, B)
            assert len(ms) == len(T.hom(A, B))
            for m in ms:
                assert graph_rel(T, ungraph(m)) == m


def test_partial_relation_is_not_map(T):
    A, B = T.finset([0, 1]), T.finset(["x", "y"])
    r = relation_from_pairs(T, A, B, {STAR: {(0, "x")}})
    assert not is_map(r)
    assert is_map(graph_rel(T, T.hom(A, B)[1]))


def test_span_rel_roundtrips(T):
    A, B = T.finset([0, 1]), T.finset(["x", "y"])
    f = T.hom(A, B)[2]
    assert rel_of_span(T, graph_span(f)) == graph_rel(T, f)
    rr = relation_from_pairs(T, A, B, {STAR: {(0, "x"), (1, "x"), (1, "y")}})
    assert rel_of_span(T, span_of_rel(rr)) == rr
    kp = kernel_pair_span(T, T.bang(A))
    assert rel_of_span(T, kp).pairs(STAR) == \
        {(a, b) for a in (0, 1) for b in (0, 1)}


def test_modular_law_sierpinski_random():
    S = sierpinski_topos()
    AS = S.obj({"0": ("a",), "1": ("t",)}, {"u": {"t": "a"}})
    BS = S.obj({"0": ("p", "q"), "1": ("r",)}, {"u": {"r": "p"}})
    rng = random.Random(3)
    r1 = all_relations(S, AS, BS)
    r2 = all_relations(S, BS, AS)
    r3 = all_relations(S, AS, AS)
    for _ in range(300):
        assert modular_law_holds(rng.choice(r2), rng.choice(r1),
                                 rng.choice(r3))
