"""Adjoined indeterminates: canonical forms, faithfulness, closure,
hereditary composition and the colimit presentation."""

import pytest

from finitopos.indet import (IndeterminateCategory, colimit_check,
                             extend_functor, hereditary_check,
                             identity_functor, is_projection)
from finitopos.presheaf import PresheafMorphism, compose, identity
from finitopos.topos import STAR, finset_topos, sierpinski_topos


@pytest.fixture(scope="module")
def T():
    return finset_topos()


@pytest.fixture(scope="module")
def C(T):
    return IndeterminateCategory(T, (T.finset([0, 1]),))


def test_x_powers_and_pairing(T, C):
    x = C.the_x()
    assert C.x_power(2).class_equal(C.pair(x, x))
    A = C.bases[0]
    _, p1, _ = T.product(A, A)
    assert C.compose(C.embed(p1), C.pair(x, x)).class_equal(x)


def test_category_laws(T, C):
    A = C.bases[0]
    B = T.finset(["p", "q", "r"])
    f = T.hom(A, B)[3]
    tf = C.embed(f)
    assert C.compose(tf, C.identity(A)).class_equal(tf)
    assert C.compose(C.identity(B), tf).class_equal(tf)
    g = T.hom(B, A)[2]
    x = C.the_x()
    lhs = C.compose(C.embed(g), C.compose(tf, x))
    rhs = C.compose(C.compose(C.embed(g), tf), x)
    assert lhs.class_equal(rhs)


def test_faithful_iff_base_inhabited(T):
    A = T.finset([0, 1])
    B = T.finset(["p", "q", "r"])
    C = IndeterminateCategory(T, (A,))
    assert C.is_faithful_here()
    homs = T.hom(A, B)
    assert len({C.embed(f).canonical_key() for f in homs}) == len(homs)
    CE = IndeterminateCategory(T, (T.finset([]),))
    assert not CE.is_faithful_here()
    assert CE.embed(homs[0]).class_equal(CE.embed(homs[1]))


def test_dependence_dropping(T, C):
    A = C.bases[0]
    B = T.finset(["p", "q"])
    apex, _ = T.product_list([A, B])
    const = PresheafMorphism(apex, B,
                             {STAR: {t: "p" for t in apex.carriers[STAR]}},
                             check=False)
    t = C.term(B, B, (A,), const)
    assert len(t.canonical().coords) == 0


def test_cartesian_closed_beta_and_uniqueness(T, C):
    A = C.bases[0]
    B = T.finset(["p", "q"])
    Cob = T.finset(["c0", "c1"])
    PCA, _, _ = T.product(Cob, A)
    apex, _ = T.product_list([A, PCA])
    core = PresheafMorphism(
        apex, B,
        {STAR: {(x, (c, a)): ("p" if a == x else "q")
                for (x, (c, a)) in apex.carriers[STAR]}}, check=False)
    t = C.term(PCA, B, (A,), core)
    g = C.curry(t, Cob, A, B)
    evc = C.ev_class(A, B)
    assert C.compose(evc, C.cross(g, C.identity(A))).class_equal(t)
    E, _ = T.exponential(A, B)
    hits = [h for h in C.enumerate_classes(Cob, E, 1)
            if C.compose(evc, C.cross(h, C.identity(A))).class_equal(t)]
    assert len(hits) == 1 and hits[0].class_equal(g)


def test_projection_class_membership(T, C):
    A = C.bases[0]
    B = T.finset(["p", "q", "r"])
    P, projs = T.product_list([A, B])
    assert is_projection(T, projs[1], A)
    assert is_projection(T, identity(B), A)
    const = PresheafMorphism(P, B,
                             {STAR: {t: "p" for t in P.carriers[STAR]}},
                             check=False)
    assert not is_projection(T, const, A)


def test_extend_functor_substitution(T, C):
    A = C.bases[0]
    B = T.finset(["p", "q", "r"])
    f = T.hom(A, B)[3]
    a = T.global_elements(A)[1]
    ext = extend_functor(C, identity_functor(T), a)
    x = C.the_x()
    assert ext(x) == a
    assert ext(C.embed(f)) == f
    assert ext(C.compose(C.embed(f), x)) == compose(f, a)


def test_hereditary_two_step_agrees_with_flat(T):
    A = T.finset([0, 1])
    B = T.finset(["b0", "b1"])
    Cob = T.finset(["c0", "c1"])
    D = T.finset(["d0", "d1"])
    flat, two_step = hereditary_check(T, A, B, Cob, D)
    assert flat == two_step == 256


def test_colimit_presentation(T):
    A = T.finset([0, 1])
    B = T.finset(["b0"])
    Cob = T.finset(["c0", "c1"])
    D = T.finset(["d0", "d1"])
    res = colimit_check(T, [A, B], Cob, D)
    assert res["inclusions_consistent"]
    assert res["every_class_from_a_stage"]
    assert res["mediating_forced"]


def test_sierpinski_indeterminate(T):
    S = sierpinski_topos()
    AS = S.obj({"0": ("a", "b"), "1": ("t",)}, {"u": {"t": "a"}})
    CS = IndeterminateCategory(S, (AS,))
    x = CS.the_x()
    assert CS.x_power(2).class_equal(CS.pair(x, x))
    BS = S.obj({"0": ("p", "q"), "1": ("r", "s")},
               {"u": {"r": "p", "s": "q"}})
    homs = S.hom(AS, BS)
    assert len({CS.embed(f).canonical_key() for f in homs}) == len(homs)
