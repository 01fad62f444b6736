"""Core presheaf-topos structure: limits, colimits, classifier,
exponentials, quantifiers."""

import pytest

from finitopos.presheaf import (PresheafError, PresheafMorphism, Subobject,
                                compose, identity)
from finitopos.topos import STAR, finset_topos, sierpinski_topos


@pytest.fixture(scope="module")
def T():
    return finset_topos()


@pytest.fixture(scope="module")
def S():
    return sierpinski_topos()


def test_validation_rejects_non_natural(S):
    A = S.obj({"0": ("a", "b"), "1": ("t",)}, {"u": {"t": "a"}})
    B = S.obj({"0": ("p", "q"), "1": ("r",)}, {"u": {"r": "p"}})
    with pytest.raises(PresheafError):
        PresheafMorphism(A, B, {"0": {"a": "q", "b": "q"}, "1": {"t": "r"}})


def test_finset_products_and_equalizer(T):
    A = T.finset([0, 1])
    B = T.finset(["x", "y", "z"])
    P, p1, p2 = T.product(A, B)
    assert len(P.carriers[STAR]) == 6
    f = T.hom(A, B)[0]
    g = T.hom(A, B)[1]
    E = T.equalizer(f, g)
    for a in A.carriers[STAR]:
        assert (a in E.parts[STAR]) == (f.maps[STAR][a] == g.maps[STAR][a])


def test_terminal_initial(T):
    A = T.finset([0, 1, 2])
    assert len(T.hom(A, T.terminal())) == 1
    assert len(T.hom(T.initial(), A)) == 1
    assert len(T.hom(T.terminal(), A)) == 3


def test_omega_sizes(T, S):
    assert len(T.omega().carriers[STAR]) == 2
    Om = S.omega()
    assert len(Om.carriers["1"]) == 3
    assert len(Om.carriers["0"]) == 2


def test_classifier_roundtrip(S):
    A = S.obj({"0": ("a", "b", "c"), "1": ("t", "s")},
              {"u": {"t": "a", "s": "b"}})
    for sub in S.subobjects(A):
        chi = S.char(sub)
        assert S.sub_of_char(chi) == sub
    # distinct subobjects give distinct characters
    chis = {S.char(sub).key() for sub in S.subobjects(A)}
    assert len(chis) == len(S.subobjects(A))


def test_exponential_counts(T):
    A = T.finset([0, 1])
    B = T.finset(["x", "y", "z"])
    E, ev = T.exponential(A, B)
    assert len(E.carriers[STAR]) == 9
    PA, member = T.power(A)
    assert len(PA.carriers[STAR]) == 4
    assert sum(len(member.parts[c]) for c in member.parts) == 4


def test_transpose_bijection(T):
    A = T.finset([0, 1])
    B = T.finset(["x", "y"])
    C = T.finset(["c0", "c1", "c2"])
    P, _, _ = T.product(C, A)
    E, ev = T.exponential(A, B)
    seen = set()
    for f in T.hom(P, B):
        g = T.transpose(f, C, A, B)
        assert compose(ev, T.cross(g, identity(A))) == f
        seen.add(g.key())
    assert len(seen) == len(T.hom(P, B)) == len(T.hom(C, E))


def test_one_plus_one_iso_in_finset_mono_in_sierpinski(T, S):
    _, b = T.one_plus_one()
    assert T.is_iso(b)
    _, bs = S.one_plus_one()
    assert S.is_mono(bs) and not S.is_iso(bs)


def test_quantifier_adjunctions(T):
    A = T.finset([0, 1, 2])
    B = T.finset(["x", "y"])
    g = PresheafMorphism(A, B, {STAR: {0: "x", 1: "x", 2: "y"}})
    Ssub = Subobject(A, {STAR: {0, 2}})
    assert T.forall_along(g, Ssub).parts[STAR] == {"y"}
    assert T.exists_along(g, Ssub).parts[STAR] == {"x", "y"}
    # adjunction triangle on all subobjects
    for Ssub in T.subobjects(A):
        for U in T.subobjects(B):
            assert (T.exists_along(g, Ssub).leq(U)
                    == Ssub.leq(T.pullback_sub(g, U)))
            assert (U.leq(T.forall_along(g, Ssub))
                    == T.pullback_sub(g, U).leq(Ssub))


def test_image_factorization(S):
    A = S.obj({"0": ("a", "b"), "1": ("t",)}, {"u": {"t": "a"}})
    B = S.obj({"0": ("p", "q", "r"), "1": ("s", "w")},
              {"u": {"s": "p", "w": "q"}})
    for f in S.hom(A, B):
        e, m = S.image(f)
        assert S.is_epi(e) and S.is_mono(m)
        assert compose(m, e) == f


def test_connectives_truth_tables(T):
    Om = T.omega()
    tt = T.true().maps[STAR][STAR]
    ff = T.false().maps[STAR][STAR]
    conj = T.conjunction()
    disj = T.disjunction()
    impl = T.implication()
    neg = T.negation()
    for s in (tt, ff):
        for t in (tt, ff):
            assert conj.maps[STAR][(s, t)] == (tt if s == t == tt else ff)
            assert disj.maps[STAR][(s, t)] == (tt if tt in (s, t) else ff)
            assert impl.maps[STAR][(s, t)] == (ff if (s, t) == (tt, ff) else tt)
    assert neg.maps[STAR][tt] == ff and neg.maps[STAR][ff] == tt


def test_sierpinski_negation_not_boolean(S):
    Om = S.omega()
    neg = S.negation()
    tt1 = S.max_sieve("1")
    middle = [s for s in Om.carriers["1"] if s not in (tt1, frozenset())]
    assert len(middle) == 1
    # double negation sends the middle truth value to true
    m = middle[0]
    assert neg.maps["1"][neg.maps["1"][m]] == tt1 and m != tt1
