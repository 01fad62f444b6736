"""Parser, typechecker and interpreter for the internal language."""

import random

import pytest

from finitopos.lang import (Env, LangError, dummy_invariance_check,
                            eval_closed, interpret, oracle_agrees, parse,
                            pa_to_set, sample_formula, set_to_pa, typecheck)
from finitopos.presheaf import PresheafMorphism, Subobject, compose
from finitopos.topos import STAR, finset_topos, sierpinski_topos


@pytest.fixture(scope="module")
def env():
    T = finset_topos()
    A = T.finset(["a0", "a1"])
    c_a0 = PresheafMorphism(A, A, {STAR: {"a0": "a0", "a1": "a0"}})
    PA, _ = T.power(A)
    S = PresheafMorphism(T.terminal(), PA,
                         {STAR: {STAR: set_to_pa(T, A, {"a0"})}})
    return Env(T, {"A": A, "E": T.finset([])}, {"c_a0": c_a0, "S": S})


def test_parse_shapes():
    assert parse("x:A = x:A")[0] == "eq"
    node = parse("forall x:A. f(x) = g(x)")
    assert node[0] == "forall" and node[3][0] == "eq"
    assert parse("{ x:A | mem(x, S()) }")[0] == "compr"


def test_parse_errors_have_positions():
    with pytest.raises(LangError) as e:
        parse("forall x:A x = x")
    assert "line 1" in str(e.value)


def test_typecheck(env):
    ty, ctx = typecheck(parse("x:A = x:A"), env)
    assert ty == env.T.omega() and [n for n, _ in ctx] == ["x"]
    ty, _ = typecheck(parse("{ x:A | x = c_a0(x) }"), env)
    PA, _ = env.T.power(env.objects["A"])
    assert ty == PA
    with pytest.raises(LangError):
        typecheck(parse("mem(x:A, x:A)"), env)
    with pytest.raises(LangError):
        typecheck(parse("unknown_var = unknown_var"), env)


def test_eval_closed_basics(env):
    assert eval_closed("forall x:A. x = x", env) is True
    assert eval_closed("exists x:E. x = x", env) is False
    assert eval_closed("not false", env) is True
    assert eval_closed("not true", env) is False
    with pytest.raises(LangError):
        eval_closed("x:A = x:A", env)


def test_comprehension_denotes_subset(env):
    T = env.T
    A = env.objects["A"]
    den = interpret(parse("{ x:A | x = c_a0(x) }"), env)
    assert pa_to_set(T, A, den.core.maps[STAR][()]) == frozenset(["a0"])
    # round-trip with the classifying morphism of the same formula
    body = interpret(parse("x:A = c_a0(x:A)"), env)
    chi = PresheafMorphism(A, T.omega(),
                           {STAR: {a: body.core.maps[STAR][(a,)]
                                   for a in A.carriers[STAR]}}, check=False)
    sub = T.sub_of_char(chi)
    assert sub.parts[STAR] == {"a0"}


def test_excluded_middle_finset_true_sierpinski_false(env):
    assert eval_closed(
        "forall x:A. or(mem(x, S()), not mem(x, S()))", env) is True
    S2 = sierpinski_topos()
    AS = S2.obj({"0": ("a",), "1": ("t",)}, {"u": {"t": "a"}})
    charS = S2.char(Subobject(AS, {"0": {"a"}, "1": set()}))
    one = S2.terminal()
    _, _, p2 = S2.product(one, AS)
    Sel = S2.transpose(compose(charS, p2), one, AS, S2.omega())
    envS = Env(S2, {"A": AS}, {"S": Sel})
    assert eval_closed(
        "forall x:A. or(mem(x, S()), not mem(x, S()))", envS) is False
    assert eval_closed("forall x:A. x = x", envS) is True


def test_alpha_invariance(env):
    d1 = interpret(parse("forall x:A. c_a0(x) = x"), env)
    d2 = interpret(parse("forall y:A. c_a0(y) = y"), env)
    assert d1.core == d2.core


def test_dummy_invariance_sampled(env):
    rng = random.Random(7)
    A = env.objects["A"]
    pool = [("v", "A"), ("w", "A")]
    for _ in range(25):
        node = sample_formula(rng, env, pool, 2)
        assert dummy_invariance_check(node, env, "zpad", A)


def test_oracle_agreement_sampled(env):
    rng = random.Random(11)
    pool = [("v", "A"), ("w", "A")]
    for _ in range(40):
        node = sample_formula(rng, env, pool, 3)
        assert oracle_agrees(node, env)
    for f in ["forall x:A. x = x", "{ x:A | x = c_a0(x) }",
              "mem(c_a0(x:A), S())",
              "forall x:A. exists y:A. implies(x = y, c_a0(x) = c_a0(y))"]:
        assert oracle_agrees(parse(f), env)
