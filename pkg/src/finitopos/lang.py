"""The internal language of a concrete topos.

Terms denote span classes 1 -> B whose context object is the product of the
free variables' types; formulas are terms of type Omega.  The interpreter
composes the topos's displayed structure morphisms (diagonal character,
membership evaluation, connectives, adjoint quantifiers, comprehension
transpose); a separate set-theoretic evaluator serves as an independent
oracle over one-stage carriers.

Concrete syntax::

    formula   := quantified
    quantified:= ("forall" | "exists") var ":" type "." formula | implies
    implies   := orterm ("implies" orterm)*
    orterm    := andterm ("or" andterm)*
    andterm   := notterm ("and" notterm)*
    notterm   := "not" notterm | equality
    equality  := primary ("=" primary)?
    primary   := "true" | "false" | "(" formula ")"
               | "{" var ":" type "|" formula "}"
               | name "(" args ")"            (mem/and/or/implies/not/pair
                                               or a named morphism)
               | name (":" type)?             (variable)
    type      := name | "1" | "Omega" | "prod(" type "," type ")"
               | "pow(" type ")"
"""

from __future__ import annotations

import random

from .indet import ClassTerm, IndeterminateCategory
from .presheaf import PresheafMorphism, compose
from .topos import STAR


class LangError(ValueError):
    def __init__(self, msg, pos=None):
        if pos is not None:
            msg = "line %d, column %d: %s" % (pos[0], pos[1], msg)
        super().__init__(msg)
        self.pos = pos


# ----------------------------------------------------------------------
# tokenizer / parser

_KEYWORDS = {"forall", "exists", "and", "or", "implies", "not", "mem",
             "pair", "true", "false", "prod", "pow"}
_PUNCT = list(":.=(){}|,")


def tokenize(text):
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch in _PUNCT:
            toks.append((ch, ch, (line, col)))
            col += 1
            i += 1
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in _KEYWORDS else "name"
            toks.append((kind, word, (line, col)))
            col += j - i
            i = j
            continue
        raise LangError("unexpected character %r" % ch, (line, col))
    toks.append(("eof", "", (line, col)))
    return toks


class Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise LangError("expected %r, found %r" % (kind, t[1] or "end"),
                            t[2])
        return t

    # types ----------------------------------------------------------

    def parse_type(self):
        t = self.next()
        if t[0] == "name":
            if t[1] == "1":
                return ("one", t[2])
            if t[1] == "Omega":
                return ("omega", t[2])
            return ("named", t[1], t[2])
        if t[0] == "prod":
            self.expect("(")
            a = self.parse_type()
            self.expect(",")
            b = self.parse_type()
            self.expect(")")
            return ("prodty", a, b, t[2])
        if t[0] == "pow":
            self.expect("(")
            a = self.parse_type()
            self.expect(")")
            return ("powty", a, t[2])
        raise LangError("expected a type, found %r" % (t[1] or "end"), t[2])

    # terms ----------------------------------------------------------

    def parse(self):
        node = self.quantified()
        t = self.peek()
        if t[0] != "eof":
            raise LangError("unexpected %r after formula" % t[1], t[2])
        return node

    def quantified(self):
        t = self.peek()
        if t[0] in ("forall", "exists"):
            self.next()
            v = self.expect("name")
            self.expect(":")
            ty = self.parse_type()
            self.expect(".")
            body = self.quantified()
            return (t[0], v[1], ty, body, t[2])
        return self.implies_level()

    def implies_level(self):
        node = self.or_level()
        while self.peek()[0] == "implies":
            t = self.next()
            node = ("implies", node, self.or_level(), t[2])
        return node

    def or_level(self):
        node = self.and_level()
        while self.peek()[0] == "or":
            t = self.next()
            node = ("or", node, self.and_level(), t[2])
        return node

    def and_level(self):
        node = self.not_level()
        while self.peek()[0] == "and":
            t = self.next()
            node = ("and", node, self.not_level(), t[2])
        return node

    def not_level(self):
        t = self.peek()
        if t[0] == "not":
            self.next()
            if self.peek()[0] == "(":
                self.next()
                arg = self.quantified()
                self.expect(")")
            else:
                arg = self.not_level()
            return ("not", arg, t[2])
        return self.equality()

    def equality(self):
        node = self.primary()
        if self.peek()[0] == "=":
            t = self.next()
            return ("eq", node, self.primary(), t[2])
        return node

    def primary(self):
        t = self.next()
        if t[0] == "true":
            return ("true", t[2])
        if t[0] == "false":
            return ("false", t[2])
        if t[0] == "(":
            node = self.quantified()
            self.expect(")")
            return node
        if t[0] == "{":
            v = self.expect("name")
            self.expect(":")
            ty = self.parse_type()
            self.expect("|")
            body = self.quantified()
            self.expect("}")
            return ("compr", v[1], ty, body, t[2])
        if t[0] == "mem":
            self.expect("(")
            a = self.quantified()
            self.expect(",")
            s = self.quantified()
            self.expect(")")
            return ("mem", a, s, t[2])
        if t[0] == "pair":
            self.expect("(")
            a = self.quantified()
            self.expect(",")
            b = self.quantified()
            self.expect(")")
            return ("pair", a, b, t[2])
        if t[0] in ("and", "or", "implies"):
            self.expect("(")
            a = self.quantified()
            self.expect(",")
            b = self.quantified()
            self.expect(")")
            return (t[0], a, b, t[2])
        if t[0] == "name":
            if self.peek()[0] == "(":
                self.next()
                if self.peek()[0] == ")":
                    self.next()
                    return ("const", t[1], t[2])
                arg = self.quantified()
                self.expect(")")
                return ("apply", t[1], arg, t[2])
            if self.peek()[0] == ":":
                self.next()
                ty = self.parse_type()
                return ("var", t[1], ty, t[2])
            return ("var", t[1], None, t[2])
        raise LangError("expected a term, found %r" % (t[1] or "end"), t[2])


def parse(text):
    return Parser(text).parse()


# ----------------------------------------------------------------------
# environment and type resolution


class Env:
    """Named objects and morphisms of the ambient topos."""

    def __init__(self, T, objects=None, morphisms=None):
        self.T = T
        self.objects = dict(objects or {})
        self.morphisms = dict(morphisms or {})

    def resolve_type(self, ty):
        T = self.T
        kind = ty[0]
        if kind == "one":
            return T.terminal()
        if kind == "omega":
            return T.omega()
        if kind == "named":
            if ty[1] not in self.objects:
                raise LangError("unknown type %r" % ty[1], ty[2])
            return self.objects[ty[1]]
        if kind == "prodty":
            P, _, _ = T.product(self.resolve_type(ty[1]),
                                self.resolve_type(ty[2]))
            return P
        if kind == "powty":
            PA, _ = T.power(self.resolve_type(ty[1]))
            return PA
        raise LangError("bad type node %r" % kind)


# ----------------------------------------------------------------------
# typechecking: assign a type object to every node and collect the free
# variable context in first-occurrence order


def typecheck(node, env: Env):
    """Returns (type object, free variables as ordered (name, obj) list)."""
    ctx = []

    def note_free(name, obj, pos):
        for n, o in ctx:
            if n == name:
                if o != obj:
                    raise LangError(
                        "variable %r used at two different types" % name, pos)
                return
        ctx.append((name, obj))

    def check(n, bound):
        T = env.T
        kind = n[0]
        if kind in ("true", "false"):
            return T.omega()
        if kind == "var":
            name = n[1]
            for bn, bo in reversed(bound):
                if bn == name:
                    if n[2] is not None and env.resolve_type(n[2]) != bo:
                        raise LangError(
                            "bound variable %r annotated at a different type"
                            % name, n[3])
                    return bo
            if n[2] is None:
                for fn, fo in ctx:
                    if fn == name:
                        return fo
                raise LangError("unknown identifier %r" % name, n[3])
            obj = env.resolve_type(n[2])
            note_free(name, obj, n[3])
            return obj
        if kind == "const":
            if n[1] not in env.morphisms:
                raise LangError("unknown morphism %r" % n[1], n[2])
            m = env.morphisms[n[1]]
            if m.dom != T.terminal():
                raise LangError("%r is not a constant (domain is not 1)"
                                % n[1], n[2])
            return m.cod
        if kind == "apply":
            if n[1] not in env.morphisms:
                raise LangError("unknown morphism %r" % n[1], n[3])
            m = env.morphisms[n[1]]
            at = check(n[2], bound)
            if at != m.dom:
                raise LangError("argument of %r has the wrong type" % n[1],
                                n[3])
            return m.cod
        if kind == "pair":
            a = check(n[1], bound)
            b = check(n[2], bound)
            P, _, _ = T.product(a, b)
            return P
        if kind == "eq":
            a = check(n[1], bound)
            b = check(n[2], bound)
            if a != b:
                raise LangError("equality between different types", n[3])
            return T.omega()
        if kind == "mem":
            a = check(n[1], bound)
            s = check(n[2], bound)
            PA, _ = T.power(a)
            if s != PA:
                raise LangError("membership needs a power-typed right side",
                                n[3])
            return T.omega()
        if kind in ("and", "or", "implies"):
            for sub in (n[1], n[2]):
                if check(sub, bound) != T.omega():
                    raise LangError("%s needs formula arguments" % kind, n[3])
            return T.omega()
        if kind == "not":
            if check(n[1], bound) != T.omega():
                raise LangError("not needs a formula argument", n[2])
            return T.omega()
        if kind in ("forall", "exists"):
            obj = env.resolve_type(n[2])
            if check(n[3], bound + [(n[1], obj)]) != T.omega():
                raise LangError("quantifier body must be a formula", n[4])
            return T.omega()
        if kind == "compr":
            obj = env.resolve_type(n[2])
            if check(n[3], bound + [(n[1], obj)]) != T.omega():
                raise LangError("comprehension body must be a formula", n[4])
            PA, _ = T.power(obj)
            return PA
        raise LangError("bad term node %r" % kind)

    ty = check(node, [])
    return ty, list(ctx)


# ----------------------------------------------------------------------
# internal quantifier morphisms PA -> Omega


def forall_map(T, A):
    """The right adjoint composite as a morphism PA -> Omega."""
    PA, member = T.power(A)
    _, p1, _ = T.product(PA, A)
    return T.char(T.forall_along(p1, member))


def exists_map(T, A):
    """The left adjoint composite as a morphism PA -> Omega."""
    PA, member = T.power(A)
    _, p1, _ = T.product(PA, A)
    return T.char(T.exists_along(p1, member))


# ----------------------------------------------------------------------
# interpretation


class Denotation:
    """A term's value: a morphism out of the context product.

    `ctx` is the ordered free-variable context; `core` is a morphism
    product_list(types) -> cod.  Closed terms have the empty product (a
    one-element terminal) as context object.
    """

    def __init__(self, T, ctx, core):
        self.T = T
        self.ctx = tuple(ctx)
        self.core = core
        self.cod = core.cod

    def context_object(self):
        return self.core.dom

    def as_class(self, cat: IndeterminateCategory = None) -> ClassTerm:
        """The span class 1 -> cod with the context as coordinates."""
        T = self.T
        if cat is None:
            cat = IndeterminateCategory(T, tuple(o for _, o in self.ctx))
        one = T.terminal()
        apex, _ = T.product_list([o for _, o in self.ctx] + [one])
        maps = {c: {t: self.core.maps[c][t[:-1]] for t in apex.carriers[c]}
                for c in T.index.stages}
        core = PresheafMorphism(apex, self.cod, maps, check=False)
        return ClassTerm(cat, one, self.cod, tuple(o for _, o in self.ctx),
                         core)

    def is_formula(self):
        return self.cod == self.T.omega()

    def truth(self):
        """For a closed formula: whether it denotes true."""
        if self.ctx:
            raise LangError("term has free variables")
        if not self.is_formula():
            raise LangError("term is not a formula")
        return all(self.core.maps[c][()] == self.T.max_sieve(c)
                   for c in self.T.index.stages)

    def global_element(self):
        if self.ctx:
            raise LangError("term has free variables")
        return self.core


def interpret(node, env: Env, ctx=None) -> Denotation:
    """Denotation over the given context (computed from the term when
    omitted)."""
    T = env.T
    if ctx is None:
        _, ctx = typecheck(node, env)
    core = _interp(node, env, list(ctx))
    return Denotation(T, ctx, core)


def _ctx_product(T, ctx):
    P, projs = T.product_list([o for _, o in ctx])
    return P, projs


def _interp(n, env, ctx):
    """Core morphism over product_list(ctx types)."""
    T = env.T
    kind = n[0]
    P, projs = _ctx_product(T, ctx)

    if kind in ("true", "false"):
        point = T.true() if kind == "true" else T.false()
        return compose(point, T.bang(P))
    if kind == "var":
        name = n[1]
        for i in range(len(ctx) - 1, -1, -1):
            if ctx[i][0] == name:
                return projs[i]
        raise LangError("unknown identifier %r" % name, n[3])
    if kind == "const":
        return compose(env.morphisms[n[1]], T.bang(P))
    if kind == "apply":
        return compose(env.morphisms[n[1]], _interp(n[2], env, ctx))
    if kind == "pair":
        return T.pair(_interp(n[1], env, ctx), _interp(n[2], env, ctx))
    if kind == "eq":
        a = _interp(n[1], env, ctx)
        b = _interp(n[2], env, ctx)
        return compose(T.equality_map(a.cod), T.pair(a, b))
    if kind == "mem":
        a = _interp(n[1], env, ctx)
        s = _interp(n[2], env, ctx)
        _, ev = T.exponential(a.cod, T.omega())
        return compose(ev, T.pair(s, a))
    if kind in ("and", "or", "implies"):
        conn = {"and": T.conjunction, "or": T.disjunction,
                "implies": T.implication}[kind]()
        return compose(conn, T.pair(_interp(n[1], env, ctx),
                                    _interp(n[2], env, ctx)))
    if kind == "not":
        return compose(T.negation(), _interp(n[1], env, ctx))
    if kind in ("forall", "exists"):
        A = env.resolve_type(n[2])
        inner = ctx + [(n[1], A)]
        f = _interp(n[3], env, inner)
        tilde = _abstract_last(T, f, ctx, A)
        q = forall_map(T, A) if kind == "forall" else exists_map(T, A)
        return compose(q, tilde)
    if kind == "compr":
        A = env.resolve_type(n[2])
        inner = ctx + [(n[1], A)]
        f = _interp(n[3], env, inner)
        return _abstract_last(T, f, ctx, A)
    raise LangError("bad term node %r" % kind)


def _abstract_last(T, f, ctx, A):
    """For f over context (ctx, x:A), the transpose ctx-product -> P(A)."""
    P, _ = _ctx_product(T, ctx)
    PC, _, _ = T.product(P, A)
    maps = {c: {(t, a): f.maps[c][t + (a,)] for (t, a) in PC.carriers[c]}
            for c in T.index.stages}
    f2 = PresheafMorphism(PC, T.omega(), maps, check=False)
    return T.transpose(f2, P, A, T.omega())


def eval_closed(text_or_node, env: Env):
    """Truth value of a closed formula, or the global element of a closed
    non-formula term."""
    node = parse(text_or_node) if isinstance(text_or_node, str) \
        else text_or_node
    den = interpret(node, env)
    if den.ctx:
        raise LangError("term has free variables: %s"
                        % ", ".join(n for n, _ in den.ctx))
    if den.is_formula():
        return den.truth()
    return den.global_element()


# ----------------------------------------------------------------------
# dummy-variable invariance


def dummy_invariance_check(node, env: Env, extra_name, extra_obj) -> bool:
    """Interpreting with a padded context yields the same span class."""
    _, ctx = typecheck(node, env)
    if any(n == extra_name for n, _ in ctx):
        raise LangError("padding variable already occurs in the term")
    den = interpret(node, env, ctx)
    padded = interpret(node, env, ctx + [(extra_name, extra_obj)])
    cat = IndeterminateCategory(
        env.T, tuple(o for _, o in ctx) + (extra_obj,))
    return den.as_class(cat).class_equal(padded.as_class(cat))


# ----------------------------------------------------------------------
# independent set-theoretic oracle (one-stage carriers)


def pa_to_set(T, A, elem):
    """Convert a one-stage power-object element to a plain frozenset."""
    fam = dict(elem)
    idarrow = T.index.identity(STAR)
    return frozenset(a for a in A.carriers[STAR]
                     if fam[(idarrow, a)] == T.max_sieve(STAR))


def set_to_pa(T, A, subset):
    idarrow = T.index.identity(STAR)
    fam = {(idarrow, a): (T.max_sieve(STAR) if a in subset else frozenset())
           for a in A.carriers[STAR]}
    return tuple(sorted(fam.items(), key=lambda kv: _famkey(kv[0])))


def _famkey(k):
    from .util import ekey
    return ekey(k)


def oracle_eval(node, env: Env, assign):
    """Naive set-theoretic evaluation over the single stage of FinSet.

    Variables are looked up in `assign`; power values are frozensets;
    formulas are booleans."""
    T = env.T
    assert T.index.stages == (STAR,)
    kind = node[0]
    if kind == "true":
        return True
    if kind == "false":
        return False
    if kind == "var":
        return assign[node[1]]
    if kind == "const":
        m = env.morphisms[node[1]]
        v = m.maps[STAR][STAR]
        if _is_power_object(T, m.cod):
            return pa_to_set(T, _power_base(T, m.cod), v)
        return v
    if kind == "apply":
        m = env.morphisms[node[1]]
        v = oracle_eval(node[2], env, assign)
        return m.maps[STAR][v]
    if kind == "pair":
        return (oracle_eval(node[1], env, assign),
                oracle_eval(node[2], env, assign))
    if kind == "eq":
        return oracle_eval(node[1], env, assign) == \
            oracle_eval(node[2], env, assign)
    if kind == "mem":
        a = oracle_eval(node[1], env, assign)
        s = oracle_eval(node[2], env, assign)
        return a in s
    if kind == "and":
        return oracle_eval(node[1], env, assign) and \
            oracle_eval(node[2], env, assign)
    if kind == "or":
        return oracle_eval(node[1], env, assign) or \
            oracle_eval(node[2], env, assign)
    if kind == "implies":
        return (not oracle_eval(node[1], env, assign)) or \
            oracle_eval(node[2], env, assign)
    if kind == "not":
        return not oracle_eval(node[1], env, assign)
    if kind in ("forall", "exists"):
        A = env.resolve_type(node[2])
        vals = [oracle_eval(node[3], env, {**assign, node[1]: a})
                for a in A.carriers[STAR]]
        return all(vals) if kind == "forall" else any(vals)
    if kind == "compr":
        A = env.resolve_type(node[2])
        return frozenset(a for a in A.carriers[STAR]
                         if oracle_eval(node[3], env, {**assign, node[1]: a}))
    raise LangError("bad term node %r" % kind)


def oracle_agrees(node, env: Env) -> bool:
    """Whether the topos denotation matches the oracle on every assignment
    of the free variables (FinSet only).  Power-typed values are compared
    after conversion to plain sets."""
    T = env.T
    ty, ctx = typecheck(node, env)
    den = interpret(node, env, ctx)
    import itertools as _it
    names = [n for n, _ in ctx]
    domains = [o.carriers[STAR] for _, o in ctx]
    for combo in _it.product(*domains):
        assign = dict(zip(names, combo))
        got = den.core.maps[STAR][tuple(combo)]
        want = oracle_eval(node, env, assign)
        if ty == T.omega():
            if (got == T.max_sieve(STAR)) != want:
                return False
        elif isinstance(want, frozenset):
            base = _power_base(T, ty)
            if pa_to_set(T, base, got) != want:
                return False
        else:
            if got != want:
                return False
    return True


def _is_power_object(T, X):
    try:
        base = _power_base(T, X)
    except (LangError, TypeError, ValueError):
        return False
    PA, _ = T.power(base)
    return PA == X


def _power_base(T, PA):
    """Recover A from PA via the family keys of any element."""
    from .util import esort
    if not PA.carriers[STAR]:
        raise LangError("cannot recover base of an empty power object")
    fam = dict(PA.carriers[STAR][0])
    return T.finset(esort({a for (_, a) in fam}))


# ----------------------------------------------------------------------
# seeded formula sampler


def sample_formula(rng: random.Random, env: Env, var_pool, depth=3):
    """A random well-typed formula AST over the given (name, type-name)
    variable pool."""
    T = env.T

    def ty_of(tyname):
        return ("named", tyname, (0, 0))

    def term(d):
        name, tyname = rng.choice(var_pool)
        base = ("var", name, ty_of(tyname), (0, 0))
        for mname, m in sorted(env.morphisms.items()):
            if m.dom == env.objects[tyname] and rng.random() < 0.3:
                return ("apply", mname, base, (0, 0)), m.cod
        return base, env.objects[tyname]

    def formula(d):
        if d <= 0:
            t1, o1 = term(0)
            # equality with a random same-typed term
            cands = [(n, tn) for n, tn in var_pool
                     if env.objects[tn] == o1]
            if cands:
                n2, tn2 = rng.choice(cands)
                return ("eq", t1, ("var", n2, ty_of(tn2), (0, 0)), (0, 0))
            return ("eq", t1, t1, (0, 0))
        k = rng.randrange(6)
        if k == 0:
            return ("not", formula(d - 1), (0, 0))
        if k in (1, 2, 3):
            op = ("and", "or", "implies")[k - 1]
            return (op, formula(d - 1), formula(d - 1), (0, 0))
        q = "forall" if k == 4 else "exists"
        name, tyname = rng.choice(var_pool)
        bound = "q%d_%s" % (d, name)
        body = _rename_same_typed(formula(d - 1), bound, tyname, rng)
        return (q, bound, ty_of(tyname), body, (0, 0))

    return formula(depth)


def _rename_same_typed(node, newname, tyname, rng):
    """Rebind some occurrences of variables annotated at the quantified
    type, so the quantifier genuinely captures (the AST stays well-typed)."""
    kind = node[0]
    if kind == "var":
        if node[2] is not None and node[2][0] == "named" \
                and node[2][1] == tyname and rng.random() < 0.5:
            return ("var", newname, node[2], node[3])
        return node
    if kind in ("eq", "and", "or", "implies", "mem", "pair"):
        return (kind, _rename_same_typed(node[1], newname, tyname, rng),
                _rename_same_typed(node[2], newname, tyname, rng), node[3])
    if kind == "not":
        return (kind, _rename_same_typed(node[1], newname, tyname, rng),
                node[2])
    if kind in ("forall", "exists", "compr"):
        return (kind, node[1], node[2],
                _rename_same_typed(node[3], newname, tyname, rng), node[4])
    if kind == "apply":
        return (kind, node[1],
                _rename_same_typed(node[2], newname, tyname, rng), node[3])
    return node
