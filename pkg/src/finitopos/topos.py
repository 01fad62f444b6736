"""Topos structure on categories of finite presheaves.

Finite limits and colimits, the subobject classifier, exponentials, power
objects, image factorization and the adjoint quantifiers are all computed
stage-wise on explicit carriers.  FinSet is the special case of the
one-stage index.
"""

from __future__ import annotations

import itertools

from .indexcat import IndexCategory, finset_index, sierpinski_index
from .presheaf import (PresheafError, PresheafMorphism, PresheafObject,
                       Subobject, compose, empty_subobject, full_subobject,
                       identity)
from .util import ekey, esort

STAR = "*"


class Topos:
    """A category of presheaves over a fixed finite index category.

    All constructions are pure; caches are keyed by extensional object keys
    and behave as if absent.
    """

    def __init__(self, index: IndexCategory, name="presheaves"):
        self.index = index
        self.name = name
        self._omega = None
        self._exp_cache = {}
        self._hom_cache = {}
        self._conn_cache = {}

    # ------------------------------------------------------------------
    # objects

    def obj(self, carriers, restr=None):
        return PresheafObject(self.index, carriers, restr)

    def finset(self, elems):
        """Convenience constructor for the one-stage index."""
        assert self.index.stages == (STAR,)
        return PresheafObject(self.index, {STAR: tuple(elems)})

    def terminal(self):
        return PresheafObject(
            self.index, {c: (STAR,) for c in self.index.stages},
            {n: {STAR: STAR} for n in self.index.nonidentity_arrows()},
            check=False)

    def initial(self):
        return PresheafObject(self.index, {c: () for c in self.index.stages},
                              check=False)

    def bang(self, A) -> PresheafMorphism:
        """The unique morphism A -> 1."""
        one = self.terminal()
        return PresheafMorphism(A, one,
                                {c: {x: STAR for x in A.carriers[c]}
                                 for c in self.index.stages}, check=False)

    def from_initial(self, A) -> PresheafMorphism:
        return PresheafMorphism(self.initial(), A,
                                {c: {} for c in self.index.stages}, check=False)

    # ------------------------------------------------------------------
    # products and pullbacks

    def product(self, A, B):
        """Binary product with elements as pairs; returns (P, pi_A, pi_B)."""
        carriers = {c: tuple((a, b)
                             for a in A.carriers[c] for b in B.carriers[c])
                    for c in self.index.stages}
        restr = {n: {(a, b): (A.restrict(n, a), B.restrict(n, b))
                     for (a, b) in carriers[self.index.target(n)]}
                 for n in self.index.nonidentity_arrows()}
        P = PresheafObject(self.index, carriers, restr, check=False)
        p1 = PresheafMorphism(P, A, {c: {ab: ab[0] for ab in carriers[c]}
                                     for c in self.index.stages}, check=False)
        p2 = PresheafMorphism(P, B, {c: {ab: ab[1] for ab in carriers[c]}
                                     for c in self.index.stages}, check=False)
        return P, p1, p2

    def product_list(self, objs):
        """N-ary product with flat tuple elements; returns (P, [projections])."""
        objs = list(objs)
        carriers = {c: tuple(itertools.product(*(X.carriers[c] for X in objs)))
                    for c in self.index.stages}
        restr = {n: {t: tuple(X.restrict(n, x) for X, x in zip(objs, t))
                     for t in carriers[self.index.target(n)]}
                 for n in self.index.nonidentity_arrows()}
        P = PresheafObject(self.index, carriers, restr, check=False)
        projs = [PresheafMorphism(P, X, {c: {t: t[i] for t in carriers[c]}
                                         for c in self.index.stages}, check=False)
                 for i, X in enumerate(objs)]
        return P, projs

    def pair(self, f, g):
        """The mediating morphism <f,g> into product(f.cod, g.cod)."""
        assert f.dom == g.dom
        P, _, _ = self.product(f.cod, g.cod)
        return PresheafMorphism(
            f.dom, P,
            {c: {x: (f.maps[c][x], g.maps[c][x]) for x in f.dom.carriers[c]}
             for c in self.index.stages}, check=False)

    def tuple_map(self, fs, dom):
        """Mediating morphism into product_list of the codomains."""
        P, _ = self.product_list([f.cod for f in fs])
        return PresheafMorphism(
            dom, P,
            {c: {x: tuple(f.maps[c][x] for f in fs) for x in dom.carriers[c]}
             for c in self.index.stages}, check=False)

    def cross(self, f, g):
        """f x g between binary products."""
        P, p1, p2 = self.product(f.dom, g.dom)
        return self.pair(compose(f, p1), compose(g, p2))

    def diagonal(self, A):
        return self.pair(identity(A), identity(A))

    def pullback(self, f, g):
        """Pullback of f: A -> C against g: B -> C; returns (P, p1, p2)."""
        if f.cod != g.cod:
            raise PresheafError("pullback: codomain mismatch")
        A, B = f.dom, g.dom
        carriers = {c: tuple((a, b) for a in A.carriers[c] for b in B.carriers[c]
                             if f.maps[c][a] == g.maps[c][b])
                    for c in self.index.stages}
        restr = {n: {(a, b): (A.restrict(n, a), B.restrict(n, b))
                     for (a, b) in carriers[self.index.target(n)]}
                 for n in self.index.nonidentity_arrows()}
        P = PresheafObject(self.index, carriers, restr, check=False)
        p1 = PresheafMorphism(P, A, {c: {ab: ab[0] for ab in carriers[c]}
                                     for c in self.index.stages}, check=False)
        p2 = PresheafMorphism(P, B, {c: {ab: ab[1] for ab in carriers[c]}
                                     for c in self.index.stages}, check=False)
        return P, p1, p2

    def equalizer(self, f, g):
        """Equalizer of parallel f, g as a subobject of their domain."""
        assert f.dom == g.dom and f.cod == g.cod
        return Subobject(f.dom,
                         {c: {x for x in f.dom.carriers[c]
                              if f.maps[c][x] == g.maps[c][x]}
                          for c in self.index.stages}, check=False)

    # ------------------------------------------------------------------
    # coproducts

    def coproduct(self, A, B):
        """Binary coproduct with tagged elements; returns (S, inl, inr)."""
        carriers = {c: tuple([("inl", a) for a in A.carriers[c]]
                             + [("inr", b) for b in B.carriers[c]])
                    for c in self.index.stages}

        def res(n, t):
            tag, x = t
            X = A if tag == "inl" else B
            return (tag, X.restrict(n, x))

        restr = {n: {t: res(n, t) for t in carriers[self.index.target(n)]}
                 for n in self.index.nonidentity_arrows()}
        S = PresheafObject(self.index, carriers, restr, check=False)
        inl = PresheafMorphism(A, S, {c: {a: ("inl", a) for a in A.carriers[c]}
                                      for c in self.index.stages}, check=False)
        inr = PresheafMorphism(B, S, {c: {b: ("inr", b) for b in B.carriers[c]}
                                      for c in self.index.stages}, check=False)
        return S, inl, inr

    def copair(self, f, g):
        """[f,g] out of coproduct(f.dom, g.dom)."""
        assert f.cod == g.cod
        S, _, _ = self.coproduct(f.dom, g.dom)
        return PresheafMorphism(
            S, f.cod,
            {c: {t: (f.maps[c][t[1]] if t[0] == "inl" else g.maps[c][t[1]])
                 for t in S.carriers[c]}
             for c in self.index.stages}, check=False)

    # ------------------------------------------------------------------
    # subobject classifier

    def omega(self):
        """Omega(c) = sieves on c, as frozensets of arrow names."""
        if self._omega is not None:
            return self._omega
        sieves = {}
        for c in self.index.stages:
            ins = self.index.arrows_into(c)
            found = []
            for bits in itertools.product((False, True), repeat=len(ins)):
                S = frozenset(a for a, b in zip(ins, bits) if b)
                if self._sieve_closed(c, S):
                    found.append(S)
            sieves[c] = esort(found)
        restr = {}
        for n in self.index.nonidentity_arrows():
            a, b = self.index.source(n), self.index.target(n)
            restr[n] = {S: frozenset(w for w in self.index.arrows_into(a)
                                     if self.index.compose(n, w) in S)
                        for S in sieves[b]}
        self._omega = PresheafObject(self.index, sieves, restr, check=False)
        return self._omega

    def _sieve_closed(self, c, S):
        for u in S:
            src = self.index.source(u)
            for w in self.index.arrows_into(src):
                if self.index.compose(u, w) not in S:
                    return False
        return True

    def max_sieve(self, c):
        return frozenset(self.index.arrows_into(c))

    def true(self):
        one = self.terminal()
        return PresheafMorphism(one, self.omega(),
                                {c: {STAR: self.max_sieve(c)}
                                 for c in self.index.stages}, check=False)

    def false(self):
        one = self.terminal()
        return PresheafMorphism(one, self.omega(),
                                {c: {STAR: frozenset()}
                                 for c in self.index.stages}, check=False)

    def char(self, S: Subobject) -> PresheafMorphism:
        """The classifying morphism A -> Omega of a subobject S <= A."""
        A = S.carrier
        maps = {}
        for c in self.index.stages:
            maps[c] = {}
            for x in A.carriers[c]:
                maps[c][x] = frozenset(
                    u for u in self.index.arrows_into(c)
                    if A.restrict(u, x) in S.parts[self.index.source(u)])
        return PresheafMorphism(A, self.omega(), maps, check=False)

    def sub_of_char(self, chi: PresheafMorphism) -> Subobject:
        assert chi.cod == self.omega()
        return Subobject(chi.dom,
                         {c: {x for x in chi.dom.carriers[c]
                              if chi.maps[c][x] == self.max_sieve(c)}
                          for c in self.index.stages}, check=False)

    # ------------------------------------------------------------------
    # image factorization and morphism predicates

    def image_sub(self, f: PresheafMorphism) -> Subobject:
        return Subobject(f.cod,
                         {c: set(f.maps[c].values()) for c in self.index.stages},
                         check=False)

    def image(self, f):
        """Epi-mono factorization f = m o e; returns (e, m)."""
        S = self.image_sub(f)
        m = S.inclusion()
        e = PresheafMorphism(f.dom, m.dom,
                             {c: dict(f.maps[c]) for c in self.index.stages},
                             check=False)
        return e, m

    def is_mono(self, f):
        return all(len(set(f.maps[c].values())) == len(f.dom.carriers[c])
                   for c in self.index.stages)

    def is_epi(self, f):
        return all(set(f.maps[c].values()) == set(f.cod.carriers[c])
                   for c in self.index.stages)

    def is_iso(self, f):
        return self.is_mono(f) and self.is_epi(f)

    def inverse(self, f):
        assert self.is_iso(f)
        return PresheafMorphism(f.cod, f.dom,
                                {c: {v: k for k, v in f.maps[c].items()}
                                 for c in self.index.stages}, check=False)

    # ------------------------------------------------------------------
    # quantifiers along a morphism

    def pullback_sub(self, g: PresheafMorphism, U: Subobject) -> Subobject:
        """g*(U) for U <= cod(g)."""
        assert U.carrier == g.cod
        return Subobject(g.dom,
                         {c: {x for x in g.dom.carriers[c]
                              if g.maps[c][x] in U.parts[c]}
                          for c in self.index.stages}, check=False)

    def exists_along(self, g: PresheafMorphism, S: Subobject) -> Subobject:
        """Left adjoint to g*: the image of S under g."""
        assert S.carrier == g.dom
        return Subobject(g.cod,
                         {c: {g.maps[c][x] for x in S.parts[c]}
                          for c in self.index.stages}, check=False)

    def forall_along(self, g: PresheafMorphism, S: Subobject) -> Subobject:
        """Right adjoint to g*: the largest U <= cod(g) with g*(U) <= S."""
        assert S.carrier == g.dom
        A, B = g.dom, g.cod
        parts = {}
        for c in self.index.stages:
            keep = set()
            for x in B.carriers[c]:
                ok = True
                for u in self.index.arrows_into(c):
                    d = self.index.source(u)
                    xd = B.restrict(u, x)
                    for a in A.carriers[d]:
                        if g.maps[d][a] == xd and a not in S.parts[d]:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    keep.add(x)
            parts[c] = keep
        return Subobject(B, parts, check=False)

    # ------------------------------------------------------------------
    # exponentials and power objects

    def exponential(self, A, B):
        """Returns (E, ev) with E = B^A and ev: E x A -> B.

        E(c) enumerates the natural families y_c x A -> B; an element is a
        sorted tuple of ((arrow u: d -> c, a in A(d)), value in B(d)).
        """
        ck = (A.key(), B.key())
        if ck in self._exp_cache:
            return self._exp_cache[ck]
        carriers = {}
        for c in self.index.stages:
            slots = []
            for u in self.index.arrows_into(c):
                d = self.index.source(u)
                for a in A.carriers[d]:
                    slots.append((u, d, a))
            elems = []
            for choice in itertools.product(
                    *[B.carriers[d] for (_, d, _) in slots]):
                fam = {(u, a): v for (u, _, a), v in zip(slots, choice)}
                if self._natural_family(c, A, B, fam):
                    elems.append(tuple(sorted(fam.items(),
                                              key=lambda kv: ekey(kv[0]))))
            carriers[c] = tuple(elems)
        restr = {}
        for n in self.index.nonidentity_arrows():
            cp, c = self.index.source(n), self.index.target(n)
            out = {}
            for e in carriers[c]:
                fam = dict(e)
                new = {}
                for u in self.index.arrows_into(cp):
                    for a in A.carriers[self.index.source(u)]:
                        new[(u, a)] = fam[(self.index.compose(n, u), a)]
                out[e] = tuple(sorted(new.items(), key=lambda kv: ekey(kv[0])))
            restr[n] = out
        E = PresheafObject(self.index, carriers, restr, check=False)
        P, _, _ = self.product(E, A)
        ev = PresheafMorphism(
            P, B,
            {c: {(e, a): dict(e)[(self.index.identity(c), a)]
                 for (e, a) in P.carriers[c]}
             for c in self.index.stages}, check=False)
        self._exp_cache[ck] = (E, ev)
        return E, ev

    def _natural_family(self, c, A, B, fam):
        for (u, a), v in fam.items():
            d = self.index.source(u)
            for w in self.index.arrows_into(d):
                if self.index.is_identity(w):
                    continue
                if fam[(self.index.compose(u, w), A.restrict(w, a))] != \
                        B.restrict(w, v):
                    return False
        # identity arrows inside arrows_into(d) contribute trivially; also
        # check naturality along identities is automatic.
        return True

    def transpose(self, f: PresheafMorphism, C, A, B) -> PresheafMorphism:
        """Currying: for f: C x A -> B return the unique g: C -> B^A with
        ev o (g x 1) = f.  The domain of f must be product(C, A)."""
        E, _ = self.exponential(A, B)
        maps = {}
        for c in self.index.stages:
            maps[c] = {}
            for x in C.carriers[c]:
                fam = {}
                for u in self.index.arrows_into(c):
                    d = self.index.source(u)
                    xu = C.restrict(u, x) if not self.index.is_identity(u) else x
                    for a in A.carriers[d]:
                        fam[(u, a)] = f.maps[d][(xu, a)]
                maps[c][x] = tuple(sorted(fam.items(), key=lambda kv: ekey(kv[0])))
        return PresheafMorphism(C, E, maps, check=False)

    def power(self, A):
        """Returns (PA, member) with PA = Omega^A and member <= PA x A."""
        PA, ev = self.exponential(A, self.omega())
        member = self.sub_of_char(ev)
        return PA, member

    def one_plus_one(self):
        """Returns (1+1, b: 1+1 -> Omega) with injections ordered (false, true)."""
        one = self.terminal()
        S, _, _ = self.coproduct(one, one)
        b = self.copair(self.false(), self.true())
        return S, b

    # ------------------------------------------------------------------
    # Omega-structure morphisms

    def conjunction(self):
        return self._connective("and")

    def disjunction(self):
        return self._connective("or")

    def implication(self):
        return self._connective("implies")

    def negation(self):
        return self._connective("not")

    def _connective(self, which):
        if which in self._conn_cache:
            return self._conn_cache[which]
        Om = self.omega()
        if which == "not":
            false_sub = Subobject(Om, {c: {frozenset()} for c in self.index.stages},
                                  check=False)
            m = self.char(false_sub)
        else:
            P, _, _ = self.product(Om, Om)
            if which == "and":
                parts = {c: {(self.max_sieve(c), self.max_sieve(c))}
                         for c in self.index.stages}
            elif which == "or":
                parts = {c: {(s, t) for (s, t) in P.carriers[c]
                             if s == self.max_sieve(c) or t == self.max_sieve(c)}
                         for c in self.index.stages}
            else:  # implies: the order subobject s <= t
                parts = {c: {(s, t) for (s, t) in P.carriers[c] if s <= t}
                         for c in self.index.stages}
            m = self.char(Subobject(P, parts, check=False))
        self._conn_cache[which] = m
        return m

    def equality_map(self, D):
        """char of the diagonal of D, as a morphism D x D -> Omega."""
        P, _, _ = self.product(D, D)
        diag = Subobject(P, {c: {(x, x) for x in D.carriers[c]}
                             for c in self.index.stages}, check=False)
        return self.char(diag)

    # ------------------------------------------------------------------
    # hom-set enumeration

    def hom(self, A, B):
        """All natural transformations A -> B, in a deterministic order."""
        ck = (A.key(), B.key())
        if ck in self._hom_cache:
            return self._hom_cache[ck]
        stages = list(self.index.stages)
        per_stage = []
        for c in stages:
            dom = A.carriers[c]
            cod = B.carriers[c]
            if dom and not cod:
                self._hom_cache[ck] = ()
                return ()
            per_stage.append([dict(zip(dom, choice))
                              for choice in itertools.product(cod, repeat=len(dom))])
        out = []
        for combo in itertools.product(*per_stage):
            maps = dict(zip(stages, combo))
            if self._natural(A, B, maps):
                out.append(PresheafMorphism(A, B, maps, check=False))
        out = tuple(sorted(out, key=lambda f: ekey(tuple(
            (c, tuple(sorted(f.maps[c].items(), key=lambda kv: ekey(kv[0]))))
            for c in stages))))
        self._hom_cache[ck] = out
        return out

    def _natural(self, A, B, maps):
        for n in self.index.nonidentity_arrows():
            a, b = self.index.source(n), self.index.target(n)
            for x in A.carriers[b]:
                if maps[a][A.restrict(n, x)] != B.restrict(n, maps[b][x]):
                    return False
        return True

    def global_elements(self, A):
        return self.hom(self.terminal(), A)

    def isos(self, A, B):
        return tuple(f for f in self.hom(A, B) if self.is_iso(f))

    def automorphisms(self, A):
        return self.isos(A, A)

    def subobjects(self, A):
        """All subobjects of A (stage-wise subsets closed under restriction)."""
        stages = list(self.index.stages)
        per_stage = []
        for c in stages:
            elems = A.carriers[c]
            per_stage.append([frozenset(s)
                              for r in range(len(elems) + 1)
                              for s in itertools.combinations(elems, r)])
        out = []
        for combo in itertools.product(*per_stage):
            parts = dict(zip(stages, combo))
            try:
                out.append(Subobject(A, parts))
            except PresheafError:
                continue
        return tuple(out)


def finset_topos():
    return Topos(finset_index(), name="FinSet")


def sierpinski_topos():
    return Topos(sierpinski_index(), name="Sierpinski")
