"""The allegory of relations over a concrete finite topos.

A relation A -> B is stored tabulated: a subobject of the binary product
A x B.  Composition is by span composition followed by image factorization,
which stage-wise is ordinary relational composition.  Division is computed
by the quantifier formula (pull the tabulation back along f x 1, apply the
universal quantifier along g x 1) and independently by a brute-force scan
over candidate relations.
"""

from __future__ import annotations

import itertools

from .presheaf import PresheafMorphism, Subobject, compose, identity
from .spans import Span
from .util import esort


class Relation:
    """A tabulated relation: a subobject of dom x cod."""

    def __init__(self, T, dom, cod, tab: Subobject):
        P, _, _ = T.product(dom, cod)
        if tab.carrier != P:
            raise ValueError("tabulation must live in the product")
        self.T = T
        self.dom = dom
        self.cod = cod
        self.tab = tab

    def pairs(self, c):
        return self.tab.parts[c]

    def key(self):
        return (self.dom.key(), self.cod.key(), self.tab.key())

    def __eq__(self, other):
        return isinstance(other, Relation) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "Relation(%r -> %r, %s)" % (
            self.dom, self.cod,
            {c: len(p) for c, p in self.tab.parts.items()})

    def leq(self, other: "Relation") -> bool:
        assert (self.dom, self.cod) == (other.dom, other.cod)
        return self.tab.leq(other.tab)

    def meet(self, other: "Relation") -> "Relation":
        return Relation(self.T, self.dom, self.cod,
                        self.tab.meet(other.tab))

    def join(self, other: "Relation") -> "Relation":
        return Relation(self.T, self.dom, self.cod,
                        self.tab.join(other.tab))

    def converse(self) -> "Relation":
        T = self.T
        P, _, _ = T.product(self.cod, self.dom)
        parts = {c: {(b, a) for (a, b) in self.tab.parts[c]}
                 for c in T.index.stages}
        return Relation(T, self.cod, self.dom,
                        Subobject(P, parts, check=False))


def relation_from_pairs(T, dom, cod, parts):
    P, _, _ = T.product(dom, cod)
    return Relation(T, dom, cod, Subobject(P, parts))


def diagonal_rel(T, A) -> Relation:
    P, _, _ = T.product(A, A)
    parts = {c: {(a, a) for a in A.carriers[c]} for c in T.index.stages}
    return Relation(T, A, A, Subobject(P, parts, check=False))


def full_rel(T, A, B) -> Relation:
    P, _, _ = T.product(A, B)
    parts = {c: set(P.carriers[c]) for c in T.index.stages}
    return Relation(T, A, B, Subobject(P, parts, check=False))


def empty_rel(T, A, B) -> Relation:
    P, _, _ = T.product(A, B)
    return Relation(T, A, B, Subobject(P, {}, check=False))


def graph_rel(T, f: PresheafMorphism) -> Relation:
    P, _, _ = T.product(f.dom, f.cod)
    parts = {c: {(a, f.maps[c][a]) for a in f.dom.carriers[c]}
             for c in T.index.stages}
    return Relation(T, f.dom, f.cod, Subobject(P, parts, check=False))


def rel_of_span(T, s: Span) -> Relation:
    """The image of the pairing: the relation a span presents."""
    return Relation(T, s.domain, s.codomain,
                    T.image_sub(T.pair(s.left, s.right)))


def span_of_rel(r: Relation) -> Span:
    """The tabulating jointly-monic span."""
    T = r.T
    incl = r.tab.inclusion()
    P, p1, p2 = T.product(r.dom, r.cod)
    return Span(compose(p1, incl), compose(p2, incl))


def rel_compose(r: Relation, s: Relation) -> Relation:
    """s after r, for r: A -> B and s: B -> C."""
    if r.cod != s.dom:
        raise ValueError("rel_compose: codomain/domain mismatch")
    T = r.T
    P, _, _ = T.product(r.dom, s.cod)
    parts = {}
    for c in T.index.stages:
        got = set()
        by_b = {}
        for (b, cc) in s.tab.parts[c]:
            by_b.setdefault(b, []).append(cc)
        for (a, b) in r.tab.parts[c]:
            for cc in by_b.get(b, ()):
                got.add((a, cc))
        parts[c] = got
    return Relation(T, r.dom, s.cod, Subobject(P, parts, check=False))


def all_relations(T, A, B):
    """Every relation A -> B, in a deterministic order."""
    P, _, _ = T.product(A, B)
    return tuple(Relation(T, A, B, sub) for sub in T.subobjects(P))


# ----------------------------------------------------------------------
# allegory laws


def modular_law_holds(psi: Relation, phi: Relation, chi: Relation) -> bool:
    """psi.phi ∩ chi <= (psi ∩ chi.phi°).phi for phi: A->B, psi: B->C,
    chi: A->C."""
    lhs = rel_compose(phi, psi).meet(chi)
    rhs = rel_compose(phi, psi.meet(rel_compose(phi.converse(), chi)))
    return lhs.leq(rhs)


# ----------------------------------------------------------------------
# division


def right_division(r: Relation, phi: Relation) -> Relation:
    """The largest X: B -> C with X.phi <= r, for phi: A -> B, r: A -> C.

    Computed by tabulating r as (h, k) and phi as (f, g), pulling the
    tabulation subobject back along f x 1 and applying the universal
    quantifier along g x 1."""
    if r.dom != phi.dom:
        raise ValueError("right_division: relations must share their domain")
    T = r.T
    sphi = span_of_rel(phi)
    f, g = sphi.left, sphi.right
    one_c = identity(r.cod)
    fx1 = T.cross(f, one_c)    # Dphi x C -> A x C
    gx1 = T.cross(g, one_c)    # Dphi x C -> B x C
    pulled = T.pullback_sub(fx1, r.tab)
    a = T.forall_along(gx1, pulled)
    return Relation(T, phi.cod, r.cod, a)


def left_division(d: Relation, psi: Relation) -> Relation:
    """The largest X with d.X <= psi, for d: B -> A, psi: C -> A; the
    result has type C -> B, by conjugation with the converse."""
    return right_division(psi.converse(), d.converse()).converse()


def symmetric_division(phi: Relation, psi: Relation) -> Relation:
    """(phi \\ psi) ∩ (psi \\ phi)° for phi, psi with common codomain."""
    return left_division(phi, psi).meet(left_division(psi, phi).converse())


def right_division_oracle(r: Relation, phi: Relation) -> Relation:
    """Brute force: the union of every X with X.phi <= r."""
    T = r.T
    out = empty_rel(T, phi.cod, r.cod)
    for X in all_relations(T, phi.cod, r.cod):
        if rel_compose(phi, X).leq(r):
            out = out.join(X)
    return out


def division_adjunction_holds(r: Relation, phi: Relation) -> bool:
    """X.phi <= r  <=>  X <= r/phi, over every candidate X."""
    div = right_division(r, phi)
    T = r.T
    for X in all_relations(T, phi.cod, r.cod):
        if rel_compose(phi, X).leq(r) != X.leq(div):
            return False
    return True


# ----------------------------------------------------------------------
# power allegory


def membership(T, A) -> Relation:
    """The membership relation PA -> A, tabulated by the evaluation
    subobject."""
    PA, member = T.power(A)
    return Relation(T, PA, A, member)


def power_laws_check(T, A, phi: Relation = None):
    """The two power-allegory laws; `phi` ranges over all relations B -> A
    when a single relation is not supplied (with B = A)."""
    mem = membership(T, A)
    PA = mem.dom
    law1 = symmetric_division(mem, mem) == diagonal_rel(T, PA)
    phis = [phi] if phi is not None else list(all_relations(T, A, A))
    law2 = True
    for p in phis:
        lhs = rel_compose(left_division(mem, p), left_division(p, mem))
        if not diagonal_rel(T, p.dom).leq(lhs):
            law2 = False
            break
    return law1, law2


# ----------------------------------------------------------------------
# maps


def is_map(r: Relation) -> bool:
    """Total and single-valued: Delta <= r°r and r.r° <= Delta."""
    total = diagonal_rel(r.T, r.dom).leq(rel_compose(r, r.converse()))
    single = rel_compose(r.converse(), r).leq(diagonal_rel(r.T, r.cod))
    return total and single


def ungraph(r: Relation) -> PresheafMorphism:
    """Recover the underlying morphism of a map relation."""
    if not is_map(r):
        raise ValueError("relation is not a map")
    T = r.T
    maps = {c: {a: b for (a, b) in r.tab.parts[c]}
            for c in T.index.stages}
    return PresheafMorphism(r.dom, r.cod, maps, check=False)


def maps_between(T, A, B):
    """All map relations A -> B, in a deterministic order."""
    return tuple(r for r in all_relations(T, A, B) if is_map(r))
