"""Spans, span composition by pullback, stable classes and the bridge
criterion for stable-class equivalence, plus kernel-pair endospan classes."""

from __future__ import annotations

from .presheaf import PresheafMorphism, compose, identity
from .util import ekey

EQUAL = "proved-equal"
DISTINCT = "proved-distinct-in-universe"
INCONCLUSIVE = "inconclusive-within-universe"


class Span:
    """A pair of morphisms with a common domain (the apex)."""

    def __init__(self, left: PresheafMorphism, right: PresheafMorphism):
        if left.dom != right.dom:
            raise ValueError("span legs must share their domain")
        self.left = left
        self.right = right

    @property
    def apex(self):
        return self.left.dom

    @property
    def domain(self):
        return self.left.cod

    @property
    def codomain(self):
        return self.right.cod

    def key(self):
        return (self.left.key(), self.right.key())

    def __eq__(self, other):
        return isinstance(other, Span) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "Span(%r <- %r -> %r)" % (self.domain, self.apex, self.codomain)


def identity_span(A) -> Span:
    i = identity(A)
    return Span(i, i)


def graph_span(f: PresheafMorphism) -> Span:
    """[1, f]: the embedding of a base morphism as a span."""
    return Span(identity(f.dom), f)


def cograph_span(f: PresheafMorphism) -> Span:
    """[f, 1], from cod(f) to dom(f)."""
    return Span(f, identity(f.dom))


def span_compose(T, fst: Span, snd: Span) -> Span:
    """Composite of fst: A -> B and snd: B -> C by pullback."""
    if fst.codomain != snd.domain:
        raise ValueError("span composition: codomain/domain mismatch")
    _, p1, p2 = T.pullback(fst.right, snd.left)
    return Span(compose(fst.left, p1), compose(snd.right, p2))


def vertically_isomorphic(T, s1: Span, s2: Span) -> bool:
    if (s1.domain, s1.codomain) != (s2.domain, s2.codomain):
        return False
    for phi in T.isos(s1.apex, s2.apex):
        if compose(s2.left, phi) == s1.left and compose(s2.right, phi) == s1.right:
            return True
    return False


def pairing_of(T, s: Span) -> PresheafMorphism:
    return T.pair(s.left, s.right)


class MorphismClass:
    """Base for morphism classes used as stable systems.

    `contains` decides membership; `image_complete` marks classes for which
    equality of relational images decides the span relation outright (the
    epi class has this property via the canonical pullback bridge).
    """

    name = "class"
    image_complete = False

    def __init__(self, T):
        self.T = T

    def contains(self, f: PresheafMorphism) -> bool:
        raise NotImplementedError


class IsoClass(MorphismClass):
    name = "isos"

    def contains(self, f):
        return self.T.is_iso(f)


class EpiClass(MorphismClass):
    name = "epis"
    image_complete = True

    def contains(self, f):
        return self.T.is_epi(f)


class AllClass(MorphismClass):
    name = "all"

    def contains(self, f):
        return True


class ObjectUniverse:
    """A finite, iso-skeletal set of presheaf objects.

    `locate` finds the unique representative isomorphic to a given object,
    together with a witnessing iso, or None when the object falls outside
    the universe.
    """

    def __init__(self, T, objects, depth=0):
        self.T = T
        self.depth = depth
        self.objects = []
        self._loc_cache = {}
        for X in objects:
            self.add(X)

    def add(self, X):
        hit = self.locate(X)
        if hit is not None:
            return hit[0]
        self.objects.append(X)
        self._loc_cache.clear()
        return X

    def locate(self, X):
        ck = X.key()
        if ck in self._loc_cache:
            return self._loc_cache[ck]
        found = None
        sz = X.size()
        for R in self.objects:
            if R.size() != sz:
                continue
            isos = self.T.isos(X, R)
            if isos:
                found = (R, isos[0])
                break
        self._loc_cache[ck] = found
        return found

    def contains(self, X):
        return self.locate(X) is not None

    def __iter__(self):
        return iter(self.objects)


def normalize_span(T, universe: ObjectUniverse, s: Span):
    """Move a span's apex onto its universe representative.

    Returns an equivalent (vertically isomorphic) span with apex a universe
    object, or None when the apex is not isomorphic to any universe object.
    """
    hit = universe.locate(s.apex)
    if hit is None:
        return None
    rep, phi = hit
    inv = T.inverse(phi)
    return Span(compose(s.left, inv), compose(s.right, inv))


def stable_equiv(T, F: MorphismClass, s1: Span, s2: Span,
                 universe: ObjectUniverse) -> str:
    """Decide (s1, s2) equivalence for the stable class F by searching for a
    single bridging object with both comparison legs in F.

    Sound always; complete for the epi class (where the pullback of the two
    pairings is a universal bridge candidate); otherwise complete only
    relative to the universe, with an explicit inconclusive verdict.
    """
    if (s1.domain, s1.codomain) != (s2.domain, s2.codomain):
        raise ValueError("stable_equiv: spans must share domain and codomain")
    if vertically_isomorphic(T, s1, s2):
        return EQUAL
    P, p, q = T.pullback(pairing_of(T, s1), pairing_of(T, s2))
    if F.contains(p) and F.contains(q):
        return EQUAL
    if F.image_complete:
        if T.image_sub(pairing_of(T, s1)) == T.image_sub(pairing_of(T, s2)):
            return EQUAL
        return DISTINCT
    for Pc in [s1.apex, s2.apex] + list(universe.objects):
        for pc in T.hom(Pc, s1.apex):
            if not F.contains(pc):
                continue
            l1 = compose(s1.left, pc)
            r1 = compose(s1.right, pc)
            for qc in T.hom(Pc, s2.apex):
                if not F.contains(qc):
                    continue
                if compose(s2.left, qc) == l1 and compose(s2.right, qc) == r1:
                    return EQUAL
    return INCONCLUSIVE


def kernel_pair(T, f: PresheafMorphism):
    """The pullback of f against itself; returns (P, p1, p2)."""
    return T.pullback(f, f)


def kernel_pair_span(T, f: PresheafMorphism) -> Span:
    _, p1, p2 = kernel_pair(T, f)
    return Span(p1, p2)


class EndospanClass:
    """A finite generating set of endospans; endospans of isos are members
    implicitly (the class is always saturated)."""

    def __init__(self, generators=()):
        self.generators = list(generators)
        for g in self.generators:
            if g.domain != g.codomain:
                raise ValueError("generator is not an endospan")

    def generator_keys(self):
        return sorted({g.key() for g in self.generators}, key=ekey)

    def __repr__(self):
        return "EndospanClass(%d generators)" % len(self.generators)


def epi_endospans(T, universe: ObjectUniverse):
    out = []
    for D in universe.objects:
        for A in universe.objects:
            for e in T.hom(D, A):
                if T.is_epi(e):
                    out.append(Span(e, e))
    return out


def k_class(T, f: PresheafMorphism, universe: ObjectUniverse) -> EndospanClass:
    """K(f): kernel pairs of every right factor of f within the universe,
    together with (e, e) for every epi in the universe."""
    gens = []
    A, B = f.dom, f.cod
    for X in universe.objects:
        for h in T.hom(A, X):
            if any(compose(g, h) == f for g in T.hom(X, B)):
                gens.append(kernel_pair_span(T, h))
    gens.extend(epi_endospans(T, universe))
    return EndospanClass(gens)
