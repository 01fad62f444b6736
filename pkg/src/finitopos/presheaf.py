"""Presheaves on a finite index category, their morphisms and subobjects.

All carriers are explicit enumerated tuples with stable ordering; equality
of objects and morphisms is extensional stage-wise equality, so every
categorical equation is a decidable assertion.
"""

from __future__ import annotations

from .indexcat import IndexCategory
from .util import ekey, esort, mapping_key


class PresheafError(ValueError):
    pass


class PresheafObject:
    """A functor from a finite index category to finite sets.

    `carriers` maps each stage to a tuple of elements; `restr` maps each
    non-identity arrow u: a -> b to the restriction function X(b) -> X(a),
    stored as a dict.
    """

    def __init__(self, index: IndexCategory, carriers, restr=None, check=True):
        self.index = index
        self.carriers = {c: tuple(carriers[c]) for c in index.stages}
        self.restr = {}
        restr = restr or {}
        for name in index.nonidentity_arrows():
            self.restr[name] = dict(restr.get(name, {}))
        if check:
            self._validate()
        self._key = None

    def _validate(self):
        for c, elems in self.carriers.items():
            if len(set(elems)) != len(elems):
                raise PresheafError("duplicate elements at stage %r" % c)
        for name in self.index.nonidentity_arrows():
            a = self.index.source(name)
            b = self.index.target(name)
            f = self.restr[name]
            if set(f) != set(self.carriers[b]):
                raise PresheafError("restriction along %r not total" % name)
            for x, y in f.items():
                if y not in set(self.carriers[a]):
                    raise PresheafError("restriction along %r leaves carrier" % name)
        # functoriality on composable pairs: X(g.f) = X(f) o X(g)
        for g in self.index.nonidentity_arrows():
            for f in self.index.nonidentity_arrows():
                if self.index.target(f) == self.index.source(g):
                    h = self.index.compose(g, f)
                    for x in self.carriers[self.index.target(g)]:
                        if self.restrict(h, x) != self.restrict(f, self.restrict(g, x)):
                            raise PresheafError(
                                "restriction not functorial along %r.%r" % (g, f))

    def restrict(self, arrow, elem):
        """Apply X(arrow): X(cod) -> X(src) to elem."""
        if self.index.is_identity(arrow):
            return elem
        return self.restr[arrow][elem]

    def stage(self, c):
        return self.carriers[c]

    def is_empty(self):
        return all(not v for v in self.carriers.values())

    def size(self):
        return {c: len(v) for c, v in self.carriers.items()}

    def key(self):
        if self._key is None:
            self._key = (
                tuple((c, self.carriers[c]) for c in self.index.stages),
                tuple((n, mapping_key(self.restr[n]))
                      for n in sorted(self.restr)),
            )
        return self._key

    def __eq__(self, other):
        return (isinstance(other, PresheafObject)
                and self.index == other.index and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "PresheafObject(%s)" % (
            ", ".join("%s:%d" % (c, len(self.carriers[c]))
                      for c in self.index.stages))


class PresheafMorphism:
    """A stage-indexed family of functions satisfying naturality."""

    def __init__(self, dom: PresheafObject, cod: PresheafObject, maps, check=True):
        if dom.index != cod.index:
            raise PresheafError("morphism across different index categories")
        self.index = dom.index
        self.dom = dom
        self.cod = cod
        self.maps = {c: dict(maps[c]) for c in self.index.stages}
        if check:
            self._validate()
        self._key = None

    def _validate(self):
        for c in self.index.stages:
            f = self.maps[c]
            if set(f) != set(self.dom.carriers[c]):
                raise PresheafError("component at %r not total" % c)
            codset = set(self.cod.carriers[c])
            for v in f.values():
                if v not in codset:
                    raise PresheafError("component at %r leaves codomain" % c)
        for name in self.index.nonidentity_arrows():
            a = self.index.source(name)
            b = self.index.target(name)
            for x in self.dom.carriers[b]:
                if self.maps[a][self.dom.restrict(name, x)] != \
                        self.cod.restrict(name, self.maps[b][x]):
                    raise PresheafError("naturality fails along %r" % name)

    def __call__(self, c, x):
        return self.maps[c][x]

    def key(self):
        if self._key is None:
            self._key = (self.dom.key(), self.cod.key(),
                         tuple((c, mapping_key(self.maps[c]))
                               for c in self.index.stages))
        return self._key

    def __eq__(self, other):
        return isinstance(other, PresheafMorphism) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "PresheafMorphism(%r -> %r)" % (self.dom, self.cod)


def identity(A: PresheafObject) -> PresheafMorphism:
    return PresheafMorphism(A, A, {c: {x: x for x in A.carriers[c]}
                                   for c in A.index.stages}, check=False)


def compose(f: PresheafMorphism, g: PresheafMorphism) -> PresheafMorphism:
    """f o g, defined when codomain(g) = domain(f)."""
    if g.cod != f.dom:
        raise PresheafError("compose: codomain/domain mismatch")
    return PresheafMorphism(
        g.dom, f.cod,
        {c: {x: f.maps[c][g.maps[c][x]] for x in g.dom.carriers[c]}
         for c in g.index.stages},
        check=False)


class Subobject:
    """Stage-wise subsets of a carrier, closed under restriction."""

    def __init__(self, carrier: PresheafObject, parts, check=True):
        self.carrier = carrier
        self.index = carrier.index
        self.parts = {c: frozenset(parts.get(c, ())) for c in self.index.stages}
        if check:
            self._validate()
        self._key = None

    def _validate(self):
        for c in self.index.stages:
            if not self.parts[c] <= set(self.carrier.carriers[c]):
                raise PresheafError("subobject leaves carrier at %r" % c)
        for name in self.index.nonidentity_arrows():
            b = self.index.target(name)
            for x in self.parts[b]:
                if self.carrier.restrict(name, x) not in self.parts[self.index.source(name)]:
                    raise PresheafError("subobject not closed along %r" % name)

    def contains(self, c, x):
        return x in self.parts[c]

    def leq(self, other: "Subobject") -> bool:
        assert self.carrier == other.carrier
        return all(self.parts[c] <= other.parts[c] for c in self.index.stages)

    def meet(self, other: "Subobject") -> "Subobject":
        assert self.carrier == other.carrier
        return Subobject(self.carrier,
                         {c: self.parts[c] & other.parts[c] for c in self.index.stages},
                         check=False)

    def join(self, other: "Subobject") -> "Subobject":
        assert self.carrier == other.carrier
        return Subobject(self.carrier,
                         {c: self.parts[c] | other.parts[c] for c in self.index.stages},
                         check=False)

    def as_object(self) -> PresheafObject:
        return PresheafObject(
            self.index,
            {c: esort(self.parts[c]) for c in self.index.stages},
            {n: {x: self.carrier.restrict(n, x)
                 for x in self.parts[self.index.target(n)]}
             for n in self.index.nonidentity_arrows()},
            check=False)

    def inclusion(self) -> PresheafMorphism:
        D = self.as_object()
        return PresheafMorphism(D, self.carrier,
                                {c: {x: x for x in D.carriers[c]}
                                 for c in self.index.stages},
                                check=False)

    def is_full(self):
        return all(len(self.parts[c]) == len(self.carrier.carriers[c])
                   for c in self.index.stages)

    def key(self):
        if self._key is None:
            self._key = (self.carrier.key(),
                         tuple((c, esort(self.parts[c])) for c in self.index.stages))
        return self._key

    def __eq__(self, other):
        return isinstance(other, Subobject) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "Subobject(%s)" % ", ".join(
            "%s:%d/%d" % (c, len(self.parts[c]), len(self.carrier.carriers[c]))
            for c in self.index.stages)


def full_subobject(A: PresheafObject) -> Subobject:
    return Subobject(A, {c: A.carriers[c] for c in A.index.stages}, check=False)


def empty_subobject(A: PresheafObject) -> Subobject:
    return Subobject(A, {}, check=False)
