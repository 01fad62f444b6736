"""Finite index categories: the base shapes presheaves are taken over."""

from __future__ import annotations


class IndexCategoryError(ValueError):
    pass


class IndexCategory:
    """A finite category given by stage names, named arrows and a
    composition table.

    Identity arrows are implicit and named ``id_<stage>``; they never appear
    in the stored arrow list.  The composition table only covers pairs of
    non-identity arrows and must be total on composable pairs.
    """

    def __init__(self, stages, arrows=(), compositions=()):
        self.stages = tuple(stages)
        if len(set(self.stages)) != len(self.stages):
            raise IndexCategoryError("duplicate stage names")
        self.arrows = {}  # name -> (src, dst), non-identity only
        for src, dst, name in arrows:
            if src not in self.stages or dst not in self.stages:
                raise IndexCategoryError("arrow %r has unknown stage" % name)
            if name in self.arrows or name in self.stages:
                raise IndexCategoryError("arrow name %r reused" % name)
            self.arrows[name] = (src, dst)
        self.table = {}  # (g, f) -> h  for g.f with f:a->b, g:b->c
        for g, f, h in compositions:
            for n in (g, f, h):
                if n not in self.arrows:
                    raise IndexCategoryError("unknown arrow %r in composition" % n)
            self.table[(g, f)] = h
        self._validate()
        self._arrows_into = {}
        for c in self.stages:
            ins = [self.identity(c)]
            ins += [n for n, (_, d) in self.arrows.items() if d == c]
            self._arrows_into[c] = tuple(ins)

    def identity(self, stage):
        return "id_" + stage

    def is_identity(self, name):
        return name.startswith("id_") and name[3:] in self.stages

    def source(self, name):
        if self.is_identity(name):
            return name[3:]
        return self.arrows[name][0]

    def target(self, name):
        if self.is_identity(name):
            return name[3:]
        return self.arrows[name][1]

    def compose(self, g, f):
        """g.f with f: a -> b and g: b -> c."""
        if self.target(f) != self.source(g):
            raise IndexCategoryError("arrows %r.%r not composable" % (g, f))
        if self.is_identity(f):
            return g
        if self.is_identity(g):
            return f
        try:
            return self.table[(g, f)]
        except KeyError:
            raise IndexCategoryError("composition %r.%r missing" % (g, f))

    def arrows_into(self, stage):
        """All arrows (identity included) with the given codomain."""
        return self._arrows_into[stage]

    def all_arrows(self):
        return tuple(self.identity(c) for c in self.stages) + tuple(self.arrows)

    def nonidentity_arrows(self):
        return tuple(self.arrows)

    def _validate(self):
        names = list(self.arrows)
        for g in names:
            for f in names:
                if self.target(f) == self.source(g) and (g, f) not in self.table:
                    raise IndexCategoryError("composition %r.%r missing" % (g, f))
        for (g, f), h in self.table.items():
            if self.target(f) != self.source(g):
                raise IndexCategoryError("table entry %r.%r not composable" % (g, f))
            if (self.source(h), self.target(h)) != (self.source(f), self.target(g)):
                raise IndexCategoryError("table entry %r.%r=%r badly typed" % (g, f, h))
        for f in names:
            for g in names:
                for h in names:
                    if self.target(f) == self.source(g) and self.target(g) == self.source(h):
                        left = self.compose(self.compose(h, g), f)
                        right = self.compose(h, self.compose(g, f))
                        if left != right:
                            raise IndexCategoryError(
                                "composition not associative at (%r,%r,%r)" % (h, g, f))

    def key(self):
        return (self.stages, tuple(sorted(self.arrows.items())),
                tuple(sorted(self.table.items())))

    def __eq__(self, other):
        return isinstance(other, IndexCategory) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "IndexCategory(stages=%r, arrows=%r)" % (self.stages, self.arrows)


def finset_index():
    """The one-stage index; presheaves over it are plain finite sets."""
    return IndexCategory(["*"])


def sierpinski_index():
    """The two-element chain 0 <= 1 with the single arrow u: 0 -> 1."""
    return IndexCategory(["0", "1"], arrows=[("0", "1", "u")])
