"""Adjoining indeterminate arrows 1 -> A by projection-class span quotients.

A morphism of the quotient category is kept as a `ClassTerm`: a finite
tuple of coordinate objects (the adjoined indeterminate types actually in
use) together with a concrete core morphism X1 x ... x Xk x B -> C whose
left leg is the implicit projection onto B.  Class equality is decided by
dropping coordinates the core does not depend on and comparing cores up to
a type-preserving permutation of the remaining coordinates; with a single
coordinate type this is exactly the quotient by the projection class, and
with the family of all adjoined types it realizes the colimit presentation
of the full projection quotient.
"""

from __future__ import annotations

import itertools

from .presheaf import PresheafError, PresheafMorphism, compose, identity
from .util import ekey


def _is_empty(X):
    return X.is_empty()


class ClassTerm:
    """A span class [p, f] with p a projection, in canonical-ready form."""

    def __init__(self, cat: "IndeterminateCategory", dom, cod, coords, core):
        self.cat = cat
        self.T = cat.T
        self.dom = dom
        self.cod = cod
        self.coords = tuple(coords)
        self.core = core
        self._canon = None
        self._ckey = None

    def apex(self):
        return self.core.dom

    # -- canonical form -------------------------------------------------

    def canonical(self) -> "ClassTerm":
        """Drop every coordinate the core does not depend on."""
        if self._canon is not None:
            return self._canon
        t = self
        changed = True
        while changed:
            changed = False
            for i in range(len(t.coords)):
                reduced = t._try_drop(i)
                if reduced is not None:
                    t = reduced
                    changed = True
                    break
        self._canon = t
        t._canon = t
        return t

    def _try_drop(self, i):
        """Factor the core through the projection dropping coordinate i,
        if possible."""
        T = self.T
        Xi = self.coords[i]
        new_coords = self.coords[:i] + self.coords[i + 1:]
        apex2, _ = T.product_list(list(new_coords) + [self.dom])
        maps = {}
        for c in T.index.stages:
            maps[c] = {}
            vals = Xi.carriers[c]
            for u in apex2.carriers[c]:
                if not vals:
                    if apex2.carriers[c]:
                        return None  # partially empty coordinate: keep it
                    continue
                images = {self.core.maps[c][u[:i] + (x,) + u[i:]] for x in vals}
                if len(images) != 1:
                    return None
                maps[c][u] = next(iter(images))
        try:
            g = PresheafMorphism(apex2, self.cod, maps)
        except PresheafError:
            return None
        return ClassTerm(self.cat, self.dom, self.cod, new_coords, g)

    def collapsed(self) -> bool:
        """True when every same-typed class is identified (a bridge with an
        all-stages-empty apex exists)."""
        return (self.cat.has_empty_base or _is_empty(self.dom)
                or any(_is_empty(X) for X in self.coords))

    def _permuted(self, order):
        """Reorder coordinates; order[j] is the old index at new slot j."""
        T = self.T
        new_coords = tuple(self.coords[o] for o in order)
        apex2, _ = T.product_list(list(new_coords) + [self.dom])
        inv = {o: j for j, o in enumerate(order)}
        k = len(order)
        maps = {c: {u: self.core.maps[c][
            tuple(u[inv[i]] for i in range(k)) + (u[k],)]
            for u in apex2.carriers[c]} for c in T.index.stages}
        core = PresheafMorphism(apex2, self.cod, maps, check=False)
        return ClassTerm(self.cat, self.dom, self.cod, new_coords, core)

    def canonical_key(self):
        if self._ckey is not None:
            return self._ckey
        if self.collapsed():
            self._ckey = ("collapsed", self.dom.key(), self.cod.key())
            return self._ckey
        t = self.canonical()
        best = None
        for order in _type_preserving_orders(t.coords):
            cand = t._permuted(order)
            key = (tuple(X.key() for X in cand.coords), cand.core.key())
            if best is None or ekey(key) < ekey(best):
                best = key
        self._ckey = ("term", best if best is not None
                      else ((), t.core.key()))
        return self._ckey

    def class_equal(self, other: "ClassTerm") -> bool:
        if (self.dom, self.cod) != (other.dom, other.cod):
            return False
        if self.collapsed() and other.collapsed():
            return True
        return self.canonical_key() == other.canonical_key()

    def __repr__(self):
        return "ClassTerm(%r -> %r, %d coords)" % (
            self.dom, self.cod, len(self.coords))


def _type_preserving_orders(coords):
    """All coordinate orderings that permute equal-typed coordinates,
    after grouping coordinates by type key."""
    keys = [X.key() for X in coords]
    groups = {}
    for i, k in enumerate(keys):
        groups.setdefault(ekey(k), []).append(i)
    group_items = sorted(groups.items())
    for perms in itertools.product(
            *[itertools.permutations(idx) for _, idx in group_items]):
        order = [i for perm in perms for i in perm]
        yield order


class IndeterminateCategory:
    """The quotient span category over a family of adjoined types.

    With `bases = (A,)` this is C[x]; with `bases = (A, B)` the hereditary
    composite; with all objects of interest it plays the role of the full
    projection quotient.
    """

    def __init__(self, T, bases):
        self.T = T
        self.bases = tuple(bases)
        self.has_empty_base = any(_is_empty(X) for X in self.bases)

    # -- constructors ---------------------------------------------------

    def term(self, dom, cod, coords, core) -> ClassTerm:
        expected, _ = self.T.product_list(list(coords) + [dom])
        if core.dom != expected or core.cod != cod:
            raise ValueError("core morphism badly typed for its coordinates")
        return ClassTerm(self, dom, cod, coords, core)

    def embed(self, f: PresheafMorphism) -> ClassTerm:
        apex, _ = self.T.product_list([f.dom])
        core = PresheafMorphism(
            apex, f.cod,
            {c: {(x,): f.maps[c][x] for x in f.dom.carriers[c]}
             for c in self.T.index.stages}, check=False)
        return ClassTerm(self, f.dom, f.cod, (), core)

    def identity(self, A) -> ClassTerm:
        return self.embed(identity(A))

    def the_x(self, A=None) -> ClassTerm:
        """The adjoined indeterminate [!_A, 1_A]: 1 -> A."""
        A = A if A is not None else self.bases[0]
        one = self.T.terminal()
        apex, _ = self.T.product_list([A, one])
        core = PresheafMorphism(
            apex, A, {c: {t: t[0] for t in apex.carriers[c]}
                      for c in self.T.index.stages}, check=False)
        return ClassTerm(self, one, A, (A,), core)

    def x_power(self, n, A=None) -> ClassTerm:
        """x^n: 1 -> A^n, with A^n the flat n-fold product."""
        A = A if A is not None else self.bases[0]
        one = self.T.terminal()
        An, _ = self.T.product_list([A] * n)
        apex, _ = self.T.product_list([A] * n + [one])
        core = PresheafMorphism(
            apex, An, {c: {t: t[:n] for t in apex.carriers[c]}
                       for c in self.T.index.stages}, check=False)
        return ClassTerm(self, one, An, (A,) * n, core)

    # -- categorical structure ------------------------------------------

    def compose(self, snd: ClassTerm, fst: ClassTerm) -> ClassTerm:
        """snd o fst for fst: B -> C, snd: C -> D."""
        if fst.cod != snd.dom:
            raise ValueError("compose: codomain/domain mismatch")
        coords = snd.coords + fst.coords
        n2, n1 = len(snd.coords), len(fst.coords)
        apex, _ = self.T.product_list(list(coords) + [fst.dom])
        maps = {}
        for c in self.T.index.stages:
            maps[c] = {}
            for u in apex.carriers[c]:
                mid = fst.core.maps[c][u[n2:n2 + n1] + (u[-1],)]
                maps[c][u] = snd.core.maps[c][u[:n2] + (mid,)]
        core = PresheafMorphism(apex, snd.cod, maps, check=False)
        return ClassTerm(self, fst.dom, snd.cod, coords, core)

    def pair(self, u: ClassTerm, v: ClassTerm) -> ClassTerm:
        """Mediating class into the binary product of the codomains."""
        if u.dom != v.dom:
            raise ValueError("pair: domain mismatch")
        P, _, _ = self.T.product(u.cod, v.cod)
        coords = u.coords + v.coords
        nu = len(u.coords)
        apex, _ = self.T.product_list(list(coords) + [u.dom])
        maps = {c: {t: (u.core.maps[c][t[:nu] + (t[-1],)],
                        v.core.maps[c][t[nu:]])
                    for t in apex.carriers[c]}
                for c in self.T.index.stages}
        core = PresheafMorphism(apex, P, maps, check=False)
        return ClassTerm(self, u.dom, P, coords, core)

    def proj1(self, B, C):
        _, p1, _ = self.T.product(B, C)
        return self.embed(p1)

    def proj2(self, B, C):
        _, _, p2 = self.T.product(B, C)
        return self.embed(p2)

    def cross(self, u: ClassTerm, v: ClassTerm) -> ClassTerm:
        """u x v between binary products of domains and codomains."""
        p1 = self.proj1(u.dom, v.dom)
        p2 = self.proj2(u.dom, v.dom)
        return self.pair(self.compose(u, p1), self.compose(v, p2))

    def is_faithful_here(self) -> bool:
        """The embedding f -> [1, f] is faithful iff no adjoined type is
        empty (equivalently hom(1, A) is nonempty for concrete carriers)."""
        return not self.has_empty_base

    # -- cartesian closure ----------------------------------------------

    def ev_class(self, A, B) -> ClassTerm:
        _, ev = self.T.exponential(A, B)
        return self.embed(ev)

    def curry(self, t: ClassTerm, C, A, B) -> ClassTerm:
        """For t: C x A -> B (binary product domain) return the exponential
        transpose class C -> B^A with the same coordinates."""
        T = self.T
        coords = t.coords
        Cfull, _ = T.product_list(list(coords) + [C])
        PCA, _, _ = T.product(Cfull, A)
        maps = {c: {((u, a)): t.core.maps[c][u[:-1] + ((u[-1], a),)]
                    for (u, a) in PCA.carriers[c]}
                for c in T.index.stages}
        f2 = PresheafMorphism(PCA, B, maps, check=False)
        g = T.transpose(f2, Cfull, A, B)
        E, _ = T.exponential(A, B)
        return ClassTerm(self, C, E, coords, g)

    # -- enumeration ----------------------------------------------------

    def enumerate_classes(self, dom, cod, max_per_base):
        """All classes dom -> cod whose canonical form uses at most
        max_per_base coordinates of each base type.  Complete for that
        coordinate budget."""
        seen = {}
        base_lists = [[X] * max_per_base for X in self.bases]
        flat = [X for lst in base_lists for X in lst]
        for r in range(len(flat) + 1):
            for combo in set(itertools.combinations(range(len(flat)), r)):
                coords = tuple(flat[i] for i in combo)
                key_multi = tuple(sorted(ekey(X.key()) for X in coords))
                if ("m", key_multi, r) in seen.get("_shapes", set()):
                    continue
                seen.setdefault("_shapes", set()).add(("m", key_multi, r))
                apex, _ = self.T.product_list(list(coords) + [dom])
                for core in self.T.hom(apex, cod):
                    t = ClassTerm(self, dom, cod, coords, core)
                    k = t.canonical_key()
                    if k not in seen:
                        seen[k] = t
        seen.pop("_shapes", None)
        return list(seen.values())


# ----------------------------------------------------------------------
# functors out of C[x]


class Functor:
    """A concrete functor between presheaf toposes, given by callables."""

    def __init__(self, source, target, obj_map, mor_map, name="F"):
        self.source = source
        self.target = target
        self._obj = obj_map
        self._mor = mor_map
        self.name = name

    def obj(self, X):
        return self._obj(X)

    def mor(self, f):
        return self._mor(f)


def identity_functor(T):
    return Functor(T, T, lambda X: X, lambda f: f, name="Id")


def product_comparison(Tt, factors, F_apex, F_projs):
    """The mediating morphism prod(factors) -> F_apex determined by the
    images of the projections; it is an iso exactly when the functor
    preserves the product."""
    P, projs = Tt.product_list(factors)
    maps = {}
    for c in Tt.index.stages:
        maps[c] = {}
        for u in P.carriers[c]:
            hits = [z for z in F_apex.carriers[c]
                    if all(Fp.maps[c][z] == u[i]
                           for i, Fp in enumerate(F_projs))]
            if len(hits) != 1:
                raise ValueError("functor does not preserve this product")
            maps[c][u] = hits[0]
    return PresheafMorphism(P, F_apex, maps, check=False)


def extend_functor(cat: IndeterminateCategory, F: Functor, a: PresheafMorphism):
    """The unique functor C[x] -> target with x -> a extending F.

    `a` must be a morphism 1 -> F(A) in the target topos; the returned
    callable sends a ClassTerm [p, f] to F(f) o (a^n x 1)."""
    Tt = F.target
    A = cat.bases[0]
    one_t = Tt.terminal()
    if a.cod != F.obj(A) or a.dom.size() != one_t.size():
        raise ValueError("extension point badly typed")

    def apply(t: ClassTerm):
        if any(X != A for X in t.coords):
            raise ValueError("term uses coordinates outside the adjoined type")
        n = len(t.coords)
        FB = F.obj(t.dom)
        Fcore = F.mor(t.core)
        _, src_projs = cat.T.product_list(list(t.coords) + [t.dom])
        F_projs = [F.mor(p) for p in src_projs]
        cmp = product_comparison(Tt, [F.obj(A)] * n + [FB],
                                 Fcore.dom, F_projs)
        P, projs = Tt.product_list([F.obj(A)] * n + [FB])
        aval = {c: a.maps[c][next(iter(a.dom.carriers[c]))]
                for c in Tt.index.stages if a.dom.carriers[c]}
        # a^n x 1: FB -> F(A)^n x FB
        maps = {c: {y: (aval[c],) * n + (y,) for y in FB.carriers[c]}
                for c in Tt.index.stages}
        pad = PresheafMorphism(FB, P, maps, check=False)
        return compose(Fcore, compose(cmp, pad))

    return apply


# ----------------------------------------------------------------------
# hereditary composition and colimit checks


def hereditary_check(T, A, B, C, D, k_inner=1, m_outer=1):
    """Adjoining x: 1 -> A and then y: 1 -> B agrees with adjoining both
    at once: the iterated two-step quotient of hom(C, D) has exactly as
    many classes as the flat two-type quotient, within the given
    coordinate budgets.  Returns (flat_count, two_step_count)."""
    CA = IndeterminateCategory(T, (A,))
    CAB = IndeterminateCategory(T, (A, B))
    budget = max(k_inner, m_outer)
    flat = CAB.enumerate_classes(C, D, budget)

    def bdom(m):
        P, _ = T.product_list([B] * m + [C])
        return P

    def sel_proj(M, m, sel):
        src, dst = bdom(M), bdom(m)
        maps = {c: {t: tuple(t[sel[i]] for i in range(m)) + (t[-1],)
                    for t in src.carriers[c]} for c in T.index.stages}
        return PresheafMorphism(src, dst, maps, check=False)

    outer = [(m, g) for m in range(m_outer + 1)
             for g in CA.enumerate_classes(bdom(m), D, k_inner)]

    # a single bridge with projection legs decides outer equality, and its
    # apex needs at most m1 + m2 adjoined coordinates; precompute, per
    # bridge width M, the canonical keys of every projected composite
    keysets = []
    for m, g in outer:
        per_M = {}
        for M in range(m, 2 * m_outer + 1):
            ks = set()
            for sel in itertools.permutations(range(M), m):
                c = CA.compose(g, CA.embed(sel_proj(M, m, sel)))
                ks.add(c.canonical_key())
            per_M[M] = ks
        keysets.append(per_M)

    def outer_equal(i, j):
        (m1, _), (m2, _) = outer[i], outer[j]
        for M in range(max(m1, m2), m1 + m2 + 1):
            if keysets[i][M] & keysets[j][M]:
                return True
        return False

    parent = list(range(len(outer)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(outer)):
        for j in range(i + 1, len(outer)):
            if find(i) != find(j) and outer_equal(i, j):
                parent[find(j)] = find(i)
    two_step = len({find(i) for i in range(len(outer))})
    return len(flat), two_step


def colimit_check(T, bases, dom, cod, budget=1):
    """The full multi-type quotient is the colimit of the finite-family
    stages: inclusions preserve and reflect class equality on the budgeted
    classes, every full-family class comes from some finite stage, and the
    mediating assignment is forced by the inclusions.  Returns a dict of
    booleans."""
    full = IndeterminateCategory(T, tuple(bases))
    stages = [IndeterminateCategory(T, tuple(bases[:i + 1]))
              for i in range(len(bases))]
    consistent = True
    for st in stages:
        terms = st.enumerate_classes(dom, cod, budget)
        for i, t1 in enumerate(terms):
            for t2 in terms[i + 1:]:
                lift1 = ClassTerm(full, t1.dom, t1.cod, t1.coords, t1.core)
                lift2 = ClassTerm(full, t2.dom, t2.cod, t2.coords, t2.core)
                if t1.class_equal(t2) != lift1.class_equal(lift2):
                    consistent = False
    covered = True
    full_terms = full.enumerate_classes(dom, cod, budget)
    stage_keys = set()
    for st in stages:
        for t in st.enumerate_classes(dom, cod, budget):
            lift = ClassTerm(full, t.dom, t.cod, t.coords, t.core)
            stage_keys.add(lift.canonical_key())
    for t in full_terms:
        if t.canonical_key() not in stage_keys:
            covered = False
    return {"inclusions_consistent": consistent,
            "every_class_from_a_stage": covered,
            "mediating_forced": consistent and covered}


# ----------------------------------------------------------------------
# projection-class membership (for stable-class spot checks)


def is_projection(T, f: PresheafMorphism, base, max_power=2) -> bool:
    """Whether f is (up to iso of its domain) a projection
    base^n x cod(f) -> cod(f) for some n <= max_power."""
    for n in range(max_power + 1):
        P, projs = T.product_list([base] * n + [f.cod])
        if P.size() != f.dom.size():
            continue
        last = projs[-1]
        for phi in T.isos(P, f.dom):
            if compose(f, phi) == last:
                return True
    return False
