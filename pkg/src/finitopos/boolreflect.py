"""Logical morphism classes, Booleanization, and reflection checks.

A logical class is a morphism class containing every epi and iso, closed
under composition, pullback, M-parts and the universal-image rule; the
least logical class containing b: 1+1 -> Omega generates a span congruence
whose category of maps is a boolean topos.  All closures here are computed
as least fixpoints within a finite object universe, with an explicit flag
when a construction leaves it.
"""

from __future__ import annotations

import itertools

from .congruence import CongruenceTable
from .indet import Functor, product_comparison
from .presheaf import PresheafMorphism, Subobject, compose, identity
from .rel import (Relation, all_relations, diagonal_rel, graph_rel,
                  rel_compose, rel_of_span, span_of_rel, ungraph)
from .spans import (EQUAL, EndospanClass, MorphismClass, ObjectUniverse,
                    Span, cograph_span, graph_span, identity_span,
                    k_class, kernel_pair_span, span_compose, stable_equiv,
                    vertically_isomorphic)
from .topos import STAR
from .util import ekey


# ----------------------------------------------------------------------
# logical classes


class LogicalClass(MorphismClass):
    """A saturated morphism class within a universe.

    Membership of a universe morphism is by key lookup; isos and epis are
    members regardless.  `only_epis` records that the closure added no
    non-epi member, in which case span equivalence is decided by images.
    """

    name = "logical"

    def __init__(self, T, universe, member_keys, depth, lossy):
        super().__init__(T)
        self.universe = universe
        self.member_keys = frozenset(member_keys)
        self.depth = depth
        self.lossy = lossy
        self.only_epis = None  # filled by logical_closure

    def contains(self, f: PresheafMorphism) -> bool:
        if self.T.is_epi(f) or self.T.is_iso(f):
            return True
        if f.key() in self.member_keys:
            return True
        # normalize endpoints onto universe representatives
        hd = self.universe.locate(f.dom)
        hc = self.universe.locate(f.cod)
        if hd is None or hc is None:
            return False
        (rd, pd), (rc, pc) = hd, hc
        g = compose(compose(pc, f), self.T.inverse(pd))
        return g.key() in self.member_keys

    def members(self):
        return sorted(self.member_keys, key=ekey)


def _universe_homs(T, U):
    out = {}
    for A in U.objects:
        for B in U.objects:
            for f in T.hom(A, B):
                out[f.key()] = f
    return out


def logical_closure(T, seed, U: ObjectUniverse, max_rounds=20) -> LogicalClass:
    """Least fixpoint over universe morphisms of the four closure rules."""
    homs = _universe_homs(T, U)
    W = set()
    for f in homs.values():
        if T.is_epi(f) or T.is_iso(f):
            W.add(f.key())
    lossy = False
    for s in seed:
        k = _normalize_mor(T, U, s)
        if k is None:
            lossy = True
        else:
            W.add(k)

    monos = {k: f for k, f in homs.items() if T.is_mono(f)}
    rounds = 0
    changed = True
    while changed and rounds < max_rounds:
        changed = False
        rounds += 1
        current = [homs[k] for k in sorted(W, key=ekey) if k in homs]
        # composition
        for f in current:
            for g in current:
                if f.cod == g.dom:
                    k = compose(g, f).key()
                    if k not in W:
                        W.add(k)
                        changed = True
        # pullback along arbitrary universe morphisms
        for w in current:
            for g in homs.values():
                if g.cod != w.cod:
                    continue
                _, _, p2 = T.pullback(w, g)
                k = _normalize_mor(T, U, p2)
                if k is None:
                    lossy = True
                elif k not in W:
                    W.add(k)
                    changed = True
        # M-parts
        for w in current:
            _, m = T.image(w)
            k = _normalize_mor(T, U, m)
            if k is None:
                lossy = True
            elif k not in W:
                W.add(k)
                changed = True
        # universal-image rule: for a W-mono m: X -> Y, a mono f: Y -> Z
        # and any g: Z -> Z', the induced mono between the universal
        # images forall_g(f.m) -> forall_g(f) joins W
        w_monos = [homs[k] for k in sorted(W, key=ekey)
                   if k in monos]
        for m in w_monos:
            for f in monos.values():
                if f.dom != m.cod:
                    continue
                sub_small = T.image_sub(compose(f, m))
                sub_big = T.image_sub(f)
                for g in homs.values():
                    if g.dom != f.cod:
                        continue
                    S1 = T.forall_along(g, sub_small)
                    S2 = T.forall_along(g, sub_big)
                    k = _inclusion_key(T, U, S1, S2)
                    if k is None:
                        lossy = True
                    elif k not in W:
                        W.add(k)
                        changed = True
    cls = LogicalClass(T, U, W & set(homs), rounds, lossy)
    cls.only_epis = all(T.is_epi(homs[k]) for k in cls.member_keys)
    cls.image_complete = cls.only_epis
    return cls


def _normalize_mor(T, U, f):
    """Key of f moved onto universe representatives, or None."""
    hd = U.locate(f.dom)
    hc = U.locate(f.cod)
    if hd is None or hc is None:
        return None
    (rd, pd), (rc, pc) = hd, hc
    return compose(compose(pc, f), T.inverse(pd)).key()


def _inclusion_key(T, U, S1: Subobject, S2: Subobject):
    """The inclusion S1 -> S2 (S1 <= S2) normalized into the universe."""
    if not S1.leq(S2):
        return None
    O1, O2 = S1.as_object(), S2.as_object()
    i = PresheafMorphism(O1, O2,
                         {c: {x: x for x in O1.carriers[c]}
                          for c in T.index.stages}, check=False)
    return _normalize_mor(T, U, i)


# ----------------------------------------------------------------------
# span equivalence for a logical class


def w_equiv(view_or_class, s1: Span, s2: Span) -> str:
    """Stable-class span equivalence verdict for a logical class."""
    W = view_or_class.W if isinstance(view_or_class, BoolToposView) \
        else view_or_class
    return stable_equiv(W.T, W, s1, s2, W.universe)


# ----------------------------------------------------------------------
# the Booleanization view


class BoolToposView:
    """Map(Span_W(T)) presented through relation representatives.

    Relations stand for their span classes; the local order, composition
    and map predicate are computed on representatives and compared through
    the quotient."""

    def __init__(self, T, W: LogicalClass, universe: ObjectUniverse, b):
        self.T = T
        self.W = W
        self.universe = universe
        self.b = b

    # -- quotient plumbing ---------------------------------------------

    def _ensure(self, X):
        self.universe.add(X)

    def equal(self, s1: Span, s2: Span) -> bool:
        return w_equiv(self.W, s1, s2) == EQUAL

    def rel_equal(self, r1: Relation, r2: Relation) -> bool:
        if r1 == r2:
            return True
        self._ensure(r1.tab.as_object())
        self._ensure(r2.tab.as_object())
        return self.equal(span_of_rel(r1), span_of_rel(r2))

    def rel_leq(self, r1: Relation, r2: Relation) -> bool:
        """r1 <= r2 in the quotient's local order."""
        return self.rel_equal(r1.meet(r2), r1)

    def eta(self, f: PresheafMorphism) -> Relation:
        return graph_rel(self.T, f)

    def is_map(self, r: Relation) -> bool:
        t = rel_compose(r, r.converse())
        s = rel_compose(r.converse(), r)
        return (self.rel_leq(diagonal_rel(self.T, r.dom), t)
                and self.rel_leq(s, diagonal_rel(self.T, r.cod)))

    def hom_classes(self, A, B):
        """Span classes A -> B as groups of relation representatives."""
        groups = []
        for r in all_relations(self.T, A, B):
            for g in groups:
                if self.rel_equal(r, g[0]):
                    g.append(r)
                    break
            else:
                groups.append([r])
        return groups

    def map_classes(self, A, B):
        return [g for g in self.hom_classes(A, B) if self.is_map(g[0])]

    # -- headline facts -------------------------------------------------

    def b_invertible(self):
        """Two-sided invertibility of [1, b] in the quotient."""
        b = self.b
        fwd = span_compose(self.T, graph_span(b), cograph_span(b))
        bwd = span_compose(self.T, cograph_span(b), graph_span(b))
        left = self.equal(fwd, identity_span(b.dom))
        right = self.equal(bwd, identity_span(b.cod))
        return left and right

    def is_boolean(self):
        return self.b_invertible()


def booleanize(T, U: ObjectUniverse, max_rounds=20) -> BoolToposView:
    """B(T) closure and the resulting boolean view.

    The universe must contain 1, 1+1 and Omega; a ValueError names what is
    missing."""
    S, b = T.one_plus_one()
    for name, X in (("terminal", T.terminal()), ("1+1", S),
                    ("Omega", T.omega())):
        if not U.contains(X):
            raise ValueError("universe lacks %s" % name)
    hit = U.locate(S)
    rep, phi = hit
    b_norm = compose(_omega_onto(T, U, b), T.inverse(phi))
    W = logical_closure(T, [b_norm], U, max_rounds=max_rounds)
    return BoolToposView(T, W, U, b_norm)


def _omega_onto(T, U, b):
    rep, psi = U.locate(T.omega())
    return compose(psi, b)


# ----------------------------------------------------------------------
# eta as a logical functor into the view


def eta_logical_check(view: BoolToposView, sample_objects, sample_subs=()):
    """Preservation report for the quotient functor.

    terminal: exactly one map class X -> 1 for each sampled object;
    products: mediating map classes exist uniquely for sampled cones;
    classifier: the image of a characteristic square still commutes."""
    T = view.T
    one = T.terminal()
    report = {}

    ok = True
    for X in sample_objects:
        if len(view.map_classes(X, one)) != 1:
            ok = False
    report["terminal"] = ok

    ok = True
    for A, B in itertools.combinations(list(sample_objects), 2):
        P, p1, p2 = T.product(A, B)
        view._ensure(P)
        for C in [one]:
            fs = view.map_classes(C, A)
            gs = view.map_classes(C, B)
            for fc in fs:
                for gc in gs:
                    mediators = [
                        m for m in view.map_classes(C, P)
                        if view.rel_equal(rel_compose(m[0], view.eta(p1)),
                                          fc[0])
                        and view.rel_equal(rel_compose(m[0], view.eta(p2)),
                                           gc[0])]
                    if len(mediators) != 1:
                        ok = False
    report["products"] = ok

    ok = True
    for S in sample_subs:
        chi = T.char(S)
        incl = S.inclusion()
        lhs = rel_compose(view.eta(incl), view.eta(chi))
        rhs = rel_compose(view.eta(T.bang(incl.dom)), view.eta(T.true()))
        if not view.rel_equal(lhs, rhs):
            ok = False
    report["classifier"] = ok

    ok = True
    idc = identity(sample_objects[0]) if sample_objects else identity(one)
    if not view.rel_equal(view.eta(idc), diagonal_rel(T, idc.dom)):
        ok = False
    report["identity"] = ok
    return report


# ----------------------------------------------------------------------
# logical functors between toposes


def stage0_functor(S, F):
    """Evaluation at the closed stage: the boolean slice functor from the
    two-stage topos to FinSet."""
    zero = S.index.stages[0]

    def obj(X):
        return F.obj({STAR: X.carriers[zero]})

    def mor(f):
        return PresheafMorphism(obj(f.dom), obj(f.cod),
                                {STAR: dict(f.maps[zero])}, check=False)

    return Functor(S, F, obj, mor, name="stage0")


def validate_logical_functor(F: Functor, U: ObjectUniverse,
                             sample_subs=()) -> dict:
    """Machine checks that finite functor data is logical on the universe:
    preserves terminal, binary products, epis, monos, and the classifier
    with its characteristic squares."""
    Ts, Tt = F.source, F.target
    report = {}

    F1 = F.obj(Ts.terminal())
    report["terminal"] = all(len(v) == 1 for v in F1.carriers.values())

    ok = True
    for A in U.objects:
        for B in U.objects:
            P, p1, p2 = Ts.product(A, B)
            try:
                cmp = product_comparison(Tt, [F.obj(A), F.obj(B)],
                                         F.obj(P), [F.mor(p1), F.mor(p2)])
            except ValueError:
                ok = False
                continue
            if not Tt.is_iso(cmp):
                ok = False
    report["products"] = ok

    ok = True
    for A in U.objects:
        for B in U.objects:
            for f in Ts.hom(A, B):
                Ff = F.mor(f)
                if Ts.is_epi(f) and not Tt.is_epi(Ff):
                    ok = False
                if Ts.is_mono(f) and not Tt.is_mono(Ff):
                    ok = False
    report["epis_monos"] = ok

    FOm = F.obj(Ts.omega())
    Ftrue = F.mor(Ts.true())
    ok = False
    for om in Tt.isos(FOm, Tt.omega()):
        if compose(om, Ftrue).maps != _point_maps(Tt.true(), Ftrue.dom):
            continue
        good = True
        for S in sample_subs:
            chi = Ts.char(S)
            got = compose(om, F.mor(chi))
            want = Tt.char(Tt.image_sub(F.mor(S.inclusion())))
            if got != want:
                good = False
                break
        if good:
            ok = True
            break
    report["classifier"] = ok
    report["logical"] = all(report.values())
    return report


def _point_maps(point, dom):
    return PresheafMorphism(
        dom, point.cod,
        {c: {x: point.maps[c][STAR] for x in dom.carriers[c]}
         for c in point.index.stages}, check=False).maps


# ----------------------------------------------------------------------
# Bool on functors and the reflection triangle


def bool_on_functor(F: Functor, target_view: BoolToposView):
    """[f, g] -> [Ff, Fg] as a relation representative in the target."""

    def apply(s: Span):
        return rel_of_span(F.target, Span(F.mor(s.left), F.mor(s.right)))

    return apply


def representation_check(F: Functor, source_view: BoolToposView,
                         target_view: BoolToposView, sample_spans) -> dict:
    """Well-definedness and representation laws on samples."""
    BF = bool_on_functor(F, target_view)
    T, Tt = F.source, F.target
    report = {}

    ok = True
    homs = _universe_homs(T, source_view.universe)
    for k in source_view.W.members():
        w = homs.get(k)
        if w is None:
            continue
        img = BF(Span(w, w))
        if not target_view.rel_equal(img, diagonal_rel(Tt, img.dom)):
            ok = False
    report["generators"] = ok

    ok = True
    for s in sample_spans:
        r = rel_of_span(T, s)
        if BF(span_of_rel(r.converse())) != BF(span_of_rel(r)).converse():
            ok = False
    report["converse"] = ok

    ok = True
    for s1 in sample_spans:
        for s2 in sample_spans:
            if s1.codomain != s2.domain:
                continue
            lhs = BF(span_compose(T, s1, s2))
            r1, r2 = rel_of_span(T, s1), rel_of_span(T, s2)
            rhs = rel_compose(BF(span_of_rel(r1)), BF(span_of_rel(r2)))
            if not target_view.rel_equal(lhs, rhs):
                ok = False
    report["composition"] = ok
    report["representation"] = all(report.values())
    return report


def reflection_check(source_view: BoolToposView, F: Functor,
                     target_view: BoolToposView, sample_maps) -> dict:
    """The reflection triangle and the uniqueness formula.

    `sample_maps` are spans (f, g) with f in the source's logical class and
    F(f) invertible, so both sides of F(g) o F(f)^{-1} exist."""
    T, Tt = F.source, F.target
    BF = bool_on_functor(F, target_view)
    report = {}

    report["target_epis_only"] = bool(target_view.W.only_epis)

    ok = True
    homs = _universe_homs(T, source_view.universe)
    for h in homs.values():
        lhs = BF(graph_span(h))
        rhs = graph_rel(Tt, F.mor(h))
        if not target_view.rel_equal(lhs, rhs):
            ok = False
    report["triangle"] = ok

    ok = True
    checked = 0
    for s in sample_maps:
        Ff, Fg = F.mor(s.left), F.mor(s.right)
        if not Tt.is_iso(Ff):
            continue
        direct = compose(Fg, Tt.inverse(Ff))
        if not target_view.rel_equal(BF(s), graph_rel(Tt, direct)):
            ok = False
        checked += 1
    report["uniqueness"] = ok
    report["uniqueness_samples"] = checked
    report["reflective"] = report["target_epis_only"] and report["triangle"] \
        and report["uniqueness"]
    return report


# ----------------------------------------------------------------------
# quantifier lemma and K/L checks


def lemma_forall_check(T, f: PresheafMorphism, g: PresheafMorphism) -> bool:
    """For epi g: C -> B and f: B -> A, the universal image along g x g of
    the kernel-pair subobject of f.g equals the kernel-pair subobject of
    f."""
    if not T.is_epi(g):
        raise ValueError("g must be epi")
    if g.cod != f.dom:
        raise ValueError("f and g do not compose")
    inner = _kernel_pair_sub(T, compose(f, g))
    outer = _kernel_pair_sub(T, f)
    gxg = T.cross(g, g)
    return T.forall_along(gxg, inner) == outer


def _kernel_pair_sub(T, f) -> Subobject:
    P, _, _ = T.product(f.dom, f.dom)
    parts = {c: {(a, b) for (a, b) in P.carriers[c]
                 if f.maps[c][a] == f.maps[c][b]}
             for c in T.index.stages}
    return Subobject(P, parts, check=False)


def k_inverse_check(T, e: PresheafMorphism, U: ObjectUniverse) -> bool:
    """[1, e] is invertible under the K(e)-congruence: both composites with
    [e, 1] are generator instances (the kernel pair of e and the epi
    endospan (e, e))."""
    if not T.is_epi(e):
        raise ValueError("e must be epi")
    K = k_class(T, e, U)
    fwd = span_compose(T, graph_span(e), cograph_span(e))
    bwd = span_compose(T, cograph_span(e), graph_span(e))
    kp = kernel_pair_span(T, e)
    ok_fwd = vertically_isomorphic(T, fwd, kp) and \
        any(gspan.key() == kp.key() for gspan in K.generators)
    ee = Span(e, e)
    ok_bwd = vertically_isomorphic(T, bwd, ee) and \
        any(gspan.key() == ee.key() for gspan in K.generators)
    return ok_fwd and ok_bwd


def k_subset_check(T, g, h, U: ObjectUniverse) -> bool:
    """K(h) subset of K(f) for f = g.h: every K(h) generator recurs among
    the K(f) generators."""
    f = compose(g, h)
    gens_h = {s.key() for s in k_class(T, h, U).generators}
    gens_f = {s.key() for s in k_class(T, f, U).generators}
    return gens_h <= gens_f


def corollary_Lg_Lf_check(T, g, h, U: ObjectUniverse) -> bool:
    """The containment L(g) <= L(f) for f = g.h with h epi, witnessed by
    the quantifier lemma: for each right factor v of g, the universal image
    along h x h carries the kernel pair of v.h (a K(f) datum) to the kernel
    pair of v (the corresponding K(g) datum)."""
    if not T.is_epi(h):
        raise ValueError("h must be epi")
    B = g.dom
    found_any = False
    for X in U.objects:
        for v in T.hom(B, X):
            if not any(compose(u, v) == g for u in T.hom(X, g.cod)):
                continue
            found_any = True
            if not lemma_forall_check(T, v, h):
                return False
    return found_any


# ----------------------------------------------------------------------
# bounded logical-relation approximation


def logical_pairs_approx(T, seeds, U: ObjectUniverse, depth=1):
    """Bounded generation of a logical relation from span-pair seeds.

    Each element is a pair of same-typed spans asserted related; one round
    applies the universal-image rule along every universe morphism.  The
    output is a generative under-approximation — containment checks only."""
    pairs = list(seeds)
    homs = _universe_homs(T, U)
    for _ in range(depth):
        new = []
        for (s1, s2) in pairs:
            for a in homs.values():
                if a.dom != s1.domain:
                    continue
                n1 = _forall_pushed(T, s1, a)
                n2 = _forall_pushed(T, s2, a)
                if n1 is not None and n2 is not None:
                    new.append((n1, n2))
        seen = {(_pk(p), _pk(q)) for (p, q) in pairs}
        for pq in new:
            key = (_pk(pq[0]), _pk(pq[1]))
            if key not in seen:
                seen.add(key)
                pairs.append(pq)
    return pairs


def _pk(s: Span):
    return s.key()


def _forall_pushed(T, s: Span, a: PresheafMorphism):
    """The span of the universal image along a x 1 of the span's M-part."""
    sub = T.image_sub(T.pair(s.left, s.right))
    ax1 = T.cross(a, identity(s.codomain))
    pushed = T.forall_along(ax1, sub)
    _, p1, p2 = T.product(a.cod, s.codomain)
    incl = pushed.inclusion()
    return Span(compose(p1, incl), compose(p2, incl))
