"""Saturation of the compatible relation generated by a class of endospans.

The table covers all spans between a configured set of interface objects
whose apexes lie in a (possibly larger) universe; the closure is a least
fixpoint under generator insertion, symmetry/transitivity and horizontal
composition on both sides.  Identifications are sound; completeness is only
relative to the universe (compositions whose pullback apex falls outside it
are skipped and flagged)."""

from __future__ import annotations

from .presheaf import compose
from .spans import EndospanClass, ObjectUniverse, Span, identity_span, normalize_span
from .util import ekey


class UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # keep the smaller key as representative, for reproducible tables
        if ekey(rb) < ekey(ra):
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


class CongruenceTable:
    """Equivalence classes of spans between interface objects, generated by
    an endospan class within an object universe."""

    def __init__(self, T, generators: EndospanClass, universe: ObjectUniverse,
                 interface=None):
        self.T = T
        self.universe = universe
        self.interface = list(interface) if interface is not None \
            else list(universe.objects)
        self.interface = [universe.add(X) for X in self.interface]
        self.generators = generators
        self.lossy = False          # some composition left the universe
        self.dropped_generators = 0  # generators whose objects fell outside
        self.spans = {}             # canonical key -> Span
        self.homs = {}              # (dom key, cod key) -> list of canonical keys
        self.uf = UnionFind()
        self._canon_cache = {}
        self._aut_cache = {}
        self._compose_cache = {}
        self._enumerate()
        self._seed()
        self._saturate()

    # -- construction ---------------------------------------------------

    def _aut(self, D):
        k = D.key()
        if k not in self._aut_cache:
            self._aut_cache[k] = self.T.automorphisms(D)
        return self._aut_cache[k]

    def _canonical_key(self, s: Span):
        ck = s.key()
        if ck in self._canon_cache:
            return self._canon_cache[ck]
        best = None
        for psi in self._aut(s.apex):
            cand = (compose(s.left, psi).key(), compose(s.right, psi).key())
            if best is None or ekey(cand) < ekey(best):
                best = cand
        self._canon_cache[ck] = best
        return best

    def _enumerate(self):
        for A in self.interface:
            for B in self.interface:
                keys = []
                for D in self.universe.objects:
                    for l in self.T.hom(D, A):
                        for r in self.T.hom(D, B):
                            s = Span(l, r)
                            k = self._canonical_key(s)
                            if k not in self.spans:
                                self.spans[k] = s
                                keys.append(k)
                            self.uf.add(k)
                self.homs[(A.key(), B.key())] = keys

    def _seed(self):
        for g in self.generators.generators:
            s = normalize_span(self.T, self.universe, g)
            if s is None or self.universe.locate(g.domain) is None:
                self.dropped_generators += 1
                continue
            rep, iota = self.universe.locate(g.domain)
            s = Span(compose(iota, s.left), compose(iota, s.right))
            k = self._canonical_key(s)
            if k not in self.spans:
                self.dropped_generators += 1
                continue
            ik = self._canonical_key(identity_span(rep))
            self.uf.union(k, ik)

    def _compose_key(self, k1, k2):
        """Canonical key of spans[k2] o spans[k1], or None if the pullback
        apex leaves the universe."""
        ck = (k1, k2)
        if ck in self._compose_cache:
            return self._compose_cache[ck]
        s1, s2 = self.spans[k1], self.spans[k2]
        _, p1, p2 = self.T.pullback(s1.right, s2.left)
        comp = Span(compose(s1.left, p1), compose(s2.right, p2))
        norm = normalize_span(self.T, self.universe, comp)
        out = None
        if norm is not None:
            out = self._canonical_key(norm)
            if out not in self.spans:
                out = None
        if out is None:
            self.lossy = True
        self._compose_cache[ck] = out
        return out

    def _saturate(self):
        by_dom = {}
        by_cod = {}
        for (ak, bk), keys in self.homs.items():
            by_dom.setdefault(ak, []).extend(keys)
            by_cod.setdefault(bk, []).extend(keys)
        all_keys = list(self.spans)
        changed = True
        while changed:
            changed = False
            for k in all_keys:
                rk = self.uf.find(k)
                if rk == k:
                    continue
                s = self.spans[k]
                ak, bk = s.domain.key(), s.codomain.key()
                # postcompose both with every span out of the codomain
                for t in by_dom.get(bk, ()):
                    c1 = self._compose_key(k, t)
                    c2 = self._compose_key(rk, t)
                    if c1 is not None and c2 is not None:
                        if self.uf.union(c1, c2):
                            changed = True
                # precompose both with every span into the domain
                for t in by_cod.get(ak, ()):
                    c1 = self._compose_key(t, k)
                    c2 = self._compose_key(t, rk)
                    if c1 is not None and c2 is not None:
                        if self.uf.union(c1, c2):
                            changed = True
        self._saturated = True

    # -- queries --------------------------------------------------------

    def class_of(self, s: Span):
        """Canonical representative key of a span's class; the span is
        normalized into the universe first."""
        norm = normalize_span(self.T, self.universe, s)
        if norm is None:
            raise ValueError("span apex outside the universe")
        k = self._canonical_key(norm)
        if k not in self.spans:
            raise ValueError("span not covered by the table")
        return self.uf.find(k)

    def related(self, s1: Span, s2: Span) -> bool:
        return self.class_of(s1) == self.class_of(s2)

    def classes_between(self, A, B):
        seen = {}
        for k in self.homs[(A.key(), B.key())]:
            seen.setdefault(self.uf.find(k), []).append(k)
        return seen

    def num_classes(self, A, B):
        return len(self.classes_between(A, B))

    def export_text(self):
        """Deterministic dump of every hom-pair's classes."""
        lines = []
        if self.lossy:
            lines.append("# note: some compositions left the universe;"
                         " identifications are sound but may be incomplete")
        for (ak, bk), keys in sorted(self.homs.items(),
                                     key=lambda kv: ekey(kv[0])):
            classes = {}
            for k in keys:
                classes.setdefault(self.uf.find(k), []).append(k)
            lines.append("hom %s -> %s: %d spans, %d classes"
                         % (_short(ak), _short(bk), len(keys), len(classes)))
            for rep in sorted(classes, key=ekey):
                lines.append("  class rep=%s size=%d"
                             % (_short(rep), len(classes[rep])))
        return "\n".join(lines) + "\n"


def _short(key):
    import hashlib
    return hashlib.md5(ekey(key).encode()).hexdigest()[:8]
