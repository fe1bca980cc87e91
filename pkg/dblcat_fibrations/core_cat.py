"""
Finite strict categories
Composition tables, functors and the 1-categorical fibration predicates,
all decided by exhaustive lifting
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import CellNotFound, CleavageError, LiftUniquenessError, NotCertifiedError

logger = logging.getLogger(__name__)

Cell = Hashable


@dataclass(frozen=True)
class Violation:
    """One failed law together with the cells witnessing the failure"""
    law: str
    witness: Tuple[Any, ...]
    message: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {'law': self.law, 'witness': [repr(w) for w in self.witness],
                'message': self.message}


@dataclass
class ValidationReport:
    """Outcome of a law check: a certificate when no violation was recorded"""
    subject: str
    violations: List[Violation] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, witness: Tuple[Any, ...], message: str = "") -> None:
        self.violations.append(Violation(law, tuple(witness), message))

    def merge(self, other: "ValidationReport", prefix: str = "") -> None:
        self.checked += other.checked
        for violation in other.violations:
            law = f"{prefix}{violation.law}" if prefix else violation.law
            self.violations.append(Violation(law, violation.witness, violation.message))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'subject': self.subject,
            'ok': self.ok,
            'checked': self.checked,
            'violations': [v.to_dict() for v in self.violations],
        }


@dataclass(frozen=True, eq=False)
class FinCategory:
    """
    Finite strict category stored as tables

    comp maps (g, f) to g∘f and is defined exactly on pairs with tgt(f) = src(g).
    """
    objects: Tuple[Cell, ...]
    morphisms: Tuple[Cell, ...]
    src: Mapping[Cell, Cell]
    tgt: Mapping[Cell, Cell]
    ident: Mapping[Cell, Cell]
    comp: Mapping[Tuple[Cell, Cell], Cell]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (self.object_set == other.object_set
                and self.morphism_set == other.morphism_set
                and dict(self.src) == dict(other.src)
                and dict(self.tgt) == dict(other.tgt)
                and dict(self.ident) == dict(other.ident)
                and dict(self.comp) == dict(other.comp))

    __hash__ = None

    def __repr__(self) -> str:
        return f"FinCategory({len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    @cached_property
    def object_set(self) -> frozenset:
        return frozenset(self.objects)

    @cached_property
    def morphism_set(self) -> frozenset:
        return frozenset(self.morphisms)

    @cached_property
    def _homs(self) -> Dict[Tuple[Cell, Cell], Tuple[Cell, ...]]:
        homs: Dict[Tuple[Cell, Cell], List[Cell]] = {}
        for f in self.morphisms:
            homs.setdefault((self.src[f], self.tgt[f]), []).append(f)
        return {key: tuple(value) for key, value in homs.items()}

    @cached_property
    def _outgoing(self) -> Dict[Cell, Tuple[Cell, ...]]:
        out: Dict[Cell, List[Cell]] = {x: [] for x in self.objects}
        for f in self.morphisms:
            out[self.src[f]].append(f)
        return {key: tuple(value) for key, value in out.items()}

    @cached_property
    def _incoming(self) -> Dict[Cell, Tuple[Cell, ...]]:
        into: Dict[Cell, List[Cell]] = {x: [] for x in self.objects}
        for f in self.morphisms:
            into[self.tgt[f]].append(f)
        return {key: tuple(value) for key, value in into.items()}

    @cached_property
    def identity_set(self) -> frozenset:
        return frozenset(self.ident.values())

    def hom(self, x: Cell, y: Cell) -> Tuple[Cell, ...]:
        """Morphisms x → y, memoized per pair"""
        return self._homs.get((x, y), ())

    def out_of(self, x: Cell) -> Tuple[Cell, ...]:
        return self._outgoing.get(x, ())

    def into(self, y: Cell) -> Tuple[Cell, ...]:
        return self._incoming.get(y, ())

    def compose(self, g: Cell, f: Cell) -> Cell:
        try:
            return self.comp[(g, f)]
        except KeyError:
            if f not in self.morphism_set:
                raise CellNotFound("morphism", f) from None
            if g not in self.morphism_set:
                raise CellNotFound("morphism", g) from None
            raise ValueError(f"{g!r} and {f!r} are not composable") from None

    def compose_path(self, path: Sequence[Cell]) -> Cell:
        """Compose f_0, f_1, ... given in diagrammatic order"""
        result = path[0]
        for f in path[1:]:
            result = self.compose(f, result)
        return result

    def is_identity(self, f: Cell) -> bool:
        return f in self.identity_set


@dataclass(frozen=True, eq=False)
class FinFunctor:
    """Functor between finite categories given by its two finite maps"""
    source: FinCategory
    target: FinCategory
    on_objects: Mapping[Cell, Cell]
    on_morphisms: Mapping[Cell, Cell]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinFunctor):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and dict(self.on_objects) == dict(other.on_objects)
                and dict(self.on_morphisms) == dict(other.on_morphisms))

    __hash__ = None

    def __repr__(self) -> str:
        return f"FinFunctor({self.source!r} → {self.target!r})"

    @cached_property
    def _objects_over(self) -> Dict[Cell, Tuple[Cell, ...]]:
        over: Dict[Cell, List[Cell]] = {c: [] for c in self.target.objects}
        for x in self.source.objects:
            over.setdefault(self.on_objects[x], []).append(x)
        return {key: tuple(value) for key, value in over.items()}

    @cached_property
    def _morphisms_over(self) -> Dict[Cell, Tuple[Cell, ...]]:
        over: Dict[Cell, List[Cell]] = {g: [] for g in self.target.morphisms}
        for f in self.source.morphisms:
            over.setdefault(self.on_morphisms[f], []).append(f)
        return {key: tuple(value) for key, value in over.items()}

    def objects_over(self, c: Cell) -> Tuple[Cell, ...]:
        return self._objects_over.get(c, ())

    def morphisms_over(self, gamma: Cell) -> Tuple[Cell, ...]:
        return self._morphisms_over.get(gamma, ())


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_category(c: FinCategory) -> ValidationReport:
    """
    Check every FinCategory law on the tables

    Args:
        c (FinCategory): category to check

    Returns:
        ValidationReport: certificate (ok) or the violated laws with witnesses
    """
    report = ValidationReport("category")
    objects = c.object_set
    morphisms = c.morphism_set

    for f in c.morphisms:
        report.checked += 1
        if f not in c.src or f not in c.tgt:
            report.add("boundary defined", (f,), "morphism without source or target")
            continue
        if c.src[f] not in objects or c.tgt[f] not in objects:
            report.add("boundary in objects", (f,), "endpoint is not an object")

    for x in c.objects:
        report.checked += 1
        if x not in c.ident:
            report.add("identity defined", (x,), "object without identity")
            continue
        i = c.ident[x]
        if i not in morphisms:
            report.add("identity is a morphism", (x, i))
            continue
        if c.src.get(i) != x or c.tgt.get(i) != x:
            report.add("src(ident(x)) = tgt(ident(x)) = x", (x, i))
    if not report.ok:
        return report

    for (g, f), h in c.comp.items():
        report.checked += 1
        if f not in morphisms or g not in morphisms or h not in morphisms:
            report.add("composite is a morphism", (g, f, h))
            continue
        if c.tgt[f] != c.src[g]:
            report.add("composition defined only on composable pairs", (g, f))
            continue
        if c.src[h] != c.src[f]:
            report.add("src(g∘f) ≠ src(f)", (g, f, h))
        if c.tgt[h] != c.tgt[g]:
            report.add("tgt(g∘f) ≠ tgt(g)", (g, f, h))

    for f in c.morphisms:
        for g in c.out_of(c.tgt[f]):
            report.checked += 1
            if (g, f) not in c.comp:
                report.add("composition total on composable pairs", (g, f))
    if not report.ok:
        return report

    for f in c.morphisms:
        report.checked += 1
        if c.comp[(c.ident[c.tgt[f]], f)] != f:
            report.add("left unit", (f,), "ident(tgt f)∘f ≠ f")
        if c.comp[(f, c.ident[c.src[f]])] != f:
            report.add("right unit", (f,), "f∘ident(src f) ≠ f")

    for f in c.morphisms:
        for g in c.out_of(c.tgt[f]):
            gf = c.comp[(g, f)]
            for h in c.out_of(c.tgt[g]):
                report.checked += 1
                if c.comp[(h, gf)] != c.comp[(c.comp[(h, g)], f)]:
                    report.add("associativity", (h, g, f), "(h∘g)∘f ≠ h∘(g∘f)")
    return report


def validate_functor(F: FinFunctor) -> ValidationReport:
    """Check that F preserves boundaries, identities and composition exactly"""
    report = ValidationReport("functor")
    S, T = F.source, F.target
    for x in S.objects:
        report.checked += 1
        if x not in F.on_objects or F.on_objects[x] not in T.object_set:
            report.add("object map total", (x,))
    for f in S.morphisms:
        report.checked += 1
        if f not in F.on_morphisms or F.on_morphisms[f] not in T.morphism_set:
            report.add("morphism map total", (f,))
    if not report.ok:
        return report
    for f in S.morphisms:
        Ff = F.on_morphisms[f]
        if T.src[Ff] != F.on_objects[S.src[f]] or T.tgt[Ff] != F.on_objects[S.tgt[f]]:
            report.add("preserves boundaries", (f, Ff))
    for x in S.objects:
        if F.on_morphisms[S.ident[x]] != T.ident[F.on_objects[x]]:
            report.add("preserves identities", (x,))
    if not report.ok:
        return report
    for (g, f), h in S.comp.items():
        report.checked += 1
        if T.comp[(F.on_morphisms[g], F.on_morphisms[f])] != F.on_morphisms[h]:
            report.add("preserves composition", (g, f))
    return report


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def chain(n: int) -> FinCategory:
    """The ordinal [n]: objects 0..n, one morphism (i, j) for each i ≤ j"""
    if n < 0:
        raise ValueError("chain length must be non-negative")
    objects = tuple(range(n + 1))
    morphisms = tuple((i, j) for i in objects for j in objects if i <= j)
    comp = {((j, k), (i, j)): (i, k) for (i, j) in morphisms for k in range(j, n + 1)}
    return FinCategory(
        objects=objects,
        morphisms=morphisms,
        src={m: m[0] for m in morphisms},
        tgt={m: m[1] for m in morphisms},
        ident={i: (i, i) for i in objects},
        comp=comp,
    )


def terminal() -> FinCategory:
    return chain(0)


def discrete(S: Iterable[Cell]) -> FinCategory:
    """Discrete category on a finite set: only identities (s, s)"""
    objects = tuple(S)
    morphisms = tuple((s, s) for s in objects)
    return FinCategory(
        objects=objects,
        morphisms=morphisms,
        src={m: m[0] for m in morphisms},
        tgt={m: m[1] for m in morphisms},
        ident={s: (s, s) for s in objects},
        comp={(m, m): m for m in morphisms},
    )


def codiscrete(S: Iterable[Cell]) -> FinCategory:
    """Exactly one morphism (s, t) between any two objects; every morphism is invertible"""
    objects = tuple(S)
    morphisms = tuple((s, t) for s in objects for t in objects)
    comp = {((t, u), (s, t)): (s, u) for (s, t) in morphisms for u in objects}
    return FinCategory(
        objects=objects,
        morphisms=morphisms,
        src={m: m[0] for m in morphisms},
        tgt={m: m[1] for m in morphisms},
        ident={s: (s, s) for s in objects},
        comp=comp,
    )


def isomorphism_category() -> FinCategory:
    """Two objects joined by an isomorphism; the smallest non-gaunt category"""
    return codiscrete((0, 1))


def opposite(c: FinCategory) -> FinCategory:
    return FinCategory(
        objects=c.objects,
        morphisms=c.morphisms,
        src=c.tgt,
        tgt=c.src,
        ident=c.ident,
        comp={(f, g): h for (g, f), h in c.comp.items()},
    )


def product(c: FinCategory, d: FinCategory) -> FinCategory:
    """Cartesian product; cells are pairs and composition is componentwise"""
    morphisms = tuple((f, g) for f in c.morphisms for g in d.morphisms)
    comp = {}
    for (g1, f1), h1 in c.comp.items():
        for (g2, f2), h2 in d.comp.items():
            comp[((g1, g2), (f1, f2))] = (h1, h2)
    return FinCategory(
        objects=tuple((x, y) for x in c.objects for y in d.objects),
        morphisms=morphisms,
        src={m: (c.src[m[0]], d.src[m[1]]) for m in morphisms},
        tgt={m: (c.tgt[m[0]], d.tgt[m[1]]) for m in morphisms},
        ident={(x, y): (c.ident[x], d.ident[y]) for x in c.objects for y in d.objects},
        comp=comp,
    )


def arrow_category(c: FinCategory) -> FinCategory:
    """
    Fun([1], C): objects are morphisms of C, morphisms f → g are commuting
    squares (f, g, u, v) with v∘f = g∘u
    """
    morphisms = []
    for f in c.morphisms:
        for g in c.morphisms:
            for u in c.hom(c.src[f], c.src[g]):
                for v in c.hom(c.tgt[f], c.tgt[g]):
                    if c.comp[(v, f)] == c.comp[(g, u)]:
                        morphisms.append((f, g, u, v))
    by_source: Dict[Cell, List[Tuple]] = {}
    for m in morphisms:
        by_source.setdefault(m[0], []).append(m)
    comp = {}
    for first in morphisms:
        for second in by_source.get(first[1], ()):
            comp[(second, first)] = (first[0], second[1],
                                     c.comp[(second[2], first[2])],
                                     c.comp[(second[3], first[3])])
    return FinCategory(
        objects=tuple(c.morphisms),
        morphisms=tuple(morphisms),
        src={m: m[0] for m in morphisms},
        tgt={m: m[1] for m in morphisms},
        ident={f: (f, f, c.ident[c.src[f]], c.ident[c.tgt[f]]) for f in c.morphisms},
        comp=comp,
    )


def evaluation(c: FinCategory, end: int = 1) -> FinFunctor:
    """Evaluation Fun([1], C) → C at the source (end=0) or target (end=1)"""
    arrows = arrow_category(c)
    if end == 1:
        on_objects = {f: c.tgt[f] for f in arrows.objects}
        on_morphisms = {m: m[3] for m in arrows.morphisms}
    else:
        on_objects = {f: c.src[f] for f in arrows.objects}
        on_morphisms = {m: m[2] for m in arrows.morphisms}
    return FinFunctor(arrows, c, on_objects, on_morphisms)


def pullback(p: FinFunctor, g: FinFunctor) -> Tuple[FinCategory, FinFunctor, FinFunctor]:
    """
    Strict pullback of the cospan D → C ← C'

    Returns:
        Tuple: (D ×_C C', projection to D, projection to C')
    """
    if not p.target == g.target:
        raise ValueError("pullback needs a common codomain")
    D, E = p.source, g.source
    objects = tuple((x, y) for y in E.objects for x in p.objects_over(g.on_objects[y]))
    morphisms = tuple((f, h) for h in E.morphisms for f in p.morphisms_over(g.on_morphisms[h]))
    by_source: Dict[Cell, List[Tuple]] = {}
    for m in morphisms:
        by_source.setdefault((D.src[m[0]], E.src[m[1]]), []).append(m)
    comp = {}
    for first in morphisms:
        for second in by_source.get((D.tgt[first[0]], E.tgt[first[1]]), ()):
            comp[(second, first)] = (D.comp[(second[0], first[0])], E.comp[(second[1], first[1])])
    P = FinCategory(
        objects=objects,
        morphisms=morphisms,
        src={m: (D.src[m[0]], E.src[m[1]]) for m in morphisms},
        tgt={m: (D.tgt[m[0]], E.tgt[m[1]]) for m in morphisms},
        ident={o: (D.ident[o[0]], E.ident[o[1]]) for o in objects},
        comp=comp,
    )
    first_projection = FinFunctor(P, D, {o: o[0] for o in objects}, {m: m[0] for m in morphisms})
    second_projection = FinFunctor(P, E, {o: o[1] for o in objects}, {m: m[1] for m in morphisms})
    return P, first_projection, second_projection


def fiber(p: FinFunctor, c: Cell) -> FinCategory:
    """Objects over c and morphisms over ident(c)"""
    C = p.target
    if c not in C.object_set:
        raise CellNotFound("object", c)
    objects = p.objects_over(c)
    morphisms = p.morphisms_over(C.ident[c])
    mset = set(morphisms)
    D = p.source
    return FinCategory(
        objects=objects,
        morphisms=morphisms,
        src={f: D.src[f] for f in morphisms},
        tgt={f: D.tgt[f] for f in morphisms},
        ident={x: D.ident[x] for x in objects},
        comp={key: h for key, h in D.comp.items() if key[0] in mset and key[1] in mset},
    )


def full_subcategory(c: FinCategory, objects: Iterable[Cell]) -> FinCategory:
    keep = set(objects)
    objs = tuple(x for x in c.objects if x in keep)
    morphisms = tuple(f for f in c.morphisms if c.src[f] in keep and c.tgt[f] in keep)
    mset = set(morphisms)
    return FinCategory(
        objects=objs,
        morphisms=morphisms,
        src={f: c.src[f] for f in morphisms},
        tgt={f: c.tgt[f] for f in morphisms},
        ident={x: c.ident[x] for x in objs},
        comp={key: h for key, h in c.comp.items() if key[0] in mset and key[1] in mset},
    )


# ---------------------------------------------------------------------------
# Functors
# ---------------------------------------------------------------------------

def identity_functor(c: FinCategory) -> FinFunctor:
    return FinFunctor(c, c, {x: x for x in c.objects}, {f: f for f in c.morphisms})


def compose_functors(G: FinFunctor, F: FinFunctor) -> FinFunctor:
    """G∘F"""
    return FinFunctor(
        F.source, G.target,
        {x: G.on_objects[F.on_objects[x]] for x in F.source.objects},
        {f: G.on_morphisms[F.on_morphisms[f]] for f in F.source.morphisms},
    )


def opposite_functor(F: FinFunctor) -> FinFunctor:
    return FinFunctor(opposite(F.source), opposite(F.target), F.on_objects, F.on_morphisms)


def product_functor(F: FinFunctor, G: FinFunctor) -> FinFunctor:
    source = product(F.source, G.source)
    return FinFunctor(
        source, product(F.target, G.target),
        {(x, y): (F.on_objects[x], G.on_objects[y]) for (x, y) in source.objects},
        {(f, g): (F.on_morphisms[f], G.on_morphisms[g]) for (f, g) in source.morphisms},
    )


def to_terminal(c: FinCategory) -> FinFunctor:
    point = terminal()
    return FinFunctor(c, point, {x: 0 for x in c.objects}, {f: (0, 0) for f in c.morphisms})


def first_projection(c: FinCategory, d: FinCategory) -> FinFunctor:
    """Projection C × D → C"""
    prod = product(c, d)
    return FinFunctor(prod, c, {o: o[0] for o in prod.objects}, {m: m[0] for m in prod.morphisms})


def inverse_of(c: FinCategory, f: Cell) -> Optional[Cell]:
    """Two-sided inverse of f, or None"""
    x, y = c.src[f], c.tgt[f]
    for g in c.hom(y, x):
        if c.comp[(g, f)] == c.ident[x] and c.comp[(f, g)] == c.ident[y]:
            return g
    return None


def invertible(c: FinCategory, f: Cell) -> bool:
    return inverse_of(c, f) is not None


def is_gaunt_category(c: FinCategory) -> bool:
    """Every isomorphism is an identity"""
    return all(c.is_identity(f) or not invertible(c, f) for f in c.morphisms)


def is_isomorphism(F: FinFunctor) -> bool:
    """Bijective on objects and on morphisms (F is assumed to be a functor)"""
    objects = [F.on_objects[x] for x in F.source.objects]
    morphisms = [F.on_morphisms[f] for f in F.source.morphisms]
    return (len(set(objects)) == len(objects) == len(F.target.objects)
            and set(objects) == F.target.object_set
            and len(set(morphisms)) == len(morphisms) == len(F.target.morphisms)
            and set(morphisms) == F.target.morphism_set)


def inverse_functor(F: FinFunctor) -> FinFunctor:
    if not is_isomorphism(F):
        raise ValueError("functor is not bijective")
    return FinFunctor(F.target, F.source,
                      {v: k for k, v in F.on_objects.items()},
                      {v: k for k, v in F.on_morphisms.items()})


def is_equivalence(F: FinFunctor) -> bool:
    """Fully faithful and essentially surjective"""
    S, T = F.source, F.target
    for x in S.objects:
        for y in S.objects:
            images = [F.on_morphisms[f] for f in S.hom(x, y)]
            if len(set(images)) != len(images):
                return False
            if set(images) != set(T.hom(F.on_objects[x], F.on_objects[y])):
                return False
    image_objects = {F.on_objects[x] for x in S.objects}
    for b in T.objects:
        if b in image_objects:
            continue
        if not any(invertible(T, f) for a in image_objects for f in T.hom(a, b)):
            return False
    return True


# ---------------------------------------------------------------------------
# Cartesian arrows
# ---------------------------------------------------------------------------

def _cartesian_witness(p: FinFunctor, alpha: Cell) -> Optional[Cell]:
    """An object z at which the hom-set comparison fails to be a bijection"""
    D, C = p.source, p.target
    x, y = D.src[alpha], D.tgt[alpha]
    px = p.on_objects[x]
    pa = p.on_morphisms[alpha]
    for z in D.objects:
        pz = p.on_objects[z]
        image = set()
        for u in D.hom(z, x):
            pair = (D.comp[(alpha, u)], p.on_morphisms[u])
            if pair in image:
                return z
            image.add(pair)
        expected = 0
        hom_zy = D.hom(z, y)
        for k in C.hom(pz, px):
            target = C.comp[(pa, k)]
            expected += sum(1 for h in hom_zy if p.on_morphisms[h] == target)
        if expected != len(image):
            return z
    return None


def is_cartesian_arrow(p: FinFunctor, alpha: Cell) -> bool:
    """
    Hom-set criterion: Hom(z, x) → Hom(z, y) ×_{Hom(pz, py)} Hom(pz, px) is a
    bijection for every object z of the source category
    """
    if alpha not in p.source.morphism_set:
        raise CellNotFound("morphism", alpha)
    return _cartesian_witness(p, alpha) is None


def is_cartesian_arrow_by_horns(p: FinFunctor, alpha: Cell) -> bool:
    """Every Λ²₂-horn over a 2-simplex of the base ending in p(alpha) has exactly one filler"""
    D, C = p.source, p.target
    if alpha not in D.morphism_set:
        raise CellNotFound("morphism", alpha)
    x, y = D.src[alpha], D.tgt[alpha]
    px = p.on_objects[x]
    pa = p.on_morphisms[alpha]
    for k in C.into(px):
        base_composite = C.comp[(pa, k)]
        for z in p.objects_over(C.src[k]):
            for h in D.hom(z, y):
                if p.on_morphisms[h] != base_composite:
                    continue
                fillers = 0
                for u in D.hom(z, x):
                    if p.on_morphisms[u] == k and D.comp[(alpha, u)] == h:
                        fillers += 1
                if fillers != 1:
                    return False
    return True


def is_cocartesian_arrow(p: FinFunctor, alpha: Cell) -> bool:
    return is_cartesian_arrow(opposite_functor(p), alpha)


def cartesian_arrows(p: FinFunctor) -> frozenset:
    return frozenset(f for f in p.source.morphisms if _cartesian_witness(p, f) is None)


def cartesian_lifts(p: FinFunctor, gamma: Cell, y: Cell) -> Tuple[Cell, ...]:
    """Cartesian morphisms over gamma with target y"""
    D = p.source
    return tuple(f for f in p.morphisms_over(gamma)
                 if D.tgt[f] == y and _cartesian_witness(p, f) is None)


def cocartesian_lifts(p: FinFunctor, gamma: Cell, x: Cell) -> Tuple[Cell, ...]:
    """Cocartesian morphisms over gamma with source x"""
    return cartesian_lifts(opposite_functor(p), gamma, x)


# ---------------------------------------------------------------------------
# Fibration predicates
# ---------------------------------------------------------------------------

@dataclass
class LiftingReport:
    """Every lifting problem of one kind, with its recorded solutions"""
    kind: str
    lifts: Dict[Tuple[Cell, Cell], Tuple[Cell, ...]] = field(default_factory=dict)
    failures: List[Tuple[Cell, Cell]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'holds': self.holds,
            'problems': len(self.lifts),
            'failures': [[repr(a), repr(b)] for a, b in self.failures],
        }


def cartesian_fibration_report(p: FinFunctor) -> LiftingReport:
    """For every γ: c → c′ and y over c′, the set of cartesian lifts of γ ending at y"""
    report = LiftingReport("cartesian")
    C, D = p.target, p.source
    cartesian = cartesian_arrows(p)
    for gamma in C.morphisms:
        for y in p.objects_over(C.tgt[gamma]):
            lifts = tuple(f for f in p.morphisms_over(gamma) if D.tgt[f] == y and f in cartesian)
            report.lifts[(gamma, y)] = lifts
            if not lifts:
                report.failures.append((gamma, y))
    logger.debug("cartesian check: %d problems, %d failures", len(report.lifts), len(report.failures))
    return report


def cocartesian_fibration_report(p: FinFunctor) -> LiftingReport:
    """Dual report: lifts indexed by (γ, x) with x over the source of γ"""
    report = cartesian_fibration_report(opposite_functor(p))
    report.kind = "cocartesian"
    return report


def discrete_fibration_report(p: FinFunctor, side: str) -> LiftingReport:
    """
    Unique-lift bijection D(1) ≅ C(1) ×_C D at the target (side="right") or
    at the source (side="left")
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    report = LiftingReport(side)
    C, D = p.target, p.source
    end = D.src if side == "left" else D.tgt
    base_end = C.src if side == "left" else C.tgt
    for gamma in C.morphisms:
        for x in p.objects_over(base_end[gamma]):
            lifts = tuple(f for f in p.morphisms_over(gamma) if end[f] == x)
            report.lifts[(gamma, x)] = lifts
            if len(lifts) != 1:
                report.failures.append((gamma, x))
    return report


def is_cartesian_fibration(p: FinFunctor) -> bool:
    return cartesian_fibration_report(p).holds


def is_cocartesian_fibration(p: FinFunctor) -> bool:
    return cocartesian_fibration_report(p).holds


def is_right_fibration(p: FinFunctor) -> bool:
    return discrete_fibration_report(p, "right").holds


def is_left_fibration(p: FinFunctor) -> bool:
    return discrete_fibration_report(p, "left").holds


def unique_lift(p: FinFunctor, gamma: Cell, x: Cell, side: str = "left") -> Cell:
    """The unique morphism over gamma starting (left) or ending (right) at x"""
    D = p.source
    end = D.src if side == "left" else D.tgt
    found = [f for f in p.morphisms_over(gamma) if end[f] == x]
    if len(found) != 1:
        raise LiftUniquenessError((gamma, x, side), found)
    return found[0]


# ---------------------------------------------------------------------------
# Cleavages
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cleavage:
    """
    A chosen (co)cartesian lift for every lifting problem

    Cartesian cleavages are indexed by (γ, object over tgt γ), cocartesian ones
    by (γ, object over src γ).
    """
    functor: FinFunctor
    orientation: str
    lifts: Mapping[Tuple[Cell, Cell], Cell]

    def lift(self, gamma: Cell, obj: Cell) -> Cell:
        try:
            return self.lifts[(gamma, obj)]
        except KeyError:
            raise CleavageError(f"cleavage has no lift of {gamma!r} at {obj!r}",
                                witness=(gamma, obj)) from None

    @cached_property
    def split(self) -> bool:
        return split_failure(self) is None


def choose_cleavage(p: FinFunctor, orientation: str = "cartesian") -> Cleavage:
    """
    Pick one lift per problem: identities over identities, otherwise the
    first lift in table order

    Raises:
        NotCertifiedError: some problem has no (co)cartesian lift
    """
    if orientation == "cartesian":
        report = cartesian_fibration_report(p)
    elif orientation == "cocartesian":
        report = cocartesian_fibration_report(p)
    else:
        raise ValueError("orientation must be 'cartesian' or 'cocartesian'")
    if not report.holds:
        raise NotCertifiedError(f"functor is not a {orientation} fibration", report.failures)
    D, C = p.source, p.target
    lifts = {}
    for (gamma, obj), candidates in report.lifts.items():
        if C.is_identity(gamma) and D.ident[obj] in candidates:
            lifts[(gamma, obj)] = D.ident[obj]
        else:
            lifts[(gamma, obj)] = candidates[0]
    return Cleavage(p, orientation, lifts)


def split_failure(cleavage: Cleavage) -> Optional[Tuple[Cell, ...]]:
    """First witness against splitness: an identity or a composite that is not chosen strictly"""
    p = cleavage.functor
    C, D = p.target, p.source
    for (gamma, obj), chosen in cleavage.lifts.items():
        if C.is_identity(gamma) and chosen != D.ident[obj]:
            return (gamma, obj)
    for (g, f), gf in C.comp.items():
        if cleavage.orientation == "cocartesian":
            for x in p.objects_over(C.src[f]):
                first = cleavage.lifts.get((f, x))
                if first is None:
                    return (f, x)
                second = cleavage.lifts.get((g, D.tgt[first]))
                composite = cleavage.lifts.get((gf, x))
                if second is None or composite != D.comp[(second, first)]:
                    return (g, f, x)
        else:
            for z in p.objects_over(C.tgt[g]):
                last = cleavage.lifts.get((g, z))
                if last is None:
                    return (g, z)
                before = cleavage.lifts.get((f, D.src[last]))
                composite = cleavage.lifts.get((gf, z))
                if before is None or composite != D.comp[(last, before)]:
                    return (g, f, z)
    return None
