"""
Strict finite 2-categories and 1-cocartesian fibrations between them

A 2-category is stored flat: objects, 1-cells with src/tgt/ident/comp, and
2-cells with dom/cod/unit, vertical composition vcomp and horizontal
composition hcomp. Cell names are global, so double_nerve can reuse them:

    objects    objects
    h-arrows   1-cells
    v-arrows   identities only, named by their object
    squares    2-cells
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .config import get_settings
from .core_cat import (
    Cell,
    FinCategory,
    FinFunctor,
    LiftingReport,
    ValidationReport,
    chain,
    discrete_fibration_report,
    identity_functor,
    is_equivalence,
    is_gaunt_category,
    is_isomorphism,
    product,
    pullback,
    validate_category,
    validate_functor,
)
from .core_cat import fiber as category_fiber
from .dblcat import DoubleFunctor, FinDoubleCategory, build_double
from .errors import CleavageError, InvalidStructureError, LiftUniquenessError, NotCertifiedError
from .fibr import FibrationCertificate, check_fibration
from .groth import CatValuedFunctor, unstraighten_1, validate_cat_valued
from .reflect import reflect_perp

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FinTwoCategory:
    """A strict 2-category with finitely many cells"""
    objects: Tuple[Cell, ...]
    one_cells: Tuple[Cell, ...]
    src: Mapping[Cell, Cell]
    tgt: Mapping[Cell, Cell]
    ident: Mapping[Cell, Cell]
    comp: Mapping[Tuple[Cell, Cell], Cell]
    two_cells: Tuple[Cell, ...]
    dom: Mapping[Cell, Cell]
    cod: Mapping[Cell, Cell]
    unit: Mapping[Cell, Cell]
    vcomp: Mapping[Tuple[Cell, Cell], Cell]
    hcomp: Mapping[Tuple[Cell, Cell], Cell]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinTwoCategory):
            return NotImplemented
        return (set(self.objects) == set(other.objects)
                and set(self.one_cells) == set(other.one_cells)
                and set(self.two_cells) == set(other.two_cells)
                and all(dict(getattr(self, name)) == dict(getattr(other, name))
                        for name in ("src", "tgt", "ident", "comp", "dom", "cod", "unit", "vcomp", "hcomp")))

    __hash__ = None

    def __repr__(self) -> str:
        return (f"FinTwoCategory({len(self.objects)} objects, {len(self.one_cells)} 1-cells, "
                f"{len(self.two_cells)} 2-cells)")

    @cached_property
    def underlying(self) -> FinCategory:
        """Objects and 1-cells"""
        return FinCategory(self.objects, self.one_cells, self.src, self.tgt, self.ident, self.comp)

    @cached_property
    def homs(self) -> Dict[Tuple[Cell, Cell], FinCategory]:
        ones: Dict[Tuple[Cell, Cell], List[Cell]] = {(x, y): [] for x in self.objects for y in self.objects}
        twos: Dict[Tuple[Cell, Cell], List[Cell]] = {key: [] for key in ones}
        for f in self.one_cells:
            ones[(self.src[f], self.tgt[f])].append(f)
        for a in self.two_cells:
            f = self.dom[a]
            twos[(self.src[f], self.tgt[f])].append(a)
        result = {}
        for key in ones:
            cells = tuple(twos[key])
            members = set(cells)
            result[key] = FinCategory(
                objects=tuple(ones[key]),
                morphisms=cells,
                src={a: self.dom[a] for a in cells},
                tgt={a: self.cod[a] for a in cells},
                ident={f: self.unit[f] for f in ones[key]},
                comp={pair: value for pair, value in self.vcomp.items()
                      if pair[0] in members and pair[1] in members},
            )
        return result

    def hom(self, x: Cell, y: Cell) -> FinCategory:
        return self.homs[(x, y)]

    def composition(self, x: Cell, y: Cell, z: Cell) -> FinFunctor:
        """hom(y, z) × hom(x, y) → hom(x, z)"""
        source = product(self.hom(y, z), self.hom(x, y))
        return FinFunctor(
            source, self.hom(x, z),
            {pair: self.comp.get(pair) for pair in source.objects},
            {pair: self.hcomp.get(pair) for pair in source.morphisms},
        )


def validate_two_category(t: FinTwoCategory) -> ValidationReport:
    """
    Underlying category, hom categories, composition functors (which carries
    the interchange law), strict units and associativity of hcomp
    """
    report = ValidationReport("2-category")
    if len(set(t.one_cells)) != len(t.one_cells):
        report.add("1-cells are named uniquely", ())
    if len(set(t.two_cells)) != len(t.two_cells):
        report.add("2-cells are named uniquely", ())
    report.merge(validate_category(t.underlying), prefix="underlying: ")
    if not report.ok:
        return report
    for (x, y), hom in t.homs.items():
        report.merge(validate_category(hom), prefix=f"hom({x!r}, {y!r}): ")
    if not report.ok:
        return report
    for x in t.objects:
        for y in t.objects:
            for z in t.objects:
                report.merge(validate_functor(t.composition(x, y, z)), prefix=f"composition {x!r}{y!r}{z!r}: ")
    if not report.ok:
        return report
    for a in t.two_cells:
        report.checked += 1
        f = t.dom[a]
        left_unit = t.unit[t.ident[t.tgt[f]]]
        right_unit = t.unit[t.ident[t.src[f]]]
        if t.hcomp[(left_unit, a)] != a or t.hcomp[(a, right_unit)] != a:
            report.add("identity 2-cells are units for hcomp", (a,))
    after: Dict[Cell, List[Cell]] = {}
    for a in t.two_cells:
        after.setdefault(t.src[t.dom[a]], []).append(a)
    for a in t.two_cells:
        for b in after.get(t.tgt[t.dom[a]], ()):
            for c in after.get(t.tgt[t.dom[b]], ()):
                report.checked += 1
                if t.hcomp[(c, t.hcomp[(b, a)])] != t.hcomp[(t.hcomp[(c, b)], a)]:
                    report.add("hcomp is associative", (c, b, a))
    return report


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def thin_two_category(objects: Iterable[Cell], one_cells: Iterable[Cell],
                      src: Mapping[Cell, Cell], tgt: Mapping[Cell, Cell],
                      ident: Mapping[Cell, Cell], comp: Mapping[Tuple[Cell, Cell], Cell],
                      order: Iterable[Tuple[Cell, Cell]] = ()) -> FinTwoCategory:
    """
    Locally thin 2-category: at most one 2-cell (f, g) from f to g, for the
    pairs in order plus the identities (f, f)
    """
    one_cells = tuple(one_cells)
    pairs = [(f, f) for f in one_cells] + [pair for pair in order if pair[0] != pair[1]]
    pair_set = set(pairs)
    by_source: Dict[Cell, List[Tuple]] = {}
    by_object: Dict[Cell, List[Tuple]] = {}
    for pair in pairs:
        by_source.setdefault(pair[0], []).append(pair)
        by_object.setdefault(src[pair[0]], []).append(pair)
    vcomp = {(second, first): (first[0], second[1])
             for first in pairs for second in by_source.get(first[1], ())}
    hcomp = {}
    for first in pairs:
        for second in by_object.get(tgt[first[0]], ()):
            hcomp[(second, first)] = (comp[(second[0], first[0])], comp[(second[1], first[1])])
    for value in list(vcomp.values()) + list(hcomp.values()):
        if value not in pair_set:
            raise InvalidStructureError(f"order is not closed under composition at {value!r}")
    return FinTwoCategory(
        objects=tuple(objects), one_cells=one_cells, src=dict(src), tgt=dict(tgt),
        ident=dict(ident), comp=dict(comp),
        two_cells=tuple(pairs),
        dom={pair: pair[0] for pair in pairs},
        cod={pair: pair[1] for pair in pairs},
        unit={f: (f, f) for f in one_cells},
        vcomp=vcomp,
        hcomp=hcomp,
    )


def two_category_from_category(c: FinCategory) -> FinTwoCategory:
    """C as a locally discrete 2-category"""
    return thin_two_category(c.objects, c.morphisms, c.src, c.tgt, c.ident, c.comp)


def _unital_composition(one_cells: Sequence[Cell], src: Mapping, tgt: Mapping,
                        ident: Mapping) -> Dict[Tuple[Cell, Cell], Cell]:
    comp = {}
    for f in one_cells:
        comp[(ident[tgt[f]], f)] = f
        comp[(f, ident[src[f]])] = f
    return comp


def lax_triangle() -> FinTwoCategory:
    """
    [2]^lax: 01, 12 and 02 with the composite (0, 1, 2) = 12∘01 and one
    2-cell 12∘01 ⇒ 02
    """
    objects = (0, 1, 2)
    one_cells = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2), (0, 1, 2))
    src = {f: f[0] for f in one_cells}
    tgt = {f: f[-1] for f in one_cells}
    ident = {x: (x, x) for x in objects}
    comp = _unital_composition(one_cells, src, tgt, ident)
    comp[((1, 2), (0, 1))] = (0, 1, 2)
    return thin_two_category(objects, one_cells, src, tgt, ident, comp, [((0, 1, 2), (0, 2))])


def two_cell() -> FinTwoCategory:
    """C₂: two parallel 1-cells a, b: 0 → 1 and one 2-cell a ⇒ b"""
    objects = (0, 1)
    one_cells = ((0, 0), (1, 1), "a", "b")
    src = {(0, 0): 0, (1, 1): 1, "a": 0, "b": 0}
    tgt = {(0, 0): 0, (1, 1): 1, "a": 1, "b": 1}
    ident = {0: (0, 0), 1: (1, 1)}
    comp = _unital_composition(one_cells, src, tgt, ident)
    return thin_two_category(objects, one_cells, src, tgt, ident, comp, [("a", "b")])


def product_two(t: FinTwoCategory, u: FinTwoCategory) -> FinTwoCategory:
    """Cartesian product; every kind of cell is a pair"""
    one_cells = tuple((f, g) for f in t.one_cells for g in u.one_cells)
    two_cells = tuple((a, b) for a in t.two_cells for b in u.two_cells)
    pair_tables = lambda left, right: {((f2, g2), (f1, g1)): (h, k)
                                      for (f2, f1), h in left.items() for (g2, g1), k in right.items()}
    return FinTwoCategory(
        objects=tuple((x, y) for x in t.objects for y in u.objects),
        one_cells=one_cells,
        src={(f, g): (t.src[f], u.src[g]) for (f, g) in one_cells},
        tgt={(f, g): (t.tgt[f], u.tgt[g]) for (f, g) in one_cells},
        ident={(x, y): (t.ident[x], u.ident[y]) for x in t.objects for y in u.objects},
        comp=pair_tables(t.comp, u.comp),
        two_cells=two_cells,
        dom={(a, b): (t.dom[a], u.dom[b]) for (a, b) in two_cells},
        cod={(a, b): (t.cod[a], u.cod[b]) for (a, b) in two_cells},
        unit={(f, g): (t.unit[f], u.unit[g]) for (f, g) in one_cells},
        vcomp=pair_tables(t.vcomp, u.vcomp),
        hcomp=pair_tables(t.hcomp, u.hcomp),
    )


# ---------------------------------------------------------------------------
# 2-functors
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TwoFunctor:
    """Strict 2-functor given on all three kinds of cells"""
    source: FinTwoCategory
    target: FinTwoCategory
    on_objects: Mapping[Cell, Cell]
    on_one_cells: Mapping[Cell, Cell]
    on_two_cells: Mapping[Cell, Cell]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoFunctor):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and dict(self.on_objects) == dict(other.on_objects)
                and dict(self.on_one_cells) == dict(other.on_one_cells)
                and dict(self.on_two_cells) == dict(other.on_two_cells))

    __hash__ = None

    def __repr__(self) -> str:
        return f"TwoFunctor({self.source!r} → {self.target!r})"

    @cached_property
    def underlying(self) -> FinFunctor:
        return FinFunctor(self.source.underlying, self.target.underlying, self.on_objects, self.on_one_cells)

    def hom_functor(self, x: Cell, y: Cell) -> FinFunctor:
        """hom(x, y) → hom(Px, Py)"""
        source = self.source.hom(x, y)
        return FinFunctor(
            source, self.target.hom(self.on_objects[x], self.on_objects[y]),
            {f: self.on_one_cells[f] for f in source.objects},
            {a: self.on_two_cells[a] for a in source.morphisms},
        )


def validate_two_functor(P: TwoFunctor) -> ValidationReport:
    report = ValidationReport("2-functor")
    report.merge(validate_functor(P.underlying), prefix="underlying: ")
    if not report.ok:
        return report
    S, T = P.source, P.target
    for a in S.two_cells:
        report.checked += 1
        image = P.on_two_cells.get(a)
        if image not in T.dom:
            report.add("2-cell map total", (a,))
            continue
        if T.dom[image] != P.on_one_cells[S.dom[a]] or T.cod[image] != P.on_one_cells[S.cod[a]]:
            report.add("preserves 2-cell boundaries", (a,))
    if not report.ok:
        return report
    for f in S.one_cells:
        if P.on_two_cells[S.unit[f]] != T.unit[P.on_one_cells[f]]:
            report.add("preserves identity 2-cells", (f,))
    for law, table, target_table in (("vcomp", S.vcomp, T.vcomp), ("hcomp", S.hcomp, T.hcomp)):
        for (b, a), ba in table.items():
            report.checked += 1
            if target_table.get((P.on_two_cells[b], P.on_two_cells[a])) != P.on_two_cells[ba]:
                report.add(f"preserves {law}", (b, a))
    return report


def identity_two_functor(t: FinTwoCategory) -> TwoFunctor:
    return TwoFunctor(t, t, {x: x for x in t.objects}, {f: f for f in t.one_cells},
                      {a: a for a in t.two_cells})


def compose_two_functors(G: TwoFunctor, F: TwoFunctor) -> TwoFunctor:
    """G∘F"""
    return TwoFunctor(
        F.source, G.target,
        {x: G.on_objects[F.on_objects[x]] for x in F.source.objects},
        {f: G.on_one_cells[F.on_one_cells[f]] for f in F.source.one_cells},
        {a: G.on_two_cells[F.on_two_cells[a]] for a in F.source.two_cells},
    )


def is_two_isomorphism(G: TwoFunctor) -> bool:
    """Bijective in every dimension (G is assumed to be a 2-functor)"""
    cells = [G.on_two_cells[a] for a in G.source.two_cells]
    return (is_isomorphism(G.underlying)
            and len(set(cells)) == len(cells) == len(G.target.two_cells)
            and set(cells) == set(G.target.two_cells))


def first_projection_two(t: FinTwoCategory, u: FinTwoCategory) -> TwoFunctor:
    """t × u → t"""
    prod = product_two(t, u)
    return TwoFunctor(prod, t, {x: x[0] for x in prod.objects}, {f: f[0] for f in prod.one_cells},
                      {a: a[0] for a in prod.two_cells})


def lax_projection() -> TwoFunctor:
    """[2]^lax → C₂ sending 0 ↦ 0 and 1, 2 ↦ 1"""
    source, target = lax_triangle(), two_cell()
    on_objects = {0: 0, 1: 1, 2: 1}
    on_one_cells = {(0, 0): (0, 0), (1, 1): (1, 1), (2, 2): (1, 1), (1, 2): (1, 1),
                    (0, 1): "a", (0, 1, 2): "a", (0, 2): "b"}
    return TwoFunctor(source, target, on_objects, on_one_cells,
                      {(f, g): (on_one_cells[f], on_one_cells[g]) for (f, g) in source.two_cells})


# ---------------------------------------------------------------------------
# Double nerve
# ---------------------------------------------------------------------------

def double_nerve(t: FinTwoCategory) -> FinDoubleCategory:
    """
    Double category with the 1-cells of t as h-arrows, only identity
    v-arrows, and the 2-cells of t as squares
    """
    horizontal = t.underlying
    vertical = FinCategory(
        objects=t.objects, morphisms=t.objects,
        src={x: x for x in t.objects}, tgt={x: x for x in t.objects},
        ident={x: x for x in t.objects}, comp={(x, x): x for x in t.objects},
    )
    return build_double(
        horizontal, vertical, t.two_cells,
        top=t.dom, bottom=t.cod,
        left={a: t.src[t.dom[a]] for a in t.two_cells},
        right={a: t.tgt[t.dom[a]] for a in t.two_cells},
        h_identity={x: t.unit[t.ident[x]] for x in t.objects},
        v_identity=t.unit,
        hpaste=t.hcomp,
        vpaste=t.vcomp,
    )


def double_nerve_functor(P: TwoFunctor) -> DoubleFunctor:
    return DoubleFunctor(double_nerve(P.source), double_nerve(P.target),
                         P.on_objects, P.on_one_cells, P.on_objects, P.on_two_cells)


def two_category_of(d: FinDoubleCategory) -> FinTwoCategory:
    """
    The 2-category carried by a double category whose v-arrows are all
    identities: 1-cells are h-arrows and 2-cells are squares

    Raises:
        InvalidStructureError: some v-arrow is not an identity
    """
    V = d.vertical
    stray = [v for v in V.morphisms if not V.is_identity(v)]
    if stray:
        raise InvalidStructureError(f"v-arrow {stray[0]!r} is not an identity")
    H = d.horizontal
    return FinTwoCategory(
        objects=tuple(d.objects), one_cells=tuple(H.morphisms), src=H.src, tgt=H.tgt,
        ident=H.ident, comp=H.comp,
        two_cells=tuple(d.squares),
        dom={s: d.top(s) for s in d.squares},
        cod={s: d.bottom(s) for s in d.squares},
        unit={f: d.v_identity_square(f) for f in H.morphisms},
        vcomp=d.squares_v.comp,
        hcomp=d.squares_h.comp,
    )


def two_functor_of(F: DoubleFunctor) -> TwoFunctor:
    return TwoFunctor(two_category_of(F.source), two_category_of(F.target),
                      F.on_objects, F.on_h, F.on_squares)


# ---------------------------------------------------------------------------
# 1-cocartesian fibrations
# ---------------------------------------------------------------------------

@dataclass
class TwoFibrationCertificate:
    """
    Outcome of the 1-cocartesian check: local right-fibration reports per
    pair of objects, the cocartesian 1-cells and a lift table
    """
    mode: str
    local: Dict[Tuple[Cell, Cell], LiftingReport] = field(default_factory=dict)
    cocartesian: frozenset = frozenset()
    lifts: Dict[Tuple[Cell, Cell], Tuple[Cell, ...]] = field(default_factory=dict)
    failures: List[Tuple[str, Any]] = field(default_factory=list)
    gaunt_homs: bool = True

    @property
    def holds(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': "1-cocartesian",
            'mode': self.mode,
            'holds': self.holds,
            'local_checks': len(self.local),
            'cocartesian_1_cells': len(self.cocartesian),
            'lifting_problems': len(self.lifts),
            'gaunt_homs': self.gaunt_homs,
            # on gaunt homs the lift form and the adjoint form agree exactly
            'exact': self.gaunt_homs or self.mode == "equiv",
            'failures': [[kind, repr(witness)] for kind, witness in self.failures],
        }


def _precomposition(t: FinTwoCategory, gamma: Cell, z: Cell) -> FinFunctor:
    """hom(tgt γ, z) → hom(src γ, z), β ↦ β∘γ"""
    source = t.hom(t.tgt[gamma], z)
    unit = t.unit[gamma]
    return FinFunctor(source, t.hom(t.src[gamma], z),
                      {f: t.comp[(f, gamma)] for f in source.objects},
                      {a: t.hcomp[(a, unit)] for a in source.morphisms})


def cocartesian_comparison(P: TwoFunctor, alpha: Cell, d2: Cell) -> FinFunctor:
    """hom(d₁, d₂) → hom(d₀, d₂) ×_{hom(Pd₀, Pd₂)} hom(Pd₁, Pd₂) for α: d₀ → d₁"""
    D, C = P.source, P.target
    d0 = D.src[alpha]
    base = P.on_one_cells[alpha]
    pulled, _, _ = pullback(P.hom_functor(d0, d2), _precomposition(C, base, P.on_objects[d2]))
    source = D.hom(D.tgt[alpha], d2)
    unit = D.unit[alpha]
    return FinFunctor(
        source, pulled,
        {f: (D.comp[(f, alpha)], P.on_one_cells[f]) for f in source.objects},
        {a: (D.hcomp[(a, unit)], P.on_two_cells[a]) for a in source.morphisms},
    )


def is_cocartesian_1cell(P: TwoFunctor, alpha: Cell, mode: Optional[str] = None) -> bool:
    """Every comparison functor is an isomorphism (iso mode) or an equivalence (equiv mode)"""
    mode = mode or get_settings().mode
    for d2 in P.source.objects:
        comparison = cocartesian_comparison(P, alpha, d2)
        if mode == "iso":
            if not (validate_functor(comparison).ok and is_isomorphism(comparison)):
                return False
        elif not is_equivalence(comparison):
            return False
    return True


def is_1cocartesian_fibration(P: TwoFunctor, mode: Optional[str] = None) -> TwoFibrationCertificate:
    """
    Hom functors are right fibrations, and every 1-cell of the base with a
    lifted source has a cocartesian lift

    Raises:
        InvalidStructureError: P is not a strict 2-functor
    """
    mode = mode or get_settings().mode
    report = validate_two_functor(P)
    if not report.ok:
        raise InvalidStructureError(f"not a 2-functor: {report.violations[0].law}", report)
    D, C = P.source, P.target
    certificate = TwoFibrationCertificate(mode)
    for x in D.objects:
        for y in D.objects:
            local = discrete_fibration_report(P.hom_functor(x, y), "right")
            certificate.local[(x, y)] = local
            certificate.failures.extend(("local", (x, y, problem)) for problem in local.failures)
            if not is_gaunt_category(D.hom(x, y)):
                certificate.gaunt_homs = False
    certificate.cocartesian = frozenset(a for a in D.one_cells if is_cocartesian_1cell(P, a, mode))
    for gamma in C.one_cells:
        for d0 in P.underlying.objects_over(C.src[gamma]):
            lifts = tuple(a for a in P.underlying.morphisms_over(gamma)
                          if D.src[a] == d0 and a in certificate.cocartesian)
            certificate.lifts[(gamma, d0)] = lifts
            if not lifts:
                certificate.failures.append(("cocartesian lift", (gamma, d0)))
    logger.info("1-cocartesian check: %s (%d cocartesian 1-cells)",
                "holds" if certificate.holds else "fails", len(certificate.cocartesian))
    return certificate


# ---------------------------------------------------------------------------
# Functors into Cat with 2-cell data
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TwoCatValuedFunctor:
    """
    Strict 2-functor C → Cat: categories on objects, functors on 1-cells and
    natural transformations, given by components, on 2-cells
    """
    base: FinTwoCategory
    on_objects: Mapping[Cell, FinCategory]
    on_one_cells: Mapping[Cell, FinFunctor]
    on_two_cells: Mapping[Cell, Mapping[Cell, Cell]]

    def __repr__(self) -> str:
        return f"TwoCatValuedFunctor({self.base!r})"

    @cached_property
    def underlying(self) -> CatValuedFunctor:
        return CatValuedFunctor(self.base.underlying, self.on_objects, self.on_one_cells)

    def component(self, mu: Cell, x: Cell) -> Cell:
        return self.on_two_cells[mu][x]


def validate_two_cat_valued(F: TwoCatValuedFunctor) -> ValidationReport:
    report = validate_cat_valued(F.underlying)
    if not report.ok:
        return report
    t = F.base
    for mu in t.two_cells:
        gamma, delta = t.dom[mu], t.cod[mu]
        source, target = F.on_objects[t.src[gamma]], F.on_objects[t.tgt[gamma]]
        Fg, Fd = F.on_one_cells[gamma], F.on_one_cells[delta]
        components = F.on_two_cells.get(mu, {})
        for x in source.objects:
            report.checked += 1
            if components.get(x) not in target.hom(Fg.on_objects[x], Fd.on_objects[x]):
                report.add("component between the images", (mu, x))
        if not report.ok:
            continue
        for f in source.morphisms:
            report.checked += 1
            x, y = source.src[f], source.tgt[f]
            if target.comp[(Fd.on_morphisms[f], components[x])] != target.comp[(components[y], Fg.on_morphisms[f])]:
                report.add("naturality", (mu, f))
    if not report.ok:
        return report
    for gamma in t.one_cells:
        value = F.on_objects[t.tgt[gamma]]
        moved = F.on_one_cells[gamma]
        for x in F.on_objects[t.src[gamma]].objects:
            if F.component(t.unit[gamma], x) != value.ident[moved.on_objects[x]]:
                report.add("identity 2-cells to identity transformations", (gamma, x))
    for (nu, mu), composite in t.vcomp.items():
        value = F.on_objects[t.tgt[t.dom[mu]]]
        for x in F.on_objects[t.src[t.dom[mu]]].objects:
            report.checked += 1
            if F.component(composite, x) != value.comp[(F.component(nu, x), F.component(mu, x))]:
                report.add("preserves vcomp", (nu, mu, x))
    for (mu2, mu1), composite in t.hcomp.items():
        gamma1 = t.dom[mu1]
        value = F.on_objects[t.tgt[t.dom[mu2]]]
        Fg1, Fd2 = F.on_one_cells[gamma1], F.on_one_cells[t.cod[mu2]]
        for x in F.on_objects[t.src[gamma1]].objects:
            report.checked += 1
            expected = value.comp[(Fd2.on_morphisms[F.component(mu1, x)], F.component(mu2, Fg1.on_objects[x]))]
            if F.component(composite, x) != expected:
                report.add("preserves hcomp", (mu2, mu1, x))
    return report


def _require_valid(F: TwoCatValuedFunctor) -> None:
    report = validate_two_cat_valued(F)
    if not report.ok:
        raise InvalidStructureError(f"not a strict 2-functor to Cat: {report.violations[0].law}", report)


def constant_two_functor(t: FinTwoCategory, k: FinCategory) -> TwoCatValuedFunctor:
    identity = identity_functor(k)
    return TwoCatValuedFunctor(
        t, {x: k for x in t.objects}, {f: identity for f in t.one_cells},
        {a: {x: k.ident[x] for x in k.objects} for a in t.two_cells},
    )


def locally_discrete_extension(F: CatValuedFunctor) -> TwoCatValuedFunctor:
    """A functor C → Cat read on the locally discrete 2-category of C"""
    t = two_category_from_category(F.base)
    return TwoCatValuedFunctor(
        t, F.on_objects, F.on_morphisms,
        {t.unit[f]: {x: F.on_objects[t.tgt[f]].ident[F.on_morphisms[f].on_objects[x]]
                     for x in F.on_objects[t.src[f]].objects}
         for f in t.one_cells},
    )


def representable_two_functor(t: FinTwoCategory, x: Cell) -> TwoCatValuedFunctor:
    """hom(x, −): postcomposition on 1-cells, whiskering on 2-cells"""
    on_one_cells = {}
    for gamma in t.one_cells:
        source, target = t.hom(x, t.src[gamma]), t.hom(x, t.tgt[gamma])
        unit = t.unit[gamma]
        on_one_cells[gamma] = FinFunctor(source, target,
                                         {f: t.comp[(gamma, f)] for f in source.objects},
                                         {a: t.hcomp[(unit, a)] for a in source.morphisms})
    on_two_cells = {mu: {f: t.hcomp[(mu, t.unit[f])] for f in t.hom(x, t.src[t.dom[mu]]).objects}
                    for mu in t.two_cells}
    return TwoCatValuedFunctor(t, {y: t.hom(x, y) for y in t.objects}, on_one_cells, on_two_cells)


def lax_cylinder_functor(k: FinCategory) -> TwoCatValuedFunctor:
    """
    F_K on C₂: a ↦ (0, id), b ↦ (1, id): K → [1] × K and a ⇒ b ↦ the
    transformation with components ((0, 1), id)
    """
    t = two_cell()
    cylinder = product(chain(1), k)
    inclusion = lambda end: FinFunctor(k, cylinder, {x: (end, x) for x in k.objects},
                                       {f: ((end, end), f) for f in k.morphisms})
    on_one_cells = {(0, 0): identity_functor(k), (1, 1): identity_functor(cylinder),
                    "a": inclusion(0), "b": inclusion(1)}
    on_two_cells = {}
    for mu in t.two_cells:
        gamma, delta = t.dom[mu], t.cod[mu]
        target = on_one_cells[gamma].target
        source = on_one_cells[gamma].source
        if gamma == delta:
            on_two_cells[mu] = {x: target.ident[on_one_cells[gamma].on_objects[x]] for x in source.objects}
        else:
            on_two_cells[mu] = {x: ((0, 1), k.ident[x]) for x in k.objects}
    return TwoCatValuedFunctor(t, {0: k, 1: cylinder}, on_one_cells, on_two_cells)


# ---------------------------------------------------------------------------
# Unstraightening and straightening
# ---------------------------------------------------------------------------

def unstraighten_2(F: TwoCatValuedFunctor, mode: Optional[str] = None) -> Tuple[TwoFunctor, TwoFibrationCertificate]:
    """
    E → C: objects (c, x), 1-cells (γ, x, φ) as for categories, and a 2-cell
    (a, b, μ) from a = (γ, x, φ) to b = (δ, x, ψ) whenever ψ∘F(μ)_x = φ

    Raises:
        InvalidStructureError: F is not a strict 2-functor, or has a
            non-gaunt value in iso mode
    """
    mode = mode or get_settings().mode
    _require_valid(F)
    non_gaunt = [c for c, value in F.on_objects.items() if not is_gaunt_category(value)]
    if non_gaunt:
        if mode == "iso":
            raise InvalidStructureError(f"value at {non_gaunt[0]!r} is not gaunt; use equiv mode")
        logger.warning("non-gaunt values at %s: the result is only equivalent to a 2-category", non_gaunt)
    t = F.base
    p, _ = unstraighten_1(F.underlying)
    E1 = p.source
    between: Dict[Tuple[Cell, Cell], List[Cell]] = {}
    for a in E1.morphisms:
        between.setdefault((E1.src[a], E1.tgt[a]), []).append(a)
    cells_over: Dict[Tuple[Cell, Cell], List[Cell]] = {}
    for mu in t.two_cells:
        cells_over.setdefault((t.dom[mu], t.cod[mu]), []).append(mu)

    two_cells = []
    for parallel in between.values():
        for a in parallel:
            gamma, x, phi = a
            value = F.on_objects[t.tgt[gamma]]
            for b in parallel:
                delta, _, psi = b
                for mu in cells_over.get((gamma, delta), ()):
                    if value.comp[(psi, F.component(mu, x))] == phi:
                        two_cells.append((a, b, mu))
    by_source: Dict[Cell, List[Tuple]] = {}
    by_object: Dict[Cell, List[Tuple]] = {}
    for cell in two_cells:
        by_source.setdefault(cell[0], []).append(cell)
        by_object.setdefault(E1.src[cell[0]], []).append(cell)
    vcomp = {(second, first): (first[0], second[1], t.vcomp[(second[2], first[2])])
             for first in two_cells for second in by_source.get(first[1], ())}
    hcomp = {(second, first): (E1.comp[(second[0], first[0])], E1.comp[(second[1], first[1])],
                               t.hcomp[(second[2], first[2])])
             for first in two_cells for second in by_object.get(E1.tgt[first[0]], ())}
    E = FinTwoCategory(
        objects=E1.objects, one_cells=E1.morphisms, src=E1.src, tgt=E1.tgt,
        ident=E1.ident, comp=E1.comp,
        two_cells=tuple(two_cells),
        dom={cell: cell[0] for cell in two_cells},
        cod={cell: cell[1] for cell in two_cells},
        unit={a: (a, a, t.unit[a[0]]) for a in E1.morphisms},
        vcomp=vcomp,
        hcomp=hcomp,
    )
    P = TwoFunctor(E, t, {o: o[0] for o in E.objects}, {a: a[0] for a in E.one_cells},
                   {cell: cell[2] for cell in two_cells})
    return P, is_1cocartesian_fibration(P, mode)


def choose_two_cleavage(P: TwoFunctor, certificate: TwoFibrationCertificate) -> Dict[Tuple[Cell, Cell], Cell]:
    """One cocartesian lift per (γ, d₀): identities over identities, otherwise the first"""
    D, C = P.source, P.target
    cleavage = {}
    for (gamma, d0), lifts in certificate.lifts.items():
        identity = D.ident[d0]
        cleavage[(gamma, d0)] = identity if C.ident[C.src[gamma]] == gamma and identity in lifts else lifts[0]
    return cleavage


def _split_failure(P: TwoFunctor, cleavage: Mapping[Tuple[Cell, Cell], Cell]) -> Optional[Tuple]:
    D, C = P.source, P.target
    for (gamma, d0), chosen in cleavage.items():
        if C.ident[C.src[gamma]] == gamma and chosen != D.ident[d0]:
            return (gamma, d0)
    for (g, f), gf in C.comp.items():
        for d0 in P.underlying.objects_over(C.src[f]):
            first = cleavage[(f, d0)]
            second = cleavage[(g, D.tgt[first])]
            if cleavage[(gf, d0)] != D.comp[(second, first)]:
                return (g, f, d0)
    return None


def _transport(P: TwoFunctor, cleavage: Mapping, gamma: Cell, source: FinCategory,
               target: FinCategory) -> FinFunctor:
    D = P.source
    on_objects = {x: D.tgt[cleavage[(gamma, x)]] for x in source.objects}
    moved = {}
    for u in source.morphisms:
        x, y = source.src[u], source.tgt[u]
        around = D.comp[(cleavage[(gamma, y)], u)]
        lift_x = cleavage[(gamma, x)]
        found = [v for v in target.hom(on_objects[x], on_objects[y]) if D.comp[(v, lift_x)] == around]
        if len(found) != 1:
            raise LiftUniquenessError(("transport", gamma, u), found)
        moved[u] = found[0]
    return FinFunctor(source, target, on_objects, moved)


def straighten_2(P: TwoFunctor, cleavage: Optional[Mapping[Tuple[Cell, Cell], Cell]] = None,
                 mode: Optional[str] = None) -> TwoCatValuedFunctor:
    """
    Fibers, transport along the chosen cocartesian 1-cells, and for μ: γ ⇒ δ
    the component at x read off the unique 2-cell over μ ending at the lift
    of δ, whose source factors through the lift of γ

    Raises:
        NotCertifiedError: P is not 1-cocartesian
        CleavageError: the cleavage is not split
        LiftUniquenessError: a local lift is missing or ambiguous
    """
    certificate = is_1cocartesian_fibration(P, mode)
    if not certificate.holds:
        raise NotCertifiedError("not a 1-cocartesian fibration", certificate.failures)
    cleavage = cleavage or choose_two_cleavage(P, certificate)
    failure = _split_failure(P, cleavage)
    if failure is not None:
        raise CleavageError("cleavage is not split", witness=failure)
    D, C = P.source, P.target
    values = {c: category_fiber(P.underlying, c) for c in C.objects}
    on_one_cells = {gamma: _transport(P, cleavage, gamma, values[C.src[gamma]], values[C.tgt[gamma]])
                    for gamma in C.one_cells}
    on_two_cells = {}
    for mu in C.two_cells:
        gamma, delta = C.dom[mu], C.cod[mu]
        target = values[C.tgt[gamma]]
        components = {}
        for x in values[C.src[gamma]].objects:
            end = cleavage[(delta, x)]
            local = [theta for theta in D.hom(x, D.tgt[end]).morphisms
                     if P.on_two_cells[theta] == mu and D.cod[theta] == end]
            if len(local) != 1:
                raise LiftUniquenessError(("2-cell", mu, x), local)
            start = D.dom[local[0]]
            lift_x = cleavage[(gamma, x)]
            found = [v for v in target.hom(D.tgt[lift_x], D.tgt[end]) if D.comp[(v, lift_x)] == start]
            if len(found) != 1:
                raise LiftUniquenessError(("component", mu, x), found)
            components[x] = found[0]
        on_two_cells[mu] = components
    return TwoCatValuedFunctor(C, values, on_one_cells, on_two_cells)


@dataclass
class LaxTransport:
    """Maps [2]^lax → D over C₂ from a fixed object, preserving the cocartesian 1-cells 01 and 02"""
    start: Cell
    functors: List[TwoFunctor] = field(default_factory=list)

    @property
    def unique(self) -> bool:
        return len(self.functors) == 1

    @property
    def component(self) -> Optional[Cell]:
        """Image of 12, the component of the straightened 2-cell at the start"""
        return self.functors[0].on_one_cells[(1, 2)] if self.unique else None


def lax_transport(P: TwoFunctor, x: Cell, mode: Optional[str] = None) -> LaxTransport:
    """
    Enumerate the maps [2]^lax → D over C₂ sending 0 to x with cocartesian
    01 and 02

    Raises:
        ValueError: the base of P is not C₂
        NotCertifiedError: P is not 1-cocartesian
    """
    if P.target != two_cell():
        raise ValueError("lax transport needs a fibration over the 2-cell C₂")
    certificate = is_1cocartesian_fibration(P, mode)
    if not certificate.holds:
        raise NotCertifiedError("not a 1-cocartesian fibration", certificate.failures)
    D = P.source
    L = lax_triangle()
    expected = lax_projection()
    result = LaxTransport(x)
    fiber = category_fiber(P.underlying, 1)
    for first in certificate.lifts.get(("a", x), ()):
        for diagonal in certificate.lifts.get(("b", x), ()):
            for step in fiber.hom(D.tgt[first], D.tgt[diagonal]):
                composite = D.comp[(step, first)]
                for theta in D.hom(x, D.tgt[diagonal]).morphisms:
                    if D.dom[theta] != composite or D.cod[theta] != diagonal or P.on_two_cells[theta] != ("a", "b"):
                        continue
                    on_objects = {0: x, 1: D.tgt[first], 2: D.tgt[diagonal]}
                    on_one_cells = {(i, i): D.ident[on_objects[i]] for i in L.objects}
                    on_one_cells.update({(0, 1): first, (1, 2): step, (0, 2): diagonal, (0, 1, 2): composite})
                    on_two_cells = {(f, f): D.unit[on_one_cells[f]] for f in L.one_cells}
                    on_two_cells[((0, 1, 2), (0, 2))] = theta
                    G = TwoFunctor(L, D, on_objects, on_one_cells, on_two_cells)
                    if validate_two_functor(G).ok and compose_two_functors(P, G) == expected:
                        result.functors.append(G)
    return result


# ---------------------------------------------------------------------------
# Agreement with the reflection
# ---------------------------------------------------------------------------

def copresheaf_2(F: TwoCatValuedFunctor) -> Tuple[DoubleFunctor, FibrationCertificate]:
    """
    The (left, cart)-fibration X_F → double_nerve(C): cells as for categories,
    with a square (μ, f) over each 2-cell μ whose right edge is μ_y∘F(γ)(f)
    """
    _require_valid(F)
    t = F.base
    U = t.underlying
    objects = tuple((c, x) for c in t.objects for x in F.on_objects[c].objects)
    value = lambda c: F.on_objects[c]

    h_arrows = tuple((gamma, x) for gamma in U.morphisms for x in value(U.src[gamma]).objects)
    h_tgt = {(gamma, x): (U.tgt[gamma], F.on_one_cells[gamma].on_objects[x]) for (gamma, x) in h_arrows}
    h_from: Dict[Cell, List[Tuple]] = {}
    for a in h_arrows:
        h_from.setdefault((U.src[a[0]], a[1]), []).append(a)
    horizontal = FinCategory(
        objects=objects, morphisms=h_arrows,
        src={(gamma, x): (U.src[gamma], x) for (gamma, x) in h_arrows}, tgt=h_tgt,
        ident={(c, x): (U.ident[c], x) for (c, x) in objects},
        comp={(second, first): (U.comp[(second[0], first[0])], first[1])
              for first in h_arrows for second in h_from.get(h_tgt[first], ())},
    )
    v_arrows = tuple((c, f) for c in t.objects for f in value(c).morphisms)
    vertical = FinCategory(
        objects=objects, morphisms=v_arrows,
        src={(c, f): (c, value(c).src[f]) for (c, f) in v_arrows},
        tgt={(c, f): (c, value(c).tgt[f]) for (c, f) in v_arrows},
        ident={(c, x): (c, value(c).ident[x]) for (c, x) in objects},
        comp={((c, g), (c, f)): (c, gf) for c in t.objects for (g, f), gf in value(c).comp.items()},
    )

    squares = tuple((mu, f) for mu in t.two_cells for f in value(t.src[t.dom[mu]]).morphisms)
    source_of = lambda mu: value(t.src[t.dom[mu]])
    right = {}
    for (mu, f) in squares:
        c_prime = t.tgt[t.dom[mu]]
        moved = F.on_one_cells[t.dom[mu]].on_morphisms[f]
        right[(mu, f)] = (c_prime, value(c_prime).comp[(F.component(mu, source_of(mu).tgt[f]), moved)])
    left = {(mu, f): (t.src[t.dom[mu]], f) for (mu, f) in squares}
    by_left: Dict[Cell, List[Tuple]] = {}
    by_top: Dict[Cell, List[Tuple]] = {}
    top = {(mu, f): (t.dom[mu], source_of(mu).src[f]) for (mu, f) in squares}
    bottom = {(mu, f): (t.cod[mu], source_of(mu).tgt[f]) for (mu, f) in squares}
    for s in squares:
        by_left.setdefault(left[s], []).append(s)
        by_top.setdefault(top[s], []).append(s)
    hpaste = {(second, first): (t.hcomp[(second[0], first[0])], first[1])
              for first in squares for second in by_left.get(right[first], ())}
    vpaste = {(second, first): (t.vcomp[(second[0], first[0])], source_of(first[0]).comp[(second[1], first[1])])
              for first in squares for second in by_top.get(bottom[first], ())}
    X = build_double(
        horizontal, vertical, squares, top, bottom, left, right,
        h_identity={(c, f): (t.unit[t.ident[c]], f) for (c, f) in v_arrows},
        v_identity={(gamma, x): (t.unit[gamma], value(U.src[gamma]).ident[x]) for (gamma, x) in h_arrows},
        hpaste=hpaste,
        vpaste=vpaste,
    )
    projection = DoubleFunctor(
        X, double_nerve(t),
        {(c, x): c for (c, x) in objects},
        {(gamma, x): gamma for (gamma, x) in h_arrows},
        {(c, f): c for (c, f) in v_arrows},
        {(mu, f): mu for (mu, f) in squares},
    )
    return projection, check_fibration(projection, "left-cart", paranoid=False)


@dataclass
class PipelineReport:
    """unstraighten_2(F) against the 2-category carried by Ψ⊥(X_F)"""
    checks: Dict[str, bool] = field(default_factory=dict)
    functor: Optional[TwoFunctor] = None
    witness: Optional[Tuple[Any, ...]] = None

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ok': self.ok,
            'checks': dict(sorted(self.checks.items())),
            'witness': None if self.witness is None else [repr(w) for w in self.witness],
        }


def _bijective(mapping: Mapping, domain: Sequence, codomain: Sequence) -> bool:
    images = [mapping[a] for a in domain]
    return len(set(images)) == len(images) == len(codomain) and set(images) == set(codomain)


def unstraighten_2_pipeline(F: TwoCatValuedFunctor, mode: Optional[str] = None) -> PipelineReport:
    """
    Send (γ, x, φ) to the h-arrow ((γ, x), (c′, φ)) of Ψ⊥(X_F) and each 2-cell
    to the square with the same boundary over the same 2-cell of C
    """
    P, certificate = unstraighten_2(F, mode)
    report = PipelineReport()
    report.checks['certified'] = certificate.holds
    projection, x_certificate = copresheaf_2(F)
    reflection = reflect_perp(projection, x_certificate)
    R = reflection.double
    try:
        T = two_category_of(R)
    except InvalidStructureError as error:
        report.checks['identity verticals'] = False
        report.witness = ("reflection", str(error))
        return report
    report.checks['identity verticals'] = True
    E = P.source
    on_one_cells = {(gamma, x, phi): ((gamma, x), (E.tgt[(gamma, x, phi)][0], phi)) for (gamma, x, phi) in E.one_cells}
    on_two_cells = {}
    V = R.vertical
    for cell in E.two_cells:
        a, b, mu = cell
        found = [s for s in R.squares_with_boundary(on_one_cells[a], on_one_cells[b],
                                                    V.ident[E.src[a]], V.ident[E.tgt[a]])
                 if reflection.projection.on_squares[s] == mu]
        if len(found) != 1:
            report.checks['squares match'] = False
            report.witness = ("2-cell", cell, len(found))
            return report
        on_two_cells[cell] = found[0]
    report.checks['squares match'] = True
    comparison = TwoFunctor(E, T, {x: x for x in E.objects}, on_one_cells, on_two_cells)
    report.functor = comparison
    report.checks['2-functor'] = validate_two_functor(comparison).ok
    report.checks['over base'] = compose_two_functors(two_functor_of(reflection.projection), comparison) == P
    report.checks['bijective'] = (_bijective(comparison.on_objects, E.objects, T.objects)
                                  and _bijective(on_one_cells, E.one_cells, T.one_cells)
                                  and _bijective(on_two_cells, E.two_cells, T.two_cells))
    if not report.ok:
        report.witness = tuple(name for name, ok in report.checks.items() if not ok)
    logger.info("unstraightening pipeline: %s", "agrees" if report.ok else "differs")
    return report
