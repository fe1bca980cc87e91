"""
Straightening and unstraightening over a finite category

Un(F) for a strict functor F: C → Cat has objects (c, x) with x in F(c) and
morphisms (γ, x, φ) with γ: c → c′ and φ: F(γ)(x) → x′ in F(c′).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

from .core_cat import (
    Cell,
    Cleavage,
    FinCategory,
    FinFunctor,
    ValidationReport,
    chain,
    choose_cleavage,
    cocartesian_fibration_report,
    compose_functors,
    discrete,
    identity_functor,
    invertible,
    is_gaunt_category,
    is_isomorphism,
    opposite,
    opposite_functor,
    split_failure,
    validate_category,
    validate_functor,
)
from .core_cat import fiber as category_fiber
from .dblcat import DoubleFunctor, boxtimes, build_double
from .errors import CleavageError, InvalidStructureError, LiftUniquenessError, NotCertifiedError
from .fibr import FibrationCertificate, check_fibration
from .reflect import reflect_perp

logger = logging.getLogger(__name__)

VARIANCES = ("cocartesian", "cartesian")


@dataclass(frozen=True, eq=False)
class CatValuedFunctor:
    """A strict functor C → Cat given by a category per object and a functor per morphism"""
    base: FinCategory
    on_objects: Mapping[Cell, FinCategory]
    on_morphisms: Mapping[Cell, FinFunctor]

    def __repr__(self) -> str:
        return f"CatValuedFunctor({self.base!r})"

    def __call__(self, c: Cell) -> FinCategory:
        return self.on_objects[c]


def validate_cat_valued(F: CatValuedFunctor, variance: str = "cocartesian") -> ValidationReport:
    """
    Every value is a category, every F(γ) a functor between the right values,
    and F preserves identities and composites on the nose; a cartesian F is
    contravariant
    """
    if variance not in VARIANCES:
        raise ValueError(f"variance must be one of {', '.join(VARIANCES)}")
    C = F.base if variance == "cocartesian" else opposite(F.base)
    report = ValidationReport("cat-valued functor")
    for c in C.objects:
        if c not in F.on_objects:
            report.add("value on every object", (c,))
            continue
        report.merge(validate_category(F.on_objects[c]), prefix=f"F({c!r}): ")
    for gamma in C.morphisms:
        report.checked += 1
        Fg = F.on_morphisms.get(gamma)
        if Fg is None:
            report.add("value on every morphism", (gamma,))
            continue
        if not (Fg.source == F.on_objects.get(C.src[gamma]) and Fg.target == F.on_objects.get(C.tgt[gamma])):
            report.add("functor between the values", (gamma,))
            continue
        report.merge(validate_functor(Fg), prefix=f"F({gamma!r}): ")
    if not report.ok:
        return report
    for c in C.objects:
        report.checked += 1
        if F.on_morphisms[C.ident[c]] != identity_functor(F.on_objects[c]):
            report.add("preserves identities", (c,))
    for (g, f), gf in C.comp.items():
        report.checked += 1
        if F.on_morphisms[gf] != compose_functors(F.on_morphisms[g], F.on_morphisms[f]):
            report.add("preserves composition", (g, f))
    return report


def _require_valid(F: CatValuedFunctor, variance: str = "cocartesian") -> None:
    report = validate_cat_valued(F, variance)
    if not report.ok:
        raise InvalidStructureError(f"not a strict functor to Cat: {report.violations[0].law}", report)


# ---------------------------------------------------------------------------
# Examples
# ---------------------------------------------------------------------------

def constant_functor(c: FinCategory, k: FinCategory) -> CatValuedFunctor:
    """Every object to K, every morphism to the identity of K"""
    identity = identity_functor(k)
    return CatValuedFunctor(c, {x: k for x in c.objects}, {f: identity for f in c.morphisms})


def representable_functor(c: FinCategory, x: Cell) -> CatValuedFunctor:
    """C(x, −) with discrete values; γ acts by postcomposition"""
    values = {y: discrete(c.hom(x, y)) for y in c.objects}
    on_morphisms = {}
    for gamma in c.morphisms:
        source, target = values[c.src[gamma]], values[c.tgt[gamma]]
        post = {f: c.comp[(gamma, f)] for f in source.objects}
        on_morphisms[gamma] = FinFunctor(source, target, post,
                                         {(f, f): (post[f], post[f]) for f in source.objects})
    return CatValuedFunctor(c, values, on_morphisms)


def opposite_values(F: CatValuedFunctor) -> CatValuedFunctor:
    """The covariant functor on C^op with opposite values, for a contravariant F"""
    return CatValuedFunctor(
        opposite(F.base),
        {c: opposite(value) for c, value in F.on_objects.items()},
        {g: opposite_functor(Fg) for g, Fg in F.on_morphisms.items()},
    )


# ---------------------------------------------------------------------------
# Unstraightening
# ---------------------------------------------------------------------------

def _grothendieck(F: CatValuedFunctor) -> Tuple[FinFunctor, Cleavage]:
    C = F.base
    objects = [(c, x) for c in C.objects for x in F.on_objects[c].objects]
    morphisms, src, tgt = [], {}, {}
    lifts = {}
    for gamma in C.morphisms:
        c, c_prime = C.src[gamma], C.tgt[gamma]
        Fg, target = F.on_morphisms[gamma], F.on_objects[c_prime]
        for x in F.on_objects[c].objects:
            y = Fg.on_objects[x]
            for phi in target.out_of(y):
                a = (gamma, x, phi)
                morphisms.append(a)
                src[a] = (c, x)
                tgt[a] = (c_prime, target.tgt[phi])
            lifts[(gamma, (c, x))] = (gamma, x, target.ident[y])
    by_source: Dict[Cell, List[Tuple]] = {}
    for a in morphisms:
        by_source.setdefault(src[a], []).append(a)
    comp = {}
    for first in morphisms:
        gamma, x, phi = first
        for second in by_source.get(tgt[first], ()):
            gamma2, _, phi2 = second
            value = F.on_objects[C.tgt[gamma2]]
            moved = F.on_morphisms[gamma2].on_morphisms[phi]
            comp[(second, first)] = (C.comp[(gamma2, gamma)], x, value.comp[(phi2, moved)])
    E = FinCategory(
        objects=tuple(objects),
        morphisms=tuple(morphisms),
        src=src,
        tgt=tgt,
        ident={(c, x): (C.ident[c], x, F.on_objects[c].ident[x]) for (c, x) in objects},
        comp=comp,
    )
    p = FinFunctor(E, C, {o: o[0] for o in objects}, {a: a[0] for a in morphisms})
    return p, Cleavage(p, "cocartesian", lifts)


def unstraighten_1(F: CatValuedFunctor, variance: str = "cocartesian") -> Tuple[FinFunctor, Cleavage]:
    """
    Un(F) → C with its canonical split cleavage

    With variance="cartesian", F is contravariant and the result is the
    cartesian fibration (Un(F^op))^op, whose lifts are (γ, x, identity).

    Raises:
        InvalidStructureError: F is not a strict functor
    """
    _require_valid(F, variance)
    if variance == "cocartesian":
        p, cleavage = _grothendieck(F)
    else:
        q, dual = _grothendieck(opposite_values(F))
        p = opposite_functor(q)
        cleavage = Cleavage(p, "cartesian", dual.lifts)
    logger.info("unstraightened %r: %d objects, %d morphisms",
                F, len(p.source.objects), len(p.source.morphisms))
    return p, cleavage


def unstraighten_transformation(F: CatValuedFunctor, G: CatValuedFunctor,
                                eta: Mapping[Cell, FinFunctor]) -> FinFunctor:
    """
    Strong map Un(F) → Un(G) over C induced by a natural transformation η

    Raises:
        InvalidStructureError: η is not natural or has the wrong components
    """
    C = F.base
    for c in C.objects:
        component = eta.get(c)
        if component is None or component.source != F.on_objects[c] or component.target != G.on_objects[c]:
            raise InvalidStructureError(f"component at {c!r} does not map F({c!r}) to G({c!r})")
    for gamma in C.morphisms:
        c, c_prime = C.src[gamma], C.tgt[gamma]
        if compose_functors(eta[c_prime], F.on_morphisms[gamma]) != compose_functors(G.on_morphisms[gamma], eta[c]):
            raise InvalidStructureError(f"naturality fails at {gamma!r}")
    source, _ = unstraighten_1(F)
    target, _ = unstraighten_1(G)
    return FinFunctor(
        source.source, target.source,
        {(c, x): (c, eta[c].on_objects[x]) for (c, x) in source.source.objects},
        {(gamma, x, phi): (gamma, eta[C.src[gamma]].on_objects[x], eta[C.tgt[gamma]].on_morphisms[phi])
         for (gamma, x, phi) in source.source.morphisms},
    )


# ---------------------------------------------------------------------------
# Straightening
# ---------------------------------------------------------------------------

def straighten_1(p: FinFunctor, cleavage: Optional[Cleavage] = None) -> CatValuedFunctor:
    """
    St(p): c ↦ fiber of p at c, γ ↦ transport along the chosen cocartesian lifts

    A morphism u: x → y of the fiber goes to the unique v with
    v∘lift(γ, x) = lift(γ, y)∘u.

    Raises:
        NotCertifiedError: p is not a cocartesian fibration
        CleavageError: the cleavage is not split (witness names the failing composite)
        LiftUniquenessError: a transported morphism is missing or ambiguous
    """
    report = cocartesian_fibration_report(p)
    if not report.holds:
        raise NotCertifiedError("not a cocartesian fibration", report.failures)
    cleavage = cleavage or choose_cleavage(p, "cocartesian")
    if cleavage.orientation != "cocartesian":
        raise ValueError("straightening needs a cocartesian cleavage")
    failure = split_failure(cleavage)
    if failure is not None:
        raise CleavageError("cleavage is not split", witness=failure)
    D, C = p.source, p.target
    values = {c: category_fiber(p, c) for c in C.objects}
    on_morphisms = {}
    for gamma in C.morphisms:
        source, target = values[C.src[gamma]], values[C.tgt[gamma]]
        on_objects = {x: D.tgt[cleavage.lift(gamma, x)] for x in source.objects}
        moved = {}
        for u in source.morphisms:
            x, y = source.src[u], source.tgt[u]
            around = D.comp[(cleavage.lift(gamma, y), u)]
            lift_x = cleavage.lift(gamma, x)
            found = [v for v in target.hom(on_objects[x], on_objects[y]) if D.comp[(v, lift_x)] == around]
            if len(found) != 1:
                raise LiftUniquenessError(("transport", gamma, u), found)
            moved[u] = found[0]
        on_morphisms[gamma] = FinFunctor(source, target, on_objects, moved)
    return CatValuedFunctor(C, values, on_morphisms)


def _fiber_identification(F: CatValuedFunctor, c: Cell, value: FinCategory) -> FinFunctor:
    """F(c) → fiber of Un(F) at c, x ↦ (c, x), φ ↦ (id, x, φ)"""
    C, Fc = F.base, F.on_objects[c]
    return FinFunctor(Fc, value, {x: (c, x) for x in Fc.objects},
                      {phi: (C.ident[c], Fc.src[phi], phi) for phi in Fc.morphisms})


def straighten_roundtrip(F: CatValuedFunctor) -> ValidationReport:
    """St(Un(F)) = F, reading each fiber through x ↦ (c, x)"""
    p, cleavage = unstraighten_1(F)
    G = straighten_1(p, cleavage)
    C = F.base
    report = ValidationReport("straighten ∘ unstraighten")
    identifications = {}
    for c in C.objects:
        report.checked += 1
        i = _fiber_identification(F, c, G.on_objects[c])
        identifications[c] = i
        if not (validate_functor(i).ok and is_isomorphism(i)):
            report.add("fiber identification", (c,))
    if not report.ok:
        return report
    for gamma in C.morphisms:
        report.checked += 1
        left = compose_functors(G.on_morphisms[gamma], identifications[C.src[gamma]])
        right = compose_functors(identifications[C.tgt[gamma]], F.on_morphisms[gamma])
        if left != right:
            report.add("transport agrees", (gamma,))
    return report


def unstraighten_comparison(p: FinFunctor, cleavage: Optional[Cleavage] = None) -> Tuple[FinFunctor, bool]:
    """
    Un(St(p)) → D over C: (c, x) ↦ x and (γ, x, φ) ↦ φ∘lift(γ, x)

    Returns:
        Tuple: (comparison functor, whether it is an isomorphism over C)
    """
    cleavage = cleavage or choose_cleavage(p, "cocartesian")
    G = straighten_1(p, cleavage)
    q, _ = unstraighten_1(G)
    D = p.source
    comparison = FinFunctor(
        q.source, D,
        {(c, x): x for (c, x) in q.source.objects},
        {(gamma, x, phi): D.comp[(phi, cleavage.lift(gamma, x))] for (gamma, x, phi) in q.source.morphisms},
    )
    over_base = compose_functors(p, comparison) == q
    return comparison, over_base and validate_functor(comparison).ok and is_isomorphism(comparison)


# ---------------------------------------------------------------------------
# The copresheaf as a double category
# ---------------------------------------------------------------------------

def copresheaf_of(F: CatValuedFunctor) -> Tuple[DoubleFunctor, FibrationCertificate]:
    """
    The (left, cart)-fibration X_F → C ⊠ [0]

    Objects (c, x); h-arrows (γ, x): (c, x) → (c′, F(γ)x); v-arrows (c, f)
    for f in F(c); squares (γ, f) with right edge (c′, F(γ)(f)).

    Raises:
        InvalidStructureError: F is not a strict functor
    """
    _require_valid(F)
    C = F.base
    objects = tuple((c, x) for c in C.objects for x in F.on_objects[c].objects)
    image = lambda gamma, x: F.on_morphisms[gamma].on_objects[x]

    h_arrows = tuple((gamma, x) for gamma in C.morphisms for x in F.on_objects[C.src[gamma]].objects)
    h_by_source: Dict[Cell, List[Tuple]] = {}
    for a in h_arrows:
        h_by_source.setdefault((C.src[a[0]], a[1]), []).append(a)
    h_tgt = {(gamma, x): (C.tgt[gamma], image(gamma, x)) for (gamma, x) in h_arrows}
    horizontal = FinCategory(
        objects=objects,
        morphisms=h_arrows,
        src={(gamma, x): (C.src[gamma], x) for (gamma, x) in h_arrows},
        tgt=h_tgt,
        ident={(c, x): (C.ident[c], x) for (c, x) in objects},
        comp={(second, first): (C.comp[(second[0], first[0])], first[1])
              for first in h_arrows for second in h_by_source.get(h_tgt[first], ())},
    )

    v_arrows = tuple((c, f) for c in C.objects for f in F.on_objects[c].morphisms)
    vertical = FinCategory(
        objects=objects,
        morphisms=v_arrows,
        src={(c, f): (c, F.on_objects[c].src[f]) for (c, f) in v_arrows},
        tgt={(c, f): (c, F.on_objects[c].tgt[f]) for (c, f) in v_arrows},
        ident={(c, x): (c, F.on_objects[c].ident[x]) for (c, x) in objects},
        comp={((c, g), (c, f)): (c, gf) for c in C.objects
              for (g, f), gf in F.on_objects[c].comp.items()},
    )

    squares = tuple((gamma, f) for gamma in C.morphisms for f in F.on_objects[C.src[gamma]].morphisms)
    by_left: Dict[Cell, List[Tuple]] = {}
    for s in squares:
        by_left.setdefault((C.src[s[0]], s[1]), []).append(s)
    right = {(gamma, f): (C.tgt[gamma], F.on_morphisms[gamma].on_morphisms[f]) for (gamma, f) in squares}
    hpaste = {(t, s): (C.comp[(t[0], s[0])], s[1]) for s in squares for t in by_left.get(right[s], ())}
    vpaste = {}
    for gamma in C.morphisms:
        value = F.on_objects[C.src[gamma]]
        for (g, f), gf in value.comp.items():
            vpaste[((gamma, g), (gamma, f))] = (gamma, gf)
    X = build_double(
        horizontal, vertical, squares,
        top={(gamma, f): (gamma, F.on_objects[C.src[gamma]].src[f]) for (gamma, f) in squares},
        bottom={(gamma, f): (gamma, F.on_objects[C.src[gamma]].tgt[f]) for (gamma, f) in squares},
        left={(gamma, f): (C.src[gamma], f) for (gamma, f) in squares},
        right=right,
        h_identity={(c, f): (C.ident[c], f) for (c, f) in v_arrows},
        v_identity={(gamma, x): (gamma, F.on_objects[C.src[gamma]].ident[x]) for (gamma, x) in h_arrows},
        hpaste=hpaste,
        vpaste=vpaste,
    )
    projection = DoubleFunctor(
        X, boxtimes(C, chain(0)),
        {(c, x): (c, 0) for (c, x) in objects},
        {(gamma, x): (gamma, 0) for (gamma, x) in h_arrows},
        {(c, f): (c, (0, 0)) for (c, f) in v_arrows},
        {(gamma, f): (gamma, (0, 0)) for (gamma, f) in squares},
    )
    return projection, check_fibration(projection, "left-cart", paranoid=False)


@dataclass
class UnReflectReport:
    """Un(F) against the horizontal category of Ψ⊥(X_F)"""
    counts_match: bool
    isomorphism: bool
    vertical_invertible: bool
    gaunt_fibers: bool
    functor: Optional[FinFunctor] = None
    witness: Optional[Tuple[Any, ...]] = None
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.counts_match and self.isomorphism and self.vertical_invertible

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ok': self.ok,
            'counts_match': self.counts_match,
            'isomorphism': self.isomorphism,
            'vertical_invertible': self.vertical_invertible,
            'gaunt_fibers': self.gaunt_fibers,
            'witness': None if self.witness is None else [repr(w) for w in self.witness],
        }


def check_un_equals_reflect(F: CatValuedFunctor) -> UnReflectReport:
    """
    Compare Un(F) with the horizontal category of the reflection of X_F
    through (f, v) ↦ (γ, x, φ) for f = (γ, x) and v = (c′, φ)

    The v-arrows of the reflection must be invertible fiber morphisms, so
    that on gaunt fibers it is of the form E ⊠ [0].
    """
    projection, certificate = copresheaf_of(F)
    reflection = reflect_perp(projection, certificate)
    R = reflection.double
    U, _ = unstraighten_1(F)
    E = U.source
    gaunt = all(is_gaunt_category(value) for value in F.on_objects.values())
    vertical_invertible = all(invertible(F.on_objects[c], f) for (c, f) in R.v_arrows)
    if gaunt:
        vertical_invertible = vertical_invertible and all(
            F.on_objects[c].is_identity(f) for (c, f) in R.v_arrows)
    counts = len(R.h_arrows) == len(E.morphisms) and len(R.objects) == len(E.objects)
    report = UnReflectReport(counts, False, vertical_invertible, gaunt)
    if not counts:
        report.witness = ("counts", len(R.h_arrows), len(E.morphisms))
        return report
    comparison = FinFunctor(
        R.horizontal, E,
        {x: x for x in R.objects},
        {(f, v): (f[0], f[1], v[1]) for (f, v) in R.h_arrows},
    )
    report.functor = comparison
    report.checks['functor'] = validate_functor(comparison).ok
    report.checks['over base'] = all(U.on_morphisms[comparison.on_morphisms[a]] == a[0][0] for a in R.h_arrows)
    report.isomorphism = all(report.checks.values()) and is_isomorphism(comparison)
    if not report.isomorphism:
        report.witness = tuple(name for name, ok in report.checks.items() if not ok) or ("not bijective",)
    logger.info("Un(F) against the reflection: %s", "isomorphic" if report.ok else "mismatch")
    return report
