"""
Finite strict double categories
Generating shapes [m, n], Ar[n], Tw[n], the involutions op_1, op_2 and rev,
double functors and nerve evaluation
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .config import resolve_cap
from .core_cat import (
    Cell,
    FinCategory,
    FinFunctor,
    ValidationReport,
    chain,
    full_subcategory,
    invertible,
    opposite,
    product,
    pullback,
    validate_category,
    validate_functor,
)
from .errors import CellNotFound, ResourceLimitExceeded

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FinDoubleCategory:
    """
    Finite strict double category as four categories sharing cells

    horizontal   objects and h-arrows
    vertical     objects and v-arrows
    squares_h    v-arrows and squares under horizontal pasting (src = left, tgt = right)
    squares_v    h-arrows and squares under vertical pasting (src = top, tgt = bottom)
    """
    horizontal: FinCategory
    vertical: FinCategory
    squares_h: FinCategory
    squares_v: FinCategory

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinDoubleCategory):
            return NotImplemented
        return (self.horizontal == other.horizontal and self.vertical == other.vertical
                and self.squares_h == other.squares_h and self.squares_v == other.squares_v)

    __hash__ = None

    def __repr__(self) -> str:
        return (f"FinDoubleCategory({len(self.objects)} objects, {len(self.h_arrows)} h, "
                f"{len(self.v_arrows)} v, {len(self.squares)} squares)")

    @property
    def objects(self) -> Tuple[Cell, ...]:
        return self.horizontal.objects

    @property
    def h_arrows(self) -> Tuple[Cell, ...]:
        return self.horizontal.morphisms

    @property
    def v_arrows(self) -> Tuple[Cell, ...]:
        return self.vertical.morphisms

    @property
    def squares(self) -> Tuple[Cell, ...]:
        return self.squares_h.morphisms

    def top(self, s: Cell) -> Cell:
        return self.squares_v.src[s]

    def bottom(self, s: Cell) -> Cell:
        return self.squares_v.tgt[s]

    def left(self, s: Cell) -> Cell:
        return self.squares_h.src[s]

    def right(self, s: Cell) -> Cell:
        return self.squares_h.tgt[s]

    def boundary(self, s: Cell) -> Tuple[Cell, Cell, Cell, Cell]:
        """(top, bottom, left, right)"""
        return (self.top(s), self.bottom(s), self.left(s), self.right(s))

    def hpaste(self, t: Cell, s: Cell) -> Cell:
        """s then t, side by side (right(s) = left(t))"""
        return self.squares_h.compose(t, s)

    def vpaste(self, t: Cell, s: Cell) -> Cell:
        """s above t (bottom(s) = top(t))"""
        return self.squares_v.compose(t, s)

    def h_identity_square(self, v: Cell) -> Cell:
        """Identity square on a v-arrow: left = right = v"""
        return self.squares_h.ident[v]

    def v_identity_square(self, f: Cell) -> Cell:
        """Identity square on an h-arrow: top = bottom = f"""
        return self.squares_v.ident[f]

    @cached_property
    def _squares_by_boundary(self) -> Dict[Tuple[Cell, Cell, Cell, Cell], Tuple[Cell, ...]]:
        index: Dict[Tuple, List[Cell]] = {}
        for s in self.squares:
            index.setdefault(self.boundary(s), []).append(s)
        return {key: tuple(value) for key, value in index.items()}

    def squares_with_boundary(self, top: Cell, bottom: Cell, left: Cell, right: Cell) -> Tuple[Cell, ...]:
        return self._squares_by_boundary.get((top, bottom, left, right), ())


@dataclass(frozen=True, eq=False)
class MarkedDoubleCategory:
    """A double category with a marked, identity-containing set of v-arrows or h-arrows"""
    base: FinDoubleCategory
    marked: frozenset
    direction: str = "vertical"

    def __repr__(self) -> str:
        return f"MarkedDoubleCategory({self.direction}, {len(self.marked)} marked, {self.base!r})"

    @property
    def marked_category(self) -> FinCategory:
        return self.base.vertical if self.direction == "vertical" else self.base.horizontal


def validate_marking(m: MarkedDoubleCategory) -> ValidationReport:
    report = ValidationReport("marking")
    if m.direction not in ("vertical", "horizontal"):
        report.add("direction", (m.direction,), "direction must be vertical or horizontal")
        return report
    cat = m.marked_category
    for x in cat.objects:
        report.checked += 1
        if cat.ident[x] not in m.marked:
            report.add("identities are marked", (x,))
    for f in m.marked:
        if f not in cat.morphism_set:
            report.add("marked cells exist", (f,))
    return report


@dataclass(frozen=True, eq=False)
class DoubleFunctor:
    """Map of double categories given on all four kinds of cells"""
    source: FinDoubleCategory
    target: FinDoubleCategory
    on_objects: Mapping[Cell, Cell]
    on_h: Mapping[Cell, Cell]
    on_v: Mapping[Cell, Cell]
    on_squares: Mapping[Cell, Cell]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DoubleFunctor):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and dict(self.on_objects) == dict(other.on_objects)
                and dict(self.on_h) == dict(other.on_h)
                and dict(self.on_v) == dict(other.on_v)
                and dict(self.on_squares) == dict(other.on_squares))

    __hash__ = None

    def __repr__(self) -> str:
        return f"DoubleFunctor({self.source!r} → {self.target!r})"

    @cached_property
    def horizontal_part(self) -> FinFunctor:
        return FinFunctor(self.source.horizontal, self.target.horizontal, self.on_objects, self.on_h)

    @cached_property
    def vertical_part(self) -> FinFunctor:
        return FinFunctor(self.source.vertical, self.target.vertical, self.on_objects, self.on_v)

    @cached_property
    def squares_h_part(self) -> FinFunctor:
        return FinFunctor(self.source.squares_h, self.target.squares_h, self.on_v, self.on_squares)

    @cached_property
    def squares_v_part(self) -> FinFunctor:
        return FinFunctor(self.source.squares_v, self.target.squares_v, self.on_h, self.on_squares)

    def apply(self, kind: str, cell: Cell) -> Cell:
        table = {'object': self.on_objects, 'h': self.on_h, 'v': self.on_v, 'square': self.on_squares}[kind]
        return table[cell]


def build_double(horizontal: FinCategory, vertical: FinCategory,
                 squares: Sequence[Cell], top: Mapping, bottom: Mapping,
                 left: Mapping, right: Mapping,
                 h_identity: Mapping, v_identity: Mapping,
                 hpaste: Mapping, vpaste: Mapping) -> FinDoubleCategory:
    """Assemble a double category from square boundaries and pasting tables"""
    squares = tuple(squares)
    squares_h = FinCategory(
        objects=vertical.morphisms, morphisms=squares,
        src=left, tgt=right, ident=h_identity, comp=hpaste,
    )
    squares_v = FinCategory(
        objects=horizontal.morphisms, morphisms=squares,
        src=top, tgt=bottom, ident=v_identity, comp=vpaste,
    )
    return FinDoubleCategory(horizontal, vertical, squares_h, squares_v)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_double(d: FinDoubleCategory) -> ValidationReport:
    """
    Check all FinDoubleCategory invariants, including interchange on every
    composable 2×2 grid of squares
    """
    report = ValidationReport("double category")
    for name, cat in (("horizontal", d.horizontal), ("vertical", d.vertical),
                      ("squares_h", d.squares_h), ("squares_v", d.squares_v)):
        report.merge(validate_category(cat), prefix=f"{name}: ")
    if not report.ok:
        return report

    if d.horizontal.object_set != d.vertical.object_set:
        report.add("shared objects", (), "horizontal and vertical object sets differ")
    if d.squares_h.object_set != d.vertical.morphism_set:
        report.add("squares_h objects are v-arrows", ())
    if d.squares_v.object_set != d.horizontal.morphism_set:
        report.add("squares_v objects are h-arrows", ())
    if d.squares_h.morphism_set != d.squares_v.morphism_set:
        report.add("one square set", ())
    if not report.ok:
        return report

    H, V = d.horizontal, d.vertical
    for s in d.squares:
        report.checked += 1
        top, bottom, left, right = d.boundary(s)
        if H.src[top] != V.src[left] or H.tgt[top] != V.src[right] \
                or H.src[bottom] != V.tgt[left] or H.tgt[bottom] != V.tgt[right]:
            report.add("square boundary compatible", (s,), f"boundary {top!r}/{bottom!r}/{left!r}/{right!r}")
    for v in d.v_arrows:
        s = d.h_identity_square(v)
        if d.top(s) != H.ident[V.src[v]] or d.bottom(s) != H.ident[V.tgt[v]]:
            report.add("identity square on v-arrow has identity top and bottom", (v, s))
    for f in d.h_arrows:
        s = d.v_identity_square(f)
        if d.left(s) != V.ident[H.src[f]] or d.right(s) != V.ident[H.tgt[f]]:
            report.add("identity square on h-arrow has identity sides", (f, s))
    for x in d.objects:
        if d.h_identity_square(V.ident[x]) != d.v_identity_square(H.ident[x]):
            report.add("one identity square per object", (x,))
    if not report.ok:
        return report

    for (t, s), ts in d.squares_h.comp.items():
        report.checked += 1
        if d.top(ts) != H.comp[(d.top(t), d.top(s))] or d.bottom(ts) != H.comp[(d.bottom(t), d.bottom(s))]:
            report.add("horizontal pasting composes tops and bottoms", (t, s))
    for (t, s), ts in d.squares_v.comp.items():
        report.checked += 1
        if d.left(ts) != V.comp[(d.left(t), d.left(s))] or d.right(ts) != V.comp[(d.right(t), d.right(s))]:
            report.add("vertical pasting composes sides", (t, s))
    for (g, f), gf in H.comp.items():
        if d.hpaste(d.v_identity_square(g), d.v_identity_square(f)) != d.v_identity_square(gf):
            report.add("horizontal pasting of identity squares", (g, f))
    for (g, f), gf in V.comp.items():
        if d.vpaste(d.h_identity_square(g), d.h_identity_square(f)) != d.h_identity_square(gf):
            report.add("vertical pasting of identity squares", (g, f))
    if not report.ok:
        return report

    by_left: Dict[Cell, List[Cell]] = {}
    by_top: Dict[Cell, List[Cell]] = {}
    for s in d.squares:
        by_left.setdefault(d.left(s), []).append(s)
        by_top.setdefault(d.top(s), []).append(s)
    for a in d.squares:
        for b in by_left.get(d.right(a), ()):
            ab = d.hpaste(b, a)
            for c in by_top.get(d.bottom(a), ()):
                for e in by_top.get(d.bottom(b), ()):
                    if d.left(e) != d.right(c):
                        continue
                    report.checked += 1
                    rows_first = d.vpaste(d.hpaste(e, c), ab)
                    columns_first = d.hpaste(d.vpaste(e, b), d.vpaste(c, a))
                    if rows_first != columns_first:
                        report.add("interchange", (a, b, c, e))
    return report


def validate_double_functor(F: DoubleFunctor) -> ValidationReport:
    report = ValidationReport("double functor")
    for name, part in (("horizontal", F.horizontal_part), ("vertical", F.vertical_part),
                       ("squares_h", F.squares_h_part), ("squares_v", F.squares_v_part)):
        try:
            report.merge(validate_functor(part), prefix=f"{name}: ")
        except KeyError as exc:
            report.add(f"{name}: cell map total", (exc.args[0] if exc.args else None,))
    return report


def is_double_isomorphism(F: DoubleFunctor) -> bool:
    def bijective(mapping: Mapping, domain: Sequence, codomain: Sequence) -> bool:
        images = [mapping[x] for x in domain]
        return len(set(images)) == len(images) == len(codomain) and set(images) == set(codomain)

    return (bijective(F.on_objects, F.source.objects, F.target.objects)
            and bijective(F.on_h, F.source.h_arrows, F.target.h_arrows)
            and bijective(F.on_v, F.source.v_arrows, F.target.v_arrows)
            and bijective(F.on_squares, F.source.squares, F.target.squares))


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def boxtimes(c: FinCategory, d: FinCategory) -> FinDoubleCategory:
    """
    C ⊠ D: h-arrows (f, y), v-arrows (x, g), squares (f, g), everything
    composed componentwise
    """
    horizontal = product(c, discrete_on(d))
    vertical = product(discrete_on(c), d)
    squares = tuple((f, g) for f in c.morphisms for g in d.morphisms)
    hpaste = {((f2, g), (f1, g)): (h, g) for (f2, f1), h in c.comp.items() for g in d.morphisms}
    vpaste = {((f, g2), (f, g1)): (f, h) for (g2, g1), h in d.comp.items() for f in c.morphisms}
    return build_double(
        horizontal, vertical, squares,
        top={s: (s[0], d.src[s[1]]) for s in squares},
        bottom={s: (s[0], d.tgt[s[1]]) for s in squares},
        left={s: (c.src[s[0]], s[1]) for s in squares},
        right={s: (c.tgt[s[0]], s[1]) for s in squares},
        h_identity={(x, g): (c.ident[x], g) for x in c.objects for g in d.morphisms},
        v_identity={(f, y): (f, d.ident[y]) for f in c.morphisms for y in d.objects},
        hpaste=hpaste,
        vpaste=vpaste,
    )


def discrete_on(c: FinCategory) -> FinCategory:
    """Objects of c as a discrete category whose identity on x is named x, so that (f, y) cells line up"""
    objects = tuple(c.objects)
    return FinCategory(
        objects=objects,
        morphisms=objects,
        src={x: x for x in objects},
        tgt={x: x for x in objects},
        ident={x: x for x in objects},
        comp={(x, x): x for x in objects},
    )


def grid(m: int, n: int) -> FinDoubleCategory:
    """[m, n] = [m] ⊠ [n]"""
    return boxtimes(chain(m), chain(n))


def terminal_double() -> FinDoubleCategory:
    return grid(0, 0)


def product_double(x: FinDoubleCategory, y: FinDoubleCategory) -> FinDoubleCategory:
    """Cartesian product: every kind of cell is a pair"""
    return FinDoubleCategory(
        horizontal=product(x.horizontal, y.horizontal),
        vertical=product(x.vertical, y.vertical),
        squares_h=product(x.squares_h, y.squares_h),
        squares_v=product(x.squares_v, y.squares_v),
    )


def thin_double(objects: Iterable[Cell],
                h_le: Callable[[Cell, Cell], bool],
                v_le: Callable[[Cell, Cell], bool]) -> FinDoubleCategory:
    """
    Thin double category on two partial orders: h-arrows (a, b) for a ≤h b,
    v-arrows (a, c) for a ≤v c, and one square (a, b, c, d) per compatible
    corner quadruple
    """
    objects = tuple(objects)
    h_pairs = tuple((a, b) for a in objects for b in objects if h_le(a, b))
    v_pairs = tuple((a, c) for a in objects for c in objects if v_le(a, c))

    def order_category(pairs: Tuple) -> FinCategory:
        by_source: Dict[Cell, List[Tuple]] = {}
        for pair in pairs:
            by_source.setdefault(pair[0], []).append(pair)
        comp = {}
        for first in pairs:
            for second in by_source.get(first[1], ()):
                comp[(second, first)] = (first[0], second[1])
        return FinCategory(
            objects=objects, morphisms=pairs,
            src={p: p[0] for p in pairs}, tgt={p: p[1] for p in pairs},
            ident={a: (a, a) for a in objects}, comp=comp,
        )

    horizontal = order_category(h_pairs)
    vertical = order_category(v_pairs)
    v_from: Dict[Cell, List[Cell]] = {}
    for (a, c) in v_pairs:
        v_from.setdefault(a, []).append(c)
    squares = []
    for (a, b) in h_pairs:
        for c in v_from.get(a, ()):
            for d in v_from.get(b, ()):
                if h_le(c, d):
                    squares.append((a, b, c, d))
    squares = tuple(squares)
    by_left: Dict[Tuple, List[Tuple]] = {}
    by_top: Dict[Tuple, List[Tuple]] = {}
    for s in squares:
        by_left.setdefault((s[0], s[2]), []).append(s)
        by_top.setdefault((s[0], s[1]), []).append(s)
    hpaste, vpaste = {}, {}
    for s in squares:
        for t in by_left.get((s[1], s[3]), ()):
            hpaste[(t, s)] = (s[0], t[1], s[2], t[3])
        for t in by_top.get((s[2], s[3]), ()):
            vpaste[(t, s)] = (s[0], s[1], t[2], t[3])
    return build_double(
        horizontal, vertical, squares,
        top={s: (s[0], s[1]) for s in squares},
        bottom={s: (s[2], s[3]) for s in squares},
        left={s: (s[0], s[2]) for s in squares},
        right={s: (s[1], s[3]) for s in squares},
        h_identity={(a, c): (a, a, c, c) for (a, c) in v_pairs},
        v_identity={(a, b): (a, b, a, b) for (a, b) in h_pairs},
        hpaste=hpaste,
        vpaste=vpaste,
    )


def arrow_double(n: int) -> FinDoubleCategory:
    """
    Ar[n]: objects (i, j) with 0 ≤ i ≤ j ≤ n; h-arrows increase j, v-arrows
    increase i. Map([p, q], Ar[n]) ≅ Map([q]⋆[p], [n]).
    """
    objects = [(i, j) for i in range(n + 1) for j in range(i, n + 1)]
    return thin_double(
        objects,
        h_le=lambda a, b: a[0] == b[0] and a[1] <= b[1],
        v_le=lambda a, c: a[1] == c[1] and a[0] <= c[0],
    )


def twisted_double(n: int) -> FinDoubleCategory:
    """Tw[n] = Ar[n]^{2-op}"""
    return op_k(arrow_double(n), 2)


def twisted_op_double(n: int) -> FinDoubleCategory:
    """
    Tw([n]^op): objects (i, j) with j ≤ i; h-arrows decrease j, v-arrows
    increase i, so that (i, j) ↦ i is a map to [0, n]
    """
    objects = [(i, j) for i in range(n + 1) for j in range(i + 1)]
    return thin_double(
        objects,
        h_le=lambda a, b: a[0] == b[0] and b[1] <= a[1],
        v_le=lambda a, c: a[1] == c[1] and a[0] <= c[0],
    )


def op_k(d: FinDoubleCategory, k: int) -> FinDoubleCategory:
    """Opposite in the k-th variable: k=1 reverses h-arrows, k=2 reverses v-arrows"""
    if k == 1:
        return FinDoubleCategory(opposite(d.horizontal), d.vertical, opposite(d.squares_h), d.squares_v)
    if k == 2:
        return FinDoubleCategory(d.horizontal, opposite(d.vertical), d.squares_h, opposite(d.squares_v))
    raise ValueError("k must be 1 or 2")


def reverse(d: FinDoubleCategory) -> FinDoubleCategory:
    """Exchange the two directions and transpose squares"""
    return FinDoubleCategory(d.vertical, d.horizontal, d.squares_v, d.squares_h)


# ---------------------------------------------------------------------------
# Double functors
# ---------------------------------------------------------------------------

def identity_double_functor(d: FinDoubleCategory) -> DoubleFunctor:
    return DoubleFunctor(
        d, d,
        {x: x for x in d.objects}, {f: f for f in d.h_arrows},
        {v: v for v in d.v_arrows}, {s: s for s in d.squares},
    )


def compose_double_functors(G: DoubleFunctor, F: DoubleFunctor) -> DoubleFunctor:
    """G∘F"""
    return DoubleFunctor(
        F.source, G.target,
        {x: G.on_objects[F.on_objects[x]] for x in F.source.objects},
        {f: G.on_h[F.on_h[f]] for f in F.source.h_arrows},
        {v: G.on_v[F.on_v[v]] for v in F.source.v_arrows},
        {s: G.on_squares[F.on_squares[s]] for s in F.source.squares},
    )


def to_terminal_double(d: FinDoubleCategory) -> DoubleFunctor:
    point = terminal_double()
    x, = point.objects
    f, = point.h_arrows
    v, = point.v_arrows
    s, = point.squares
    return DoubleFunctor(
        d, point,
        {a: x for a in d.objects}, {a: f for a in d.h_arrows},
        {a: v for a in d.v_arrows}, {a: s for a in d.squares},
    )


def boxtimes_functor(F: FinFunctor, G: FinFunctor) -> DoubleFunctor:
    """F ⊠ G"""
    source = boxtimes(F.source, G.source)
    target = boxtimes(F.target, G.target)
    return DoubleFunctor(
        source, target,
        {(x, y): (F.on_objects[x], G.on_objects[y]) for (x, y) in source.objects},
        {(f, y): (F.on_morphisms[f], G.on_objects[y]) for (f, y) in source.h_arrows},
        {(x, g): (F.on_objects[x], G.on_morphisms[g]) for (x, g) in source.v_arrows},
        {(f, g): (F.on_morphisms[f], G.on_morphisms[g]) for (f, g) in source.squares},
    )


def product_double_functor(F: DoubleFunctor, G: DoubleFunctor) -> DoubleFunctor:
    source = product_double(F.source, G.source)
    target = product_double(F.target, G.target)
    return DoubleFunctor(
        source, target,
        {(a, b): (F.on_objects[a], G.on_objects[b]) for (a, b) in source.objects},
        {(a, b): (F.on_h[a], G.on_h[b]) for (a, b) in source.h_arrows},
        {(a, b): (F.on_v[a], G.on_v[b]) for (a, b) in source.v_arrows},
        {(a, b): (F.on_squares[a], G.on_squares[b]) for (a, b) in source.squares},
    )


def full_sub_double(d: FinDoubleCategory, objects: Iterable[Cell]) -> FinDoubleCategory:
    """Every cell of d whose corners all lie in objects"""
    keep = set(objects)
    horizontal = full_subcategory(d.horizontal, keep)
    vertical = full_subcategory(d.vertical, keep)
    return FinDoubleCategory(
        horizontal, vertical,
        full_subcategory(d.squares_h, vertical.morphisms),
        full_subcategory(d.squares_v, horizontal.morphisms),
    )


def restrict_double_functor(F: DoubleFunctor, objects: Iterable[Cell]) -> DoubleFunctor:
    """F on the full sub-double category of its source spanned by objects"""
    sub = full_sub_double(F.source, objects)
    return DoubleFunctor(
        sub, F.target,
        {x: F.on_objects[x] for x in sub.objects}, {f: F.on_h[f] for f in sub.h_arrows},
        {v: F.on_v[v] for v in sub.v_arrows}, {s: F.on_squares[s] for s in sub.squares},
    )


def pullback_double(p: DoubleFunctor, g: DoubleFunctor) -> Tuple[FinDoubleCategory, DoubleFunctor, DoubleFunctor]:
    """
    Strict pullback D ×_C C′ computed part by part

    Returns:
        Tuple: (pullback, projection to D, projection to C′)
    """
    horizontal, _, _ = pullback(p.horizontal_part, g.horizontal_part)
    vertical, _, _ = pullback(p.vertical_part, g.vertical_part)
    squares_h, _, _ = pullback(p.squares_h_part, g.squares_h_part)
    squares_v, _, _ = pullback(p.squares_v_part, g.squares_v_part)
    P = FinDoubleCategory(horizontal, vertical, squares_h, squares_v)
    first = DoubleFunctor(
        P, p.source,
        {a: a[0] for a in P.objects}, {a: a[0] for a in P.h_arrows},
        {a: a[0] for a in P.v_arrows}, {a: a[0] for a in P.squares},
    )
    second = DoubleFunctor(
        P, g.source,
        {a: a[1] for a in P.objects}, {a: a[1] for a in P.h_arrows},
        {a: a[1] for a in P.v_arrows}, {a: a[1] for a in P.squares},
    )
    return P, first, second


# ---------------------------------------------------------------------------
# Gauntness
# ---------------------------------------------------------------------------

def is_gaunt(d: FinDoubleCategory) -> bool:
    """Every invertible h-arrow and every invertible v-arrow is an identity"""
    for cat in (d.horizontal, d.vertical):
        for f in cat.morphisms:
            if not cat.is_identity(f) and invertible(cat, f):
                return False
    return True


# ---------------------------------------------------------------------------
# Nerve evaluation
# ---------------------------------------------------------------------------

def nerve_eval(d: FinDoubleCategory, m: int, n: int, max_cells: Optional[int] = None) -> List[Any]:
    """
    All double functors grid(m, n) → d, in canonical order

    A cell is encoded by its generating data: an object for (0, 0), a tuple of
    m composable h-arrows for (m, 0), a tuple of n composable v-arrows for
    (0, n), and n rows of m squares (row k, column i) otherwise. Use
    cell_to_functor for the full double functor.

    Raises:
        ResourceLimitExceeded: more than max_cells cells
    """
    if m < 0 or n < 0:
        raise ValueError("degrees must be non-negative")
    cap = resolve_cap(max_cells)
    what = f"nerve_eval({m}, {n})"
    if m == 0 and n == 0:
        cells = list(d.objects)
    elif n == 0:
        cells = _composable_strings(d.horizontal, m, cap, what)
    elif m == 0:
        cells = _composable_strings(d.vertical, n, cap, what)
    else:
        cells = _square_grids(d, m, n, cap, what)
    logger.debug("%s: %d cells", what, len(cells))
    return cells


def _composable_strings(cat: FinCategory, length: int, cap: int, what: str) -> List[Tuple]:
    strings: List[Tuple] = [(f,) for f in cat.morphisms]
    for _ in range(length - 1):
        extended = []
        for s in strings:
            for f in cat.out_of(cat.tgt[s[-1]]):
                extended.append(s + (f,))
                if len(extended) > cap:
                    raise ResourceLimitExceeded(what, cap)
        strings = extended
    if len(strings) > cap:
        raise ResourceLimitExceeded(what, cap)
    return strings


def _square_grids(d: FinDoubleCategory, m: int, n: int, cap: int, what: str) -> List[Tuple]:
    by_left: Dict[Cell, List[Cell]] = {}
    by_top: Dict[Cell, List[Cell]] = {}
    by_top_left: Dict[Tuple[Cell, Cell], List[Cell]] = {}
    for s in d.squares:
        by_left.setdefault(d.left(s), []).append(s)
        by_top.setdefault(d.top(s), []).append(s)
        by_top_left.setdefault((d.top(s), d.left(s)), []).append(s)

    results: List[Tuple] = []
    positions = [(k, i) for k in range(n) for i in range(m)]
    chosen: Dict[Tuple[int, int], Cell] = {}

    def candidates(k: int, i: int) -> Sequence[Cell]:
        if k == 0 and i == 0:
            return d.squares
        if k == 0:
            return by_left.get(d.right(chosen[(0, i - 1)]), ())
        if i == 0:
            return by_top.get(d.bottom(chosen[(k - 1, 0)]), ())
        return by_top_left.get((d.bottom(chosen[(k - 1, i)]), d.right(chosen[(k, i - 1)])), ())

    def extend(index: int) -> None:
        if index == len(positions):
            results.append(tuple(tuple(chosen[(k, i)] for i in range(m)) for k in range(n)))
            if len(results) > cap:
                raise ResourceLimitExceeded(what, cap)
            return
        k, i = positions[index]
        for s in candidates(k, i):
            chosen[(k, i)] = s
            extend(index + 1)
        chosen.pop((k, i), None)

    extend(0)
    return results


def cell_to_functor(d: FinDoubleCategory, m: int, n: int, cell: Any) -> DoubleFunctor:
    """Extend the generating data of an (m, n)-cell to the double functor grid(m, n) → d"""
    shape = grid(m, n)
    H, V = d.horizontal, d.vertical
    # elementary data, indexed by grid coordinates
    if m == 0 and n == 0:
        obj = {(0, 0): cell}
        h_step: Dict[Tuple[int, int], Cell] = {}
        v_step: Dict[Tuple[int, int], Cell] = {}
        sq_step: Dict[Tuple[int, int], Cell] = {}
    elif n == 0:
        h_step = {(i, 0): cell[i] for i in range(m)}
        obj = {(i, 0): H.src[cell[i]] for i in range(m)}
        obj[(m, 0)] = H.tgt[cell[m - 1]]
        v_step, sq_step = {}, {}
    elif m == 0:
        v_step = {(0, k): cell[k] for k in range(n)}
        obj = {(0, k): V.src[cell[k]] for k in range(n)}
        obj[(0, n)] = V.tgt[cell[n - 1]]
        h_step, sq_step = {}, {}
    else:
        sq_step = {(i, k): cell[k][i] for k in range(n) for i in range(m)}
        h_step, v_step, obj = {}, {}, {}
        for (i, k), s in sq_step.items():
            h_step[(i, k)] = d.top(s)
            h_step[(i, k + 1)] = d.bottom(s)
            v_step[(i, k)] = d.left(s)
            v_step[(i + 1, k)] = d.right(s)
        for (i, k), f in h_step.items():
            obj[(i, k)] = H.src[f]
            obj[(i + 1, k)] = H.tgt[f]

    def h_value(i0: int, i1: int, k: int) -> Cell:
        if i0 == i1:
            return H.ident[obj[(i0, k)]]
        return H.compose_path([h_step[(i, k)] for i in range(i0, i1)])

    def v_value(i: int, k0: int, k1: int) -> Cell:
        if k0 == k1:
            return V.ident[obj[(i, k0)]]
        return V.compose_path([v_step[(i, k)] for k in range(k0, k1)])

    def sq_value(i0: int, i1: int, k0: int, k1: int) -> Cell:
        if i0 == i1:
            return d.h_identity_square(v_value(i0, k0, k1))
        if k0 == k1:
            return d.v_identity_square(h_value(i0, i1, k0))
        rows = []
        for k in range(k0, k1):
            row = sq_step[(i0, k)]
            for i in range(i0 + 1, i1):
                row = d.hpaste(sq_step[(i, k)], row)
            rows.append(row)
        result = rows[0]
        for row in rows[1:]:
            result = d.vpaste(row, result)
        return result

    return DoubleFunctor(
        shape, d,
        {(i, k): obj[(i, k)] for (i, k) in shape.objects},
        {((i0, i1), k): h_value(i0, i1, k) for ((i0, i1), k) in shape.h_arrows},
        {(i, (k0, k1)): v_value(i, k0, k1) for (i, (k0, k1)) in shape.v_arrows},
        {((i0, i1), (k0, k1)): sq_value(i0, i1, k0, k1) for ((i0, i1), (k0, k1)) in shape.squares},
    )


def functor_to_cell(F: DoubleFunctor, m: int, n: int) -> Any:
    """Generating data of a double functor out of grid(m, n)"""
    if m == 0 and n == 0:
        return F.on_objects[(0, 0)]
    if n == 0:
        return tuple(F.on_h[((i, i + 1), 0)] for i in range(m))
    if m == 0:
        return tuple(F.on_v[(0, (k, k + 1))] for k in range(n))
    return tuple(tuple(F.on_squares[((i, i + 1), (k, k + 1))] for i in range(m)) for k in range(n))


def map_cell(F: DoubleFunctor, m: int, n: int, cell: Any) -> Any:
    """Push an (m, n)-cell of F.source forward along F"""
    if m == 0 and n == 0:
        return F.on_objects[cell]
    if n == 0:
        return tuple(F.on_h[f] for f in cell)
    if m == 0:
        return tuple(F.on_v[v] for v in cell)
    return tuple(tuple(F.on_squares[s] for s in row) for row in cell)


@dataclass
class SegalReport:
    """Comparison N(m, n) → N(1, n) ×_{N(0, n)} ⋯ ×_{N(0, n)} N(1, n)"""
    m: int
    n: int
    direction: str
    cells: int
    fiber_product: int
    injective: bool

    @property
    def holds(self) -> bool:
        return self.injective and self.cells == self.fiber_product

    def to_dict(self) -> Dict[str, Any]:
        return {'m': self.m, 'n': self.n, 'direction': self.direction, 'cells': self.cells,
                'fiber_product': self.fiber_product, 'injective': self.injective,
                'holds': self.holds}


def segal_check(d: FinDoubleCategory, m: int, n: int, direction: str = "horizontal",
                max_cells: Optional[int] = None) -> SegalReport:
    """
    Strict Segal identity in one direction, both sides enumerated

    The horizontal form splits (m, n)-cells into m columns of (1, n)-cells glued
    along (0, n)-cells; the vertical form splits into n rows.
    """
    if direction not in ("horizontal", "vertical"):
        raise ValueError("direction must be horizontal or vertical")
    length = m if direction == "horizontal" else n
    if length < 2:
        raise ValueError("Segal identities start in degree 2")
    cells = nerve_eval(d, m, n, max_cells)
    if direction == "horizontal":
        pieces = nerve_eval(d, 1, n, max_cells)
        decompose = lambda cell: _columns(d, m, n, cell)
        left_end = lambda piece: _column_edge(d, n, piece, 0)
        right_end = lambda piece: _column_edge(d, n, piece, 1)
    else:
        pieces = nerve_eval(d, m, 1, max_cells)
        decompose = lambda cell: _rows(d, m, n, cell)
        left_end = lambda piece: _row_edge(d, m, piece, 0)
        right_end = lambda piece: _row_edge(d, m, piece, 1)

    by_start: Dict[Any, List[Any]] = {}
    for piece in pieces:
        by_start.setdefault(left_end(piece), []).append(piece)
    frontier = {piece: 1 for piece in pieces}
    for _ in range(length - 1):
        nxt: Dict[Any, int] = {}
        for piece, ways in frontier.items():
            for following in by_start.get(right_end(piece), ()):
                nxt[following] = nxt.get(following, 0) + ways
        frontier = nxt
    count = sum(frontier.values())
    images = [decompose(cell) for cell in cells]
    return SegalReport(m, n, direction, len(cells), count, len(set(images)) == len(images))


def _columns(d: FinDoubleCategory, m: int, n: int, cell: Any) -> Tuple:
    if n == 0:
        return tuple((f,) for f in cell)
    return tuple(tuple((cell[k][i],) for k in range(n)) for i in range(m))


def _column_edge(d: FinDoubleCategory, n: int, piece: Any, side: int) -> Any:
    """Left (side 0) or right (side 1) (0, n)-boundary of a (1, n)-cell"""
    if n == 0:
        f = piece[0]
        return d.horizontal.src[f] if side == 0 else d.horizontal.tgt[f]
    squares = [row[0] for row in piece]
    return tuple(d.left(s) if side == 0 else d.right(s) for s in squares)


def _rows(d: FinDoubleCategory, m: int, n: int, cell: Any) -> Tuple:
    if m == 0:
        return tuple((v,) for v in cell)
    return tuple((row,) for row in cell)


def _row_edge(d: FinDoubleCategory, m: int, piece: Any, side: int) -> Any:
    """Top (side 0) or bottom (side 1) (m, 0)-boundary of an (m, 1)-cell"""
    if m == 0:
        v = piece[0]
        return d.vertical.src[v] if side == 0 else d.vertical.tgt[v]
    row = piece[0]
    return tuple(d.top(s) if side == 0 else d.bottom(s) for s in row)


def join_count(n: int, p: int, q: int) -> int:
    """|Map([q]⋆[p], [n])| = C(n + p + q + 2, p + q + 2)"""
    return comb(n + p + q + 2, p + q + 2)


def count_monotone_maps(source_size: int, target_size: int) -> int:
    """Independent counter: monotone maps between chains of the given sizes, by dynamic programming"""
    if source_size == 0:
        return 1
    ways = [1] * target_size
    for _ in range(source_size - 1):
        running = 0
        updated = []
        for w in ways:
            running += w
            updated.append(running)
        ways = updated
    return sum(ways)


def op_k_functor(F: DoubleFunctor, k: int) -> DoubleFunctor:
    """The same cell maps, read between k-th opposites"""
    return DoubleFunctor(op_k(F.source, k), op_k(F.target, k),
                         F.on_objects, F.on_h, F.on_v, F.on_squares)


def reverse_functor(F: DoubleFunctor) -> DoubleFunctor:
    return DoubleFunctor(reverse(F.source), reverse(F.target),
                         F.on_objects, F.on_v, F.on_h, F.on_squares)


def swap_isomorphism(c: FinCategory, d: FinCategory) -> DoubleFunctor:
    """reverse(c ⊠ d) ≅ d ⊠ c, swapping the coordinates of every cell"""
    source = reverse(boxtimes(c, d))
    target = boxtimes(d, c)
    swap = lambda cell: (cell[1], cell[0])
    return DoubleFunctor(
        source, target,
        {x: swap(x) for x in source.objects},
        {f: swap(f) for f in source.h_arrows},
        {v: swap(v) for v in source.v_arrows},
        {s: swap(s) for s in source.squares},
    )


def pi_hor(n: int) -> DoubleFunctor:
    """Ar[n] → [n, 0], (i, j) ↦ j"""
    return _arrow_projection(n, 1)


def pi_vert(n: int) -> DoubleFunctor:
    """Ar[n] → [0, n], (i, j) ↦ i"""
    return _arrow_projection(n, 0)


def _arrow_projection(n: int, coordinate: int) -> DoubleFunctor:
    source = arrow_double(n)
    if coordinate == 1:
        target = grid(n, 0)
        point = lambda a: (a[1], 0)
        h_cell = lambda f: ((f[0][1], f[1][1]), 0)
        v_cell = lambda v: (v[0][1], (0, 0))
        square = lambda s: ((s[0][1], s[1][1]), (0, 0))
    else:
        target = grid(0, n)
        point = lambda a: (0, a[0])
        h_cell = lambda f: ((0, 0), f[0][0])
        v_cell = lambda v: (0, (v[0][0], v[1][0]))
        square = lambda s: ((0, 0), (s[0][0], s[2][0]))
    return DoubleFunctor(
        source, target,
        {x: point(x) for x in source.objects},
        {f: h_cell(f) for f in source.h_arrows},
        {v: v_cell(v) for v in source.v_arrows},
        {s: square(s) for s in source.squares},
    )
