"""
Backtracking search for double functors between finite double categories

Cells of the source are visited factors-first. Identity cells are never
searched, a composite whose factors are already placed is forced, and every
composition law is checked as soon as all of its cells have images.
"""

import logging
from typing import Callable, Collection, Dict, List, Optional, Sequence, Tuple

from .config import resolve_cap
from .core_cat import Cell, FinCategory
from .dblcat import DoubleFunctor, FinDoubleCategory
from .errors import ResourceLimitExceeded

logger = logging.getLogger(__name__)

Restriction = Callable[[str, Cell], Optional[Collection[Cell]]]
Predicate = Callable[[str, Cell, Cell], bool]

KINDS = ("object", "h", "v", "square")


def _factor_order(cat: FinCategory, cells: Sequence[Cell]) -> List[Cell]:
    """Non-identity morphisms ordered so that factors precede their composites where possible"""
    pending = [f for f in cells if not cat.is_identity(f)]
    factorizations: Dict[Cell, List[Tuple[Cell, Cell]]] = {}
    for (g, f), gf in cat.comp.items():
        if cat.is_identity(g) or cat.is_identity(f) or cat.is_identity(gf) or gf in (g, f):
            continue
        factorizations.setdefault(gf, []).append((g, f))
    placed: List[Cell] = [f for f in pending if f not in factorizations]
    done = set(placed)
    remaining = [f for f in pending if f not in done]
    while remaining:
        progress = [f for f in remaining
                    if any(g in done and h in done for g, h in factorizations[f])]
        if not progress:
            placed.extend(remaining)
            break
        placed.extend(progress)
        done.update(progress)
        remaining = [f for f in remaining if f not in done]
    return placed


class SearchPlan:
    """Visiting order and composition laws of a source shape, shared by every search out of it"""

    def __init__(self, source: FinDoubleCategory):
        self.source = source
        self.square_identities = self._identity_squares()
        self.order = self._build_order()
        self.relations = self._build_relations()

    def _identity_squares(self) -> Dict[Cell, Tuple[str, Cell]]:
        X = self.source
        found: Dict[Cell, Tuple[str, Cell]] = {}
        for v in X.v_arrows:
            found[X.h_identity_square(v)] = ("v", v)
        for f in X.h_arrows:
            found.setdefault(X.v_identity_square(f), ("h", f))
        return found

    def _build_order(self) -> List[Tuple[str, Cell]]:
        X = self.source
        touched = set()
        for cat in (X.horizontal, X.vertical):
            for f in cat.morphisms:
                if not cat.is_identity(f):
                    touched.add(cat.src[f])
                    touched.add(cat.tgt[f])
        order: List[Tuple[str, Cell]] = [("object", x) for x in X.objects if x not in touched]
        order += [("h", f) for f in _factor_order(X.horizontal, X.h_arrows)]
        order += [("v", f) for f in _factor_order(X.vertical, X.v_arrows)]
        free_squares = [s for s in X.squares if s not in self.square_identities]
        ordered_h = _factor_order(X.squares_h, free_squares)
        ordered_v = _factor_order(X.squares_v, free_squares)
        # squares that decompose in either direction go after their pieces
        rank = {s: min(ordered_h.index(s), ordered_v.index(s)) for s in free_squares}
        order += [("square", s) for s in sorted(free_squares, key=lambda s: (rank[s], free_squares.index(s)))]
        return order

    def is_identity(self, kind: str, cell: Cell) -> bool:
        X = self.source
        if kind == "h":
            return X.horizontal.is_identity(cell)
        if kind == "v":
            return X.vertical.is_identity(cell)
        if kind == "square":
            return cell in self.square_identities
        return False

    def _build_relations(self) -> Dict[Tuple[str, Cell], List[Tuple[str, Tuple[Cell, Cell], Cell]]]:
        X = self.source
        tables = (("h", "h", X.horizontal), ("v", "v", X.vertical),
                  ("hpaste", "square", X.squares_h), ("vpaste", "square", X.squares_v))
        relations: Dict[Tuple[str, Cell], List] = {}
        for law, kind, cat in tables:
            for (g, f), gf in cat.comp.items():
                if cat.is_identity(g) or cat.is_identity(f):
                    continue
                entry = (law, (g, f), gf)
                for cell in {g, f, gf}:
                    if not self.is_identity(kind, cell):
                        relations.setdefault((kind, cell), []).append(entry)
        return relations


class FunctorSearch:
    """
    Enumerate double functors source → target

    Args:
        source (FinDoubleCategory): domain shape
        target (FinDoubleCategory): codomain
        restrict (Callable): optional (kind, cell) → admissible images, or None for no restriction
        allowed (Callable): optional (kind, cell, image) → bool filter
        max_cells (int): cap on the number of solutions
        plan (SearchPlan): precomputed analysis of source, built when omitted
    """

    def __init__(self, source: FinDoubleCategory, target: FinDoubleCategory,
                 restrict: Optional[Restriction] = None,
                 allowed: Optional[Predicate] = None,
                 max_cells: Optional[int] = None,
                 plan: Optional[SearchPlan] = None):
        if plan is not None and plan.source is not source:
            raise ValueError("search plan was built for another source")
        self.source = source
        self.target = target
        self.restrict = restrict
        self.allowed = allowed
        self.cap = resolve_cap(max_cells)
        plan = plan or SearchPlan(source)
        self._plan = plan.order
        self._relations = plan.relations
        self._square_identities = plan.square_identities

    # -- search --------------------------------------------------------------

    def _value(self, kind: str, cell: Cell) -> Optional[Cell]:
        """Image of a cell, computing identity cells from their objects"""
        X, D = self.source, self.target
        found = self._images[kind].get(cell)
        if found is not None:
            return found
        if kind == "h" and X.horizontal.is_identity(cell):
            x = self._images["object"].get(X.horizontal.src[cell])
            return None if x is None else D.horizontal.ident[x]
        if kind == "v" and X.vertical.is_identity(cell):
            x = self._images["object"].get(X.vertical.src[cell])
            return None if x is None else D.vertical.ident[x]
        if kind == "square" and cell in self._square_identities:
            side, edge = self._square_identities[cell]
            image = self._value(side, edge)
            if image is None:
                return None
            return D.h_identity_square(image) if side == "v" else D.v_identity_square(image)
        return None

    def _admissible(self, kind: str, cell: Cell, image: Cell) -> bool:
        if self.restrict is not None:
            options = self.restrict(kind, cell)
            if options is not None and image not in options:
                return False
        return self.allowed is None or self.allowed(kind, cell, image)

    def _compose(self, law: str, g: Cell, f: Cell) -> Optional[Cell]:
        D = self.target
        comp = {"h": D.horizontal.comp, "v": D.vertical.comp,
                "hpaste": D.squares_h.comp, "vpaste": D.squares_v.comp}[law]
        return comp.get((g, f))

    def _law_kind(self, law: str) -> str:
        return "square" if law in ("hpaste", "vpaste") else law

    def _forced(self, kind: str, cell: Cell) -> Optional[Cell]:
        for law, (g, f), gf in self._relations.get((kind, cell), ()):
            if gf != cell:
                continue
            k = self._law_kind(law)
            ig, i_f = self._value(k, g), self._value(k, f)
            if ig is not None and i_f is not None:
                composite = self._compose(law, ig, i_f)
                return composite if composite is not None else _NO_IMAGE
        return None

    def _candidates(self, kind: str, cell: Cell) -> Sequence[Cell]:
        X, D = self.source, self.target
        forced = self._forced(kind, cell)
        if forced is _NO_IMAGE:
            return ()
        if forced is not None:
            return (forced,)
        if kind == "square":
            return D.squares_with_boundary(
                self._value("h", X.top(cell)), self._value("h", X.bottom(cell)),
                self._value("v", X.left(cell)), self._value("v", X.right(cell)),
            )
        options = None if self.restrict is None else self.restrict(kind, cell)
        if kind == "object":
            return D.objects if options is None else tuple(options)
        source_cat = X.horizontal if kind == "h" else X.vertical
        target_cat = D.horizontal if kind == "h" else D.vertical
        a = self._images["object"].get(source_cat.src[cell])
        b = self._images["object"].get(source_cat.tgt[cell])
        if options is not None:
            # boundary first; functoriality is left to _laws_hold
            return [f for f in options
                    if (a is None or target_cat.src[f] == a) and (b is None or target_cat.tgt[f] == b)]
        if a is not None and b is not None:
            return target_cat.hom(a, b)
        if a is not None:
            return target_cat.out_of(a)
        if b is not None:
            return target_cat.into(b)
        return target_cat.morphisms

    def _laws_hold(self, kind: str, cell: Cell) -> bool:
        for law, (g, f), gf in self._relations.get((kind, cell), ()):
            k = self._law_kind(law)
            ig, i_f, igf = self._value(k, g), self._value(k, f), self._value(k, gf)
            if ig is None or i_f is None or igf is None:
                continue
            if self._compose(law, ig, i_f) != igf:
                return False
        return True

    def _place_objects(self, kind: str, cell: Cell, image: Cell) -> Optional[List[Cell]]:
        """Record endpoint objects implied by an arrow image; None on conflict"""
        X, D = self.source, self.target
        if kind not in ("h", "v"):
            return []
        source_cat = X.horizontal if kind == "h" else X.vertical
        target_cat = D.horizontal if kind == "h" else D.vertical
        added: List[Cell] = []
        for x, y in ((source_cat.src[cell], target_cat.src[image]),
                     (source_cat.tgt[cell], target_cat.tgt[image])):
            known = self._images["object"].get(x)
            if known is None:
                if not self._admissible("object", x, y):
                    for z in added:
                        del self._images["object"][z]
                    return None
                self._images["object"][x] = y
                added.append(x)
            elif known != y:
                for z in added:
                    del self._images["object"][z]
                return None
        return added

    def run(self) -> List[DoubleFunctor]:
        """
        All solutions, in plan order

        Raises:
            ResourceLimitExceeded: more than max_cells solutions
        """
        self._images: Dict[str, Dict[Cell, Cell]] = {kind: {} for kind in KINDS}
        self._results: List[DoubleFunctor] = []
        self._extend(0)
        logger.debug("functor search %r → %r: %d solutions", self.source, self.target, len(self._results))
        return self._results

    def _extend(self, index: int) -> None:
        if index == len(self._plan):
            self._emit()
            return
        kind, cell = self._plan[index]
        for image in self._candidates(kind, cell):
            if not self._admissible(kind, cell, image):
                continue
            added = self._place_objects(kind, cell, image)
            if added is None:
                continue
            self._images[kind][cell] = image
            if self._laws_hold(kind, cell):
                self._extend(index + 1)
            del self._images[kind][cell]
            for x in added:
                del self._images["object"][x]

    def _emit(self) -> None:
        X = self.source
        tables = {}
        for kind, cells in (("object", X.objects), ("h", X.h_arrows),
                            ("v", X.v_arrows), ("square", X.squares)):
            table = {}
            for cell in cells:
                image = self._value(kind, cell)
                if image is None or not self._admissible(kind, cell, image):
                    return
                table[cell] = image
            tables[kind] = table
        self._results.append(DoubleFunctor(X, self.target, tables["object"], tables["h"],
                                           tables["v"], tables["square"]))
        if len(self._results) > self.cap:
            raise ResourceLimitExceeded(f"functors {X!r} → {self.target!r}", self.cap)


_NO_IMAGE = object()


def enumerate_double_functors(source: FinDoubleCategory, target: FinDoubleCategory,
                              restrict: Optional[Restriction] = None,
                              allowed: Optional[Predicate] = None,
                              max_cells: Optional[int] = None) -> List[DoubleFunctor]:
    return FunctorSearch(source, target, restrict, allowed, max_cells).run()


def functor_key(F: DoubleFunctor) -> Tuple:
    """Hashable identity of a double functor out of a fixed source"""
    X = F.source
    return (tuple(F.on_objects[x] for x in X.objects),
            tuple(F.on_h[f] for f in X.h_arrows),
            tuple(F.on_v[v] for v in X.v_arrows),
            tuple(F.on_squares[s] for s in X.squares))
