"""
Fibrations of double categories
Certification in all eight orientations, markings by (co)cartesian arrows,
strong maps and fibers
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .config import get_settings
from .constants import FIBRATION_KINDS
from .core_cat import (
    Cell,
    FinCategory,
    FinFunctor,
    LiftingReport,
    cartesian_arrows,
    cartesian_fibration_report,
    cocartesian_fibration_report,
    discrete_fibration_report,
    is_cartesian_arrow,
    is_cocartesian_arrow,
    is_isomorphism,
    opposite_functor,
)
from .core_cat import fiber as category_fiber
from .dblcat import (
    DoubleFunctor,
    FinDoubleCategory,
    MarkedDoubleCategory,
    compose_double_functors,
    identity_double_functor,
    is_gaunt,
    map_cell,
    nerve_eval,
    op_k_functor,
    pullback_double,
    reverse_functor,
)
from .errors import CellNotFound, NotCertifiedError

logger = logging.getLogger(__name__)

DISCRETE = ("left", "right")
GENERIC = ("cart", "cocart")

# (category part, squares part) of each direction
PARTS = {
    "horizontal": ("horizontal_part", "squares_h_part"),
    "vertical": ("vertical_part", "squares_v_part"),
}


def parse_kind(kind: str) -> Tuple[str, str]:
    """'left-cart' → ('left', 'cart'): horizontal variance, vertical variance"""
    if kind not in FIBRATION_KINDS:
        raise ValueError(f"unknown fibration kind {kind!r}; expected one of {', '.join(FIBRATION_KINDS)}")
    horizontal, vertical = kind.split("-")
    return horizontal, vertical


def dual_kind(kind: str) -> str:
    """Kind of the conjugate op_1 op_2 rev(p): directions swap and every variance flips"""
    flip = {"left": "right", "right": "left", "cart": "cocart", "cocart": "cart"}
    horizontal, vertical = parse_kind(kind)
    return f"{flip[vertical]}-{flip[horizontal]}"


@dataclass
class FibrationCertificate:
    """
    Outcome of a fibration check

    Legs are keyed "<part>:<variance>", e.g. "squares_h:left"; each holds every
    lifting problem of that part with its recorded solutions. The marked set
    holds the (co)cartesian arrows of the non-discrete direction.
    """
    kind: str
    legs: Dict[str, LiftingReport] = field(default_factory=dict)
    marked: frozenset = frozenset()
    marked_direction: str = "vertical"
    paranoid: bool = False

    @property
    def holds(self) -> bool:
        return all(report.holds for report in self.legs.values())

    def __bool__(self) -> bool:
        return self.holds

    @property
    def failures(self) -> List[Tuple[str, Tuple[Cell, Cell]]]:
        return [(name, problem) for name, report in self.legs.items() for problem in report.failures]

    def witness(self) -> Optional[Tuple[str, Tuple[Cell, Cell]]]:
        """First failing lifting problem, if any"""
        failures = self.failures
        return failures[0] if failures else None

    def replay(self, p: DoubleFunctor) -> bool:
        """
        Re-check every recorded lift against the definition

        Returns:
            bool: True when the recorded tables reproduce this certificate
        """
        for name, report in self.legs.items():
            part_name, variance = name.split(":")
            if part_name == "degree-2":
                continue
            part: FinFunctor = getattr(p, f"{part_name}_part")
            D = part.source
            for (gamma, obj), lifts in report.lifts.items():
                if any(part.on_morphisms[f] != gamma for f in lifts):
                    return False
                failed = (gamma, obj) in report.failures
                if variance in DISCRETE:
                    end = D.src if variance == "left" else D.tgt
                    if any(end[f] != obj for f in lifts) or failed != (len(lifts) != 1):
                        return False
                    continue
                if variance == "cartesian":
                    good = all(is_cartesian_arrow(part, f) and D.tgt[f] == obj for f in lifts)
                else:
                    good = all(is_cocartesian_arrow(part, f) and D.src[f] == obj for f in lifts)
                if not good or failed != (not lifts):
                    return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        failure = self.witness()
        return {
            'kind': self.kind,
            'holds': self.holds,
            'paranoid': self.paranoid,
            'legs': {name: report.to_dict() for name, report in sorted(self.legs.items())},
            'marked_direction': self.marked_direction,
            'marked': len(self.marked),
            'witness': None if failure is None else [failure[0], repr(failure[1][0]), repr(failure[1][1])],
        }


def _direction_leg(p: DoubleFunctor, direction: str, variance: str) -> Dict[str, LiftingReport]:
    category_attr, squares_attr = PARTS[direction]
    category_part = getattr(p, category_attr)
    legs = {}
    name = category_attr.replace("_part", "")
    if variance in DISCRETE:
        legs[f"{name}:{variance}"] = discrete_fibration_report(category_part, variance)
        square_name = squares_attr.replace("_part", "")
        legs[f"{square_name}:{variance}"] = discrete_fibration_report(getattr(p, squares_attr), variance)
    elif variance == "cart":
        legs[f"{name}:cartesian"] = cartesian_fibration_report(category_part)
    else:
        legs[f"{name}:cocartesian"] = cocartesian_fibration_report(category_part)
    return legs


def _degree_two_report(p: DoubleFunctor, direction: str, side: str,
                       max_cells: Optional[int] = None) -> LiftingReport:
    """Unique lifts of composable pairs in the discrete direction, read off the nerves"""
    D, C = p.source, p.target
    report = LiftingReport(f"degree-2 {direction} {side}")
    degrees = ((2, 0), (2, 1)) if direction == "horizontal" else ((0, 2), (1, 2))
    for m, n in degrees:
        endpoint = _endpoint(D, m, n, side)
        base_endpoint = _endpoint(C, m, n, side)
        lifts: Dict[Tuple[Any, Any], List[Any]] = {}
        for cell in nerve_eval(D, m, n, max_cells):
            lifts.setdefault((map_cell(p, m, n, cell), endpoint(cell)), []).append(cell)
        for base in nerve_eval(C, m, n, max_cells):
            point = base_endpoint(base)
            starts = _objects_over_endpoint(p, m, n, point)
            for start in starts:
                found = tuple(lifts.get((base, start), ()))
                report.lifts[((m, n, base), start)] = found
                if len(found) != 1:
                    report.failures.append(((m, n, base), start))
    return report


def _endpoint(d: FinDoubleCategory, m: int, n: int, side: str):
    """Source (side 'left') or target (side 'right') edge of a length-2 cell in its discrete direction"""
    first = side == "left"
    if n == 0:
        return lambda cell: d.horizontal.src[cell[0]] if first else d.horizontal.tgt[cell[-1]]
    if m == 0:
        return lambda cell: d.vertical.src[cell[0]] if first else d.vertical.tgt[cell[-1]]
    if m == 2:
        return lambda cell: d.left(cell[0][0]) if first else d.right(cell[0][-1])
    return lambda cell: d.top(cell[0][0]) if first else d.bottom(cell[-1][0])


def _objects_over_endpoint(p: DoubleFunctor, m: int, n: int, point: Cell) -> Tuple[Cell, ...]:
    """Cells of the source over a base endpoint: objects for strings of arrows, sides for squares"""
    if m == 0 or n == 0:
        return p.vertical_part.objects_over(point)
    if m == 2:
        return p.squares_h_part.objects_over(point)
    return p.squares_v_part.objects_over(point)


def check_fibration(p: DoubleFunctor, kind: str, paranoid: Optional[bool] = None,
                    max_cells: Optional[int] = None) -> FibrationCertificate:
    """
    Certify p as a fibration of the given kind

    The discrete direction needs unique lifts of arrows and of squares; the
    other direction needs (co)cartesian lifts of arrows. Paranoid mode also
    re-checks unique lifts of composable pairs in the discrete direction.

    Args:
        p (DoubleFunctor): candidate fibration
        kind (str): one of FIBRATION_KINDS, horizontal variance first
        paranoid (bool): degree-2 re-check (defaults to the configured value)

    Returns:
        FibrationCertificate: holds=False carries the failing lifting problems
    """
    horizontal, vertical = parse_kind(kind)
    if paranoid is None:
        paranoid = get_settings().paranoid
    certificate = FibrationCertificate(kind, paranoid=paranoid)
    certificate.legs.update(_direction_leg(p, "horizontal", horizontal))
    certificate.legs.update(_direction_leg(p, "vertical", vertical))

    if horizontal in GENERIC:
        certificate.marked_direction = "horizontal"
        certificate.marked = _marked(p.horizontal_part, horizontal)
    else:
        certificate.marked_direction = "vertical"
        certificate.marked = _marked(p.vertical_part, vertical)

    if paranoid and certificate.holds:
        direction = "horizontal" if horizontal in DISCRETE else "vertical"
        side = horizontal if horizontal in DISCRETE else vertical
        certificate.legs[f"degree-2:{side}"] = _degree_two_report(p, direction, side, max_cells)

    logger.info("fibration check %s: %s (%d legs)", kind, "holds" if certificate.holds else "fails",
                len(certificate.legs))
    return certificate


def _marked(part: FinFunctor, variance: str) -> frozenset:
    if variance == "cart":
        return cartesian_arrows(part)
    return cartesian_arrows(opposite_functor(part))


def is_left_cart_fibration(p: DoubleFunctor, paranoid: Optional[bool] = None) -> FibrationCertificate:
    return check_fibration(p, "left-cart", paranoid)


def is_cocart_right_fibration(p: DoubleFunctor, paranoid: Optional[bool] = None) -> FibrationCertificate:
    return check_fibration(p, "cocart-right", paranoid)


def require(certificate: FibrationCertificate) -> FibrationCertificate:
    """Raise NotCertifiedError unless the certificate holds"""
    if not certificate.holds:
        raise NotCertifiedError(f"not a ({certificate.kind}) fibration", certificate.failures)
    return certificate


def conjugate(p: DoubleFunctor) -> DoubleFunctor:
    """op_1 op_2 rev(p); an involution exchanging (left, cart) and (cocart, right)"""
    return op_k_functor(op_k_functor(reverse_functor(p), 1), 2)


# ---------------------------------------------------------------------------
# Markings
# ---------------------------------------------------------------------------

def mark_cartesian_verticals(p: DoubleFunctor, certificate: Optional[FibrationCertificate] = None) -> MarkedDoubleCategory:
    """
    Source of p marked by its cartesian v-arrows

    Raises:
        NotCertifiedError: p is not a (left, cart)-fibration
    """
    certificate = require(certificate or check_fibration(p, "left-cart", paranoid=False))
    if certificate.marked_direction != "vertical":
        raise NotCertifiedError(f"a ({certificate.kind}) fibration has no vertical marking", [])
    return MarkedDoubleCategory(p.source, cartesian_arrows(p.vertical_part), "vertical")


def mark_cocartesian_horizontals(q: DoubleFunctor, certificate: Optional[FibrationCertificate] = None) -> MarkedDoubleCategory:
    """
    Source of q marked by its cocartesian h-arrows

    Raises:
        NotCertifiedError: q is not a (cocart, right)-fibration
    """
    certificate = require(certificate or check_fibration(q, "cocart-right", paranoid=False))
    if certificate.marked_direction != "horizontal":
        raise NotCertifiedError(f"a ({certificate.kind}) fibration has no horizontal marking", [])
    return MarkedDoubleCategory(q.source, _marked(q.horizontal_part, "cocart"), "horizontal")


# ---------------------------------------------------------------------------
# Strong maps
# ---------------------------------------------------------------------------

def _commutes(f: DoubleFunctor, p: DoubleFunctor, p_prime: DoubleFunctor, base: DoubleFunctor) -> bool:
    left = compose_double_functors(p_prime, f)
    right = compose_double_functors(base, p)
    return left == right


def is_strong_map(f: DoubleFunctor, p: DoubleFunctor, p_prime: DoubleFunctor,
                  base: Optional[DoubleFunctor] = None, kind: str = "left-cart") -> bool:
    """
    Whether the square f over base, from p to p′, preserves the marked arrows

    Args:
        f (DoubleFunctor): map of total double categories
        base (DoubleFunctor): map of bases, the identity when omitted
        kind (str): orientation of both fibrations

    Raises:
        NotCertifiedError: p or p′ is not a fibration of the given kind
        ValueError: the square does not commute
    """
    source = require(check_fibration(p, kind, paranoid=False))
    target = source if p_prime is p else require(check_fibration(p_prime, kind, paranoid=False))
    if base is None:
        base = identity_double_functor(p.target)
    if not _commutes(f, p, p_prime, base):
        raise ValueError("p′∘f ≠ base∘p: the square does not commute")
    image = f.on_h if source.marked_direction == "horizontal" else f.on_v
    return all(image[a] in target.marked for a in source.marked)


# ---------------------------------------------------------------------------
# Fibers
# ---------------------------------------------------------------------------

@dataclass
class VerticalFiber:
    """Fiber category over a base object, with the h-arrows that also sit over its identity"""
    object: Cell
    category: FinCategory
    stray_h_arrows: Tuple[Cell, ...]
    base_gaunt: bool

    @property
    def constant(self) -> bool:
        """Only identity h-arrows over the identity"""
        return not self.stray_h_arrows

    def to_dict(self) -> Dict[str, Any]:
        return {
            'object': repr(self.object),
            'objects': len(self.category.objects),
            'morphisms': len(self.category.morphisms),
            'constant': self.constant,
            'base_gaunt': self.base_gaunt,
            'stray_h_arrows': [repr(f) for f in self.stray_h_arrows],
        }


def fiber(p: DoubleFunctor, c: Cell) -> VerticalFiber:
    """
    Objects over c and v-arrows over its vertical identity

    Raises:
        CellNotFound: c is not an object of the base
    """
    C = p.target
    if c not in C.horizontal.object_set:
        raise CellNotFound("object", c)
    category = category_fiber(p.vertical_part, c)
    D = p.source
    stray = tuple(f for f in p.horizontal_part.morphisms_over(C.horizontal.ident[c])
                  if not D.horizontal.is_identity(f))
    return VerticalFiber(c, category, stray, is_gaunt(C))


def horizontal_fiber(q: DoubleFunctor, c: Cell) -> FinCategory:
    """Objects over c and h-arrows over its horizontal identity"""
    if c not in q.target.horizontal.object_set:
        raise CellNotFound("object", c)
    return category_fiber(q.horizontal_part, c)


def fiber_functor(f: DoubleFunctor, p: DoubleFunctor, p_prime: DoubleFunctor, c: Cell) -> FinFunctor:
    """Restriction of a map over the base to the vertical fibers at c"""
    source = fiber(p, c).category
    target = fiber(p_prime, c).category
    return FinFunctor(source, target,
                      {x: f.on_objects[x] for x in source.objects},
                      {v: f.on_v[v] for v in source.morphisms})


def is_fiberwise_isomorphism(f: DoubleFunctor, p: DoubleFunctor, p_prime: DoubleFunctor) -> bool:
    """Every fiber functor of a map over the base is an isomorphism of categories"""
    return all(is_isomorphism(fiber_functor(f, p, p_prime, c)) for c in p.target.objects)


# ---------------------------------------------------------------------------
# Closure under composition and base change
# ---------------------------------------------------------------------------

def compose_fibrations(p: DoubleFunctor, q: DoubleFunctor, kind: str = "left-cart") -> Tuple[DoubleFunctor, FibrationCertificate]:
    """
    q∘p for fibrations D → C → B, re-certified

    Returns:
        Tuple: (composite, certificate)
    """
    composite = compose_double_functors(q, p)
    return composite, check_fibration(composite, kind, paranoid=False)


def base_change(p: DoubleFunctor, g: DoubleFunctor, kind: str = "left-cart") -> Tuple[FinDoubleCategory, DoubleFunctor, DoubleFunctor, FibrationCertificate]:
    """
    Pullback of p along g: C′ → C, with its re-checked certificate

    Returns:
        Tuple: (pullback, projection to the source of p, pulled-back fibration, certificate)
    """
    P, to_source, pulled = pullback_double(p, g)
    return P, to_source, pulled, check_fibration(pulled, kind, paranoid=False)
