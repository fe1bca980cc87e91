"""
Marked kernels and the bisimplicial comparison of reflections

A kernel S assigns to each degree (m, n) of a bounded window a marked double
category S[m, n] with a structure map to grid(m, n). Every kernel here is a
product X[m] × Y[n] of a horizontal factor over [m, 0] and a vertical factor
over [0, n]:

    K    Ar[m] × [0, n]              verticals over a diagonal ii marked
    K′   [m, 0] × Ar[n]              horizontals over a diagonal ii marked
    L    [m, 0] × Tw([n]^op)         horizontals over a diagonal ii marked
    A    Ar[m] × [0, n]              verticals with an identity [0, n] part marked
    B    Ar[m] × ([0] ⊠ Fun([1],[n])) two marking families, see KernelB

Ψ_S(D)(m, n) is the set of marked maps S[m, n] → D over some cell of the base.
"""

import logging
import sys
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations_with_replacement
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from tqdm import tqdm

from .config import get_settings, resolve_cap
from .constants import DEFAULT_WINDOW
from .core_cat import (
    Cell,
    FinFunctor,
    ValidationReport,
    arrow_category,
    chain,
    evaluation,
    identity_functor,
)
from .dblcat import (
    DoubleFunctor,
    FinDoubleCategory,
    MarkedDoubleCategory,
    arrow_double,
    boxtimes,
    boxtimes_functor,
    cell_to_functor,
    compose_double_functors,
    grid,
    identity_double_functor,
    map_cell,
    nerve_eval,
    pi_hor,
    pi_vert,
    product_double,
    product_double_functor,
    twisted_op_double,
)
from .enumeration import FunctorSearch, SearchPlan, functor_key
from .errors import OutsideWindowError, ResourceLimitExceeded
from .fibr import base_change, check_fibration, require
from .reflect import Reflection, reflect_dagger, reflect_perp, reflect_top

logger = logging.getLogger(__name__)

Monotone = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Monotone maps of ordinals
# ---------------------------------------------------------------------------

def monotone_maps(source: int, target: int) -> List[Monotone]:
    """All monotone maps [source] → [target] as tuples of images"""
    return list(combinations_with_replacement(range(target + 1), source + 1))


def cofaces(k: int) -> List[Monotone]:
    """The injections [k-1] → [k] missing one element"""
    return [tuple(j if j < i else j + 1 for j in range(k)) for i in range(k + 1)]


def codegeneracies(k: int) -> List[Monotone]:
    """The surjections [k+1] → [k] hitting one element twice"""
    return [tuple(j if j <= i else j - 1 for j in range(k + 2)) for i in range(k + 1)]


def monotone_functor(alpha: Monotone, source: int, target: int) -> FinFunctor:
    """chain(source) → chain(target) induced by a monotone map"""
    if len(alpha) != source + 1 or any(a > b for a, b in zip(alpha, alpha[1:])) \
            or any(not 0 <= a <= target for a in alpha):
        raise ValueError(f"{alpha!r} is not a monotone map [{source}] → [{target}]")
    return FinFunctor(
        chain(source), chain(target),
        {i: alpha[i] for i in range(source + 1)},
        {(i, j): (alpha[i], alpha[j]) for i in range(source + 1) for j in range(i, source + 1)},
    )


def grid_operator(alpha: Monotone, beta: Monotone, target: Tuple[int, int]) -> DoubleFunctor:
    """grid(m, n) → grid(m′, n′) induced by α: [m] → [m′] and β: [n] → [n′]"""
    return boxtimes_functor(monotone_functor(alpha, len(alpha) - 1, target[0]),
                            monotone_functor(beta, len(beta) - 1, target[1]))


# ---------------------------------------------------------------------------
# Factors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Factor:
    """One side of a product kernel: a shape per degree, its projection and its operators"""
    name: str
    shape: Callable[[int], FinDoubleCategory]
    projection: Callable[[int], DoubleFunctor]
    operator: Callable[[Monotone, int], DoubleFunctor]


def _thin_operator(shape: Callable[[int], FinDoubleCategory], alpha: Monotone, target: int) -> DoubleFunctor:
    """Thin shapes on pairs (i, j) act on every coordinate"""
    source = shape(len(alpha) - 1)
    point = lambda a: (alpha[a[0]], alpha[a[1]])
    cells = lambda c: tuple(point(a) for a in c)
    return DoubleFunctor(
        source, shape(target),
        {x: point(x) for x in source.objects},
        {f: cells(f) for f in source.h_arrows},
        {v: cells(v) for v in source.v_arrows},
        {s: cells(s) for s in source.squares},
    )


@lru_cache(maxsize=None)
def _arrows(k: int) -> FinDoubleCategory:
    return arrow_double(k)


@lru_cache(maxsize=None)
def _twisted(k: int) -> FinDoubleCategory:
    return twisted_op_double(k)


@lru_cache(maxsize=None)
def _grid(m: int, n: int) -> FinDoubleCategory:
    return grid(m, n)


@lru_cache(maxsize=None)
def arrow_functor_column(k: int) -> FinDoubleCategory:
    """[0] ⊠ Fun([1], [k])"""
    return boxtimes(chain(0), arrow_category(chain(k)))


def _twisted_projection(k: int) -> DoubleFunctor:
    """Tw([k]^op) → [0, k], (i, j) ↦ i"""
    source = _twisted(k)
    return DoubleFunctor(
        source, _grid(0, k),
        {a: (0, a[0]) for a in source.objects},
        {f: ((0, 0), f[0][0]) for f in source.h_arrows},
        {v: (0, (v[0][0], v[1][0])) for v in source.v_arrows},
        {s: ((0, 0), (s[0][0], s[2][0])) for s in source.squares},
    )


def _arrow_category_map(alpha: Monotone, target: int) -> FinFunctor:
    k = len(alpha) - 1
    pair = lambda f: (alpha[f[0]], alpha[f[1]])
    source = arrow_category(chain(k))
    return FinFunctor(
        source, arrow_category(chain(target)),
        {f: pair(f) for f in source.objects},
        {a: tuple(pair(f) for f in a) for a in source.morphisms},
    )


ARROW_ROW = Factor(
    "Ar[m] via (i, j) ↦ j", _arrows, pi_hor,
    lambda alpha, target: _thin_operator(_arrows, alpha, target),
)
ARROW_COLUMN = Factor(
    "Ar[n] via (i, j) ↦ i", _arrows, pi_vert,
    lambda alpha, target: _thin_operator(_arrows, alpha, target),
)
GRID_ROW = Factor(
    "[m, 0]", lambda k: _grid(k, 0), lambda k: identity_double_functor(_grid(k, 0)),
    lambda alpha, target: boxtimes_functor(monotone_functor(alpha, len(alpha) - 1, target),
                                           identity_functor(chain(0))),
)
GRID_COLUMN = Factor(
    "[0, n]", lambda k: _grid(0, k), lambda k: identity_double_functor(_grid(0, k)),
    lambda alpha, target: boxtimes_functor(identity_functor(chain(0)),
                                           monotone_functor(alpha, len(alpha) - 1, target)),
)
TWISTED_COLUMN = Factor(
    "Tw([n]^op) via (i, j) ↦ i", _twisted, _twisted_projection,
    lambda alpha, target: _thin_operator(_twisted, alpha, target),
)
ARROW_FUNCTOR_COLUMN = Factor(
    "[0] ⊠ Fun([1], [n]) via dom", arrow_functor_column,
    lambda k: boxtimes_functor(identity_functor(chain(0)), evaluation(chain(k), 0)),
    lambda alpha, target: boxtimes_functor(identity_functor(chain(0)), _arrow_category_map(alpha, target)),
)


def glue(m: int, n: int) -> DoubleFunctor:
    """The isomorphism [m, 0] × [0, n] → [m, n]"""
    source = product_double(_grid(m, 0), _grid(0, n))
    join = lambda cell: (cell[0][0], cell[1][1])
    return DoubleFunctor(
        source, _grid(m, n),
        {x: join(x) for x in source.objects},
        {f: join(f) for f in source.h_arrows},
        {v: join(v) for v in source.v_arrows},
        {s: join(s) for s in source.squares},
    )


def _is_diagonal_identity(arrow: Cell) -> bool:
    """An identity of a thin shape at an object (i, i)"""
    return arrow[0] == arrow[1] and arrow[0][0] == arrow[0][1]


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

class Kernel(ABC):
    """Abstract base class for marked kernels"""

    def __init__(self, window: Optional[Tuple[int, int]] = None):
        self.name = ""
        self.display_name = ""
        self.direction = "vertical"
        self.input_kind = "left-cart"
        self.extra_degree = (0, 1)
        self.window = tuple(window or DEFAULT_WINDOW)
        self._cells: Dict[Tuple[int, int], MarkedDoubleCategory] = {}
        self._structure: Dict[Tuple[int, int], DoubleFunctor] = {}
        self._plans: Dict[Tuple[int, int], SearchPlan] = {}

    @property
    @abstractmethod
    def factors(self) -> Tuple[Factor, Factor]:
        """(horizontal factor, vertical factor)"""

    @abstractmethod
    def is_marked(self, arrow: Cell) -> bool:
        """Whether a non-identity arrow of the product is in the base marking"""

    def check_degree(self, m: int, n: int) -> None:
        if m < 0 or n < 0 or m > self.window[0] or n > self.window[1]:
            raise OutsideWindowError((m, n), self.window)

    def cell(self, m: int, n: int) -> MarkedDoubleCategory:
        """S[m, n] with its marking"""
        self.check_degree(m, n)
        if (m, n) not in self._cells:
            row, column = self.factors
            base = product_double(row.shape(m), column.shape(n))
            cat = base.vertical if self.direction == "vertical" else base.horizontal
            marked = frozenset(a for a in cat.morphisms if cat.is_identity(a) or self.is_marked(a))
            self._cells[(m, n)] = MarkedDoubleCategory(base, marked, self.direction)
        return self._cells[(m, n)]

    def search_plan(self, m: int, n: int) -> SearchPlan:
        """Functor search plan out of S[m, n], reused across base cells and targets"""
        if (m, n) not in self._plans:
            self._plans[(m, n)] = SearchPlan(self.cell(m, n).base)
        return self._plans[(m, n)]

    def structure_map(self, m: int, n: int) -> DoubleFunctor:
        """S[m, n] → grid(m, n)"""
        self.check_degree(m, n)
        if (m, n) not in self._structure:
            row, column = self.factors
            self._structure[(m, n)] = compose_double_functors(
                glue(m, n), product_double_functor(row.projection(m), column.projection(n)))
        return self._structure[(m, n)]

    def operator(self, alpha: Monotone, beta: Monotone, target: Tuple[int, int]) -> DoubleFunctor:
        """S[m, n] → S[m′, n′] induced by α: [m] → [m′] and β: [n] → [n′]"""
        self.check_degree(len(alpha) - 1, len(beta) - 1)
        self.check_degree(*target)
        row, column = self.factors
        return product_double_functor(row.operator(alpha, target[0]), column.operator(beta, target[1]))

    def extra_marked(self) -> frozenset:
        """Marked arrows of S⁺ at the extra degree; everything by default"""
        base = self.cell(*self.extra_degree).base
        cat = base.vertical if self.direction == "vertical" else base.horizontal
        return frozenset(cat.morphisms)

    def marking(self, p: DoubleFunctor) -> MarkedDoubleCategory:
        """
        Source of p marked the way this kernel expects

        Raises:
            NotCertifiedError: p is not a fibration of the kernel's input kind
        """
        certificate = require(check_fibration(p, self.input_kind, paranoid=False))
        return MarkedDoubleCategory(p.source, certificate.marked, certificate.marked_direction)

    def get_info(self) -> Dict[str, Any]:
        row, column = self.factors
        return {
            'name': self.name,
            'display_name': self.display_name,
            'factors': [row.name, column.name],
            'direction': self.direction,
            'input_kind': self.input_kind,
            'extra_degree': list(self.extra_degree),
            'window': list(self.window),
        }

    def __repr__(self) -> str:
        return f"{type(self).__name__}(window={self.window})"


class KernelK(Kernel):
    """Ar[m] × [0, n]; verticals over each diagonal ii are marked"""

    def __init__(self, window: Optional[Tuple[int, int]] = None):
        super().__init__(window)
        self.name = "K"
        self.display_name = "K[m, n] = Ar[m] × [0, n]"
        self.extra_degree = (1, 0)

    @property
    def factors(self) -> Tuple[Factor, Factor]:
        return ARROW_ROW, GRID_COLUMN

    def is_marked(self, arrow: Cell) -> bool:
        return _is_diagonal_identity(arrow[0])

    def extra_marked(self) -> frozenset:
        # the vertical 01 ⇒ 11 of Ar[1]
        return self.cell(1, 0).marked | {(((0, 1), (1, 1)), (0, (0, 0)))}


class KernelKPrime(Kernel):
    """[m, 0] × Ar[n]; horizontals over each diagonal ii are marked"""

    def __init__(self, window: Optional[Tuple[int, int]] = None):
        super().__init__(window)
        self.name = "K'"
        self.display_name = "K′[m, n] = [m, 0] × Ar[n]"
        self.direction = "horizontal"
        self.input_kind = "cocart-right"

    @property
    def factors(self) -> Tuple[Factor, Factor]:
        return GRID_ROW, ARROW_COLUMN

    def is_marked(self, arrow: Cell) -> bool:
        return _is_diagonal_identity(arrow[1])


class KernelL(Kernel):
    """[m, 0] × Tw([n]^op); horizontals over each diagonal ii are marked"""

    def __init__(self, window: Optional[Tuple[int, int]] = None):
        super().__init__(window)
        self.name = "L"
        self.display_name = "L[m, n] = [m, 0] × Tw([n]^op)"
        self.direction = "horizontal"
        self.input_kind = "cocart-left"

    @property
    def factors(self) -> Tuple[Factor, Factor]:
        return GRID_ROW, TWISTED_COLUMN

    def is_marked(self, arrow: Cell) -> bool:
        return _is_diagonal_identity(arrow[1])


class KernelA(Kernel):
    """Ar[m] × [0, n]; verticals of Ar[m] × {k} are marked"""

    def __init__(self, window: Optional[Tuple[int, int]] = None):
        super().__init__(window)
        self.name = "A"
        self.display_name = "A[m, n] = Ar[m] × [0, n]"

    @property
    def factors(self) -> Tuple[Factor, Factor]:
        return ARROW_ROW, GRID_COLUMN

    def is_marked(self, arrow: Cell) -> bool:
        step = arrow[1][1]
        return step[0] == step[1]


class KernelB(Kernel):
    """
    Ar[m] × ([0] ⊠ Fun([1], [n])) over [m, 0] × [0, n] via dom

    Marked verticals: over a diagonal aa of Ar[m], every ik → jk; and over
    the identity of a diagonal object ii of Fun([1], [n]), every vertical of
    Ar[m].
    """

    def __init__(self, window: Optional[Tuple[int, int]] = None):
        super().__init__(window)
        self.name = "B"
        self.display_name = "B[m, n] = Ar[m] × ([0] ⊠ Fun([1], [n]))"

    @property
    def factors(self) -> Tuple[Factor, Factor]:
        return ARROW_ROW, ARROW_FUNCTOR_COLUMN

    def is_marked(self, arrow: Cell) -> bool:
        u, (_, square) = arrow
        source, target, _, codomain_leg = square
        if _is_diagonal_identity(u) and codomain_leg[0] == codomain_leg[1]:
            return True
        return source == target and source[0] == source[1]


KERNELS = {
    "K": KernelK,
    "K'": KernelKPrime,
    "L": KernelL,
    "A": KernelA,
    "B": KernelB,
}


def kernel_K(window=None) -> Kernel:
    return KernelK(window)


def kernel_Kprime(window=None) -> Kernel:
    return KernelKPrime(window)


def kernel_L(window=None) -> Kernel:
    return KernelL(window)


def kernel_A(window=None) -> Kernel:
    return KernelA(window)


def kernel_B(window=None) -> Kernel:
    return KernelB(window)


def get_kernel(name: str, window=None) -> Kernel:
    if name not in KERNELS:
        raise ValueError(f"unknown kernel {name!r}; expected one of {', '.join(KERNELS)}")
    return KERNELS[name](window)


@lru_cache(maxsize=None)
def shared_kernel(name: str, window: Tuple[int, int]) -> Kernel:
    """One kernel per (name, window), so cells and search plans are built once per process"""
    return get_kernel(name, window)


def kernel_naturality(kernel: Kernel, window: Optional[Tuple[int, int]] = None) -> ValidationReport:
    """
    Structure maps commute with every face and degeneracy operator inside the
    window, and operators send marked arrows to marked arrows
    """
    M, N = window or kernel.window
    report = ValidationReport(f"kernel {kernel.name}")
    kind = "v" if kernel.direction == "vertical" else "h"
    for m in range(M + 1):
        for n in range(N + 1):
            moves = []
            identity_n = tuple(range(n + 1))
            identity_m = tuple(range(m + 1))
            for alpha in cofaces(m + 1) if m + 1 <= M else ():
                moves.append((alpha, identity_n, (m + 1, n)))
            for alpha in codegeneracies(m - 1) if m >= 1 else ():
                moves.append((alpha, identity_n, (m - 1, n)))
            for beta in cofaces(n + 1) if n + 1 <= N else ():
                moves.append((identity_m, beta, (m, n + 1)))
            for beta in codegeneracies(n - 1) if n >= 1 else ():
                moves.append((identity_m, beta, (m, n - 1)))
            source = kernel.cell(m, n)
            for alpha, beta, target in moves:
                report.checked += 1
                op = kernel.operator(alpha, beta, target)
                left = compose_double_functors(kernel.structure_map(*target), op)
                right = compose_double_functors(grid_operator(alpha, beta, target), kernel.structure_map(m, n))
                if left != right:
                    report.add("structure maps are natural", ((m, n), alpha, beta))
                marked = kernel.cell(*target).marked
                for a in source.marked:
                    if op.apply(kind, a) not in marked:
                        report.add("operators preserve markings", ((m, n), alpha, beta, a))
                        break
    logger.info("kernel %s naturality: %d operators, %d violations",
                kernel.name, report.checked, len(report.violations))
    return report


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

class _FiberIndex:
    """Preimages under p, cached per base cell"""

    def __init__(self, p: DoubleFunctor):
        self.p = p
        self._cache: Dict[Tuple[str, Cell], Dict[Cell, None]] = {}

    def over(self, kind: str, base_cell: Cell) -> Dict[Cell, None]:
        key = (kind, base_cell)
        if key not in self._cache:
            p = self.p
            if kind == "object":
                found = p.horizontal_part.objects_over(base_cell)
            elif kind == "h":
                found = p.horizontal_part.morphisms_over(base_cell)
            elif kind == "v":
                found = p.vertical_part.morphisms_over(base_cell)
            else:
                found = p.squares_h_part.morphisms_over(base_cell)
            self._cache[key] = dict.fromkeys(found)
        return self._cache[key]


@dataclass
class PsiEvaluation:
    """
    Ψ_S(D)(m, n): pairs (base cell, marked map S[m, n] → D over it)

    marked lists the indices of cells that are also marked maps out of S⁺,
    and is only set at the kernel's extra degree.
    """
    kernel: str
    degree: Tuple[int, int]
    cells: List[Tuple[Any, DoubleFunctor]] = field(default_factory=list)
    marked: Optional[List[int]] = None

    def __len__(self) -> int:
        return len(self.cells)

    def keys(self) -> List[Tuple[Any, Tuple]]:
        return [(base, functor_key(F)) for base, F in self.cells]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kernel': self.kernel,
            'degree': list(self.degree),
            'cells': len(self.cells),
            'marked': None if self.marked is None else len(self.marked),
        }


def psi_eval(kernel: Kernel, p: DoubleFunctor, m: int, n: int,
             marking: Optional[MarkedDoubleCategory] = None,
             max_cells: Optional[int] = None) -> PsiEvaluation:
    """
    Marked maps S[m, n] → D lying over cells grid(m, n) → C

    Args:
        kernel (Kernel): the kernel S
        p (DoubleFunctor): D → C
        marking (MarkedDoubleCategory): marking of D; computed from p's
            certificate when omitted
        max_cells (int): cap on the total number of cells

    Raises:
        OutsideWindowError: (m, n) is beyond the kernel window
        NotCertifiedError: no marking given and p has the wrong kind
        ResourceLimitExceeded: more than max_cells cells
    """
    kernel.check_degree(m, n)
    marking = marking or kernel.marking(p)
    if marking.direction != kernel.direction:
        raise ValueError(f"kernel {kernel.name} needs a {kernel.direction} marking, got {marking.direction}")
    cap = resolve_cap(max_cells)
    shape = kernel.cell(m, n)
    plan = kernel.search_plan(m, n)
    structure = kernel.structure_map(m, n)
    marked_kind = "v" if kernel.direction == "vertical" else "h"
    fibers = _FiberIndex(p)

    def allowed(kind: str, cell: Cell, image: Cell) -> bool:
        return kind != marked_kind or cell not in shape.marked or image in marking.marked

    result = PsiEvaluation(kernel.name, (m, n))
    for base in nerve_eval(p.target, m, n, cap):
        over = compose_double_functors(cell_to_functor(p.target, m, n, base), structure)
        restrict = lambda kind, cell, over=over: fibers.over(kind, over.apply(kind, cell))
        found = FunctorSearch(shape.base, p.source, restrict, allowed, cap - len(result.cells), plan).run()
        result.cells.extend((base, F) for F in found)

    if (m, n) == kernel.extra_degree:
        extra = kernel.extra_marked()
        result.marked = [i for i, (_, F) in enumerate(result.cells)
                         if all(F.apply(marked_kind, a) in marking.marked for a in extra)]
    logger.debug("Ψ_%s(%d, %d): %d cells", kernel.name, m, n, len(result.cells))
    return result


# ---------------------------------------------------------------------------
# Comparison maps
# ---------------------------------------------------------------------------

@dataclass
class DegreeComparison:
    """A map between two finite sets in one degree, checked for bijectivity"""
    name: str
    degree: Tuple[int, int]
    left: int
    right: int
    bijective: bool
    mismatch: Optional[Tuple[Any, ...]] = None
    method: str = "bijection"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'degree': list(self.degree),
            'left': self.left,
            'right': self.right,
            'bijective': self.bijective,
            'mismatch': None if self.mismatch is None else [repr(w) for w in self.mismatch],
            'method': self.method,
        }


def _compare_images(name: str, degree: Tuple[int, int], images: Sequence[Optional[Hashable]],
                    target: Sequence[Hashable]) -> DegreeComparison:
    seen = set()
    mismatch = None
    for index, image in enumerate(images):
        if image is None:
            mismatch = ("no image", index)
            break
        if image in seen:
            mismatch = ("not injective", image)
            break
        seen.add(image)
    if mismatch is None:
        target_set = set(target)
        outside = [image for image in images if image not in target_set]
        missing = [t for t in target if t not in seen]
        if outside:
            mismatch = ("outside target", outside[0])
        elif missing:
            mismatch = ("not surjective", missing[0])
    return DegreeComparison(name, degree, len(images), len(target), mismatch is None, mismatch)


def _assemble(q: DoubleFunctor, m: int, n: int, base: Any,
              obj: Callable[[int, int], Cell],
              h: Callable[[int, int], Cell],
              v: Callable[[int, int], Cell]) -> Optional[Any]:
    """
    Generating data of an (m, n)-cell of q.source from its objects, h-steps
    and v-steps; squares are found by boundary and base square
    """
    X = q.source
    if m == 0 and n == 0:
        return obj(0, 0)
    if n == 0:
        return tuple(h(i, 0) for i in range(m))
    if m == 0:
        return tuple(v(0, k) for k in range(n))
    rows = []
    for k in range(n):
        row = []
        for i in range(m):
            found = [s for s in X.squares_with_boundary(h(i, k), h(i, k + 1), v(i, k), v(i + 1, k))
                     if q.on_squares[s] == base[k][i]]
            if len(found) != 1:
                return None
            row.append(found[0])
        rows.append(tuple(row))
    return tuple(rows)


def _fun_identity(k: int) -> Cell:
    return ((k, k), (k, k), (k, k), (k, k))


class ZigZag:
    """
    Degreewise comparisons for one (left, cart)-fibration p: D → C

        K   Ψ_K(D)   → N(Ψ⊥D)
        ζ*  N(D)     → Ψ_A(D)
        η*  Ψ_B(D)   → Ψ_A(D)
        θ*  Ψ_B(D)   → N(Ψ⊤Ψ⊥D)
        T   Ψ_K′(Ψ⊥D) → N(Ψ⊤Ψ⊥D)
    """

    def __init__(self, p: DoubleFunctor, window: Optional[Tuple[int, int]] = None,
                 max_cells: Optional[int] = None):
        self.p = p
        self.window = tuple(window or get_settings().window)
        self.max_cells = max_cells
        self.certificate = require(check_fibration(p, "left-cart", paranoid=False))
        self.marking = MarkedDoubleCategory(p.source, self.certificate.marked, "vertical")
        self.K = shared_kernel("K", self.window)
        self.K_prime = shared_kernel("K'", self.window)
        self.A = shared_kernel("A", self.window)
        self.B = shared_kernel("B", self.window)
        self._psi: Dict[Tuple[str, int, int], PsiEvaluation] = {}
        self._nerves: Dict[Tuple[str, int, int], List[Any]] = {}

    def nerve(self, which: str, m: int, n: int) -> List[Any]:
        """N(D), N(Ψ⊥D) or N(Ψ⊤Ψ⊥D) in degree (m, n), for which = source, perp or top"""
        key = (which, m, n)
        if key not in self._nerves:
            double = {"source": lambda: self.p.source,
                      "perp": lambda: self.perp.double,
                      "top": lambda: self.top.double}[which]()
            self._nerves[key] = nerve_eval(double, m, n, self.max_cells)
        return self._nerves[key]

    @cached_property
    def perp(self) -> Reflection:
        return reflect_perp(self.p, self.certificate)

    @cached_property
    def top(self) -> Reflection:
        return reflect_top(self.perp.projection, self.perp.certificate)

    @cached_property
    def perp_marking(self) -> MarkedDoubleCategory:
        return MarkedDoubleCategory(self.perp.double, self.perp.certificate.marked, "horizontal")

    def psi(self, kernel: Kernel, m: int, n: int) -> PsiEvaluation:
        key = (kernel.name, m, n)
        if key not in self._psi:
            if kernel is self.K_prime:
                self._psi[key] = psi_eval(kernel, self.perp.projection, m, n, self.perp_marking, self.max_cells)
            else:
                self._psi[key] = psi_eval(kernel, self.p, m, n, self.marking, self.max_cells)
        return self._psi[key]

    def k_agreement(self, m: int, n: int) -> DegreeComparison:
        """Ψ_K(D)(m, n) ≅ N(Ψ⊥D)(m, n)"""
        q = self.perp.projection

        def image(base: Any, F: DoubleFunctor) -> Optional[Any]:
            obj = lambda i, k: F.on_objects[((i, i), (0, k))]
            h = lambda i, k: (F.on_h[(((i, i), (i, i + 1)), ((0, 0), k))],
                              F.on_v[(((i, i + 1), (i + 1, i + 1)), (0, (k, k)))])
            v = lambda i, k: F.on_v[(((i, i), (i, i)), (0, (k, k + 1)))]
            return _assemble(q, m, n, base, obj, h, v)

        images = [image(base, F) for base, F in self.psi(self.K, m, n).cells]
        target = self.nerve("perp", m, n)
        return _compare_images("K", (m, n), images, target)

    def zeta(self, m: int, n: int) -> DegreeComparison:
        """ζ*: precomposition with the structure map A[m, n] → [m, n]"""
        structure = self.A.structure_map(m, n)
        images = [(map_cell(self.p, m, n, cell),
                   functor_key(compose_double_functors(cell_to_functor(self.p.source, m, n, cell), structure)))
                  for cell in self.nerve("source", m, n)]
        return _compare_images("zeta", (m, n), images, self.psi(self.A, m, n).keys())

    def eta_map(self, m: int, n: int) -> DoubleFunctor:
        """η: A[m, n] → B[m, n], identity on Ar[m] and k ↦ kk on [n]"""
        constant = FinFunctor(
            chain(n), arrow_category(chain(n)),
            {k: (k, k) for k in range(n + 1)},
            {(k, l): ((k, k), (l, l), (k, l), (k, l)) for k in range(n + 1) for l in range(k, n + 1)},
        )
        cst = boxtimes_functor(identity_functor(chain(0)), constant)
        return product_double_functor(identity_double_functor(_arrows(m)), cst)

    def eta(self, m: int, n: int) -> DegreeComparison:
        """η*: precomposition with η"""
        eta = self.eta_map(m, n)
        images = [(base, functor_key(compose_double_functors(F, eta))) for base, F in self.psi(self.B, m, n).cells]
        return _compare_images("eta", (m, n), images, self.psi(self.A, m, n).keys())

    def theta(self, m: int, n: int) -> DegreeComparison:
        """θ*: Ψ_B(D)(m, n) → N(Ψ⊤Ψ⊥D)(m, n) on generating cells"""
        q = self.top.projection
        H = self.p.source.horizontal

        def image(base: Any, F: DoubleFunctor) -> Optional[Any]:
            obj = lambda i, k: F.on_objects[((i, i), (0, (k, k)))]
            h = lambda i, k: (F.on_h[(((i, i), (i, i + 1)), ((0, 0), (k, k)))],
                              F.on_v[(((i, i + 1), (i + 1, i + 1)), (0, _fun_identity(k)))])

            def v(i: int, k: int) -> Cell:
                fiber_step = F.on_v[(((i, i), (i, i)), (0, ((k, k), (k, k + 1), (k, k), (k, k + 1))))]
                cartesian = F.on_v[(((i, i), (i, i)), (0, ((k, k + 1), (k + 1, k + 1), (k, k + 1), (k + 1, k + 1))))]
                return (cartesian, (H.ident[obj(i, k)], fiber_step))

            return _assemble(q, m, n, base, obj, h, v)

        images = [image(base, F) for base, F in self.psi(self.B, m, n).cells]
        target = self.nerve("top", m, n)
        return _compare_images("theta", (m, n), images, target)

    def t_agreement(self, m: int, n: int) -> DegreeComparison:
        """Ψ_K′(Ψ⊥D)(m, n) ≅ N(Ψ⊤Ψ⊥D)(m, n)"""
        q = self.top.projection

        def image(base: Any, F: DoubleFunctor) -> Optional[Any]:
            obj = lambda i, k: F.on_objects[((i, 0), (k, k))]
            h = lambda i, k: F.on_h[(((i, i + 1), 0), ((k, k), (k, k)))]
            v = lambda i, k: (F.on_v[((i, (0, 0)), ((k, k + 1), (k + 1, k + 1)))],
                              F.on_h[(((i, i), 0), ((k, k), (k, k + 1)))])
            return _assemble(q, m, n, base, obj, h, v)

        images = [image(base, F) for base, F in self.psi(self.K_prime, m, n).cells]
        target = self.nerve("top", m, n)
        return _compare_images("T", (m, n), images, target)

    COMPARISONS = {
        "K": "k_agreement",
        "zeta": "zeta",
        "eta": "eta",
        "theta": "theta",
        "T": "t_agreement",
    }

    def compare(self, name: str, m: int, n: int) -> DegreeComparison:
        if name not in self.COMPARISONS:
            raise ValueError(f"unknown comparison {name!r}; expected one of {', '.join(self.COMPARISONS)}")
        return getattr(self, self.COMPARISONS[name])(m, n)


def zig_zeta(p: DoubleFunctor, m: int, n: int, max_cells: Optional[int] = None) -> DegreeComparison:
    return ZigZag(p, max_cells=max_cells).zeta(m, n)


def zig_eta(p: DoubleFunctor, m: int, n: int, max_cells: Optional[int] = None) -> DegreeComparison:
    return ZigZag(p, max_cells=max_cells).eta(m, n)


def zig_theta(p: DoubleFunctor, m: int, n: int, max_cells: Optional[int] = None) -> DegreeComparison:
    return ZigZag(p, max_cells=max_cells).theta(m, n)


def psi_T_eval(p: DoubleFunctor, m: int, n: int, max_cells: Optional[int] = None) -> PsiEvaluation:
    """Ψ_T(D)(m, n), computed as Ψ_K′ of the reflection of D"""
    zigzag = ZigZag(p, max_cells=max_cells)
    return zigzag.psi(zigzag.K_prime, m, n)


def dagger_agreement(p: DoubleFunctor, m: int, n: int, max_cells: Optional[int] = None) -> DegreeComparison:
    """
    |Ψ_L(D)(m, n)| against |N(Ψ†D)(m, n)| for a (cocart, left)-fibration;
    compared by cardinality only
    """
    left = psi_eval(KernelL(), p, m, n, max_cells=max_cells)
    right = nerve_eval(reflect_dagger(p).double, m, n, max_cells)
    same = len(left) == len(right)
    return DegreeComparison("L", (m, n), len(left), len(right), same,
                            None if same else ("cardinality", len(left), len(right)), "cardinality")


def base_change_agreement(kernel: Kernel, p: DoubleFunctor, g: DoubleFunctor, m: int, n: int,
                          max_cells: Optional[int] = None) -> DegreeComparison:
    """
    Ψ_S(C′ ×_C D)(m, n) against the pullback of Ψ_S(D)(m, n) along N(g)

    A cell (G′, F) on the left goes to (G′, g∘G′, projection∘F).
    """
    P, to_source, pulled, certificate = base_change(p, g, kernel.input_kind)
    require(certificate)
    left = psi_eval(kernel, pulled, m, n,
                    MarkedDoubleCategory(P, certificate.marked, certificate.marked_direction), max_cells)
    right = psi_eval(kernel, p, m, n, max_cells=max_cells)
    by_base: Dict[Any, List[Tuple]] = {}
    for base, F in right.cells:
        by_base.setdefault(base, []).append(functor_key(F))
    target = [(base, map_cell(g, m, n, base), key)
              for base in nerve_eval(g.source, m, n, max_cells)
              for key in by_base.get(map_cell(g, m, n, base), ())]
    images = [(base, map_cell(g, m, n, base), functor_key(compose_double_functors(to_source, F)))
              for base, F in left.cells]
    return _compare_images(f"base change {kernel.name}", (m, n), images, target)


@dataclass
class KernelComparison:
    """All degreewise comparisons of one fibration inside a window"""
    window: Tuple[int, int]
    results: List[DegreeComparison] = field(default_factory=list)
    capped: List[Tuple[str, Tuple[int, int]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.bijective for r in self.results) and not self.capped

    def to_dict(self) -> Dict[str, Any]:
        return {
            'window': list(self.window),
            'ok': self.ok,
            'results': [r.to_dict() for r in self.results],
            'capped': [[name, list(degree)] for name, degree in self.capped],
        }


def compare_kernels(p: DoubleFunctor, window: Optional[Tuple[int, int]] = None,
                    kernels: Sequence[str] = ("K", "zeta", "eta", "theta", "T"),
                    max_cells: Optional[int] = None,
                    stop_on_cap: bool = True) -> KernelComparison:
    """
    Run the named comparisons in every degree of the window

    Raises:
        NotCertifiedError: p is not a (left, cart)-fibration
        ResourceLimitExceeded: a degree hits the cap and stop_on_cap is set
    """
    zigzag = ZigZag(p, window, max_cells)
    M, N = zigzag.window
    report = KernelComparison((M, N))
    jobs = [(name, m, n) for name in kernels for m in range(M + 1) for n in range(N + 1)]
    for name, m, n in tqdm(jobs, desc="compare", dynamic_ncols=True, disable=not sys.stderr.isatty()):
        try:
            result = zigzag.compare(name, m, n)
        except ResourceLimitExceeded:
            if stop_on_cap:
                raise
            report.capped.append((name, (m, n)))
            continue
        report.results.append(result)
        if not result.bijective:
            logger.warning("%s fails in degree (%d, %d): %s", name, m, n, result.mismatch)
    logger.info("kernel comparison in window %s: %s", report.window, "ok" if report.ok else "mismatch")
    return report


# ---------------------------------------------------------------------------
# Quadruple presentation of T
# ---------------------------------------------------------------------------

@dataclass
class ThetaOracleReport:
    """
    Data (φ, τ₀, τ₁) realized by quadruples (α, β, γ, δ) with a, b ≤ bound

    φ = α∘γ: [s]⋆[t] → [m] names the Ar[m] part, σ is its restriction to
    [s]; τ₀ = β∘γ|[t] and τ₁ = β∘δ are the two maps [t] → [n].
    """
    degree: Tuple[int, int]
    shape: Tuple[int, int]
    bound: int
    realized: frozenset
    pointwise: bool
    stable: bool

    @property
    def status(self) -> str:
        return "stable" if self.stable else "inconclusive"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'degree': list(self.degree),
            'shape': list(self.shape),
            'bound': self.bound,
            'realized': len(self.realized),
            'pointwise': self.pointwise,
            'status': self.status,
            'note': "bounded enumeration of the colimit presentation",
        }


def _realized(m: int, n: int, s: int, t: int, bound: int) -> frozenset:
    found = set()
    for a in range(bound + 1):
        alphas = monotone_maps(a, m)
        # φ-values reachable from each γ
        gammas = [(gamma, frozenset(tuple(alpha[x] for x in gamma) for alpha in alphas))
                  for gamma in monotone_maps(s + t + 1, a)]
        for b in range(bound + 1):
            deltas = monotone_maps(t, b)
            seen = set()
            for beta in monotone_maps(a + b + 1, n):
                head, tail = beta[:a + 1], beta[a + 1:]
                if (head, tail) in seen:
                    continue
                seen.add((head, tail))
                late = {tuple(tail[x] for x in delta) for delta in deltas}
                early: Dict[Tuple, set] = {}
                for gamma, phis in gammas:
                    early.setdefault(tuple(head[x] for x in gamma[s + 1:]), set()).update(phis)
                for tau0, phis in early.items():
                    for phi in phis:
                        for tau1 in late:
                            found.add((phi, tau0, tau1))
    return frozenset(found)


def theta_image_oracle(m: int, n: int, s: int, t: int, bound: Optional[int] = None) -> ThetaOracleReport:
    """
    Enumerate α: [a] → [m], β: [a]⋆[b] → [n], γ: [s]⋆[t] → [a] and
    δ: [t] → [b] for a, b ≤ bound, then again with bound + 1

    A mismatch between the two runs marks the result inconclusive.
    """
    bound = m + n + 4 if bound is None else bound
    realized = _realized(m, n, s, t, bound)
    stable = realized == _realized(m, n, s, t, bound + 1)
    pointwise = all(x <= y for _, tau0, tau1 in realized for x, y in zip(tau0, tau1))
    if not stable:
        logger.warning("quadruple enumeration for (%d, %d) at [%d, %d] did not stabilize at bound %d",
                       m, n, s, t, bound)
    return ThetaOracleReport((m, n), (s, t), bound, realized, pointwise, stable)
