import pytest

from dblcat_fibrations.core_cat import chain, isomorphism_category
from dblcat_fibrations.dblcat import (
    arrow_double,
    boxtimes,
    grid,
    nerve_eval,
    terminal_double,
    twisted_op_double,
    validate_double_functor,
)
from dblcat_fibrations.enumeration import FunctorSearch, SearchPlan, enumerate_double_functors, functor_key
from dblcat_fibrations.errors import ResourceLimitExceeded


@pytest.mark.parametrize("target", [grid(1, 1), arrow_double(2), twisted_op_double(2),
                                    boxtimes(isomorphism_category(), chain(1))])
@pytest.mark.parametrize("m,n", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)])
def test_maps_out_of_grids_are_nerve_cells(target, m, n):
    found = enumerate_double_functors(grid(m, n), target)
    assert len(found) == len(nerve_eval(target, m, n))
    assert len({functor_key(F) for F in found}) == len(found)


def test_solutions_are_double_functors():
    for F in enumerate_double_functors(arrow_double(1), grid(1, 1)):
        assert validate_double_functor(F).ok


def test_into_a_point():
    assert len(enumerate_double_functors(arrow_double(2), terminal_double())) == 1


def test_restriction():
    d = grid(1, 1)
    found = enumerate_double_functors(grid(0, 0), d, restrict=lambda kind, cell: {(1, 1)} if kind == "object" else None)
    assert [F.on_objects[(0, 0)] for F in found] == [(1, 1)]


def test_filter():
    d = grid(1, 1)
    found = enumerate_double_functors(grid(1, 0), d, allowed=lambda kind, cell, image: cell != ((0, 1), 0) or image[0] != (0, 0))
    assert all(F.on_h[((0, 1), 0)][0] != (0, 0) for F in found)
    assert len(found) == 2 * 2


def test_restriction_is_pruned_by_boundary():
    d = grid(1, 1)
    arrows = {f for f in d.h_arrows if not d.horizontal.is_identity(f)}
    restrict = lambda kind, cell: {(0, 0)} if cell == (0, 0) else (arrows if cell == ((0, 1), 0) else None)
    found = enumerate_double_functors(grid(1, 0), d, restrict=restrict)
    assert [F.on_h[((0, 1), 0)] for F in found] == [((0, 1), 0)]


def test_shared_plan():
    shape = arrow_double(1)
    plan = SearchPlan(shape)
    for target in (grid(1, 1), twisted_op_double(2)):
        shared = FunctorSearch(shape, target, plan=plan).run()
        assert [functor_key(F) for F in shared] == [functor_key(F) for F in enumerate_double_functors(shape, target)]


def test_plan_for_another_source():
    with pytest.raises(ValueError):
        FunctorSearch(grid(1, 0), grid(1, 1), plan=SearchPlan(grid(0, 1)))


def test_cap():
    with pytest.raises(ResourceLimitExceeded):
        enumerate_double_functors(grid(1, 0), grid(2, 2), max_cells=4)
