from itertools import product

import pytest
from hypothesis import given, strategies as st

from dblcat_fibrations.config import Settings, use_settings
from dblcat_fibrations.core_cat import chain, isomorphism_category
from dblcat_fibrations.dblcat import (
    FinDoubleCategory,
    MarkedDoubleCategory,
    arrow_double,
    boxtimes,
    cell_to_functor,
    count_monotone_maps,
    functor_to_cell,
    grid,
    identity_double_functor,
    is_double_isomorphism,
    is_gaunt,
    join_count,
    nerve_eval,
    op_k,
    pi_hor,
    pi_vert,
    product_double,
    product_double_functor,
    pullback_double,
    reverse,
    segal_check,
    swap_isomorphism,
    terminal_double,
    thin_double,
    to_terminal_double,
    twisted_double,
    twisted_op_double,
    validate_double,
    validate_double_functor,
    validate_marking,
)
from dblcat_fibrations.errors import ResourceLimitExceeded

JOIN_DEGREES = [
    pytest.param(n, p, q, marks=pytest.mark.slow) if p + q >= 4 else (n, p, q)
    for n, p, q in product(range(4), repeat=3)
]

small = st.integers(min_value=0, max_value=2)


def _counts(d):
    return len(d.objects), len(d.h_arrows), len(d.v_arrows), len(d.squares)


class TestShapes:
    def test_grid_sizes(self):
        assert _counts(grid(1, 1)) == (4, 6, 6, 9)

    def test_terminal(self):
        d = terminal_double()
        assert d.objects == ((0, 0),)
        assert d.h_arrows == (((0, 0), 0),)
        assert d.v_arrows == ((0, (0, 0)),)
        assert d.squares == (((0, 0), (0, 0)),)

    def test_boundary_of_square(self):
        d = grid(1, 1)
        s = ((0, 1), (0, 1))
        assert d.boundary(s) == (((0, 1), 0), ((0, 1), 1), (0, (0, 1)), (1, (0, 1)))
        assert d.squares_with_boundary(*d.boundary(s)) == (s,)

    @pytest.mark.parametrize("d", [
        grid(1, 1), grid(2, 1), terminal_double(), arrow_double(2), twisted_double(2),
        twisted_op_double(2), boxtimes(isomorphism_category(), chain(1)),
        reverse(grid(2, 1)), op_k(grid(1, 1), 1), op_k(arrow_double(1), 2),
        product_double(grid(1, 0), grid(0, 1)),
        thin_double(range(3), lambda a, b: a <= b, lambda a, b: a == b or (a, b) == (0, 2)),
    ])
    def test_valid(self, d):
        report = validate_double(d)
        assert report.ok, report.to_dict()

    def test_arrow_double_objects(self):
        for n in range(4):
            assert len(arrow_double(n).objects) == (n + 1) * (n + 2) // 2

    def test_mismatched_object_sets(self):
        g = grid(1, 1)
        broken = FinDoubleCategory(grid(1, 0).horizontal, g.vertical, g.squares_h, g.squares_v)
        laws = [v.law for v in validate_double(broken).violations]
        assert "shared objects" in laws

    def test_op_k_range(self):
        with pytest.raises(ValueError):
            op_k(grid(1, 1), 3)

    def test_gaunt(self):
        assert is_gaunt(grid(2, 2))
        assert not is_gaunt(boxtimes(isomorphism_category(), chain(0)))

    def test_marking(self):
        d = grid(1, 1)
        good = MarkedDoubleCategory(d, frozenset(d.vertical.ident.values()), "vertical")
        assert validate_marking(good).ok
        bad = MarkedDoubleCategory(d, frozenset(), "vertical")
        assert not validate_marking(bad).ok
        sideways = MarkedDoubleCategory(d, frozenset(), "diagonal")
        assert validate_marking(sideways).violations[0].law == "direction"


class TestFunctors:
    def test_projections(self):
        for F in (pi_hor(2), pi_vert(2), to_terminal_double(arrow_double(2))):
            assert validate_double_functor(F).ok

    def test_swap(self):
        F = swap_isomorphism(chain(1), chain(2))
        assert validate_double_functor(F).ok
        assert is_double_isomorphism(F)

    def test_pullback_over_point_is_product(self):
        P, first, second = pullback_double(to_terminal_double(grid(1, 1)), to_terminal_double(grid(0, 1)))
        assert P == product_double(grid(1, 1), grid(0, 1))
        assert validate_double_functor(first).ok
        assert validate_double_functor(second).ok

    def test_product_of_identities(self):
        F = product_double_functor(identity_double_functor(grid(1, 0)), identity_double_functor(grid(0, 1)))
        assert F == identity_double_functor(product_double(grid(1, 0), grid(0, 1)))


class TestNerve:
    def test_grid_squares(self):
        assert len(nerve_eval(grid(1, 1), 1, 1)) == 9

    @given(small, small, small, small)
    def test_grid_counts(self, m, n, p, q):
        expected = count_monotone_maps(p + 1, m + 1) * count_monotone_maps(q + 1, n + 1)
        assert len(nerve_eval(grid(m, n), p, q)) == expected

    @pytest.mark.parametrize("n,p,q", JOIN_DEGREES)
    def test_arrow_double_is_a_join(self, n, p, q):
        count = len(nerve_eval(arrow_double(n), p, q))
        assert count == join_count(n, p, q)
        assert count == count_monotone_maps(p + q + 2, n + 1)

    def test_negative_degree(self):
        with pytest.raises(ValueError):
            nerve_eval(grid(1, 1), -1, 0)

    def test_cap(self):
        with pytest.raises(ResourceLimitExceeded) as info:
            nerve_eval(grid(2, 2), 1, 1, max_cells=3)
        assert info.value.limit == 3

    def test_cap_from_settings(self):
        use_settings(Settings(max_cells=5))
        with pytest.raises(ResourceLimitExceeded):
            nerve_eval(grid(1, 1), 1, 1)
        assert len(nerve_eval(grid(1, 1), 0, 0)) == 4

    @pytest.mark.parametrize("m,n", [(0, 0), (2, 0), (0, 2), (1, 1), (2, 1)])
    def test_cells_extend_to_functors(self, m, n):
        d = arrow_double(2)
        for cell in nerve_eval(d, m, n):
            F = cell_to_functor(d, m, n, cell)
            assert validate_double_functor(F).ok
            assert functor_to_cell(F, m, n) == cell


class TestSegal:
    @pytest.mark.parametrize("d", [grid(2, 1), arrow_double(2), twisted_op_double(2)])
    def test_horizontal(self, d):
        report = segal_check(d, 2, 1, "horizontal")
        assert report.holds, report.to_dict()

    def test_vertical(self):
        assert segal_check(arrow_double(2), 1, 2, "vertical").holds

    def test_degree_too_small(self):
        with pytest.raises(ValueError):
            segal_check(grid(1, 1), 1, 1)

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            segal_check(grid(1, 1), 2, 2, "diagonal")
