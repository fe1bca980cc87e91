from math import comb

import pytest

from dblcat_fibrations.bisimp import (
    KERNELS,
    ZigZag,
    base_change_agreement,
    codegeneracies,
    cofaces,
    compare_kernels,
    dagger_agreement,
    get_kernel,
    kernel_naturality,
    monotone_functor,
    monotone_maps,
    psi_T_eval,
    psi_eval,
    shared_kernel,
    theta_image_oracle,
)
from dblcat_fibrations.core_cat import chain
from dblcat_fibrations.corpus import generate_corpus, transposition
from dblcat_fibrations.dblcat import (
    boxtimes,
    count_monotone_maps,
    grid,
    identity_double_functor,
    terminal_double,
    to_terminal_double,
    validate_double,
    validate_double_functor,
)
from dblcat_fibrations.errors import NotCertifiedError, OutsideWindowError, ResourceLimitExceeded

WINDOW = (1, 1)
DEGREES = [(m, n) for m in range(2) for n in range(2)]


class TestMonotone:
    def test_maps(self):
        assert monotone_maps(1, 1) == [(0, 0), (0, 1), (1, 1)]
        for a in range(3):
            for b in range(3):
                assert len(monotone_maps(a, b)) == count_monotone_maps(a + 1, b + 1)

    def test_faces_and_degeneracies(self):
        assert cofaces(2) == [(1, 2), (0, 2), (0, 1)]
        assert codegeneracies(1) == [(0, 0, 1), (0, 1, 1)]

    def test_not_monotone(self):
        with pytest.raises(ValueError):
            monotone_functor((1, 0), 1, 1)


class TestKernels:
    def test_unknown(self):
        with pytest.raises(ValueError):
            get_kernel("X")

    def test_window(self):
        kernel = get_kernel("K", WINDOW)
        with pytest.raises(OutsideWindowError) as info:
            kernel.cell(2, 0)
        assert info.value.degree == (2, 0)

    def test_first_cell_of_K(self):
        assert len(get_kernel("K").cell(1, 0).base.objects) == 3

    @pytest.mark.parametrize("name", ["K", "A"])
    @pytest.mark.parametrize("m,n", DEGREES)
    def test_arrow_row_sizes(self, name, m, n):
        assert len(get_kernel(name, WINDOW).cell(m, n).base.objects) == comb(m + 2, 2) * (n + 1)

    @pytest.mark.parametrize("name", ["K'", "L"])
    @pytest.mark.parametrize("m,n", DEGREES)
    def test_column_sizes(self, name, m, n):
        assert len(get_kernel(name, WINDOW).cell(m, n).base.objects) == (m + 1) * comb(n + 2, 2)

    @pytest.mark.parametrize("name", sorted(KERNELS))
    def test_cells_are_double_categories(self, name):
        kernel = get_kernel(name, WINDOW)
        for m, n in DEGREES:
            assert validate_double(kernel.cell(m, n).base).ok

    @pytest.mark.parametrize("name", sorted(KERNELS))
    def test_naturality(self, name):
        report = kernel_naturality(get_kernel(name, WINDOW))
        assert report.ok, report.to_dict()
        assert report.checked > 0

    def test_extra_marking_of_K(self):
        kernel = get_kernel("K", WINDOW)
        extra = kernel.extra_marked()
        assert (((0, 1), (1, 1)), (0, (0, 0))) in extra
        assert kernel.cell(1, 0).marked < extra

    def test_structure_map(self):
        F = get_kernel("K", WINDOW).structure_map(1, 1)
        assert validate_double_functor(F).ok
        assert F.target == grid(1, 1)

    def test_operator(self):
        F = get_kernel("A", WINDOW).operator((1,), (0,), (1, 1))
        assert validate_double_functor(F).ok

    def test_info(self):
        info = get_kernel("K'", WINDOW).get_info()
        assert info['direction'] == "horizontal"
        assert info['input_kind'] == "cocart-right"
        assert info['window'] == [1, 1]


class TestPsi:
    def test_points(self):
        p = transposition(chain(1))
        assert len(psi_eval(get_kernel("K", WINDOW), p, 0, 0)) == len(p.source.objects)

    def test_wrong_marking_direction(self):
        p = transposition(chain(1))
        kernel = get_kernel("K'", WINDOW)
        with pytest.raises(NotCertifiedError):
            psi_eval(kernel, p, 0, 0)

    def test_outside_window(self):
        with pytest.raises(OutsideWindowError):
            psi_eval(get_kernel("K", WINDOW), transposition(chain(1)), 2, 0)

    def test_extra_degree_records_marked_cells(self):
        p = transposition(chain(1))
        result = psi_eval(get_kernel("K", WINDOW), p, 1, 0)
        assert result.marked is not None
        assert set(result.marked) <= set(range(len(result)))

    @pytest.mark.parametrize("n", [1, 2])
    def test_psi_T_points(self, n):
        p = transposition(chain(n))
        assert len(psi_T_eval(p, 0, 0)) == len(p.source.objects)


class TestZigZag:
    def test_all_comparisons(self):
        report = compare_kernels(transposition(chain(1)), WINDOW)
        assert report.ok, report.to_dict()
        assert len(report.results) == 5 * len(DEGREES)

    def test_copresheaf(self, un_copresheaf):
        report = compare_kernels(un_copresheaf, (1, 0), kernels=("K", "zeta", "T"))
        assert report.ok, report.to_dict()

    @pytest.mark.parametrize("name", sorted(ZigZag.COMPARISONS))
    def test_single_comparison(self, name):
        result = ZigZag(transposition(chain(2)), WINDOW).compare(name, 0, 1)
        assert result.bijective, result.to_dict()
        assert result.left == result.right

    def test_unknown_comparison(self):
        with pytest.raises(ValueError):
            ZigZag(transposition(chain(1)), WINDOW).compare("bogus", 0, 0)

    def test_refuses_non_fibration(self):
        with pytest.raises(NotCertifiedError):
            ZigZag(to_terminal_double(grid(1, 1)), WINDOW)

    def test_cap(self):
        p = transposition(chain(1))
        with pytest.raises(ResourceLimitExceeded):
            compare_kernels(p, (0, 0), kernels=("K",), max_cells=1)
        report = compare_kernels(p, (0, 0), kernels=("K",), max_cells=1, stop_on_cap=False)
        assert report.capped == [("K", (0, 0))]
        assert not report.ok

    def test_window_from_settings(self):
        assert ZigZag(transposition(chain(1))).window == (3, 3)


class TestOtherComparisons:
    @pytest.mark.parametrize("m,n", [(0, 0), (1, 0), (0, 1)])
    def test_dagger(self, m, n):
        p = to_terminal_double(boxtimes(chain(1), chain(0)))
        result = dagger_agreement(p, m, n)
        assert result.bijective, result.to_dict()
        assert result.method == "cardinality"

    @pytest.mark.parametrize("m,n", [(0, 0), (1, 0), (0, 1)])
    def test_base_change(self, m, n):
        result = base_change_agreement(get_kernel("K", WINDOW), transposition(chain(1)),
                                       identity_double_functor(terminal_double()), m, n)
        assert result.bijective, result.to_dict()


class TestThetaOracle:
    def test_point(self):
        report = theta_image_oracle(0, 0, 0, 0)
        assert report.realized == {((0, 0), (0,), (0,))}
        assert report.stable
        assert report.pointwise
        assert report.status == "stable"

    def test_small_degree(self):
        report = theta_image_oracle(1, 1, 0, 0)
        assert report.pointwise
        assert report.to_dict()['bound'] == 6


class TestSharedWork:
    def test_kernels_are_shared_per_window(self):
        assert shared_kernel("B", (2, 2)) is shared_kernel("B", (2, 2))
        assert shared_kernel("B", (2, 2)) is not shared_kernel("B", (1, 1))
        assert ZigZag(transposition(chain(1)), WINDOW).A is ZigZag(transposition(chain(2)), WINDOW).A

    def test_search_plan_is_built_once(self):
        kernel = get_kernel("A", WINDOW)
        plan = kernel.search_plan(1, 1)
        assert kernel.search_plan(1, 1) is plan
        assert plan.source is kernel.cell(1, 1).base

    def test_shared_kernel_gives_the_same_cells(self):
        p = transposition(chain(2))
        fresh = psi_eval(get_kernel("A", WINDOW), p, 1, 1)
        shared = psi_eval(shared_kernel("A", WINDOW), p, 1, 1)
        assert fresh.keys() == shared.keys()

    def test_nerves_are_cached(self):
        zigzag = ZigZag(transposition(chain(1)), WINDOW)
        assert zigzag.nerve("top", 1, 1) is zigzag.nerve("top", 1, 1)
        assert len(zigzag.nerve("source", 0, 0)) == 2


@pytest.mark.slow
class TestWideWindows:
    def test_kernel_agreement_on_corpus(self):
        for entry in generate_corpus(7, size=50, base_objects=3):
            report = compare_kernels(entry.projection, (2, 2), kernels=("K",))
            assert report.ok, (entry.name, report.to_dict())
            assert len(report.results) == 9

    def test_zigzag_on_corpus(self):
        for entry in generate_corpus(3, size=8, base_objects=3):
            report = compare_kernels(entry.projection, (2, 2), kernels=("zeta", "eta", "theta"))
            assert report.ok, (entry.name, report.to_dict())

    @pytest.mark.parametrize("p", [transposition(chain(1)), identity_double_functor(grid(1, 0))])
    def test_zigzag_in_window_3_3(self, p):
        report = compare_kernels(p, (3, 3), kernels=("zeta", "eta", "theta"))
        assert report.ok, report.to_dict()
        assert len(report.results) == 3 * 16
