from math import comb

import pytest

from dblcat_fibrations.core_cat import chain, isomorphism_category
from dblcat_fibrations.corpus import RECIPES, generate_corpus, transposition
from dblcat_fibrations.dblcat import (
    boxtimes,
    grid,
    identity_double_functor,
    to_terminal_double,
    validate_double,
)
from dblcat_fibrations.errors import NotCertifiedError
from dblcat_fibrations.fibr import conjugate
from dblcat_fibrations.reflect import (
    REFLECTIONS,
    cartesian_cleavage,
    fiber_swap,
    is_split_cleavage,
    reflect_dagger,
    reflect_map,
    reflect_perp,
    reflect_top,
    roundtrip_iso,
    skeleton_search,
    vertical_factorization,
    vertical_iso_classes,
)


def _counts(d):
    return len(d.objects), len(d.h_arrows), len(d.v_arrows), len(d.squares)


class TestPerp:
    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_transposition_sizes(self, n):
        reflection = reflect_perp(transposition(chain(n)))
        assert _counts(reflection.double) == (n + 1, comb(n + 2, 2), n + 1, comb(n + 2, 2))
        assert reflection.certificate.holds
        assert reflection.marking_matches is True

    def test_is_a_double_category(self, transposition_2):
        reflection = reflect_perp(transposition_2)
        assert validate_double(reflection.double).ok
        assert reflection.projection.target == transposition_2.target

    def test_identity_fibration(self):
        reflection = reflect_perp(identity_double_functor(grid(1, 1)))
        assert _counts(reflection.double) == (4, 6, 6, 9)
        assert reflection.certificate.holds

    def test_refuses_non_fibration(self):
        with pytest.raises(NotCertifiedError):
            reflect_perp(to_terminal_double(grid(1, 1)))

    def test_to_dict(self):
        data = reflect_perp(transposition(chain(1))).to_dict()
        assert data['variant'] == "perp"
        assert (data['objects'], data['h_arrows'], data['v_arrows'], data['squares']) == (2, 3, 2, 3)
        assert data['certificate']['holds'] is True


class TestConjugates:
    def test_top(self):
        q = conjugate(transposition(chain(1)))
        reflection = reflect_top(q)
        assert reflection.variant == "top"
        assert reflection.certificate.holds
        assert reflection.certificate.kind == "left-cart"

    def test_top_refuses_left_cart_input(self):
        with pytest.raises(NotCertifiedError):
            reflect_top(to_terminal_double(grid(1, 1)))

    def test_dagger_over_a_point(self):
        p = to_terminal_double(boxtimes(chain(1), chain(0)))
        reflection = reflect_dagger(p)
        assert reflection.certificate.holds
        assert reflection.certificate.kind == "left-cocart"
        assert _counts(reflection.double) == (2, 2, 3, 3)

    def test_registry(self):
        assert set(REFLECTIONS) == {"perp", "top", "dagger"}


class TestCleavage:
    def test_split(self, transposition_2):
        assert is_split_cleavage(cartesian_cleavage(transposition_2))

    def test_factorization(self, transposition_2):
        cleavage = cartesian_cleavage(transposition_2)
        u, c = vertical_factorization(transposition_2, (0, (0, 2)), cleavage)
        assert u == (0, (0, 2))
        assert c == (0, (2, 2))


class TestFunctoriality:
    def test_fiber_swap(self, transposition_2):
        reflection = reflect_perp(transposition_2)
        comparison, iso = fiber_swap(transposition_2, reflection, (0, 0))
        assert iso
        assert len(comparison.source.morphisms) == 6

    def test_identity_map(self, transposition_2):
        reflection = reflect_perp(transposition_2)
        f = identity_double_functor(transposition_2.source)
        assert reflect_map(f, reflection, reflection) == identity_double_functor(reflection.double)


class TestRoundtrip:
    @pytest.mark.parametrize("p", [
        transposition(chain(1)),
        transposition(chain(2)),
        identity_double_functor(grid(1, 1)),
    ])
    def test_gaunt_input_comes_back(self, p):
        report = roundtrip_iso(p)
        assert report.status == "isomorphism", report.to_dict()
        assert report.cleavage_split
        assert all(report.checks.values())

    @pytest.mark.parametrize("mode", ["iso", "equiv"])
    def test_non_gaunt_input(self, mode):
        report = roundtrip_iso(transposition(isomorphism_category()), mode=mode)
        assert report.status == "equivalence", report.to_dict()
        assert report.witness == ("skeleton", ((0, 0),))
        assert report.searched == 1
        assert all(report.checks.values())

    def test_non_gaunt_search_bound(self):
        report = roundtrip_iso(transposition(isomorphism_category()), max_cells=0)
        assert report.status == "inconclusive"
        assert report.to_dict()['search_bound'] == 0
        assert report.witness == ("search bound", 0)

    def test_vertical_iso_classes(self):
        assert vertical_iso_classes(transposition(isomorphism_category())) == [((0, 0), (0, 1))]
        assert vertical_iso_classes(transposition(chain(1))) == [((0, 0),), ((0, 1),)]

    def test_skeleton(self):
        search = skeleton_search(transposition(isomorphism_category()))
        assert search.found
        assert search.projection.source == boxtimes(chain(0), chain(0))

    def test_refuses_non_fibration(self):
        with pytest.raises(NotCertifiedError):
            roundtrip_iso(to_terminal_double(grid(1, 1)))


@pytest.fixture(scope="module")
def corpus():
    return generate_corpus(7, size=60, base_objects=4)


class TestCorpusSweep:
    def test_every_recipe_is_present(self, corpus):
        assert len(corpus) == 60
        assert {e.provenance['recipe'] for e in corpus} == set(RECIPES)

    def test_reflections_certify(self, corpus):
        for entry in corpus:
            reflection = reflect_perp(entry.projection, entry.certificate)
            assert reflection.certificate.holds, entry.name
            assert reflection.marking_matches is True, entry.name

    def test_fibers_swap(self, corpus):
        for entry in corpus:
            reflection = reflect_perp(entry.projection, entry.certificate)
            for c in entry.projection.target.objects:
                _, iso = fiber_swap(entry.projection, reflection, c)
                assert iso, (entry.name, c)

    def test_round_trips(self, corpus):
        for entry in corpus:
            report = roundtrip_iso(entry.projection)
            assert report.status == "isomorphism", (entry.name, report.to_dict())
