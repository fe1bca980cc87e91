import dataclasses

import pytest
from hypothesis import given

from dblcat_fibrations.core_cat import (
    arrow_category,
    cartesian_lifts,
    cocartesian_lifts,
    chain,
    choose_cleavage,
    codiscrete,
    compose_functors,
    discrete,
    evaluation,
    fiber,
    first_projection,
    identity_functor,
    inverse_of,
    is_cartesian_arrow,
    is_cartesian_arrow_by_horns,
    is_cartesian_fibration,
    is_cocartesian_fibration,
    is_equivalence,
    is_gaunt_category,
    is_isomorphism,
    is_left_fibration,
    is_right_fibration,
    isomorphism_category,
    opposite,
    product,
    product_functor,
    pullback,
    to_terminal,
    unique_lift,
    validate_category,
    validate_functor,
    FinFunctor,
)
from dblcat_fibrations.corpus import poset_category
from dblcat_fibrations.errors import CellNotFound, LiftUniquenessError, NotCertifiedError

from .strategies import chains, chains_in, posets


def _cospan():
    """0 → 2 ← 1 with no meet of 0 and 1"""
    return poset_category(range(3), lambda a, b: a == b or b == 2)


class TestTables:
    def test_chain_sizes(self):
        c = chain(2)
        assert len(c.objects) == 3
        assert len(c.morphisms) == 6
        assert c.compose((1, 2), (0, 1)) == (0, 2)

    def test_negative_chain(self):
        with pytest.raises(ValueError):
            chain(-1)

    def test_compose_errors(self):
        c = chain(1)
        with pytest.raises(CellNotFound) as info:
            c.compose((0, 1), (5, 6))
        assert str(info.value) == "morphism (5, 6) not found"
        with pytest.raises(ValueError):
            c.compose((0, 1), (0, 1))

    def test_compose_path(self):
        c = chain(3)
        assert c.compose_path([(0, 1), (1, 2), (2, 3)]) == (0, 3)

    def test_hom_and_neighbours(self):
        c = chain(2)
        assert c.hom(0, 2) == ((0, 2),)
        assert c.hom(2, 0) == ()
        assert set(c.out_of(1)) == {(1, 1), (1, 2)}
        assert set(c.into(1)) == {(0, 1), (1, 1)}

    def test_arrow_category_of_arrow(self):
        a = arrow_category(chain(1))
        assert len(a.objects) == 3
        assert len(a.morphisms) == 6
        assert validate_category(a).ok

    def test_product(self):
        p = product(chain(1), chain(1))
        assert len(p.objects) == 4
        assert len(p.morphisms) == 9
        assert validate_category(p).ok

    def test_equality_is_structural(self):
        assert chain(2) == chain(2)
        assert chain(2) != chain(1)
        assert opposite(opposite(chain(2))) == chain(2)


class TestValidation:
    @given(chains())
    def test_chains_are_categories(self, c):
        assert validate_category(c).ok

    @given(posets())
    def test_posets_are_categories(self, c):
        report = validate_category(c)
        assert report.ok, report.to_dict()

    def test_wrong_composite(self):
        c = chain(2)
        comp = dict(c.comp)
        comp[((1, 2), (0, 1))] = (0, 1)
        report = validate_category(dataclasses.replace(c, comp=comp))
        assert not report.ok
        assert "tgt(g∘f) ≠ tgt(g)" in [v.law for v in report.violations]

    def test_missing_composite(self):
        c = chain(2)
        comp = dict(c.comp)
        del comp[((1, 2), (0, 1))]
        report = validate_category(dataclasses.replace(c, comp=comp))
        assert [v.law for v in report.violations] == ["composition total on composable pairs"]
        assert report.violations[0].witness == ((1, 2), (0, 1))

    def test_missing_identity(self):
        c = chain(1)
        report = validate_category(dataclasses.replace(c, ident={0: (0, 0)}))
        assert "identity defined" in [v.law for v in report.violations]

    def test_report_serializes(self):
        report = validate_category(chain(1))
        data = report.to_dict()
        assert data['ok'] is True
        assert data['checked'] > 0

    def test_functor_not_preserving_boundaries(self):
        c = chain(1)
        flip = FinFunctor(c, c, {0: 1, 1: 0}, {(0, 0): (1, 1), (1, 1): (0, 0), (0, 1): (0, 1)})
        report = validate_functor(flip)
        assert ["preserves boundaries"] == [v.law for v in report.violations]

    def test_functor_partial(self):
        c = chain(1)
        report = validate_functor(FinFunctor(c, c, {0: 0}, {}))
        assert not report.ok
        assert report.violations[0].law == "object map total"

    @given(chains_in())
    def test_random_chains_in_posets_are_functors(self, pair):
        _, F = pair
        assert validate_functor(F).ok


class TestIsomorphisms:
    def test_gaunt(self):
        assert is_gaunt_category(chain(3))
        assert not is_gaunt_category(isomorphism_category())

    def test_inverse(self):
        iso = isomorphism_category()
        assert inverse_of(iso, (0, 1)) == (1, 0)
        assert inverse_of(chain(1), (0, 1)) is None

    def test_equivalence_not_isomorphism(self):
        point = chain(0)
        include = FinFunctor(point, isomorphism_category(), {0: 0}, {(0, 0): (0, 0)})
        assert is_equivalence(include)
        assert not is_isomorphism(include)

    def test_identity_is_isomorphism(self):
        assert is_isomorphism(identity_functor(codiscrete("abc")))

    def test_product_of_identities(self):
        F = product_functor(identity_functor(chain(1)), identity_functor(chain(2)))
        assert F == identity_functor(product(chain(1), chain(2)))


class TestCartesian:
    def test_target_functor_is_cocartesian(self):
        assert is_cocartesian_fibration(evaluation(chain(2), 1))

    def test_target_functor_with_pullbacks_is_cartesian(self):
        assert is_cartesian_fibration(evaluation(chain(2), 1))

    def test_target_functor_without_pullbacks(self):
        assert not is_cartesian_fibration(evaluation(_cospan(), 1))

    @given(posets())
    def test_source_functor_is_cartesian(self, c):
        assert is_cartesian_fibration(evaluation(c, 0))

    @given(posets(3))
    def test_horn_criterion_agrees(self, c):
        p = evaluation(c, 1)
        for alpha in p.source.morphisms:
            assert is_cartesian_arrow(p, alpha) == is_cartesian_arrow_by_horns(p, alpha)

    def test_unknown_arrow(self):
        with pytest.raises(CellNotFound):
            is_cartesian_arrow(to_terminal(chain(1)), "nope")

    def test_product_with_discrete(self):
        p = first_projection(chain(1), discrete([0, 1]))
        assert is_left_fibration(p)
        assert is_right_fibration(p)
        assert unique_lift(p, (0, 1), (0, 1)) == ((0, 1), (1, 1))

    def test_lifts_in_a_product(self):
        p = first_projection(chain(1), chain(1))
        assert cartesian_lifts(p, (0, 1), (1, 0)) == (((0, 1), (0, 0)),)
        assert cocartesian_lifts(p, (0, 1), (0, 1)) == (((0, 1), (1, 1)),)

    def test_terminal_is_not_left(self):
        p = to_terminal(chain(1))
        assert is_cartesian_fibration(p)
        assert not is_left_fibration(p)
        with pytest.raises(LiftUniquenessError):
            unique_lift(p, (0, 0), 0)

    def test_fiber(self):
        p = first_projection(chain(1), chain(1))
        f = fiber(p, 0)
        assert f.objects == ((0, 0), (0, 1))
        assert len(f.morphisms) == 3
        with pytest.raises(CellNotFound):
            fiber(p, 7)


class TestCleavages:
    def test_identities_are_chosen(self):
        cleavage = choose_cleavage(evaluation(chain(2), 1), "cocartesian")
        p = cleavage.functor
        for x in p.source.objects:
            gamma = p.target.ident[p.on_objects[x]]
            assert cleavage.lift(gamma, x) == p.source.ident[x]

    def test_terminal_cleavage_splits(self):
        assert choose_cleavage(to_terminal(chain(1))).split

    def test_not_a_fibration(self):
        with pytest.raises(NotCertifiedError) as info:
            choose_cleavage(evaluation(_cospan(), 1), "cartesian")
        assert info.value.failures

    def test_bad_orientation(self):
        with pytest.raises(ValueError):
            choose_cleavage(to_terminal(chain(0)), "sideways")


class TestPullback:
    def test_pullback_along_identity(self):
        p = evaluation(chain(1), 1)
        P, first, second = pullback(p, identity_functor(chain(1)))
        assert len(P.objects) == len(p.source.objects)
        assert validate_category(P).ok
        assert compose_functors(p, first) == compose_functors(identity_functor(chain(1)), second)

    def test_pullback_needs_common_codomain(self):
        with pytest.raises(ValueError):
            pullback(to_terminal(chain(1)), identity_functor(chain(1)))
