import pytest
from hypothesis import given

from dblcat_fibrations.core_cat import (
    Cleavage,
    chain,
    evaluation,
    identity_functor,
    is_cartesian_fibration,
    is_cocartesian_fibration,
    is_left_fibration,
    isomorphism_category,
    to_terminal,
    validate_category,
)
from dblcat_fibrations.corpus import poset_category
from dblcat_fibrations.dblcat import boxtimes, validate_double
from dblcat_fibrations.errors import CleavageError, InvalidStructureError, NotCertifiedError
from dblcat_fibrations.groth import (
    CatValuedFunctor,
    check_un_equals_reflect,
    constant_functor,
    copresheaf_of,
    representable_functor,
    straighten_1,
    straighten_roundtrip,
    unstraighten_1,
    unstraighten_comparison,
    unstraighten_transformation,
    validate_cat_valued,
)

from .strategies import copresheaves, posets


def _counts(d):
    return len(d.objects), len(d.h_arrows), len(d.v_arrows), len(d.squares)


class TestUnstraighten:
    def test_example(self, un_functor):
        p, cleavage = unstraighten_1(un_functor)
        assert len(p.source.objects) == 3
        assert len(p.source.morphisms) == 6
        assert cleavage.orientation == "cocartesian"
        assert cleavage.split
        assert is_cocartesian_fibration(p)

    @given(copresheaves())
    def test_random(self, F):
        p, cleavage = unstraighten_1(F)
        assert validate_category(p.source).ok
        assert is_cocartesian_fibration(p)
        assert cleavage.split

    def test_representable_is_left(self):
        p, _ = unstraighten_1(representable_functor(chain(2), 0))
        assert len(p.source.objects) == 3
        assert is_left_fibration(p)

    def test_contravariant(self):
        p, cleavage = unstraighten_1(constant_functor(chain(1), chain(1)), "cartesian")
        assert cleavage.orientation == "cartesian"
        assert is_cartesian_fibration(p)

    def test_not_strict(self):
        point, line = chain(0), chain(1)
        broken = CatValuedFunctor(chain(1), {0: point, 1: line}, {(0, 0): identity_functor(point)})
        with pytest.raises(InvalidStructureError) as info:
            unstraighten_1(broken)
        laws = [v.law for v in info.value.report.violations]
        assert "value on every morphism" in laws

    def test_bad_variance(self, un_functor):
        with pytest.raises(ValueError):
            validate_cat_valued(un_functor, "sideways")


class TestTransformations:
    def test_identity(self, un_functor):
        eta = {c: identity_functor(un_functor(c)) for c in un_functor.base.objects}
        induced = unstraighten_transformation(un_functor, un_functor, eta)
        p, _ = unstraighten_1(un_functor)
        assert induced == identity_functor(p.source)

    def test_wrong_component(self, un_functor):
        eta = {0: identity_functor(chain(0))}
        with pytest.raises(InvalidStructureError):
            unstraighten_transformation(un_functor, un_functor, eta)


class TestStraighten:
    def test_example_roundtrip(self, un_functor):
        assert straighten_roundtrip(un_functor).ok

    @given(copresheaves())
    def test_random_roundtrip(self, F):
        report = straighten_roundtrip(F)
        assert report.ok, report.to_dict()

    @given(posets())
    def test_target_functor_comes_back(self, c):
        _, iso = unstraighten_comparison(evaluation(c, 1))
        assert iso

    def test_values(self, un_functor):
        p, cleavage = unstraighten_1(un_functor)
        G = straighten_1(p, cleavage)
        assert len(G(0).objects) == 1
        assert len(G(1).objects) == 2
        assert G.on_morphisms[(0, 1)].on_objects[(0, 0)] == (1, 0)

    def test_not_cocartesian(self):
        span = poset_category(range(3), lambda a, b: a == b or a == 2)
        with pytest.raises(NotCertifiedError):
            straighten_1(evaluation(span, 0))

    def test_non_split_cleavage(self):
        p = to_terminal(isomorphism_category())
        cleavage = Cleavage(p, "cocartesian", {((0, 0), 0): (0, 1), ((0, 0), 1): (1, 1)})
        with pytest.raises(CleavageError) as info:
            straighten_1(p, cleavage)
        assert info.value.witness == ((0, 0), 0)


class TestCopresheaf:
    def test_example(self, un_functor):
        p, certificate = copresheaf_of(un_functor)
        assert _counts(p.source) == (3, 4, 4, 5)
        assert p.target == boxtimes(chain(1), chain(0))
        assert certificate.holds
        assert validate_double(p.source).ok

    @given(copresheaves())
    def test_random_certifies(self, F):
        p, certificate = copresheaf_of(F)
        assert certificate.holds
        assert validate_double(p.source).ok

    def test_un_equals_reflect(self, un_functor):
        report = check_un_equals_reflect(un_functor)
        assert report.ok, report.to_dict()
        assert report.gaunt_fibers

    @given(copresheaves())
    def test_un_equals_reflect_random(self, F):
        report = check_un_equals_reflect(F)
        assert report.ok, report.to_dict()
