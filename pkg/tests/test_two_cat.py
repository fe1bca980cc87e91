import pytest

from dblcat_fibrations.core_cat import chain, isomorphism_category
from dblcat_fibrations.corpus import un_example
from dblcat_fibrations.dblcat import grid, validate_double
from dblcat_fibrations.errors import InvalidStructureError, NotCertifiedError
from dblcat_fibrations.two_cat import (
    TwoFunctor,
    compose_two_functors,
    constant_two_functor,
    double_nerve,
    identity_two_functor,
    is_1cocartesian_fibration,
    is_two_isomorphism,
    lax_cylinder_functor,
    lax_projection,
    lax_transport,
    lax_triangle,
    locally_discrete_extension,
    product_two,
    representable_two_functor,
    straighten_2,
    thin_two_category,
    two_category_from_category,
    two_category_of,
    two_cell,
    unstraighten_2,
    unstraighten_2_pipeline,
    validate_two_category,
    validate_two_cat_valued,
    validate_two_functor,
)


def _sizes(t):
    return len(t.objects), len(t.one_cells), len(t.two_cells)


class TestTwoCategories:
    def test_lax_triangle(self):
        t = lax_triangle()
        assert _sizes(t) == (3, 7, 8)
        assert validate_two_category(t).ok

    def test_two_cell(self):
        t = two_cell()
        assert set(t.one_cells) == {(0, 0), (1, 1), "a", "b"}
        assert ("a", "b") in t.two_cells
        assert len(t.hom(0, 1).objects) == 2
        assert validate_two_category(t).ok

    def test_product(self):
        report = validate_two_category(product_two(two_cell(), lax_triangle()))
        assert report.ok, report.to_dict()

    def test_order_must_be_closed(self):
        one_cells = ((0, 0), (1, 1), "a", "b", "c")
        src = {(0, 0): 0, (1, 1): 1, "a": 0, "b": 0, "c": 0}
        tgt = {(0, 0): 0, (1, 1): 1, "a": 1, "b": 1, "c": 1}
        ident = {0: (0, 0), 1: (1, 1)}
        comp = {((0, 0), (0, 0)): (0, 0), ((1, 1), (1, 1)): (1, 1)}
        for f in ("a", "b", "c"):
            comp[((1, 1), f)] = f
            comp[(f, (0, 0))] = f
        with pytest.raises(InvalidStructureError):
            thin_two_category((0, 1), one_cells, src, tgt, ident, comp, [("a", "b"), ("b", "c")])


class TestDoubleNerve:
    @pytest.mark.parametrize("t", [two_cell(), lax_triangle()])
    def test_roundtrip(self, t):
        d = double_nerve(t)
        assert validate_double(d).ok
        assert two_category_of(d) == t

    def test_needs_identity_verticals(self):
        with pytest.raises(InvalidStructureError):
            two_category_of(grid(1, 1))


class TestCocartesian:
    def test_lax_projection(self):
        P = lax_projection()
        assert validate_two_functor(P).ok
        certificate = is_1cocartesian_fibration(P)
        assert certificate.holds, certificate.to_dict()
        assert {(0, 1), (0, 2)} <= certificate.cocartesian
        assert (0, 1, 2) not in certificate.cocartesian
        assert (1, 2) not in certificate.cocartesian
        assert certificate.to_dict()['exact'] is True

    def test_identity(self):
        t = two_cell()
        certificate = is_1cocartesian_fibration(identity_two_functor(t))
        assert certificate.holds
        assert certificate.cocartesian == frozenset(t.one_cells)

    def test_not_a_two_functor(self):
        t = two_cell()
        identity = identity_two_functor(t)
        broken = TwoFunctor(t, t, identity.on_objects, identity.on_one_cells, {})
        with pytest.raises(InvalidStructureError):
            is_1cocartesian_fibration(broken)

    def test_lax_transport(self):
        transport = lax_transport(lax_projection(), 0)
        assert transport.unique
        assert transport.component == (1, 2)

    def test_lax_transport_needs_two_cell_base(self):
        with pytest.raises(ValueError):
            lax_transport(identity_two_functor(lax_triangle()), 0)

    def test_lax_transport_needs_a_fibration(self):
        point, t = two_category_from_category(chain(0)), two_cell()
        P = TwoFunctor(point, t, {0: 0}, {(0, 0): (0, 0)}, {point.unit[(0, 0)]: t.unit[(0, 0)]})
        assert not is_1cocartesian_fibration(P).holds
        with pytest.raises(NotCertifiedError):
            lax_transport(P, 0)

    def test_two_isomorphism(self):
        assert is_two_isomorphism(identity_two_functor(lax_triangle()))
        assert not is_two_isomorphism(lax_projection())


class TestCatValued:
    def test_constant(self):
        assert validate_two_cat_valued(constant_two_functor(two_cell(), chain(1))).ok

    def test_lax_cylinder(self):
        report = validate_two_cat_valued(lax_cylinder_functor(chain(1)))
        assert report.ok, report.to_dict()

    def test_bad_component(self):
        F = constant_two_functor(two_cell(), chain(1))
        broken = type(F)(F.base, F.on_objects, F.on_one_cells,
                         {**F.on_two_cells, ("a", "b"): {0: (0, 1), 1: (1, 1)}})
        laws = [v.law for v in validate_two_cat_valued(broken).violations]
        assert "naturality" in laws or "component between the images" in laws


class TestStraightening:
    def test_unstraighten_representable(self):
        P, certificate = unstraighten_2(representable_two_functor(two_cell(), 0))
        assert _sizes(P.source) == (3, 7, 8)
        assert certificate.holds
        assert validate_two_category(P.source).ok

    def test_representable_is_the_lax_triangle(self):
        P, _ = unstraighten_2(representable_two_functor(two_cell(), 0))
        transport = lax_transport(P, (0, (0, 0)))
        assert transport.unique
        G = transport.functors[0]
        assert G.on_objects == {0: (0, (0, 0)), 1: (1, "a"), 2: (1, "b")}
        assert G.on_one_cells[(0, 1, 2)] == ("a", (0, 0), ("a", "b"))
        assert is_two_isomorphism(G)
        assert compose_two_functors(P, G) == lax_projection()

    def test_non_gaunt_values(self):
        F = constant_two_functor(two_cell(), isomorphism_category())
        with pytest.raises(InvalidStructureError):
            unstraighten_2(F, mode="iso")
        P, _ = unstraighten_2(F, mode="equiv")
        assert validate_two_functor(P).ok

    def test_straighten_lax_projection(self):
        G = straighten_2(lax_projection())
        assert len(G.on_objects) == 2
        assert validate_two_cat_valued(G).ok
        assert G.component(("a", "b"), 0) == (1, 2)

    def test_fibers_come_back(self):
        F = representable_two_functor(two_cell(), 0)
        P, _ = unstraighten_2(F)
        G = straighten_2(P)
        for c in F.base.objects:
            assert len(G.on_objects[c].objects) == len(F.on_objects[c].objects)
        assert validate_two_cat_valued(G).ok


class TestPipeline:
    @pytest.mark.parametrize("F", [
        representable_two_functor(two_cell(), 0),
        lax_cylinder_functor(chain(0)),
        locally_discrete_extension(un_example()),
    ])
    def test_agrees_with_reflection(self, F):
        report = unstraighten_2_pipeline(F)
        assert report.ok, report.to_dict()
