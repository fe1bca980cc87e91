import pytest

from dblcat_fibrations.config import Settings, use_settings
from dblcat_fibrations.constants import FIBRATION_KINDS
from dblcat_fibrations.core_cat import FinFunctor, chain, compose_functors, evaluation, identity_functor
from dblcat_fibrations.corpus import transposition
from dblcat_fibrations.dblcat import (
    boxtimes_functor,
    cell_to_functor,
    compose_double_functors,
    grid,
    identity_double_functor,
    terminal_double,
    to_terminal_double,
    validate_double_functor,
)
from dblcat_fibrations.errors import CellNotFound, NotCertifiedError
from dblcat_fibrations.fibr import (
    base_change,
    check_fibration,
    compose_fibrations,
    conjugate,
    dual_kind,
    fiber,
    horizontal_fiber,
    is_cocart_right_fibration,
    is_fiberwise_isomorphism,
    is_left_cart_fibration,
    is_strong_map,
    mark_cartesian_verticals,
    mark_cocartesian_horizontals,
    parse_kind,
    require,
)
from dblcat_fibrations.groth import representable_functor, unstraighten_1


class TestKinds:
    def test_parse(self):
        assert parse_kind("left-cart") == ("left", "cart")
        with pytest.raises(ValueError):
            parse_kind("up-down")

    def test_dual(self):
        assert dual_kind("left-cart") == "cocart-right"
        for kind in FIBRATION_KINDS:
            assert dual_kind(dual_kind(kind)) == kind


class TestCertificates:
    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_transposition(self, n):
        certificate = is_left_cart_fibration(transposition(chain(n)))
        assert certificate.holds
        assert certificate.marked_direction == "vertical"
        assert len(certificate.marked) == n + 1
        assert certificate.witness() is None

    def test_identity(self):
        certificate = check_fibration(identity_double_functor(grid(1, 1)), "left-cart", paranoid=True)
        assert certificate.holds
        assert "degree-2:left" in certificate.legs

    def test_terminal_projection_is_not_left(self):
        p = to_terminal_double(grid(1, 1))
        certificate = is_left_cart_fibration(p)
        assert not certificate
        leg, _ = certificate.witness()
        assert leg.endswith(":left")
        with pytest.raises(NotCertifiedError) as info:
            require(certificate)
        assert info.value.failures == certificate.failures

    @pytest.mark.parametrize("p", [transposition(chain(2)), to_terminal_double(grid(1, 1))])
    def test_replay(self, p):
        certificate = check_fibration(p, "left-cart", paranoid=False)
        assert certificate.replay(p)

    def test_paranoid_from_settings(self):
        use_settings(Settings(paranoid=True))
        certificate = check_fibration(transposition(chain(1)), "left-cart")
        assert certificate.paranoid
        assert certificate.holds
        assert "degree-2:left" in certificate.legs

    def test_to_dict(self):
        data = check_fibration(to_terminal_double(grid(1, 1)), "left-cart").to_dict()
        assert data['holds'] is False
        assert data['witness'] is not None
        assert data['kind'] == "left-cart"


class TestConjugation:
    def test_involution(self, transposition_2):
        assert conjugate(conjugate(transposition_2)) == transposition_2

    def test_exchanges_kinds(self, transposition_2):
        q = conjugate(transposition_2)
        certificate = is_cocart_right_fibration(q)
        assert certificate.holds
        assert certificate.marked_direction == "horizontal"
        marked = mark_cocartesian_horizontals(q, certificate)
        assert marked.direction == "horizontal"
        assert marked.marked == certificate.marked


class TestMarkings:
    def test_cartesian_verticals(self, transposition_2):
        marked = mark_cartesian_verticals(transposition_2)
        assert marked.direction == "vertical"
        assert marked.marked == frozenset(transposition_2.source.vertical.ident.values())

    def test_needs_certificate(self):
        with pytest.raises(NotCertifiedError):
            mark_cartesian_verticals(to_terminal_double(grid(1, 1)))

    def test_wrong_direction(self, transposition_2):
        certificate = check_fibration(transposition_2, "left-cart")
        with pytest.raises(NotCertifiedError):
            mark_cocartesian_horizontals(transposition_2, certificate)


class TestMaps:
    def test_identity_is_strong(self, transposition_2):
        f = identity_double_functor(transposition_2.source)
        assert is_strong_map(f, transposition_2, transposition_2)
        assert is_fiberwise_isomorphism(f, transposition_2, transposition_2)

    def test_square_must_commute(self):
        d = grid(1, 1)
        p = identity_double_functor(d)
        constant = compose_double_functors(cell_to_functor(d, 0, 0, (0, 0)), to_terminal_double(d))
        with pytest.raises(ValueError):
            is_strong_map(constant, p, p)

    def test_legs_must_be_certified(self, transposition_2):
        d = grid(1, 1)
        f = identity_double_functor(d)
        with pytest.raises(NotCertifiedError):
            is_strong_map(f, to_terminal_double(d), to_terminal_double(d))
        with pytest.raises(NotCertifiedError):
            is_strong_map(identity_double_functor(transposition_2.source), transposition_2,
                          transposition_2, kind="cocart-right")


class TestFibers:
    def test_vertical_fiber(self, transposition_2):
        f = fiber(transposition_2, (0, 0))
        assert len(f.category.objects) == 3
        assert len(f.category.morphisms) == 6
        assert f.constant
        assert f.to_dict()['base_gaunt'] is True

    def test_unknown_object(self, transposition_2):
        with pytest.raises(CellNotFound):
            fiber(transposition_2, (5, 5))

    def test_horizontal_fiber(self, transposition_2):
        q = conjugate(transposition_2)
        c = q.target.objects[0]
        assert len(horizontal_fiber(q, c).objects) == 3
        with pytest.raises(CellNotFound):
            horizontal_fiber(q, "nowhere")


class TestClosure:
    def test_compose_with_identity(self, transposition_2):
        composite, certificate = compose_fibrations(identity_double_functor(transposition_2.source),
                                                    transposition_2)
        assert composite == transposition_2
        assert certificate.holds

    def test_base_change_along_identity(self):
        p = transposition(chain(1))
        P, to_source, pulled, certificate = base_change(p, identity_double_functor(terminal_double()))
        assert certificate.holds
        assert len(P.objects) == len(p.source.objects)
        assert pulled.target == terminal_double()


def _elements_of_representable(base, x):
    """Discrete left fibration of C(x, −)"""
    p, _ = unstraighten_1(representable_functor(base, x))
    return p


class TestClosureOverGrids:
    def test_composite_of_products(self):
        lower = _elements_of_representable(chain(1), 0)
        upper = _elements_of_representable(lower.source, lower.source.objects[0])
        source = evaluation(chain(1), 0)
        p = boxtimes_functor(upper, source)
        q = boxtimes_functor(lower, identity_functor(chain(1)))
        composite, certificate = compose_fibrations(p, q)
        assert certificate.holds, certificate.to_dict()
        assert composite == boxtimes_functor(compose_functors(lower, upper), source)
        assert any(not composite.target.vertical.is_identity(v) for v in composite.target.v_arrows)

    def test_base_change_along_a_column(self):
        lower = _elements_of_representable(chain(1), 0)
        p = boxtimes_functor(lower, evaluation(chain(1), 0))
        top = FinFunctor(chain(0), chain(1), {0: 1}, {(0, 0): (1, 1)})
        P, to_source, pulled, certificate = base_change(p, boxtimes_functor(top, identity_functor(chain(1))))
        assert certificate.holds, certificate.to_dict()
        assert pulled.target == grid(0, 1)
        assert len(P.objects) == 3
        assert validate_double_functor(to_source).ok

    def test_base_change_of_a_non_fibration_is_reported(self):
        p = to_terminal_double(grid(1, 1))
        _, _, _, certificate = base_change(p, identity_double_functor(terminal_double()))
        assert not certificate.holds
