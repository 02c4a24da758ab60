import pytest
from hypothesis import given, settings, strategies as st

from cywork.groups import (FreeAbelian, FreeGroup, GroupError, KleinBottle, ProductWithZ, SurfaceGroup,
                           central_unit_search, conjugacy_class_in_ball, from_spec)

SURFACE = SurfaceGroup(2)


def test_klein_normal_forms():
    K = KleinBottle()
    a, b = K.letter(0), K.letter(2)
    assert K.label(K.mul(a, b)) == "b a^-1"
    # the defining relation aba = b
    assert K.mul(K.mul(a, b), a) == b
    assert K.parse_label("b^2 a^-1") == K.mul(K.mul(b, b), K.inv(a))


def test_klein_finite_classes():
    K = KleinBottle()
    a, b = K.letter(0), K.letter(2)
    ex = conjugacy_class_in_ball(K, a, 4)
    assert ex.closed and set(ex.elements) == {a, K.inv(a)}
    b2 = K.mul(b, b)
    assert conjugacy_class_in_ball(K, b2, 4).elements == (b2,)
    assert not conjugacy_class_in_ball(K, b, 4).closed


def test_surface_sphere_sizes():
    # growth series of the genus-2 surface group
    sizes = [len([g for g in SURFACE.ball(r) if len(g) == r]) for r in range(4)]
    assert sizes == [1, 8, 56, 392]


def test_surface_relator_is_trivial():
    G = SURFACE
    rel = G.parse_word("a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1")
    assert rel == G.identity()
    # cyclic rotations of the relator are trivial too
    assert G.parse_word("b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1 a1") == G.identity()


def test_surface_generator_class_is_infinite():
    ex = conjugacy_class_in_ball(SURFACE, SURFACE.letter(0), 4)
    assert not ex.closed


def test_free_abelian_ball_and_search():
    Z3 = FreeAbelian(3)
    assert len(Z3.ball(2)) == 25
    rep = central_unit_search(Z3, 2)
    assert rep.verdict == "FOUND"
    assert len(rep.candidates) == 25
    assert len(rep.nontrivial) == 24


def test_genus2_no_central_units_small_radius():
    rep = central_unit_search(SURFACE, 3)
    assert rep.verdict == "NONE_FOUND(3)"
    assert rep.nontrivial == ()


@pytest.mark.parametrize("spec, cls", [
    ({"type": "free_abelian", "rank": 3}, FreeAbelian),
    ({"type": "surface", "genus": 2}, SurfaceGroup),
    ({"type": "klein_bottle"}, KleinBottle),
    ({"type": "free", "rank": 2}, FreeGroup),
    ({"type": "product_with_Z", "inner": {"type": "klein_bottle"}}, ProductWithZ),
])
def test_from_spec(spec, cls):
    G = from_spec(spec)
    assert isinstance(G, cls)
    assert G.spec() == spec


def test_bad_spec():
    with pytest.raises(GroupError):
        from_spec({"type": "lie"})


GROUPS = [FreeAbelian(2), FreeGroup(2), KleinBottle(), ProductWithZ(KleinBottle()), SURFACE]


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: type(G).__name__)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_group_axioms(G, data):
    # the surface ball is enumerated lazily, so keep its products short
    letters = st.lists(st.sampled_from(G.letters()), max_size=1 if G is SURFACE else 3)
    g, h, k = (G.from_letters(data.draw(letters)) for _ in range(3))
    assert G.mul(G.mul(g, h), k) == G.mul(g, G.mul(h, k))
    assert G.mul(g, G.inv(g)) == G.identity()
    assert G.mul(G.identity(), g) == g
    assert G.conjugate(G.mul(g, h), k) == G.mul(G.conjugate(g, k), G.conjugate(h, k))
