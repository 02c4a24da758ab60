import pytest
from hypothesis import given, settings, strategies as st

from cywork.linalg import QQ
from cywork.quiver import (Arrow, NCPoly, Potential, Quiver, QuiverError, cyclic_canonical, cyclic_derivative,
                           format_word, jacobi_relations, reduce, word)
from cywork.tiling import genus2_tiling, tiling_to_qp

T3 = Quiver.one_vertex("xyz")
T3_LOC = Quiver.one_vertex("xyz", invertible=True)


@pytest.mark.parametrize("w, expected", [
    (word("x", "x^-1"), ()),
    (word("x", "y", "y^-1", "z"), word("x", "z")),
    (word("x", "y", "z"), word("x", "y", "z")),
])
def test_reduce(w, expected):
    assert reduce(w, T3_LOC) == expected


def test_inverse_needs_invertible_arrow():
    with pytest.raises(QuiverError):
        reduce(word("x", "x^-1"), T3)


def test_non_composable_word_rejected():
    Q = Quiver(("u", "v"), (Arrow("p", "u", "v"), Arrow("q", "u", "v")))
    with pytest.raises(QuiverError):
        reduce(word("p", "q"), Q)


@pytest.mark.parametrize("w, rep", [("yzx", "xyz"), ("xyz", "xyz"), ("x", "x")])
def test_cyclic_canonical(w, rep):
    assert format_word(cyclic_canonical(word(*w)).rep) == rep


@given(st.lists(st.sampled_from("xyz"), min_size=1, max_size=7), st.integers(0, 6))
@settings(max_examples=100)
def test_rotations_share_canonical_form(letters, k):
    w = word(*letters)
    k %= len(w)
    assert cyclic_canonical(w) == cyclic_canonical(w[k:] + w[:k])


def test_cyclic_derivatives():
    W = Potential.parse("xyz - xzy")
    assert str(cyclic_derivative(W, "x")) == "yz - zy"
    assert cyclic_derivative(W, "w").is_zero()


def test_genus2_derivatives():
    W2 = tiling_to_qp(genus2_tiling()).potential
    assert cyclic_derivative(W2, "i") == NCPoly([(1, word("f")), (-1, word("a", "g"))])
    assert cyclic_derivative(W2, "f") == NCPoly([(1, word("i")), (-1, word("c", "e"))])


def test_jacobi_relations():
    rels = jacobi_relations(T3, Potential.parse("xyz - xzy"))
    expected = [NCPoly([(1, word(a, b)), (-1, word(b, a))]) for a, b in ("yz", "zx", "xy")]
    assert rels == expected
    loop = Quiver.one_vertex("x")
    assert [r.is_zero() for r in jacobi_relations(loop, Potential())] == [True]
    g2 = tiling_to_qp(genus2_tiling())
    assert len(jacobi_relations(g2.quiver, g2.potential)) == 9


def test_unknown_letter_in_potential():
    with pytest.raises(QuiverError):
        jacobi_relations(Quiver.one_vertex("xy"), Potential.parse("xyz"))


def test_json_round_trip():
    W = Potential.parse("xyz - 2*xzy")
    assert Potential.from_json(W.to_json()) == W
    assert Quiver.from_json(T3.to_json()) == T3
    p = NCPoly([(3, word("x", "y")), (-1, word("z"))])
    assert NCPoly.from_json(p.to_json()) == p


def test_polynomial_arithmetic():
    x, y = NCPoly.monomial(word("x")), NCPoly.monomial(word("y"))
    assert (x * y - y * x) == x.commutator(y)
    assert (x + y - x - y).is_zero()
    assert x.scale(QQ(0)).is_zero()
