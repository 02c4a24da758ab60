import pytest

from cywork.linalg import F2, QQ, Field
from cywork.nccalc import (Form, GradedDerivation, UnsupportedError, check_d_squared, check_lie_omega,
                           check_moment_identity, de_rham_D, dr, exact_cy_witness, ginzburg_dga, h0_presentation,
                           lie_derivative, moment_map)
from cywork.quiver import NCPoly, Potential, Quiver, word
from cywork.tiling import genus2_tiling, tiling_to_qp


def poly(text_terms):
    return NCPoly([(c, word(*w)) for c, w in text_terms])


T3 = (Quiver.one_vertex("xyz"), Potential.parse("xyz - xzy"))
LOOP = (Quiver.one_vertex("x"), Potential())


def genus2():
    qp = tiling_to_qp(genus2_tiling())
    return qp.quiver, qp.potential


def test_de_rham_examples():
    x = Form.letter("x")
    xy = Form.from_poly(poly([(1, "xy")]))
    assert de_rham_D(x) == Form.letter("x", True)
    assert de_rham_D(xy) == Form.letter("x", True) * Form.letter("y") + Form.letter("x") * Form.letter("y", True)
    assert de_rham_D(de_rham_D(xy)).is_zero()


def test_lie_derivative_examples():
    theta = GradedDerivation(0, {"x": poly([(1, "x")])})
    assert lie_derivative(theta, Form.letter("x")) == Form.letter("x")
    theta = GradedDerivation(0, {"x": poly([(1, "yz")]), "y": NCPoly(), "z": NCPoly()})
    assert lie_derivative(theta, Form.letter("x", True)) == de_rham_D(Form.from_poly(poly([(1, "yz")])))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("dual_degree", [-1, 0])
def test_moment_identity(n, dual_degree):
    assert check_moment_identity("abcd"[:n], QQ, dual_degree)


def test_moment_identity_over_f3():
    assert check_moment_identity("ab", Field.parse("fp:3"))


def test_moment_map_shape():
    assert str(moment_map("x")) == "x.x* - x*.x"


@pytest.mark.parametrize("qp", [T3, LOOP, genus2()], ids=["torus3", "loop", "genus2"])
def test_dga_squares_to_zero(qp):
    G = ginzburg_dga(*qp)
    assert check_d_squared(G).ok
    assert check_lie_omega(G)


def test_broken_dt_is_named():
    G = ginzburg_dga(*T3)
    # drop the y and z commutators from dt
    bad = G.with_d("t", NCPoly([(1, word("x", "x*")), (-1, word("x*", "x"))]))
    v = check_d_squared(bad)
    assert not v.ok and v.failing == "t"


def test_h0_is_the_jacobi_algebra():
    _, rels = h0_presentation(ginzburg_dga(*T3))
    assert sorted(str(r) for r in rels) == sorted(["yz - zy", "-xz + zx", "xy - yx"])


def test_degrees():
    G = ginzburg_dga(*T3)
    assert G.degrees == {"x": 0, "y": 0, "z": 0, "x*": -1, "y*": -1, "z*": -1, "t": -2}


@pytest.mark.parametrize("qp", [T3, LOOP, genus2()], ids=["torus3", "loop", "genus2"])
def test_witness(qp):
    rep = exact_cy_witness(ginzburg_dga(*qp))
    assert rep.sigma_ok and rep.b_ok
    assert rep.sigma_epsilon == rep.dt


def test_witness_over_f2():
    Q, _ = T3
    G = ginzburg_dga(Q, Potential.parse("xyz - xzy", F2))
    assert check_d_squared(G).ok
    assert exact_cy_witness(G).ok


def test_unsupported_inputs():
    Q, W = T3
    with pytest.raises(UnsupportedError):
        ginzburg_dga(Q, W, c=0)
    with pytest.raises(UnsupportedError):
        ginzburg_dga(Quiver.one_vertex("xt"), Potential.parse("xt"))
    # the empty quiver accepts any c
    G = ginzburg_dga(Quiver(("v",), ()), Potential(), c=-3)
    assert G.degrees["t"] == -4


def test_dr_kills_graded_commutators():
    deg = {"x": 0, "y": 0}
    a = Form.letter("x", True, QQ, deg) * Form.letter("y", False, QQ, deg)
    b = Form.letter("y", False, QQ, deg) * Form.letter("x", True, QQ, deg)
    assert dr(a - b).is_zero()
