from collections import Counter

import pytest

from cywork.linalg import Feasible, Infeasible
from cywork.quiver import Arrow, Potential, Quiver
from cywork.tiling import (CHECK_LABEL, Face, QuiverWithPotential, SurfaceTiling, TilingError, contract_tree_qp,
                           genus2_modified_qp, genus2_tiling, hexagonal_torus, localize, tiling_to_qp,
                           weight_assignment)


def test_hexagonal_torus():
    qp = tiling_to_qp(hexagonal_torus())
    assert qp.quiver.vertices == ("v0",)
    assert qp.potential == Potential.parse("xyz - xzy")


def test_genus2_tiling():
    t = genus2_tiling()
    assert t.euler_characteristic() == -2
    qp = tiling_to_qp(t)
    assert sorted(qp.quiver.arrow_names) == list("abcdefghi")
    assert qp.potential == Potential.parse("fi - gia + adg - bdh + behc - cef")


@pytest.mark.parametrize("t", [hexagonal_torus(), genus2_tiling()], ids=["torus", "genus2"])
def test_every_arrow_once_per_sign(t):
    qp = tiling_to_qp(t)
    counts = Counter()
    for cw, c in qp.potential.terms.items():
        for name, _ in cw.rep:
            counts[(name, c > 0)] += 1
    assert all(counts[(a, s)] == 1 for a in qp.quiver.arrow_names for s in (True, False))


def test_degenerate_inputs():
    with pytest.raises(TilingError):
        SurfaceTiling(0, (Face(1, ("x",)),)).validate()
    with pytest.raises(TilingError, match="Euler"):
        SurfaceTiling(2, hexagonal_torus().faces).validate()
    with pytest.raises(TilingError, match="positive"):
        SurfaceTiling(1, (Face(1, ("x", "y")), Face(1, ("y", "x")))).validate()


def test_contraction_on_two_vertices():
    Q = Quiver(("u", "v"), (Arrow("e", "u", "v"), Arrow("p", "v", "u"), Arrow("q", "v", "u")))
    W = Potential([(1, (("e", 1), ("p", 1))), (-1, (("e", 1), ("q", 1)))], quiver=Q)
    out = contract_tree_qp(QuiverWithPotential(Q, W))
    assert out.quiver.arrow_names == ("p", "q")
    assert out.potential == Potential.parse("p - q")


def test_contraction_of_one_vertex_is_identity():
    qp = tiling_to_qp(hexagonal_torus())
    assert contract_tree_qp(qp) == qp


def test_disconnected_quiver():
    Q = Quiver(("u", "v"), (Arrow("x", "u", "u"),))
    with pytest.raises(TilingError, match="disconnected"):
        contract_tree_qp(QuiverWithPotential(Q, Potential.parse("x")))


def test_localize():
    qp = localize(tiling_to_qp(genus2_tiling()))
    assert all(a.invertible for a in qp.quiver.arrows)
    assert qp.label == CHECK_LABEL


def test_weights():
    res = weight_assignment(tiling_to_qp(genus2_tiling()))
    assert isinstance(res.result, Feasible) and res.verified
    bad = weight_assignment(genus2_modified_qp())
    assert isinstance(bad.result, Infeasible) and bad.verified
    assert (bad.result.variable, str(bad.result.value)) == ("d", "1/2")


def test_single_term_potential():
    Q = Quiver.one_vertex("xyz")
    res = weight_assignment(QuiverWithPotential(Q, Potential.parse("xyz")))
    assert res.feasible and sum(res.result.witness.values()) == 1


def test_json_round_trip():
    t = genus2_tiling()
    assert SurfaceTiling.from_json(t.to_json()) == t
