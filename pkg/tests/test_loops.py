import random

import pytest

from cywork.groups import FreeAbelian, KleinBottle, conjugacy_class_in_ball
from cywork.linalg import F2, QQ, homology
from cywork.loops import (NotOrientableError, RelatorError, TruncationError, all_components, bar_slice,
                          bp_pushforward, build_model, class_representatives, connes_les, cyclic_data,
                          cyclic_homology, fundamental_class, hochschild_component, identity_component,
                          klein_ext2_casestudy, stabilization)
from cywork.manifolds import builtin, circle, torus_square
from cywork.simplicial import homology as s_homology


@pytest.fixture(scope="module")
def torus():
    return build_model(torus_square())


def test_torus_orientation_is_difference_of_triangles(torus):
    assert sorted(torus.orientation.values()) == [-1, 1]


@pytest.mark.parametrize("g", [(0,), (1,), (-3,)])
def test_circle_components(g):
    m = build_model(circle())
    assert hochschild_component(m, g, 3).betti == (1, 1)


@pytest.mark.parametrize("g", [(0, 0), (2, -1)])
def test_torus_components(torus, g):
    comp = hochschild_component(torus, g, 4)
    assert comp.betti == (1, 2, 1) and comp.flag == "EXACT"


def test_components_preserve_classes():
    m = build_model(builtin("klein"), F2)
    K = m.group
    for c in class_representatives(K, 2):
        comp = hochschild_component(m, c, 3)
        orbit = set(conjugacy_class_in_ball(K, c, 3).elements)
        for n, pairs in comp.basis.items():
            for s, x in pairs:
                assert x in orbit
                assert K.mul(comp.h_of(s, x), m.gamma(s)) == x


def test_seven_vertex_torus_after_tree_contraction():
    m = build_model(builtin("torus7"))
    assert m.S.count(0) == 1
    assert identity_component(m).betti == (1, 2, 1)
    assert fundamental_class(m).ok


def test_relator_failure_detected():
    raw = torus_square()
    bad = (raw.S, raw.group, {"a": (1, 0), "b": (0, 1), "c": (2, 1)})
    with pytest.raises(RelatorError):
        build_model(bad)


def test_klein_over_q_is_not_orientable():
    with pytest.raises(NotOrientableError, match="NOT_ORIENTABLE"):
        build_model(builtin("klein"), QQ)


def test_bp_pushforward_of_fundamental_class(torus):
    fc = fundamental_class(torus)
    pushed = bp_pushforward(torus, fc.chain)
    assert pushed == torus.orientation
    assert bp_pushforward(torus, {}) == {}


def test_genus2_truncated_class_reports_flag():
    m = build_model(builtin("genus2"))
    comp = hochschild_component(m, m.group.letter(0), 4)
    assert comp.flag == "TRUNCATED(4)"
    assert comp.betti == (1, 1, 0)
    assert stabilization(m, m.group.letter(0), 4)["stable"]


def test_gamma_and_bar_agree_on_identity_class(torus):
    sl = bar_slice(torus.group, (0, 0), 6, 3)
    h = homology(sl.hochschild())
    assert tuple(h[n].betti for n in range(3)) == identity_component(torus).betti


def test_bar_rejects_unreachable_class():
    with pytest.raises(TruncationError):
        bar_slice(FreeAbelian(1), (5,), 3, 2)


def test_trivial_group_cyclic_homology():
    cd = cyclic_data(bar_slice(FreeAbelian(0), (), 1, 6), 5)
    assert cd.hc_betti == (1, 0, 1, 0, 1, 0)
    assert cd.hh_betti == (1, 0, 0, 0, 0, 0)


def test_circle_cyclic_homology():
    res = cyclic_homology(build_model(circle()), (0,), 2, 6)
    assert res["hc_betti"] == [1, 1, 1]
    assert res["hh_betti"] == [1, 1, 0]
    res = cyclic_homology(build_model(circle()), (1,), 2, 6)
    assert res["hc_betti"] == [1, 0, 0]


def test_hc0_equals_hh0():
    cd = cyclic_data(bar_slice(KleinBottle(), KleinBottle().letter(0), 3, 1, F2), 0)
    assert cd.hc_betti == cd.hh_betti


def test_les_on_klein_classes():
    K = KleinBottle()
    for c in (K.identity(), K.letter(0)):
        cd = cyclic_data(bar_slice(K, c, 3, 4, F2), 3)
        assert all(node.exact for node in connes_les(cd))


def test_random_chain_identities_small():
    sl = bar_slice(FreeAbelian(2), (1, 0), 4, 4)
    assert sl.check_identities()
    assert sl.random_chain_check(random.Random(1), 50) == 50


def test_all_components_is_deterministic(torus, monkeypatch):
    monkeypatch.setenv("WORKBENCH_THREADS", "3")
    threaded = [c.to_json() for c in all_components(torus, 1)]
    monkeypatch.setenv("WORKBENCH_THREADS", "1")
    assert threaded == [c.to_json() for c in all_components(torus, 1)]


def test_klein_casestudy_small_radius():
    assert klein_ext2_casestudy(0, 2).ok
    assert klein_ext2_casestudy(2, 2).ok


def test_identity_component_matches_simplicial_homology_f2():
    m = build_model(builtin("klein"), F2)
    assert identity_component(m).betti == s_homology(m.S, F2)
