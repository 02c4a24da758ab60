import random

import pytest
from hypothesis import given, settings, strategies as st

from cywork.linalg import F2, QQ
from cywork.simplicial import (AbstractSimplicialComplex, FiniteSimplicialSet, SimplicialError, compact_cohomology,
                               contract, contract_family, contractible_subsets, from_abstract, homology,
                               is_face_closed, maximal_tree, minimal_s1, point, product, random_complex, simplex)


def strip(b):
    b = list(b)
    while b and b[-1] == 0:
        b.pop()
    return tuple(b)


def test_basic_homology():
    assert homology(point()) == (1,)
    assert homology(minimal_s1()) == (1, 1)
    assert strip(homology(simplex(3))) == (1,)


@pytest.mark.parametrize("n", range(6))
def test_circle_times_simplex_count(n):
    P = product(minimal_s1(), simplex(n))
    P.check_identities()
    assert P.count(n + 1) == n + 1
    assert strip(homology(P)) == (1, 1)


def test_torus_as_product():
    T = product(minimal_s1(), minimal_s1())
    assert [T.count(n) for n in range(3)] == [1, 3, 2]
    assert homology(T) == (1, 2, 1)
    assert compact_cohomology(T) == (1, 2, 1)


def test_three_torus_as_product():
    T3 = product(product(minimal_s1(), minimal_s1()), minimal_s1())
    assert homology(T3) == (1, 3, 3, 1)


def test_triangle_tree_contraction_gives_minimal_circle():
    S = from_abstract(AbstractSimplicialComplex.from_facets((0, 1, 2), [(0, 1), (1, 2), (0, 2)]))
    tree = maximal_tree(S)
    C = contract(S, tree)
    assert [C.count(n) for n in range(2)] == [1, 1]
    assert homology(C) == (1, 1)


def test_contraction_rejects_non_closed():
    S = simplex(2)
    edge = S.nd(1)[0]
    assert not is_face_closed(S, [edge])
    with pytest.raises(SimplicialError):
        contract(S, [edge])


def test_json_round_trip_and_validation():
    T = product(minimal_s1(), minimal_s1())
    back = FiniteSimplicialSet.from_json(T.to_json())
    assert homology(back) == (1, 2, 1)
    with pytest.raises(SimplicialError):
        FiniteSimplicialSet.from_json({})
    with pytest.raises(SimplicialError):
        FiniteSimplicialSet.from_json({"simplices": {"0": ["v"], "1": ["e"]},
                                       "faces": {"e": [[[0], "v"], [[0], "w"]]}})


def test_unclosed_face_set_rejected():
    with pytest.raises(SimplicialError):
        from_abstract(AbstractSimplicialComplex((0, 1, 2), frozenset(
            [frozenset([0]), frozenset([1]), frozenset([2]), frozenset([0, 1, 2])])))


def test_f2_and_rational_agree_on_torsion_free():
    T = product(minimal_s1(), minimal_s1())
    assert homology(T, F2) == homology(T, QQ)


def _contraction_case(seed):
    rng = random.Random(seed)
    K = random_complex(rng, rng.randint(4, 7), rng.randint(2, 6), 3)
    S = from_abstract(K)
    fam = contractible_subsets(K, rng, rng.randint(1, 2))
    return S, contract_family(S, fam)


@pytest.mark.parametrize("seed", range(50))
def test_contraction_invariance(seed):
    S, C = _contraction_case(seed)
    C.check_identities()
    assert strip(homology(S)) == strip(homology(C))
    assert strip(compact_cohomology(S)) == strip(compact_cohomology(C))


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_contraction_invariance_property(seed):
    S, C = _contraction_case(seed)
    assert strip(homology(S, F2)) == strip(homology(C, F2))
