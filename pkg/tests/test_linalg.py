from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cywork.linalg import (F2, QQ, BoundedChainComplex, ChainComplexError, CycleReducer, Feasible, Field,
                           FieldMismatchError, Infeasible, SparseMatrix, check_certificate, homology,
                           integer_feasible, kernel_basis, rank, rank_and_kernel)


def test_field_parse_and_labels():
    assert Field.parse("q") == QQ
    assert Field.parse("f2") == F2
    assert Field.parse("fp:7").label == "F7"
    with pytest.raises(ValueError):
        Field.parse("fp:6")
    with pytest.raises(ZeroDivisionError):
        F2(Fraction(1, 2))


@pytest.mark.parametrize("rows, field, r, k", [
    ([[1, 0], [0, 1]], QQ, 2, 0),
    ([[1, 1], [1, 1]], QQ, 1, 1),
    ([[1, 1], [1, 1]], F2, 1, 1),
    ([[2, 4], [1, 2]], Field.parse("fp:2"), 1, 1),
])
def test_rank_examples(rows, field, r, k):
    m = SparseMatrix.from_dense(rows, field)
    assert rank(m) == r
    assert len(kernel_basis(m)) == k


def test_kernel_over_f2_is_all_ones():
    _, ker = rank_and_kernel(SparseMatrix.from_dense([[1, 1], [1, 1]], F2))
    assert ker == [(1, 1)]


def test_field_mismatch():
    a = SparseMatrix.from_dense([[1]], QQ)
    b = SparseMatrix.from_dense([[1]], F2)
    with pytest.raises(FieldMismatchError):
        a @ b


def test_homology_examples():
    ident = SparseMatrix.from_dense([[1]], QQ)
    zero = SparseMatrix.from_dense([[0]], QQ)
    c1 = BoundedChainComplex({0: 1, 1: 1}, {1: ident}, QQ)
    c2 = BoundedChainComplex({0: 1, 1: 1}, {1: zero}, QQ)
    assert [h.betti for h in homology(c1).values()] == [0, 0]
    assert [h.betti for h in homology(c2).values()] == [1, 1]
    # boundary of a triangle
    d1 = SparseMatrix.from_dense([[-1, -1, 0], [1, 0, -1], [0, 1, 1]], QQ)
    tri = BoundedChainComplex({0: 3, 1: 3}, {1: d1}, QQ)
    assert [h.betti for h in homology(tri).values()] == [1, 1]


def test_d_squared_is_checked():
    d1 = SparseMatrix.from_dense([[1]], QQ)
    d2 = SparseMatrix.from_dense([[1]], QQ)
    with pytest.raises(ChainComplexError, match="d_1 o d_2"):
        BoundedChainComplex({0: 1, 1: 1, 2: 1}, {1: d1, 2: d2}, QQ)


def test_cycle_reducer_coordinates():
    red = CycleReducer(QQ, [{0: 1, 1: -1}], [{0: 1}])
    assert red.coordinates({1: 3}) == (3,)
    assert red.is_boundary({0: 2, 1: -2})


small = st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4)


@given(small, st.sampled_from([QQ, F2, Field.parse("fp:5")]))
@settings(max_examples=80, deadline=None)
def test_rank_of_transpose(rows, field):
    m = SparseMatrix.from_dense(rows, field)
    assert rank(m) == rank(m.transpose())
    r, ker = rank_and_kernel(m)
    assert r + len(ker) == m.ncols
    for v in ker:
        assert not m.apply({i: x for i, x in enumerate(v) if x != 0})


@given(small)
@settings(max_examples=50, deadline=None)
def test_contractible_summand_does_not_change_homology(rows):
    # a complex C_1 -> C_0 and the same with 0 -> k --id--> k -> 0 adjoined
    m = SparseMatrix.from_dense(rows, QQ)
    c = BoundedChainComplex({0: m.nrows, 1: m.ncols}, {1: m}, QQ)
    entries = list(m.entries()) + [(m.nrows, m.ncols, 1)]
    m2 = SparseMatrix.from_entries(m.nrows + 1, m.ncols + 1, entries, QQ)
    c2 = BoundedChainComplex({0: m.nrows + 1, 1: m.ncols + 1}, {1: m2}, QQ)
    assert [h.betti for h in homology(c).values()] == [h.betti for h in homology(c2).values()]


@pytest.mark.parametrize("eqs, unknowns, feasible, forced", [
    ([({"x": 1, "y": 1}, 1), ({"x": 1, "y": -1}, 0)], ["x", "y"], False, ("x", Fraction(1, 2))),
    ([({"x": 1}, 1)], ["x"], True, None),
    ([({"x": 2, "y": 4}, 3)], ["x", "y"], False, None),
    ([({"x": 1}, 1), ({"x": 1}, 2)], ["x"], False, None),
])
def test_integer_feasible_examples(eqs, unknowns, feasible, forced):
    res = integer_feasible(eqs, unknowns)
    assert isinstance(res, Feasible) == feasible
    assert check_certificate(eqs, unknowns, res)
    if forced:
        assert isinstance(res, Infeasible) and res.kind == "forced"
        assert (res.variable, res.value) == forced


eq_strategy = st.lists(
    st.tuples(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.integers(-4, 4)),
    min_size=1, max_size=4)


@given(eq_strategy)
@settings(max_examples=150, deadline=None)
def test_integer_feasible_always_certifies(system):
    names = ["u", "v", "w"]
    eqs = [({n: c for n, c in zip(names, row) if c}, rhs) for row, rhs in system]
    res = integer_feasible(eqs, names)
    assert check_certificate(eqs, names, res)
