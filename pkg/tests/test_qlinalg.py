import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from algco import qlinalg as ql
from algco.errors import DimensionMismatch, SubspaceNotContained


def _sym(m):
    return sympy.Matrix(m.shape[0], m.shape[1], [sympy.Rational(x.numerator, x.denominator) for x in m.flat])


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def qmatrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    zero_bias = draw(st.floats(0, 0.8))
    vals = [draw(rationals) if draw(st.floats(0, 1)) > zero_bias else Fraction(0) for _ in range(r * c)]
    return ql.qmatrix(vals, shape=(r, c))


@settings(max_examples=80, deadline=None)
@given(qmatrices())
def test_rank_matches_sympy(m):
    assert ql.rank(m) == _sym(m).rank()


@settings(max_examples=80, deadline=None)
@given(qmatrices())
def test_rank_nullity_and_kernel(m):
    k = ql.kernel_basis(m)
    assert k.dim + ql.rank(m) == m.shape[1]
    assert k.dim == len(_sym(m).nullspace())
    for v in k.vectors:
        assert ql.is_zero(m @ v)


@settings(max_examples=60, deadline=None)
@given(qmatrices())
def test_image_basis_spans_columns(m):
    im = ql.image_basis(m)
    assert im.dim == ql.rank(m)
    for j in range(m.shape[1]):
        assert ql.in_span(im, m[:, j])


@settings(max_examples=60, deadline=None)
@given(qmatrices(4, 4), st.randoms(use_true_random=False))
def test_solve_consistent_systems(m, rnd):
    x = ql.qvector([Fraction(rnd.randint(-3, 3)) for _ in range(m.shape[1])])
    b = m @ x
    y = ql.solve(m, b)
    assert y is not None and ql.is_zero(m @ y - b)


def test_solve_inconsistent_returns_none():
    m = ql.qmatrix([[1, 0], [0, 0]])
    assert ql.solve(m, [0, 1]) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(rationals, min_size=n * n, max_size=n * n)))
def test_det_matches_sympy(vals):
    n = int(round(len(vals) ** 0.5))
    m = ql.qmatrix(vals, shape=(n, n))
    assert ql.det(m) == Fraction(str(_sym(m).det()))


def test_inverse_roundtrip_and_singular():
    m = ql.qmatrix([[2, 1, 0], [1, "1/2", 3], [0, 4, 1]])
    inv = ql.inverse(m)
    assert ql.is_zero(m @ inv - ql.qeye(3))
    with pytest.raises(ZeroDivisionError):
        ql.inverse(ql.qmatrix([[1, 2], [2, 4]]))


@st.composite
def matrix_pairs(draw):
    r, k, c = (draw(st.integers(1, 5)) for _ in range(3))
    a = ql.qmatrix([draw(rationals) for _ in range(r * k)], shape=(r, k))
    b = ql.qmatrix([draw(rationals) for _ in range(k * c)], shape=(k, c))
    return a, b


@settings(max_examples=60, deadline=None)
@given(matrix_pairs())
def test_matmul_matches_object_product(pair):
    a, b = pair
    assert np.all(ql.matmul(a, b) == a @ b)
    assert ql.product_is_zero(a, b) == ql.is_zero(a @ b)


def test_matmul_big_entries_fall_back_to_python_ints():
    a = ql.qmatrix([[2 ** 40, 1], [3, Fraction(1, 3 ** 20)]])
    assert np.all(ql.matmul(a, a) == a @ a)


def test_quotient_basis_completes_and_detects_non_containment():
    big = ql.SubspaceBasis.standard(3)
    sub = ql.SubspaceBasis.from_vectors(3, [[1, 1, 0]])
    q = ql.quotient_basis(sub, big)
    assert q.dim == 2
    stacked = np.array(list(sub.vectors) + list(q.vectors), dtype=object)
    assert ql.rank(stacked) == 3
    with pytest.raises(SubspaceNotContained):
        ql.quotient_basis(ql.SubspaceBasis.from_vectors(3, [[0, 0, 1]]),
                          ql.SubspaceBasis.from_vectors(3, [[1, 0, 0]]))


def test_class_coordinates_modulo_boundaries():
    reps = ql.SubspaceBasis.from_vectors(3, [[1, 0, 0]])
    bnd = ql.SubspaceBasis.from_vectors(3, [[0, 1, 0]])
    coords = ql.class_coordinates(reps, bnd, ql.qvector([5, -7, 0]))
    assert list(coords) == [5]
    with pytest.raises(SubspaceNotContained):
        ql.class_coordinates(reps, bnd, ql.qvector([0, 0, 1]))


def test_parsing_and_formatting():
    assert ql.to_q("3/6") == Fraction(1, 2)
    assert ql.to_q(0.25) == Fraction(1, 4)
    assert ql.format_q(Fraction(-4, 2)) == "-2"
    assert ql.format_q(Fraction(3, 9)) == "1/3"
    with pytest.raises(DimensionMismatch):
        ql.qmatrix([[1, 2], [3]])
    with pytest.raises(DimensionMismatch):
        ql.qmatrix([1, 2, 3], shape=(2, 2))


def test_kronecker_matches_numpy():
    rng = random.Random(0)
    a = ql.qmatrix([[rng.randint(-3, 3) for _ in range(2)] for _ in range(3)])
    b = ql.qmatrix([[rng.randint(-3, 3) for _ in range(3)] for _ in range(2)])
    expect = np.kron(a.astype(int), b.astype(int))
    assert np.all(ql.kronecker(a, b).astype(int) == expect)


def test_empty_shapes():
    assert ql.rank(ql.qzeros(0, 3)) == 0
    assert ql.kernel_basis(ql.qzeros(0, 3)).dim == 3
    assert ql.image_basis(ql.qzeros(3, 0)).dim == 0
    assert ql.det(ql.qzeros(0, 0)) == 1
