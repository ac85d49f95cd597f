from fractions import Fraction

from nilorth import linalg


def test_rref_canonical_and_pivots():
    rows, pivots = linalg.rref([[2, 4, 0], [1, 2, 1]])
    assert pivots == [0, 2]
    assert rows == [
        (Fraction(1), Fraction(2), Fraction(0)),
        (Fraction(0), Fraction(0), Fraction(1)),
    ]


def test_rank_and_span_membership():
    basis = linalg.span_basis([[1, 0, 1], [0, 1, 1], [1, 1, 2]])
    assert len(basis) == 2
    assert linalg.in_span(basis, [2, 3, 5])
    assert not linalg.in_span(basis, [0, 0, 1])


def test_span_equality_is_representation_independent():
    a = [[1, 2, 3], [0, 1, 1]]
    b = [[1, 0, 1], [2, 5, 7]]
    assert linalg.spans_equal(a, b)
    assert not linalg.spans_equal(a, [[1, 2, 3]])


def test_residual_zero_iff_in_span():
    basis = linalg.span_basis([[Fraction(1, 2), 0], [0, Fraction(1, 3)]])
    assert linalg.residual(basis, [5, 7]) == (0, 0)


def test_mat_helpers():
    m = [[Fraction(1), Fraction(1)], [Fraction(0), Fraction(1)]]
    assert linalg.mat_vec(m, (Fraction(2), Fraction(3))) == (5, 3)
    sq = linalg.mat_mul(m, m)
    assert sq == [(1, 2), (0, 1)]
    assert linalg.identity(2) == [(1, 0), (0, 1)]
