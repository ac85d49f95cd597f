"""Exact linear algebra over the rationals.

Everything here works on lists of rows whose entries are
:class:`fractions.Fraction`.  Matrices are small (algebra dimension is at
most a handful), so plain Gaussian elimination with exact arithmetic is both
the simplest and the most reliable choice.  Pivoting is deterministic: the
first nonzero entry in column order wins, ties broken by lowest row index,
so echelon bases are canonical and usable for equality tests.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Row = tuple[Fraction, ...]


def _as_row(row: Iterable) -> Row:
    return tuple(Fraction(x) for x in row)


def rref(rows: Iterable[Iterable]) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    mat = [list(_as_row(r)) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    if any(len(r) != ncols for r in mat):
        raise ValueError("ragged matrix")
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pin = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pin is None:
            continue
        mat[r], mat[pin] = mat[pin], mat[r]
        inv = Fraction(1) / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def rank(rows: Iterable[Iterable]) -> int:
    return len(rref(rows)[0])


def residual(basis: Sequence[Row], v: Iterable) -> Row:
    """Reduce v against an rref basis; zero iff v lies in the span."""
    basis = list(basis)
    out = list(_as_row(v))
    pivots = [next(i for i, x in enumerate(row) if x != 0) for row in basis]
    for row, p in zip(basis, pivots):
        if out[p] != 0:
            f = out[p]
            out = [a - f * b for a, b in zip(out, row)]
    return tuple(out)


def in_span(basis: Sequence[Row], v: Iterable) -> bool:
    return all(x == 0 for x in residual(basis, v))


def span_basis(vectors: Iterable[Iterable]) -> list[Row]:
    """Canonical (rref) basis of the span of the given vectors."""
    return rref(vectors)[0]


def spans_equal(a: Iterable[Iterable], b: Iterable[Iterable]) -> bool:
    return span_basis(a) == span_basis(b)


def mat_mul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]):
    n, k, m = len(a), len(b), len(b[0])
    assert all(len(r) == k for r in a)
    return [
        tuple(sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(m))
        for i in range(n)
    ]


def mat_vec(a: Sequence[Sequence[Fraction]], v: Sequence[Fraction]):
    return tuple(sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in a)


def identity(n: int) -> list[Row]:
    return [tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)]
