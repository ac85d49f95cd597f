"""Exact kernel for finite-dimensional nilpotent Lie algebras.

An algebra is given by rational structure constants over a designated basis
X_1..X_n.  All validation (antisymmetry, Jacobi, nilpotency) runs in exact
rational arithmetic; no tolerances are involved.  Vectors come in two
flavors sharing the same code paths: ``exact`` (Fraction coordinates) and
``float`` (64-bit coordinates, used by the dynamics layer at scale).

The group law is realized on the algebra through the Dynkin form of the
Baker-Campbell-Hausdorff series, truncated at the validated nilpotency
class; coefficients are generated programmatically, never transcribed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import linalg

_MAX_BCH_CLASS = 6


class LeibnizError(ValueError):
    """Raised when a would-be derivation violates the Leibniz rule.

    Carries the offending basis pair as ``witness``.
    """

    def __init__(self, witness: tuple[int, int]):
        self.witness = witness
        super().__init__(
            f"Leibniz rule fails on basis pair (X_{witness[0]+1}, X_{witness[1]+1})"
        )


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraVector:
    """Coordinate vector in the basis X_1..X_n of some algebra."""

    coords: tuple
    flavor: str  # "exact" | "float"

    def __post_init__(self):
        if self.flavor not in ("exact", "float"):
            raise ValueError(f"unknown flavor {self.flavor!r}")

    def __len__(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coords)

    def to_float(self) -> "AlgebraVector":
        if self.flavor == "float":
            return self
        return AlgebraVector(tuple(float(x) for x in self.coords), "float")


def vector(coords: Iterable, flavor: str | None = None) -> AlgebraVector:
    """Build an AlgebraVector, inferring the flavor from the entries."""
    coords = tuple(coords)
    if flavor is None:
        flavor = "float" if any(isinstance(x, float) for x in coords) else "exact"
    if flavor == "exact":
        coords = tuple(Fraction(x) for x in coords)
    else:
        coords = tuple(float(x) for x in coords)
    return AlgebraVector(coords, flavor)


def zero_vector(dim: int, flavor: str = "exact") -> AlgebraVector:
    z = Fraction(0) if flavor == "exact" else 0.0
    return AlgebraVector((z,) * dim, flavor)


def basis_vector(i: int, dim: int, flavor: str = "exact") -> AlgebraVector:
    """Basis vector X_{i+1} (0-based index i)."""
    one = Fraction(1) if flavor == "exact" else 1.0
    zero = Fraction(0) if flavor == "exact" else 0.0
    return AlgebraVector(tuple(one if j == i else zero for j in range(dim)), flavor)


def _add(a: AlgebraVector, b: AlgebraVector) -> AlgebraVector:
    return AlgebraVector(tuple(x + y for x, y in zip(a.coords, b.coords)), a.flavor)


def _scale(c, a: AlgebraVector) -> AlgebraVector:
    return AlgebraVector(tuple(c * x for x in a.coords), a.flavor)


def _check_pair(x: AlgebraVector, y: AlgebraVector, alg: "LieAlgebraSpec"):
    if len(x) != alg.dim or len(y) != alg.dim:
        raise ValueError(f"dimension mismatch: algebra dim {alg.dim}")
    if x.flavor != y.flavor:
        raise ValueError("mixed exact/float flavors")


# ---------------------------------------------------------------------------
# algebra spec
# ---------------------------------------------------------------------------


class LieAlgebraSpec:
    """Nilpotent Lie algebra with rational structure constants.

    ``brackets`` maps a 0-based pair (i, j) with i < j to the coordinate
    tuple of [X_{i+1}, X_{j+1}]; omitted pairs commute.  Antisymmetry is
    built in, the Jacobi identity and nilpotency (descending central series
    reaching zero within ``declared_class`` steps) are verified exactly at
    construction.
    """

    def __init__(
        self,
        dim: int,
        brackets: Mapping[tuple[int, int], Sequence],
        declared_class: int,
        name: str = "",
        validate: bool = True,
    ):
        if dim < 1:
            raise ValueError("dim must be positive")
        if declared_class < 1:
            raise ValueError("declared_class must be positive")
        self.dim = dim
        self.declared_class = declared_class
        self.name = name
        table: dict[tuple[int, int], tuple[Fraction, ...]] = {}
        for (i, j), coeffs in brackets.items():
            if not (0 <= i < j < dim):
                raise ValueError(f"bad bracket pair ({i}, {j}); need 0 <= i < j < dim")
            row = tuple(Fraction(c) for c in coeffs)
            if len(row) != dim:
                raise ValueError("bracket coefficient vector has wrong length")
            if any(row):
                table[(i, j)] = row
        self.brackets = table
        # sparse form used by the bracket hot path: (i, j, [(k, c), ...])
        self._sparse = [
            (i, j, tuple((k, c) for k, c in enumerate(row) if c != 0))
            for (i, j), row in sorted(table.items())
        ]
        self._sparse_float = [
            (i, j, tuple((k, float(c)) for k, c in row)) for i, j, row in self._sparse
        ]
        if validate:
            self._validate_jacobi()
        self.series = central_series(self)
        self.nilpotency_class = len(self.series.dims) - 1
        if validate and self.nilpotency_class > declared_class:
            raise ValueError(
                f"central series needs {self.nilpotency_class} steps, "
                f"declared_class is {declared_class}"
            )

    # -- validation ---------------------------------------------------------

    def _validate_jacobi(self):
        n = self.dim
        for i, j, k in itertools.combinations(range(n), 3):
            xi, xj, xk = (basis_vector(t, n) for t in (i, j, k))
            total = _add(
                _add(
                    bracket(xi, bracket(xj, xk, self), self),
                    bracket(xj, bracket(xk, xi, self), self),
                ),
                bracket(xk, bracket(xi, xj, self), self),
            )
            if not total.is_zero():
                raise ValueError(f"Jacobi identity fails on (X_{i+1}, X_{j+1}, X_{k+1})")

    def jacobi_residual(self) -> Fraction:
        """Max |coordinate| of the Jacobi cyclic sum over all basis triples."""
        n = self.dim
        worst = Fraction(0)
        for i, j, k in itertools.combinations(range(n), 3):
            xi, xj, xk = (basis_vector(t, n) for t in (i, j, k))
            total = _add(
                _add(
                    bracket(xi, bracket(xj, xk, self), self),
                    bracket(xj, bracket(xk, xi, self), self),
                ),
                bracket(xk, bracket(xi, xj, self), self),
            )
            worst = max(worst, *(abs(c) for c in total.coords))
        return worst

    # -- misc ----------------------------------------------------------------

    @property
    def level_sizes(self) -> list[int]:
        """Dimensions d_i of the central-series quotients g^(i)/g^(i+1)."""
        dims = self.series.dims
        return [dims[i] - dims[i + 1] for i in range(len(dims) - 1)]

    def level_start(self, i: int) -> int:
        """First basis index of g^(i+1) when the basis is adapted (see
        ``is_adapted_basis``); equals dim - dim(g^(i+1))."""
        return self.dim - self.series.dims[i + 1] if i + 1 < len(self.series.dims) else self.dim

    def is_adapted_basis(self) -> bool:
        """True iff each g^(i) is spanned by a suffix X_{l+1}..X_n of the basis."""
        for i, sub in enumerate(self.series.subspaces):
            d = self.series.dims[i]
            want = [
                tuple(
                    Fraction(1 if c == self.dim - d + r else 0) for c in range(self.dim)
                )
                for r in range(d)
            ]
            if list(sub) != want:
                return False
        return True

    def __repr__(self):
        label = self.name or f"dim{self.dim}"
        return f"LieAlgebraSpec({label}, class {self.nilpotency_class})"


# ---------------------------------------------------------------------------
# bracket and central series
# ---------------------------------------------------------------------------


def bracket(x: AlgebraVector, y: AlgebraVector, alg: LieAlgebraSpec) -> AlgebraVector:
    """[x, y] by bilinear extension of the structure constants."""
    _check_pair(x, y, alg)
    exact = x.flavor == "exact"
    out = [Fraction(0)] * alg.dim if exact else [0.0] * alg.dim
    xc, yc = x.coords, y.coords
    table = alg._sparse if exact else alg._sparse_float
    for i, j, row in table:
        t = xc[i] * yc[j] - xc[j] * yc[i]
        if t:
            for k, c in row:
                out[k] += t * c
    return AlgebraVector(tuple(out), x.flavor)


@dataclass(frozen=True)
class SubspaceChain:
    """Strictly decreasing chain of subspaces in canonical echelon form."""

    subspaces: tuple[tuple[linalg.Row, ...], ...]  # g^(1), g^(2), ..., ending at ()
    @property
    def dims(self) -> list[int]:
        return [len(s) for s in self.subspaces]


def central_series(alg: LieAlgebraSpec) -> SubspaceChain:
    """Descending central series g = g^(1) > g^(2) > ... > 0,
    g^(i+1) = [g, g^(i)], computed on exact echelon bases."""
    n = alg.dim
    full = [tuple(Fraction(1 if j == i else 0) for j in range(n)) for i in range(n)]
    chain = [tuple(full)]
    current = full
    for _ in range(n + 1):
        if not current:
            break
        products = []
        for i in range(n):
            xi = basis_vector(i, n)
            for row in current:
                v = bracket(xi, AlgebraVector(tuple(row), "exact"), alg)
                if not v.is_zero():
                    products.append(v.coords)
        nxt = linalg.span_basis(products)
        if len(nxt) >= len(current):
            raise ValueError("central series does not decrease; algebra not nilpotent")
        chain.append(tuple(nxt))
        current = nxt
    if current:
        raise ValueError("central series failed to reach zero")
    return SubspaceChain(tuple(chain))


def kfold_product(
    indices: Sequence[int], S: Sequence[AlgebraVector], alg: LieAlgebraSpec
) -> AlgebraVector:
    """Right-nested product [X_{i1}, [X_{i2}, ... [X_{i_{m-1}}, X_{im}] ...]].

    ``indices`` are 1-based positions into S.
    """
    if len(indices) < 2:
        raise ValueError("need at least two indices")
    for i in indices:
        if not 1 <= i <= len(S):
            raise ValueError(f"index {i} out of range 1..{len(S)}")
    out = S[indices[-1] - 1]
    for i in reversed(indices[:-1]):
        out = bracket(S[i - 1], out, alg)
    return out


def minimal_generators_check(S: Sequence[AlgebraVector], alg: LieAlgebraSpec) -> bool:
    """True iff the images of S in g/[g,g] form a basis of that quotient."""
    g2 = alg.series.subspaces[1] if len(alg.series.subspaces) > 1 else ()
    d1 = alg.dim - len(g2)
    if len(S) != d1:
        return False
    rows = [tuple(r) for r in g2] + [tuple(Fraction(c) for c in v.coords) for v in S]
    return linalg.rank(rows) == len(g2) + d1


def vk_span(
    S: Sequence[AlgebraVector], k: int, alg: LieAlgebraSpec
) -> tuple[list[linalg.Row], bool]:
    """Span V_k(S) of all k-fold products of S, and whether it equals g^(k)."""
    if not minimal_generators_check(S, alg):
        raise ValueError("S is not a minimal generating set")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        span = linalg.span_basis([v.coords for v in S])
    else:
        prods = []
        for idx in itertools.product(range(1, len(S) + 1), repeat=k):
            v = kfold_product(idx, S, alg)
            if not v.is_zero():
                prods.append(v.coords)
        span = linalg.span_basis(prods)
    gk = (
        list(alg.series.subspaces[k - 1])
        if k - 1 < len(alg.series.subspaces)
        else []
    )
    return span, span == gk


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivationSpec:
    """n x n rational matrix acting on basis coordinates."""

    matrix: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_rows(rows: Iterable[Iterable]) -> "DerivationSpec":
        mat = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if any(len(r) != len(mat) for r in mat):
            raise ValueError("derivation matrix must be square")
        return DerivationSpec(mat)

    @staticmethod
    def zero(n: int) -> "DerivationSpec":
        return DerivationSpec.from_rows(
            [[0] * n for _ in range(n)]
        )

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def apply(self, v: AlgebraVector) -> AlgebraVector:
        mat = self.matrix
        if v.flavor == "float":
            rows = [tuple(float(x) for x in r) for r in mat]
            return AlgebraVector(
                tuple(sum(r[j] * v.coords[j] for j in range(len(r))) for r in rows),
                "float",
            )
        return AlgebraVector(linalg.mat_vec(mat, v.coords), "exact")

    def is_nilpotent(self) -> bool:
        power = self.matrix
        for _ in range(self.dim):
            if all(all(x == 0 for x in row) for row in power):
                return True
            power = tuple(linalg.mat_mul(power, self.matrix))
        return all(all(x == 0 for x in row) for row in power)


def leibniz_witness(B: DerivationSpec, alg: LieAlgebraSpec) -> tuple[int, int] | None:
    """First basis pair violating B([X,Y]) = [BX,Y] + [X,BY], or None."""
    if B.dim != alg.dim:
        raise ValueError("derivation size must match algebra dimension")
    n = alg.dim
    for i in range(n):
        for j in range(i + 1, n):
            xi, xj = basis_vector(i, n), basis_vector(j, n)
            lhs = B.apply(bracket(xi, xj, alg))
            rhs = _add(bracket(B.apply(xi), xj, alg), bracket(xi, B.apply(xj), alg))
            if not _add(lhs, _scale(Fraction(-1), rhs)).is_zero():
                return (i, j)
    return None


def is_derivation(B: DerivationSpec, alg: LieAlgebraSpec) -> bool:
    return leibniz_witness(B, alg) is None and B.is_nilpotent()


def validate_derivation(B: DerivationSpec, alg: LieAlgebraSpec) -> None:
    w = leibniz_witness(B, alg)
    if w is not None:
        raise LeibnizError(w)
    if not B.is_nilpotent():
        raise ValueError("derivation matrix is not nilpotent")


def exp_derivation(B: DerivationSpec, t) -> tuple[tuple, ...]:
    """exp(tB) as the finite sum sum_{j<n} (tB)^j / j!.

    Exact when t is a Fraction (or int); float matrix for float t.
    """
    n = B.dim
    exact = not isinstance(t, float)
    if exact:
        t = Fraction(t)
        mat = B.matrix
        acc = linalg.identity(n)
        out = [list(r) for r in linalg.identity(n)]
    else:
        mat = tuple(tuple(float(x) for x in row) for row in B.matrix)
        acc = [tuple(1.0 if i == j else 0.0 for j in range(n)) for i in range(n)]
        out = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    fact = 1
    for j in range(1, n):
        # acc <- acc @ (tB)
        acc = [
            tuple(
                sum(acc[i][l] * t * mat[l][m] for l in range(n))
                for m in range(n)
            )
            for i in range(n)
        ]
        fact *= j
        for i in range(n):
            for m in range(n):
                out[i][m] += acc[i][m] / fact if not exact else acc[i][m] * Fraction(1, fact)
    return tuple(tuple(r) for r in out)


# ---------------------------------------------------------------------------
# BCH / Dynkin
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def dynkin_terms(depth: int) -> tuple[tuple[Fraction, tuple[int, ...]], ...]:
    """Dynkin expansion of log(exp a . exp b) up to bracket depth ``depth``.

    Returns (coefficient, word) pairs where ``word`` is a 0/1 string (0 = a,
    1 = b) evaluated as the right-nested bracket of its letters.  Words whose
    evaluation vanishes identically (repeated final letter) are dropped and
    coefficients of identical words are merged.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth > _MAX_BCH_CLASS:
        raise ValueError(f"nilpotency class > {_MAX_BCH_CLASS} not supported")
    acc: dict[tuple[int, ...], Fraction] = {}

    def compositions(total: int, blocks: int):
        # sequences of (r_i, s_i), each pair nonzero, summing to total
        if blocks == 0:
            if total == 0:
                yield ()
            return
        for head_total in range(1, total - blocks + 2):
            for r in range(head_total + 1):
                s = head_total - r
                for rest in compositions(total - head_total, blocks - 1):
                    yield ((r, s),) + rest

    for m in range(1, depth + 1):
        for nblocks in range(1, m + 1):
            for pairs in compositions(m, nblocks):
                word: list[int] = []
                denom = 1
                for r, s in pairs:
                    word.extend([0] * r)
                    word.extend([1] * s)
                    denom *= math.factorial(r) * math.factorial(s)
                if len(word) >= 2 and word[-1] == word[-2]:
                    continue  # innermost bracket [x, x] = 0
                coeff = Fraction((-1) ** (nblocks - 1), nblocks) / (m * denom)
                key = tuple(word)
                acc[key] = acc.get(key, Fraction(0)) + coeff
    return tuple(
        (c, w) for w, c in sorted(acc.items(), key=lambda kv: (len(kv[0]), kv[0])) if c != 0
    )


def bch_product(
    a: AlgebraVector, b: AlgebraVector, alg: LieAlgebraSpec
) -> AlgebraVector:
    """log(exp a . exp b) via the Dynkin series truncated at the algebra class."""
    _check_pair(a, b, alg)
    depth = max(alg.nilpotency_class, 1)
    exact = a.flavor == "exact"
    out = [Fraction(0)] * alg.dim if exact else [0.0] * alg.dim
    letters = (a, b)
    suffix_cache: dict[tuple[int, ...], AlgebraVector] = {}

    def eval_word(word: tuple[int, ...]) -> AlgebraVector:
        cached = suffix_cache.get(word)
        if cached is not None:
            return cached
        if len(word) == 1:
            v = letters[word[0]]
        else:
            v = bracket(letters[word[0]], eval_word(word[1:]), alg)
        suffix_cache[word] = v
        return v

    for coeff, word in dynkin_terms(depth):
        if len(word) > depth:
            continue
        v = eval_word(word)
        if v.is_zero():
            continue
        c = coeff if exact else float(coeff)
        for k in range(alg.dim):
            out[k] += c * v.coords[k]
    return AlgebraVector(tuple(out), a.flavor)


def bch_inverse(a: AlgebraVector) -> AlgebraVector:
    """exp(a)^{-1} = exp(-a)."""
    minus = Fraction(-1) if a.flavor == "exact" else -1.0
    return _scale(minus, a)


# ---------------------------------------------------------------------------
# coordinates of the first and second kind
# ---------------------------------------------------------------------------


def require_adapted(alg: LieAlgebraSpec) -> None:
    if not alg.is_adapted_basis():
        raise ValueError(
            "basis is not adapted to the descending central series; "
            "second-kind coordinates are undefined"
        )


def coords_first_to_second(a: AlgebraVector, alg: LieAlgebraSpec) -> AlgebraVector:
    """t with exp(a) = exp(t_1 X_1) ... exp(t_n X_n), peeled left to right."""
    require_adapted(alg)
    n = alg.dim
    cur = a
    out = []
    for i in range(n):
        t = cur.coords[i]
        out.append(t)
        if i < n - 1:
            minus = -t
            cur = bch_product(_scale_basis(i, minus, n, a.flavor), cur, alg)
    return AlgebraVector(tuple(out), a.flavor)


def coords_second_to_first(t: AlgebraVector, alg: LieAlgebraSpec) -> AlgebraVector:
    """Inverse of coords_first_to_second: fold exp(t_i X_i) right to left."""
    require_adapted(alg)
    n = alg.dim
    cur = _scale_basis(n - 1, t.coords[n - 1], n, t.flavor)
    for i in range(n - 2, -1, -1):
        cur = bch_product(_scale_basis(i, t.coords[i], n, t.flavor), cur, alg)
    return cur


def _scale_basis(i: int, c, n: int, flavor: str) -> AlgebraVector:
    zero = Fraction(0) if flavor == "exact" else 0.0
    coords = [zero] * n
    if isinstance(c, (int, Fraction)):
        coords[i] = Fraction(c) if flavor == "exact" else float(c)
    elif isinstance(c, float):
        coords[i] = c
    else:
        coords[i] = c  # symbolic coefficient (e.g. Poly) passes through
    return AlgebraVector(tuple(coords), flavor)


# ---------------------------------------------------------------------------
# bundled algebras
# ---------------------------------------------------------------------------


def abelian(n: int) -> LieAlgebraSpec:
    return LieAlgebraSpec(n, {}, 1, name=f"abelian{n}")


def heisenberg() -> LieAlgebraSpec:
    """[X1, X2] = X3."""
    return LieAlgebraSpec(3, {(0, 1): (0, 0, 1)}, 2, name="heisenberg")


def free_class3() -> LieAlgebraSpec:
    """Free 2-generator algebra of class 3:
    [X1,X2] = X3, [X1,X3] = 2*X4, [X2,X3] = 2*X5.

    The depth-3 generators are scaled by 1/2 relative to the plain
    commutator basis; with unit constants the integer-coordinate products
    do not close (exp(X2)exp(X1) picks up half-integer coordinates), so
    the basis would not be strongly based at any lattice.
    """
    return LieAlgebraSpec(
        5,
        {
            (0, 1): (0, 0, 1, 0, 0),
            (0, 2): (0, 0, 0, 2, 0),
            (1, 2): (0, 0, 0, 0, 2),
        },
        3,
        name="free_class3",
    )


# ---------------------------------------------------------------------------
# plain-text schema
# ---------------------------------------------------------------------------


def dump_algebra(alg: LieAlgebraSpec) -> str:
    """Serialize to the plain-text schema.

    Line oriented: ``dim N``, ``class K``, then one line per nonzero
    structure constant ``c i j k p/q`` (1-based indices, [X_i, X_j] has
    coefficient p/q on X_k).  Rationals round-trip bit exactly.
    """
    lines = [f"dim {alg.dim}", f"class {alg.declared_class}"]
    if alg.name:
        lines.insert(0, f"# algebra {alg.name}")
    for (i, j), row in sorted(alg.brackets.items()):
        for k, c in enumerate(row):
            if c != 0:
                lines.append(f"c {i+1} {j+1} {k+1} {c}")
    return "\n".join(lines) + "\n"


def load_algebra(text: str, name: str = "") -> LieAlgebraSpec:
    """Parse the plain-text schema produced by :func:`dump_algebra`."""
    dim = None
    declared = None
    brackets: dict[tuple[int, int], list[Fraction]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "dim":
            dim = int(parts[1])
        elif parts[0] == "class":
            declared = int(parts[1])
        elif parts[0] == "c":
            if dim is None:
                raise ValueError(f"line {lineno}: structure constant before dim")
            i, j, k = (int(p) - 1 for p in parts[1:4])
            val = Fraction(parts[4])
            if not (0 <= i < j < dim):
                raise ValueError(f"line {lineno}: need 1 <= i < j <= dim")
            row = brackets.setdefault((i, j), [Fraction(0)] * dim)
            row[k] = val
        else:
            raise ValueError(f"line {lineno}: unknown directive {parts[0]!r}")
    if dim is None or declared is None:
        raise ValueError("schema must declare dim and class")
    return LieAlgebraSpec(dim, brackets, declared, name=name)
