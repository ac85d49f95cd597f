"""Lattices in nilpotent Lie groups and the compact quotients they define.

A lattice is declared through a basis that is strongly based at it: the
lattice consists exactly of the products exp(n_1 X_1)...exp(n_n X_n) with
integer n_i.  Construction verifies this exactly (closure of generator
products and inverses in integer second-kind coordinates) and verifies that
the basis is adapted to the descending central series, which is what makes
second-kind coordinates triangular and reduction terminate.

Points of G are carried in first-kind (exponential) coordinates; the
canonical coset representative has second-kind coordinates in [0,1)^n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import liealg
from .liealg import (
    AlgebraVector,
    DerivationSpec,
    LieAlgebraSpec,
    bch_product,
    coords_first_to_second,
    coords_second_to_first,
    exp_derivation,
    vector,
)


class LatticeSpec:
    """Lattice strongly based at the designated basis of ``algebra``."""

    def __init__(self, algebra: LieAlgebraSpec, name: str = "", validate: bool = True):
        self.algebra = algebra
        self.name = name or algebra.name
        self._quotients: dict[int, "LatticeSpec"] = {}
        liealg.require_adapted(algebra)
        if validate:
            self._validate_closure()

    def _validate_closure(self):
        n = self.algebra.dim
        gens = [liealg.basis_vector(i, n) for i in range(n)]
        for i in range(n):
            for j in range(n):
                for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                    prod = bch_product(
                        liealg._scale(Fraction(si), gens[i]),
                        liealg._scale(Fraction(sj), gens[j]),
                        self.algebra,
                    )
                    t = coords_first_to_second(prod, self.algebra)
                    if not all(x.denominator == 1 for x in t.coords):
                        raise ValueError(
                            f"lattice closure fails: exp({si}X_{i+1})exp({sj}X_{j+1}) "
                            f"has non-integer second-kind coordinates {t.coords}"
                        )

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def torus_rank(self) -> int:
        """Dimension d_1 of the maximal torus factor G/[G,G]Gamma."""
        return self.algebra.dim - self.algebra.series.dims[1]

    def __repr__(self):
        return f"LatticeSpec({self.name or self.algebra!r})"


@dataclass(frozen=True)
class GroupPoint:
    """Group element in first-kind coordinates, tied to a lattice context."""

    lattice: LatticeSpec
    coords: AlgebraVector

    @property
    def flavor(self) -> str:
        return self.coords.flavor

    def to_float(self) -> "GroupPoint":
        return GroupPoint(self.lattice, self.coords.to_float())


def point(lattice: LatticeSpec, coords, flavor: str | None = None) -> GroupPoint:
    v = vector(coords, flavor)
    if len(v) != lattice.dim:
        raise ValueError("coordinate length does not match lattice dimension")
    return GroupPoint(lattice, v)


def point_from_second_kind(lattice: LatticeSpec, t, flavor: str | None = None) -> GroupPoint:
    v = vector(t, flavor)
    return GroupPoint(lattice, coords_second_to_first(v, lattice.algebra))


def identity_point(lattice: LatticeSpec, flavor: str = "exact") -> GroupPoint:
    return GroupPoint(lattice, liealg.zero_vector(lattice.dim, flavor))


def second_kind(g: GroupPoint) -> AlgebraVector:
    return coords_first_to_second(g.coords, g.lattice.algebra)


def group_mul(g: GroupPoint, h: GroupPoint) -> GroupPoint:
    if g.lattice is not h.lattice:
        raise ValueError("points live on different lattices")
    return GroupPoint(g.lattice, bch_product(g.coords, h.coords, g.lattice.algebra))


def group_inv(g: GroupPoint) -> GroupPoint:
    return GroupPoint(g.lattice, liealg.bch_inverse(g.coords))


def _floor(x):
    return math.floor(x)


def reduce(g: GroupPoint) -> GroupPoint:
    """Canonical coset representative of g*Gamma.

    Right-multiplies by integer powers of exp(X_i), fixing second-kind
    coordinates into [0,1) from the first coordinate to the last; by
    triangularity each fix only perturbs later coordinates, so one pass
    suffices and the result is idempotent (exactly so in exact flavor).
    """
    alg = g.lattice.algebra
    n = alg.dim
    cur = g.coords
    for i in range(n):
        t = coords_first_to_second(cur, alg)
        m = _floor(t.coords[i])
        if m != 0:
            cur = bch_product(cur, liealg._scale_basis(i, -m, n, cur.flavor), alg)
    return GroupPoint(g.lattice, cur)


def lattice_member(g: GroupPoint) -> bool:
    """True iff g lies in the lattice; requires exact flavor."""
    if g.flavor != "exact":
        raise ValueError("lattice membership requires exact coordinates")
    t = second_kind(g)
    return all(x.denominator == 1 for x in t.coords)


# ---------------------------------------------------------------------------
# fibrations and the torus factor
# ---------------------------------------------------------------------------


def quotient_lattice(lattice: LatticeSpec, level: int) -> LatticeSpec:
    """Lattice of the quotient nilmanifold M^(level) = G/G^(level+1)Gamma."""
    k = lattice.algebra.nilpotency_class
    if not 1 <= level < max(k, 2):
        raise ValueError(f"fibration level must satisfy 1 <= level < class ({k})")
    cached = lattice._quotients.get(level)
    if cached is not None:
        return cached
    alg = lattice.algebra
    q = alg.dim - alg.series.dims[level]  # codim of g^(level+1)
    brackets = {}
    for (i, j), row in alg.brackets.items():
        if i < q and j < q and any(row[:q]):
            brackets[(i, j)] = row[:q]
    qalg = LieAlgebraSpec(
        q, brackets, max(level, 1), name=f"{alg.name or 'g'}/level{level}"
    )
    qlat = LatticeSpec(qalg, name=f"{lattice.name}^({level})")
    lattice._quotients[level] = qlat
    return qlat


def project_fibration(g: GroupPoint, level: int) -> GroupPoint:
    """Image of g in M^(level); coordinate truncation, then reduction."""
    qlat = quotient_lattice(g.lattice, level)
    proj = AlgebraVector(g.coords.coords[: qlat.dim], g.flavor)
    return reduce(GroupPoint(qlat, proj))


def abelianization(g: GroupPoint) -> GroupPoint:
    """Image of g on the torus factor M^(1) (g itself if G is abelian)."""
    if g.lattice.algebra.nilpotency_class <= 1:
        return reduce(g)
    return project_fibration(g, 1)


def rotation_vector(u: GroupPoint) -> tuple[float, ...]:
    """Rotation vector of the translation by u on the torus factor, mod 1."""
    d1 = u.lattice.torus_rank
    return tuple(float(c) % 1.0 for c in u.coords.coords[:d1])


# ---------------------------------------------------------------------------
# bounded search for rational relations among rotation coordinates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of a bounded integer-relation search.

    status is "certified" (no relation |q_0 + q.alpha| < tol with
    0 < max|q_i| <= Q exists), "refuted" (witness found), or "unknown"
    (tol below float resolution for the requested bound).  A certificate
    never claims more than the search performed.
    """

    status: str
    Q: int
    tol: float
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.status == "certified"


def ergodicity_certificate(
    alpha: Sequence[float], Q: int, tol: float = 1e-9
) -> Certificate:
    """Search for integer relations q_0 + q_1 a_1 + ... + q_d a_d = 0.

    Exhausts 0 < max|q_i| <= Q; the witness, when found, is (q_0, q_1, ..,
    q_d) normalized so its first nonzero entry among q_1.. is positive.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    a = [float(x) for x in alpha]
    d = len(a)
    resolution = 16 * 2.0**-52 * Q * max(1.0, max((abs(x) for x in a), default=0.0)) * max(d, 1)
    if tol <= resolution:
        return Certificate("unknown", Q, tol)
    for norm in range(1, Q + 1):
        for q in itertools.product(range(-norm, norm + 1), repeat=d):
            if max((abs(x) for x in q), default=0) != norm:
                continue
            first = next((x for x in q if x != 0), 0)
            if first < 0:
                continue
            v = sum(qi * ai for qi, ai in zip(q, a))
            q0 = -round(v)
            if abs(v + q0) < tol:
                return Certificate("refuted", Q, tol, witness=(q0, *q))
    return Certificate("certified", Q, tol)


# ---------------------------------------------------------------------------
# lattice-preserving unipotent automorphisms
# ---------------------------------------------------------------------------


class AutomorphismSpec:
    """A = exp(B) for a nilpotent derivation B with A(Gamma) = Gamma."""

    def __init__(self, lattice: LatticeSpec, B: DerivationSpec):
        liealg.validate_derivation(B, lattice.algebra)
        self.lattice = lattice
        self.B = B
        self.matrix = exp_derivation(B, Fraction(1))
        self.inverse_matrix = exp_derivation(B, Fraction(-1))
        for mat, tag in ((self.matrix, "A"), (self.inverse_matrix, "A^-1")):
            for i in range(lattice.dim):
                img = vector([row[i] for row in mat])
                if not lattice_member(GroupPoint(lattice, img)):
                    raise ValueError(f"{tag} does not preserve the lattice (generator X_{i+1})")

    def apply(self, g: GroupPoint) -> GroupPoint:
        return GroupPoint(g.lattice, _mat_apply(self.matrix, g.coords))

    def apply_inverse(self, g: GroupPoint) -> GroupPoint:
        return GroupPoint(g.lattice, _mat_apply(self.inverse_matrix, g.coords))


def _mat_apply(mat, v: AlgebraVector) -> AlgebraVector:
    n = len(v)
    if v.flavor == "float":
        return AlgebraVector(
            tuple(
                sum(float(mat[i][j]) * v.coords[j] for j in range(n)) for i in range(n)
            ),
            "float",
        )
    return AlgebraVector(
        tuple(sum((mat[i][j] * v.coords[j] for j in range(n)), Fraction(0)) for i in range(n)),
        "exact",
    )


# ---------------------------------------------------------------------------
# suspension construction
# ---------------------------------------------------------------------------


class SuspensionContext:
    """Extended group G~ = G x| {exp tB} with its lattice Gamma~ = Gamma x| Z.

    The extended algebra has one new basis vector D (the log of the
    automorphism) with [D, X] = B(X); the extended basis is ordered so it
    stays adapted to the central series, which may permute the base basis.
    ``base_order`` records that permutation: extended coordinate 1 + k holds
    base coordinate base_order[k].
    """

    def __init__(
        self,
        base: LatticeSpec,
        B: DerivationSpec,
        extended: LatticeSpec,
        base_order: tuple[int, ...],
    ):
        self.base = base
        self.B = B
        self.extended = extended
        self.base_order = base_order

    @property
    def dim(self) -> int:
        return self.extended.dim

    def embed_vector(self, v: AlgebraVector, t=None) -> AlgebraVector:
        """Algebra vector of g~ with fiber component t (default 0)."""
        zero = Fraction(0) if v.flavor == "exact" else 0.0
        tval = zero if t is None else (Fraction(t) if v.flavor == "exact" else float(t))
        coords = [tval] + [v.coords[i] for i in self.base_order]
        return AlgebraVector(tuple(coords), v.flavor)

    def embed(self, g: GroupPoint) -> GroupPoint:
        if g.lattice is not self.base:
            raise ValueError("point does not live on the base lattice")
        return GroupPoint(self.extended, self.embed_vector(g.coords))

    def restrict_vector(self, v: AlgebraVector) -> AlgebraVector:
        """Base coordinates of an extended vector with zero fiber component."""
        out = [None] * len(self.base_order)
        for slot, base_idx in enumerate(self.base_order):
            out[base_idx] = v.coords[1 + slot]
        return AlgebraVector(tuple(out), v.flavor)

    def fiber_coordinate(self, g: GroupPoint) -> float:
        """Projection G~/Gamma~ -> R/Z reading off the flow time."""
        t = coords_first_to_second(g.coords, self.extended.algebra)
        return float(t.coords[0]) % 1.0


def build_suspension(lat: LatticeSpec, B: DerivationSpec) -> SuspensionContext:
    """Assemble the suspension algebra/lattice for the automorphism exp(B).

    Searches basis orderings of the base (identity first, then
    lexicographic) for one making the extended basis adapted; raises if
    none works for this algebra.
    """
    AutomorphismSpec(lat, B)  # full validation of B
    n = lat.dim
    alg = lat.algebra
    orders = itertools.chain(
        [tuple(range(n))],
        (p for p in itertools.permutations(range(n)) if p != tuple(range(n))),
    )
    last_err: Exception | None = None
    for order in orders:
        try:
            pos = {base_idx: 1 + slot for slot, base_idx in enumerate(order)}
            brackets: dict[tuple[int, int], list[Fraction]] = {}

            def put(i: int, j: int, coeffs_base: Sequence[Fraction]):
                row = [Fraction(0)] * (n + 1)
                for base_idx, c in enumerate(coeffs_base):
                    row[pos[base_idx]] = Fraction(c)
                if not any(row):
                    return
                if i < j:
                    brackets[(i, j)] = row
                else:
                    brackets[(j, i)] = [-c for c in row]

            for slot, base_idx in enumerate(order):
                col = [B.matrix[r][base_idx] for r in range(n)]
                put(0, 1 + slot, col)
            for (i, j), row in alg.brackets.items():
                put(pos[i], pos[j], row)
            ext_alg = LieAlgebraSpec(
                n + 1,
                brackets,
                alg.nilpotency_class + 1,
                name=f"susp({alg.name or 'g'})",
            )
            if not ext_alg.is_adapted_basis():
                raise ValueError("extension basis not adapted")
            ext = LatticeSpec(ext_alg, name=f"susp({lat.name})")
            return SuspensionContext(lat, B, ext, order)
        except ValueError as err:
            last_err = err
    raise ValueError(f"no adapted basis ordering found for suspension: {last_err}")
