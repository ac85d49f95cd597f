import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilorth import liealg as la
from nilorth import nilmanifold as nm
from nilorth import systems


# ---------------------------------------------------------------------------
# reduction and membership
# ---------------------------------------------------------------------------


def test_reduce_example(heis):
    g = nm.point_from_second_kind(heis, [Fraction(3, 2), 0, Fraction(1, 4)])
    assert nm.second_kind(nm.reduce(g)).coords == (Fraction(1, 2), 0, Fraction(1, 4))


def test_reduce_lattice_point_to_origin(heis):
    g = nm.point_from_second_kind(heis, [4, -2, 7])
    assert nm.second_kind(nm.reduce(g)).is_zero()


def test_reduce_idempotent_random(heis, rng):
    for _ in range(50):
        t = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)]
        g = nm.point_from_second_kind(heis, t)
        once = nm.reduce(g)
        twice = nm.reduce(once)
        assert nm.second_kind(once).coords == nm.second_kind(twice).coords
        assert all(0 <= c < 1 for c in nm.second_kind(once).coords)


def test_reduce_right_coset_invariance(free3, rng):
    gens = [nm.point_from_second_kind(free3, [1 if i == j else 0 for j in range(5)])
            for i in range(5)]
    for _ in range(25):
        t = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(5)]
        g = nm.point_from_second_kind(free3, t)
        base = nm.second_kind(nm.reduce(g)).coords
        for gen in gens:
            moved = nm.reduce(nm.group_mul(g, gen))
            assert nm.second_kind(moved).coords == base


def test_left_action_well_defined(heis, rng):
    for _ in range(30):
        t = [Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(3)]
        u = [Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(3)]
        g = nm.point_from_second_kind(heis, t)
        up = nm.point_from_second_kind(heis, u)
        lhs = nm.reduce(nm.group_mul(up, g))
        rhs = nm.reduce(nm.group_mul(up, nm.reduce(g)))
        assert nm.second_kind(lhs).coords == nm.second_kind(rhs).coords


def test_lattice_member(heis):
    assert nm.lattice_member(nm.point_from_second_kind(heis, [2, -1, 3]))
    assert not nm.lattice_member(
        nm.point_from_second_kind(heis, [Fraction(1, 2), 0, 0])
    )


def test_lattice_member_closed_under_product(free3, rng):
    for _ in range(30):
        a = nm.point_from_second_kind(free3, [rng.randint(-5, 5) for _ in range(5)])
        b = nm.point_from_second_kind(free3, [rng.randint(-5, 5) for _ in range(5)])
        assert nm.lattice_member(nm.group_mul(a, b))
        assert nm.lattice_member(nm.group_inv(a))


def test_lattice_member_rejects_float(heis):
    g = nm.point(heis, [0.5, 0.0, 0.0])
    with pytest.raises(ValueError):
        nm.lattice_member(g)


# ---------------------------------------------------------------------------
# fibrations, abelianization, rotation vectors
# ---------------------------------------------------------------------------


def test_project_heisenberg_torus(heis):
    g = nm.point_from_second_kind(heis, [Fraction(5, 4), Fraction(7, 3), Fraction(9, 2)])
    p = nm.project_fibration(g, 1)
    assert nm.second_kind(p).coords == (Fraction(1, 4), Fraction(1, 3))


def test_project_identity(heis):
    p = nm.project_fibration(nm.identity_point(heis), 1)
    assert nm.second_kind(p).is_zero()


def test_project_equivariance(heis, rng):
    for _ in range(200):
        t = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(3)]
        u = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(3)]
        g = nm.point_from_second_kind(heis, t)
        up = nm.point_from_second_kind(heis, u)
        lhs = nm.project_fibration(nm.group_mul(up, g), 1)
        rhs = nm.reduce(
            nm.group_mul(nm.project_fibration(up, 1), nm.project_fibration(g, 1))
        )
        assert nm.second_kind(lhs).coords == nm.second_kind(rhs).coords


def test_project_levels_free3(free3):
    g = nm.point_from_second_kind(
        free3, [Fraction(1, 2), Fraction(1, 3), Fraction(9, 4), 5, Fraction(7, 6)]
    )
    p1 = nm.project_fibration(g, 1)
    assert len(p1.coords.coords) == 2
    p2 = nm.project_fibration(g, 2)
    assert len(p2.coords.coords) == 3
    with pytest.raises(ValueError):
        nm.project_fibration(g, 3)


def test_rotation_vector(heis):
    u = nm.point(heis, [math.sqrt(2), math.sqrt(3), 0.0])
    a = nm.rotation_vector(u)
    assert a == pytest.approx((math.sqrt(2) % 1, math.sqrt(3) % 1))
    lat_pt = nm.point_from_second_kind(heis, [3, -2, 5])
    assert nm.rotation_vector(lat_pt) == (0.0, 0.0)


def test_rotation_vector_homomorphism(heis):
    u = nm.point(heis, [0.31, 0.47, 0.11])
    uu = nm.group_mul(u, u)
    a, aa = nm.rotation_vector(u), nm.rotation_vector(uu)
    for x, y in zip(a, aa):
        assert abs((2 * x - y + 0.5) % 1.0 - 0.5) < 1e-12


# ---------------------------------------------------------------------------
# ergodicity certificates
# ---------------------------------------------------------------------------


def test_certificate_rational_refuted():
    cert = nm.ergodicity_certificate([0.5], 2)
    assert cert.status == "refuted" and cert.witness == (-1, 2)


def test_certificate_golden_certified():
    golden = (1 + math.sqrt(5)) / 2 % 1
    cert = nm.ergodicity_certificate([golden], 50, tol=1e-9)
    assert cert.status == "certified"
    assert bool(cert)


def test_certificate_linear_relation():
    a = (math.sqrt(2) % 1, (1 - math.sqrt(2)) % 1)
    cert = nm.ergodicity_certificate(a, 2)
    assert cert.status == "refuted" and cert.witness == (-1, 1, 1)


def test_certificate_unknown_when_tol_unresolvable():
    cert = nm.ergodicity_certificate([math.sqrt(2) % 1], 40, tol=1e-15)
    assert cert.status == "unknown"


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------


def test_automorphism_lattice_compatibility(heis, rng):
    A = nm.AutomorphismSpec(heis, systems.heisenberg_shear())
    for _ in range(40):
        g = nm.point_from_second_kind(heis, [rng.randint(-5, 5) for _ in range(3)])
        assert nm.lattice_member(A.apply(g))
        frac_pt = nm.point_from_second_kind(
            heis, [Fraction(rng.randint(-5, 5), 3) for _ in range(3)]
        )
        assert nm.lattice_member(frac_pt) == nm.lattice_member(A.apply(frac_pt))


def test_automorphism_rejects_incompatible(heis):
    # Leibniz-valid derivation that does not preserve the lattice
    B = la.DerivationSpec.from_rows([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(ValueError, match="lattice"):
        nm.AutomorphismSpec(heis, B)


# ---------------------------------------------------------------------------
# suspension construction
# ---------------------------------------------------------------------------


def test_suspension_of_plane_shear_is_heisenberg(torus2):
    B = la.DerivationSpec.from_rows([[0, 1], [0, 0]])
    susp = nm.build_suspension(torus2, B)
    alg = susp.extended.algebra
    assert alg.dim == 3
    assert alg.series.dims == [3, 1, 0]
    # single bracket [D, X2] = X1 up to the recorded basis order
    assert len(alg.brackets) == 1


def test_suspension_trivial_derivation_is_direct_product(heis):
    susp = nm.build_suspension(heis, la.DerivationSpec.zero(3))
    assert susp.extended.algebra.dim == 4
    assert susp.extended.algebra.nilpotency_class == heis.algebra.nilpotency_class


def test_suspension_heisenberg_shear_class3(heis):
    susp = nm.build_suspension(heis, systems.heisenberg_shear())
    assert susp.extended.algebra.series.dims == [4, 2, 1, 0]


def test_suspension_fiber_exact_sequence(heis_susp, rng):
    """The fiber coordinate is additive (quotient to R) and the lattice
    projects onto Z (integer fiber coordinates)."""
    susp = heis_susp
    for _ in range(20):
        s = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        t = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        v = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)]
        w = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)]
        g1 = nm.GroupPoint(susp.extended, susp.embed_vector(la.vector(v), s))
        g2 = nm.GroupPoint(susp.extended, susp.embed_vector(la.vector(w), t))
        prod = nm.group_mul(g1, g2)
        assert la.coords_first_to_second(prod.coords, susp.extended.algebra).coords[0] == s + t
    # lattice generators have integer fiber coordinate
    for i in range(susp.extended.dim):
        gen = nm.point_from_second_kind(susp.extended, [1 if j == i else 0 for j in range(4)])
        fib = la.coords_first_to_second(gen.coords, susp.extended.algebra).coords[0]
        assert fib.denominator == 1


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.fractions(min_value=-5, max_value=5, max_denominator=4),
        min_size=3,
        max_size=3,
    )
)
def test_reduce_idempotence_hypothesis(tvals):
    heis = systems.lattice("heisenberg")
    g = nm.point_from_second_kind(heis, tvals)
    once = nm.reduce(g)
    assert nm.second_kind(nm.reduce(once)).coords == nm.second_kind(once).coords
