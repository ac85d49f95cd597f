import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilorth import skewprod as sp

ALPHA = math.sqrt(2) % 1


def rotation_cocycle():
    return sp.Cocycle(
        step=lambda x: (x + ALPHA) % 1.0,
        phi=lambda x: x,
        group=sp.RealGroup(),
        inv_step=lambda x: (x - ALPHA) % 1.0,
    )


def exact_rotation_cocycle():
    a = Fraction(5, 17)
    return sp.Cocycle(
        step=lambda x: (x + a) % 1,
        phi=lambda x: x,
        group=sp.RealGroup(),
        inv_step=lambda x: (x - a) % 1,
    )


# ---------------------------------------------------------------------------
# cocycle sums
# ---------------------------------------------------------------------------


def test_sum_zero_steps():
    assert rotation_cocycle().sum(0.37, 0) == 0.0


def test_constant_cocycle_linear():
    c = sp.Cocycle(step=lambda x: x, phi=lambda x: 2.5, inv_step=lambda x: x)
    assert c.sum(0, 7) == pytest.approx(17.5)
    assert c.sum(0, -4) == pytest.approx(-10.0)


def test_cocycle_identity_random_mn(rng):
    c = exact_rotation_cocycle()
    for _ in range(150):
        m, n = rng.randint(-20, 20), rng.randint(-20, 20)
        x = Fraction(rng.randint(0, 16), 17)
        x_m = x
        if m >= 0:
            for _ in range(m):
                x_m = c.step(x_m)
        else:
            for _ in range(-m):
                x_m = c.inv_step(x_m)
        assert c.sum(x, m + n) == c.sum(x, m) + c.sum(x_m, n)


def test_negative_sum_requires_inverse():
    c = sp.Cocycle(step=lambda x: x + 1, phi=lambda x: 1.0)
    with pytest.raises(ValueError):
        c.sum(0, -1)


# ---------------------------------------------------------------------------
# group extensions
# ---------------------------------------------------------------------------


def test_extension_trivial_cocycle_is_product():
    c = sp.Cocycle(step=lambda x: (x + ALPHA) % 1.0, phi=lambda x: 0.0)
    ext = sp.GroupExtension(c)
    x, k = ext.step((0.2, 0.77))
    assert x == pytest.approx((0.2 + ALPHA) % 1.0)
    assert k == 0.77


def test_extension_circle_fiber_sum():
    c = sp.Cocycle(
        step=lambda x: (x + ALPHA) % 1.0, phi=lambda x: x, group=sp.TorusGroup(1)
    )
    ext = sp.GroupExtension(c)
    x0, k0 = 0.3, 0.1
    state = (x0, np.array([k0]))
    n = 25
    state = ext.iterate(state, n)
    expect = (k0 + sum((x0 + j * ALPHA) % 1.0 for j in range(n))) % 1.0
    assert state[1][0] == pytest.approx(expect)


def test_extension_iterates_match_cocycle_sums_exactly():
    c = exact_rotation_cocycle()
    ext = sp.GroupExtension(c)
    x0, k0 = Fraction(3, 17), Fraction(0)
    state = (x0, k0)
    for n in range(1, 101):
        state = ext.step(state)
        assert state[1] == c.sum(x0, n) + k0


# ---------------------------------------------------------------------------
# selector cocycles
# ---------------------------------------------------------------------------


def test_selector_real_formula():
    sel = sp.SelectorCocycle("Z_in_R")
    assert sel.theta(1.7, 0.5) == 2
    assert sel.theta(-0.6, 0.5) == -1


def test_selector_mod_k_formula():
    sel = sp.SelectorCocycle("kZ_in_Z", 3)
    assert [sel.theta(1, x) for x in (0, 1, 2)] == [0, 0, 1]


def test_selector_unsupported_pair():
    with pytest.raises(ValueError):
        sp.SelectorCocycle("R_in_C")


def test_selector_identity_exact(rng):
    sel = sp.SelectorCocycle("Z_in_R")
    for _ in range(1000):
        g1 = Fraction(rng.randint(-50, 50), rng.randint(1, 9))
        g2 = Fraction(rng.randint(-50, 50), rng.randint(1, 9))
        x = Fraction(rng.randint(0, 8), 9)
        assert sel.theta(g1 + g2, x) == sel.theta(g1, sel.act(g2, x) % 1) + sel.theta(g2, x)
    sel3 = sp.SelectorCocycle("kZ_in_Z", 5)
    for _ in range(1000):
        g1, g2 = rng.randint(-60, 60), rng.randint(-60, 60)
        x = rng.randint(0, 4)
        assert sel3.identity_holds(g1, g2, x)


# ---------------------------------------------------------------------------
# suspension flow over a map
# ---------------------------------------------------------------------------


def test_flow_integer_time_from_zero_section():
    out = sp.suspension_flow_over_map(lambda y: y + 1, 4.0, (0, 0.0))
    assert out == (4, 0.0)


def test_flow_time_zero_identity():
    out = sp.suspension_flow_over_map(lambda y: y + 1, 0.0, (3, 0.25))
    assert out == (3, 0.25)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-6, 6, allow_nan=False),
    st.floats(-6, 6, allow_nan=False),
    st.floats(0, 1, exclude_max=True, allow_nan=False),
)
def test_flow_identity_hypothesis(t1, t2, s):
    T, Ti = (lambda y: y + 1), (lambda y: y - 1)
    one = sp.suspension_flow_over_map(
        T, t2, sp.suspension_flow_over_map(T, t1, (0, s), Ti), Ti
    )
    two = sp.suspension_flow_over_map(T, t1 + t2, (0, s), Ti)
    assert one[0] == two[0]
    assert abs(one[1] - two[1]) < 1e-9


def test_lifted_cocycle_flow_identity(rng):
    c = rotation_cocycle()
    for _ in range(400):
        t1, t2 = rng.uniform(-4, 4), rng.uniform(-4, 4)
        s, x = rng.random(), rng.random()
        state = (x, s)
        mid = sp.suspension_flow_over_map(c.step, t1, state, c.inv_step)
        lhs = sp.lifted_cocycle(c, t1 + t2, state)
        rhs = sp.lifted_cocycle(c, t1, state) + sp.lifted_cocycle(c, t2, mid)
        assert abs(lhs - rhs) < 1e-9


# ---------------------------------------------------------------------------
# character lattice A_{k,r,s}
# ---------------------------------------------------------------------------


def test_akrs_members_basic():
    lat = sp.akrs_lattice(2, 2, 3, 1)
    assert lat.member([4], [9])
    assert not lat.member([2], [3])
    assert lat.member([0], [0])


def test_akrs_membership_equals_generator_form_brute_force():
    for k, r, s, d in [(2, 2, 3, 1), (1, 3, 4, 2), (3, 2, 5, 1)]:
        lat = sp.akrs_lattice(k, r, s, d)
        rk, sk = r**k, s**k
        gens = set()
        for j in itertools.product(range(-10, 11), repeat=d):
            m, n = lat.generator(j)
            gens.add((m, n))
        lim = 10 * max(rk, sk)
        rng = random.Random(1)
        for _ in range(400):
            m = tuple(rng.randint(-lim, lim) for _ in range(d))
            n = tuple(rng.randint(-lim, lim) for _ in range(d))
            brute = (m, n) in gens
            assert lat.member(m, n) == brute or (
                lat.member(m, n)
                and lat.decompose(m, n) is not None
                and max(map(abs, lat.decompose(m, n))) > 10
            )
        for j in itertools.product(range(-10, 11), repeat=d):
            m, n = lat.generator(j)
            assert lat.member(m, n)
            assert lat.decompose(m, n) == j


def test_akrs_requires_coprime():
    with pytest.raises(ValueError):
        sp.akrs_lattice(2, 2, 4, 1)


def test_akrs_annihilator_duality_exact():
    lat = sp.akrs_lattice(2, 2, 3, 2)
    samples = lat.annihilator_sample(25, seed=9)
    for j in itertools.product(range(-4, 5), repeat=2):
        pair = lat.generator(j)
        for smp in samples:
            assert lat.pairing_is_trivial(pair, smp)


def test_akrs_annihilator_nontrivial_on_non_members():
    lat = sp.akrs_lattice(2, 2, 3, 1)
    samples = lat.annihilator_sample(40, seed=3)
    witness = ((1,), (1,))  # not in the lattice: 9*1 != 4*1
    assert not lat.member(*witness)
    assert any(not lat.pairing_is_trivial(witness, smp) for smp in samples)


def test_extension_step_matches_weyl_system_d2():
    """The d=2 polynomial skew map is the group extension of the circle
    rotation by the identity cocycle; both layers must produce the same
    orbit."""
    from nilorth import dynamics as dy
    from nilorth import nilmanifold as nm

    alpha = math.sqrt(2) % 1.0
    W = dy.weyl_system([0.0, 0.0, alpha / 2])  # P = (alpha/2) x^2 -> rotation alpha
    assert W.alpha == pytest.approx(alpha)
    c = sp.Cocycle(
        step=lambda x: (x + alpha) % 1.0,
        phi=lambda x: x,
        group=sp.TorusGroup(1),
    )
    ext = sp.GroupExtension(c)
    x1, x2 = float(W.coords[0]), float(W.coords[1])
    state = (x1, np.array([x2]))
    pt = nm.reduce(W.start.to_float())
    for _ in range(60):
        t = nm.second_kind(pt).coords
        assert abs(float(t[0]) - state[0]) % 1.0 < 1e-9 or \
            1.0 - (abs(float(t[0]) - state[0]) % 1.0) < 1e-9
        assert abs(float(t[1]) - state[1][0]) % 1.0 < 1e-9 or \
            1.0 - (abs(float(t[1]) - state[1][0]) % 1.0) < 1e-9
        state = ext.step(state)
        pt = W.system.step(pt)
