import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilorth import arith, stats
from nilorth import dynamics as dy
from nilorth import nilmanifold as nm
from nilorth import systems

GOLDEN = (1 + math.sqrt(5)) / 2 % 1


def const_series(c=1.0):
    return dy.series_from_function(lambda n: np.full(len(n), c, dtype=complex))


def phase_series(beta, power=1):
    return dy.series_from_function(
        lambda n: np.exp(2j * np.pi * np.mod(beta * n.astype(float) ** power, 1.0))
    )


def naive_short_interval(w, M, H):
    """The oracle: literal double loop, fsum window sums."""
    inner = []
    for m in range(M):
        re = math.fsum(w.real[m : m + H])
        im = math.fsum(w.imag[m : m + H])
        inner.append(abs(complex(re, im)) / H)
    return math.fsum(inner) / M


# ---------------------------------------------------------------------------
# short interval statistic
# ---------------------------------------------------------------------------


def test_zero_series_gives_zero():
    rep = stats.short_interval_avg(const_series(0.0), arith.mobius_weight(), 50, 10)
    assert rep.value == 0.0


def test_constant_against_constant_is_one():
    rep = stats.short_interval_avg(const_series(1.0), arith.constant_one_weight(), 200, 20)
    assert rep.value == 1.0


def test_sliding_equals_naive_bit_for_bit():
    rng = np.random.default_rng(7)
    M, H = 1000, 50
    vals = np.exp(2j * np.pi * rng.random(2 * M + H)) * rng.random(2 * M + H)
    series = dy.series_from_function(lambda n: vals[n])
    w = vals[np.arange(M, 2 * M + H)] * np.asarray(
        arith.mobius_weight().eval_range(M, 2 * M + H)
    )
    rep = stats.short_interval_avg(series, arith.mobius_weight(), M, H, method="exact")
    assert rep.value == naive_short_interval(w, M, H)


def test_fast_mode_matches_exact():
    beta = math.sqrt(2)
    series = phase_series(beta)
    a = stats.short_interval_avg(series, arith.mobius_weight(), 2000, 40, method="exact")
    b = stats.short_interval_avg(series, arith.mobius_weight(), 2000, 40, method="fast")
    assert abs(a.value - b.value) < 1e-12


def test_global_unimodular_invariance_exact_bits():
    series = phase_series(math.sqrt(3))
    base = stats.short_interval_avg(series, arith.mobius_weight(), 500, 25)

    for c in (-1.0, 1j):
        scaled = dy.series_from_function(
            lambda n, c=c: c * np.exp(2j * np.pi * np.mod(math.sqrt(3) * n, 1.0))
        )
        rep = stats.short_interval_avg(scaled, arith.mobius_weight(), 500, 25)
        assert rep.value == base.value


def test_scale_equivariance():
    series = phase_series(math.sqrt(3))
    scaled = dy.series_from_function(
        lambda n: 0.37 * np.exp(2j * np.pi * np.mod(math.sqrt(3) * n, 1.0))
    )
    a = stats.short_interval_avg(series, arith.mobius_weight(), 300, 20)
    b = stats.short_interval_avg(scaled, arith.mobius_weight(), 300, 20)
    assert abs(b.value - 0.37 * a.value) < 1e-13


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_triangle_bound_hypothesis(seed):
    rng = np.random.default_rng(seed)
    M, H = 60, 8
    n = 2 * M + H
    a_vals = rng.normal(size=n) + 1j * rng.normal(size=n)
    b_vals = rng.normal(size=n) + 1j * rng.normal(size=n)
    mk = lambda arr: dy.series_from_function(lambda idx: arr[idx], bound=10.0)
    w = arith.mobius_weight()
    A_ab = stats.short_interval_avg(mk(a_vals + b_vals), w, M, H).value
    A_a = stats.short_interval_avg(mk(a_vals), w, M, H).value
    A_b = stats.short_interval_avg(mk(b_vals), w, M, H).value
    assert A_ab <= A_a + A_b + 1e-12


def test_value_bounded_by_sup_norms():
    rep = stats.short_interval_avg(const_series(1.0), arith.mobius_weight(), 400, 30)
    assert 0 <= rep.value <= 1


def test_progression_variant_matches_plain_when_k1():
    series = phase_series(GOLDEN)
    a = stats.short_interval_avg(series, arith.mobius_weight(), 300, 20)
    b = stats.short_interval_progression_avg(series, arith.mobius_weight(), 1, 0, 300, 20)
    assert a.value == b.value


# ---------------------------------------------------------------------------
# KBSZ bilinear sums
# ---------------------------------------------------------------------------


def test_kbsz_constant_series():
    rep = stats.kbsz_bilinear(const_series(1.0), 2, 3, 500)
    assert rep.value == pytest.approx(1.0)


def test_kbsz_linear_phase_decays():
    rep = stats.kbsz_bilinear(phase_series(GOLDEN), 2, 3, 10**5)
    assert abs(rep.value) < 1e-3


def test_kbsz_quadratic_phase_small():
    rep = stats.kbsz_bilinear(phase_series(math.pi % 1, power=2), 3, 5, 10**5)
    assert abs(rep.value) < 0.05


def test_kbsz_validation():
    with pytest.raises(ValueError):
        stats.kbsz_bilinear(const_series(), 3, 3, 10)


# ---------------------------------------------------------------------------
# Birkhoff means
# ---------------------------------------------------------------------------


def test_birkhoff_constant_exact():
    assert stats.birkhoff_mean(const_series(0.25 + 0.5j), 1000) == 0.25 + 0.5j


def test_birkhoff_character_residual(heis):
    sys = dy.nil_translation(heis, [math.sqrt(2), math.sqrt(3), 0.0])
    f = dy.torus_character(heis, (0, 1))
    res = stats.equidistribution_check(
        sys, nm.identity_point(heis, "float"), f, 10**5, 0.0
    )
    assert res < 1e-2


def test_birkhoff_smooth_bump_against_quadrature():
    """Rotation by the golden ratio equidistributes; the mean of a smooth
    plateau bump converges to its integral (computed by quadrature)."""
    from nilorth.dynamics import _smoothstep

    def bump(x):
        return _smoothstep(x / 0.2) * _smoothstep((1 - x) / 0.2)

    grid = (np.arange(2**16) + 0.5) / 2**16
    integral = bump(grid).mean()  # midpoint rule, smooth periodic: ~1e-12 accurate
    series = dy.series_from_function(
        lambda n: bump(np.mod(0.1 + GOLDEN * n, 1.0)).astype(complex)
    )
    mean = stats.birkhoff_mean(series, 10**6)
    assert abs(mean - integral) < 1e-3


# ---------------------------------------------------------------------------
# joining probes
# ---------------------------------------------------------------------------


def test_joining_drift_small():
    probe = stats.joining_support_probe(GOLDEN, 2, 3, (0.3, 0.7), 10**4)
    assert probe.drift < 1e-9


def test_joining_invariant_zero_start():
    probe = stats.joining_support_probe(GOLDEN, 2, 3, (0.0, 0.0), 100)
    assert probe.invariant_value == (0.0,)


def test_joining_requires_coprime():
    with pytest.raises(ValueError):
        stats.joining_support_probe(GOLDEN, 2, 4, (0.0, 0.0), 10)


def test_joining_two_dimensional():
    alpha = (math.sqrt(2) % 1, math.sqrt(3) % 1)
    probe = stats.joining_support_probe(alpha, 3, 5, ((0.1, 0.2), (0.4, 0.8)), 10**4)
    assert probe.drift < 1e-9


def test_intertwiner_advances_by_alpha():
    assert stats.intertwiner_drift(GOLDEN, 2, 3, (0.25, 0.65), 10**4) < 1e-9


# ---------------------------------------------------------------------------
# stabilizer translation test
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def heis_sys():
    heis = systems.lattice("heisenberg")
    return dy.nil_translation(heis, [math.sqrt(2), math.sqrt(3), 0.0])


def test_stabilizer_trivial_characters(heis, heis_sys):
    f = dy.torus_character(heis, (0, 0))
    x1 = nm.point(heis, [0.1, 0.2, 0.3])
    x2 = nm.point(heis, [0.4, 0.5, 0.6])
    rep = stats.stabilizer_translation_test(heis_sys, x1, x2, f, f, 2, 3, 0.37, 500)
    assert rep.predicted_factor == pytest.approx(1.0)
    assert rep.before == pytest.approx(rep.after, abs=1e-12)


def test_stabilizer_equivariance_and_sign_flip(heis, heis_sys):
    f1 = dy.central_character(heis, 1)
    f2 = dy.central_character(heis, 1)
    x1 = nm.point(heis, [0.11, 0.23, 0.05])
    x2 = nm.point(heis, [0.52, 0.41, 0.33])
    # (m1 r^k - m2 s^k) c = (4 - 9) c = 1/2 for c = -0.1
    rep = stats.stabilizer_translation_test(heis_sys, x1, x2, f1, f2, 2, 3, -0.1, 2000)
    assert rep.predicted_factor == pytest.approx(-1.0)
    assert abs(rep.after + rep.before) < 1e-6


def test_stabilizer_requires_coprime(heis, heis_sys):
    f = dy.central_character(heis, 1)
    x = nm.point(heis, [0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        stats.stabilizer_translation_test(heis_sys, x, x, f, f, 2, 4, 0.1, 10)


# ---------------------------------------------------------------------------
# multicorrelations
# ---------------------------------------------------------------------------


def test_multicorr_single_nonzero_character_vanishes():
    s = stats.multicorrelation_series(GOLDEN, [1], [[0, 1]])
    assert np.abs(s.values(0, 50)).max() == 0.0


def test_multicorr_pair_closed_form():
    s = stats.multicorrelation_series(GOLDEN, [1, -1], [[0, 0, 1], [0]])
    h = np.arange(20)
    expect = np.exp(2j * np.pi * np.mod(GOLDEN * h**2, 1.0))
    assert np.abs(s.values(0, 20) - expect).max() < 1e-12


def test_multicorr_nonzero_sum_identically_zero():
    s = stats.multicorrelation_series(GOLDEN, [2, -1], [[0, 1], [0, 0, 1]])
    assert np.abs(s.values(0, 100)).max() == 0.0


def test_multicorr_matches_monte_carlo():
    """Closed form vs a Birkhoff quadrature along an equidistributed orbit,
    20 random parameter draws, tolerance 1e-2."""
    rng = np.random.default_rng(3)
    beta = math.sqrt(3) % 1  # quadrature rotation, independent of alpha
    N = 10**5
    y = np.mod(0.123 + beta * np.arange(N), 1.0)
    for _ in range(20):
        k = rng.integers(1, 4)
        ms = rng.integers(-2, 3, size=k)
        polys = [list(rng.integers(-3, 4, size=rng.integers(1, 3))) for _ in range(k)]
        alpha = float(rng.random())
        d = stats.multicorrelation_series(alpha, ms, polys)
        for h in rng.integers(0, 30, size=3):
            shifts = [
                sum(c * h**e for e, c in enumerate(p)) * alpha for p in polys
            ]
            sample = np.ones(N, dtype=complex)
            for m, sh in zip(ms, shifts):
                sample *= np.exp(2j * np.pi * m * (y + sh))
            mc = sample.mean()
            assert abs(d.values(int(h), int(h) + 1)[0] - mc) < 1e-2


# ---------------------------------------------------------------------------
# progression averages
# ---------------------------------------------------------------------------


def test_progression_zero_series():
    assert stats.arithmetic_progression_avg(
        const_series(0.0), arith.mobius_weight(), 3, 1, 1000
    ) == 0


def test_progression_k1_matches_plain_mean():
    series = phase_series(GOLDEN)
    v = stats.arithmetic_progression_avg(series, arith.mobius_weight(), 1, 0, 5000)
    vals = series.values(1, 5001) * arith.mobius_weight().eval_range(1, 5001)
    plain = complex(math.fsum(vals.real), math.fsum(vals.imag)) / 5000
    assert v == plain


def test_progression_character_small():
    series = phase_series(GOLDEN)
    v = stats.arithmetic_progression_avg(series, arith.mobius_weight(), 4, 1, 10**5)
    assert abs(v) < 0.05


def test_kbsz_rejects_non_primes():
    with pytest.raises(ValueError):
        stats.kbsz_bilinear(const_series(), 4, 3, 10)
    with pytest.raises(ValueError):
        stats.kbsz_bilinear(const_series(), 2, 9, 10)
