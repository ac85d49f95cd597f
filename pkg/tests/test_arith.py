import numpy as np
import pytest

from nilorth import arith


def trial_mu_lambda(n: int, primes) -> tuple[int, int]:
    """Per-element trial division by primes; independent of the sieve."""
    m = n
    distinct = 0
    omega = 0
    squarefree = True
    for p in primes:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            distinct += 1
            omega += e
            if e > 1:
                squarefree = False
    if m > 1:
        distinct += 1
        omega += 1
    mu = (-1) ** distinct if squarefree else 0
    return mu, (-1) ** omega


def test_mobius_small_values():
    seg = arith.mobius_segment(1, 40)
    assert seg[1] == 1 and seg[2] == -1 and seg[4] == 0
    assert seg[30] == -1  # 2*3*5
    assert seg[12] == 0 and seg[35] == 1


def test_liouville_small_values():
    seg = arith.liouville_segment(1, 10)
    assert seg[1] == 1 and seg[2] == -1 and seg[4] == 1
    assert seg[8] == -1 and seg[9] == 1


def test_segment_matches_trial_division_at_1e6():
    lo, hi = 10**6, 10**6 + 10**4
    primes = [int(p) for p in arith.primes_up_to(int(hi**0.5) + 1)]
    mu = arith.mobius_segment(lo, hi)
    lam = arith.liouville_segment(lo, hi)
    for n in range(lo, hi):
        m, l = trial_mu_lambda(n, primes)
        assert mu[n] == m, n
        assert lam[n] == l, n


def test_segment_concatenation_exact():
    primes = arith.primes_up_to(200)
    parts = [arith.mobius_segment(a, a + 5000, primes=primes).values
             for a in range(1, 20001, 5000)]
    whole = arith.mobius_segment(1, 20001, primes=primes).values
    assert np.array_equal(np.concatenate(parts), whole)
    parts = [arith.liouville_segment(a, a + 5000, primes=primes).values
             for a in range(1, 20001, 5000)]
    whole = arith.liouville_segment(1, 20001, primes=primes).values
    assert np.array_equal(np.concatenate(parts), whole)


def test_range_validation():
    with pytest.raises(ValueError):
        arith.mobius_segment(0, 10)
    with pytest.raises(ValueError):
        arith.mobius_segment(10, 10)
    with pytest.raises(ValueError):
        arith.mobius_segment(1, 2**51)
    with pytest.raises(ValueError, match="cap"):
        arith.mobius_segment(1, 10**9, memory_cap=10**6)


def test_weight_constant_one():
    w = arith.constant_one_weight()
    assert np.all(w.eval_range(5, 50) == 1.0)


def test_weight_mobius_matches_segment():
    w = arith.mobius_weight()
    seg = arith.mobius_segment(1, 1000)
    assert np.array_equal(w.eval_range(1, 1000), seg.values)


def test_completely_multiplicative_trivial_seed():
    w = arith.MultiplicativeWeight(
        "completely_multiplicative", lambda p: np.ones(len(p), dtype=complex)
    )
    assert np.allclose(w.eval_range(1, 500), 1.0)


def test_unimodular_weight_properties():
    import math

    w = arith.unimodular_prime_weight(2.3)
    vals = w.eval_range(1, 3000)
    assert np.abs(np.abs(vals) - 1).max() < 1e-12
    for m, n in [(4, 9), (5, 8), (7, 12), (25, 18)]:
        assert math.gcd(m, n) == 1
        assert abs(w(m * n) - w(m) * w(n)) < 1e-12
    assert w(1) == 1


def test_weight_bound_invariant():
    for w in (arith.mobius_weight(), arith.liouville_weight(),
              arith.unimodular_prime_weight(1.1)):
        assert np.abs(w.eval_range(1, 2000)).max() <= 1 + 1e-12


def test_cache_round_trip(tmp_path):
    seg = arith.mobius_segment(500, 1500)
    path = tmp_path / "mu.seg"
    arith.write_segment_cache(path, "mobius", seg)
    kind, back = arith.read_segment_cache(path)
    assert kind == "mobius"
    assert (back.lo, back.hi) == (500, 1500)
    assert np.array_equal(back.values, seg.values)
    raw = path.read_bytes()
    assert raw[:4] == b"NLSV"


def test_cache_rejects_other_files(tmp_path):
    p = tmp_path / "junk.bin"
    p.write_bytes(b"not a cache")
    with pytest.raises(ValueError):
        arith.read_segment_cache(p)
