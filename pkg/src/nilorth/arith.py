"""Segmented sieves for the Mobius and Liouville functions and a registry
of bounded multiplicative weights.

Values are produced per segment [lo, hi) with primes precomputed up to
sqrt(hi); within a segment every (prime, power) pair contributes one strided
numpy pass, so the work is O((hi-lo) loglog hi + sqrt(hi)) and the memory
O(hi - lo).  mu and lambda values are stored as signed bytes {-1, 0, +1}.
Segments are independent work units: concatenating segments is exactly a
bigger segment, which also makes parallel generation deterministic.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_SEGMENT = 1 << 20
MAX_SIEVE_BOUND = 1 << 50
DEFAULT_MEMORY_CAP = 1 << 27  # max values per single segment request


def primes_up_to(n: int) -> np.ndarray:
    """Primes <= n by a plain Eratosthenes sieve (int64)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


@dataclass(frozen=True)
class SieveSegment:
    """Values of a unit-bounded arithmetic function over [lo, hi)."""

    lo: int
    hi: int
    values: np.ndarray  # int8 for mu/lambda, complex128 otherwise

    def __post_init__(self):
        if len(self.values) != self.hi - self.lo:
            raise ValueError("segment length mismatch")

    def __getitem__(self, n: int):
        if not self.lo <= n < self.hi:
            raise IndexError(f"{n} outside [{self.lo}, {self.hi})")
        return self.values[n - self.lo]


def _check_range(lo: int, hi: int, cap: int):
    if not 1 <= lo < hi:
        raise ValueError("need 1 <= lo < hi")
    if hi > MAX_SIEVE_BOUND:
        raise ValueError(f"hi exceeds supported bound 2^50")
    if hi - lo > cap:
        raise ValueError(
            f"segment of {hi - lo} values exceeds the memory cap {cap}; "
            "sieve in smaller segments"
        )


def _prime_power_slices(lo: int, hi: int, p: int):
    """Yield (exponent e, slice over [lo,hi) hitting multiples of p^e)."""
    pe = p
    e = 1
    while pe < hi:
        start = ((lo + pe - 1) // pe) * pe
        if start < hi:
            yield e, slice(start - lo, hi - lo, pe)
        e += 1
        if pe > hi // p:
            break
        pe *= p


def mobius_segment(lo: int, hi: int, *, primes: np.ndarray | None = None,
                   memory_cap: int = DEFAULT_MEMORY_CAP) -> SieveSegment:
    """mu over [lo, hi): +-1 on squarefree integers, 0 otherwise."""
    _check_range(lo, hi, memory_cap)
    if primes is None:
        primes = primes_up_to(int(np.sqrt(hi - 1)))
    mu = np.ones(hi - lo, dtype=np.int8)
    rem = np.arange(lo, hi, dtype=np.int64)
    for p in primes:
        p = int(p)
        first = True
        for e, sl in _prime_power_slices(lo, hi, p):
            if e == 1:
                mu[sl] = -mu[sl]
                rem[sl] //= p
                first = False
            elif e == 2:
                mu[sl] = 0
                break
        if first:
            continue
    # a leftover cofactor > 1 is a single prime > sqrt(hi)
    mu[rem > 1] = -mu[rem > 1]
    if lo == 1:
        mu[0] = 1
    return SieveSegment(lo, hi, mu)


def liouville_segment(lo: int, hi: int, *, primes: np.ndarray | None = None,
                      memory_cap: int = DEFAULT_MEMORY_CAP) -> SieveSegment:
    """lambda(n) = (-1)^Omega(n) over [lo, hi)."""
    _check_range(lo, hi, memory_cap)
    if primes is None:
        primes = primes_up_to(int(np.sqrt(hi - 1)))
    lam = np.ones(hi - lo, dtype=np.int8)
    rem = np.arange(lo, hi, dtype=np.int64)
    for p in primes:
        p = int(p)
        for e, sl in _prime_power_slices(lo, hi, p):
            lam[sl] = -lam[sl]
            rem[sl] //= p
    lam[rem > 1] = -lam[rem > 1]
    if lo == 1:
        lam[0] = 1
    return SieveSegment(lo, hi, lam)


def completely_multiplicative_segment(
    lo: int,
    hi: int,
    prime_values: Callable[[np.ndarray], np.ndarray],
    *,
    primes: np.ndarray | None = None,
    memory_cap: int = DEFAULT_MEMORY_CAP,
) -> SieveSegment:
    """u(n) = prod over prime powers p^e || n of prime_values(p)^e."""
    _check_range(lo, hi, memory_cap)
    if primes is None:
        primes = primes_up_to(int(np.sqrt(hi - 1)))
    vals = np.ones(hi - lo, dtype=np.complex128)
    rem = np.arange(lo, hi, dtype=np.int64)
    for p in primes:
        p = int(p)
        fp = complex(prime_values(np.array([p], dtype=np.int64))[0])
        for e, sl in _prime_power_slices(lo, hi, p):
            vals[sl] *= fp
            rem[sl] //= p
    big = rem > 1
    if np.any(big):
        vals[big] *= prime_values(rem[big])
    return SieveSegment(lo, hi, vals)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


class MultiplicativeWeight:
    """Bounded multiplicative weight u with segment-wise evaluation.

    kind is one of mobius, liouville, constant_one, completely_multiplicative
    (the latter takes a vectorized prime -> unit-disk map).
    """

    def __init__(self, kind: str, prime_values: Callable | None = None, label: str = ""):
        if kind not in ("mobius", "liouville", "constant_one", "completely_multiplicative"):
            raise ValueError(f"unknown weight kind {kind!r}")
        if kind == "completely_multiplicative" and prime_values is None:
            raise ValueError("completely_multiplicative needs a prime_values map")
        self.kind = kind
        self.prime_values = prime_values
        self.label = label or kind

    def eval_range(self, lo: int, hi: int, *, segment: int = DEFAULT_SEGMENT) -> np.ndarray:
        """u(n) for n in [lo, hi) as float64 (mu, lambda, 1) or complex128."""
        if hi <= lo:
            return np.zeros(0)
        if self.kind == "constant_one":
            return np.ones(hi - lo)
        parts = []
        primes = primes_up_to(int(np.sqrt(hi - 1)))
        for start in range(lo, hi, segment):
            stop = min(start + segment, hi)
            if self.kind == "mobius":
                parts.append(mobius_segment(start, stop, primes=primes).values)
            elif self.kind == "liouville":
                parts.append(liouville_segment(start, stop, primes=primes).values)
            else:
                parts.append(
                    completely_multiplicative_segment(
                        start, stop, self.prime_values, primes=primes
                    ).values
                )
        return np.concatenate(parts)

    def __call__(self, n: int):
        return self.eval_range(n, n + 1)[0]

    def __repr__(self):
        return f"MultiplicativeWeight({self.label})"


def mobius_weight() -> MultiplicativeWeight:
    return MultiplicativeWeight("mobius")


def liouville_weight() -> MultiplicativeWeight:
    return MultiplicativeWeight("liouville")


def constant_one_weight() -> MultiplicativeWeight:
    return MultiplicativeWeight("constant_one")


def unimodular_prime_weight(tau: float) -> MultiplicativeWeight:
    """u with u(p) = p^{i tau}, extended completely multiplicatively."""

    def pv(ps: np.ndarray) -> np.ndarray:
        return np.exp(1j * tau * np.log(ps.astype(np.float64)))

    return MultiplicativeWeight("completely_multiplicative", pv, label=f"p^(i{tau})")


# ---------------------------------------------------------------------------
# binary segment cache (optimization only, never a source of truth)
# ---------------------------------------------------------------------------

_CACHE_MAGIC = b"NLSV"
_KIND_CODES = {"mobius": 1, "liouville": 2}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}


def write_segment_cache(path, kind: str, seg: SieveSegment) -> None:
    """Little-endian layout: magic 'NLSV', u16 version=1, u16 kind code,
    u64 lo, u64 hi, then (hi-lo) signed bytes."""
    if kind not in _KIND_CODES:
        raise ValueError("only mobius/liouville segments are cacheable")
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<HHQQ", 1, _KIND_CODES[kind], seg.lo, seg.hi))
        fh.write(seg.values.astype(np.int8).tobytes())


def read_segment_cache(path) -> tuple[str, SieveSegment]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _CACHE_MAGIC:
            raise ValueError("not a sieve cache file")
        version, code, lo, hi = struct.unpack("<HHQQ", fh.read(20))
        if version != 1 or code not in _KIND_NAMES:
            raise ValueError("unsupported cache version or kind")
        data = np.frombuffer(fh.read(hi - lo), dtype=np.int8).copy()
    return _KIND_NAMES[code], SieveSegment(lo, hi, data)
