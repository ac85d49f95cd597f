"""Verification functionals: short-interval averages, bilinear prime sums,
Birkhoff means, joining-support probes, stabilizer translation tests and
closed-form multicorrelations.

The central statistic is

    A(a, u, M, H) = (1/M) sum_{M <= m < 2M} | (1/H) sum_{m <= n < m+H} a_n u(n) |

computed with one weight-product per index (O(M+H) products).  Window sums
come from prefix sums; in ``exact`` mode the prefixes are exact dyadic
rationals, so each window sum is the correctly rounded float of the true
sum (bit-identical to an fsum of the window), while ``fast`` mode uses a
float cumsum and is within ~1e-12 of exact at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import MultiplicativeWeight
from .dynamics import (
    AffineSystem,
    Observable,
    SignalSeries,
    orbit_series,
)
from .nilmanifold import GroupPoint
from . import liealg, nilmanifold

_EXACT_WINDOW_LIMIT = 300_000


# ---------------------------------------------------------------------------
# short-interval statistic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShortIntervalReport:
    M: int
    H: int
    value: float
    method: str
    partials: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)


def _window_means(w: np.ndarray, M: int, H: int, method: str) -> np.ndarray:
    """|window mean| for each of the M windows of length H starting at
    offsets 0..M-1 of w (w[0] corresponds to n = M)."""
    if method == "exact":
        re_pref = [Fraction(0)]
        im_pref = [Fraction(0)]
        re, im = w.real, w.imag
        for i in range(len(w)):
            re_pref.append(re_pref[-1] + Fraction(float(re[i])))
            im_pref.append(im_pref[-1] + Fraction(float(im[i])))
        out = np.empty(M)
        for m in range(M):
            s_re = float(re_pref[m + H] - re_pref[m])
            s_im = float(im_pref[m + H] - im_pref[m])
            out[m] = abs(complex(s_re, s_im)) / H
        return out
    pref = np.concatenate([[0.0 + 0.0j], np.cumsum(w)])
    sums = pref[H : H + M] - pref[:M]
    return np.abs(sums) / H


def _resolve_method(method: str, M: int, H: int) -> str:
    if method == "auto":
        return "exact" if M + H <= _EXACT_WINDOW_LIMIT else "fast"
    if method not in ("exact", "fast"):
        raise ValueError("method must be auto, exact or fast")
    return method


def short_interval_avg(
    a: SignalSeries,
    u: MultiplicativeWeight,
    M: int,
    H: int,
    method: str = "auto",
    keep_partials: bool = False,
) -> ShortIntervalReport:
    """A(a, u, M, H) over windows [m, m+H), m in [M, 2M)."""
    if M < 1 or H < 1:
        raise ValueError("need M >= 1 and H >= 1")
    method = _resolve_method(method, M, H)
    vals = a.values(M, 2 * M + H)
    weights = np.asarray(u.eval_range(M, 2 * M + H))
    w = vals * weights
    partials = _window_means(w, M, H, method)
    value = math.fsum(partials) / M
    return ShortIntervalReport(
        M,
        H,
        value,
        method,
        partials=partials if keep_partials else None,
        metadata={"series": dict(a.metadata), "weight": u.label},
    )


def short_interval_progression_avg(
    a: SignalSeries,
    u: MultiplicativeWeight,
    k: int,
    j: int,
    M: int,
    H: int,
    method: str = "auto",
) -> ShortIntervalReport:
    """Short-interval statistic with the weight sampled along kn + j."""
    if k < 1 or not 0 <= j < k:
        raise ValueError("need k >= 1 and 0 <= j < k")
    method = _resolve_method(method, M, H)
    vals = a.values(M, 2 * M + H)
    lo_idx, hi_idx = k * M + j, k * (2 * M + H - 1) + j + 1
    weights = np.asarray(u.eval_range(lo_idx, hi_idx))[:: k]
    w = vals * weights
    partials = _window_means(w, M, H, method)
    value = math.fsum(partials) / M
    return ShortIntervalReport(
        M, H, value, method,
        metadata={"series": dict(a.metadata), "weight": u.label, "progression": (k, j)},
    )


# ---------------------------------------------------------------------------
# bilinear sums over prime pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BilinearReport:
    p: int
    q: int
    N: int
    value: complex
    metadata: dict = field(default_factory=dict)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def kbsz_bilinear(a: SignalSeries, p: int, q: int, N: int) -> BilinearReport:
    """(1/N) sum_{n<=N} a_{pn} conj(a_{qn}) for distinct primes p, q."""
    if p == q or not (_is_prime(p) and _is_prime(q)):
        raise ValueError("p and q must be distinct primes")
    if N < 1:
        raise ValueError("N must be >= 1")
    hi = max(p, q) * N + 1
    vals = a.values(min(p, q), hi)

    def pick(r: int) -> np.ndarray:
        idx = r * np.arange(1, N + 1, dtype=np.int64) - min(p, q)
        return vals[idx]

    prod = pick(p) * np.conj(pick(q))
    value = complex(math.fsum(prod.real), math.fsum(prod.imag)) / N
    return BilinearReport(p, q, N, value, metadata={"series": dict(a.metadata)})


# ---------------------------------------------------------------------------
# Birkhoff means and equidistribution residuals
# ---------------------------------------------------------------------------


def birkhoff_mean(a: SignalSeries, N: int) -> complex:
    """(1/N) sum_{0 <= n < N} a_n with correctly rounded summation."""
    if N < 1:
        raise ValueError("N must be >= 1")
    vals = a.values(0, N)
    return complex(math.fsum(vals.real) / N, math.fsum(vals.imag) / N)


def equidistribution_check(
    sys: AffineSystem, x: GroupPoint, f: Observable, N: int, target: complex
) -> float:
    """| (1/N) sum f(phi^n x) - target |."""
    return abs(birkhoff_mean(orbit_series(sys, x, f), N) - complex(target))


# ---------------------------------------------------------------------------
# joining support probe on the torus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JoiningProbe:
    r: int
    s: int
    N: int
    invariant_value: tuple[float, ...]
    drift: float
    metadata: dict = field(default_factory=dict)


def _circle_dist(x: np.ndarray) -> np.ndarray:
    y = np.mod(x, 1.0)
    return np.minimum(y, 1.0 - y)


def joining_support_probe(
    alpha: Sequence[float] | float,
    r: int,
    s: int,
    start: tuple[Sequence[float] | float, Sequence[float] | float],
    N: int,
) -> JoiningProbe:
    """Iterate (t1, t2) -> (t1 + r alpha, t2 + s alpha) on T^d x T^d and
    measure the drift of s t1 - r t2 from its initial value; the underlying
    identity s(t1 + r alpha) - r(t2 + s alpha) = s t1 - r t2 is exact, so
    drift is pure float noise."""
    if math.gcd(r, s) != 1:
        raise ValueError("r and s must be coprime")
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    t1 = np.atleast_1d(np.asarray(start[0], dtype=float))
    t2 = np.atleast_1d(np.asarray(start[1], dtype=float))
    n = np.arange(N, dtype=float)[:, None]
    t1n = np.mod(t1 + n * (r * a), 1.0)
    t2n = np.mod(t2 + n * (s * a), 1.0)
    inv = s * t1n - r * t2n
    c0 = np.mod(inv[0], 1.0)
    drift = float(_circle_dist(inv - inv[0]).max())
    return JoiningProbe(
        r, s, N, tuple(float(v) for v in c0), drift, metadata={"alpha": tuple(map(float, a))}
    )


def intertwiner_drift(
    alpha: Sequence[float] | float,
    r: int,
    s: int,
    start: tuple[Sequence[float] | float, Sequence[float] | float],
    N: int,
) -> float:
    """With ar + bs = 1, I(t1, t2) = a t1 + b t2 advances by exactly alpha
    per step; returns the max circle deviation of I_n - n alpha - I_0."""
    g, aa, bb = _ext_gcd(r, s)
    if g != 1:
        raise ValueError("r and s must be coprime")
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    t1 = np.atleast_1d(np.asarray(start[0], dtype=float))
    t2 = np.atleast_1d(np.asarray(start[1], dtype=float))
    n = np.arange(N, dtype=float)[:, None]
    t1n = np.mod(t1 + n * (r * a), 1.0)
    t2n = np.mod(t2 + n * (s * a), 1.0)
    I = aa * t1n + bb * t2n
    dev = I - I[0] - n * a
    return float(_circle_dist(dev).max())


def _ext_gcd(x: int, y: int) -> tuple[int, int, int]:
    if y == 0:
        return x, 1, 0
    g, a, b = _ext_gcd(y, x % y)
    return g, b, a - (x // y) * b


# ---------------------------------------------------------------------------
# stabilizer translation test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilizerReport:
    before: complex
    after: complex
    predicted_factor: complex
    r: int
    s: int
    k: int
    N: int
    metadata: dict = field(default_factory=dict)

    @property
    def factor_residual(self) -> float:
        """|after - predicted * before|: the assertable equivariance form."""
        return abs(self.after - self.predicted_factor * self.before)


def stabilizer_translation_test(
    sys: AffineSystem,
    x1: GroupPoint,
    x2: GroupPoint,
    f1: Observable,
    f2: Observable,
    r: int,
    s: int,
    z_param: float,
    N: int,
    k: int | None = None,
) -> StabilizerReport:
    """Empirical correlation of (f1, f2) along the phi^r x phi^s orbit from
    (x1, x2), before and after translating the starts by the central pair
    (exp(r^k c Z), exp(s^k c Z)) with c = z_param.

    When f_i are central characters with indices m_i, the two correlations
    differ exactly by the factor e^{2 pi i (m1 r^k - m2 s^k) c}; for a
    nontrivial factor and an equidistributing orbit the correlation itself
    must vanish in the large-N limit.
    """
    if math.gcd(r, s) != 1:
        raise ValueError("r and s must be coprime")
    alg = sys.lattice.algebra
    if k is None:
        k = alg.nilpotency_class
    sys_r, sys_s = sys.power(r), sys.power(s)

    def correlation(p1: GroupPoint, p2: GroupPoint) -> complex:
        a = orbit_series(sys_r, p1, f1).values(0, N)
        b = orbit_series(sys_s, p2, f2).values(0, N)
        prod = a * np.conj(b)
        return complex(math.fsum(prod.real) / N, math.fsum(prod.imag) / N)

    before = correlation(x1, x2)
    zdir = liealg.basis_vector(alg.dim - 1, alg.dim, "float")
    z1 = GroupPoint(sys.lattice, liealg._scale(float(r**k * z_param), zdir))
    z2 = GroupPoint(sys.lattice, liealg._scale(float(s**k * z_param), zdir))
    after = correlation(
        nilmanifold.group_mul(z1, x1.to_float()),
        nilmanifold.group_mul(z2, x2.to_float()),
    )
    m1 = f1.index[0] if f1.kind == "central_character" else 0
    m2 = f2.index[0] if f2.kind == "central_character" else 0
    predicted = complex(np.exp(2j * np.pi * (m1 * r**k - m2 * s**k) * z_param))
    return StabilizerReport(
        before, after, predicted, r, s, k, N,
        metadata={"system": sys.system_hash(), "z": z_param},
    )


# ---------------------------------------------------------------------------
# closed-form multicorrelations for circle rotations
# ---------------------------------------------------------------------------


def multicorrelation_series(
    alpha: float,
    characters: Sequence[int],
    polynomials: Sequence[Sequence[int]],
) -> SignalSeries:
    """d_h = integral of prod_i g_i o T^{p_i(h)} for the rotation T by alpha
    on the circle, g_i(x) = e^{2 pi i m_i x}.

    Character orthogonality gives d_h = 0 when sum m_i != 0 and otherwise
    d_h = e^{2 pi i alpha sum_i m_i p_i(h)} (the base-point phases cancel);
    evaluation is analytic, no sampling involved.
    """
    ms = [int(m) for m in characters]
    polys = [tuple(int(c) for c in p) for p in polynomials]
    if len(ms) != len(polys):
        raise ValueError("need one polynomial per character")
    total_m = sum(ms)

    def eval_K(h: np.ndarray) -> np.ndarray:
        out = np.zeros(len(h), dtype=np.int64)
        for m, p in zip(ms, polys):
            acc = np.zeros(len(h), dtype=np.int64)
            for c in reversed(p):
                acc = acc * h + c
            out += m * acc
        return out

    def _eval(lo, hi):
        h = np.arange(lo, hi, dtype=np.int64)
        if total_m != 0:
            return np.zeros(hi - lo, dtype=complex)
        K = eval_K(h)
        kmax = int(np.abs(K).max()) if len(K) else 0
        if kmax < 2**40:
            phase = np.mod(alpha * K.astype(float), 1.0)
        else:
            # exact dyadic reduction of alpha*K mod 1 via big integers:
            # alpha = num / 2^b exactly, so the fractional part is
            # ((num * K) mod 2^b) / 2^b
            fa = Fraction(float(alpha))
            num, den = fa.numerator, fa.denominator
            phase = np.array(
                [((num * int(k)) % den) / den for k in K.tolist()], dtype=float
            )
        return np.exp(2j * np.pi * phase)

    meta = {
        "kind": "multicorrelation",
        "alpha": float(alpha),
        "characters": tuple(ms),
        "polynomials": tuple(polys),
    }
    return SignalSeries(_eval, 1.0, meta)


# ---------------------------------------------------------------------------
# averages along arithmetic progressions
# ---------------------------------------------------------------------------


def arithmetic_progression_avg(
    a: SignalSeries, u: MultiplicativeWeight, k: int, j: int, N: int
) -> complex:
    """(1/N) sum_{n<=N} a_n u(kn + j)."""
    if k < 1 or not 0 <= j < k:
        raise ValueError("need k >= 1 and 0 <= j < k")
    vals = a.values(1, N + 1)
    weights = np.asarray(u.eval_range(k + j, k * N + j + 1))[:: k]
    prod = vals * weights
    return complex(math.fsum(prod.real) / N, math.fsum(prod.imag) / N)
