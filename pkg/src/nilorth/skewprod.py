"""Cocycles, group extensions, selector cocycles for induced actions, and
the character-lattice arithmetic controlling correlations of powers.

Cocycle values live in one of three concrete groups: T^d (numpy arrays mod
1), Z (ints) or R (floats).  Everything here is a pure function; exact
integer/rational arithmetic is used wherever the contract is exactness.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np


# ---------------------------------------------------------------------------
# value groups
# ---------------------------------------------------------------------------


class TorusGroup:
    def __init__(self, d: int):
        self.d = d

    def zero(self):
        return np.zeros(self.d)

    def add(self, a, b):
        return np.mod(np.asarray(a, float) + np.asarray(b, float), 1.0)

    def neg(self, a):
        return np.mod(-np.asarray(a, float), 1.0)


class IntegerGroup:
    def zero(self):
        return 0

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a


class RealGroup:
    def zero(self):
        return 0  # int zero keeps exact (Fraction) values exact

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a


# ---------------------------------------------------------------------------
# cocycles over an invertible base map
# ---------------------------------------------------------------------------


class Cocycle:
    """phi over a base map T, with the n-fold sums

        phi^(n)(x) = phi(x) + phi(Tx) + ... + phi(T^{n-1} x)   (n >= 1)
        phi^(0)(x) = 0
        phi^(n)(x) = -(phi(T^n x) + ... + phi(T^{-1} x))       (n < 0)

    satisfying phi^(m+n)(x) = phi^(m)(x) + phi^(n)(T^m x).
    """

    def __init__(
        self,
        step: Callable,
        phi: Callable,
        group=None,
        inv_step: Callable | None = None,
    ):
        self.step = step
        self.phi = phi
        self.group = group if group is not None else RealGroup()
        self.inv_step = inv_step

    def sum(self, x, n: int):
        g = self.group
        total = g.zero()
        if n == 0:
            return total
        if n > 0:
            cur = x
            for _ in range(n):
                total = g.add(total, self.phi(cur))
                cur = self.step(cur)
            return total
        if self.inv_step is None:
            raise ValueError("negative cocycle sums need an invertible base map")
        cur = x
        for _ in range(-n):
            cur = self.inv_step(cur)
            total = g.add(total, self.phi(cur))
        return g.neg(total)


def cocycle_sum(c: Cocycle, x, n: int):
    return c.sum(x, n)


class GroupExtension:
    """T_phi(x, k) = (Tx, phi(x) + k) on X x K."""

    def __init__(self, cocycle: Cocycle):
        self.cocycle = cocycle

    def step(self, state):
        x, k = state
        return (self.cocycle.step(x), self.cocycle.group.add(self.cocycle.phi(x), k))

    def iterate(self, state, n: int):
        for _ in range(n):
            state = self.step(state)
        return state


def extension_step(c: Cocycle, state):
    return GroupExtension(c).step(state)


# ---------------------------------------------------------------------------
# selector cocycles for the two supported subgroup pairs
# ---------------------------------------------------------------------------


class SelectorCocycle:
    """theta(g, xH) = s(g x H)^{-1} g s(xH) for H < G with the canonical
    fundamental-domain selector.

    pair "Z_in_R":  H = Z < G = R, selector s({r}) = {r}:
                    theta(t, x) = floor(t + x) with x in [0,1).
    pair "kZ_in_Z": H = kZ < G = Z rewritten through kZ ~ Z:
                    theta(m, x) = floor((x + m) / k) with x in {0..k-1}.
    """

    def __init__(self, pair: str, k: int | None = None):
        if pair not in ("Z_in_R", "kZ_in_Z"):
            raise ValueError(f"unsupported pair {pair!r}")
        if pair == "kZ_in_Z":
            if not k or k < 1:
                raise ValueError("kZ_in_Z needs k >= 1")
        self.pair = pair
        self.k = k

    def act(self, g, x):
        """Quotient action of g on G/H in fundamental-domain coordinates."""
        if self.pair == "Z_in_R":
            return (x + g) % 1  # integer modulus keeps Fractions exact
        return (x + g) % self.k

    def theta(self, g, x):
        if self.pair == "Z_in_R":
            if isinstance(x, Fraction) or isinstance(g, (Fraction, int)):
                return math.floor(Fraction(g) + Fraction(x))
            return math.floor(g + x)
        return (x + g) // self.k

    def identity_holds(self, g1, g2, x) -> bool:
        """Cocycle identity theta(g1+g2, x) = theta(g1, g2.x) + theta(g2, x)."""
        lhs = self.theta(g1 + g2, x)
        rhs = self.theta(g1, self.act(g2, x)) + self.theta(g2, x)
        return lhs == rhs


def selector_theta(pair: SelectorCocycle | str, g, x, k: int | None = None):
    sel = pair if isinstance(pair, SelectorCocycle) else SelectorCocycle(pair, k)
    return sel.theta(g, x)


# ---------------------------------------------------------------------------
# suspension flow over an abstract invertible map
# ---------------------------------------------------------------------------


def suspension_flow_over_map(
    step: Callable, t: float, state, inv_step: Callable | None = None
):
    """Time-t map of the suspension: (y, s) -> (T^{floor(t+s)} y, {t+s})."""
    y, s = state
    n = math.floor(t + s)
    frac = (t + s) - n
    if frac >= 1.0:  # float rounding just below an integer
        n += 1
        frac = 0.0
    if n >= 0:
        for _ in range(n):
            y = step(y)
    else:
        if inv_step is None:
            raise ValueError("negative flow times need an invertible base map")
        for _ in range(-n):
            y = inv_step(y)
    return (y, frac)


def lifted_cocycle(c: Cocycle, t: float, state):
    """phi~(t, (x, s)) = phi^(floor(t+s))(x), a cocycle for the suspension."""
    x, s = state
    return c.sum(x, math.floor(t + s))


# ---------------------------------------------------------------------------
# the character lattice of pairs that powers can correlate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharacterLattice:
    """{(mbar, nbar) in Z^d x Z^d : s^k mbar = r^k nbar}
    = {(r^k jbar, s^k jbar) : jbar in Z^d} for coprime r, s."""

    k: int
    r: int
    s: int
    d: int

    def __post_init__(self):
        if math.gcd(self.r, self.s) != 1:
            raise ValueError("r and s must be coprime")
        if self.k < 1 or self.d < 1:
            raise ValueError("need k >= 1 and d >= 1")

    def member(self, mbar: Sequence[int], nbar: Sequence[int]) -> bool:
        mbar, nbar = list(mbar), list(nbar)
        if len(mbar) != self.d or len(nbar) != self.d:
            raise ValueError("vectors must have length d")
        return all(
            self.s**self.k * m == self.r**self.k * n for m, n in zip(mbar, nbar)
        )

    def generator(self, jbar: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        j = tuple(int(v) for v in jbar)
        return (
            tuple(self.r**self.k * v for v in j),
            tuple(self.s**self.k * v for v in j),
        )

    def decompose(self, mbar: Sequence[int], nbar: Sequence[int]):
        """jbar with (mbar, nbar) = (r^k jbar, s^k jbar), or None."""
        rk, sk = self.r**self.k, self.s**self.k
        j = []
        for m, n in zip(mbar, nbar):
            if m % rk or n % sk or m // rk != n // sk:
                return None
            j.append(m // rk)
        return tuple(j)

    def annihilator_sample(
        self, count: int, seed: int = 0, denominator_bound: int = 50
    ) -> list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]:
        """Rational torus pairs (xbar, ybar) with r^k xbar + s^k ybar = 0
        on T^d, exactly."""
        rng = random.Random(seed)
        rk, sk = self.r**self.k, self.s**self.k
        out = []
        for _ in range(count):
            x = tuple(
                Fraction(rng.randrange(0, denominator_bound), rng.randrange(1, denominator_bound))
                % 1
                for _ in range(self.d)
            )
            y = tuple((-Fraction(rk, sk) * xi) % 1 for xi in x)
            out.append((x, y))
        return out

    def pairing_is_trivial(
        self,
        pair: tuple[Sequence[int], Sequence[int]],
        sample: tuple[Sequence[Fraction], Sequence[Fraction]],
    ) -> bool:
        """e^{2 pi i (m.x + n.y)} = 1, checked exactly in Q."""
        (m, n), (x, y) = pair, sample
        total = sum(
            (Fraction(mi) * xi for mi, xi in zip(m, x)), Fraction(0)
        ) + sum((Fraction(ni) * yi for ni, yi in zip(n, y)), Fraction(0))
        return total.denominator == 1


def akrs_lattice(k: int, r: int, s: int, d: int) -> CharacterLattice:
    return CharacterLattice(k, r, s, d)


def akrs_member(lat: CharacterLattice, mbar, nbar) -> bool:
    return lat.member(mbar, nbar)
