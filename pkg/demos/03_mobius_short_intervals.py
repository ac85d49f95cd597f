"""Short-interval orthogonality against the Mobius function, at desk scale.

Sieves mu, builds orbit sequences, and prints the decay of

    A(a, mu, M, H) = (1/M) sum_{M<=m<2M} | (1/H) sum_{m<=n<m+H} a_n mu(n) |

along an (M, H) ladder, next to the no-cancellation control and the
random-phase reference level sqrt(pi)/2/sqrt(H).
"""

import math

import numpy as np

from nilorth import arith, stats, systems
from nilorth import dynamics as dy
from nilorth import nilmanifold as nm

mu = arith.mobius_weight()

# --- control: mu against itself has no cancellation -------------------------

mu_series = dy.series_from_function(
    lambda n: mu.eval_range(int(n[0]), int(n[-1]) + 1).astype(complex)
    if len(n) else np.zeros(0, complex)
)
rep = stats.short_interval_avg(mu_series, mu, 10**4, 100)
print(f"control: A(mu, mu, 1e4, 100) = {rep.value:.4f}"
      f"  (squarefree density 6/pi^2 = {6 / math.pi**2:.4f})")

# --- a Heisenberg orbit observable vs mu -------------------------------------

heis = systems.lattice("heisenberg")
sys = dy.nil_translation(heis, [math.sqrt(2), math.sqrt(3), 0.0])
f = dy.central_character(heis, 1)
series = dy.orbit_series(sys, nm.identity_point(heis, "float"), f)

print("\nH      M         A(f, mu)   random-phase ref")
for H in (10, 30, 100):
    M = 100 * H * H
    rep = stats.short_interval_avg(series, mu, M, H)
    ref = math.sqrt(math.pi) / 2 / math.sqrt(H)
    print(f"{H:<6} {M:<9} {rep.value:<10.5f} {ref:.5f}")

# --- bilinear sums over prime pairs ------------------------------------------

print("\nbilinear sums (1/N) sum a_{pn} conj(a_{qn}), N = 2e4:")
for p, q in [(2, 3), (3, 5), (5, 7), (11, 13)]:
    rep = stats.kbsz_bilinear(series, p, q, 2 * 10**4)
    print(f"  (p, q) = ({p:>2}, {q:>2}): |value| = {abs(rep.value):.5f}")

# --- progressions -------------------------------------------------------------

print("\naverages along arithmetic progressions (1/N) sum a_n mu(kn+j), N = 1e5:")
circle = systems.lattice("abelian1")
rot = dy.nil_translation(circle, [systems.parse_scalar("golden")])
g = dy.torus_character(circle, (1,))
rot_series = dy.orbit_series(rot, nm.identity_point(circle, "float"), g)
for k in (1, 2, 3, 4):
    vals = [abs(stats.arithmetic_progression_avg(rot_series, mu, k, j, 10**5))
            for j in range(k)]
    print(f"  k={k}: max over j of |value| = {max(vals):.5f}")
