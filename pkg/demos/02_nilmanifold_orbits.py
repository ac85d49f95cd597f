"""Orbits on compact nilmanifolds: reduction, rotation vectors, observables.

Runs a nil-translation and a genuinely affine system on the Heisenberg
nilmanifold, checks the ergodicity certificate for the induced torus
rotation, and watches Birkhoff averages equidistribute.
"""

import math

import numpy as np

from nilorth import dynamics as dy
from nilorth import nilmanifold as nm
from nilorth import stats, systems

heis = systems.lattice("heisenberg")

# --- a nil-translation with irrational rotation vector ----------------------

sys = dy.nil_translation(heis, [math.sqrt(2), math.sqrt(3), 0.0], name="demo")
alpha = nm.rotation_vector(sys.u)
print("rotation vector:", alpha)
cert = nm.ergodicity_certificate(alpha, Q=50, tol=1e-9)
print("ergodicity certificate:", cert.status, f"(Q={cert.Q}, tol={cert.tol})")

x = nm.identity_point(heis, "float")
f_torus = dy.torus_character(heis, (1, 0))
f_central = dy.central_character(heis, 1, delta=0.1)

for name, f in [("torus character", f_torus), ("central character", f_central)]:
    series = dy.orbit_series(sys, x, f)
    for N in (10**3, 10**4, 10**5):
        print(f"  |Birkhoff mean| of {name} at N={N:>6}: "
              f"{abs(stats.birkhoff_mean(series, N)):.2e}")

# --- a genuinely affine system ----------------------------------------------

affine = dy.AffineSystem(
    heis,
    nm.point(heis, [math.sqrt(2) % 1, 0.3, 0.0]),
    systems.heisenberg_shear(),
    name="affine demo",
)
print("\naffine system with unipotent part; phi^2 = power system check:")
y = nm.point(heis, [0.2, 0.4, 0.6])
two_steps = affine.step(affine.step(nm.reduce(y)))
power2 = affine.power(2).step(nm.reduce(y))
print("  max coordinate diff:",
      max(abs(float(a) - float(b)) for a, b in
          zip(nm.second_kind(two_steps).coords, nm.second_kind(power2).coords)))

# --- the suspension flow -----------------------------------------------------

susp = systems.heisenberg_suspension()
print("\nsuspension algebra central series:", susp.extended.algebra.series.dims)
p = dy.suspension_flow_sample(susp, affine, y, 0.5)
print("fiber coordinate after time 0.5:", susp.fiber_coordinate(p))
p1 = dy.suspension_flow_sample(susp, affine, y, 1.0)
base = affine.step(nm.reduce(y.to_float()))
emb = nm.reduce(susp.embed(base))
err = max(abs(float(a) - float(b)) for a, b in
          zip(nm.second_kind(p1).coords, nm.second_kind(emb).coords))
print("time-1 map vs base step on fiber 0:", err)

# --- polynomial phases through a torus skew product --------------------------

W = dy.weyl_system([0.1, 0.0, math.sqrt(2)])
vals = W.phase_series().values(0, 200)
n = np.arange(200, dtype=float)
expect = np.exp(2j * np.pi * (math.sqrt(2) * n**2 + 0.1))
print("\nWeyl system realizes e^{2 pi i P(n)}; max error over n < 200:",
      np.abs(vals - expect).max())
