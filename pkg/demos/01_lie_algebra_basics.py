"""Exact nilpotent Lie algebra arithmetic, start to finish.

Builds the bundled algebras, inspects their descending central series,
multiplies group elements through the truncated BCH series, and converts
between exponential (first-kind) and Malcev (second-kind) coordinates --
everything over exact rationals.
"""

from fractions import Fraction

from nilorth import liealg as la

# --- the Heisenberg algebra: one bracket, class 2 --------------------------

heis = la.heisenberg()
print("algebra:", heis)
print("central series dims:", heis.series.dims)

x1, x2 = la.basis_vector(0, 3), la.basis_vector(1, 3)
print("[X1, X2] =", la.bracket(x1, x2, heis).coords)

# The group law in exponential coordinates: for class 2 the Dynkin series
# is (a, b) -> a + b + [a, b]/2, and the kernel generates exactly that.
a = la.vector([Fraction(1, 2), Fraction(1, 3), 0])
b = la.vector([Fraction(3), Fraction(-1, 4), Fraction(1)])
print("exp(a)exp(b) = exp(", la.bch_product(a, b, heis).coords, ")")

# Associativity holds with zero residual; spot-check one triple.
c = la.vector([Fraction(-2, 5), Fraction(1), Fraction(1, 7)])
lhs = la.bch_product(la.bch_product(a, b, heis), c, heis)
rhs = la.bch_product(a, la.bch_product(b, c, heis), heis)
print("associative exactly:", lhs.coords == rhs.coords)

# --- Malcev coordinates -----------------------------------------------------

t = la.coords_first_to_second(a, heis)
print("second-kind coordinates of a:", t.coords)
print("round trip exact:", la.coords_second_to_first(t, heis).coords == a.coords)

# --- a deeper algebra: free 2-generator, class 3 ----------------------------

free3 = la.free_class3()
print("\nalgebra:", free3)
print("central series dims:", free3.series.dims)

S = [la.basis_vector(0, 5), la.basis_vector(1, 5)]
print("S = {X1, X2} minimal generators:", la.minimal_generators_check(S, free3))
span, equal = la.vk_span(S, 3, free3)
print("triple products of S span g^(3):", equal, f"(dim {len(span)})")

# Nested products only see generators modulo [g, g]: perturb X1 by the
# commutator direction X3 and watch nothing change.
S2 = [la._add(S[0], la.vector([0, 0, Fraction(5, 7), 0, 0])), S[1]]
p1 = la.kfold_product((1, 1, 2), S, free3)
p2 = la.kfold_product((1, 1, 2), S2, free3)
print("k-fold product unchanged under commutator perturbation:", p1.coords == p2.coords)

# --- derivations and automorphisms ------------------------------------------

B = la.DerivationSpec.from_rows([[0, 1, 0], [0, 0, 0], [0, Fraction(1, 2), 0]])
print("\nB is a nilpotent derivation of heis:", la.is_derivation(B, heis))
A = la.exp_derivation(B, Fraction(1))
print("A = exp(B) =")
for row in A:
    print("  ", row)

# --- plain-text schema round trip -------------------------------------------

text = la.dump_algebra(free3)
print("\nserialized algebra:\n" + text)
back = la.load_algebra(text, name="free_class3")
print("round trip bit-exact:", back.brackets == free3.brackets)
