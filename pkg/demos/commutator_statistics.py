"""Exact statistics of the commutator word xyXY on S_N.

Prints E[xi1*xi2] as a rational function of N, its large-N expansion, and
compares exact values with brute-force averages over all pairs of
permutations for small N.

Run: python3 demos/commutator_statistics.py
"""

from wordmeasures.characters import parse_class_function, stable_irreducible
from wordmeasures.oracle import exact_expectation
from wordmeasures.phi import phi_value
from wordmeasures.wordstats import class_function_expectation, expectation, word_morphism
from wordmeasures.words import parse_word

w = parse_word("xyXY", 2)

report = expectation(w, (1, 1))
print("E[xi1*xi2] for the commutator:")
print("  ", report.rational)
print("   exact as a rational function for N >=", report.rational.n_min)
print("   expansion:", report.rational.laurent(4))
exponent, coeff = report.leading_correction()
print(f"   predicted: {report.e_unif} + {coeff}*N^{exponent} + ...")

print("\nExact values against brute force over S_N x S_N:")
eta = word_morphism(w, (1, 1))
for n in range(1, 6):
    exact = phi_value(eta, n)
    brute = exact_expectation(w, n, alpha=(1, 1)).value
    print(f"  N={n}: {exact} (brute force {brute})")

print("\nAverages of stable irreducible characters equal 1/dim:")
for lam in [(1,), (2,), (1, 1)]:
    chi = stable_irreducible(lam)
    print(f"  lambda={lam}: {class_function_expectation(w, chi)}")

f = parse_class_function("a2")
print("\nExpected number of 2-cycles:", class_function_expectation(w, f))
