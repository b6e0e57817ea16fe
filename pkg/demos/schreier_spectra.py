"""Spectra of random Schreier graphs of S_N acting on s-tuples.

Builds a few random graphs, checks the non-backtracking spectrum against
the adjacency spectrum, verifies the trace identity, and runs a small
bound experiment for degree 8.

Run: python3 demos/schreier_spectra.py
"""

from wordmeasures.schreier import (bound_experiment, bound_value, build_schreier,
                                   hashimoto_spectrum, spectrum_report, trace_identity_check)

g = build_schreier(r=2, s=2, n=8, seed=1)
rep = spectrum_report(g, with_hashimoto=True)
print(f"r=2, s=2, N=8: {g.num_vertices} vertices, degree {g.degree}")
print(f"  mu = {rep.mu:.4f}, nu = {rep.nu:.4f}, bound = {rep.bound:.4f}")
hb = hashimoto_spectrum(g)
print(f"  Ihara-Bass match: {hb.ihara_bass_ok} (worst mismatch {hb.max_mismatch:.1e})")
for t in range(1, 6):
    chk = trace_identity_check(g, t)
    print(f"  t={t}: tr(B^t) = {chk.lhs}, word sum = {chk.rhs}")

print("\nBound values 2 sqrt(d-1) exp(2 s^2 / (e^2 (d-1))):")
for d, s in [(4, 1), (8, 1), (8, 2)]:
    print(f"  d={d}, s={s}: {bound_value(d, s):.5f}")

exp = bound_experiment(4, 1, [200, 500], trials=10, seed=7)
summary = exp.to_json()
print(f"\nd=8, s=1, 10 trials per N: pass rate {summary['pass_rate']:.2f}")
for n, row in summary["per_N"].items():
    print(f"  N={n}: max mu {row['max_mu']:.4f}")
