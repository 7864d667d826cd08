"""
Isometry constants and the sufficient condition
===============================================

Monte Carlo lower bounds on the dictionary-restricted isometry constant,
and a scan of the sufficient recovery condition over admissible (a, b).
"""

from optdual import (
    build_spike_fourier_dictionary,
    check_sufficient_condition,
    drip_estimate,
    gaussian_sensing_matrix,
    scan_sufficient_condition,
)

D = build_spike_fourier_dictionary(128)
for m in (32, 64, 128):
    phi = gaussian_sensing_matrix(m, 128, seed=7)
    est = drip_estimate(phi, D, 4, trials=200, seed=3)
    print("m = %3d  delta_4 >= %.3f" % (m, est.delta_hat))

# a single (a, b) pair, evaluated literally
rep = check_sufficient_condition(s=2, a=8, b=32, B=1.0, B_tilde=1.0,
                                 delta_s_plus_a=0.13, delta_b=0.26)
print("s=2 a=8 b=32: lhs %.4f rhs %.4f satisfied=%s" % (rep.lhs, rep.rhs, rep.satisfied))

# scanning: delta_2s is lifted to larger orders by subadditivity
for delta in (0.10, 0.13, 0.14, 0.5):
    reps = scan_sufficient_condition(4, 1.0, 1.0, delta)
    best = min(reps, key=lambda r: r.margin)
    print("delta_2s = %.2f  satisfied pairs: %3d  best margin %.4f at (a, b) = (%d, %d)"
          % (delta, sum(r.satisfied for r in reps), best.margin, best.a, best.b))
