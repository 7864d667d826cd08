"""
Dictionaries, duals and coherence
=================================

Builds the two dictionaries used throughout the package and looks at the
frame quantities that matter for recovery.
"""

import numpy as np

from optdual import (
    build_gabor_dictionary,
    build_spike_fourier_dictionary,
    canonical_dual,
    coherence,
    frame_bounds,
    general_dual,
    null_space_projector,
)

# spikes next to sinusoids: a Parseval frame with the smallest possible coherence
sf = build_spike_fourier_dictionary(128)
print("spike-Fourier  d =", sf.d, " coherence =", coherence(sf), " 1/sqrt(n) =", 1 / np.sqrt(128))
print("frame bounds:", frame_bounds(sf))

# a 30x redundant Gabor system is far more coherent
gabor = build_gabor_dictionary(128, 30)
print("Gabor          d =", gabor.d, " coherence =", round(coherence(gabor), 5))
A, B = frame_bounds(gabor)
print("frame bounds: A = %.3f, B = %.3f" % (A, B))

# every dual frame reconstructs perfectly; the canonical one is only the
# minimum-energy member of the family
can = canonical_dual(gabor)
print("canonical dual reconstruction error:", can.reconstruction_error())

# a redundant frame has a large null space, and any W projected into it
# yields another dual
small = build_spike_fourier_dictionary(8)
P = null_space_projector(small)
print("null space dimension:", round(np.trace(P.P).real))
W = np.random.default_rng(0).standard_normal((small.d, small.n))
other = general_dual(small, W)
print("general dual reconstruction error:", other.reconstruction_error())

f = np.random.default_rng(1).standard_normal(8)
print("canonical coefficients l1:", np.abs(canonical_dual(small).analyze(f)).sum())
print("general dual coefficients l1:", np.abs(other.analyze(f)).sum())
