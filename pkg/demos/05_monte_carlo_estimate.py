"""
Sampling the masking ratio
==========================

Exhaustive enumeration grows as 2^(n+m).  Past the cap the ratio is
estimated from random (vector, nonzero mask) pairs.  The estimate depends only
on the seed and the sample count, not on the number of worker threads.
"""

import numpy as np

from fmrforge import bundled, compute_fmr, estimate_fmr_mc

net = bundled.netlist("fig1a")
exact = float(compute_fmr(net).fmr_exact)

est = estimate_fmr_mc(net, 100_000, seed=1)
print(f"exact {exact:.4f}, estimate {est.estimate:.4f}, 95% CI [{est.ci95_low:.4f}, {est.ci95_high:.4f}]")
assert est == estimate_fmr_mc(net, 100_000, seed=1, workers=4)

###############################################################################
# Interval coverage over repeated seeds.

runs = [estimate_fmr_mc(net, 20_000, seed=s) for s in range(40)]
hits = sum(r.ci95_low <= exact <= r.ci95_high for r in runs)
spread = np.std([r.estimate for r in runs])
print(f"{hits}/40 intervals contain the exact value; spread of estimates {spread:.4f}")
