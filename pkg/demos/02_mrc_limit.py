"""
Where the sum-rate saturates
============================

With one antenna site per cell and uncorrelated antennas the deterministic
equivalent has a closed form. As M grows it approaches a ceiling fixed by the
ratio of own-cell to contaminating large-scale gains.
"""

import numpy as np

from lsas import c_inf_special, c_limit

rng = np.random.default_rng(0)
lam = rng.uniform(0.05, 1.0, (4, 1, 3))   # (cells, sites, users)
lam[0] *= 4                                # own cell is stronger

ceiling = c_limit(lam)
print(f"limit: {ceiling:.4f} bits/s/Hz")
for M in (10, 100, 1e3, 1e4, 1e6):
    v = c_inf_special(lam, M, 0.1, 0.1)
    print(f"M = {M:>9.0f}: {v:8.4f}  ({v / ceiling:6.1%} of the limit)")
