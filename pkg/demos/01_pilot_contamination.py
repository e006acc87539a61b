"""
Pilot contamination in a multi-cell uplink
==========================================

Users in neighbouring cells reuse the same pilot, so the reference base
station's MMSE estimate of its own user is correlated with the interferers'
channels. This script drops users in a 3-cell layout, estimates the channels
and compares the Monte Carlo sum-rate with its deterministic equivalent as the
array grows.
"""

import numpy as np

from lsas import CorrelationSet, Scenario, deterministic_equivalent, ergodic_sumrate_mc, realize

#############################################################################
# One user drop. The large-scale gains do not depend on M, so the same drop
# is reused for every array size below.
base = Scenario(L=3, N=1, K=4, rng_seed=7, num_trials=500)
_, lsm = realize(base)
print("own-cell gains (dB):  ", np.round(10 * np.log10(lsm.lam[0, 0]), 1))
print("strongest interferer: ", np.round(10 * np.log10(lsm.lam[1:, 0].max(axis=0)), 1))

#############################################################################
# Monte Carlo against the deterministic equivalent
print(f"\n{'M':>5} {'C_mc':>9} {'C_inf':>9} {'gap':>8}")
for M in (8, 32, 128):
    s = base.replace(M=M)
    corr = CorrelationSet.for_scenario(s)
    mc = ergodic_sumrate_mc(s, lsm, corr)
    ci = deterministic_equivalent(corr, lsm, s.gamma_p, s.gamma_ul).c_inf
    print(f"{M:>5} {mc.mean:9.3f} {ci:9.3f} {abs(mc.mean - ci):8.4f}")
