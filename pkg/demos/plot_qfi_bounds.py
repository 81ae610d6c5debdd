"""
Fisher information of the oscillator
=====================================

For a displacement generator the Fisher information of any pure state is
capped by ``16 n_bar + 8``.  Fock and squeezed states sit below the cap.
"""

import numpy as np

from squeezamp import metrology, oracle

for N in range(5):
    v = np.zeros(64, complex)
    v[N] = 1
    print(f"|{N}>        F_Q = {oracle.qfi_pure(v):7.3f}   8N+4 = {metrology.qfi_closed('fock', N)}")

for r in (0.5, 1.0, 1.5):
    v = oracle.displaced_squeezed_amplitudes(0j, r, 200)
    print(f"S({r})|0>   F_Q = {oracle.qfi_pure(v):7.3f}   4e^2r = {metrology.qfi_closed('squeezed', r):7.3f}")

###############################################################################
# Random states never cross the bound.

rng = np.random.default_rng(1)
worst = -np.inf
for _ in range(200):
    amps = rng.normal(size=(2, 40)) + 1j * rng.normal(size=(2, 40))
    s = oracle.SpinFockState(amps / np.linalg.norm(amps))
    worst = max(worst, oracle.qfi_pure(s) - metrology.qfi_closed("bound", oracle.mean_phonon(s)))
print("max F_Q - (16 n + 8) over random states:", worst)

###############################################################################
# Gain ceiling of successive entangle/squeeze/sense steps.

for n in (1e2, 1e4, 1e6):
    print(f"n_bar = {n:8.0e}   {metrology.successive_bound_gain(n):.4f} dB")
