"""
Fourier predictions against measured rates
==========================================

Two-level local Fourier analysis predicts the asymptotic residual reduction
of a cycle. Here we sweep omega for red-black Gauss-Seidel with standard
coarsening and compare the prediction with measured two-level rates, then
show how a full V-cycle hierarchy drifts away from the two-level value.
"""

import numpy as np

from rbmg.cycle import build_plan, measure_cr
from rbmg.lfa import LfaConfig, rho_two_level, smoothing_factor

print(f"smoothing factor at omega=1: {smoothing_factor(LfaConfig()).value:.4f}")
print(" omega   rho_lfa   CR(2 levels)   CR(V, all levels)")
for omega in np.arange(0.8, 1.31, 0.1):
    rho = rho_two_level(LfaConfig(omega=omega)).value
    two = measure_cr(build_plan(2, 64, levels=2, omega=omega)).cr
    full = measure_cr(build_plan(2, 64, cycle="v", omega=omega)).cr
    print(f"{omega:6.2f}   {rho:7.4f}   {two:12.4f}   {full:17.4f}")
