"""
Cheap coarse operators for high-order problems
==============================================

A fourth-order fine discretization does not need fourth-order coarse
operators. We compare the two-level rate over omega for four choices:
rediscretized order 4 and order 2 operators, Galerkin from the order 4
operator and Galerkin from the order 2 operator.
"""

import numpy as np

from rbmg.lfa import LfaConfig, rho_two_level

omegas = np.arange(0.9, 1.3001, 0.05)
print("omega  " + "  ".join(f"{op:>7}" for op in ("ng", "ng2", "g", "g2q")))
for w in omegas:
    vals = [rho_two_level(LfaConfig(order=4, coarse_op=op, omega=w, m=64)).value
            for op in ("ng", "ng2", "g", "g2q")]
    print(f"{w:5.2f}  " + "  ".join(f"{v:7.4f}" for v in vals))
