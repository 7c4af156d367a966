"""
Coarsening by a non-integer factor
==================================

For omega-Jacobi the best smoothing factor for a coarsening factor r has a
closed form. We compare it with measured W-cycle rates on non-nested grids
and list the estimated smoothing rate, which balances smoothing power
against the work of a cycle.
"""

from rbmg.cycle import build_plan, measure_cr
from rbmg.lfa import esr, factor_r_closed_forms

print("    r   omega*    mu*   (mu*)^2   CR(W)   levels    ESR")
for r in (1.5, 2.0, 2.5, 3.0, 4.0):
    fr = factor_r_closed_forms(r, 2)
    plan = build_plan(2, 64, coarsening="factor_r", r_target=r, cycle="w",
                      smoother="jacobi", omega=fr.omega_star)
    rep = measure_cr(plan)
    e = esr(r, 2, 2, plan.nu, plan.n_levels - 1)
    print(f"{r:5.1f} {fr.omega_star:8.4f} {fr.mu_star:6.3f} {fr.mu_star**2:9.3f} "
          f"{rep.cr:7.3f} {plan.n_levels:8d} {e:6.3f}")
