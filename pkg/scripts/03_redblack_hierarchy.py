"""
Red-black coarsening on many levels
===================================

Each red-black step halves the number of points and rotates the lattice by
45 degrees. We build a seven-level hierarchy on a 64 x 64 grid and compare
V and W cycles for recursive Galerkin operators and for the first Galerkin
operator reused on every coarse level. The effective rate CR^(1/WU) puts
cycles of different cost on one scale.
"""

from rbmg.cycle import build_plan, measure_cr

plan = build_plan(2, 64, coarsening="redblack", levels=7)
print("level sizes:", [lv.size for lv in plan.levels])
print("coarse stencil on level 1:\n" + str(plan.ops[1].stencil))

print("\ncycle  op   omega      CR       WU     ECR")
for cycle in ("v", "w", "wn"):
    for op in ("g", "g1"):
        for omega in (1.0, 1.1):
            p = build_plan(2, 64, coarsening="redblack", levels=7, cycle=cycle, coarse_op=op, omega=omega)
            rep = measure_cr(p)
            print(f"{cycle:>5}  {op:3} {omega:6.2f} {rep.cr:9.2e} {rep.wu:7.3f} {rep.ecr:7.4f}")
