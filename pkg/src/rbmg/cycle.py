"""Multigrid cycles, convergence-rate measurement and work units."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .grid import FACTOR_R, CoarseningPlan, GridSpec, LevelGrid, build_hierarchy
from .smoother import LevelSmoother, SmootherConfig
from .stencil import LevelOperator, builtin, coarse_operators
from .transfer import kind_for, transfer_pair

CYCLES = ("v", "w", "wn")
DIRECT_FLAG = "direct-solver regime"
DIRECT_RATIO = 1e-10


class CoarseSolveError(RuntimeError):
    """Coarsest-level iteration did not reach its tolerance."""

    def __init__(self, achieved: float, tol: float):
        super().__init__(f"coarsest solve stopped at relative residual {achieved:.3e} (target {tol:.1e})")
        self.achieved = achieved


def gammas_for(cycle: str, n_levels: int) -> list[int]:
    if cycle not in CYCLES:
        raise ValueError(f"unknown cycle {cycle!r}")
    if cycle == "v":
        return [1] * n_levels
    if cycle == "w":
        return [2] * n_levels
    return [2 if l < 2 else 1 for l in range(n_levels)]


@dataclass(eq=False)
class CyclePlan:
    levels: list[LevelGrid]
    ops: list[LevelOperator]
    transfers: list[tuple]
    kinds: list[str]
    gammas: list[int]
    nu1: int
    nu2: int
    smoothers: list[LevelSmoother]
    coarse_tol: float = 1e-12
    coarse_maxiter: int | None = None
    info: dict = field(default_factory=dict)

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def nu(self) -> int:
        return self.nu1 + self.nu2


def build_plan(dim: int, n: int, *, order: int = 2, coarsening: str = "standard",
               r_target: float | None = None, levels: int | None = None, n_min: int = 8,
               cycle: str = "v", nu1: int = 1, nu2: int = 1, smoother: str = "rbgs",
               omega: float = 1.0, coarse_op: str = "g", transfer: str = "linear",
               coarse_tol: float = 1e-12, coarse_maxiter: int | None = None) -> CyclePlan:
    """Assemble levels, operators, transfers and smoothers for one configuration."""
    if nu1 < 0 or nu2 < 0:
        raise ValueError("smoothing counts must be non-negative")
    spec = GridSpec(dim, n)
    hier = build_hierarchy(spec, CoarseningPlan(coarsening, r_target, n_min, levels))
    if len(hier) < 2:
        raise ValueError("need at least two levels")
    kinds = [kind_for(hier[l + 1].transition, dim, transfer) for l in range(len(hier) - 1)]
    ops = coarse_operators(hier, builtin(dim, order), coarse_op, kinds, order)
    transfers = [transfer_pair(k, hier[l], hier[l + 1]) for l, k in enumerate(kinds)]
    cfg = SmootherConfig(smoother, omega)
    smoothers = [LevelSmoother(cfg, op) for op in ops[:-1]]
    info = dict(dim=dim, n=n, order=order, coarsening=coarsening, r_target=r_target,
                cycle=cycle, smoother=smoother, omega=omega, coarse_op=coarse_op,
                transfer=transfer, n_min=n_min)
    return CyclePlan(hier, ops, transfers, kinds, gammas_for(cycle, len(hier) - 1),
                     nu1, nu2, smoothers, coarse_tol, coarse_maxiter, info)


def coarsest_solve(op: LevelOperator, f: np.ndarray, tol: float, maxiter: int | None = None) -> np.ndarray:
    """Conjugate gradients on the singular periodic system, constant mode removed."""
    b = f - f.mean()
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return np.zeros_like(f)
    maxiter = maxiter or 20 * op.level.size
    x, info = spla.cg(op.matrix, b, rtol=tol, atol=0.0, maxiter=maxiter)
    x -= x.mean()
    if info != 0:
        raise CoarseSolveError(np.linalg.norm(b - op.matrix @ x) / bnorm, tol)
    return x


def mg_cycle(plan: CyclePlan, u: np.ndarray, f: np.ndarray, level: int = 0) -> np.ndarray:
    """One cycle on ``level``; returns the updated iterate."""
    last = plan.n_levels - 1
    if level == last:
        return u + coarsest_solve(plan.ops[level], f - plan.ops[level].matrix @ u,
                                  plan.coarse_tol, plan.coarse_maxiter)
    sm = plan.smoothers[level]
    A = plan.ops[level].matrix
    R, P = plan.transfers[level]
    for _ in range(plan.nu1):
        u = sm.sweep(u, f)
    fc = R @ (f - A @ u)
    if level + 1 == last:
        ec = coarsest_solve(plan.ops[last], fc, plan.coarse_tol, plan.coarse_maxiter)
    else:
        ec = np.zeros(plan.levels[level + 1].size)
        for _ in range(plan.gammas[level]):
            ec = mg_cycle(plan, ec, fc, level + 1)
    u = u + P @ ec
    for _ in range(plan.nu2):
        u = sm.sweep(u, f)
    return u


def coarse_correction(plan: CyclePlan, e: np.ndarray, level: int = 0) -> np.ndarray:
    """Two-level error propagation ``K e`` with an exact coarse solve."""
    R, P = plan.transfers[level]
    A = plan.ops[level].matrix
    ec = coarsest_solve(plan.ops[level + 1], R @ (A @ e), 1e-14)
    return e - P @ ec


def norm_h(level: LevelGrid, v: np.ndarray) -> float:
    """h^d-weighted Euclidean norm on the unit domain."""
    return math.sqrt(float(v @ v) / level.size)


def work_units(plan: CyclePlan) -> float:
    """Cost of one cycle in fine-level smoothing sweeps.

    Each non-coarsest level visit costs ``(nu + 1 + T) * size_l / size_0`` with
    ``T = 1`` when the next level is embedded in it and ``T = 2`` otherwise;
    the coarsest solve is not counted.
    """
    total, visits = 0.0, 1
    size0 = plan.levels[0].size
    for l in range(plan.n_levels - 1):
        t = 1 if _embedded_pair(plan.levels[l], plan.levels[l + 1]) else 2
        total += visits * (plan.nu + 1 + t) * plan.levels[l].size / size0
        visits *= plan.gammas[l]
    return total


def _embedded_pair(fine: LevelGrid, coarse: LevelGrid) -> bool:
    if coarse.transition != FACTOR_R:
        return True
    return fine.period % coarse.period == 0


def wu_standard(gamma: int, nu: int) -> float:
    return 4.0 / (4.0 - gamma) * (nu + 2)


def wu_redblack(gamma: int, nu: int, l_max: int) -> float:
    if gamma == 1:
        return 2.0 * (nu + 2)
    if gamma == 2:
        return float(l_max * (nu + 2))
    raise ValueError("closed form given for gamma in {1, 2}")


def wu_general(r: float, d: int, gamma: int, nu: int, l_max: int, t: int) -> float:
    """Large-level closed form of the summed work units."""
    q = gamma / r**d
    if math.isclose(q, 1.0):
        return (nu + 1 + t) * l_max
    if q < 1:
        return (nu + 1 + t) / (1 - q)
    return (nu + 1 + t) * q**l_max / (q - 1)


@dataclass
class SolveReport:
    residuals: list[float]
    cr: float
    wu: float
    ecr: float
    cycles: int
    seed: int | None
    flags: list[str] = field(default_factory=list)


def measure_cr(plan: CyclePlan, n_warm: int = 15, n_avg: int = 5, seed: int = 0) -> SolveReport:
    """Asymptotic residual reduction per cycle for ``f = 0`` and a random start.

    The iterate is rescaled after every cycle (the iteration is linear), so the
    measurement never runs into floating-point underflow. A cycle that reduces
    the residual by more than ``DIRECT_RATIO`` marks the direct-solver regime
    and ends the run; its ratio is reported as ``cr``.
    """
    if n_warm < 5 or n_avg < 3:
        raise ValueError("need n_warm >= 5 and n_avg >= 3")
    lv = plan.levels[0]
    A = plan.ops[0].matrix
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(lv.size)
    u -= u.mean()
    f = np.zeros(lv.size)
    r0 = norm_h(lv, A @ u)
    res, ratios, flags = [r0], [], []
    scale = 1.0
    for _ in range(n_warm + n_avg):
        u = mg_cycle(plan, u, f)
        u -= u.mean()
        r = -(A @ u)
        r -= r.mean()
        rn = norm_h(lv, r)
        if not np.isfinite(rn):
            raise FloatingPointError("residual is not finite")
        ratios.append(rn / r0)
        scale *= ratios[-1]
        res.append(scale * res[0])
        if ratios[-1] < DIRECT_RATIO:
            flags.append(DIRECT_FLAG)
            break
        u *= r0 / rn
    if flags:
        cr = ratios[-1]
    else:
        cr = math.exp(np.mean(np.log(ratios[-n_avg:])))
    wu = work_units(plan)
    return SolveReport(res, cr, wu, cr ** (1.0 / wu), len(ratios), seed, flags)


def solve(plan: CyclePlan, f: np.ndarray, u0: np.ndarray | None = None, *, rtol: float = 1e-10,
          max_cycles: int = 50) -> tuple[np.ndarray, list[float]]:
    """Cycle until the relative residual drops below ``rtol``."""
    lv = plan.levels[0]
    A = plan.ops[0].matrix
    f = np.asarray(f, dtype=float) - np.mean(f)
    u = np.zeros(lv.size) if u0 is None else np.array(u0, dtype=float)
    res = [norm_h(lv, f - A @ u)]
    for _ in range(max_cycles):
        if res[-1] <= rtol * res[0]:
            break
        u = mg_cycle(plan, u, f)
        u -= u.mean()
        res.append(norm_h(lv, f - A @ u))
    return u, res
