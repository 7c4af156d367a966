import numpy as np
import pytest

from rbmg.cycle import (
    DIRECT_FLAG, CoarseSolveError, build_plan, coarse_correction, coarsest_solve, measure_cr,
    solve, work_units, wu_general, wu_redblack, wu_standard,
)


def rhs(plan, seed=0):
    f = np.random.default_rng(seed).standard_normal(plan.levels[0].size)
    return f - f.mean()


def test_two_level_1d_solves_in_one_cycle():
    plan = build_plan(1, 128, levels=2, nu1=0, nu2=1)
    _, res = solve(plan, rhs(plan), max_cycles=1)
    assert res[-1] / res[0] < 1e-12


def test_standard_v_cycle_converges():
    plan = build_plan(2, 32, cycle="v")
    _, res = solve(plan, rhs(plan), rtol=1e-10)
    assert res[-1] <= 1e-10 * res[0]
    assert len(res) <= 12


@pytest.mark.parametrize("omega,cr", [(0.8, 0.2211), (1.0, 0.0610), (1.2, 0.0798)])
def test_two_level_cr_frozen(omega, cr):
    plan = build_plan(2, 64, levels=2, omega=omega)
    assert measure_cr(plan).cr == pytest.approx(cr, abs=5e-4)


def test_cr_grid_independent():
    a = measure_cr(build_plan(2, 32, levels=2)).cr
    b = measure_cr(build_plan(2, 64, levels=2)).cr
    assert abs(a - b) < 0.03


def test_direct_solver_regime_flagged():
    plan = build_plan(2, 16, coarsening="redblack", levels=2, nu1=0, nu2=1)
    rep = measure_cr(plan)
    assert DIRECT_FLAG in rep.flags
    assert rep.cr < 1e-10


def test_measure_cr_deterministic():
    plan = build_plan(2, 16)
    assert measure_cr(plan, seed=3).residuals == measure_cr(plan, seed=3).residuals


def test_coarse_correction_idempotent():
    plan = build_plan(2, 16, levels=2)
    e = rhs(plan, 4)
    k1 = coarse_correction(plan, e)
    k2 = coarse_correction(plan, k1)
    assert np.abs(k1 - k2).max() < 1e-10 * np.abs(k1).max()


def test_coarse_solve_failure_raises():
    plan = build_plan(2, 16, levels=2)
    with pytest.raises(CoarseSolveError):
        coarsest_solve(plan.ops[1], rhs(plan)[: plan.levels[1].size], 1e-14, maxiter=1)


def test_work_units_standard():
    plan = build_plan(2, 64, cycle="v")
    assert work_units(plan) == pytest.approx(4 * (1 + 1 / 4 + 1 / 16))
    assert wu_standard(1, 2) == pytest.approx(16 / 3)


def test_work_units_redblack():
    v = build_plan(2, 64, coarsening="redblack", cycle="v")
    w = build_plan(2, 64, coarsening="redblack", cycle="w")
    assert work_units(v) == pytest.approx(7.875)
    assert work_units(w) == pytest.approx(24.0)
    assert wu_redblack(1, 2, 6) == 8.0 and wu_redblack(2, 2, 6) == 24.0


def test_work_units_factor_r():
    plan = build_plan(2, 64, coarsening="factor_r", r_target=2.0, cycle="w", smoother="jacobi", omega=0.8)
    assert plan.n_levels == 4
    assert work_units(plan) == pytest.approx(7.0)
    assert wu_general(2.0, 2, 2, 2, 10, 1) == pytest.approx(8.0)


@pytest.mark.parametrize("kw", [dict(cycle="x"), dict(nu1=-1), dict(coarse_op="zz"),
                                dict(coarsening="standard", coarse_op="g2fixed"), dict(levels=1)])
def test_build_plan_rejects(kw):
    with pytest.raises(ValueError):
        build_plan(2, 16, **kw)


def test_wu_factor_r_non_embedded_closed_form():
    assert wu_general(2.0, 2, 1, 2, 50, 2) == pytest.approx(20 / 3)


def test_ecr_recomputes_exactly():
    rep = measure_cr(build_plan(2, 32, coarsening="redblack", cycle="w"))
    assert rep.ecr == rep.cr ** (1.0 / rep.wu)
