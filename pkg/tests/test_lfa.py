import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rbmg.lfa import (
    LfaConfig, aliases, coarse_correction_matrix, esr, factor_r_closed_forms, galerkin_symbol_check,
    jacobi_mu_numeric, low_mask, rho_at, rho_two_level, sample_thetas, smoother_matrix,
    smoothing_factor, symbol, theta_bar, wu_factor_r,
)
from rbmg.stencil import builtin, galerkin_stencil


def test_theta_bar_wraps_zero_to_minus_pi():
    assert theta_bar(0.0) == pytest.approx(-math.pi)
    assert theta_bar(1.0) == pytest.approx(1.0 - math.pi)
    assert theta_bar(-1.0) == pytest.approx(math.pi - 1.0)


def test_sampling_grid():
    th = sample_thetas(8, 2)
    assert th.shape == (64, 2)
    assert th.min() == pytest.approx(-math.pi) and th.max() < math.pi
    with pytest.raises(ValueError):
        sample_thetas(7, 1)


def test_low_masks_partition():
    th = sample_thetas(32, 2)
    assert low_mask(th, "standard").sum() == 32 * 32 // 4
    assert low_mask(th, "redblack").sum() == 32 * 32 // 2


def test_smoothing_factor_rbgs():
    assert smoothing_factor(LfaConfig(m=64)).value == pytest.approx(0.25, abs=1e-12)


def test_smoothing_factor_jacobi_matches_closed_form():
    fr = factor_r_closed_forms(2.0, 2)
    assert smoothing_factor(LfaConfig(smoother="jacobi", omega=fr.omega_star)).value == pytest.approx(fr.mu_star)


@pytest.mark.parametrize("omega,rho", [(0.8, 0.22654), (1.0, 0.0625), (1.2, 0.08157)])
def test_two_level_rho_frozen(omega, rho):
    assert rho_two_level(LfaConfig(omega=omega, m=64)).value == pytest.approx(rho, abs=1e-5)


@pytest.mark.parametrize("cfg", [LfaConfig(dim=1, nu1=0, nu2=1, m=64),
                                 LfaConfig(coarsening="redblack", nu1=0, nu2=1, m=64)])
def test_redblack_galerkin_two_level_is_exact(cfg):
    assert rho_two_level(cfg).value < 1e-14


def test_redblack_non_galerkin_is_not_exact():
    cfg = LfaConfig(coarsening="redblack", coarse_op="ng", nu1=0, nu2=1, m=64)
    assert rho_two_level(cfg).value == pytest.approx(0.07385, abs=1e-4)


@pytest.mark.parametrize("op,rho", [("ng", 0.07929), ("g", 0.04389), ("ng2", 0.05649), ("g2q", 0.04629)])
def test_order4_optimal_rho_frozen(op, rho):
    best = min(rho_two_level(LfaConfig(order=4, coarse_op=op, omega=w, m=64)).value
               for w in np.arange(0.9, 1.3001, 0.02))
    assert best == pytest.approx(rho, abs=1e-4)


@pytest.mark.parametrize("cfg", [LfaConfig(), LfaConfig(coarsening="redblack"),
                                 LfaConfig(order=4, transfer="cubic"), LfaConfig(dim=1)])
def test_galerkin_symbol_equals_stencil(cfg):
    assert galerkin_symbol_check(cfg, sample_thetas(16, cfg.dim)) < 1e-12


def test_rho_at_grid_shape_and_nan_at_origin():
    grid = rho_at(LfaConfig(m=16))
    assert grid.shape == (16, 16)
    assert np.isnan(grid[8, 8])
    assert np.nanmax(grid) == pytest.approx(0.0625, abs=1e-12)


def test_factor_r_closed_forms():
    fr = factor_r_closed_forms(2.0, 2)
    assert (fr.zeta, fr.omega_star, fr.mu_star) == pytest.approx((0.25, 0.8, 0.6))
    assert jacobi_mu_numeric(0.8, 2.0, 2, m=128) == pytest.approx(0.6)


def test_wu_and_esr_factor_r():
    assert wu_factor_r(2.0, 2, 2, 2, 5) == pytest.approx(10.0)
    assert esr(2.0, 2, 2, 2, 5) == pytest.approx(0.6 ** 0.2)


@pytest.mark.parametrize("kw", [dict(coarsening="factor_r"), dict(coarse_op="g2fixed"), dict(m=3),
                                dict(dim=1, coarsening="redblack")])
def test_config_rejects(kw):
    with pytest.raises(ValueError):
        LfaConfig(**kw)


THETA = st.floats(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)


@settings(max_examples=40, deadline=None)
@given(THETA, THETA, st.sampled_from(["standard", "redblack"]), st.sampled_from([2, 4]))
def test_coarse_correction_idempotent(t1, t2, coarsening, order):
    th = np.array([t1, t2])
    if coarsening == "redblack" and abs(t1) + abs(t2) >= math.pi:
        return
    if np.abs(th).max() < 1e-2:
        return
    K = coarse_correction_matrix(LfaConfig(order=order, coarsening=coarsening), th)
    assert np.abs(K @ K - K).max() < 1e-8


@settings(max_examples=40, deadline=None)
@given(THETA, THETA, st.floats(0.5, 1.5))
def test_standard_smoother_is_block_diagonal(t1, t2, omega):
    S = smoother_matrix(LfaConfig(omega=omega), np.array([t1, t2]))
    assert np.abs(S[:2, 2:]).max() == 0 and np.abs(S[2:, :2]).max() == 0


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.sampled_from(["fw2d", "rb2d"]))
def test_galerkin_symbol_consistency_random(t1, t2, kind):
    cfg = LfaConfig(coarsening="standard" if kind == "fw2d" else "redblack")
    th = np.array([t1, t2])
    assert galerkin_symbol_check(cfg, th[None]) < 1e-11


def test_aliases_order():
    al = aliases(np.array([0.5, -0.25]), LfaConfig())
    assert al[1] == pytest.approx([0.5 - math.pi, math.pi - 0.25])
    assert al[2] == pytest.approx([0.5 - math.pi, -0.25])
    assert al[3] == pytest.approx([0.5, math.pi - 0.25])


def test_symbol_of_shifted_basis():
    g = galerkin_stencil(builtin(2, 2), "fw2d")
    th = np.array([0.3, -0.7])
    assert symbol(g, th).imag == pytest.approx(0.0, abs=1e-14)
