import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rbmg.grid import GridSpec, coarsen_factor_r, coarsen_redblack, coarsen_standard, fine_level
from rbmg.transfer import adjoint_check, factor_r_interp_1d, restriction_stencil, transfer_pair


def pair(kind, dim, n, r=2.5):
    fine = fine_level(GridSpec(dim, n))
    if kind == "factor_r":
        return fine, coarsen_factor_r(fine, r)
    if kind == "rb2d":
        return fine, coarsen_redblack(fine)
    return fine, coarsen_standard(fine)


@pytest.mark.parametrize("kind", ["fw1d", "fw2d", "rb2d", "cubic2d"])
def test_restriction_weights_sum_to_one(kind):
    assert restriction_stencil(kind).total == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([("fw1d", 1), ("fw2d", 2), ("rb2d", 2), ("cubic2d", 2), ("factor_r", 1), ("factor_r", 2)]),
       st.sampled_from([16, 24, 32]), st.floats(1.2, 3.5), st.integers(0, 100))
def test_adjointness(case, n, r, seed):
    kind, dim = case
    fine, coarse = pair(kind, dim, n, r)
    assert adjoint_check(kind, fine, coarse, trials=3, seed=seed) < 1e-12


@pytest.mark.parametrize("kind,dim", [("fw1d", 1), ("fw2d", 2), ("rb2d", 2), ("cubic2d", 2), ("factor_r", 2)])
def test_constants_preserved(kind, dim):
    fine, coarse = pair(kind, dim, 16)
    R, P = transfer_pair(kind, fine, coarse)
    assert np.allclose(P @ np.ones(coarse.size), 1.0)
    restricted = R @ np.ones(fine.size)
    if kind == "factor_r":  # non-integer ratio: only the mean is kept
        assert restricted.mean() == pytest.approx(1.0)
    else:
        assert np.allclose(restricted, 1.0)


def test_linear_interpolation_exact_for_linear_data():
    P = factor_r_interp_1d(10, 4).toarray()
    xc = np.arange(4) / 4
    xf = np.arange(10) / 10
    inner = xf < 0.75
    assert np.allclose((P @ xc)[inner], xf[inner])


def test_cubic_reproduces_cubics():
    fine, coarse = pair("cubic2d", 2, 32)
    _, P = transfer_pair("cubic2d", fine, coarse)
    xc = coarse.coords / 32.0
    p = lambda x: x[:, 0] ** 3 - 2 * x[:, 0] * x[:, 1] ** 2 + x[:, 1]
    xf = fine.coords / 32.0
    inner = np.all((xf > 0.2) & (xf < 0.8), axis=1)
    assert np.abs((P @ p(xc)) - p(xf))[inner].max() < 1e-12


def test_kind_level_mismatch():
    fine, coarse = pair("rb2d", 2, 16)
    with pytest.raises(ValueError):
        transfer_pair("fw2d", fine, coarse)
