import numpy as np
import pytest

from rbmg.grid import GridSpec, coarsen_redblack, fine_level
from rbmg.reduction import (
    assemble_periodic, red_indices, reduction_solve, reduction_transfers, schur_reduce,
    verify_direct_solver_equivalence,
)
from rbmg.stencil import assemble, builtin, galerkin_stencil


@pytest.mark.parametrize("dim,n", [(1, 16), (2, 16), (2, 8)])
def test_reduction_matches_two_level_cycle(dim, n):
    assert verify_direct_solver_equivalence(n, dim).discrepancy < 1e-12


def test_zero_rhs_gives_zero():
    rep = verify_direct_solver_equivalence(8, 2, rhs=np.zeros(64))
    assert rep.discrepancy == 0.0 and not rep.x_reduction.any()


def test_reduction_solve_is_exact():
    A = assemble_periodic(2, 8)
    b = np.random.default_rng(0).standard_normal(64)
    b -= b.mean()
    x = reduction_solve(A, b, red_indices(2, 8))
    assert np.abs(A @ x - b).max() < 1e-12


def test_schur_1d_is_half_coarse_laplacian():
    s = schur_reduce(assemble_periodic(1, 8), red_indices(1, 8))
    expect = np.zeros((4, 4))
    for i in range(4):
        expect[i, i], expect[i, (i + 1) % 4], expect[i, (i - 1) % 4] = 2, -1, -1
    assert np.allclose(2 * s.coarse, expect)


def test_schur_2d_equals_first_galerkin_operator():
    n = 8
    s = schur_reduce(assemble_periodic(2, n), red_indices(2, n))
    child = coarsen_redblack(fine_level(GridSpec(2, n)))
    g = galerkin_stencil(builtin(2, 2), "rb2d").to_local(child.basis)
    G = assemble(g, child, h=1.0).toarray()
    # the child level orders points like the black set (by flat index)
    assert np.abs(s.coarse - G).max() < 1e-13


def test_reconstruction_exact():
    A = assemble_periodic(2, 8).toarray()
    s = schur_reduce(A, red_indices(2, 8))
    order = np.concatenate([s.red, s.black])
    assert np.abs(s.reconstruct() - A[np.ix_(order, order)]).max() < 1e-13


def test_transfers_are_scaled_adjoints():
    R, P = reduction_transfers(8)
    assert np.allclose(P, 2 * R.T)
    assert np.allclose(R.sum(axis=1), 1.0)


def test_empty_red_set_returns_matrix():
    A = assemble_periodic(1, 8)
    assert np.array_equal(schur_reduce(A, []).coarse, A.toarray())


def test_rejects_non_scalar_red_block():
    A = assemble_periodic(1, 8).toarray().astype(float)
    A[1, 1] = 3.0
    with pytest.raises(ValueError):
        schur_reduce(A, red_indices(1, 8))


@pytest.mark.parametrize("n", [7, 2])
def test_assemble_rejects(n):
    with pytest.raises(ValueError):
        assemble_periodic(2, n)
