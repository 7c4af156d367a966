"""Cyclic (1D) and red-black (2D) reduction on explicit periodic matrices.

This is an independent dense-algebra oracle for the direct-solver property of
two-level red-black cycles and for the first Galerkin coarse operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cycle import build_plan, mg_cycle


def assemble_periodic(dim: int, n: int) -> sp.csr_matrix:
    """Unscaled integer matrix ``h^2 L_h`` of the periodic Laplacian (row-major order)."""
    if n < 4 or n % 2:
        raise ValueError(f"need even n >= 4, got {n}")
    t = sp.diags([2, -1, -1, -1, -1], [0, 1, -1, n - 1, -(n - 1)], shape=(n, n), dtype=np.int64)
    if dim == 1:
        return t.tocsr()
    if dim == 2:
        eye = sp.identity(n, dtype=np.int64)
        return (sp.kron(t, eye) + sp.kron(eye, t)).tocsr()
    raise ValueError("dim must be 1 or 2")


def red_indices(dim: int, n: int) -> np.ndarray:
    """Flat indices with odd coordinate sum."""
    idx = np.indices((n,) * dim).reshape(dim, -1)
    return np.flatnonzero(idx.sum(axis=0) % 2 == 1)


@dataclass
class SchurResult:
    red: np.ndarray
    black: np.ndarray
    c: float  # red diagonal block is c * I
    a_br: np.ndarray
    coarse: np.ndarray  # Schur complement on the black set

    def reconstruct(self) -> np.ndarray:
        """``Lhat Ahat Lhat^T`` in (red, black) order."""
        nr, nb = len(self.red), len(self.black)
        lower = np.block([[np.eye(nr), np.zeros((nr, nb))], [self.a_br / self.c, np.eye(nb)]])
        mid = np.block([[self.c * np.eye(nr), np.zeros((nr, nb))], [np.zeros((nb, nr)), self.coarse]])
        return lower @ mid @ lower.T


def schur_reduce(A, red) -> SchurResult:
    """Eliminate the ``red`` unknowns of a symmetric matrix with scalar red block."""
    A = A.toarray() if sp.issparse(A) else np.asarray(A)
    A = A.astype(float)
    red = np.asarray(red, dtype=np.int64)
    black = np.setdiff1d(np.arange(A.shape[0]), red)
    if len(red) == 0:
        return SchurResult(red, black, 1.0, np.zeros((len(black), 0)), A.copy())
    a_rr = A[np.ix_(red, red)]
    c = a_rr[0, 0]
    if c <= 0 or not np.allclose(a_rr, c * np.eye(len(red)), atol=0.0):
        raise ValueError("red diagonal block is not a positive multiple of the identity")
    a_br = A[np.ix_(black, red)]
    coarse = A[np.ix_(black, black)] - a_br @ a_br.T / c
    return SchurResult(red, black, c, a_br, coarse)


def reduction_solve(A, b, red) -> np.ndarray:
    """Exact solve by eliminating red, solving black (zero-mean), back-substituting."""
    A = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    s = schur_reduce(A, red)
    b = np.asarray(b, dtype=float)
    rhs = b[s.black] - s.a_br @ b[s.red] / s.c
    xb = np.linalg.lstsq(s.coarse, rhs - rhs.mean(), rcond=None)[0]
    xb -= xb.mean()
    x = np.empty(len(b))
    x[s.black] = xb
    x[s.red] = (b[s.red] - s.a_br.T @ xb) / s.c
    return x - x.mean()


def reduction_transfers(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Restriction ``1/8 [Lt 4I]`` and interpolation ``1/4 [Lt; 4I]`` in natural column order."""
    A = assemble_periodic(2, n).toarray()
    red = red_indices(2, n)
    black = np.setdiff1d(np.arange(n * n), red)
    lt = -A[np.ix_(black, red)]
    R = np.zeros((len(black), n * n))
    R[:, red] = lt / 8
    R[:, black] = np.eye(len(black)) / 2
    P = np.zeros((n * n, len(black)))
    P[red, :] = lt.T / 4
    P[black, :] = np.eye(len(black))
    return R, P


@dataclass
class EquivalenceReport:
    n: int
    dim: int
    discrepancy: float  # max |x_red - x_mg| / max |x_red|
    x_reduction: np.ndarray
    x_multigrid: np.ndarray


def verify_direct_solver_equivalence(n: int, dim: int, seed: int = 0, rhs: np.ndarray | None = None) -> EquivalenceReport:
    """Compare reduction with one two-level red-black cycle (nu = (0, 1), omega = 1)."""
    A = assemble_periodic(dim, n)
    if rhs is None:
        rhs = np.random.default_rng(seed).standard_normal(n**dim)
    b = np.asarray(rhs, dtype=float) - np.mean(rhs)
    x = reduction_solve(A, b, red_indices(dim, n))
    plan = build_plan(dim, n, coarsening="redblack", levels=2, nu1=0, nu2=1, omega=1.0,
                      smoother="rbgs", coarse_op="g", coarse_tol=1e-14, n_min=2)
    h = 1.0 / n
    u = mg_cycle(plan, np.zeros(n**dim), b / h**2)
    u -= u.mean()
    scale = np.max(np.abs(x))
    disc = 0.0 if scale == 0 else float(np.max(np.abs(x - u)) / scale)
    return EquivalenceReport(n, dim, disc, x, u)
