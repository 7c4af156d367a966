"""Restriction and interpolation between consecutive levels.

Every kind is a pair with ``P = rho * R^T`` where ``rho`` is the point-count
ratio, which makes ``R`` the adjoint of ``P`` under the ``h^d``-weighted inner
products.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from .grid import FACTOR_R, REDBLACK, STANDARD, LevelGrid, coarsen_redblack, coarsen_standard
from .stencil import Stencil, assemble_offsets

FW1D = "fw1d"
FW2D = "fw2d"
RB2D = "rb2d"
CUBIC2D = "cubic2d"
FACTOR_R_LINEAR = "factor_r"
KINDS = (FW1D, FW2D, RB2D, CUBIC2D, FACTOR_R_LINEAR)

_CUBIC = np.array([-1, 0, 9, 16, 9, 0, -1]) / 32.0


def restriction_stencil(kind: str) -> Stencil:
    """Restriction weights in the fine level's local frame."""
    if kind == FW1D:
        return Stencil({(-1,): 0.25, (0,): 0.5, (1,): 0.25}, 0)
    if kind == FW2D:
        w = np.array([0.25, 0.5, 0.25])
        return Stencil({(i - 1, j - 1): w[i] * w[j] for i in range(3) for j in range(3)}, 0)
    if kind == RB2D:
        return Stencil({(0, 0): 0.5, (1, 0): 0.125, (-1, 0): 0.125, (0, 1): 0.125, (0, -1): 0.125}, 0)
    if kind == CUBIC2D:
        return Stencil(
            {(i - 3, j - 3): _CUBIC[i] * _CUBIC[j] for i in range(7) for j in range(7) if _CUBIC[i] * _CUBIC[j]},
            0,
        )
    raise ValueError(f"no restriction stencil for transfer kind {kind!r}")


def spacing_ratio(kind: str) -> float:
    if kind == RB2D:
        return math.sqrt(2)
    if kind in (FW1D, FW2D, CUBIC2D):
        return 2.0
    raise ValueError(f"spacing ratio of {kind!r} depends on the grids")


def kind_for(transition: str, dim: int, transfer: str = "linear") -> str:
    """Transfer kind used for a coarsening transition."""
    if transfer not in ("linear", "cubic"):
        raise ValueError(f"unknown transfer order {transfer!r}")
    if transition == FACTOR_R:
        return FACTOR_R_LINEAR
    if dim == 1:
        if transfer == "cubic":
            raise ValueError("cubic transfers are only provided in 2D")
        return FW1D
    if transition == REDBLACK:
        return RB2D
    return CUBIC2D if transfer == "cubic" else FW2D


def coarsen_for_kind(fine: LevelGrid, kind: str) -> LevelGrid:
    if kind == RB2D:
        return coarsen_redblack(fine)
    if kind in (FW1D, FW2D, CUBIC2D):
        return coarsen_standard(fine)
    raise ValueError(f"kind {kind!r} does not define an embedded coarse level")


def factor_r_interp_1d(n_fine: int, n_coarse: int) -> sp.csr_matrix:
    """Periodic linear interpolation from ``n_coarse`` to ``n_fine`` points.

    Fine point ``j`` sits at ``j/r`` coarse spacings with ``r = n_fine/n_coarse``;
    it takes ``1 - w`` from ``k = floor(j/r)`` and ``w = j/r - k`` from ``k + 1``.
    """
    j = np.arange(n_fine)
    k, rem = np.divmod(j * n_coarse, n_fine)
    w = rem / n_fine
    rows = np.concatenate([j, j])
    cols = np.concatenate([k, (k + 1) % n_coarse])
    vals = np.concatenate([1 - w, w])
    keep = vals != 0
    return sp.csr_matrix((vals[keep], (rows[keep], cols[keep])), shape=(n_fine, n_coarse))


def transfer_pair(kind: str, fine: LevelGrid, coarse: LevelGrid) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Restriction ``R`` (coarse x fine) and interpolation ``P`` (fine x coarse)."""
    rho = fine.size / coarse.size
    if kind == FACTOR_R_LINEAR:
        if coarse.transition != FACTOR_R:
            raise ValueError("factor-r transfers need a factor-r coarse level")
        p1 = factor_r_interp_1d(fine.period, coarse.period)
        P = p1 if fine.dim == 1 else sp.kron(p1, p1, format="csr")
        return (P.T / rho).tocsr(), P
    expected = {FW1D: STANDARD, FW2D: STANDARD, CUBIC2D: STANDARD, RB2D: REDBLACK}.get(kind)
    if expected is None:
        raise ValueError(f"unknown transfer kind {kind!r}")
    if coarse.transition != expected and not (kind == FW1D and coarse.transition == REDBLACK):
        raise ValueError(f"transfer {kind!r} does not match a {coarse.transition} level")
    st = restriction_stencil(kind).to_period(fine.basis)
    R = assemble_offsets(coarse, st.offsets(), st.values(), cols_level=fine)
    return R, (rho * R.T).tocsr()


def restrict(kind: str, u_fine: np.ndarray, fine: LevelGrid, coarse: LevelGrid) -> np.ndarray:
    R, _ = transfer_pair(kind, fine, coarse)
    return R @ u_fine


def interpolate(kind: str, u_coarse: np.ndarray, coarse: LevelGrid, fine: LevelGrid) -> np.ndarray:
    _, P = transfer_pair(kind, fine, coarse)
    return P @ u_coarse


def adjoint_check(kind: str, fine: LevelGrid, coarse: LevelGrid, trials: int = 5, seed: int = 0) -> float:
    """Worst ``|<R u, w>_H - <u, P w>_h| / (|u|_h |w|_H)`` over random trials."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    R, P = transfer_pair(kind, fine, coarse)
    rng = np.random.default_rng(seed)
    hd, Hd = 1.0 / fine.size, 1.0 / coarse.size  # cell volumes on the unit domain
    worst = 0.0
    for _ in range(trials):
        u = rng.standard_normal(fine.size)
        w = rng.standard_normal(coarse.size)
        lhs = Hd * np.dot(R @ u, w)
        rhs = hd * np.dot(u, P @ w)
        norm = math.sqrt(hd * u @ u) * math.sqrt(Hd * w @ w)
        worst = max(worst, abs(lhs - rhs) / norm)
    return worst
