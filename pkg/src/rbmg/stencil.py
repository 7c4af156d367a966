"""Stencils, discrete Laplacians and coarse-level operators.

A stencil is a map from integer offsets to coefficients together with a power
``p`` so that ``(L u)(x) = sum_j a_j u(x + j h) / h**p``. Offsets live either in
the level-local frame (how operators are usually printed) or in the
period-grid frame of the hierarchy (``frame="period"``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .grid import FACTOR_R, GridSpec, LevelGrid, _sublattice, fine_level

COARSE_OPS = ("ng", "ng2", "g", "g2q", "g1", "gn", "g2fixed")

# per-axis coefficients (center handled separately) and common denominator
_BUILTIN_2D = {
    2: (1, 4, [-1]),
    4: (12, 60, [-16, 1]),
    6: (180, 980, [-270, 27, -2]),
}


@dataclass(frozen=True)
class Stencil:
    coeffs: dict = field(default_factory=dict)
    scale_power: int = 2
    frame: str = "local"

    @property
    def dim(self) -> int:
        return len(next(iter(self.coeffs)))

    @property
    def center(self) -> float:
        return self.coeffs.get((0,) * self.dim, 0.0)

    @property
    def total(self) -> float:
        return float(sum(self.coeffs.values()))

    @property
    def radius(self) -> int:
        return max(max(abs(c) for c in o) for o in self.coeffs)

    def offsets(self) -> np.ndarray:
        return np.array(list(self.coeffs), dtype=np.int64).reshape(len(self.coeffs), -1)

    def values(self) -> np.ndarray:
        return np.array(list(self.coeffs.values()), dtype=float)

    def to_period(self, basis: np.ndarray) -> Stencil:
        if self.frame == "period":
            return self
        offs = self.offsets() @ np.asarray(basis).T
        return Stencil(dict(zip(map(tuple, offs.tolist()), self.values())), self.scale_power, "period")

    def to_local(self, basis: np.ndarray) -> Stencil:
        if self.frame == "local":
            return self
        inv = np.linalg.inv(np.asarray(basis, dtype=float))
        loc = self.offsets() @ inv.T
        if not np.allclose(loc, np.round(loc)):
            raise ValueError("stencil offsets are not on the level lattice")
        keys = map(tuple, np.round(loc).astype(np.int64).tolist())
        return Stencil(dict(zip(keys, self.values())), self.scale_power, "local")

    def is_symmetric(self, tol: float = 1e-13) -> bool:
        scale = max(abs(v) for v in self.coeffs.values())
        for o, v in self.coeffs.items():
            w = self.coeffs.get(tuple(-c for c in o), 0.0)
            if abs(v - w) > tol * scale:
                return False
        return True

    def __str__(self) -> str:
        return format_stencil(self)


def _exact(num: dict, denom: int, p: int = 2) -> Stencil:
    return Stencil({o: float(Fraction(v, denom)) for o, v in num.items() if v}, p, "local")


def builtin(dim: int, order: int) -> Stencil:
    """Built-in negative Laplacian in the level-local frame (coefficients of 1/h^2)."""
    if dim == 1 and order == 2:
        return _exact({(0,): 2, (1,): -1, (-1,): -1}, 1)
    if dim == 2 and order in _BUILTIN_2D:
        denom, center, axis = _BUILTIN_2D[order]
        num = {(0, 0): center}
        for k, a in enumerate(axis, start=1):
            for o in ((k, 0), (-k, 0), (0, k), (0, -k)):
                num[o] = a
        return _exact(num, denom)
    raise ValueError(f"no built-in stencil for dim={dim}, order={order}")


def format_stencil(s: Stencil) -> str:
    """Bracket layout: rows from top (largest second offset) to bottom."""
    offs = s.offsets()
    r = int(np.abs(offs).max())
    cells = {}
    for o, v in s.coeffs.items():
        cells[o] = f"{v:.6g}"
    width = max(len(c) for c in cells.values())
    if s.dim == 1:
        row = [cells.get((i,), "").rjust(width) for i in range(-r, r + 1)]
        return "[ " + " ".join(row) + f" ] / h^{s.scale_power}"
    lines = []
    for j in range(r, -r - 1, -1):
        row = [cells.get((i, j), "").rjust(width) for i in range(-r, r + 1)]
        lines.append("[ " + " ".join(row) + " ]")
    lines[-1] += f" / h^{s.scale_power}"
    return "\n".join(lines)


def assemble_offsets(level: LevelGrid, offsets: np.ndarray, values: np.ndarray,
                     rows: np.ndarray | None = None, cols_level: LevelGrid | None = None) -> sp.csr_matrix:
    """Sparse matrix with entry ``values[k]`` at (x, x + offsets[k]).

    ``offsets`` are period-grid offsets. ``cols_level`` defaults to ``level``
    (square operator); otherwise columns index that level's points.
    """
    target = cols_level or level
    i_idx, j_idx, vals = [], [], []
    src = np.arange(level.size) if rows is None else rows
    for off, v in zip(offsets, values):
        if v == 0:
            continue
        shifted = (level.coords[src] + off) % target.period
        j = target.index_of[np.ravel_multi_index(tuple(shifted.T), (target.period,) * target.dim)]
        if np.any(j < 0):
            raise ValueError(f"stencil offset {tuple(off)} is not compatible with this level")
        i_idx.append(src)
        j_idx.append(j)
        vals.append(np.full(len(src), v))
    shape = (level.size, target.size)
    if not vals:
        return sp.csr_matrix(shape)
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(i_idx), np.concatenate(j_idx))), shape=shape
    )


def assemble(L: Stencil, level: LevelGrid, h: float | None = None) -> sp.csr_matrix:
    """Matrix of ``L`` on ``level`` scaled by ``1/h**p`` (``h`` defaults to the level's)."""
    if L.dim != level.dim:
        raise ValueError("stencil and level dimensions differ")
    s = L.to_period(level.basis)
    h = level.h if h is None else h
    return assemble_offsets(level, s.offsets(), s.values() / h**L.scale_power)


def apply(L: Stencil, u: np.ndarray, level: LevelGrid) -> np.ndarray:
    """Apply ``L`` to grid values ``u`` on ``level`` with periodic wrap."""
    u = np.asarray(u)
    if u.shape != (level.size,):
        raise ValueError(f"expected {level.size} values, got shape {u.shape}")
    return assemble(L, level) @ u


def stencil_from_column(level: LevelGrid, col: np.ndarray, center: int) -> dict:
    """Offsets (period frame, wrapped to the nearest image) of a delta response."""
    nz = np.flatnonzero(col)
    offs = level.coords[nz] - level.coords[center]
    n = level.period
    offs = (offs + n // 2) % n - n // 2
    return {tuple(o): float(col[k]) for o, k in zip(offs.tolist(), nz)}


def _aux_levels(dim: int, fine_basis: np.ndarray, kind: str, reach: int):
    from .transfer import coarsen_for_kind

    n = 8
    while True:
        try:
            fine = _sublattice(fine_level(GridSpec(dim, n)), np.asarray(fine_basis), 1.0, "aux")
            coarse = coarsen_for_kind(fine, kind)
            if n >= 4 * reach + 8 and coarse.size >= 16:
                return fine, coarse
        except ValueError:
            pass
        n *= 2


def galerkin_stencil(L: Stencil, kind: str, fine_basis: np.ndarray | None = None,
                     tol: float = 1e-12) -> Stencil:
    """Coarse stencil of ``R L P`` for transfer ``kind``, read from delta responses.

    The result is in the period frame of the hierarchy and expressed in units
    of ``1/H**p`` for the coarse spacing ``H``.
    """
    from .transfer import restriction_stencil, spacing_ratio, transfer_pair

    dim = L.dim
    basis = np.eye(dim, dtype=np.int64) if fine_basis is None else np.asarray(fine_basis)
    Lp = L.to_period(basis)
    r_reach = restriction_stencil(kind).to_period(basis).radius
    reach = Lp.radius + 2 * r_reach
    fine, coarse = _aux_levels(dim, basis, kind, reach)
    R, P = transfer_pair(kind, fine, coarse)
    G = (R @ assemble(Lp, fine, h=1.0) @ P).tocsc()
    scale = spacing_ratio(kind) ** L.scale_power
    picks = [0, coarse.size // 3, (2 * coarse.size) // 3]
    found = []
    for c in picks:
        col = G[:, c].toarray().ravel() * scale
        found.append(stencil_from_column(coarse, col, c))
    ref = found[0]
    big = max(abs(v) for v in ref.values())
    for other in found[1:]:
        keys = set(ref) | set(other)
        if any(abs(ref.get(k, 0.0) - other.get(k, 0.0)) > tol * big for k in keys):
            raise RuntimeError("Galerkin operator is not translation invariant")
    clean = {k: v for k, v in ref.items() if abs(v) > tol * big}
    return Stencil(clean, L.scale_power, "period")


@dataclass(eq=False)
class LevelOperator:
    """Operator on one level: always a sparse matrix, plus its stencil when known."""

    level: LevelGrid
    matrix: sp.csr_matrix
    stencil: Stencil | None = None  # level-local frame
    builtin_order: int | None = None

    @property
    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()


def _on_level(s: Stencil, level: LevelGrid, order: int | None = None) -> LevelOperator:
    local = s.to_local(level.basis)
    return LevelOperator(level, assemble(local, level), local, order)


def coarse_operators(levels: list[LevelGrid], fine_op: Stencil, strategy: str,
                     kinds: list[str], order: int) -> list[LevelOperator]:
    """Operators on every level for a coarse-operator strategy.

    ``kinds[l]`` is the transfer kind between levels ``l`` and ``l + 1``.
    Factor-r Galerkin variants are formed as sparse products ``R A P``.
    """
    from .transfer import transfer_pair

    if strategy not in COARSE_OPS:
        raise ValueError(f"unknown coarse operator {strategy!r}")
    dim = levels[0].dim
    factor_r = any(lv.transition == FACTOR_R for lv in levels[1:])
    if strategy == "g1" and factor_r:
        raise ValueError("g1 is only defined for embedded (standard/red-black) coarsening")
    if strategy == "g2fixed" and not factor_r:
        raise ValueError("g2fixed is only defined for factor-r coarsening")

    ops = [_on_level(fine_op, levels[0], order)]
    first_gen = None
    for l in range(1, len(levels)):
        lv, parent, kind = levels[l], levels[l - 1], kinds[l - 1]
        nG = strategy in ("ng", "ng2") or (strategy == "gn" and l > 1)
        if nG:
            q = 2 if strategy == "ng2" else order
            ops.append(_on_level(builtin(dim, q), lv, q))
            continue
        if strategy == "g2fixed":
            if first_gen is None:
                first_gen = galerkin_stencil(builtin(dim, order), "fw2d" if dim == 2 else "fw1d")
                first_gen = first_gen.to_local(2 * np.eye(dim, dtype=np.int64))
            ops.append(_on_level(first_gen, lv))
            continue
        if strategy == "g1" and l > 1:
            ops.append(_on_level(first_gen, lv))
            continue
        # Galerkin from the level above (from the order-2 operator for g2q on level 1)
        above = ops[-1]
        if strategy == "g2q" and l == 1:
            above = _on_level(builtin(dim, 2), parent)
        if lv.embedded and above.stencil is not None:
            s = galerkin_stencil(above.stencil, kind, parent.basis)
            op = _on_level(s, lv)
        else:
            R, P = transfer_pair(kind, parent, lv)
            op = LevelOperator(lv, (R @ above.matrix @ P).tocsr(), None)
        if l == 1 and op.stencil is not None:
            first_gen = op.stencil
        ops.append(op)
    return ops
