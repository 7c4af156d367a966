"""Periodic grids and coarse-level hierarchies.

Every level is a set of points with its own spacing ``h``. Levels produced by
standard or red-black coarsening are sublattices of the finest grid and keep
finest-grid indices; factor-r levels are independent Cartesian grids.
"""

from __future__ import annotations

import math
from functools import cached_property
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

STANDARD = "standard"
REDBLACK = "redblack"
FACTOR_R = "factor_r"
VARIABLE = "variable"
STRATEGIES = (STANDARD, REDBLACK, FACTOR_R, VARIABLE)

# one red-black step in level-local coordinates: columns (1,1) and (-1,1)
_RB_STEP = np.array([[1, -1], [1, 1]])


@dataclass(frozen=True)
class GridSpec:
    """Fine periodic grid on [0,1]^dim with ``n`` points per direction."""

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 4:
            raise ValueError(f"n must be at least 4, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n


@dataclass(frozen=True)
class CoarseningPlan:
    """How to build coarse levels.

    ``levels`` counts all levels including the fine one; ``None`` derives it
    from ``n_min`` (coarsest level keeps at least ``n_min**dim`` points).
    """

    strategy: str = STANDARD
    r_target: float | None = None
    n_min: int = 8
    levels: int | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown coarsening strategy {self.strategy!r}")
        if self.strategy == FACTOR_R and (self.r_target is None or self.r_target <= 1):
            raise ValueError("factor-r coarsening needs r_target > 1")
        if self.n_min < 2:
            raise ValueError("n_min must be at least 2")
        if self.levels is not None and self.levels < 1:
            raise ValueError("levels must be positive")

    def transition(self, l: int) -> str:
        """Strategy used to go from level ``l`` to ``l + 1``."""
        if self.strategy == VARIABLE:
            return REDBLACK if l < 2 else STANDARD
        return self.strategy


@dataclass(frozen=True, eq=False)
class LevelGrid:
    """One grid level.

    ``coords`` are integer indices on a periodic grid with ``period`` points
    per direction: the finest grid for embedded levels, the level itself for
    independent ones. ``basis`` maps level-local steps to those indices.
    """

    dim: int
    kind: str  # "embedded" | "independent"
    period: int
    basis: np.ndarray
    h: float
    coords: np.ndarray
    transition: str | None = None

    @property
    def size(self) -> int:
        return len(self.coords)

    @property
    def embedded(self) -> bool:
        return self.kind == "embedded"

    @cached_property
    def flat(self) -> np.ndarray:
        return np.ravel_multi_index(tuple(self.coords.T), (self.period,) * self.dim)

    @cached_property
    def index_of(self) -> np.ndarray:
        """Map flat period-grid index to level index (-1 when absent)."""
        out = np.full(self.period**self.dim, -1, dtype=np.int64)
        out[self.flat] = np.arange(self.size)
        return out

    @cached_property
    def local(self) -> np.ndarray:
        """Level-local integer coordinates ``k`` with ``basis @ k = coords``."""
        return _solve_int(self.basis, self.coords)

    def offsets_to_period(self, local_offsets: np.ndarray) -> np.ndarray:
        """Express level-local offsets as period-grid offsets."""
        return np.asarray(local_offsets) @ self.basis.T

    def colorable(self) -> bool:
        """True when the parity of ``sum(local)`` is consistent under wrap."""
        shifts = _solve_frac(self.basis, self.period * np.eye(self.dim, dtype=np.int64))
        return all(s.denominator == 1 and s.numerator % 2 == 0 for s in shifts)

    def red_mask(self) -> np.ndarray:
        """Red points: odd coordinate sum in level-local coordinates."""
        if not self.colorable():
            raise ValueError(
                f"level with {self.size} points has no consistent red-black coloring"
            )
        return self.local.sum(axis=1) % 2 == 1

    def neighbor(self, offset) -> np.ndarray:
        """Level index of ``x + offset`` (period-grid offset) for every point."""
        shifted = (self.coords + np.asarray(offset)) % self.period
        idx = self.index_of[np.ravel_multi_index(tuple(shifted.T), (self.period,) * self.dim)]
        if np.any(idx < 0):
            raise ValueError(f"offset {tuple(offset)} leaves the level lattice")
        return idx

    def as_array(self, values: np.ndarray) -> np.ndarray:
        """Reshape values of a Cartesian level to a ``(n,)*dim`` array."""
        if self.size != self.period**self.dim:
            raise ValueError("level is not a full Cartesian grid")
        return np.asarray(values).reshape((self.period,) * self.dim)


def _solve_frac(basis: np.ndarray, rhs: np.ndarray) -> list[Fraction]:
    """Exact B^{-1} rhs for small integer matrices (all entries flattened)."""
    b = np.asarray(basis, dtype=np.int64)
    d = b.shape[0]
    if d == 1:
        det = int(b[0, 0])
        adj = np.array([[1]])
    else:
        det = int(b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0])
        adj = np.array([[b[1, 1], -b[0, 1]], [-b[1, 0], b[0, 0]]])
    prod = adj @ np.asarray(rhs, dtype=np.int64).reshape(d, -1)
    return [Fraction(int(v), det) for v in prod.ravel()]


def _solve_int(basis: np.ndarray, coords: np.ndarray) -> np.ndarray:
    d = basis.shape[0]
    det = round(np.linalg.det(basis))
    adj = np.round(np.linalg.inv(basis) * det).astype(np.int64)
    num = np.asarray(coords, dtype=np.int64) @ adj.T
    if np.any(num % det):
        raise ValueError("point is not on the level lattice")
    return (num // det).reshape(-1, d)


def fine_level(spec: GridSpec) -> LevelGrid:
    axes = [np.arange(spec.n)] * spec.dim
    coords = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
    return LevelGrid(
        dim=spec.dim,
        kind="embedded",
        period=spec.n,
        basis=np.eye(spec.dim, dtype=np.int64),
        h=spec.h,
        coords=coords,
    )


def _sublattice(parent: LevelGrid, basis: np.ndarray, h: float, transition: str) -> LevelGrid:
    n = parent.period
    wrap = _solve_frac(basis, n * np.eye(parent.dim, dtype=np.int64))
    if any(w.denominator != 1 for w in wrap):
        raise ValueError(
            f"{transition} coarsening of a level with {parent.size} points does not "
            "close under periodic wrap (grid too small or odd)"
        )
    det = round(abs(np.linalg.det(basis)))
    adj = np.round(np.linalg.inv(basis) * np.linalg.det(basis)).astype(np.int64)
    keep = np.all((parent.coords @ adj.T) % det == 0, axis=1)
    return LevelGrid(
        dim=parent.dim,
        kind="embedded",
        period=n,
        basis=basis,
        h=h,
        coords=parent.coords[keep],
        transition=transition,
    )


def coarsen_standard(parent: LevelGrid) -> LevelGrid:
    if not parent.embedded:
        raise ValueError("standard coarsening needs an embedded level")
    return _sublattice(parent, 2 * parent.basis, 2 * parent.h, STANDARD)


def coarsen_redblack(parent: LevelGrid) -> LevelGrid:
    if parent.dim == 1:
        # in 1D the black points are exactly the standard coarse grid
        return coarsen_standard(parent)
    if not parent.embedded:
        raise ValueError("red-black coarsening needs an embedded level")
    if not parent.colorable():
        raise ValueError("red-black coarsening needs an even, colorable level")
    return _sublattice(parent, parent.basis @ _RB_STEP, math.sqrt(2) * parent.h, REDBLACK)


def _floor_div(n: int, r_target: float) -> int:
    return math.floor(Fraction(n) / Fraction(r_target).limit_denominator(10**9))


def coarsen_factor_r(parent: LevelGrid, r_target: float) -> LevelGrid:
    if parent.size != parent.period**parent.dim:
        raise ValueError("factor-r coarsening needs a full Cartesian level")
    m = _floor_div(parent.period, r_target)
    if m < 2:
        raise ValueError("factor-r coarsening produced fewer than 2 points")
    axes = [np.arange(m)] * parent.dim
    coords = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
    return LevelGrid(
        dim=parent.dim,
        kind="independent",
        period=m,
        basis=np.eye(parent.dim, dtype=np.int64),
        h=1.0 / m,
        coords=coords,
        transition=FACTOR_R,
    )


def _coarsen(parent: LevelGrid, how: str, r_target: float | None) -> LevelGrid:
    if how == STANDARD:
        return coarsen_standard(parent)
    if how == REDBLACK:
        return coarsen_redblack(parent)
    return coarsen_factor_r(parent, r_target)


def build_hierarchy(spec: GridSpec, plan: CoarseningPlan) -> list[LevelGrid]:
    """Fine level first, then successively coarser levels."""
    if plan.strategy in (REDBLACK, VARIABLE) and spec.n % 2:
        raise ValueError(f"red-black coarsening needs even n, got n={spec.n}")
    if plan.strategy == VARIABLE and spec.dim != 2:
        raise ValueError("variable coarsening is defined for dim=2")
    levels = [fine_level(spec)]
    floor_points = plan.n_min**spec.dim
    while plan.levels is None or len(levels) < plan.levels:
        try:
            nxt = _coarsen(levels[-1], plan.transition(len(levels) - 1), plan.r_target)
        except ValueError:
            nxt = None
        if nxt is None or nxt.size < floor_points:
            if plan.levels is not None:
                raise ValueError(
                    f"{plan.levels} levels requested but n={spec.n} with n_min="
                    f"{plan.n_min} allows only {len(levels)}"
                )
            break
        levels.append(nxt)
    return levels


def factor_r_sizes(n0: int, r_target: float, n_min: int) -> list[tuple[int, Fraction]]:
    """Grid sizes and exact ratios ``r_l = n_l / n_{l+1}`` for factor-r coarsening.

    The last entry has ratio ``None`` since it is the coarsest level.
    """
    if not (n0 > n_min >= 2) or r_target <= 1:
        raise ValueError("need n0 > n_min >= 2 and r_target > 1")
    sizes = [n0]
    while True:
        m = _floor_div(sizes[-1], r_target)
        if m < n_min:
            break
        sizes.append(m)
    out = [(a, Fraction(a, b)) for a, b in zip(sizes, sizes[1:])]
    out.append((sizes[-1], None))
    return out


def rbc_index_map(n: int) -> dict[tuple[int, int], tuple[int, int]]:
    """Black finest index ``j`` to red-black child index ``k`` on an ``n x n`` grid.

    ``k = ((j1+j2)/2, (j2-j1)/2)``, reduced into ``[0, n)``.
    """
    if n % 2:
        raise ValueError(f"red-black index map needs even n, got {n}")
    out = {}
    for j1 in range(n):
        for j2 in range(n):
            if (j1 + j2) % 2 == 0:
                out[(j1, j2)] = (((j1 + j2) // 2) % n, ((j2 - j1) // 2) % n)
    return out
