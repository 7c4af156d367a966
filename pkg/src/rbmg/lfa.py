"""Local Fourier analysis of smoothers and two-level cycles.

Frequencies ``theta`` live in ``[-pi, pi)^d``; the partner frequency is
``theta_bar = theta - sign(theta) * pi`` per component. All symbols are
evaluated with fine spacing ``h = 1``; coarse operators are expressed in
fine-grid offsets so their symbols are evaluated at the fine ``theta`` too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .smoother import JACOBI, RB_GS, KINDS as SMOOTHERS, gs_offsets
from .stencil import Stencil, builtin, galerkin_stencil
from .transfer import CUBIC2D, FW1D, FW2D, RB2D, restriction_stencil, spacing_ratio

STD = "standard"
RB = "redblack"
LFA_COARSE_OPS = ("ng", "ng2", "g", "g2q", "g1", "gn")
_EDGE = 1e-9
_RB_BASIS = np.array([[1, -1], [1, 1]])


def theta_bar(theta):
    theta = np.asarray(theta, dtype=float)
    return np.where(theta < 0, theta + math.pi, theta - math.pi)


def xi(theta):
    """Mean of ``sin^2(theta_k / 2)`` over the components (last axis)."""
    theta = np.asarray(theta, dtype=float)
    return np.mean(np.sin(theta / 2) ** 2, axis=-1)


def symbol(L: Stencil, theta, h: float = 1.0, basis=None):
    """``sum_j a_j exp(i theta . B j) / h^p`` over the stencil offsets.

    ``basis`` maps local offsets to fine-grid offsets (identity by default).
    """
    theta = np.asarray(theta, dtype=float)
    offs = L.offsets() if basis is None else L.offsets() @ np.asarray(basis).T
    phase = np.exp(1j * np.tensordot(theta, offs.T.astype(float), axes=(-1, 0)))
    return phase @ L.values() / h**L.scale_power


def laplacian_symbol(dim: int, order: int, theta, h: float = 1.0):
    """Closed-form symbols of the built-in operators."""
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta / 2) ** 2
    if dim == 1 and order == 2:
        return 4 * s[..., 0] / h**2
    if dim == 2 and order == 2:
        return 8 * xi(theta) / h**2
    if dim == 2 and order == 4:
        xb, xb2 = s.mean(axis=-1), (s**2).mean(axis=-1)
        return 8 * (xb + xb2 / 3) / h**2
    raise ValueError(f"no closed-form symbol for dim={dim}, order={order}")


def cubic_symbol_1d(theta):
    s = np.sin(np.asarray(theta, dtype=float) / 2) ** 2
    return 1 - s**2 * (3 - 2 * s)


def low_mask(theta, kind: str, r: float = 2.0):
    """Membership in the low-frequency set of a coarsening."""
    theta = np.asarray(theta, dtype=float)

    def half_open(x, bound):  # [-bound, bound) robust to rounding on the edges
        return (x >= -bound - _EDGE) & (x < bound - _EDGE)

    if kind == STD:
        return np.all(half_open(theta, math.pi / 2), axis=-1)
    if kind == RB:
        a, b = theta[..., 0] - theta[..., 1], theta[..., 0] + theta[..., 1]
        return half_open(a, math.pi) & half_open(b, math.pi)
    if kind == "factor_r":
        return np.all(half_open(theta, math.pi / r), axis=-1)
    raise ValueError(f"unknown partition {kind!r}")


def sample_thetas(m: int, dim: int) -> np.ndarray:
    """Grid-resolved frequencies ``2 pi j / m - pi`` as an ``(m^dim, dim)`` array."""
    if m < 2 or m % 2:
        raise ValueError("sampling size m must be even and at least 2")
    axis = 2 * math.pi * np.arange(m) / m - math.pi
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


@dataclass(frozen=True)
class LfaConfig:
    dim: int = 2
    order: int = 2
    smoother: str = RB_GS
    omega: float = 1.0
    coarsening: str = STD
    transfer: str = "linear"
    coarse_op: str = "g"
    nu1: int = 1
    nu2: int = 1
    m: int = 128

    def __post_init__(self):
        if self.smoother not in SMOOTHERS:
            raise ValueError(f"unknown smoother {self.smoother!r}")
        if self.coarsening not in (STD, RB):
            raise ValueError("LFA supports standard and red-black coarsening")
        if self.coarsening == RB and self.dim != 2:
            raise ValueError("red-black coarsening analysis is two-dimensional")
        if self.coarse_op not in LFA_COARSE_OPS:
            raise ValueError(f"coarse operator {self.coarse_op!r} has no two-level symbol")
        if self.m < 2 or self.m % 2:
            raise ValueError("m must be even and at least 2")
        builtin(self.dim, self.order)

    @property
    def nu(self) -> int:
        return self.nu1 + self.nu2

    @property
    def transfer_kind(self) -> str:
        if self.dim == 1:
            return FW1D
        if self.coarsening == RB:
            return RB2D
        return CUBIC2D if self.transfer == "cubic" else FW2D

    @property
    def coarse_basis(self) -> np.ndarray:
        if self.dim == 1:
            return np.array([[2]])
        return _RB_BASIS if self.coarsening == RB else 2 * np.eye(2, dtype=np.int64)


def aliases(theta, cfg: LfaConfig) -> np.ndarray:
    """Frequencies coupled by the coarse correction, low frequency first.

    Shape ``(..., k, dim)`` with ``k = 2`` (1D, red-black) or ``4`` (2D standard)
    in the order theta, (bar1, bar2), (bar1, t2), (t1, bar2).
    """
    theta = np.asarray(theta, dtype=float)
    tb = theta_bar(theta)
    if cfg.dim == 1 or cfg.coarsening == RB:
        return np.stack([theta, tb], axis=-2)
    mixed1 = np.stack([tb[..., 0], theta[..., 1]], axis=-1)
    mixed2 = np.stack([theta[..., 0], tb[..., 1]], axis=-1)
    return np.stack([theta, tb, mixed1, mixed2], axis=-2)


def _pairs(cfg: LfaConfig) -> list[tuple[int, int]]:
    return [(0, 1)] if (cfg.dim == 1 or cfg.coarsening == RB) else [(0, 1), (2, 3)]


def smoother_symbol(cfg: LfaConfig, theta):
    """Pointwise symbol ``1 - L / L+`` of the underlying relaxation."""
    L = builtin(cfg.dim, cfg.order)
    lhat = symbol(L, theta)
    plus = np.full(np.shape(lhat), L.center, dtype=complex)
    if cfg.smoother == RB_GS:
        extra = gs_offsets(L)
        if extra:
            plus = plus + cfg.omega * symbol(Stencil(extra, L.scale_power), theta)
    return 1 - cfg.omega * lhat / plus


def _rb_block(s_t, s_tb):
    """``S^B S^R`` on the pair (theta, theta_bar) from the pointwise symbols."""
    one = np.ones_like(s_t)
    red = 0.5 * np.stack([np.stack([one + s_t, one - s_tb], -1), np.stack([one - s_t, one + s_tb], -1)], -2)
    black = 0.5 * np.stack([np.stack([one + s_t, s_tb - one], -1), np.stack([s_t - one, one + s_tb], -1)], -2)
    return black @ red


def smoother_matrix(cfg: LfaConfig, theta) -> np.ndarray:
    """Smoother on the span of the alias modes of ``theta``."""
    al = aliases(theta, cfg)
    s = smoother_symbol(cfg, al)
    k = al.shape[-2]
    out = np.zeros(s.shape[:-1] + (k, k), dtype=complex)
    if cfg.smoother == JACOBI:
        idx = np.arange(k)
        out[..., idx, idx] = s
        return out
    for i, j in _pairs(cfg):
        blk = _rb_block(s[..., i], s[..., j])
        out[..., i, i], out[..., i, j] = blk[..., 0, 0], blk[..., 0, 1]
        out[..., j, i], out[..., j, j] = blk[..., 1, 0], blk[..., 1, 1]
    return out


def transfer_symbol(cfg: LfaConfig, theta):
    """Restriction symbol at each alias (equal to the interpolation symbol)."""
    return symbol(restriction_stencil(cfg.transfer_kind), aliases(theta, cfg)).real


def coarse_symbol(cfg: LfaConfig, theta):
    """Coarse operator symbol evaluated at the fine frequency ``theta``."""
    al = aliases(theta, cfg)
    if cfg.coarse_op in ("ng", "ng2"):
        order = 2 if cfg.coarse_op == "ng2" else cfg.order
        H = spacing_ratio(cfg.transfer_kind)
        return symbol(builtin(cfg.dim, order), theta, h=H, basis=cfg.coarse_basis).real
    fine = builtin(cfg.dim, 2 if cfg.coarse_op == "g2q" else cfg.order)
    ihat = transfer_symbol(cfg, theta)
    return np.sum(ihat**2 * symbol(fine, al).real, axis=-1)


def coarse_correction_matrix(cfg: LfaConfig, theta) -> np.ndarray:
    """``K = I - P L_H^{-1} R L`` on the alias modes."""
    al = aliases(theta, cfg)
    lhat = symbol(builtin(cfg.dim, cfg.order), al).real
    ihat = transfer_symbol(cfg, theta)
    lh = coarse_symbol(cfg, theta)
    k = al.shape[-2]
    outer = ihat[..., :, None] * (ihat * lhat)[..., None, :]
    return np.eye(k) - outer / lh[..., None, None]


def two_level_matrix(cfg: LfaConfig, theta) -> np.ndarray:
    """``S^nu2 K S^nu1`` on the alias modes."""
    S = smoother_matrix(cfg, theta)
    K = coarse_correction_matrix(cfg, theta)
    return np.linalg.matrix_power(S, cfg.nu2) @ K @ np.linalg.matrix_power(S, cfg.nu1)


def spectral_radius(M: np.ndarray) -> np.ndarray:
    return np.abs(np.linalg.eigvals(M)).max(axis=-1)


@dataclass(frozen=True)
class LfaReport:
    value: float
    theta_max: tuple
    n_sampled: int
    n_excluded: int


def _low_samples(cfg: LfaConfig, exclude_singular: bool):
    th = sample_thetas(cfg.m, cfg.dim)
    th = th[low_mask(th, cfg.coarsening)]
    keep = np.any(th != 0, axis=-1)
    if exclude_singular:
        keep &= np.abs(coarse_symbol(cfg, th)) >= 1e-12
    return th[keep], int(np.count_nonzero(~keep))


def rho_two_level(cfg: LfaConfig) -> LfaReport:
    """Largest spectral radius of the two-level matrix over sampled low frequencies."""
    th, excluded = _low_samples(cfg, True)
    if len(th) == 0:
        return LfaReport(math.nan, (), 0, excluded)
    rho = spectral_radius(two_level_matrix(cfg, th))
    i = int(np.argmax(rho))
    return LfaReport(float(rho[i]), tuple(th[i]), len(th), excluded)


def smoothing_factor(cfg: LfaConfig) -> LfaReport:
    """``sup rho(S^nu2 Q S^nu1)^(1/nu)`` with ``Q`` removing the low mode."""
    if cfg.nu < 1:
        raise ValueError("smoothing factor needs nu >= 1")
    th, excluded = _low_samples(cfg, False)
    if len(th) == 0:
        return LfaReport(math.nan, (), 0, excluded)
    S = smoother_matrix(cfg, th)
    k = S.shape[-1]
    Q = np.eye(k)
    Q[0, 0] = 0
    M = np.linalg.matrix_power(S, cfg.nu2) @ Q @ np.linalg.matrix_power(S, cfg.nu1)
    mu = spectral_radius(M) ** (1.0 / cfg.nu)
    i = int(np.argmax(mu))
    return LfaReport(float(mu[i]), tuple(th[i]), len(th), excluded)


def rho_at(cfg: LfaConfig) -> np.ndarray:
    """``rho(M(theta))`` on the full ``m^dim`` sampling grid (NaN where undefined).

    Each sample is mapped to the low representative of its alias group.
    """
    th = sample_thetas(cfg.m, cfg.dim)
    out = np.full(len(th), np.nan)
    low, _ = _low_samples(cfg, True)
    rho = spectral_radius(two_level_matrix(cfg, low))
    al = aliases(low, cfg)
    step = 2 * math.pi / cfg.m
    idx = np.round((al + math.pi) / step).astype(np.int64) % cfg.m
    flat = np.ravel_multi_index(tuple(np.moveaxis(idx, -1, 0)), (cfg.m,) * cfg.dim)
    for a in range(flat.shape[-1]):
        out[flat[:, a]] = rho
    return out.reshape((cfg.m,) * cfg.dim)


def galerkin_symbol_check(cfg: LfaConfig, thetas) -> float:
    """Largest gap between the symbol-composed and stencil-extracted Galerkin operators."""
    s = galerkin_stencil(builtin(cfg.dim, cfg.order), cfg.transfer_kind)
    H = spacing_ratio(cfg.transfer_kind)
    from_stencil = symbol(s, thetas, h=H).real
    g_cfg = LfaConfig(**{**cfg.__dict__, "coarse_op": "g"})
    return float(np.max(np.abs(coarse_symbol(g_cfg, thetas) - from_stencil)))


# factor-r Jacobi analysis


@dataclass(frozen=True)
class FactorRAnalysis:
    r: float
    d: int
    zeta: float
    omega_star: float
    mu_star: float


def factor_r_closed_forms(r: float, d: int) -> FactorRAnalysis:
    if r < 1 or d not in (1, 2, 3):
        raise ValueError("need r >= 1 and d in {1, 2, 3}")
    zeta = math.sin(math.pi / (2 * r)) ** 2 / d
    return FactorRAnalysis(r, d, zeta, 1 / (1 + zeta), (1 - zeta) / (1 + zeta))


def jacobi_mu_numeric(omega: float, r: float, d: int, m: int = 256) -> float:
    """``max |1 - 2 omega xi|`` over sampled frequencies outside ``[-pi/r, pi/r)^d``."""
    th = sample_thetas(m, d)
    high = ~low_mask(th, "factor_r", r)
    return float(np.max(np.abs(1 - 2 * omega * xi(th[high]))))


def wu_factor_r(r: float, d: int, gamma: int, nu: int, l_max: int) -> float:
    q = gamma / r**d
    if math.isclose(q, 1.0):
        return (nu + 3) * l_max
    if q < 1:
        return (nu + 3) / (1 - q)
    return (nu + 3) * q**l_max / (q - 1)


def levels_for_r(n: int, n_min: int, r: float) -> int:
    """Level count ``log_r(n / n_min)`` rounded to the nearest integer (at least 1)."""
    return max(1, round(math.log(n / n_min) / math.log(r)))


def esr(r: float, d: int, gamma: int, nu: int, l_max: int) -> float:
    """Estimated smoothing rate ``(mu*)^(nu / WU)``."""
    fr = factor_r_closed_forms(r, d)
    return fr.mu_star ** (nu / wu_factor_r(r, d, gamma, nu, l_max))
