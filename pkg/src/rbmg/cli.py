"""Command-line experiment runner writing CSV tables.

    python -m rbmg solve   --dim 2 --n 64 --coarsening rb --cycle v --omega 0.8:1.3:0.05
    python -m rbmg lfa     --order 4 --coarse-op g2q --omega 0.9:1.3:0.05
    python -m rbmg sweep-r --r 1.1:4.0:0.1 --cycle w

Exit codes: 0 success, 2 invalid configuration, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import lfa
from .cycle import CoarseSolveError, build_plan, measure_cr
from .smoother import JACOBI

SEED_ENV = "RBMG_SEED"
SOLVE_COLUMNS = ["omega", "r", "levels", "cr", "wu", "ecr", "rho_lfa", "mu_nu", "flags"]
SWEEP_R_COLUMNS = SOLVE_COLUMNS + ["zeta", "omega_star", "mu_star", "esr"]
LFA_COLUMNS = ["omega", "rho_lfa", "mu", "mu_nu", "n_sampled", "n_excluded"]
DUMP_COLUMNS = ["omega", "theta1", "theta2", "rho"]
_COARSENING = {"std": "standard", "rb": "redblack", "vc": "variable"}


class ConfigError(ValueError):
    pass


def parse_range(text: str) -> list[float]:
    """``value`` or inclusive ``lo:hi:step``."""
    parts = str(text).split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"bad range {text!r}") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3 or nums[2] <= 0:
        raise ConfigError(f"range must be lo:hi:step with step > 0, got {text!r}")
    lo, hi, step = nums
    if hi < lo:
        return []
    count = math.floor((hi - lo) / step + 1e-9) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def parse_coarsening(text: str) -> tuple[str, float | None]:
    if text in _COARSENING:
        return _COARSENING[text], None
    if text.startswith("r:"):
        try:
            r = float(text[2:])
        except ValueError:
            raise ConfigError(f"bad factor in {text!r}") from None
        if r <= 1:
            raise ConfigError("coarsening factor must exceed 1")
        return "factor_r", r
    raise ConfigError(f"coarsening must be std, rb, vc or r:<value>, got {text!r}")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value file merged beneath the flags")
    p.add_argument("--dim", type=int, default=2, choices=(1, 2))
    p.add_argument("--order", type=int, default=2, choices=(2, 4, 6))
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--coarsening", default="std")
    p.add_argument("--cycle", default="v", choices=("v", "w", "wn"))
    p.add_argument("--nu1", type=int, default=1)
    p.add_argument("--nu2", type=int, default=1)
    p.add_argument("--omega", default="1.0", help="value or lo:hi:step")
    p.add_argument("--smoother", default="rbgs", choices=("jacobi", "rbj", "rbgs"))
    p.add_argument("--coarse-op", default="g", choices=("ng", "ng2", "g", "g2q", "g1", "gn", "g2fixed"))
    p.add_argument("--transfer", default="linear", choices=("linear", "cubic"))
    p.add_argument("--levels", default="auto")
    p.add_argument("--n-min", type=int, default=8)
    p.add_argument("--seed", type=int, default=int(os.environ.get(SEED_ENV, 0)))
    p.add_argument("--lfa-m", type=int, default=128)
    p.add_argument("--n-warm", type=int, default=15)
    p.add_argument("--n-avg", type=int, default=5)
    p.add_argument("--coarse-tol", type=float, default=1e-12)
    p.add_argument("--jobs", type=int, default=1, help="parallel sweep points")
    p.add_argument("-o", "--output", default="-", help="CSV path or - for stdout")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rbmg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("solve", help="measure multigrid convergence rates"))
    p = sub.add_parser("lfa", help="two-level local Fourier analysis")
    _common(p)
    p.add_argument("--theta-dump", action="store_true", help="emit rho(M(theta)) on the sampling grid")
    p = sub.add_parser("sweep-r", help="factor-r coarsening sweep")
    _common(p)
    p.add_argument("--r", required=False, help="r_target value or lo:hi:step")
    p.set_defaults(smoother=JACOBI, omega="star")
    return parser


def read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}: expected key=value, got {line!r}")
                k, v = (s.strip() for s in line.split("=", 1))
                out[k.replace("-", "_")] = v
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return out


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        file_vals = read_config_file(args.config)
        defaults = {}
        for k, v in file_vals.items():
            if k not in known or k in ("config", "help"):
                raise ConfigError(f"unknown config key {k!r}")
            act = known[k]
            if act.const is True and act.nargs == 0:
                defaults[k] = v.lower() in ("1", "true", "yes")
            else:
                defaults[k] = act.type(v) if act.type else v
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _levels(args) -> int | None:
    if args.levels == "auto":
        return None
    try:
        return int(args.levels)
    except ValueError:
        raise ConfigError("levels must be 'auto' or an integer") from None


def _validate(args):
    if args.n < 4:
        raise ConfigError("n must be at least 4")
    if args.nu1 < 0 or args.nu2 < 0:
        raise ConfigError("smoothing counts must be non-negative")
    if args.lfa_m < 2 or args.lfa_m % 2:
        raise ConfigError("lfa-m must be an even integer >= 2")
    if args.jobs < 1:
        raise ConfigError("jobs must be positive")
    parse_coarsening(args.coarsening)
    _levels(args)


def _lfa_config(args, omega: float) -> lfa.LfaConfig | None:
    coarsening, _ = parse_coarsening(args.coarsening)
    if coarsening not in ("standard", "redblack") or args.coarse_op == "g2fixed":
        return None
    try:
        return lfa.LfaConfig(dim=args.dim, order=args.order, smoother=args.smoother, omega=omega,
                             coarsening=coarsening, transfer=args.transfer, coarse_op=args.coarse_op,
                             nu1=args.nu1, nu2=args.nu2, m=args.lfa_m)
    except ValueError:
        return None


def _plan(args, omega: float, coarsening: str, r: float | None):
    return build_plan(args.dim, args.n, order=args.order, coarsening=coarsening, r_target=r,
                      levels=_levels(args), n_min=args.n_min, cycle=args.cycle, nu1=args.nu1,
                      nu2=args.nu2, smoother=args.smoother, omega=omega, coarse_op=args.coarse_op,
                      transfer=args.transfer, coarse_tol=args.coarse_tol)


def _mu_nu(args, omega: float, coarsening: str, r: float | None):
    nu = args.nu1 + args.nu2
    if nu == 0:
        return None
    if coarsening == "factor_r":
        if args.smoother != JACOBI:
            return None
        return lfa.jacobi_mu_numeric(omega, r, args.dim, args.lfa_m) ** nu
    cfg = _lfa_config(args, omega)
    return None if cfg is None else lfa.smoothing_factor(cfg).value ** nu


def solve_row(args, omega: float, r_text: str | None = None) -> dict:
    coarsening, r = parse_coarsening(r_text or args.coarsening)
    plan = _plan(args, omega, coarsening, r)
    rep = measure_cr(plan, args.n_warm, args.n_avg, args.seed)
    cfg = _lfa_config(args, omega) if r_text is None else None
    return {
        "omega": omega,
        "r": r,
        "levels": plan.n_levels,
        "cr": rep.cr,
        "wu": rep.wu,
        "ecr": rep.ecr,
        "rho_lfa": None if cfg is None else lfa.rho_two_level(cfg).value,
        "mu_nu": _mu_nu(args, omega, coarsening, r),
        "flags": ";".join(rep.flags),
    }


def sweep_r_row(args, r: float) -> dict:
    fr = lfa.factor_r_closed_forms(r, args.dim)
    omega = fr.omega_star if args.omega == "star" else float(args.omega)
    row = solve_row(args, omega, f"r:{r!r}")
    row["r"] = r
    gamma = {"v": 1, "w": 2}.get(args.cycle)
    l_max = row["levels"] - 1
    row.update(zeta=fr.zeta, omega_star=fr.omega_star, mu_star=fr.mu_star,
               esr=None if gamma is None else lfa.esr(r, args.dim, gamma, args.nu1 + args.nu2, l_max))
    return row


def lfa_rows(args, omega: float) -> list[dict]:
    cfg = _lfa_config(args, omega)
    if cfg is None:
        raise ConfigError("LFA supports std/rb coarsening with ng, ng2, g, g2q, g1 or gn")
    if args.theta_dump:
        grid = lfa.rho_at(cfg)
        th = lfa.sample_thetas(cfg.m, cfg.dim)
        rows = []
        for t, v in zip(th, grid.ravel()):
            rows.append({"omega": omega, "theta1": t[0], "theta2": t[1] if cfg.dim == 2 else None,
                         "rho": None if np.isnan(v) else v})
        return rows
    rho = lfa.rho_two_level(cfg)
    nu = cfg.nu
    mu = lfa.smoothing_factor(cfg).value if nu else None
    return [{"omega": omega, "rho_lfa": rho.value, "mu": mu, "mu_nu": None if mu is None else mu**nu,
             "n_sampled": rho.n_sampled, "n_excluded": rho.n_excluded}]


def _task(payload):
    kind, args, value = payload
    if kind == "solve":
        return [solve_row(args, value)]
    if kind == "sweep-r":
        return [sweep_r_row(args, value)]
    return lfa_rows(args, value)


def _header(args) -> str:
    skip = {"config", "output", "jobs"}
    items = sorted((k, v) for k, v in vars(args).items() if k not in skip)
    return "# rbmg " + " ".join(f"{k}={fmt(v)}" for k, v in items)


def run(args, out) -> None:
    _validate(args)
    if args.command == "sweep-r":
        if not args.r:
            raise ConfigError("sweep-r needs --r")
        if args.omega != "star":
            parse_range(args.omega)
        values, columns = parse_range(args.r), SWEEP_R_COLUMNS
        if any(v <= 1 for v in values):
            raise ConfigError("r values must exceed 1")
    else:
        values = parse_range(args.omega)
        if args.command == "lfa":
            columns = DUMP_COLUMNS if args.theta_dump else LFA_COLUMNS
            if args.lfa_m < 8:
                print(f"warning: lfa-m={args.lfa_m} gives a very coarse frequency sample", file=sys.stderr)
        else:
            columns = SOLVE_COLUMNS
    if args.command != "lfa" and values:
        # fail fast on configurations the builder rejects
        c, r = parse_coarsening(f"r:{values[0]!r}" if args.command == "sweep-r" else args.coarsening)
        _plan(args, 1.0 if args.omega == "star" else values[0] if args.command == "solve" else 1.0, c, r)
    payloads = [(args.command, args, v) for v in values]
    if args.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_task, payloads))
    else:
        results = [_task(p) for p in payloads]
    out.write(_header(args) + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for rows in results:
        for row in rows:
            writer.writerow([fmt(row.get(c)) for c in columns])


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        if args.output == "-":
            run(args, sys.stdout)
        else:
            with open(args.output, "w", newline="") as fh:
                run(args, fh)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CoarseSolveError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
