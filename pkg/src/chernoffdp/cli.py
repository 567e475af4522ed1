"""Command-line front end.

Subcommands: ``divergence``, ``bounds``, ``sweep``, ``classify``, ``compose``.
Options can also come from a JSON config file (``--config``); flags given
on the command line override file values. Relative output paths are
resolved against ``$CHERNOFFDP_OUTPUT_DIR`` when it is set.

Exit codes: 0 success, 2 domain/config error, 3 numerical non-convergence,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classify as clf
from .distributions import LaplaceDistribution
from .divergences import (
    chernoff_laplace_closed_form,
    chernoff_laplace_equal_scale,
    chernoff_numeric,
    kl_laplace_closed_form,
    kl_numeric,
)
from .dp_bounds import (
    PrivacyBudget,
    alpha_star_ub,
    chernoff_ub_from_epsilon,
    chernoff_ub_route,
    compose_budgets,
    epsilon_dp_level,
    kl_bound_from_epsilon,
    verify_composition_additivity,
)
from .errors import DomainError
from .mechanism import AttackScenario, scenario_to_hypotheses
from .numeric import NonConvergenceError
from .tables import Table

OUTPUT_DIR_ENV = "CHERNOFFDP_OUTPUT_DIR"

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

DEFAULT_EPSILONS = [round(0.05 * k, 2) for k in range(1, 20)]
DEFAULT_MULTIPLIERS = [1.0, 2.0, 3.0]
DEFAULT_THETAS = [1.0, 1.1, 1.5, 2.0]
DEFAULT_M_GRID = [10, 20, 30, 40, 50]

SWEEP_TOL = 1e-9

SWEEP_COLUMNS = [
    "epsilon",
    "delta_mu_multiplier",
    "theta",
    "delta_mu",
    "b",
    "epsilon_bound",
    "kl_closed_form",
    "chernoff_closed_form",
    "chernoff_numeric",
    "chernoff_alpha_star",
    "kl_numeric",
    "epsilon_dp_level",
]

BOUNDS_COLUMNS = [
    "epsilon",
    "kl_bound",
    "chernoff_ub",
    "chernoff_ub_q_route",
    "chernoff_ub_p_route",
    "alpha_star_q",
    "alpha_star_q_clamped",
    "alpha_star_p",
    "alpha_star_p_raw",
    "alpha_star_p_clamped",
]


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    epsilon_grid: list[float] = field(default_factory=lambda: list(DEFAULT_EPSILONS))
    delta_mu_multipliers: list[float] = field(default_factory=lambda: list(DEFAULT_MULTIPLIERS))
    theta_values: list[float] = field(default_factory=lambda: list(DEFAULT_THETAS))
    sensitivity: float = 1.0
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if not (self.epsilon_grid and self.delta_mu_multipliers and self.theta_values):
            raise ConfigError("sweep grids must be non-empty")
        if any(not 0 < e < 1 for e in self.epsilon_grid):
            raise ConfigError("epsilon grid must lie in (0, 1)")
        if any(b <= a for a, b in zip(self.epsilon_grid, self.epsilon_grid[1:])):
            raise ConfigError("epsilon grid must be strictly increasing")
        if any(not t >= 1 for t in self.theta_values):
            raise ConfigError("theta values must be >= 1")
        if not self.sensitivity > 0:
            raise ConfigError("sensitivity must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")


# -- operations ---------------------------------------------------------------


def sweep_row(eps: float, mult: float, theta: float, sensitivity: float) -> dict[str, float]:
    s = AttackScenario.from_multiplier(eps, mult, sensitivity, theta)
    p, q = scenario_to_hypotheses(s)
    ch = chernoff_numeric(p, q, SWEEP_TOL)
    return {
        "epsilon": eps,
        "delta_mu_multiplier": mult,
        "theta": theta,
        "delta_mu": s.delta_mu,
        "b": s.b,
        "epsilon_bound": eps,
        "kl_closed_form": kl_laplace_closed_form(s).value,
        "chernoff_closed_form": chernoff_laplace_closed_form(s).value,
        "chernoff_numeric": ch.value,
        "chernoff_alpha_star": ch.alpha_star,
        "kl_numeric": kl_numeric(p, q, SWEEP_TOL).value,
        "epsilon_dp_level": epsilon_dp_level(p, q),
    }


def run_figure2_sweep(cfg: SweepConfig) -> Table:
    """One row per (epsilon, multiplier, theta), in grid order."""
    t = Table(list(SWEEP_COLUMNS))
    for eps in cfg.epsilon_grid:
        for mult in cfg.delta_mu_multipliers:
            for theta in cfg.theta_values:
                t.append(sweep_row(eps, mult, theta, cfg.sensitivity))
    return t


def run_bounds_table(epsilon_grid) -> Table:
    t = Table(list(BOUNDS_COLUMNS))
    for eps in epsilon_grid:
        aq = alpha_star_ub(eps, "q_based")
        ap = alpha_star_ub(eps, "p_based")
        t.append(
            [
                eps,
                kl_bound_from_epsilon(eps),
                chernoff_ub_from_epsilon(eps),
                chernoff_ub_route(eps, "q_based"),
                chernoff_ub_route(eps, "p_based"),
                aq.value,
                int(aq.clamped),
                ap.value,
                ap.raw,
                int(ap.clamped),
            ]
        )
    return t


def _finite(v: float):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def run_divergence(s: AttackScenario, tol: float = 1e-10) -> dict:
    p, q = scenario_to_hypotheses(s)
    ch = chernoff_numeric(p, q, tol)
    formula = chernoff_laplace_closed_form(s)
    out = {
        "scenario": _scenario_dict(s),
        "kl_closed_form": kl_laplace_closed_form(s).value,
        "kl_numeric": kl_numeric(p, q, tol).value,
        "kl_reverse_numeric": kl_numeric(q, p, tol).value,
        "chernoff_closed_form": formula.value,
        "chernoff_closed_form_note": formula.note,
        "chernoff_numeric": ch.value,
        "chernoff_alpha_star": ch.alpha_star,
        "chernoff_closed_form_minus_numeric": formula.value - ch.value,
        "epsilon_dp_level": _finite(epsilon_dp_level(p, q)),
    }
    if s.theta == 1:
        out["chernoff_equal_scale_exact"] = chernoff_laplace_equal_scale(s.delta_mu, s.b)
    return out


def _scenario_dict(s: AttackScenario) -> dict:
    return {
        "epsilon": s.epsilon,
        "sensitivity": s.sensitivity,
        "delta_mu": s.delta_mu,
        "theta": s.theta,
        "prior_alpha": s.prior_alpha,
        "b": s.b,
    }


def run_classify(s: AttackScenario, m_grid, trials: int, seed: int, shards: int = 1, workers: int = 1) -> dict:
    """Error rates per M, fitted exponents and the divergences they should approach."""
    rates = [clf.estimate_error_rates(s, m, trials, seed, shards, workers) for m in m_grid]
    refs = clf.reference_exponents(s)
    fits = {}
    degenerate = False
    for which in clf.Which:
        try:
            fits[which.value] = clf.fit_rates(rates, which, refs[which.value]).as_dict()
        except clf.DegenerateFitError as exc:
            degenerate = True
            fits[which.value] = {"which": which.value, "degenerate": True, "reason": str(exc)}
    return {
        "scenario": _scenario_dict(s),
        "seed": seed,
        "shards": shards,
        "trials": trials,
        "m_grid": list(m_grid),
        "rates": [r.as_dict() for r in rates],
        "fits": fits,
        "reference_exponents": refs,
        "degenerate": degenerate,
    }


def run_compose(budgets, pairs=None, tol: float = 1e-8, alpha: float = 0.5) -> dict:
    total = compose_budgets(budgets)
    out = {
        "budgets": [[b.epsilon, b.delta] for b in budgets],
        "composed": {"epsilon": total.epsilon, "delta": total.delta},
    }
    if pairs:
        out["additivity"] = verify_composition_additivity(pairs, tol, alpha).as_dict()
    return out


# -- argument handling --------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _budget(text: str) -> PrivacyBudget:
    parts = _floats(text)
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"budget must be EPS or EPS,DELTA, got {text!r}")
    try:
        return PrivacyBudget(*parts)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pair(text: str) -> tuple[LaplaceDistribution, LaplaceDistribution]:
    try:
        left, right = text.split(":")
        (m0, b0), (m1, b1) = _floats(left), _floats(right)
        return LaplaceDistribution(m0, b0), LaplaceDistribution(m1, b1)
    except (ValueError, argparse.ArgumentTypeError):
        raise argparse.ArgumentTypeError(f"pair must look like MU0,B0:MU1,B1, got {text!r}") from None


def _scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, help="privacy parameter (default 1)")
    p.add_argument("--sensitivity", type=float, help="global sensitivity s (default 1)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--delta-mu", type=float, help="mean shift caused by the attack")
    g.add_argument("--multiplier", type=float, help="mean shift as a multiple of s")
    p.add_argument("--theta", type=float, help="scale multiplier of the attacked law (default 1)")
    p.add_argument("--prior-alpha", type=float, help="prior weight of the null (default 0.5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chernoffdp", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="JSON file with option values; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divergence", help="closed-form and numerical divergences for one scenario")
    _scenario_args(p)
    p.add_argument("--tol", type=float)
    p.add_argument("--output")

    p = sub.add_parser("bounds", help="KL bound, Chernoff bound and optimal priors over an epsilon grid")
    p.add_argument("--epsilons", type=_floats)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--output")

    p = sub.add_parser("sweep", help="KL vs Chernoff comparison over epsilon, multiplier and theta")
    p.add_argument("--epsilons", type=_floats, dest="epsilon_grid")
    p.add_argument("--multipliers", type=_floats, dest="delta_mu_multipliers")
    p.add_argument("--thetas", type=_floats, dest="theta_values")
    p.add_argument("--sensitivity", type=float)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--output", dest="output_path")

    p = sub.add_parser("classify", help="Monte Carlo error rates and fitted error exponents")
    _scenario_args(p)
    p.add_argument("--m-grid", type=_ints)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--shards", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--output")

    p = sub.add_parser("compose", help="sequential composition of budgets, optional additivity check")
    p.add_argument("--budget", type=_budget, action="append", dest="budgets", help="EPS[,DELTA]; repeatable")
    p.add_argument("--pair", type=_pair, action="append", dest="pairs", help="MU0,B0:MU1,B1; repeatable")
    p.add_argument("--alpha", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--output")
    return parser


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _merged(args: argparse.Namespace, config: dict, key: str, default=None):
    v = getattr(args, key, None)
    if v is not None:
        return v
    return config.get(key, default)


def _scenario(args, config) -> AttackScenario:
    eps = float(_merged(args, config, "epsilon", 1.0))
    sens = float(_merged(args, config, "sensitivity", 1.0))
    mult = _merged(args, config, "multiplier")
    dmu = _merged(args, config, "delta_mu")
    if args.delta_mu is not None:
        mult = None
    elif args.multiplier is not None:
        dmu = None
    if dmu is None:
        dmu = (float(mult) if mult is not None else 1.0) * sens
    return AttackScenario(
        epsilon=eps,
        sensitivity=sens,
        delta_mu=float(dmu),
        theta=float(_merged(args, config, "theta", 1.0)),
        prior_alpha=float(_merged(args, config, "prior_alpha", 0.5)),
    )


def _resolve_output(path: str | None) -> Path | None:
    if path is None:
        return None
    out = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not out.is_absolute():
        out = Path(base) / out
    return out


def _emit(text: str, path: str | None) -> None:
    out = _resolve_output(path)
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _fmt_for(path: str | None, explicit: str | None, default: str = "csv") -> str:
    if explicit:
        return explicit
    if path and path.endswith(".json"):
        return "json"
    return default


def _dispatch(args: argparse.Namespace, config: dict) -> None:
    cmd = args.command
    if cmd == "divergence":
        s = _scenario(args, config)
        _emit(_json(run_divergence(s, float(_merged(args, config, "tol", 1e-10)))), _merged(args, config, "output"))
    elif cmd == "bounds":
        grid = _merged(args, config, "epsilons", DEFAULT_EPSILONS)
        out = _merged(args, config, "output")
        _emit(run_bounds_table(grid).dumps(_fmt_for(out, _merged(args, config, "format"))), out)
    elif cmd == "sweep":
        keys = ["epsilon_grid", "delta_mu_multipliers", "theta_values", "sensitivity", "output_path", "format"]
        values = {k: _merged(args, config, k) for k in keys}
        values = {k: v for k, v in values.items() if v is not None}
        if "format" not in values:
            values["format"] = _fmt_for(values.get("output_path"), None)
        cfg = SweepConfig(**values)
        _emit(run_figure2_sweep(cfg).dumps(cfg.format), cfg.output_path)
    elif cmd == "classify":
        s = _scenario(args, config)
        report = run_classify(
            s,
            _merged(args, config, "m_grid", DEFAULT_M_GRID),
            int(_merged(args, config, "trials", 10**5)),
            args.seed,
            int(_merged(args, config, "shards", 1)),
            int(_merged(args, config, "workers", 1)),
        )
        _emit(_json(report), _merged(args, config, "output"))
    elif cmd == "compose":
        budgets = args.budgets
        if budgets is None:
            budgets = [PrivacyBudget(*b) for b in config.get("budgets", [])]
        pairs = args.pairs
        if pairs is None:
            pairs = [
                (LaplaceDistribution(*a), LaplaceDistribution(*b)) for a, b in config.get("pairs", [])
            ]
        if not budgets:
            raise ConfigError("compose needs at least one --budget")
        report = run_compose(
            budgets,
            pairs,
            float(_merged(args, config, "tol", 1e-8)),
            float(_merged(args, config, "alpha", 0.5)),
        )
        _emit(_json(report), _merged(args, config, "output"))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_DOMAIN if exc.code else EXIT_OK
    try:
        config = _load_config(args.config)
        _dispatch(args, config)
    except NonConvergenceError as exc:
        print(f"chernoffdp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"chernoffdp: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"chernoffdp: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
