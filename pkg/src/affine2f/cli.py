"""Command-line interface.

Subcommands: `simulate` a path to CSV, `estimate` drift parameters from a
path CSV, `moments` (closed-form or simulated), `char` (stationary
transform), and `experiment` (Monte Carlo run from a JSON config).

Exit codes: 0 success, 1 configuration/usage error, 2 degenerate input
(nonpositive denominators, non-subcritical regime, and the like).
"""

from __future__ import annotations

import argparse
import json
import sys

from .asymptotics import moments_by_simulation
from .errors import AffineError, NotSubcritical
from .estimators import lse_discrete, lse_full, lse_theta_known_m, mle_full, mle_theta_known_m
from .model import (
    Criticality,
    ModelParams,
    _char_with_tail,
    classify,
    stationary_moments_closed,
)
from .experiment import ExperimentConfig, run_consistency, run_normality
from .pathstats import sufficient_stats
from .simulate import GridSpec, RngStream, Scheme, read_path_csv, simulate, write_path_csv

__all__ = ["main", "entry"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors: exit code 1, not argparse's 2
    def error(self, message):
        raise _UsageError(f"{message}\n{self.format_usage()}")


def _add_params(sub, required=True, m_default=None, theta_default=None):
    sub.add_argument("--a", type=float, required=required)
    sub.add_argument("--b", type=float, required=required)
    sub.add_argument("--m", type=float, default=m_default,
                     required=required and m_default is None)
    sub.add_argument("--theta", type=float, default=theta_default,
                     required=required and theta_default is None)


def _params(args) -> ModelParams:
    return ModelParams(a=args.a, b=args.b, m=args.m, theta=args.theta)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=1))


def _cmd_simulate(args) -> int:
    grid = GridSpec(t_end=args.T, dt=args.dt)
    path = simulate(
        _params(args), args.y0, args.x0, grid,
        scheme=Scheme(args.scheme), rng=RngStream(args.seed, args.stream),
    )
    write_path_csv(path, args.out)
    return 0


def _cmd_estimate(args) -> int:
    path = read_path_csv(getattr(args, "in"))
    name = args.estimator
    if name in ("mle_theta", "lse_theta") and args.m_known is None:
        raise _UsageError(f"--m-known is required for estimator {name}")
    if name == "mle_full":
        _emit(mle_full(sufficient_stats(path)).to_json())
    elif name == "lse_full":
        _emit(lse_full(sufficient_stats(path)).to_json())
    elif name == "mle_theta":
        s = sufficient_stats(path)
        _emit({
            "estimator": name,
            "values": {"theta": mle_theta_known_m(s, args.m_known)},
            "denominators": {"int_x2_over_y_ds": s.int_x2_over_y_ds},
            "valid": True,
        })
    elif name == "lse_theta":
        s = sufficient_stats(path)
        _emit({
            "estimator": name,
            "values": {"theta": lse_theta_known_m(s, args.m_known)},
            "denominators": {"int_x2_ds": s.int_x2_ds},
            "valid": True,
        })
    else:  # lse_discrete on the unit-time observations
        stride = round(1.0 / path.grid.dt)
        if abs(stride * path.grid.dt - 1.0) > 1e-9:
            raise _UsageError(
                f"lse_discrete needs a grid step tiling the unit interval, "
                f"got dt={path.grid.dt}"
            )
        m_hat, theta_hat = lse_discrete(path.x[::stride], args.m_known)
        values = {"theta": theta_hat} if m_hat is None else {"m": m_hat, "theta": theta_hat}
        _emit({"estimator": name, "values": values, "valid": True})
    return 0


def _cmd_moments(args) -> int:
    p = _params(args)
    if args.closed:
        mom = stationary_moments_closed(p)
        _emit({"values": mom.values(), "source": mom.source})
    else:
        mom = moments_by_simulation(
            p, t_total=args.T, dt=args.dt, burn_in=args.burn_in,
            rng=RngStream(args.seed),
        )
        _emit({
            "values": mom.values(),
            "source": mom.source,
            "stderr": mom.stderr,
            "closed_form": mom.closed,
        })
    return 0


def _cmd_char(args) -> int:
    p = _params(args)
    if classify(p) is not Criticality.SUBCRITICAL:
        raise NotSubcritical(f"b={p.b}, theta={p.theta} is not subcritical")
    if args.lambda1 < 0:
        raise _UsageError(f"--lambda1 must be >= 0, got {args.lambda1}")
    t_max = args.t_max if args.t_max is not None else max(20.0 / p.b, 20.0 / p.theta)
    value, tail = _char_with_tail(p, args.lambda1, args.lambda2, t_max, args.h, 1e-8)
    _emit({
        "real": value.real,
        "imag": value.imag,
        "t_max": t_max,
        "tail_bound": tail,
    })
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config) as fh:
        obj = json.load(fh)
    mode = obj.pop("mode", "consistency")
    moment_opts = obj.pop("moments", {})
    cfg = ExperimentConfig.from_json(obj)
    if mode == "consistency":
        report = run_consistency(cfg)
    elif mode == "normality":
        report = run_normality(
            cfg,
            moments_t_total=float(moment_opts.get("t_total", 5000.0)),
            moments_burn_in=float(moment_opts.get("burn_in", 50.0)),
        )
    else:
        raise _UsageError(f"unknown experiment mode {mode!r}")
    report.save(args.out)
    print(f"{mode} report written to {args.out}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="affine2f", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("simulate", help="simulate one path to CSV")
    _add_params(sp)
    sp.add_argument("--y0", type=float, default=1.0)
    sp.add_argument("--x0", type=float, default=0.0)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--dt", type=float, required=True)
    sp.add_argument("--scheme", choices=[s.value for s in Scheme], default="exact")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("estimate", help="estimate drift parameters from a path CSV")
    sp.add_argument("--in", dest="in", required=True)
    sp.add_argument(
        "--estimator",
        choices=["mle_theta", "mle_full", "lse_theta", "lse_full", "lse_discrete"],
        required=True,
    )
    sp.add_argument("--m-known", type=float, default=None)
    sp.set_defaults(func=_cmd_estimate)

    sp = sub.add_parser("moments", help="stationary moments, closed-form or simulated")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--closed", action="store_true")
    group.add_argument("--simulate", action="store_true")
    _add_params(sp)
    sp.add_argument("--T", type=float, default=5000.0)
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--burn-in", type=float, default=50.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_cmd_moments)

    sp = sub.add_parser("char", help="stationary transform E exp(-l1 Y + i l2 X)")
    sp.add_argument("--lambda1", type=float, required=True)
    sp.add_argument("--lambda2", type=float, required=True)
    _add_params(sp, m_default=0.0, theta_default=1.0)
    sp.add_argument("--t-max", type=float, default=None)
    sp.add_argument("--h", type=float, default=1e-3)
    sp.set_defaults(func=_cmd_char)

    sp = sub.add_parser("experiment", help="run a Monte Carlo experiment config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        return 0 if exc.code in (0, None) else 1
    except AffineError as exc:
        print(f"error: degenerate input: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
