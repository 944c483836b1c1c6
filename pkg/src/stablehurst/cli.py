"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 numeric or degenerate input,
4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, experiments, processes, specfun
from .errors import NumericError, StableHurstError, ValidationError
from .estimators import DEFAULT_BETA, DEFAULT_BETA_PAIR, estimate_joint
from .rng import SeedSpec

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _model_kwargs(args) -> dict:
    model = args.model.upper()
    keys = {"FBM": ("H",), "LEVY": ("alpha",), "LFSM": ("H", "alpha", "T", "mesh"),
            "TAKENAKA": ("nu", "alpha")}[model]
    kw = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    return kw


def _add_model_args(p):
    p.add_argument("--model", required=True, type=str.upper, choices=processes.MODELS)
    p.add_argument("--H", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--T", type=float, help="LFSM kernel truncation half-width")
    p.add_argument("--mesh", type=float, help="LFSM cell width")


def cmd_simulate(args) -> int:
    params = processes.make_params(args.model, **_model_kwargs(args))
    out = Path(args.out)
    if not out.parent.exists():
        raise FileNotFoundError(f"output directory {out.parent} does not exist")
    path = processes.simulate(args.model, params, args.n, SeedSpec(args.seed, args.stream))
    processes.write_path_csv(path, out)
    print(f"wrote {path.n + 1} rows to {out}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    path = processes.read_path_csv(args.input)
    values = path.values
    if (values.size - 1) % 2:
        print(f"warning: n={values.size - 1} is odd; dropping the last observation", file=sys.stderr)
        values = values[:-1]
    res = estimate_joint(values, args.filter, args.beta, (args.beta1, args.beta2))
    d = res.as_dict()
    if args.format == "csv":
        keys = list(d)
        print(",".join(keys))
        print(",".join(repr(float(d[k])) if isinstance(d[k], float) else str(d[k]).lower() for k in keys))
    else:
        print(f"H_hat = {res.h_hat!r}")
        print(f"alpha_hat = {res.alpha_hat!r}")
        print(f"degenerate_alpha = {str(res.degenerate_alpha).lower()}")
        for k in ("n", "v_n_beta", "v_half_beta", "v_n_beta1", "v_n_beta2", "psi_value"):
            print(f"{k} = {d[k]!r}")
    return EXIT_OK


def cmd_moments(args) -> int:
    closed = specfun.neg_moment_closed_form(args.alpha, args.beta)
    cf = specfun.neg_moment_via_cf(args.alpha, args.beta)
    print(f"alpha = {args.alpha!r}")
    print(f"beta = {args.beta!r}")
    print(f"closed_form = {closed!r}")
    print(f"cf_integral = {cf!r}")
    print(f"abs_difference = {abs(closed - cf)!r}")
    print(f"rel_difference = {abs(closed - cf) / closed!r}")
    return EXIT_OK


def cmd_variance(args) -> int:
    model = args.model.upper()
    bp = specfun.BetaPair(args.beta1, args.beta2)
    if model == "FBM":
        if args.H is None:
            raise ValidationError("--H is required for model FBM")
        xi = asymptotics.xi_fbm(args.filter, args.H, args.beta, args.Q, args.R)
        sigma = asymptotics.sigma_fbm(args.filter, args.H, bp, args.Q, args.R)
    elif model == "LEVY":
        if args.alpha is None:
            raise ValidationError("--alpha is required for model LEVY")
        table = asymptotics.levy_cov_table(args.alpha, args.filter, (args.beta, bp.beta1, bp.beta2),
                                           args.mc_samples, SeedSpec(args.seed, 0))
        xi = asymptotics.xi_levy(args.alpha, args.filter, args.beta, table, args.formula)
        sigma = asymptotics.sigma_levy(args.alpha, args.filter, bp, table, args.formula)
    else:
        raise ValidationError(f"asymptotic variances are available for FBM and LEVY only, not {model}")
    sys.stdout.write(xi.report())
    sys.stdout.write(sigma.report())
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.seed is None:
        raise ValidationError("--seed is required for experiment runs")
    overrides = {"seed": args.seed, "output": args.out, "workers": args.threads, "mode": args.mode}
    cfg, mode = experiments.load_config(args.config, overrides)
    if cfg.output is None:
        raise ValidationError("no output path: set 'output' in the config or pass --out")
    if not Path(cfg.output).parent.exists():
        raise FileNotFoundError(f"output directory {Path(cfg.output).parent} does not exist")
    report = experiments.run(cfg, mode)
    sys.stdout.write(report.summary())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stablehurst", description="Estimate H and alpha of stable self-similar processes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate a sample path and write t,value CSV")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate H and alpha from a t,value CSV")
    p.add_argument("input")
    p.add_argument("--filter", default="second_difference")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--beta1", type=float, default=DEFAULT_BETA_PAIR.beta1)
    p.add_argument("--beta2", type=float, default=DEFAULT_BETA_PAIR.beta2)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("moments", help="E|X|^beta for standard SaS X by two routes")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("variance", help="asymptotic variances Xi and Sigma")
    _add_model_args(p)
    p.add_argument("--filter", default="second_difference")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--beta1", type=float, default=DEFAULT_BETA_PAIR.beta1)
    p.add_argument("--beta2", type=float, default=DEFAULT_BETA_PAIR.beta2)
    p.add_argument("--Q", type=int, default=40, help="Hermite truncation (fBm)")
    p.add_argument("--R", type=int, default=1024, help="lag truncation (fBm)")
    p.add_argument("--mc-samples", type=int, default=1_000_000, help="covariance table size (Levy)")
    p.add_argument("--formula", choices=("corrected", "printed"), default="corrected")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("experiment", help="run a Monte Carlo campaign from a key=value config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--threads", type=int, help="worker processes (output bytes do not depend on it)")
    p.add_argument("--mode", choices=("consistency", "rate", "clt"))
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (StableHurstError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
