"""Command-line entry point.

Exit status is 0 on success, 1 for bad input and 2 for numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

from . import experiments
from .decision import maximizing_actions, read_problem
from .estimation import klir_estimate_known_model, klir_estimate_searched
from .lattice import Model, ModelError, model_from_json
from .maxent import IpfConvergenceError, IpfSettings, fit_maxent, project_model
from .prob import (
    SchemeError,
    distribution_to_json,
    dumps,
    project,
    read_distribution,
)
from .search import SearchSettings, best_model

EXIT_INPUT = 1
EXIT_NUMERIC = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _csv_list(kind):
    def parse(text):
        try:
            return tuple(kind(v) for v in text.split(",") if v.strip())
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
    return parse


def _base(text):
    if text == "e":
        return None
    value = float(text)
    if value <= 1:
        raise argparse.ArgumentTypeError("log base must exceed 1")
    return value


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _ipf(args) -> IpfSettings:
    return IpfSettings(args.tolerance, args.max_sweeps)


def _load_model(scheme, path) -> Model:
    with open(path) as fh:
        return model_from_json(scheme, json.load(fh))


def _in_base(d: float, base) -> float:
    return d if base is None else d / math.log(base)


def cmd_project(args) -> int:
    p = read_distribution(args.input)
    names = [v.strip() for v in args.vars.split(",") if v.strip()]
    _emit(dumps(distribution_to_json(project(p, names))), args.out)
    return 0


def cmd_reconstruct(args) -> int:
    p = read_distribution(args.input)
    model = _load_model(p.scheme, args.model)
    fit = fit_maxent(project_model(p, model), _ipf(args))
    print(
        f"model {model}: {fit.sweeps} sweeps, marginal residual {fit.residual:.3e}",
        file=sys.stderr,
    )
    _emit(dumps(distribution_to_json(fit.distribution)), args.out)
    return 0


def _search_settings(args) -> SearchSettings:
    return SearchSettings(delta=args.delta, max_depth=args.max_depth, ipf=_ipf(args))


def cmd_search(args) -> int:
    p = read_distribution(args.input)
    trace = best_model(p, _search_settings(args))
    unit = "nats" if args.base is None else f"log{args.base:g}"
    rows = []
    prev = 0.0
    for model, d in trace.steps:
        rows.append((str(model), _in_base(d, args.base), _in_base(d - prev, args.base), ""))
        prev = d
    if trace.rejected is not None:
        model, d = trace.rejected
        rows.append(
            (str(model), _in_base(d, args.base), _in_base(d - prev, args.base), "rejected")
        )
    width = max(len(r[0]) for r in rows + [("model",)])
    print(f"{'model':<{width}}  {'divergence':>12}  {'increment':>12}  ({unit})")
    for name, d, inc, note in rows:
        print(f"{name:<{width}}  {d:12.6g}  {inc:12.6g}  {note}".rstrip())
    print(f"chosen: {trace.chosen}")
    return 0


def cmd_estimate(args) -> int:
    p_hat = read_distribution(args.input)
    settings = _search_settings(args)
    if args.model:
        est = klir_estimate_known_model(p_hat, _load_model(p_hat.scheme, args.model), settings)
    else:
        est = klir_estimate_searched(p_hat, settings)
    diagnostics = {"sweeps": est.sweeps, "residual": est.residual}
    if est.trace is not None:
        diagnostics["delta_bits"] = settings.delta
        diagnostics["trace"] = [
            {"model": m.to_json(), "divergence": d} for m, d in est.trace.steps
        ]
    obj = {
        "estimate": distribution_to_json(est.estimate),
        "model": est.model.to_json(),
        "diagnostics": diagnostics,
    }
    _emit(dumps(obj), args.out)
    return 0


def cmd_decide(args) -> int:
    p = read_distribution(args.input)
    dp = read_problem(p.scheme, args.problem)
    best = maximizing_actions(dp, p)
    for action, eu in zip(dp.actions, dp.expected_utilities(p)):
        mark = "*" if action in best else " "
        print(f"{mark} {action}\t{eu!r}")
    print("maximizing: " + ",".join(a for a in dp.actions if a in best))
    return 0


def cmd_experiment(args) -> int:
    overrides = {}
    if args.config:
        with open(args.config) as fh:
            obj = json.load(fh)
        obj.setdefault("name", args.name)
        if obj["name"] != args.name:
            raise UsageError(f"config is for {obj['name']!r}, not {args.name!r}")
        if args.seed is None and "master_seed" not in obj:
            raise UsageError("a seed is required: pass --seed or set master_seed in the config")
        cfg = experiments.ExperimentConfig.from_json(obj)
    else:
        if args.seed is None:
            raise UsageError("a seed is required: pass --seed")
        cfg = experiments.default_config(args.name)
    for flag, field in [
        ("seed", "master_seed"), ("trials", "trials"), ("n_values", "n_values"),
        ("epsilons", "epsilon_values"), ("acts", "acts_per_matrix"),
        ("matrices", "matrices_per_distribution"), ("delta", "delta"),
        ("workers", "workers"), ("tolerance", "ipf_tolerance"),
        ("max_sweeps", "ipf_max_sweeps"),
    ]:
        value = getattr(args, flag)
        if value is not None:
            overrides[field] = value
    if args.delta is not None:
        overrides["delta_per_n"] = None
    if args.delta_per_n is not None:
        overrides["delta_per_n"] = args.delta_per_n
    cfg = replace(cfg, **overrides)
    result = experiments.run(cfg)
    sys.stderr.write(result.to_text())
    _emit(result.to_csv(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="recon", description="Reconstructability analysis tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def ipf_flags(p, defaults=True):
        p.add_argument("--tolerance", type=float, default=1e-10 if defaults else None,
                       help="max marginal residual for proportional fitting")
        p.add_argument("--max-sweeps", type=int, default=1000 if defaults else None)

    def search_flags(p):
        p.add_argument("--delta", type=float, default=0.01,
                       help="largest accepted divergence increment per step, in bits")
        p.add_argument("--max-depth", type=int, default=None)
        ipf_flags(p)

    p = sub.add_parser("project", help="marginalize a distribution file")
    p.add_argument("input")
    p.add_argument("--vars", required=True, help="comma-separated variable names")
    p.add_argument("--out")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("reconstruct", help="maximum-entropy reconstruction from a model")
    p.add_argument("input")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    ipf_flags(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("search", help="greedy model search, printed as a trace")
    p.add_argument("input")
    p.add_argument("--base", type=_base, default=2.0, help="log base for display, or 'e'")
    search_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("estimate", help="reconstruct sampled frequencies from a model")
    p.add_argument("input")
    p.add_argument("--model", help="model file; searched for when omitted")
    p.add_argument("--out")
    search_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("decide", help="expected utilities and the maximizing actions")
    p.add_argument("input")
    p.add_argument("--problem", required=True)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("experiment", help="run one Monte Carlo table")
    p.add_argument("name", choices=experiments.TABLES)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON file mirroring the experiment config")
    p.add_argument("--trials", type=int)
    p.add_argument("--n-values", type=_csv_list(int))
    p.add_argument("--epsilons", type=_csv_list(float))
    p.add_argument("--acts", type=int)
    p.add_argument("--matrices", type=int)
    p.add_argument("--delta", type=float, help="fixed search threshold in bits")
    p.add_argument("--delta-per-n", type=float,
                   help="search threshold of this many bits divided by n")
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    ipf_flags(p, defaults=False)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"recon: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IpfConvergenceError, ArithmeticError) as exc:
        print(f"recon: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError, KeyError, TypeError, SchemeError, ModelError) as exc:
        print(f"recon: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
