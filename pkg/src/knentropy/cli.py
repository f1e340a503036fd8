"""Command-line front end: compute measures, sweep orders, run property
suites, and reproduce the averaging-impossibility counterexample.

Exit codes: 0 success, 2 parse/input error, 3 numeric or solver failure,
4 property failure. Tables print 6 significant digits; JSON carries full
double precision. Output is byte-identical for identical (config, seed).
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from .conditional import AcSolverConfig, augustin_csiszar
from .frameworks import check_ccv, parse_core
from .means import DomainError
from .measures import MEASURE_NAMES, build_measure
from .prob import SimplexError, load_dist, load_joint, parse_dist
from .properties import (
    check_cre,
    check_dpi,
    check_example_identity,
    check_knavg_representation,
    run_counterexample,
)
from .vulnerability import VulnSpec, parse_gain
from .means import parse_fn

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_PROPERTY = 4

_INLINE = re.compile(r"^[\s0-9eE+.,-]+$")


def _dist_arg(text: str):
    if _INLINE.match(text):
        return parse_dist(text)
    return load_dist(text)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, bool):
        return str(x).lower()
    return str(x)


def _print_record(record: dict, as_json: bool):
    if as_json:
        print(json.dumps(record, sort_keys=True))
    else:
        print(" ".join(f"{k}={_fmt(v)}" for k, v in record.items() if v is not None))


def _solver_config(args) -> AcSolverConfig:
    return AcSolverConfig(
        method=args.method,
        restarts=args.restarts,
        max_iters=args.max_iters,
        step_size=args.step,
        tol=args.solver_tol,
        floor=args.floor,
        seed=args.solver_seed,
    )


def _load_joint_arg(args):
    if args.joint is None:
        return None
    prior = _dist_arg(args.prior) if args.prior else None
    return load_joint(args.joint, prior=prior, prior_first_column=args.prior_first_column)


def _measure_from_args(args, name=None):
    return build_measure(
        name or args.measure,
        alpha=args.alpha,
        beta=args.beta,
        phi=args.phi,
        psi=args.psi,
        gain=args.gain,
        solver=_solver_config(args),
    )


# ---------------------------------------------------------------------------
# subcommands

def cmd_compute(args) -> int:
    measure = _measure_from_args(args)
    joint = _load_joint_arg(args)
    record = {"measure": measure.name, **measure.params}

    if measure.name == "ac":
        if joint is None:
            raise SimplexError("measure 'ac' needs --joint")
        if args.alpha is None:
            raise SimplexError("measure 'ac' needs --alpha")
        sol = augustin_csiszar(joint, args.alpha, _solver_config(args))
        record.update(
            value=sol.value,
            iterations=sol.iterations,
            converged=sol.converged,
            restarts=args.restarts,
            method=sol.method,
            floor=args.floor,
        )
    elif joint is not None and measure.cond is not None:
        record.update(value=measure.cond(joint), converged=True)
        if measure.optimizer_valued:
            record.update(restarts=args.restarts, floor=args.floor)
    elif args.dist is not None and measure.uncond is not None:
        record.update(value=measure.uncond(_dist_arg(args.dist)), converged=True)
        if measure.optimizer_valued:
            record.update(restarts=args.restarts, floor=args.floor)
    else:
        need = "--joint" if measure.uncond is None else "--dist or --joint"
        raise SimplexError(f"measure {measure.name!r} needs {need}")
    _print_record(record, args.json)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.alphas:
        alphas = sorted(float(a) for a in args.alphas.split(","))
    elif args.alpha_range:
        lo, hi, count = args.alpha_range.split(":")
        alphas = list(np.linspace(float(lo), float(hi), int(count)))
    else:
        raise SimplexError("sweep needs --alphas or --alpha-range")
    joint = _load_joint_arg(args)
    dist = _dist_arg(args.dist) if args.dist else None

    print("alpha,measure,value")
    for alpha in alphas:
        for name in args.measure:
            m = build_measure(name, alpha=alpha, beta=args.beta, phi=args.phi,
                              psi=args.psi, gain=args.gain, solver=_solver_config(args))
            if joint is not None and m.cond is not None:
                value = m.cond(joint)
            elif dist is not None and m.uncond is not None:
                value = m.uncond(dist)
            else:
                raise SimplexError(f"measure {name!r} has no evaluator for the given input")
            print(f"{alpha:.6g},{name},{value:.6g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    prop = args.property
    if prop == "ccv":
        core_text = args.core
        if core_text is None:
            raise SimplexError("verify --property ccv needs --core")
        if "(" not in core_text and args.alpha is not None:
            core_text = f"{core_text}({args.alpha})"
        report = check_ccv(parse_core(core_text), trials=args.trials, seed=args.seed,
                           tol=args.tol if args.tol is not None else 1e-10)
        payload = {"property": "ccv", "core": core_text, **report.to_dict()}
        print(json.dumps(payload, sort_keys=True))
        return EXIT_OK if report.passed else EXIT_PROPERTY

    if prop == "knavg":
        if args.phi is None or args.gain is None:
            raise SimplexError("verify --property knavg needs --phi and --gain")
        phi = parse_fn(args.phi)
        psi = parse_fn(args.psi) if args.psi else phi
        spec = VulnSpec(phi, psi, parse_gain(args.gain), _solver_config(args))
        report = check_knavg_representation(spec, trials=args.trials, seed=args.seed,
                                            tol=args.tol if args.tol is not None else 1e-6)
    elif prop == "identity":
        report = check_example_identity(
            args.measure, alpha=args.alpha if args.alpha is not None else 2.0,
            trials=args.trials, seed=args.seed,
            tol=args.tol if args.tol is not None else 1e-4,
            cfg=_solver_config(args),
        )
    elif prop in ("cre", "dpi"):
        measure = _measure_from_args(args)
        tol = args.tol if args.tol is not None else 1e-10
        if prop == "cre":
            report = check_cre(measure, trials=args.trials, seed=args.seed, tol=tol)
        else:
            report = check_dpi(measure, trials=args.trials, seed=args.seed, tol=tol)
    else:
        raise SimplexError(f"unknown property {prop!r}")

    print(report.table() if args.table else report.to_json())
    return EXIT_OK if report.verdict == "pass" else EXIT_PROPERTY


def cmd_counterexample(args) -> int:
    p0 = parse_dist(args.p0).probs
    report = run_counterexample(alpha=args.alpha if args.alpha is not None else 2.0,
                                p0=p0, cfg=_solver_config(args))
    if args.json:
        print(report.to_json())
    else:
        print(f"a (forced averaging value) = {report.symmetric_entropy:.6g}")
        print(f"b (deterministic bound)    = {report.deterministic_bound:.6g}")
        print(f"c (solver minimum)         = {report.solver_value:.6g}")
        print(f"oracle minimum             = {report.oracle_value:.6g}")
        print(f"gap a - c                  = {report.gap:.6g}")
        print(f"passed                     = {str(report.passed).lower()}")
    return EXIT_OK if report.passed else EXIT_PROPERTY


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knentropy",
        description="KN-mean entropies, conditional entropies, and g-vulnerabilities",
    )
    parser.add_argument("--config", help="key=value file; entries override flags")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, measure_action="store"):
        p.add_argument("--measure", action=measure_action,
                       help=f"one of {', '.join(MEASURE_NAMES)}")
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--phi", help="monotone fn syntax, e.g. compose(qlog(0.5),exp)")
        p.add_argument("--psi")
        p.add_argument("--gain", help="soft01 | csv:PATH | transform(fn, gain)")
        p.add_argument("--dist", help="inline decimals '0.9,0.1' or a CSV path")
        p.add_argument("--joint", help="channel CSV path (row i = p(y|x_i))")
        p.add_argument("--prior", help="prior for --joint: inline or CSV path")
        p.add_argument("--prior-first-column", action="store_true",
                       help="first CSV column of --joint is the prior")
        p.add_argument("--json", action="store_true")
        p.add_argument("--restarts", type=int, default=8)
        p.add_argument("--max-iters", type=int, default=10_000)
        p.add_argument("--step", type=float, default=0.1)
        p.add_argument("--solver-tol", type=float, default=1e-12)
        p.add_argument("--floor", type=float, default=1e-12)
        p.add_argument("--method", choices=["exp_gradient", "fixed_point"],
                       default="exp_gradient")
        p.add_argument("--solver-seed", type=int, default=0)

    p = sub.add_parser("compute", help="evaluate one measure on one instance")
    add_common(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="CSV of measure values over a grid of orders")
    add_common(p, measure_action="append")  # sweep accepts --measure repeatedly
    p.add_argument("--alphas", help="comma list, e.g. 0.5,0.9,1.01,2")
    p.add_argument("--alpha-range", help="lo:hi:count linspace")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run a property suite")
    add_common(p)
    p.add_argument("--property", required=True,
                   choices=["cre", "dpi", "ccv", "identity", "knavg"])
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float)
    p.add_argument("--core", help="shannon | hct(a) | pnorm(a) | pnorm-power(a) | neg(core)")
    p.add_argument("--table", action="store_true", help="human table instead of JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counterexample",
                       help="reproduce the averaging-impossibility gap")
    add_common(p)
    p.add_argument("--p0", default="0.9,0.1")
    p.set_defaults(func=cmd_counterexample)

    return parser


def _apply_config(args, path: str):
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise SimplexError(f"config line is not key=value: {line!r}")
            dest = key.strip().replace("-", "_")
            if not hasattr(args, dest):
                raise SimplexError(f"unknown config key {key.strip()!r}")
            current = getattr(args, dest)
            value = value.strip()
            if isinstance(current, bool):
                coerced = value.lower() in ("1", "true", "yes", "on")
            elif isinstance(current, int) and not isinstance(current, bool):
                coerced = int(value)
            elif isinstance(current, float):
                coerced = float(value)
            elif isinstance(current, list):
                coerced = value.split(",")
            else:
                coerced = value
            setattr(args, dest, coerced)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    try:
        if args.config:
            _apply_config(args, args.config)
        return args.func(args)
    except (DomainError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SimplexError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
