"""Command-line front end.

Exit codes: 0 success, 1 a verification property failed, 2 unreadable input or
bad arguments, 3 a domain or solver failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings

import numpy as np

from . import asymnorm, bregman, expfam, verify
from .config import load_config
from .errors import AsymGeoError, ParseError
from .formatting import format_number, round_sig
from .integrands import BUILTINS, get_integrand
from .measures import Measure, ProbabilityMeasure, RandomVariable, load_measure, load_random_variable

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3

# kinds whose argument is a measure y (the norm is taken of y - z); the rest take random variables
MEASURE_KINDS = ("primal", "luxemburg:phi_abs", "luxemburg:phi_neg_abs")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _json_value(v):
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x) for x in v]
    if isinstance(v, (bool, np.bool_)) or v is None or isinstance(v, str):
        return bool(v) if isinstance(v, np.bool_) else v
    if isinstance(v, (int, np.integer)):
        return int(v)
    f = float(v)
    return format_number(f) if not math.isfinite(f) else round_sig(f)


def _dump_json(doc) -> str:
    return json.dumps(_json_value(doc)) + "\n"


def _scalars(pairs, fmt) -> str:
    """Named scalar results: one number per line by default, or a JSON object / CSV rows."""
    if fmt == "json":
        return _dump_json(dict(pairs))
    if fmt == "csv":
        return "".join(f"{k},{format_number(v)}\n" for k, v in pairs)
    return "".join(format_number(v) + "\n" for _, v in pairs)


def _measure_doc(p: Measure, extra: dict, fmt: str) -> str:
    """A solution measure that re-parses as a measure file, with scalar extras."""
    if fmt == "csv":
        lines = [f"# {k}={format_number(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v}"
                 for k, v in extra.items()]
        lines += [f"{label},{format_number(w)}" for label, w in zip(p.space.labels, p.weights)]
        return "\n".join(lines) + "\n"
    doc = {"space": list(p.space.labels), "weights": list(p.weights)}
    doc.update(extra)
    return _dump_json(doc)


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args):
    try:
        return load_config(abs_tol=args.tol, max_iter=args.max_iter, rng_seed=args.seed)
    except (OSError, ValueError) as exc:
        raise ParseError(f"bad configuration: {exc}") from None


# -- commands --------------------------------------------------------------------------


def cmd_divergence(args) -> int:
    y = load_measure(args.y)
    z = load_measure(args.z, space=y.space)
    F = get_integrand(args.integrand)
    d = bregman.kl_divergence(y, z) if F.name == "kl" else bregman.bregman_divergence(F, y, z)
    pairs = [("divergence", d)]
    if args.dual:
        x = load_random_variable(args.dual, space=y.space)
        pairs.append(("dual_divergence", bregman.dual_kl_divergence(x, z)))
    _emit(_scalars(pairs, args.format), args)
    return EXIT_OK


def _check_kind(kind: str) -> None:
    if kind not in asymnorm.all_norm_kinds():
        raise UsageError(f"unknown norm kind {kind!r}; choose from {', '.join(asymnorm.all_norm_kinds())}")


def _norm_argument(kind, path, z, ctx):
    """The vector the norm is evaluated at, in the coordinates of its kind."""
    if kind in MEASURE_KINDS:
        y = load_measure(path, space=z.space)
        if kind == "primal":
            return y.weights - z.weights
        return asymnorm.relative_deviation(y, ctx)
    return load_random_variable(path, space=z.space).values


def cmd_norm(args) -> int:
    _check_kind(args.kind)
    cfg = _config(args)
    z = load_measure(args.z)
    ctx = asymnorm.NormContext(z, cfg)
    v = _norm_argument(args.kind, args.x, z, ctx)
    norm = asymnorm.norm_function(args.kind, ctx)
    pairs = [("norm", norm(v))]
    if args.both:
        pairs.append(("reflected_norm", norm(-v)))
    if args.kind == "primal":
        for name, u in zip(("norm", "reflected_norm"), (v, -v)[:len(pairs)]):
            if asymnorm.is_domain_capped(u, ctx):
                print(f"note: {name} is capped by the positive cone", file=sys.stderr)
    _emit(_scalars(pairs, args.format), args)
    return EXIT_OK


def cmd_ball(args) -> int:
    _check_kind(args.kind)
    cfg = _config(args)
    z = load_measure(args.z)
    ctx = asymnorm.NormContext(z, cfg)
    sample = asymnorm.ball_boundary_sample(ctx, args.kind, args.count)
    n = z.weights.size
    if args.format == "json":
        doc = {"kind": args.kind, "z": list(z.weights), "abs_tol": cfg.abs_tol, "count": args.count,
               "angles": list(sample.angles), "points": sample.points.tolist(),
               "omitted": [{"angle": a, "reason": r} for a, r in sample.omitted]}
        _emit(_dump_json(doc), args)
        return EXIT_OK
    out = io.StringIO()
    out.write(f"# kind={args.kind} z={' '.join(format_number(w) for w in z.weights)} "
              f"abs_tol={format_number(cfg.abs_tol)} count={args.count} omitted={len(sample.omitted)}\n")
    for a, reason in sample.omitted:
        out.write(f"# omitted angle={format_number(a)} ({reason})\n")
    out.write(",".join(["angle", "px", "py", "pz"][:n + 1]) + "\n")
    for a, p in zip(sample.angles, sample.points):
        out.write(",".join(format_number(t) for t in (a, *p)) + "\n")
    _emit(out.getvalue(), args)
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _config(args)
    q = load_measure(args.q)
    x = load_random_variable(args.x, space=q.space)
    solve = expfam.solve_max_expectation if args.direction == "max" else expfam.solve_min_expectation
    sol = solve(x, q, args.lam, cfg)
    extra = {"beta": sol.beta, "value": sol.value, "residual": sol.residual, "slack": sol.slack}
    _emit(_measure_doc(sol.p, extra, args.format or "json"), args)
    return EXIT_OK


def _channel_inputs(args):
    if args.hamming is not None:
        cost, words = expfam.hamming_cost(args.hamming, args.alphabet)
        q = load_measure(args.q, space=words) if args.q else ProbabilityMeasure.uniform(words)
        p = load_measure(args.p, space=words) if args.p else ProbabilityMeasure.uniform(words)
        return cost, q, p
    if not (args.cost and args.q and args.p):
        raise UsageError("channel needs --hamming L, or all of --cost, --q and --p")
    q, p = load_measure(args.q), load_measure(args.p)
    cost = load_random_variable(args.cost, space=q.space.product(p.space))
    return cost, q, p


def cmd_channel(args) -> int:
    if (args.lam is None) == (args.beta is None):
        raise UsageError("give exactly one of --lambda and --beta")
    cfg = _config(args)
    cost, q, p = _channel_inputs(args)
    ref = expfam.product_measure(q, p)
    if args.beta is not None:
        w = expfam.tilt_channel(cost, q, p, args.beta)
        beta, residual = args.beta, None
    else:
        sol = expfam.solve_channel(cost, q, p, args.lam, cfg)
        w, beta, residual = sol.w, sol.beta, sol.residual
    extra = {
        "beta": beta,
        "expected_cost": float(cost.values @ w.weights),
        "mutual_information": float(bregman.kl_divergence(w, ref)),
    }
    if residual is not None:
        extra["residual"] = residual
    hist = expfam.cost_histogram(cost, w)
    if (args.format or "json") == "json":
        extra["histogram"] = [{"cost": c, "mass": m} for c, m in hist.items()]
    else:
        extra["histogram"] = " ".join(f"{format_number(c)}:{format_number(m)}" for c, m in hist.items())
    _emit(_measure_doc(w, extra, args.format or "json"), args)
    return EXIT_OK


def cmd_lottery(args) -> int:
    lot = expfam.TruncatedLottery(args.N, args.h, args.base)
    grid = tuple(args.beta_grid) if args.beta_grid else expfam.DEFAULT_BETA_GRID
    _emit(_dump_json(expfam.st_petersburg_report(lot, grid)), args)
    return EXIT_OK


def cmd_separation(args) -> int:
    cfg = _config(args)
    ctx = asymnorm.NormContext(load_measure(args.z), cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", asymnorm.DegenerateNormWarning)
        report = asymnorm.separation_report(ctx, random=args.random, seed=cfg.rng_seed)
    _emit(_dump_json(report.as_dict()), args)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    suites = verify.SUITES if args.suite == "all" else (args.suite,)
    results = verify.run_suites(suites, seed=cfg.rng_seed, trials=args.trials, cfg=cfg)
    _emit(verify.render(results, args.trials), args)
    return EXIT_OK if verify.all_passed(results) else EXIT_VERIFY


# -- parser ----------------------------------------------------------------------------------


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _nonnegative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=_positive(float), help="absolute tolerance for root finding")
    common.add_argument("--max-iter", type=_positive(int), help="iteration budget for bracketing and bisection")
    common.add_argument("--seed", type=int, help="seed for randomized probes and suites")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("-o", "--output", help="write output to this path instead of stdout")

    parser = _Parser(prog="asymgeo", description="Asymmetric norms and KL geometry on finite sample spaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("divergence", parents=[common], help="KL or Bregman divergence D[y, z]")
    p.add_argument("y")
    p.add_argument("z")
    p.add_argument("--dual", metavar="X", help="also print the dual divergence sum (e^x - 1 - x) z")
    p.add_argument("--integrand", default="kl", choices=sorted(BUILTINS))
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("norm", parents=[common], help="asymmetric norm of x (or of y - z) around base z")
    p.add_argument("x")
    p.add_argument("z")
    p.add_argument("--kind", default="gauge", help="one of: " + ", ".join(asymnorm.all_norm_kinds()))
    p.add_argument("--both", action="store_true", help="also print the norm of the reflection")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("ball", parents=[common], help="unit-sphere points of a norm (plot data)")
    p.add_argument("z")
    p.add_argument("--kind", default="gauge")
    p.add_argument("--count", type=int, default=64)
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("optimize", parents=[common], help="extremize <x, p> over the KL ball around q")
    p.add_argument("x")
    p.add_argument("q")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--direction", choices=("max", "min"), default="max")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("channel", parents=[common], help="minimum expected cost under a mutual-information budget")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--beta", type=float, help="tilt at a fixed inverse temperature instead of solving")
    p.add_argument("--hamming", type=_positive(int), metavar="L", help="Hamming cost on words of length L")
    p.add_argument("--alphabet", type=int, default=2)
    p.add_argument("--cost", help="cost file on the product space")
    p.add_argument("--q", help="first marginal (default uniform)")
    p.add_argument("--p", help="second marginal (default uniform)")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("lottery", parents=[common], help="truncated St. Petersburg lottery report")
    p.add_argument("--h", type=float, default=0.5)
    p.add_argument("--N", type=int, default=20)
    p.add_argument("--base", type=float, default=2.0)
    p.add_argument("--beta-grid", type=float, nargs="+")
    p.set_defaults(func=cmd_lottery)

    p = sub.add_parser("separation", parents=[common], help="T0/T1/T2 separation probes around z")
    p.add_argument("z")
    p.add_argument("--random", type=_nonnegative_int, default=8, help="number of random probe directions")
    p.set_defaults(func=cmd_separation)

    p = sub.add_parser("verify", parents=[common], help="run the randomized property suites")
    p.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    p.add_argument("--trials", type=_nonnegative_int, default=verify.DEFAULT_TRIALS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AsymGeoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
