"""Command line entry points.

Subcommands:

    simulate     one EC process CSV for a sampled cloud
    limit        limit-curve CSV "t,value,std_error,K_used"
    experiment   convergence study directory (results, summary, curves)
    oracle       brute-force equivalence suite on seeded small clouds
    breakpoints  exact critical scales of a sampled cloud (Rips rules)

Exit codes: 0 success; 2 configuration/domain/unsupported errors (and usage
errors); 3 resource budget or precision errors.  ``oracle`` exits 1 when the
suite finds a mismatch, distinguishing a failed equivalence from a bad
invocation.
"""

import argparse
import json
import sys
from pathlib import Path

from ._version import __version__
from .complexes import points_outside, rule_from_spec
from .ec_process import (
    breakpoints,
    default_grid,
    ec_process,
    process_csv_text,
    write_process_csv,
)
from .errors import (
    ConfigurationError,
    DomainError,
    PrecisionError,
    ResourceBudgetError,
    UnsupportedConfigurationError,
)
from .experiments import (
    DEFAULT_MAX_N,
    ExperimentConfig,
    run_convergence,
)
from .limits import LimitFunction, MCSettings
from .oracle import run_oracle_suite
from .radial_models import (
    law_from_json,
    preset,
    radius_R_n,
    sample_cloud,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3


def _fmt(x) -> str:
    return repr(float(x))


def _law_from_args(args):
    doc = getattr(args, "law", None)
    if doc:
        text = doc.strip()
        if not text.startswith("{"):
            p = Path(doc)
            if not p.exists():
                raise ConfigurationError(
                    f"--law expects a JSON document or a file path, got {doc!r}"
                )
            text = p.read_text(encoding="utf-8")
        return law_from_json(text)
    return preset(getattr(args, "preset", None) or "example_3_2")


def _int_list(text: str):
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, _, hi = part.partition("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ConfigurationError(f"empty integer list: {text!r}")
    return out


def _add_law_flags(p):
    p.add_argument("--preset", choices=("example_3_2", "example_4_2"),
                   help="bundled example law (default example_3_2)")
    p.add_argument("--law", help="law JSON document or path to one (overrides --preset)")


def _add_rule_flag(p):
    p.add_argument("--rule", default="rips_linf",
                   help="rule 'kind[:threshold]'; kinds rips_l2, rips_linf, cech; "
                        "bare rips_linf gets threshold 2**-0.5, others 1.0")


def _cmd_simulate(args) -> int:
    law = _law_from_args(args)
    rule = rule_from_spec(args.rule)
    if args.n > args.max_n:
        raise ConfigurationError(
            f"n = {args.n} exceeds max-n = {args.max_n}; raise --max-n to opt in"
        )
    cloud = sample_cloud(law, args.n, args.seed)
    if args.n == 0:
        R = 0.0
    else:
        R = radius_R_n(law, args.n, args.xi)
    grid = default_grid(args.t_max, args.step)
    proc = ec_process(cloud, rule, R, grid, k_cap=args.k_cap, budget=args.budget)
    if args.out:
        write_process_csv(proc, args.out, per_k=args.per_k)
    else:
        text, _ = process_csv_text(proc, per_k=args.per_k)
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_limit(args) -> int:
    law = _law_from_args(args)
    rule = rule_from_spec(args.rule)
    mc = MCSettings(samples=args.mc_samples, seed=args.mc_seed)
    limit = LimitFunction.for_law(law, rule=rule, xi=args.xi,
                                  eps=args.eps, mc=mc)
    grid = default_grid(args.t_max, args.step)
    curve = limit.curve(grid)
    lines = ["t,value,std_error,K_used"]
    for j in range(grid.shape[0]):
        lines.append(",".join([
            _fmt(curve.t[j]), _fmt(curve.value[j]),
            _fmt(curve.std_error[j]), str(int(curve.k_used)),
        ]))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(doc, dict):
            raise ConfigurationError(f"{args.config} does not hold a JSON object")
    if args.law:
        doc["law"] = json.loads(args.law) if args.law.strip().startswith("{") else args.law
    elif args.preset:
        doc["law"] = args.preset
    if args.rule is not None:
        doc["rule"] = args.rule
    if args.n is not None:
        doc["n_values"] = _int_list(args.n)
    if args.seeds is not None:
        doc["seeds"] = _int_list(args.seeds)
    for flag, key in (("xi", "xi"), ("t_max", "t_max"), ("step", "step"),
                      ("eps", "eps"), ("mc_samples", "mc_samples"),
                      ("mc_seed", "mc_seed"), ("budget", "budget"),
                      ("max_n", "max_n")):
        val = getattr(args, flag)
        if val is not None:
            doc[key] = val
    if args.sup_a is not None or args.sup_b is not None:
        base = doc.get("sup_interval", (0.1, 3.0))
        doc["sup_interval"] = (
            base[0] if args.sup_a is None else args.sup_a,
            base[1] if args.sup_b is None else args.sup_b,
        )
    config = ExperimentConfig.from_dict(doc)
    result = run_convergence(config, out_dir=args.out, jobs=args.jobs)
    for row in result.summary:
        print(f"n={row['n']} median={row['median']!r} "
              f"q10={row['q10']!r} q90={row['q90']!r}")
    errs = sum(1 for r in result.rows if r.error)
    if errs:
        print(f"{errs} of {len(result.rows)} rows recorded errors", file=sys.stderr)
    print(f"wrote {result.out_dir}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    report = run_oracle_suite(trials=args.trials, max_n=args.max_n,
                              seed=args.seed)
    print(report.summary())
    return EXIT_OK if report.ok else 1


def _cmd_breakpoints(args) -> int:
    law = _law_from_args(args)
    rule = rule_from_spec(args.rule)
    cloud = sample_cloud(law, args.n, args.seed)
    if args.n == 0:
        R = 0.0
    else:
        R = radius_R_n(law, args.n, args.xi)
    ext = points_outside(cloud, R)
    bps = breakpoints(ext, rule)
    text = "\n".join(_fmt(v) for v in bps) + ("\n" if bps.size else "")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailchi",
        description="Euler characteristic processes of geometric complexes "
                    "on distribution tails",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write one EC process CSV")
    _add_law_flags(p)
    _add_rule_flag(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--step", type=float, default=0.02)
    p.add_argument("--k-cap", type=int, default=None)
    p.add_argument("--budget", type=int, default=100_000_000)
    p.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)
    p.add_argument("--per-k", action="store_true",
                   help="include per-dimension count columns S0,S1,...")
    p.add_argument("--out", help="CSV path (stdout when omitted; the metadata "
                                 "sidecar is written only with --out)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("limit", help="write a limit-curve CSV")
    _add_law_flags(p)
    _add_rule_flag(p)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--step", type=float, default=0.02)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--mc-samples", type=int, default=200_000)
    p.add_argument("--mc-seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.set_defaults(func=_cmd_limit)

    p = sub.add_parser("experiment", help="run a convergence study")
    _add_law_flags(p)
    p.add_argument("--rule", default=None,
                   help="rule 'kind[:threshold]' (default rips_linf)")
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--n", help="comma list or a..b range of sample sizes")
    p.add_argument("--seeds", help="comma list or a..b range of seeds")
    p.add_argument("--xi", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None, dest="t_max")
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--mc-samples", type=int, default=None, dest="mc_samples")
    p.add_argument("--mc-seed", type=int, default=None, dest="mc_seed")
    p.add_argument("--sup-a", type=float, default=None)
    p.add_argument("--sup-b", type=float, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--max-n", type=int, default=None, dest="max_n")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("oracle", help="run the subset brute-force suite")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--max-n", type=int, default=12, dest="max_n",
                   help="exterior points per cloud (subset cost is 2^max_n)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("breakpoints",
                       help="exact critical scales of a sampled cloud")
    _add_law_flags(p)
    _add_rule_flag(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.set_defaults(func=_cmd_breakpoints)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, DomainError, UnsupportedConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceBudgetError, PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
