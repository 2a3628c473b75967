"""Command-line interface.

Subcommands: kloosterman, gauss, bilinear, count, region, sweep, verify,
plan.  Exit code 0 on success; failures print a machine-readable JSON error
on stderr and exit with a category-specific code (2 invalid input, 3
resource limit, 4 I/O, 5 verification, 1 anything else).
"""

from __future__ import annotations

import argparse
import json
import sys

from .bilinear import Interval, bilinear_generalized, bilinear_kloosterman
from .bounds import improvement_region
from .counting import (
    dyadic_average,
    jr_congruence,
    jr_equation,
    rr_congruence,
    rr_equation,
)
from .csvio import emit_csv, load_config, save_config, default_plan
from .errors import ConfigError, DomainRestriction, KgsumsError, VerificationError
from .experiments import (
    average_sweep,
    build_weight_vector,
    exceptional_budget,
    run_experiment,
)
from .expsums import characters, gauss, kloosterman
from .modmath import Modulus
from .verify import run_verify

_EXIT_CODES = {
    "not_a_unit": 2,
    "domain_restriction": 2,
    "invalid_weight": 2,
    "modulus_mismatch": 2,
    "config_error": 2,
    "invalid_input": 2,
    "resource_limit": 3,
    "io_error": 4,
    "verification_failed": 5,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgsums",
        description="Kloosterman/Gauss sums, bilinear forms, and cancellation measurement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kloosterman", help="one complete Kloosterman sum")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("gauss", help="one Gauss sum for a character index")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--chi", type=int, required=True, help="index in enumeration order")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("bilinear", help="seeded weighted bilinear form experiment")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--M", type=int, required=True, help="weight support size")
    p.add_argument("--N", type=int, required=True, help="interval length")
    p.add_argument("--L", type=int, default=0, help="interval offset")
    p.add_argument("--weights", choices=("const", "pm1", "unit"), default="const")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", default="fast", help="comma-separated evaluation methods")
    p.add_argument("--k", type=int, default=1, help="inverse-power kernel exponent")
    p.add_argument("--family", choices=("kloosterman", "gauss"), default="kloosterman")
    p.add_argument("--out", default=None, help="write records as CSV")

    p = sub.add_parser("count", help="congruence / equation solution counts")
    p.add_argument(
        "--kind",
        choices=("jr", "rr", "jr-eq", "rr-eq", "jr-avg", "rr-avg"),
        required=True,
    )
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--Q", type=int, default=None, help="dyadic range start for *-avg")
    p.add_argument("--method", choices=("convolution", "exhaustive"), default="convolution")

    p = sub.add_parser("region", help="classify exponents against the polygon")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)

    p = sub.add_parser("sweep", help="dyadic average sweep over q in [Q, 2Q]")
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--weights", choices=("const", "pm1", "unit"), default="pm1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", choices=("kloosterman", "gauss"), default="kloosterman")
    p.add_argument("--out", default=None)

    sub.add_parser("verify", help="run the condensed invariant suite")

    p = sub.add_parser("plan", help="run or emit a JSON run plan")
    p.add_argument("--config", default=None, help="path of the plan to execute")
    p.add_argument("--emit-defaults", default=None, help="write the default plan here")
    return parser


def _cmd_kloosterman(args) -> int:
    res = kloosterman(Modulus.of(args.q), args.m, args.n)
    print(f"K_{args.q}({args.m}, {args.n}) = {res.value.real:.15g} + {res.value.imag:.3g}i")
    print(f"terms = {res.terms}, error_bound = {res.error_bound:.3e}")
    return 0


def _cmd_gauss(args) -> int:
    mod = Modulus.of(args.q)
    chars = list(characters(mod))
    if not 0 <= args.chi < len(chars):
        raise DomainRestriction(f"--chi must lie in [0, {len(chars)}) for q = {mod.q}")
    chi = chars[args.chi]
    res = gauss(mod, chi, args.n)
    kind = "primitive" if chi.is_primitive else f"conductor {chi.conductor}"
    print(f"G_{args.q}(chi_{args.chi}, {args.n}) = {res.value:.15g}   [{kind}]")
    print(f"|G| = {abs(res.value):.15g}, error_bound = {res.error_bound:.3e}")
    return 0


def _cmd_bilinear(args) -> int:
    methods = tuple(m.strip() for m in args.method.split(",") if m.strip())
    if args.k != 1:
        if args.family != "kloosterman":
            raise DomainRestriction("--k applies to the kloosterman family only")
        mod = Modulus.of(args.q)
        weights = build_weight_vector(mod, args.M, args.weights, args.seed)
        J = Interval.of(mod, args.L, args.N)
        res = bilinear_generalized(weights, J, args.k)
        print(f"S_{{{args.k},{args.q}}} = {res.value:.15g}, |S| = {abs(res.value):.15g}")
        print(f"error_bound = {res.error_bound:.3e}")
        return 0
    records = run_experiment(
        args.q,
        args.M,
        args.N,
        L=args.L,
        weight_kind=args.weights,
        seed=args.seed,
        methods=methods,
        family=args.family,
    )
    for rec in records:
        print(
            f"q={rec.q} M={rec.M} N={rec.N} |S|={rec.abs_sum:.6e} "
            f"{rec.bound_name}={rec.bound_value:.6e} ratio={rec.ratio:.4f}"
        )
    if args.out:
        emit_csv(records, args.out)
        print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_count(args) -> int:
    if args.kind in ("jr", "rr"):
        if args.q is None:
            raise ConfigError("--q is required for congruence counts")
        fn = jr_congruence if args.kind == "jr" else rr_congruence
        value = fn(args.q, args.K, args.r, method=args.method)
        print(f"{args.kind}(q={args.q}, K={args.K}, r={args.r}) = {value}")
    elif args.kind in ("jr-eq", "rr-eq"):
        fn = jr_equation if args.kind == "jr-eq" else rr_equation
        value = fn(args.K, args.r)
        print(f"{args.kind}(K={args.K}, r={args.r}) = {value}")
    else:
        if args.Q is None:
            raise ConfigError("--Q is required for dyadic averages")
        kind = "reciprocal" if args.kind == "jr-avg" else "product"
        mean, per_q = dyadic_average(args.Q, args.K, args.r, kind=kind)
        print(f"mean over q in [{args.Q}, {2 * args.Q}] = {mean} ({float(mean):.6g})")
        print(f"max per-q count = {max(per_q.values())} at q = {max(per_q, key=per_q.get)}")
    return 0


def _cmd_region(args) -> int:
    print(improvement_region(args.mu, args.nu))
    return 0


def _cmd_sweep(args) -> int:
    records, exceptional = average_sweep(
        args.Q,
        args.N,
        args.r,
        args.epsilon,
        weight_kind=args.weights,
        seed=args.seed,
        family=args.family,
    )
    budget = exceptional_budget(args.Q, args.r, args.epsilon)
    print(f"{len(records)} moduli swept over [{args.Q}, {2 * args.Q}]")
    print(
        f"exceptional (ratio > 1): {exceptional}; reference Q^(1-2*r*eps) = {budget:.6g}; "
        f"fraction = {exceptional / budget:.6g}"
    )
    if args.out:
        emit_csv(records, args.out)
        print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    results = run_verify()
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed += 0 if ok else 1
    if failed:
        raise VerificationError(f"{failed} of {len(results)} checks failed")
    print(f"all {len(results)} checks passed")
    return 0


def _cmd_plan(args) -> int:
    if args.emit_defaults:
        save_config(default_plan(), args.emit_defaults)
        print(f"wrote default plan to {args.emit_defaults}")
        return 0
    if not args.config:
        raise ConfigError("plan requires --config or --emit-defaults")
    plan = load_config(args.config)
    argv = [plan.command]
    for key, value in plan.options.items():
        if value is None:
            continue
        argv += [f"--{key}", str(value)]
    return main(argv)


_DISPATCH = {
    "kloosterman": _cmd_kloosterman,
    "gauss": _cmd_gauss,
    "bilinear": _cmd_bilinear,
    "count": _cmd_count,
    "region": _cmd_region,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "plan": _cmd_plan,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except KgsumsError as exc:
        print(json.dumps({"category": exc.category, "message": str(exc)}), file=sys.stderr)
        return _EXIT_CODES.get(exc.category, 1)
    except (ValueError, KeyError) as exc:
        print(json.dumps({"category": "invalid_input", "message": str(exc)}), file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"category": "io_error", "message": str(exc)}), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
