"""
MAIN ENTRY POINT - Transitions Between Separable Clusterings
=============================================================

Command-line front end for the Transit library.

Commands:
    transit <instance> -o <file>            full transition, verified, written to a transition file
    lsa <instance> --shape a,b,... -o <f>   constrained least-squares assignment for one shape
    radial <instance> -o <file>             best clustering over all shapes within the bounds
    verify <transition file>                re-check every property, exit code reflects the result
    render <transition file> --step i -o <svg>
    oracle <instance>                       brute-force cross-check of the LP solver
    generate --n N --k K --d D -o <file>    random instance with LSA endpoints

Global flags: --tol-feas, --tol-opt, --pivot {dantzig,bland}, --seed, --config <path>, --verbose

Exit codes: 0 success / verified, 1 verification failure, 2 input error,
3 internal invariant violation.

Usage:
    python main.py generate --n 12 --k 3 --d 2 -o instance.json
    python main.py transit instance.json -o transition.json
    python main.py render transition.json --step 0 -o step0.svg
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

# Setup
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))
load_dotenv(project_root / ".env")

from Transit.app import TransitApplication, create_transit_application
from Transit.Config import ConfigError
from Transit.Core import InternalInvariantError, Shape, TransitError
from Transit.IO_Layer import (
    Instance,
    parse_instance,
    parse_transition,
    render_svg,
    write_instance,
    write_transition,
)


EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def banner(title: str) -> None:
    print("=" * 70)
    print(title)
    print("=" * 70)


def parse_shape(text: str) -> Shape:
    try:
        return Shape(tuple(int(part) for part in text.split(",") if part.strip()))
    except ValueError as e:
        raise ConfigError(f"--shape expects comma-separated integers, got {text!r}") from e


# ====================================================
# COMMANDS
# ====================================================

def cmd_transit(args: argparse.Namespace, app: TransitApplication) -> int:
    banner("🚀 TRANSITION")
    instance = parse_instance(args.instance)
    print(f"\n📂 {args.instance}: n={instance.dataset.n}, d={instance.dataset.d}, k={instance.k}")

    seq, report = app.transit(instance)
    print(f"✅ {len(seq.clusterings)} clusterings (p={seq.p}, m={seq.m}, q={seq.q}), {len(seq.diagrams)} diagrams")
    print("\n" + report.summary().to_string(index=False))
    if not report.passed:
        first = report.failures()[0]
        print(f"\n❌ Verification failed: {first.check} at index {first.index}: {first.detail}")
        return EXIT_VERIFY_FAILED

    write_transition(seq, args.output)
    print(f"\n✅ All checks passed; transition written to {args.output}")
    return EXIT_OK


def cmd_lsa(args: argparse.Namespace, app: TransitApplication) -> int:
    banner("📐 CONSTRAINED LEAST-SQUARES ASSIGNMENT")
    instance = parse_instance(args.instance)
    result = app.lsa(instance, parse_shape(args.shape), args.sites)
    print(f"\n✅ shape {result.clustering.shape.sizes}, objective {result.objective:.12g}")
    write_instance(Instance(dataset=instance.dataset, initial=result.clustering, s=instance.sites(args.sites)), args.output)
    print(f"✅ Written to {args.output}")
    return EXIT_OK


def cmd_radial(args: argparse.Namespace, app: TransitApplication) -> int:
    banner("🎯 RADIAL CLUSTERING")
    instance = parse_instance(args.instance)
    result = app.radial(instance, args.sites)
    bounds = result.bounds
    print(f"\n✅ bounds {bounds.lower}..{bounds.upper}: shape {result.clustering.shape.sizes}, objective {result.objective:.12g}")
    write_instance(
        Instance(dataset=instance.dataset, initial=result.clustering, s=instance.sites(args.sites), bounds=bounds),
        args.output,
    )
    print(f"✅ Written to {args.output}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, app: TransitApplication) -> int:
    banner("🔍 VERIFY TRANSITION")
    seq = parse_transition(args.transition)
    # tolerances recorded in the file apply unless the command line sets them
    report = app.verify(seq, None if args.config_given else seq.config)
    print("\n" + report.summary().to_string(index=False))
    if report.passed:
        print(f"\n✅ {len(report.results)} checks passed")
        return EXIT_OK
    for failure in report.failures():
        print(f"❌ {failure.check} at index {failure.index}: {failure.detail}")
    return EXIT_VERIFY_FAILED


def cmd_render(args: argparse.Namespace, app: TransitApplication) -> int:
    seq = parse_transition(args.transition)
    step = args.step
    if not 0 <= step < len(seq.clusterings):
        raise ConfigError(f"--step must be in 0..{len(seq.clusterings) - 1}")

    if args.shared:
        if step == 0:
            raise ConfigError("--shared needs --step >= 1")
        records = [r for r in seq.diagrams if r.kind == "shared" and r.induces == (step - 1, step)]
        highlight = [j for j, (a, b) in enumerate(zip(seq.clusterings[step - 1].assignment,
                                                     seq.clusterings[step].assignment)) if a != b]
    else:
        records = [r for r in seq.diagrams if r.kind == "inducing" and r.induces == (step,)]
        highlight = []
    if not records:
        raise ConfigError(f"no {'shared' if args.shared else 'inducing'} diagram for step {step}")

    record = records[0]
    out = render_svg(seq.dataset, seq.clusterings[step], record.diagram, args.output,
                     title=f"step {step}: {record.label}", highlight=highlight)
    print(f"✅ {record.label} rendered to {out}")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace, app: TransitApplication) -> int:
    banner("🧮 BRUTE-FORCE CROSS-CHECK")
    instance = parse_instance(args.instance)
    frame = app.oracle(instance)
    for row in frame.itertuples(index=False):
        mark = "✅" if row.agree else "❌"
        if row.check == "radial_objective":
            print(f"{mark} {row.sites} sites: solver {row.solver:.12g}, enumeration {row.enumeration:.12g}")
        else:
            print(f"{mark} {row.sites} clustering is {'' if row.agree else 'NOT '}an LSA for its shape")
    return EXIT_OK if bool(frame["agree"].all()) else EXIT_VERIFY_FAILED


def cmd_generate(args: argparse.Namespace, app: TransitApplication) -> int:
    instance = app.generate(args.n, args.k, args.d, site_shift=args.shift)
    write_instance(instance, args.output)
    print(f"✅ Instance n={args.n}, k={args.k}, d={args.d} (seed {app.config.seed}) written to {args.output}")
    return EXIT_OK


# ====================================================
# ARGUMENTS
# ====================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-feas", type=float, default=None, help="Primal feasibility tolerance")
    common.add_argument("--tol-opt", type=float, default=None, help="Optimality tolerance")
    common.add_argument("--pivot", choices=["dantzig", "bland"], default=None, help="Entering-variable rule")
    common.add_argument("--seed", type=int, default=None, help="RNG seed for instance generation")
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("--verbose", "-v", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    # global flags follow the command: main.py transit inst.json -o out.json --pivot bland
    parser = argparse.ArgumentParser(description="Transitions between separable clusterings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transit", parents=[common], help="Full transition between the instance endpoints")
    p.add_argument("instance")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_transit)

    p = sub.add_parser("lsa", parents=[common], help="Constrained LSA for one shape")
    p.add_argument("instance")
    p.add_argument("--shape", required=True, help="Comma-separated cluster sizes")
    p.add_argument("--sites", choices=["initial", "target"], default="initial")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_lsa)

    p = sub.add_parser("radial", parents=[common], help="Best clustering over all shapes within the bounds")
    p.add_argument("instance")
    p.add_argument("--sites", choices=["initial", "target"], default="initial")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_radial)

    p = sub.add_parser("verify", parents=[common], help="Verify a transition file")
    p.add_argument("transition")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("render", parents=[common], help="Render one step as SVG (d = 2)")
    p.add_argument("transition")
    p.add_argument("--step", type=int, required=True)
    p.add_argument("--shared", action="store_true", help="Draw the shared diagram between step-1 and step")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_render)

    p = sub.add_parser("oracle", parents=[common], help="Brute-force cross-check (small instances)")
    p.add_argument("instance")
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("generate", parents=[common], help="Random instance with LSA endpoints")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--shift", type=float, default=0.5, help="Scale of the random site perturbation s -> t")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_generate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        app = create_transit_application(
            args.config,
            overrides={"tol_feas": args.tol_feas, "tol_opt": args.tol_opt, "pivot_rule": args.pivot, "seed": args.seed},
        )
        args.config_given = any(v is not None for v in (args.config, args.tol_feas, args.tol_opt, args.pivot))
        return args.handler(args, app)
    except InternalInvariantError as e:
        print(f"\n❌ Internal invariant violated: {e}")
        return EXIT_INTERNAL
    except (TransitError, ConfigError, OSError) as e:
        print(f"\n❌ {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
