"""
Run Transit Acceptance Criteria

Runs every case from acceptance_cases.json against the library and writes
acceptance_results.json next to this script.

Usage:
    python evaluation/run_acceptance.py
    python evaluation/run_acceptance.py --quick        # a tenth of every family
    python evaluation/run_acceptance.py --only AC3_breakpoints
"""

import sys
import argparse
import dataclasses
import logging
from pathlib import Path
from dotenv import load_dotenv

# Setup paths
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Load environment
load_dotenv(project_root / ".env")

from evaluation.evaluator import AcceptanceEvaluator, load_cases
from Transit.Config import ConfigError, load_config


def main():
    parser = argparse.ArgumentParser(description="Run the Transit acceptance criteria")
    parser.add_argument("--cases", default=str(Path(__file__).parent / "acceptance_cases.json"))
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--quick", action="store_true", help="run a tenth of every instance family")
    parser.add_argument("--only", action="append", default=[], help="case id to run (repeatable)")
    args = parser.parse_args()

    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    print("="*70)
    print("🔬 TRANSIT ACCEPTANCE")
    print("="*70)

    # Step 1: Load cases
    print("\n[1/4] Loading acceptance cases...")
    print(f"   Using: {args.cases}")
    cases = load_cases(args.cases)
    if args.only:
        cases = [case for case in cases if case.id in args.only]
    if args.quick:
        cases = [dataclasses.replace(case, instances=max(1, case.instances // 10)) for case in cases]
    print(f"✅ Loaded {len(cases)} case(s)")

    # Step 2: Configuration
    print("\n[2/4] Loading configuration...")
    try:
        config = load_config(args.config)
    except ConfigError as e:
        print(f"❌ Config error: {e}")
        return 2
    evaluator = AcceptanceEvaluator(config)
    print(f"✅ pivot rule {config.pivot_rule}, tol_feas {config.tol_feas:g}, tol_opt {config.tol_opt:g}")

    # Step 3: Run
    print("\n[3/4] Running criteria...")
    results = []
    for i, case in enumerate(cases, 1):
        print(f"\n  [{i}/{len(cases)}] {case.id} ({case.instances} instance(s))")
        result = evaluator.evaluate_single(case)
        results.append(result)
        status = "✅ passed" if result.passed else f"❌ {len(result.failures)} failure(s)"
        print(f"    {status} in {result.seconds:.1f}s")
        for failure in result.failures[:5]:
            print(f"    - {failure}")

    print("\n" + "="*70)
    print("📊 ACCEPTANCE RESULTS")
    print("="*70)
    for r in results:
        print(f"  {'PASS' if r.passed else 'FAIL'}  {r.id:<24} {r.seconds:8.1f}s  {r.stats or ''}")
    print("="*70)

    # Step 4: Save
    print("\n[4/4] Saving results...")
    output_file = Path(__file__).parent / "acceptance_results.json"
    evaluator.save_results(results, str(output_file))

    passed = all(r.passed for r in results)
    print("\n" + "="*70)
    print("✅ ACCEPTANCE COMPLETE!" if passed else "❌ ACCEPTANCE FAILED")
    print("="*70)
    print(f"\nResults saved to: {output_file}")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
