"""Run the verification suites and write the JSON report."""
import argparse
import sys
import time

from kaclevy.harness_cli.config import SUITES
from kaclevy.harness_cli.verify import run_verify


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--suite", choices=SUITES, default="all")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--paths", type=int, default=None)
    ap.add_argument("--out", default="verify_report.json")
    args = ap.parse_args()

    start = time.perf_counter()
    report = run_verify(args.suite, seed=args.seed, workers=args.workers, paths=args.paths)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report.render())
    for c in report.checks:
        if not c.passed:
            print(f"FAIL {c.name}: {c.statistic:.4g} > {c.threshold:.4g}")
    s = report.summary()
    print(f"{s['checks']} checks, {s['failed']} failed, {s['skipped']} skipped "
          f"in {time.perf_counter() - start:.1f}s -> {args.out}")
    sys.exit(0 if report.passed else 1)


if __name__ == "__main__":
    main()
