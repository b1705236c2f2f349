#!/usr/bin/env python3
"""Run the full verification grid and print a one-line summary per suite.

    python3 scripts/verify_all.py [--out report.json]

Equivalent to `qcurrents verify-all` with the default configuration; the
exit status is nonzero if any check fails.
"""

import argparse
import sys

from qcurrents.cli import RunConfig, dump_report, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", help="write the JSON report here")
    ap.add_argument("--K", type=int, default=6)
    ap.add_argument("--cartan", default="A1")
    args = ap.parse_args()
    config = RunConfig(K=args.K, cartan=args.cartan)
    status, report = run("verify-all", config)
    for name, payload in sorted(report["suites"].items()):
        if "pass" in payload:
            print(f"{name:12s} {'PASS' if payload['pass'] else 'FAIL'}")
        else:
            for sub, p in sorted(payload.items()):
                print(f"{name}/{sub:9s} {'PASS' if p['pass'] else 'FAIL'}")
    print("overall:", "PASS" if report["pass"] else "FAIL")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dump_report(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
