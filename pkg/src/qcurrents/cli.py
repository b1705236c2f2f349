"""Command-line driver: configuration, suite orchestration, JSON reports.

Reports carry a versioned schema tag and are byte-deterministic for a
fixed configuration (sorted keys, no timestamps).  `verify-all` runs every
suite and exits nonzero if any check fails; QC_THREADS caps the worker
pool used to run independent suites.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .cartan import BUILTIN_CARTAN
from .geometry import CurveConfig
from .suites import SUITES

SCHEMA = "qc-report/1"


@dataclass
class RunConfig:
    curve: str = "rational"
    K: int = 6
    window: tuple = (-10, 10)
    max_mode: int = 10
    cartan: str = "A1"
    suite: str = "all"
    out: str | None = None

    def validate(self):
        if self.curve != "rational":
            raise ValueError(f"unknown curve {self.curve!r}")
        if self.K < 2:
            raise ValueError("K must be at least 2")
        lo, hi = self.window
        if hi - lo < 2 * self.K:
            raise ValueError("window span must be at least 2K")
        if self.cartan not in BUILTIN_CARTAN:
            raise ValueError(f"unknown cartan name {self.cartan!r}")
        if self.max_mode < 1:
            raise ValueError("max_mode must be positive")
        return self

    @staticmethod
    def from_json(data: dict) -> "RunConfig":
        return RunConfig(
            curve=data.get("curve", "rational"),
            K=int(data.get("K", 6)),
            window=tuple(data.get("window", (-10, 10))),
            max_mode=int(data.get("max_mode", 10)),
            cartan=data.get("cartan", "A1"),
        )

    def curve_config(self) -> CurveConfig:
        return CurveConfig(name=self.curve, K=self.K, max_mode=self.max_mode)


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("QC_THREADS", "1")))
    except ValueError:
        return 1


def run(subcommand: str, config: RunConfig):
    """Run one subcommand; returns (exit_status, report dict)."""
    config.validate()
    cfg = config.curve_config()
    base = {
        "schema": SCHEMA,
        "config": {
            "curve": config.curve,
            "K": config.K,
            "window": list(config.window),
            "max_mode": config.max_mode,
            "cartan": config.cartan,
        },
    }
    lo, hi = config.window
    window_half = min(-lo, hi)

    def run_suite(name, cartan_name):
        if name == "kernels":
            return SUITES[name](cfg, cartan_name, window_half=window_half)
        return SUITES[name](cfg, cartan_name)

    if subcommand in SUITES:
        report = run_suite(subcommand, config.cartan)
        base["suite"] = subcommand
        base["report"] = report
        return (0 if report["pass"] else 1), base
    if subcommand == "verify-all":
        names = sorted(SUITES)
        if config.suite != "all":
            if config.suite not in SUITES:
                raise ValueError(f"unknown suite {config.suite!r}")
            names = [config.suite]
        jobs = {}
        # the cartan and shuffle suites run for both built-in types
        def make_job(name):
            if name in ("cartan", "shuffle"):
                return lambda: {
                    cn: run_suite(name, cn) for cn in ("A1", "A2")
                }
            return lambda: run_suite(name, config.cartan)

        with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
            futures = {name: pool.submit(make_job(name)) for name in names}
            for name in names:
                jobs[name] = futures[name].result()

        def suite_pass(payload):
            if "pass" in payload:
                return payload["pass"]
            return all(v["pass"] for v in payload.values())

        base["suites"] = {name: jobs[name] for name in names}
        base["pass"] = all(suite_pass(jobs[name]) for name in names)
        return (0 if base["pass"] else 1), base
    raise ValueError(f"unknown subcommand {subcommand!r}")


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qcurrents",
        description="Exact truncated kernel calculus and pairing checks",
    )
    p.add_argument("subcommand", choices=sorted(SUITES) + ["verify-all"])
    p.add_argument("--config", help="JSON config path")
    p.add_argument("--K", type=int)
    p.add_argument("--window", help="LO:HI exponent window")
    p.add_argument("--max-mode", type=int, dest="max_mode")
    p.add_argument("--cartan", choices=sorted(BUILTIN_CARTAN))
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--suite", default="all",
                   help="restrict verify-all to one suite")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            with open(args.config) as fh:
                config = RunConfig.from_json(json.load(fh))
        else:
            config = RunConfig()
        if args.K is not None:
            config.K = args.K
        if args.window:
            lo, hi = args.window.split(":")
            config.window = (int(lo), int(hi))
        if args.max_mode is not None:
            config.max_mode = args.max_mode
        if args.cartan:
            config.cartan = args.cartan
        config.suite = args.suite
        config.out = args.out
        status, report = run(args.subcommand, config)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    text = dump_report(report)
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
