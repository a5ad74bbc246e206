"""Command line: verify / report / cache.

Exit code is nonzero iff some record FAILed; OUT_OF_SCOPE and NOT_EVALUABLE
are distinct statuses that do not fail a run.
"""

from __future__ import annotations

import argparse
import sys

from . import cache as cache_mod
from .config import ALL_SUITES, load_config
from .report import emit_report, load_report
from .suites import run_suite


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gl2triple",
        description="Exact verification suites for invariant trilinear forms "
                    "on GL2(Qp) principal series at desk scale.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--config", help="TOML config file")
    v.add_argument("--suite", action="append", choices=ALL_SUITES,
                   help="suite to run (repeatable; default: all)")
    v.add_argument("--p", action="append", type=int, help="prime (repeatable)")
    v.add_argument("--level", type=int, help="coset level for the lemma suites")
    v.add_argument("--backend", choices=("exact", "numeric", "both"))
    v.add_argument("--tol", type=float, help="numeric tolerance")
    v.add_argument("--seed", type=int)
    v.add_argument("--jobs", type=int)
    v.add_argument("--output", help="report JSON path")
    v.add_argument("--no-cache", action="store_true")
    v.add_argument("--cache-dir")
    v.add_argument("--no-timings", action="store_true",
                   help="zero the timing fields for byte-stable output")

    r = sub.add_parser("report", help="re-emit a stored report")
    r.add_argument("--input", default="report.json")
    r.add_argument("--format", choices=("json", "markdown"), default="markdown")
    r.add_argument("--output", help="output path (default stdout)")
    r.add_argument("--no-timings", action="store_true")

    c = sub.add_parser("cache", help="inspect or clear the cache")
    c.add_argument("--clear", action="store_true")
    c.add_argument("--dir", default="")
    return ap


def cmd_verify(args) -> int:
    overrides = {
        "suites": args.suite, "primes": args.p, "level": args.level,
        "backend": args.backend, "tolerance": args.tol, "seed": args.seed,
        "jobs": args.jobs, "output": args.output,
        "cache_dir": args.cache_dir,
        "use_cache": False if args.no_cache else None,
    }
    cfg = load_config(args.config, overrides)
    report = run_suite(cfg)
    emit_report(report, cfg.output, "json",
                include_timings=not args.no_timings)
    summ = report.summary()
    for rec in sorted(report.records, key=lambda r: r.id):
        print("%-14s %s" % (rec.status, rec.id))
    print("summary:", ", ".join("%s %d" % kv for kv in sorted(summ.items())),
          "-> %s" % cfg.output)
    return 1 if report.failed() else 0


def cmd_report(args) -> int:
    rep = load_report(args.input)
    text = (rep.to_json(not args.no_timings) if args.format == "json"
            else rep.to_markdown(not args.no_timings))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_cache(args) -> int:
    d = cache_mod.cache_dir(args.dir)
    if args.clear:
        n = cache_mod.clear(d)
        print("cleared %d entries in %s" % (n, d))
    else:
        print("cache directory: %s" % d)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cmd == "verify":
        return cmd_verify(args)
    if args.cmd == "report":
        return cmd_report(args)
    return cmd_cache(args)


if __name__ == "__main__":
    sys.exit(main())
