"""Command line interface.

    nilorth run NAME [--config PATH] [--out DIR] [--threads N] [--seed S]
                [--assert | --no-assert]
    nilorth list
    nilorth validate --config PATH
    nilorth describe NAME_OR_KIND

Exit codes: 0 success, 1 assertion failure, 2 config/schema error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import harness


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nilorth", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a bundled or file-based experiment")
    run.add_argument("name", nargs="?", help="bundled experiment name")
    run.add_argument("--config", help="path to an experiment config file")
    run.add_argument("--out", help="output directory for results.json / CSV")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--seed", type=int, default=None, help="override config seed")
    run.add_argument(
        "--assert", dest="check", action=argparse.BooleanOptionalAction, default=True,
        help="fail (exit 1) when configured assertions do not hold",
    )

    sub.add_parser("list", help="list bundled experiments and kinds")

    val = sub.add_parser("validate", help="schema-check a config file")
    val.add_argument("--config", required=True)

    desc = sub.add_parser("describe", help="describe an experiment or kind")
    desc.add_argument("name")
    return ap


def _load(args) -> harness.ExperimentConfig:
    if args.config:
        return harness.load_config(args.config)
    if args.name:
        return harness.load_bundled_config(args.name)
    raise harness.ConfigError("run needs a bundled name or --config PATH")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list":
            print("bundled experiments:")
            for name in harness.bundled_config_names():
                cfg = harness.load_bundled_config(name)
                print(f"  {name:24s} kind={cfg.kind}")
            print("\nexperiment kinds:")
            for kind, (_, doc) in harness.EXPERIMENT_KINDS.items():
                print(f"  {kind:24s} {doc}")
            return 0

        if args.command == "validate":
            harness.load_config(args.config)
            print(f"{args.config}: ok")
            return 0

        if args.command == "describe":
            if args.name in harness.EXPERIMENT_KINDS:
                print(f"{args.name}: {harness.EXPERIMENT_KINDS[args.name][1]}")
                return 0
            cfg = harness.load_bundled_config(args.name)
            print(f"{args.name} (kind={cfg.kind})")
            for sec, body in cfg.sections.items():
                print(f"  [{sec}]")
                for k, v in body.items():
                    print(f"    {k} = {v}")
            return 0

        # run
        cfg = _load(args)
        if args.seed is not None:
            cfg.sections.setdefault("experiment", {})["seed"] = str(args.seed)
        record = harness.run(cfg, out_dir=args.out, threads=args.threads)
        for rep in record.assertions:
            mark = "pass" if rep["passed"] else "FAIL"
            print(f"[{mark}] {record.name}: {rep['name']} "
                  f"(observed={rep['observed']}, threshold={rep['threshold']})")
        print(f"{record.name}: {len(record.reports)} reports in {record.wall_time_s}s "
              f"(config {record.config_hash})")
        if args.check and not record.passed:
            return 1
        return 0
    except harness.ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except harness.ResourceCapExceeded as err:
        print(f"resource cap: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
