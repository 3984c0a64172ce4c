"""Command line entry point: ``cocycle-lab <command> --config cfg.json``.

Exit codes: 0 when every check passes, 1 on a failed check or a module
error, 2 on a usage or schema error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import traceback

from . import config as cfgmod
from .errors import CocycleLabError
from .experiments import run
from .report import golden_compare, golden_from_report, load_json, save_json

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, help="root seed (overrides the config)")
    p.add_argument("--out", help="directory for the JSON report and CSV tables")
    p.add_argument("--golden", choices=("verify", "update"), help="compare with or rewrite a golden file")
    p.add_argument("--golden-path", help="golden file (default: the config's 'golden' field)")
    p.add_argument("--tol-overrides", nargs="*", default=[], metavar="K=V",
                   help="tolerance overrides, e.g. law=1e-9")
    p.add_argument("--tol", type=float, help="rank cutoff for the Gram realisation")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cocycle-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in cfgmod.COMMANDS:
        _common(sub.add_parser(name))
    g = sub.add_parser("golden", help="verify a report against a golden file, or rewrite it")
    g.add_argument("action", choices=("verify", "update"))
    g.add_argument("report")
    g.add_argument("golden_file")
    g.add_argument("--tol-overrides", nargs="*", default=[], metavar="K=V")
    return parser


def _raiser_module(exc) -> str:
    tb = exc.__traceback__
    name = "cocycle_lab"
    while tb is not None:
        mod = tb.tb_frame.f_globals.get("__name__", "")
        if mod.startswith("cocycle_lab"):
            name = mod
        tb = tb.tb_next
    return name


def _golden_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"override {item!r} is not KEY=VALUE")
        try:
            out[key] = float(value)
        except ValueError:
            raise UsageError(f"override {key} needs a number") from None
    return out


def _cmd_golden(args) -> int:
    report = load_json(args.report)
    if args.action == "update":
        save_json(args.golden_file, golden_from_report(report))
        print(f"golden written: {args.golden_file}")
        return EXIT_PASS
    res = golden_compare(report, load_json(args.golden_file),
                         overrides=_golden_overrides(args.tol_overrides))
    for f in res["failures"]:
        print(f"drift: {f['field']} {json.dumps({k: v for k, v in f.items() if k != 'field'})}")
    print(f"golden {'pass' if res['passed'] else 'FAIL'} ({res['compared']} fields)")
    return EXIT_PASS if res["passed"] else EXIT_FAIL


def _cmd_run(args) -> int:
    data = load_json(args.config) if args.config else {}
    if args.config and not isinstance(data, dict):
        raise cfgmod.ConfigError("config must be a JSON object")
    if args.seed is not None:
        data["seed"] = args.seed
    tol = dict(data.get("tolerances") or {})
    tol.update(cfgmod.parse_overrides(args.tol_overrides))
    if args.tol is not None:
        tol["rank"] = args.tol
    if tol:
        data["tolerances"] = tol
    cfg = cfgmod.validate(args.command, data)
    golden_path = args.golden_path or cfg.get("golden")
    if args.golden and not golden_path:
        raise UsageError("--golden needs --golden-path or a 'golden' field in the config")

    start = time.perf_counter()
    report = run(args.command, cfg)
    report.timing = {"seconds": round(time.perf_counter() - start, 6)}

    if args.golden == "update":
        save_json(golden_path, golden_from_report(report.to_json()))
    elif args.golden == "verify":
        report.golden = golden_compare(report.to_json(), load_json(golden_path),
                                       cfg["tolerances"]["golden"],
                                       {"golden": tol["golden"]} if "golden" in tol else None)
    out = args.out or cfg.get("out")
    if out:
        path = report.write(out)
        status = "pass" if report.passed else "FAIL"
        print(f"{args.command}: {status} ({sum(c['passed'] for c in report.checks)}/"
              f"{len(report.checks)} checks) -> {path}")
    else:
        print(report.dumps())
    if report.golden is not None:
        for f in report.golden["failures"]:
            print(f"golden drift: {f['field']}", file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "golden":
            return _cmd_golden(args)
        return _cmd_run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CocycleLabError as exc:
        print(f"error in {_raiser_module(exc)}.{exc.operation or '?'}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        traceback.print_exc(limit=3, file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
