"""Command-line front end: build | generate | evaluate | verify | oracle.

Exit status is 0 on success, 1 when a verification fails and 2 on usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import analysis
from .checking import write_trace_csv
from .construction import BuildParams, build_network, stage_audit
from .core import check_bits, rat_str
from .forecasters import PoolConfigError, load_pool, pool_to_config
from .netflow import Network, NetworkError, semimeasure_violations, validate
from .sampler import generate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _load_net(path) -> Network:
    try:
        return Network.load(path)
    except FileNotFoundError as exc:
        raise ConfigError(f"--net: no such file {path}") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"--net: {exc}") from exc


def _load_pool(path):
    try:
        return load_pool(path)
    except FileNotFoundError as exc:
        raise ConfigError(f"--pool: no such file {path}") from exc
    except PoolConfigError as exc:
        raise ConfigError(f"--pool: {exc}") from exc


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_build(args) -> int:
    pool = _load_pool(args.pool)
    try:
        params = BuildParams(args.depth, args.eps, pool, args.n0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    net = build_network(params)
    _write(args.out, net.to_json())
    lines = stage_audit(net)
    if args.audit:
        _write(args.audit, "".join(line + "\n" for line in lines))
    elif args.out not in (None, "-"):
        sys.stdout.write("".join(line + "\n" for line in lines))
    return EXIT_OK


def cmd_generate(args) -> int:
    net = _load_net(args.net)
    lines = [str(generate(net, args.seed + k)) for k in range(args.count)]
    _write(args.out, "".join(line + "\n" for line in lines))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    net = _load_net(args.net)
    pool = _load_pool(args.pool)
    omega = check_bits(args.omega) if args.omega else None
    report = analysis.miscalibration_experiment(net, pool, args.seed, args.checkpoints, omega)
    report.metadata = {
        "command": "evaluate",
        "network_file_digest": net.digest(),
        "pool": pool_to_config(pool),
        "seed": args.seed,
        "checkpoints": args.checkpoints,
        "omega": args.omega,
    }
    _write(args.out, _dump(report.to_dict()))
    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
        for name, rows in report.traces:
            with open(os.path.join(args.csv_dir, f"trace_{name}.csv"), "w", newline="") as fh:
                write_trace_csv(rows, fh)
    failed = [r for r in report.certified
              if not (r["hard_ok"] and r["purity_ok"] and r["expectation_ok"])]
    return EXIT_FAIL if failed else EXIT_OK


def verify_network(net: Network) -> dict:
    report = validate(net)
    semi = semimeasure_violations(net)
    rows = analysis.audit_S_series(net)
    return {
        "valid": report.ok,
        "violations": report.violations,
        "semimeasure_ok": not semi,
        "semimeasure_violations": semi[:20],
        "s_series_ok": all(r.ok for r in rows),
        "s_series": [
            {"n": r.n, "S": rat_str(r.S), "bound": None if r.bound is None else rat_str(r.bound), "ok": r.ok}
            for r in rows
        ],
    }


def cmd_verify(args) -> int:
    net = _load_net(args.net)
    out = verify_network(net)
    _write(args.out, _dump(out))
    return EXIT_OK if out["valid"] and out["semimeasure_ok"] and out["s_series_ok"] else EXIT_FAIL


def cmd_oracle(args) -> int:
    pool = _load_pool(args.pool)
    if not 0 <= args.program < len(pool):
        raise ConfigError(f"--program: index {args.program} outside pool of size {len(pool)}")
    prog = pool[args.program]
    x = check_bits(args.x) if args.x is not None else "0" * args.n
    budget = args.budget if args.budget is not None else 10 ** 9
    try:
        portion = analysis.hard_portion_oracle(prog, x, args.n, budget, args.task)
    except ValueError as exc:
        raise ConfigError(f"--n: {exc}") from exc
    _write(args.out, _dump({
        "program": args.program, "task": args.task, "n": args.n, "x": x,
        "budget": budget, "portion": rat_str(portion),
    }))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="noncalib", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a network from a forecaster pool")
    b.add_argument("--pool", required=True)
    b.add_argument("--depth", type=int, required=True)
    b.add_argument("--eps", type=_rational, default=Fraction(1, 10))
    b.add_argument("--n0", type=int, default=None)
    b.add_argument("--out", default="-")
    b.add_argument("--audit", default=None, help="stage audit file (default: stdout when --out is a file)")
    b.set_defaults(func=cmd_build)

    g = sub.add_parser("generate", help="run the probabilistic generator")
    g.add_argument("--net", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("evaluate", help="miscalibration certificates on a generated sequence")
    e.add_argument("--net", required=True)
    e.add_argument("--pool", required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--checkpoints", type=_int_list, default=None)
    e.add_argument("--omega", default=None, help="use this outcome sequence instead of generating one")
    e.add_argument("--out", default="-")
    e.add_argument("--csv-dir", default=None)
    e.set_defaults(func=cmd_evaluate)

    v = sub.add_parser("verify", help="validator, semimeasure laws and flow-series audit")
    v.add_argument("--net", required=True)
    v.add_argument("--out", default="-")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exhaustive share of extensions with few hard bits")
    o.add_argument("--pool", required=True)
    o.add_argument("--program", type=int, default=0)
    o.add_argument("--task", type=int, default=0)
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--x", default=None, help="base prefix (default: n zeros)")
    o.add_argument("--budget", type=int, default=None)
    o.add_argument("--out", default="-")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, NetworkError, ValueError) as exc:
        sys.stderr.write(f"noncalib {args.command}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
