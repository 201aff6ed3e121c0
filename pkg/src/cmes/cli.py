"""Command line: solve or load beta, print coefficient tables, run identity checks.

    cmes beta solve --weight 8 --depth 4 --out beta.json
    cmes beta show 1 1
    cmes series G 2 --qorder 4
    cmes series g "2,1;0,1" --format csv
    cmes check all --weight 6 --depth 3 --qorder 30
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .eds import BetaSolution, solve_eds
from .eisenstein import (
    EisensteinContext,
    coefficient_records,
    parse_index,
    records_to_csv,
    records_to_json,
)
from .exact import TruncationParams, format_rational, parse_rational
from .poly import BiIndex
from .relations import REGISTRY, all_passed, check_identity

DEFAULT_W, DEFAULT_D, DEFAULT_N = 6, 3, 30


class UsageError(Exception):
    pass


def _parse_free(items):
    """['6,2=1', ...] -> {(6, 2): Fraction(1)}"""
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--free expects INDEX=VALUE, got {item!r}")
        idx, val = item.split("=", 1)
        out[tuple(int(x) for x in idx.split(","))] = parse_rational(val)
    return out


def _index_from_args(parts) -> BiIndex:
    """Either integers ('2 1') or one string ('2,1' or '2,1;0,1')."""
    try:
        if len(parts) == 1:
            return parse_index(parts[0])
        return BiIndex.of(tuple(int(x) for x in parts))
    except ValueError as exc:
        raise UsageError(f"bad index {' '.join(parts)!r}: {exc}") from None


def _truncation(args, need_w=2, need_d=1) -> TruncationParams:
    W = args.weight if args.weight is not None else max(DEFAULT_W, need_w)
    D = args.depth if args.depth is not None else max(min(DEFAULT_D, W), need_d)
    if W < 2:
        raise UsageError("--weight must be at least 2")
    if not 1 <= D <= W:
        raise UsageError("need weight >= depth >= 1")
    if args.qorder < 0:
        raise UsageError("--qorder must be >= 0")
    return TruncationParams(W, D, args.qorder)


def _load_or_solve(args, trunc: TruncationParams) -> BetaSolution:
    if args.beta:
        try:
            beta = BetaSolution.load(args.beta)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read beta file {args.beta}: {exc}") from None
        if beta.weight_max < trunc.weight_max or beta.depth_max < trunc.depth_max:
            raise UsageError(
                f"beta file covers (W={beta.weight_max}, D={beta.depth_max}), "
                f"truncation needs (W={trunc.weight_max}, D={trunc.depth_max})")
        return beta
    return solve_eds(trunc.weight_max, trunc.depth_max, _parse_free(getattr(args, "free", None)))


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_beta(args) -> int:
    if args.action == "solve":
        if args.index:
            raise UsageError("beta solve takes no index")
        trunc = _truncation(args)
        beta = solve_eds(trunc.weight_max, trunc.depth_max, _parse_free(args.free))
        for f in beta.free_params:
            idx = ",".join(map(str, f["index"]))
            print(f"free parameter beta({idx}) at weight {f['weight']} set to {format_rational(f['value'])}",
                  file=sys.stderr)
        if args.format == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["index", "value"])
            for e in beta.to_dict()["values"]:
                w.writerow([" ".join(map(str, e["index"])), e["value"]])
            _emit(buf.getvalue(), args.out)
        else:
            _emit(json.dumps(beta.to_dict(), indent=1), args.out)
        return 0
    if not args.index:
        raise UsageError("beta show needs an index, e.g. 'beta show 1 1'")
    idx = _index_from_args(args.index)
    if any(idx.d):
        raise UsageError("beta is indexed by k only")
    trunc = _truncation(args, need_w=idx.weight, need_d=idx.depth)
    beta = _load_or_solve(args, trunc)
    try:
        value = beta(idx.k)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    _emit(format_rational(value), args.out)
    return 0


def cmd_series(args) -> int:
    idx = _index_from_args(args.index)
    trunc = _truncation(args, need_w=idx.weight, need_d=idx.depth)
    ctx = EisensteinContext(_load_or_solve(args, trunc), trunc)
    try:
        rows = coefficient_records(ctx, args.name, [idx])
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    if args.format == "csv":
        text = records_to_csv(rows)
    elif args.format == "json":
        text = records_to_json(rows)
    else:
        text = ", ".join(format_rational(v) for *_, v in rows)
    _emit(text, args.out)
    return 0


def cmd_check(args) -> int:
    if args.identity != "all" and args.identity not in REGISTRY:
        raise UsageError(f"unknown identity {args.identity!r}; known identities: {', '.join(REGISTRY)}")
    trunc = _truncation(args)
    ctx = EisensteinContext(_load_or_solve(args, trunc), trunc)
    ids = list(REGISTRY) if args.identity == "all" else [args.identity]
    reports = []
    lines = []
    for i in ids:
        rep = check_identity(i, ctx)
        reports.append(rep)
        lines.append(rep.to_json())
        if not args.out:
            print(lines[-1], flush=True)
    if args.out:
        _emit("\n".join(lines), args.out)
    return 0 if all_passed(reports) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weight", type=int, default=None, help=f"weight bound W (default {DEFAULT_W})")
    common.add_argument("--depth", type=int, default=None, help=f"depth bound D (default {DEFAULT_D})")
    common.add_argument("--qorder", type=int, default=DEFAULT_N, help=f"q-order N (default {DEFAULT_N})")
    common.add_argument("--beta", help="BetaSolution JSON file instead of solving")
    common.add_argument("--free", action="append", metavar="INDEX=VALUE",
                        help="value for a free beta parameter, e.g. 6,2=1 (repeatable)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", help="write output to this file")

    p = argparse.ArgumentParser(prog="cmes", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("beta", parents=[common], help="solve or inspect beta")
    b.add_argument("action", choices=("solve", "show"))
    b.add_argument("index", nargs="*")
    b.set_defaults(func=cmd_beta)

    s = sub.add_parser("series", parents=[common], help="q-expansion of one coefficient")
    s.add_argument("name", choices=("G", "g", "gstar", "b", "btilde"))
    s.add_argument("index", nargs="+")
    s.set_defaults(func=cmd_series)

    c = sub.add_parser("check", parents=[common], help="run registry identities")
    c.add_argument("identity", help="identity id or 'all'")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
