"""Command-line entry point: ``superyangian <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version

from .evalmap import (FORMAL, SPECIALIZED, DegenerateCentralCharge, EvalParams, ev_h1,
                      ev_htilde1, ev_level0)
from .foundation import RankData, RankError, parse_scalar, scalar
from .pbw import TruncationWindow, format_monomial
from .report import Entry, Report
from .tails import dump

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


def _tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _ids(values) -> set:
    out = set()
    for v in values or ():
        out.update(x.strip() for x in v.split(",") if x.strip())
    return out


def _binding(text):
    try:
        return Fraction(text)
    except ValueError:
        return parse_scalar(text)


def _params(args, central) -> EvalParams:
    try:
        ctx = RankData(args.m, args.n)
    except RankError as e:
        raise ConfigError(str(e)) from e
    bindings = tuple((name, _binding(getattr(args, name)))
                     for name in ("eps1", "eps2") if getattr(args, name) is not None)
    alpha = scalar(args.alpha) if args.alpha is not None else EvalParams(ctx).alpha
    return EvalParams(ctx, alpha, central, bindings)


def _config_echo(args) -> dict:
    skip = {"func", "config", "out", "dump", "format"}
    return {k: v for k, v in sorted(vars(args).items())
            if k not in skip and v not in (None, [], False)}


def _entry(id_, anchor, ok, started, counterexample=None, **detail):
    return Entry(id_, anchor, "holds" if ok else "fails", counterexample,
                 round(time.perf_counter() - started, 4), detail)


# ---------------------------------------------------------------------------
# commands


def cmd_verify_relations(args) -> Report:
    from .evalmap import evaluation_assignment
    from .yangian import evaluate_relation, guard_shift, minimal_relations

    params = _params(args, SPECIALIZED)
    ctx = params.ctx
    asg = evaluation_assignment(params)
    only, skip = _ids(args.only), _ids(args.skip)
    rels = [r for r in minimal_relations(ctx)
            if (not only or r.id in only) and r.id not in skip]
    rep = Report("verify-relations", _config_echo(args), tool_version=_tool_version())
    for rel in rels:
        started = time.perf_counter()
        window = None
        if args.mode == "truncated" or args.window is not None or args.smax is not None:
            A = guard_shift(rel, asg)
            N = args.window if args.window is not None else 4
            window = (TruncationWindow(N, args.smax) if args.smax is not None
                      else TruncationWindow.guarded(N, A))
            try:
                window.check_guard(A)
            except ValueError as e:
                raise ConfigError(f"{rel.label}: {e}") from e
        v = evaluate_relation(rel, asg, args.mode, window)
        rep.entries.append(_entry(rel.label, rel.anchor, v.holds, started, v.counterexample or None,
                                  mode=v.mode, **v.detail))
    return rep


def cmd_check_identity(args) -> Report:
    from . import surjectivity as sj

    params = _params(args, FORMAL)
    rep = Report("check-identity", _config_echo(args), tool_version=_tool_version())
    ctx = params.ctx
    if args.which == "htilde-sum":
        started = time.perf_counter()
        res = sj.htilde_sum_identity(params)
        for c in res.checks:
            e = _entry(f"htilde-sum:{c.name}", c.anchor, c.holds, started, c.first_divergence() or None)
            if not c.holds and args.dump_sides:
                e.detail = {"lhs": dump(c.lhs), "rhs": dump(c.rhs)}
            rep.entries.append(e)
        return rep
    nodes = [args.i] if args.i is not None else list(range(1, ctx.size))
    modes = [args.a] if args.a is not None else [-2, -1, 1, 2]
    for i in nodes:
        for a in modes:
            if args.which == "diag-commutator":
                started = time.perf_counter()
                d = sj.h1_diag_commutator(i, a, params)
                central = dump(d.central_part).splitlines()[1:]
                rep.entries.append(_entry(f"diag-commutator:i={i},a={a}", "commutator of h_{i,1} with h_i t^a",
                                          d.matches_statement and d.sl_member, started,
                                          None if d.matches_statement else "central part differs",
                                          central_part=central, sl_member=d.sl_member,
                                          matches_parity_signed=d.matches_signed))
            else:
                terms = [f"term{args.term}"] if args.term else ["term3", "term4", "term5", "term6"]
                for w in terms:
                    started = time.perf_counter()
                    r = sj.tail_block_bracket(i, a, w, params)
                    cx = None
                    if not r.holds:
                        diff = dump(r.computed - r.closed_form).splitlines()
                        cx = diff[1] if len(diff) > 1 else None
                    rep.entries.append(_entry(f"tail-blocks:{w}:i={i},a={a}", r.anchor, r.holds, started, cx,
                                              matches_without_parity_sign=r.holds_unsigned))
    return rep


def _witness_entry(target, w, started, ok):
    expr = [[str(k), label] for k, label, _ in w.expression]
    return _entry(target, "diagonal element at mode 0" if w.rule.startswith("c1") else "diagonal loop element",
                  ok, started, None if ok else "witness does not reproduce target",
                  rule=w.rule, expression=expr, sl_remainder=dump(w.residual).splitlines()[1:])


def cmd_witness(args) -> Report:
    from . import surjectivity as sj

    params = _params(args, SPECIALIZED)
    rep = Report("witness", _config_echo(args), tool_version=_tool_version())
    started = time.perf_counter()
    j = args.j if args.j is not None else params.ctx.size
    a = args.a or 0
    w = sj.mode_zero_witness(j, params) if a == 0 else sj.diag_witness(j, a, params)
    ok = w.verified and sj.truncated_check(w, max(abs(a), 1))
    rep.entries.append(_witness_entry(f"E{j},{j}({a})", w, started, ok))
    return rep


def cmd_density_report(args) -> Report:
    from . import surjectivity as sj

    params = _params(args, SPECIALIZED)
    N = args.window if args.window is not None else 2
    if N > 4:
        raise ConfigError("window above 4 is outside the supported range")
    rep = Report("density-report", _config_echo(args), tool_version=_tool_version())
    started = time.perf_counter()
    dr = sj.density_report(params, N)
    for e in dr.entries:
        rep.entries.append(_witness_entry(e.target, e.witness, started, e.verified))
        started = time.perf_counter()
    return rep


def cmd_dump_image(args) -> str:
    params = _params(args, SPECIALIZED if args.specialize else FORMAL)
    i = args.i if args.i is not None else 0
    if not 0 <= i < params.ctx.size:
        raise ConfigError(f"node {i} outside 0..{params.ctx.size - 1}")
    if args.kind == "h1":
        x = ev_h1(i, params)
    elif args.kind == "htilde1":
        x = ev_htilde1(i, params)
    else:
        x = params.finish(ev_level0(params.ctx, i, args.kind))
    return dump(x)


# ---------------------------------------------------------------------------
# parser


def _common(p):
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--eps1", help="numeric value substituted for eps1")
    p.add_argument("--eps2", help="numeric value substituted for eps2")
    p.add_argument("--alpha", help="value or expression for alpha")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--config", help="JSON file of option defaults (flags win)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="superyangian",
                                 description="Check the evaluation map of the affine super Yangian.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-relations", help="check the defining relations on the images")
    _common(p)
    p.add_argument("--mode", choices=("symbolic", "truncated", "auto"), default="auto")
    p.add_argument("--window", type=int)
    p.add_argument("--smax", type=int)
    p.add_argument("--only", action="append", help="relation ids, e.g. htilde-weight (repeatable)")
    p.add_argument("--skip", action="append")
    p.set_defaults(func=cmd_verify_relations)

    p = sub.add_parser("check-identity", help="sum of all h~_{i,1}, diagonal commutators, tail-block brackets")
    _common(p)
    p.add_argument("which", choices=("htilde-sum", "diag-commutator", "tail-blocks"))
    p.add_argument("--i", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--term", type=int, choices=(3, 4, 5, 6))
    p.add_argument("--dump-sides", action="store_true", help="embed both sides of failing checks")
    p.set_defaults(func=cmd_check_identity)

    p = sub.add_parser("witness", help="witness for a diagonal E_jj(a) in the image closure")
    _common(p)
    p.add_argument("--j", type=int)
    p.add_argument("--a", type=int, default=0)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("density-report", help="witnesses for all diagonal targets in a window")
    _common(p)
    p.add_argument("--window", type=int)
    p.set_defaults(func=cmd_density_report)

    p = sub.add_parser("dump-image", help="print an image in the completion text format")
    _common(p)
    p.add_argument("--kind", choices=("h1", "htilde1", "x+", "x-", "h"), default="h1")
    p.add_argument("--i", type=int)
    p.add_argument("--specialize", action="store_true", help="substitute the central values")
    p.add_argument("--dump", help="alias of --out")
    p.set_defaults(func=cmd_dump_image)
    return ap


def _apply_config(ap, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    args = ap.parse_args(argv)
    if known.config:
        with open(known.config) as fh:
            defaults = json.load(fh)
        sub = ap._subparsers._group_actions[0].choices[args.command]
        unknown = set(defaults) - {a.dest for a in sub._actions}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**defaults)
        args = ap.parse_args(argv)
    return args


def main(argv=None) -> int:
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = _apply_config(ap, argv)
        result = args.func(args)
    except (ConfigError, RankError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateCentralCharge as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    out = getattr(args, "out", None) or getattr(args, "dump", None)
    if isinstance(result, str):
        text, code = result, EXIT_OK
    else:
        text = result.to_json() if args.format == "json" else result.to_text()
        code = EXIT_OK if result.ok else EXIT_FAIL
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
