"""Command line front end: ``bdproc <command> ...``.

Exit codes: 0 success, 1 negative answer (not enabled, not equivalent,
failed check), 2 undetermined within the budget, 3 invalid input net,
4 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, corpus
from .conflict import classify
from .harness import run_suite
from .net import (
    EmptyStepError,
    Net,
    NetValidationError,
    NotEnabledError,
    UnknownNodeError,
    fire_sequence,
    fire_step,
    reachable_markings,
)
from .process import ProcessValidationError, canonical_process, enumerate_processes
from .swapping import bd_preorder_fin, default_budget, order_relation, swap_equiv
from .textio import (
    ParseError,
    dot_export,
    dumps,
    marking_graph_dot,
    parse_marking,
    parse_net,
    parse_process,
    serialize_net,
    serialize_process,
    to_jsonable,
)

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_INVALID, EXIT_USAGE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_net(source: str) -> Net:
    """``source`` is a net file or the name of a built-in figure net."""
    if Path(source).is_file():
        return parse_net(_read(source))
    if source in corpus.NETS:
        return corpus.get(source)
    raise UsageError(f"no such file or corpus net: {source}")


def _status_code(v) -> int:
    return {"holds": EXIT_OK, "fails": EXIT_NO, "unknown": EXIT_UNKNOWN}[v.status.value]


def _budget(args) -> int:
    return args.budget if args.budget else default_budget()


# ---------------------------------------------------------------------------


def cmd_validate(args, out) -> int:
    net = load_net(args.net)
    print(f"ok: {net.name}: {len(net.places)} places, {len(net.transitions)} transitions, "
          f"M0 = {net.initial_marking}", file=out)
    return EXIT_OK


def cmd_fire(args, out) -> int:
    net = load_net(args.net)
    m = parse_marking(_read(args.marking)) if args.marking else net.initial_marking
    try:
        if args.step is not None:
            step = [t.strip() for t in args.step.split(",") if t.strip()]
            if not step:
                raise UsageError("--step needs at least one transition")
            result = fire_step(net, m, step)
        else:
            result = fire_sequence(net, m, args.seq.split())
    except NotEnabledError as exc:
        print(f"not enabled: {exc}", file=sys.stderr)
        return EXIT_NO
    except (UnknownNodeError, EmptyStepError) as exc:
        raise UsageError(str(exc)) from None
    print(result, file=out)
    return EXIT_OK


def cmd_reach(args, out) -> int:
    net = load_net(args.net)
    g = reachable_markings(net, args.cap)
    print(f"markings: {len(g.vertices)}  edges: {len(g.edges)}  "
          f"complete: {str(g.complete).lower()}  safe: {str(g.is_safe()).lower()}", file=out)
    for i, m in enumerate(g.vertices):
        path = " ".join(g.path_to(m)) or "-"
        print(f"  m{i} {m}  via {path}", file=out)
    if args.dot:
        Path(args.dot).write_text(marking_graph_dot(g), encoding="utf-8")
    return EXIT_OK if g.complete else EXIT_UNKNOWN


def cmd_classify(args, out) -> int:
    net = load_net(args.net)
    cl = classify(net, args.cap)
    v = cl.verdicts()
    if args.json:
        doc = {
            "tool_version": __version__,
            "net": net.name,
            "budgets": {"cap": args.cap},
            "verdicts": {k: x.status.value for k, x in sorted(v.items())},
            "structural_conflict_pairs": sorted(sorted(p) for p in cl.structural_conflict_pairs),
            "witnesses": [{"property": k, "status": x.status.value, "witness": to_jsonable(x.witness)}
                          for k, x in sorted(v.items()) if x.witness is not None],
            "exploration": cl.exploration,
        }
        out.write(dumps(doc))
    else:
        e = cl.exploration
        print(f"net {net.name}: {e['markings']} markings, complete={str(e['complete']).lower()}",
              file=out)
        for k, x in v.items():
            line = f"{k}={x.status.value}"
            if x.witness is not None:
                line += f"  witness {x.witness}"
            print(line, file=out)
        pairs = ", ".join("{" + ",".join(sorted(p)) + "}" for p in
                          sorted(sorted(p) for p in cl.structural_conflict_pairs))
        print(f"structural_conflict_pairs={pairs or '-'}", file=out)
    return EXIT_OK if cl.all_definite else EXIT_UNKNOWN


def cmd_unfold(args, out) -> int:
    net = load_net(args.net)
    enum = enumerate_processes(net, args.depth, cap=args.max or default_budget())
    sizes = enum.by_size()
    print(f"processes: {len(enum)} (up to isomorphism, at most {args.depth} events)", file=out)
    print("by size: " + " ".join(f"{k}:{len(sizes[k])}" for k in sorted(sizes)), file=out)
    if enum.truncated_by_cap:
        print(f"truncated: --max {args.max} reached", file=out)
    elif enum.truncated_by_depth:
        print("truncated: some processes extend beyond the depth", file=out)
    maxs = sorted(enum.maximal(), key=lambda p: (len(p), serialize_process(canonical_process(p))))
    print(f"maximal: {len(maxs)}", file=out)
    for i, p in enumerate(maxs, 1):
        cp = canonical_process(p)
        evs = " ".join(f"{e}:{t}" for e, t in sorted(cp.events.items(), key=lambda x: int(x[0][1:])))
        print(f"  M{i}: {len(cp)} events  {evs or '(empty)'}", file=out)
    if args.dot or args.proc:
        for i, p in enumerate(maxs, 1):
            cp = canonical_process(p)
            if args.dot:
                d = Path(args.dot)
                d.mkdir(parents=True, exist_ok=True)
                (d / f"M{i}.dot").write_text(dot_export(cp, f"M{i}"), encoding="utf-8")
            if args.proc:
                d = Path(args.proc)
                d.mkdir(parents=True, exist_ok=True)
                (d / f"M{i}.proc").write_text(serialize_process(cp, f"M{i}", net.name),
                                              encoding="utf-8")
    return EXIT_OK


def _load_pair(args):
    net = load_net(args.net)
    p = parse_process(_read(args.p1), net)
    q = parse_process(_read(args.p2), net)
    return net, p, q


def cmd_equiv(args, out) -> int:
    _, p, q = _load_pair(args)
    v = swap_equiv(p, q, _budget(args))
    print(f"swap_equiv={v.status.value}", file=out)
    if v.is_holds:
        path = v.witness
        print(f"path length {len(path)}", file=out)
        for mv in path.moves:
            print(f"  swap {mv.p} {mv.q} in {'P1' if path.start == 'p' else 'P2'}", file=out)
    elif v.detail:
        print(f"  {v.detail}", file=out)
    return _status_code(v)


def cmd_order(args, out) -> int:
    net, p, q = _load_pair(args)
    rel = order_relation(p, q, net, _budget(args))
    print(rel, file=out)
    if args.verbose:
        v = bd_preorder_fin(p, q, net, _budget(args))
        if v.is_holds:
            out.write(serialize_process(v.witness, "extension", net.name))
    return EXIT_UNKNOWN if rel == "unknown" else EXIT_OK


def cmd_check(args, out) -> int:
    if args.net:
        net = load_net(args.net)
        expected = corpus.EXPECTED.get(args.net, {}) if args.net in corpus.NETS else {}
        nets = [(net.name, net, expected)]
        label = net.name
    else:
        nets = None
        label = "corpus"
    report = run_suite(nets, depth=args.depth, budget=_budget(args), cap=args.cap)
    text = dumps(report.to_json(__version__, label))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    if not args.quiet:
        for c in report.checks:
            print(f"{c.outcome.upper():7} {c.net:11} {c.check_id}", file=sys.stderr)
    return report.exit_code()


def cmd_corpus(args, out) -> int:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    for c in corpus.corpus():
        (d / f"{c.name}.net").write_text(serialize_net(c.net), encoding="utf-8")
        print(d / f"{c.name}.net", file=out)
    for name, p in (("abc1", corpus.fig1_first_maximal()), ("abc2", corpus.fig1_second_maximal())):
        (d / f"{name}.proc").write_text(serialize_process(p, name, "fig1"), encoding="utf-8")
        print(d / f"{name}.proc", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bdproc", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"bdproc {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("validate", help="check a net file")
    p.add_argument("net")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("fire", help="fire a step or a sequence")
    p.add_argument("net")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--step", help='comma separated multiset, e.g. "a,b"')
    g.add_argument("--seq", help='space separated sequence, e.g. "a b c"')
    p.add_argument("--marking", help="file with the marking to start from")
    p.set_defaults(fn=cmd_fire)

    p = sub.add_parser("reach", help="explore reachable markings")
    p.add_argument("net")
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--dot", metavar="FILE")
    p.set_defaults(fn=cmd_reach)

    p = sub.add_parser("classify", help="conflict and persistence verdicts")
    p.add_argument("net")
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("unfold", help="enumerate processes up to a depth")
    p.add_argument("net")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--max", type=int, help="stop after this many processes")
    p.add_argument("--dot", metavar="DIR", help="write maximal processes as DOT")
    p.add_argument("--proc", metavar="DIR", help="write maximal processes as process files")
    p.set_defaults(fn=cmd_unfold)

    for name, fn, hlp in (("equiv", cmd_equiv, "decide swapping equivalence"),
                          ("order", cmd_order, "compare two processes in the BD-preorder")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("net")
        p.add_argument("p1")
        p.add_argument("p2")
        p.add_argument("--budget", type=int)
        if name == "order":
            p.add_argument("-v", "--verbose", action="store_true",
                           help="print the extension of P1 when it is below P2")
        p.set_defaults(fn=fn)

    p = sub.add_parser("check", help="run the verification suite (JSON on stdout)")
    p.add_argument("net", nargs="?")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--budget", type=int)
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("corpus", help="write the figure nets as files")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(fn=cmd_corpus)
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command")
        try:
            default_budget()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        for opt in ("cap", "depth", "max", "budget"):
            val = getattr(args, opt, None)
            if val is not None and val < (0 if opt == "depth" else 1):
                raise UsageError(f"--{opt} must be {'non-negative' if opt == 'depth' else 'positive'}")
        return args.fn(args, out)
    except UsageError as exc:
        print(f"bdproc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, NetValidationError, ProcessValidationError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
