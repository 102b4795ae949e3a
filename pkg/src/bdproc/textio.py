"""Plain-text net and process files, DOT rendering and JSON reports.

Net files::

    net fig3
    place p @1
    trans t
    arc p -> t
    arc t -> p *2      # optional weight

Process files::

    process run of fig3
    cond c0 : p
    event e0 : t
    arc c0 -> e0
"""

from __future__ import annotations

import json
import re
from collections.abc import Iterator
from dataclasses import fields, is_dataclass
from enum import Enum
from typing import Any

from .multiset import Multiset
from .net import Net, validate_net
from .process import Process, check_process


class ParseError(ValueError):
    """Base class; ``line`` is 1-based."""

    kind = "error"

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {self.kind}: {message}")
        self.line = line
        self.message = message


class TextSyntaxError(ParseError):
    kind = "syntax error"


class DuplicateIdError(ParseError):
    kind = "duplicate declaration"


class DanglingRefError(ParseError):
    kind = "undeclared reference"


_ID = r"[A-Za-z0-9_][A-Za-z0-9_.'\-]*"
_HEADER_NET = re.compile(rf"net\s+({_ID})$")
_HEADER_PROC = re.compile(rf"process\s+({_ID})\s+of\s+({_ID})$")
_PLACE = re.compile(rf"place\s+({_ID})(?:\s+@(\d+))?$")
_TRANS = re.compile(rf"trans\s+({_ID})$")
_ARC_W = re.compile(rf"arc\s+({_ID})\s*->\s*({_ID})(?:\s+\*(\d+))?$")
_COND = re.compile(rf"cond\s+({_ID})\s*:\s*({_ID})$")
_EVENT = re.compile(rf"event\s+({_ID})\s*:\s*({_ID})$")
_ARC = re.compile(rf"arc\s+({_ID})\s*->\s*({_ID})$")


def _lines(text: str) -> Iterator[tuple[int, str]]:
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def is_identifier(s: str) -> bool:
    return re.fullmatch(_ID, s) is not None


def parse_net(text: str) -> Net:
    """Parse a net file.  Structural problems surface as ``NetValidationError``."""
    name = None
    places: dict[str, int] = {}
    marking: dict[str, int] = {}
    trans: dict[str, int] = {}
    arcs: dict[tuple[str, str], tuple[int, int]] = {}
    for no, line in _lines(text):
        if name is None:
            m = _HEADER_NET.match(line)
            if not m:
                raise TextSyntaxError(no, "expected 'net <name>' header")
            name = m.group(1)
            continue
        if m := _PLACE.match(line):
            pid, tokens = m.group(1), m.group(2)
            if pid in places or pid in trans:
                raise DuplicateIdError(no, pid)
            places[pid] = no
            if tokens is not None and int(tokens) > 0:
                marking[pid] = int(tokens)
        elif m := _TRANS.match(line):
            tid = m.group(1)
            if tid in places or tid in trans:
                raise DuplicateIdError(no, tid)
            trans[tid] = no
        elif m := _ARC_W.match(line):
            src, dst, w = m.group(1), m.group(2), m.group(3)
            weight = 1 if w is None else int(w)
            if weight == 0:
                raise TextSyntaxError(no, "arc weight must be at least 1")
            if (src, dst) in arcs:
                raise DuplicateIdError(no, f"arc {src} -> {dst}")
            arcs[(src, dst)] = (weight, no)
        elif _HEADER_NET.match(line):
            raise TextSyntaxError(no, "second 'net' header")
        else:
            raise TextSyntaxError(no, f"cannot parse {line!r}")
    if name is None:
        raise TextSyntaxError(1, "empty file: expected 'net <name>' header")
    for (src, dst), (_, no) in arcs.items():
        for node in (src, dst):
            if node not in places and node not in trans:
                raise DanglingRefError(no, node)
    return validate_net(places, trans, {k: w for k, (w, _) in arcs.items()}, marking, name)


def serialize_net(net: Net) -> str:
    out = [f"net {net.name}"]
    for p in net.places:
        k = net.initial_marking[p]
        out.append(f"place {p} @{k}" if k else f"place {p}")
    for t in net.transitions:
        out.append(f"trans {t}")
    for (x, y), w in sorted(net.flow.items()):
        out.append(f"arc {x} -> {y} *{w}" if w > 1 else f"arc {x} -> {y}")
    return "\n".join(out) + "\n"


def parse_process(text: str, net: Net | None = None) -> Process:
    """Parse a process file; with ``net`` the labels are checked against it."""
    header = None
    conds: dict[str, str] = {}
    events: dict[str, str] = {}
    arcs: dict[tuple[str, str], int] = {}
    lines: dict[str, int] = {}
    for no, line in _lines(text):
        if header is None:
            m = _HEADER_PROC.match(line)
            if not m:
                raise TextSyntaxError(no, "expected 'process <name> of <net>' header")
            header = (m.group(1), m.group(2), no)
            continue
        if m := _COND.match(line):
            cid, place = m.groups()
            if cid in lines:
                raise DuplicateIdError(no, cid)
            conds[cid] = place
            lines[cid] = no
        elif m := _EVENT.match(line):
            eid, t = m.groups()
            if eid in lines:
                raise DuplicateIdError(no, eid)
            events[eid] = t
            lines[eid] = no
        elif m := _ARC.match(line):
            if m.groups() in arcs:
                raise DuplicateIdError(no, "arc {} -> {}".format(*m.groups()))
            arcs[m.groups()] = no
        else:
            raise TextSyntaxError(no, f"cannot parse {line!r}")
    if header is None:
        raise TextSyntaxError(1, "empty file: expected 'process <name> of <net>' header")
    for (src, dst), no in arcs.items():
        for node in (src, dst):
            if node not in lines:
                raise DanglingRefError(no, node)
        if (src in conds) == (dst in conds):
            raise TextSyntaxError(no, "arcs must connect a condition and an event")
    if net is not None:
        if header[1] != net.name:
            raise DanglingRefError(header[2], f"process refers to net {header[1]!r}, not {net.name!r}")
        for x, lab in [*conds.items(), *events.items()]:
            known = net.place_set if x in conds else net.transition_set
            if lab not in known:
                raise DanglingRefError(lines[x], lab)
    p = Process(conds, events, arcs)
    if net is not None:
        check_process(p, net)
    return p


def process_header(text: str) -> tuple[str, str]:
    """``(process name, net name)`` from a process file."""
    for no, line in _lines(text):
        m = _HEADER_PROC.match(line)
        if not m:
            raise TextSyntaxError(no, "expected 'process <name> of <net>' header")
        return m.group(1), m.group(2)
    raise TextSyntaxError(1, "empty file")


def serialize_process(p: Process, name: str = "P", net_name: str = "net") -> str:
    out = [f"process {name} of {net_name}"]
    out += [f"cond {c} : {s}" for c, s in sorted(p.conditions.items())]
    out += [f"event {e} : {t}" for e, t in sorted(p.events.items())]
    out += [f"arc {a} -> {b}" for a, b in sorted(p.arcs)]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# DOT


def _q(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _tokens(k: int) -> str:
    if k == 0:
        return ""
    return "●" * k if k <= 4 else f"{k}●"


def _net_dot(net: Net) -> str:
    out = [f"digraph {_q(net.name)} {{", "  rankdir=LR;"]
    for p in net.places:
        label = p + ("\n" + _tokens(net.initial_marking[p]) if net.initial_marking[p] else "")
        out.append(f"  {_q('s:' + p)} [shape=circle, label={_q(label)}];")
    for t in net.transitions:
        out.append(f"  {_q('t:' + t)} [shape=box, label={_q(t)}];")
    for (x, y), w in sorted(net.flow.items()):
        src = ("s:" if x in net.place_set else "t:") + x
        dst = ("s:" if y in net.place_set else "t:") + y
        extra = f" [label=\"{w}\"]" if w > 1 else ""
        out.append(f"  {_q(src)} -> {_q(dst)}{extra};")
    out.append("}")
    return "\n".join(out) + "\n"


def _process_dot(p: Process, name: str) -> str:
    out = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    for c, s in sorted(p.conditions.items()):
        out.append(f"  {_q(c)} [shape=circle, label={_q(c + ':' + s)}];")
    for e, t in sorted(p.events.items()):
        out.append(f"  {_q(e)} [shape=box, label={_q(e + ':' + t)}];")
    for a, b in sorted(p.arcs):
        out.append(f"  {_q(a)} -> {_q(b)};")
    out.append("}")
    return "\n".join(out) + "\n"


def dot_export(obj: Net | Process, name: str = "P") -> str:
    """Places and conditions as circles, transitions and events as boxes."""
    if isinstance(obj, Net):
        return _net_dot(obj)
    if isinstance(obj, Process):
        return _process_dot(obj, name)
    raise TypeError(f"cannot render {type(obj).__name__}")


# ---------------------------------------------------------------------------
# JSON


def to_jsonable(x: Any) -> Any:
    """Deterministic plain-data view of verdicts, witnesses and reports."""
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, Multiset):
        return str(x)
    if isinstance(x, Net):
        return x.name
    if isinstance(x, Process):
        return {"conditions": dict(sorted(x.conditions.items())),
                "events": dict(sorted(x.events.items())),
                "arcs": [list(a) for a in sorted(x.arcs)]}
    if hasattr(x, "to_json"):
        return x.to_json()
    if is_dataclass(x) and not isinstance(x, type):
        return {f.name: to_jsonable(getattr(x, f.name)) for f in fields(x)}
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        items = [to_jsonable(v) for v in x]
        return sorted(items, key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def marking_graph_dot(graph) -> str:
    """Reachable markings as a digraph, vertices numbered in exploration order."""
    idx = {m: i for i, m in enumerate(graph.vertices)}
    out = [f"digraph {_q(graph.net.name + '-markings')} {{"]
    for m, i in idx.items():
        shape = "doublecircle" if i == 0 else "ellipse"
        out.append(f"  m{i} [shape={shape}, label={_q(str(m))}];")
    for m, t, m2 in graph.edges:
        out.append(f"  m{idx[m]} -> m{idx[m2]} [label={_q(t)}];")
    out.append("}")
    return "\n".join(out) + "\n"


_TOKEN = re.compile(rf"({_ID})(?:@(\d+))?$")


def parse_marking(text: str) -> Multiset:
    """Whitespace or comma separated place ids, each optionally ``id@k``."""
    counts: dict[str, int] = {}
    for no, line in _lines(text):
        for tok in re.split(r"[\s,]+", line.strip("{} ")):
            if not tok:
                continue
            m = _TOKEN.match(tok)
            if not m:
                raise TextSyntaxError(no, f"bad marking entry {tok!r}")
            counts[m.group(1)] = counts.get(m.group(1), 0) + int(m.group(2) or 1)
    return Multiset(counts)
