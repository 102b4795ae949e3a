"""GR-processes: labelled occurrence nets mapped into a net."""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import total_ordering

from .canon import canonical_labelling
from .multiset import Multiset
from .net import Net, enabled_transitions

# ---------------------------------------------------------------------------
# Violations


@dataclass(frozen=True)
class BranchedCondition:
    condition: str
    direction: str  # "in" or "out"

    def __str__(self) -> str:
        side = "producers" if self.direction == "in" else "consumers"
        return f"condition {self.condition!r} has more than one {side[:-1]}"


@dataclass(frozen=True)
class Cyclic:
    path: tuple[str, ...]

    def __str__(self) -> str:
        return "flow is cyclic: " + " -> ".join(self.path)


@dataclass(frozen=True)
class LabelClash:
    node: str
    reason: str

    def __str__(self) -> str:
        return f"{self.node!r}: {self.reason}"


@dataclass(frozen=True)
class InitialMismatch:
    expected: Multiset
    actual: Multiset

    def __str__(self) -> str:
        return f"initial conditions map to {self.actual}, net marks {self.expected}"


@dataclass(frozen=True)
class FlowMismatch:
    event: str
    side: str  # "pre" or "post"
    expected: Multiset
    actual: Multiset

    def __str__(self) -> str:
        return (f"event {self.event!r}: {self.side}set maps to {self.actual}, "
                f"transition needs {self.expected}")


class ProcessError(Exception):
    pass


class ProcessValidationError(ProcessError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class NotDownwardClosed(ProcessError, ValueError):
    def __init__(self, event: str, missing: str):
        self.event = event
        self.missing = missing
        super().__init__(f"event {event!r} is kept but its cause {missing!r} is not")


# ---------------------------------------------------------------------------
# Process values


class Process:
    """A finite occurrence net with a labelling into a net.

    ``conditions`` maps condition ids to places, ``events`` maps event ids
    to transitions and ``arcs`` holds the 0/1 flow as ``(src, dst)`` pairs.
    The initial conditions are exactly those without an incoming arc.
    Values are immutable and compare by their concrete node names; use
    :func:`isomorphic` for equality up to renaming.
    """

    __slots__ = ("conditions", "events", "arcs", "_pre", "_post", "_hash", "_cache")

    def __init__(self, conditions: Mapping[str, str], events: Mapping[str, str],
                 arcs: Iterable[tuple[str, str]]):
        self.conditions = dict(conditions)
        self.events = dict(events)
        self.arcs = frozenset((str(a), str(b)) for a, b in arcs)
        pre: dict[str, list[str]] = {x: [] for x in itertools.chain(self.conditions, self.events)}
        post: dict[str, list[str]] = {x: [] for x in pre}
        for a, b in self.arcs:
            if a not in pre or b not in pre:
                missing = a if a not in pre else b
                raise ProcessValidationError([LabelClash(missing, "arc endpoint is not declared")])
            post[a].append(b)
            pre[b].append(a)
        self._pre = {x: tuple(sorted(v)) for x, v in pre.items()}
        self._post = {x: tuple(sorted(v)) for x, v in post.items()}
        self._hash = None
        self._cache: dict = {}

    # -- identity ----------------------------------------------------------

    def _key(self):
        return (frozenset(self.conditions.items()), frozenset(self.events.items()), self.arcs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Process):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        evs = ",".join(f"{e}:{t}" for e, t in sorted(self.events.items()))
        return f"Process(|S|={len(self.conditions)}, events=[{evs}])"

    # -- structure ---------------------------------------------------------

    def label(self, x: str) -> str:
        return self.conditions[x] if x in self.conditions else self.events[x]

    def pre(self, x: str) -> tuple[str, ...]:
        return self._pre[x]

    def post(self, x: str) -> tuple[str, ...]:
        return self._post[x]

    def producer(self, c: str) -> str | None:
        p = self._pre[c]
        return p[0] if p else None

    def consumer(self, c: str) -> str | None:
        p = self._post[c]
        return p[0] if p else None

    @property
    def initial_conditions(self) -> frozenset[str]:
        if "init" not in self._cache:
            self._cache["init"] = frozenset(c for c in self.conditions if not self._pre[c])
        return self._cache["init"]

    @property
    def end(self) -> frozenset[str]:
        if "end" not in self._cache:
            self._cache["end"] = frozenset(c for c in self.conditions if not self._post[c])
        return self._cache["end"]

    def __len__(self) -> int:
        """Number of events."""
        return len(self.events)

    def event_labels(self) -> Multiset:
        return Multiset(list(self.events.values()))

    def topological_events(self) -> list[str]:
        """Events in a causal order, ties broken by id."""
        if "topo" in self._cache:
            return self._cache["topo"]
        indeg = {e: len({self.producer(c) for c in self._pre[e]} - {None}) for e in self.events}
        ready = sorted(e for e, d in indeg.items() if d == 0)
        out = []
        while ready:
            e = ready.pop(0)
            out.append(e)
            nxt = {self.consumer(c) for c in self._post[e]} - {None}
            for f in sorted(nxt):
                indeg[f] -= 1
                if indeg[f] == 0:
                    ready.append(f)
            ready.sort()
        self._cache["topo"] = out
        return out

    def ancestors(self) -> dict[str, frozenset[str]]:
        """Strict causal past (``F+`` predecessors) of every node."""
        if "anc" in self._cache:
            return self._cache["anc"]
        anc: dict[str, frozenset[str]] = {}

        def visit(x: str, stack: set) -> frozenset:
            if x in anc:
                return anc[x]
            if x in stack:
                raise ProcessValidationError([Cyclic((x,))])
            stack.add(x)
            acc: set[str] = set()
            for y in self._pre[x]:
                acc.add(y)
                acc |= visit(y, stack)
            stack.discard(x)
            anc[x] = frozenset(acc)
            return anc[x]

        for x in itertools.chain(sorted(self.conditions), sorted(self.events)):
            visit(x, set())
        self._cache["anc"] = anc
        return anc

    def causally_related(self, x: str, y: str) -> bool:
        anc = self.ancestors()
        return x in anc[y] or y in anc[x]

    def maximal_events(self) -> list[str]:
        return sorted(e for e in self.events
                      if all(self.consumer(c) is None for c in self._post[e]))

    def renamed(self, mapping: Mapping[str, str]) -> "Process":
        """Rename nodes; names missing from ``mapping`` are kept."""
        r = lambda x: mapping.get(x, x)  # noqa: E731
        return Process(
            {r(c): s for c, s in self.conditions.items()},
            {r(e): t for e, t in self.events.items()},
            {(r(a), r(b)) for a, b in self.arcs},
        )


# ---------------------------------------------------------------------------
# Validation


def _find_cycle(p_nodes, succ) -> tuple[str, ...] | None:
    colour: dict[str, int] = {}
    for root in sorted(p_nodes):
        if root in colour:
            continue
        stack = [(root, iter(succ.get(root, ())))]
        path = [root]
        colour[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[node] = 2
                stack.pop()
                path.pop()
                continue
            if colour.get(nxt) == 1:
                i = path.index(nxt)
                return tuple(path[i:] + [nxt])
            if nxt not in colour:
                colour[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(succ.get(nxt, ()))))
    return None


def validate_process(conditions: Mapping[str, str], events: Mapping[str, str],
                     arcs: Iterable[tuple[str, str]], net: Net) -> Process:
    """Check every clause of the process definition against ``net``.

    Raises :class:`ProcessValidationError` with one violation per failed
    clause instance.
    """
    arcs = [(str(a), str(b)) for a, b in arcs]
    violations: list = []
    conds = {str(k): str(v) for k, v in conditions.items()}
    evs = {str(k): str(v) for k, v in events.items()}
    for x in sorted(set(conds) & set(evs)):
        violations.append(LabelClash(x, "declared as condition and as event"))
    for c, s in sorted(conds.items()):
        if s not in net.place_set:
            violations.append(LabelClash(c, f"label {s!r} is not a place of {net.name}"))
    for e, t in sorted(evs.items()):
        if t not in net.transition_set:
            violations.append(LabelClash(e, f"label {t!r} is not a transition of {net.name}"))
    good_arcs = []
    for a, b in arcs:
        if (a in conds and b in evs) or (a in evs and b in conds):
            good_arcs.append((a, b))
        elif a not in conds and a not in evs:
            violations.append(LabelClash(a, "arc endpoint is not declared"))
        elif b not in conds and b not in evs:
            violations.append(LabelClash(b, "arc endpoint is not declared"))
        else:
            violations.append(LabelClash(a, f"arc {a} -> {b} does not join a condition and an event"))
    if violations:
        raise ProcessValidationError(violations)

    succ: dict[str, list[str]] = {}
    for a, b in sorted(set(good_arcs)):
        succ.setdefault(a, []).append(b)
    for c in sorted(conds):
        ins = [a for a, b in good_arcs if b == c]
        outs = [b for a, b in good_arcs if a == c]
        if len(ins) > 1:
            violations.append(BranchedCondition(c, "in"))
        if len(outs) > 1:
            violations.append(BranchedCondition(c, "out"))
    cycle = _find_cycle(list(conds) + list(evs), succ)
    if cycle:
        violations.append(Cyclic(cycle))

    init = Multiset([conds[c] for c in conds if not any(b == c for _, b in good_arcs)])
    if init != net.initial_marking:
        violations.append(InitialMismatch(net.initial_marking, init))
    for e in sorted(evs):
        if evs[e] not in net.transition_set:
            continue
        pre = Multiset([conds[a] for a, b in good_arcs if b == e])
        post = Multiset([conds[b] for a, b in good_arcs if a == e])
        if pre != net.pre(evs[e]):
            violations.append(FlowMismatch(e, "pre", net.pre(evs[e]), pre))
        if post != net.post(evs[e]):
            violations.append(FlowMismatch(e, "post", net.post(evs[e]), post))
    if violations:
        raise ProcessValidationError(violations)
    return Process(conds, evs, good_arcs)


def check_process(p: Process, net: Net) -> Process:
    """Re-run :func:`validate_process` on an existing value."""
    return validate_process(p.conditions, p.events, p.arcs, net)


# ---------------------------------------------------------------------------
# Basic operations


def initial_process(net: Net) -> Process:
    """The process without events: one condition per initial token."""
    conds = {}
    for i, s in enumerate(net.initial_marking.elements()):
        conds[f"c{i}"] = s
    return Process(conds, {}, ())


def process_end(p: Process) -> frozenset[str]:
    return p.end


def final_marking(p: Process) -> Multiset:
    """The marking ``π(P°)`` reached after running ``p``."""
    if "final" not in p._cache:
        p._cache["final"] = Multiset([p.conditions[c] for c in p.end])
    return p._cache["final"]


def _fresh(prefix: str, used: Mapping, start: int) -> Iterator[str]:
    i = start
    while True:
        name = f"{prefix}{i}"
        if name not in used:
            yield name
        i += 1


def extend(p: Process, net: Net, transition: str, consumed: Iterable[str]) -> Process:
    """Append one event labelled ``transition`` consuming ``consumed``.

    Fresh ids continue the ``e<n>`` / ``c<n>`` numbering of ``p``.
    """
    consumed = list(consumed)
    used = {**p.conditions, **p.events}
    ev = next(_fresh("e", used, len(p.events)))
    used[ev] = transition
    conds = dict(p.conditions)
    arcs = set(p.arcs)
    names = _fresh("c", used, len(p.conditions))
    for s in net.post(transition).elements():
        c = next(names)
        conds[c] = s
        arcs.add((ev, c))
    for c in consumed:
        arcs.add((c, ev))
    events = dict(p.events)
    events[ev] = transition
    return Process(conds, events, arcs)


def extension_choices(p: Process, net: Net, transition: str) -> list[tuple[str, ...]]:
    """Every set of end conditions that can feed ``transition``."""
    by_place: dict[str, list[str]] = {}
    for c in sorted(p.end):
        by_place.setdefault(p.conditions[c], []).append(c)
    per_place = []
    for s, w in net.pre(transition).sorted_items():
        avail = by_place.get(s, [])
        if len(avail) < w:
            return []
        per_place.append(list(itertools.combinations(avail, w)))
    return [tuple(c for part in combo for c in part) for combo in itertools.product(*per_place)]


def successors(p: Process, net: Net, dedup: bool = True) -> list[tuple[str, Process]]:
    """One-event extensions of ``p`` in transition order.

    With ``dedup`` (the default) extensions isomorphic to an earlier one are
    dropped; the concrete first representative is kept, so ``p`` remains a
    prefix of every result.
    """
    out: list[tuple[str, Process]] = []
    seen = set()
    for t in enabled_transitions(net, final_marking(p)):
        for choice in extension_choices(p, net, t):
            q = extend(p, net, t, choice)
            if dedup:
                key = canonical_form(q)
                if key in seen:
                    continue
                seen.add(key)
            out.append((t, q))
    return out


def is_prefix(small: Process, big: Process) -> bool:
    """``small ≤ big`` with the identity embedding."""
    if not (small.conditions.items() <= big.conditions.items()
            and small.events.items() <= big.events.items()):
        return False
    if small.initial_conditions != big.initial_conditions:
        return False
    nodes = set(small.conditions) | set(small.events)
    restricted = {(a, b) for a, b in big.arcs if a in nodes and b in nodes}
    return restricted == small.arcs


def downward_closed_sets(p: Process) -> Iterator[frozenset[str]]:
    """All causally downward-closed event sets, smallest first."""
    anc = p.ancestors()
    evs = sorted(p.events)
    past = {e: frozenset(x for x in anc[e] if x in p.events) for e in evs}
    seen = {frozenset()}
    level = [frozenset()]
    yield frozenset()
    while level:
        nxt = []
        for s in level:
            for e in evs:
                if e not in s and past[e] <= s:
                    t = s | {e}
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
        nxt.sort(key=sorted)
        yield from nxt
        level = nxt


def prefix_by_events(p: Process, keep: Iterable[str]) -> Process:
    """The unique prefix of ``p`` whose events are ``keep``."""
    keep = set(keep)
    unknown = keep - set(p.events)
    if unknown:
        raise KeyError(sorted(unknown)[0])
    anc = p.ancestors()
    for e in sorted(keep):
        for x in sorted(anc[e]):
            if x in p.events and x not in keep:
                raise NotDownwardClosed(e, x)
    conds = {c: s for c, s in p.conditions.items()
             if p.producer(c) is None or p.producer(c) in keep}
    events = {e: t for e, t in p.events.items() if e in keep}
    nodes = set(conds) | set(events)
    arcs = {(a, b) for a, b in p.arcs if a in nodes and b in nodes}
    return Process(conds, events, arcs)


def prefixes(p: Process) -> Iterator[Process]:
    for keep in downward_closed_sets(p):
        yield prefix_by_events(p, keep)


def is_prefix_up_to_iso(small: Process, big: Process) -> bool:
    """``∃ P'. small ≅ P' ≤ big``."""
    if len(small) > len(big) or not small.event_labels() <= big.event_labels():
        return False
    target = canonical_form(small)
    k = len(small)
    for keep in downward_closed_sets(big):
        if len(keep) == k and canonical_form(prefix_by_events(big, keep)) == target:
            return True
        if len(keep) > k:
            break
    return False


# ---------------------------------------------------------------------------
# Canonical forms


@total_ordering
@dataclass(frozen=True)
class CanonicalForm:
    """Isomorphism invariant of a process: equal iff isomorphic."""

    code: tuple
    order: tuple[str, ...] = field(compare=False, hash=False, repr=False)

    def __lt__(self, other: "CanonicalForm") -> bool:
        return self.code < other.code

    @property
    def n_events(self) -> int:
        return sum(1 for kind, _ in self.code[0] if kind == "e")

    def encode(self) -> bytes:
        labels, arcs = self.code
        head = ";".join(f"{k}:{x}" for k, x in labels)
        body = ";".join(f"{a}>{b}" for a, b in arcs)
        return f"{head}|{body}".encode()


def canonical_form(p: Process) -> CanonicalForm:
    cf = p._cache.get("canon")
    if cf is not None:
        return cf
    nodes = sorted(p.conditions) + sorted(p.events)
    idx = {x: i for i, x in enumerate(nodes)}
    colours = [("c", p.conditions[x]) if x in p.conditions else ("e", p.events[x]) for x in nodes]
    succs = [[idx[y] for y in p.post(x)] for x in nodes]
    code, order = canonical_labelling(colours, succs)
    cf = CanonicalForm(code, tuple(nodes[i] for i in order))
    p._cache["canon"] = cf
    return cf


def isomorphic(p: Process, q: Process) -> bool:
    return canonical_form(p) == canonical_form(q)


def isomorphism(p: Process, q: Process) -> dict[str, str] | None:
    """A label-respecting bijection from ``p`` onto ``q``, if one exists."""
    a, b = canonical_form(p), canonical_form(q)
    if a != b:
        return None
    return dict(zip(a.order, b.order))


def canonical_process(p: Process) -> Process:
    """``p`` renamed to ``c0.. / e0..`` following the canonical order."""
    cf = canonical_form(p)
    mapping = {}
    nc = ne = 0
    for x in cf.order:
        if x in p.conditions:
            mapping[x] = f"c{nc}"
            nc += 1
        else:
            mapping[x] = f"e{ne}"
            ne += 1
    q = p.renamed(mapping)
    q._cache["canon"] = CanonicalForm(cf.code, tuple(mapping[x] for x in cf.order))
    return q


# ---------------------------------------------------------------------------
# Enumeration


@dataclass
class ProcessEnumeration:
    """Finite processes of a net up to isomorphism, found breadth-first."""

    net: Net
    processes: dict[CanonicalForm, Process]
    successors: dict[CanonicalForm, list[tuple[str, CanonicalForm]]]
    depth: int
    truncated_by_depth: bool
    truncated_by_cap: bool

    @property
    def complete(self) -> bool:
        return not (self.truncated_by_depth or self.truncated_by_cap)

    @property
    def forms(self) -> frozenset[CanonicalForm]:
        return frozenset(self.processes)

    def __len__(self) -> int:
        return len(self.processes)

    def __iter__(self):
        return iter(self.processes.values())

    def by_size(self) -> dict[int, list[Process]]:
        out: dict[int, list[Process]] = {}
        for p in self.processes.values():
            out.setdefault(len(p), []).append(p)
        return out

    def maximal(self) -> list[Process]:
        """Processes with no extension (only those whose successors were computed)."""
        return [self.processes[k] for k, succ in self.successors.items() if not succ]


def enumerate_processes(net: Net, depth: int, cap: int = 100_000) -> ProcessEnumeration:
    """All processes with at most ``depth`` events, up to isomorphism."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    p0 = initial_process(net)
    k0 = canonical_form(p0)
    procs = {k0: p0}
    succ_map: dict[CanonicalForm, list[tuple[str, CanonicalForm]]] = {}
    level = [k0]
    by_depth = by_cap = False
    for d in range(depth + 1):
        nxt = []
        for k in level:
            p = procs[k]
            succ = successors(p, net)
            if d == depth:
                if succ:
                    by_depth = True
                else:
                    succ_map[k] = []
                continue
            entries = []
            for t, q in succ:
                kq = canonical_form(q)
                if kq not in procs:
                    if len(procs) >= cap:
                        by_cap = True
                        continue
                    procs[kq] = q
                    nxt.append(kq)
                entries.append((t, kq))
            succ_map[k] = entries
        if by_cap:
            break
        level = nxt
        if not level:
            break
    return ProcessEnumeration(net, procs, succ_map, depth, by_depth, by_cap)
