"""Swapping: the token-exchange transformation and the relations it induces.

Everything here works on finite processes.  Closures are explored over
canonical forms, with a budget on the number of distinct forms visited;
when a budget runs out the answer is ``UNKNOWN`` rather than a guess.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

from .multiset import Multiset
from .net import Net
from .process import (
    CanonicalForm,
    Process,
    canonical_form,
    final_marking,
    isomorphic,
    prefix_by_events,
    prefixes,
    successors,
)
from .verdict import Verdict

DEFAULT_BUDGET = 100_000


def default_budget() -> int:
    """Search budget, overridable through ``BDPROC_BUDGET``."""
    raw = os.environ.get("BDPROC_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"BDPROC_BUDGET must be an integer, got {raw!r}") from None
        if value < 1:
            raise ValueError("BDPROC_BUDGET must be positive")
        return value
    return DEFAULT_BUDGET


class SwapError(ValueError):
    pass


class CausallyOrdered(SwapError):
    def __init__(self, p: str, q: str):
        self.p, self.q = p, q
        super().__init__(f"conditions {p!r} and {q!r} are causally ordered")


class LabelMismatch(SwapError):
    def __init__(self, p: str, q: str):
        self.p, self.q = p, q
        super().__init__(f"conditions {p!r} and {q!r} carry different places")


@dataclass(frozen=True, order=True)
class SwapMove:
    p: str
    q: str

    def __str__(self) -> str:
        return f"swap({self.p},{self.q})"


def swap(proc: Process, move: SwapMove | tuple[str, str]) -> Process:
    """Exchange the outgoing arcs of two conditions."""
    p, q = (move.p, move.q) if isinstance(move, SwapMove) else move
    for c in (p, q):
        if c not in proc.conditions:
            raise KeyError(c)
    if proc.conditions[p] != proc.conditions[q]:
        raise LabelMismatch(p, q)
    if p == q:
        return proc
    if proc.causally_related(p, q):
        raise CausallyOrdered(p, q)
    arcs = {(a, b) for a, b in proc.arcs if a not in (p, q)}
    arcs |= {(p, y) for y in proc.post(q)}
    arcs |= {(q, y) for y in proc.post(p)}
    return Process(proc.conditions, proc.events, arcs)


def legal_swaps(proc: Process, nontrivial: bool = True) -> list[SwapMove]:
    """Moves allowed in ``proc``; trivial ones (no arc changes) are skipped by default."""
    by_place: dict[str, list[str]] = {}
    for c in sorted(proc.conditions):
        by_place.setdefault(proc.conditions[c], []).append(c)
    anc = proc.ancestors()
    out = []
    for group in by_place.values():
        for i, p in enumerate(group):
            for q in group[i + 1:]:
                if p in anc[q] or q in anc[p]:
                    continue
                if nontrivial and proc.post(p) == proc.post(q):
                    continue
                out.append(SwapMove(p, q))
    return out


def one_step_equiv(p: Process, q: Process) -> bool:
    """Whether some single swap turns ``p`` into a process isomorphic to ``q``."""
    if p.conditions and isomorphic(p, q):
        return True
    target = canonical_form(q)
    return any(canonical_form(swap(p, m)) == target for m in legal_swaps(p))


class _SwapFrame:
    """Swap closure over one fixed node set.

    Swaps only redirect arcs leaving conditions, so every process reachable
    from ``start`` by swaps has the same nodes and producers.  A state is the
    tuple of consumer indices of the conditions (``-1`` when unconsumed).
    """

    def __init__(self, start: Process):
        self.start = start
        self.conds = sorted(start.conditions)
        self.events = sorted(start.events)
        eidx = {e: i for i, e in enumerate(self.events)}
        self.labels = [start.conditions[c] for c in self.conds]
        self.ev_labels = [start.events[e] for e in self.events]
        self.producer = [eidx[start.producer(c)] if start.producer(c) else -1 for c in self.conds]
        self.state0 = tuple(eidx[start.consumer(c)] if start.consumer(c) else -1 for c in self.conds)
        groups: dict[str, list[int]] = {}
        for i, s in enumerate(self.labels):
            groups.setdefault(s, []).append(i)
        self.groups = [g for g in groups.values() if len(g) > 1]

    def _event_past(self, state: tuple) -> list[int]:
        n = len(self.events)
        feeds: list[list[int]] = [[] for _ in range(n)]
        for c, e in enumerate(state):
            if e >= 0 and self.producer[c] >= 0:
                feeds[e].append(self.producer[c])
        past = [-1] * n

        def visit(e: int) -> int:
            if past[e] >= 0:
                return past[e]
            acc = 0
            for f in feeds[e]:
                acc |= (1 << f) | visit(f)
            past[e] = acc
            return acc

        for e in range(n):
            visit(e)
        return past

    def moves(self, state: tuple) -> list[tuple[int, int]]:
        past = self._event_past(state)
        out = []
        for g in self.groups:
            for a_i, a in enumerate(g):
                ca, pa = state[a], self.producer[a]
                for b in g[a_i + 1:]:
                    cb, pb = state[b], self.producer[b]
                    if ca == cb:
                        continue
                    # a precedes b iff a's consumer is b's producer or lies in its past
                    if ca >= 0 and pb >= 0 and (ca == pb or past[pb] >> ca & 1):
                        continue
                    if cb >= 0 and pa >= 0 and (cb == pa or past[pa] >> cb & 1):
                        continue
                    out.append((a, b))
        return out

    @staticmethod
    def apply(state: tuple, move: tuple[int, int]) -> tuple:
        a, b = move
        s = list(state)
        s[a], s[b] = s[b], s[a]
        return tuple(s)

    def invariant(self, state: tuple) -> tuple:
        """Cheap isomorphism invariant: each event with the origins of its inputs."""
        ins: list[list] = [[] for _ in self.events]
        for c, e in enumerate(state):
            if e >= 0:
                f = self.producer[c]
                ins[e].append((self.labels[c], self.ev_labels[f] if f >= 0 else ""))
        return tuple(sorted((self.ev_labels[e], tuple(sorted(x))) for e, x in enumerate(ins)))

    def process(self, state: tuple) -> Process:
        arcs = {(a, b) for a, b in self.start.arcs if a not in self.start.conditions}
        for c, e in enumerate(state):
            if e >= 0:
                arcs.add((self.conds[c], self.events[e]))
        return Process(self.start.conditions, self.start.events, arcs)

    def move_of(self, move: tuple[int, int]) -> SwapMove:
        return SwapMove(self.conds[move[0]], self.conds[move[1]])


# ---------------------------------------------------------------------------
# Shared exploration state


class ProcessSpace:
    """Memo of canonical forms, swap neighbours and one-event successors.

    One instance serves a single analysis run on one net; it is never shared
    across threads.
    """

    def __init__(self, net: Net | None = None):
        self.net = net
        self.reps: dict[CanonicalForm, Process] = {}
        self._swaps: dict[CanonicalForm, list[tuple[SwapMove, CanonicalForm]]] = {}
        self._succ: dict[CanonicalForm, list[tuple[str, CanonicalForm]]] = {}
        self._class: dict[CanonicalForm, frozenset[CanonicalForm]] = {}

    def add(self, p: Process) -> CanonicalForm:
        k = canonical_form(p)
        self.reps.setdefault(k, p)
        return k

    def swap_neighbours(self, k: CanonicalForm) -> list[tuple[SwapMove, CanonicalForm]]:
        if k not in self._swaps:
            p = self.reps[k]
            out = []
            for m in legal_swaps(p):
                out.append((m, self.add(swap(p, m))))
            self._swaps[k] = out
        return self._swaps[k]

    def succ(self, k: CanonicalForm) -> list[tuple[str, CanonicalForm]]:
        if self.net is None:
            raise ValueError("successors need a net")
        if k not in self._succ:
            self._succ[k] = [(t, self.add(q)) for t, q in successors(self.reps[k], self.net)]
        return self._succ[k]

    def swap_class(self, k: CanonicalForm, budget: int) -> tuple[frozenset[CanonicalForm], bool]:
        """The ≡₁*-class of ``k`` (``complete`` false if the budget ran out)."""
        if k in self._class:
            return self._class[k], True
        frame = _SwapFrame(self.reps[k])
        seen = {frame.state0}
        keys = {k}
        queue = deque([frame.state0])
        while queue:
            s = queue.popleft()
            for mv in frame.moves(s):
                s2 = frame.apply(s, mv)
                if s2 in seen:
                    continue
                if len(seen) >= budget:
                    return frozenset(keys), False
                seen.add(s2)
                keys.add(self.add(frame.process(s2)))
                queue.append(s2)
        cls = frozenset(keys)
        for y in cls:
            self._class[y] = cls
        return cls, True

    def class_id(self, k: CanonicalForm, budget: int) -> CanonicalForm | None:
        cls, complete = self.swap_class(k, budget)
        return min(cls) if complete else None


# ---------------------------------------------------------------------------
# Swapping equivalence


@dataclass(frozen=True)
class SwapPath:
    """Swaps that turn ``start`` into a process isomorphic to the other side."""

    start: str  # "p" or "q"
    moves: tuple[SwapMove, ...]

    def __len__(self) -> int:
        return len(self.moves)


def _cheap_reject(p: Process, q: Process) -> str | None:
    if p.event_labels() != q.event_labels():
        return "event labels differ"
    if Multiset(list(p.conditions.values())) != Multiset(list(q.conditions.values())):
        return "condition labels differ"
    if final_marking(p) != final_marking(q):
        return "final markings differ"
    return None


def swap_equiv(p: Process, q: Process, budget: int | None = None) -> Verdict:
    """Decide ``p ≡₁* q`` by breadth-first search over single swaps.

    ``HOLDS`` carries a :class:`SwapPath`.  ``FAILS`` is only reported once
    one side's class has been explored completely.
    """
    budget = budget or default_budget()
    reason = _cheap_reject(p, q)
    if reason:
        return Verdict.fails(detail=reason, explored=0)
    kp, kq = canonical_form(p), canonical_form(q)
    if kp == kq:
        return Verdict.holds(SwapPath("p", ()), detail="isomorphic", explored=1)
    if kq < kp:
        start, side, target = q, "q", kp
    else:
        start, side, target = p, "p", kq
    frame = _SwapFrame(start)
    target_proc = p if side == "q" else q
    target_inv = _SwapFrame(target_proc).invariant(_SwapFrame(target_proc).state0)
    parent: dict[tuple, tuple[tuple, tuple[int, int]] | None] = {frame.state0: None}
    queue = deque([frame.state0])
    while queue:
        s = queue.popleft()
        for mv in frame.moves(s):
            s2 = frame.apply(s, mv)
            if s2 in parent:
                continue
            parent[s2] = (s, mv)
            if frame.invariant(s2) == target_inv and canonical_form(frame.process(s2)) == target:
                moves = []
                cur = s2
                while parent[cur] is not None:
                    prev, m = parent[cur]
                    moves.append(frame.move_of(m))
                    cur = prev
                return Verdict.holds(SwapPath(side, tuple(reversed(moves))), explored=len(parent))
            if len(parent) >= budget:
                return Verdict.unknown("budget exhausted", explored=len(parent))
            queue.append(s2)
    return Verdict.fails(detail="class explored completely", explored=len(parent))


def swap_class(p: Process, budget: int | None = None) -> tuple[dict[CanonicalForm, Process], bool]:
    """Representatives of every process ``≡₁*``-equivalent to ``p``."""
    space = ProcessSpace()
    k = space.add(p)
    cls, complete = space.swap_class(k, budget or default_budget())
    return {x: space.reps[x] for x in sorted(cls)}, complete


# ---------------------------------------------------------------------------
# BD-preorder on finite processes


def _search_class(start: Process, targets: dict[CanonicalForm, Process], budget: int):
    """Walk the swap class of ``start`` until it meets one of ``targets``.

    Returns ``(hit, complete)`` where ``hit`` is the target key reached (or
    ``None``) and ``complete`` tells whether the whole class was visited.
    """
    frame = _SwapFrame(start)
    invs = set()
    for t in targets.values():
        f = _SwapFrame(t)
        invs.add(f.invariant(f.state0))
    k0 = canonical_form(start)
    if k0 in targets:
        return k0, True
    seen = {frame.state0}
    queue = deque([frame.state0])
    while queue:
        st = queue.popleft()
        for mv in frame.moves(st):
            s2 = frame.apply(st, mv)
            if s2 in seen:
                continue
            seen.add(s2)
            if frame.invariant(s2) in invs:
                k = canonical_form(frame.process(s2))
                if k in targets:
                    return k, True
            if len(seen) >= budget:
                return None, False
            queue.append(s2)
    return None, True


def bd_preorder_fin(p: Process, q: Process, net: Net, budget: int | None = None,
                    space: ProcessSpace | None = None) -> Verdict:
    """Decide whether ``p`` extends to a process swapping equivalent to ``q``.

    Extensions of ``p`` by the events still missing from ``q`` are grown
    breadth-first (one representative per isomorphism class and level); the
    swap class of ``q`` is then searched for any of the full-size candidates.
    ``HOLDS`` carries the matching extension of ``p``.
    """
    budget = budget or default_budget()
    if len(p) > len(q) or not p.event_labels() <= q.event_labels():
        return Verdict.fails(detail="events of p do not fit into q")
    qlabels = q.event_labels()
    qfinal = final_marking(q)
    level = {canonical_form(p): p}
    explored = 1
    for _ in range(len(q) - len(p)):
        nxt: dict[CanonicalForm, Process] = {}
        for r in level.values():
            room = qlabels - r.event_labels()
            for t, r2 in successors(r, net):
                if room[t] == 0:
                    continue
                nxt.setdefault(canonical_form(r2), r2)
        explored += len(nxt)
        if explored > budget:
            return Verdict.unknown("budget exhausted", explored=explored)
        level = nxt
        if not level:
            return Verdict.fails(detail="p cannot be extended by the events of q",
                                 explored=explored)
    candidates = {k: r for k, r in level.items()
                  if final_marking(r) == qfinal and _cheap_reject(r, q) is None}
    if not candidates:
        return Verdict.fails(detail="no extension of p matches q's events and marking",
                             explored=explored)
    hit, complete = _search_class(q, candidates, budget)
    if hit is not None:
        return Verdict.holds(candidates[hit], detail="extension swapping equivalent to q",
                             explored=explored)
    if complete:
        return Verdict.fails(detail="no extension of p is swapping equivalent to q",
                             explored=explored)
    return Verdict.unknown("swap class of q exceeds the budget", explored=explored)


def order_relation(p: Process, q: Process, net: Net, budget: int | None = None) -> str:
    """One of ``equivalent``, ``below``, ``above``, ``incomparable`` or ``unknown``."""
    le = bd_preorder_fin(p, q, net, budget)
    ge = bd_preorder_fin(q, p, net, budget)
    if le.is_unknown or ge.is_unknown:
        return "unknown"
    if le.is_holds and ge.is_holds:
        return "equivalent"
    if le.is_holds:
        return "below"
    if ge.is_holds:
        return "above"
    return "incomparable"


# ---------------------------------------------------------------------------
# Finite BD-approximations


@dataclass
class Approximations:
    processes: dict[CanonicalForm, Process]
    complete: bool

    @property
    def forms(self) -> frozenset[CanonicalForm]:
        return frozenset(self.processes)

    def __len__(self) -> int:
        return len(self.processes)

    def __contains__(self, p: object) -> bool:
        if isinstance(p, Process):
            return canonical_form(p) in self.processes
        return p in self.processes


def bd_approximations(p: Process, depth: int | None = None, cap: int | None = None) -> Approximations:
    """Finite prefixes of ``p`` closed under one-step swaps and prefix-taking.

    Only prefixes with at most ``depth`` events seed the closure; neither
    closure step adds events, so the result stays within that bound.
    """
    cap = cap or default_budget()
    depth = len(p) if depth is None else depth
    found: dict[CanonicalForm, Process] = {}
    queue: deque[Process] = deque()
    complete = True
    for pre in prefixes(p):
        if len(pre) <= depth:
            k = canonical_form(pre)
            if k not in found:
                found[k] = pre
                queue.append(pre)
    if len(p) > depth:
        complete = False
    while queue:
        x = queue.popleft()
        neighbours = [swap(x, m) for m in legal_swaps(x)]
        for e in x.maximal_events():
            neighbours.append(prefix_by_events(x, set(x.events) - {e}))
        for y in neighbours:
            k = canonical_form(y)
            if k in found:
                continue
            if len(found) >= cap:
                return Approximations(found, False)
            found[k] = y
            queue.append(y)
    return Approximations(found, complete)


# ---------------------------------------------------------------------------
# Common extensions


@dataclass(frozen=True)
class CommonExtension:
    """``p ≤ p_ext ≡₁* q_ext ≥ q``; ``meet`` is a process in both upward cones."""

    meet: Process
    p_ext: Process | None
    q_ext: Process | None


def _cone_levels(space: ProcessSpace, start: CanonicalForm, budget: int):
    """Yield ``(size, keys)`` for the swap-closed extensions of ``start``."""
    cls, ok = space.swap_class(start, budget)
    level = set(cls)
    size = start.n_events
    yield size, level, ok
    while level:
        grown: set[CanonicalForm] = set()
        ok = True
        for k in sorted(level):
            for _, k2 in space.succ(k):
                if k2 in grown:
                    continue
                cls2, c2 = space.swap_class(k2, budget)
                ok &= c2
                grown |= cls2
        size += 1
        level = grown
        yield size, level, ok


def common_extension(p: Process, q: Process, net: Net, depth: int | None = None,
                     budget: int | None = None, space: ProcessSpace | None = None,
                     witness: bool = True) -> Verdict:
    """Search for ``P' ≥ p`` and ``Q' ≥ q`` with ``P' ≡₁* Q'``.

    The upward cones (extensions closed under swaps) of ``p`` and ``q`` are
    compared size by size up to ``depth`` events.  ``FAILS`` is returned when
    one cone runs dry before the cones meet, which makes the search
    exhaustive; hitting ``depth`` or the budget gives ``UNKNOWN``.
    """
    budget = budget or default_budget()
    depth = depth if depth is not None else max(len(p), len(q)) + 8
    space = space or ProcessSpace(net)
    if space.net is None:
        space.net = net
    kp, kq = space.add(p), space.add(q)
    cone_p = _cone_levels(space, kp, budget)
    cone_q = _cone_levels(space, kq, budget)
    sp, lp, okp = next(cone_p)
    sq, lq, okq = next(cone_q)
    exact = okp and okq
    while True:
        if not lp or not lq:
            if exact:
                return Verdict.fails(detail=f"no common extension (a cone is empty at "
                                            f"{max(sp, sq)} events)", explored=len(space.reps))
            return Verdict.unknown("class exploration truncated", explored=len(space.reps))
        if sp == sq:
            meet = lp & lq
            if meet:
                m = space.reps[min(meet)]
                if witness:
                    pe = bd_preorder_fin(p, m, net, budget)
                    qe = bd_preorder_fin(q, m, net, budget)
                    w = CommonExtension(m, pe.witness, qe.witness)
                else:
                    w = CommonExtension(m, None, None)
                return Verdict.holds(w, detail=f"cones meet at {sp} events",
                                     explored=len(space.reps))
        if max(sp, sq) >= depth:
            return Verdict.unknown(f"depth bound {depth} reached", explored=len(space.reps))
        if len(space.reps) > budget:
            return Verdict.unknown("budget exhausted", explored=len(space.reps))
        if sp <= sq:
            sp, lp, ok = next(cone_p)
            exact &= ok
        if sq < sp:
            sq, lq, ok = next(cone_q)
            exact &= ok


@dataclass(frozen=True)
class Cone:
    """Swap-closed extensions of one process, grouped by event count."""

    start: int
    levels: dict[int, frozenset[CanonicalForm]]
    exact: bool

    @property
    def top(self) -> int:
        return max(self.levels)

    @property
    def dry(self) -> bool:
        """The cone ran empty, so every extension was seen."""
        return not self.levels[self.top]

    def at(self, size: int) -> frozenset[CanonicalForm]:
        return self.levels.get(size, frozenset())


def upward_cone(space: ProcessSpace, p: Process | CanonicalForm, depth: int,
                budget: int | None = None) -> Cone:
    """Levels of the upward cone up to ``depth`` events (or until it runs dry)."""
    budget = budget or default_budget()
    k = p if isinstance(p, CanonicalForm) else space.add(p)
    levels: dict[int, frozenset[CanonicalForm]] = {}
    exact = True
    for size, level, ok in _cone_levels(space, k, budget):
        exact &= ok
        levels[size] = frozenset(level)
        if not level or size >= depth:
            break
    return Cone(k.n_events, levels, exact)


def cones_meet(a: Cone, b: Cone, depth: int) -> tuple[str, int | None]:
    """``("holds", size)``, ``("fails", size)`` or ``("unknown", None)``.

    Same decision procedure as :func:`common_extension`, on precomputed cones.
    """
    for s in range(max(a.start, b.start), depth + 1):
        if (s > a.top and not a.dry) or (s > b.top and not b.dry):
            break
        la, lb = a.at(s), b.at(s)
        if la & lb:
            return "holds", s
        if not la or not lb:
            return ("fails", s) if a.exact and b.exact else ("unknown", None)
    return "unknown", None
