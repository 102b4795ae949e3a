"""Semantic and structural conflicts, checked over the reachable markings.

Every universally quantified property is evaluated on one bounded
:class:`~bdproc.net.MarkingGraph`.  A violation found in an explored marking
is definite even when exploration was cut short; the absence of violations
is only reported as ``HOLDS`` when the graph is complete.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

from .multiset import Multiset
from .net import MarkingGraph, Net, as_step, enabled_transitions, preset, reachable_markings
from .verdict import Verdict


@dataclass(frozen=True)
class ConflictWitness:
    """A reachable marking, the offending multiset and how to reach it."""

    marking: Multiset
    multiset: Multiset
    kind: str
    path: tuple[str, ...] = ()
    order: tuple[str, ...] = ()  # persistence: firing order[0] disables order[1]

    def __str__(self) -> str:
        return f"{self.multiset}@{self.marking}"


def in_conflict(net: Net, m: Mapping[str, int], g: Mapping[str, int]) -> bool:
    """``G`` is not enabled although each ``G↾{t}`` is."""
    step = as_step(g)
    pre = preset(net, step)
    if pre <= m:
        return False
    return all(net.pre(t) * k <= m for t, k in step.items())


def _bound(net: Net, m: Multiset, t: str) -> int:
    """Largest ``k`` with ``k·•t ⊆ m``."""
    return min(m[s] // w for s, w in net.pre(t).items())


def conflict_candidates(net: Net, m: Multiset, max_size: int | None = None) -> Iterator[Multiset]:
    """Multisets with every per-transition restriction enabled, smallest first.

    Singletons are skipped: they can never be in conflict.
    """
    ts = [t for t in enabled_transitions(net, m)]
    bounds = [_bound(net, m, t) for t in ts]
    total = sum(bounds)
    if max_size is not None:
        total = min(total, max_size)
    for size in range(2, total + 1):
        found = []
        for vec in _compositions(bounds, size):
            found.append(Multiset({t: k for t, k in zip(ts, vec) if k}))
        found.sort(key=lambda g: g.elements())
        yield from found


def _compositions(bounds: list[int], size: int) -> Iterator[tuple[int, ...]]:
    if not bounds:
        if size == 0:
            yield ()
        return
    head, rest = bounds[0], bounds[1:]
    cap_rest = sum(rest)
    for k in range(min(head, size), -1, -1):
        if size - k <= cap_rest:
            for tail in _compositions(rest, size - k):
                yield (k,) + tail


def _graph(net: Net, cap: int, graph: MarkingGraph | None) -> MarkingGraph:
    return graph if graph is not None else reachable_markings(net, cap)


def _summary(g: MarkingGraph) -> dict:
    return {"markings": len(g.vertices), "edges": len(g.edges), "complete": g.complete,
            "cap_used": g.cap_used}


def _done(g: MarkingGraph, what: str) -> Verdict:
    if g.complete:
        return Verdict.holds(detail=what, **_summary(g))
    return Verdict.unknown(f"exploration truncated after {len(g.vertices)} markings", **_summary(g))


def is_binary_conflict_free(net: Net, cap: int = 10_000, graph: MarkingGraph | None = None) -> Verdict:
    g = _graph(net, cap, graph)
    for m in g.vertices:
        ts = enabled_transitions(net, m)
        for t, u in itertools.combinations_with_replacement(ts, 2):
            step = Multiset([t, u])
            if in_conflict(net, m, step):
                w = ConflictWitness(m, step, "binary", tuple(g.path_to(m)))
                return Verdict.fails(w, **_summary(g))
    return _done(g, "no reachable binary conflict")


def is_conflict_free(net: Net, cap: int = 10_000, graph: MarkingGraph | None = None) -> Verdict:
    """Search every reachable marking for a multiset in semantic conflict.

    Candidate multisets are bounded per transition by the largest ``k`` with
    ``k·•t`` contained in the marking; the first marking in exploration order
    that has a conflict yields the smallest conflicting multiset there.
    """
    g = _graph(net, cap, graph)
    for m in g.vertices:
        for step in conflict_candidates(net, m):
            if not preset(net, step) <= m:
                w = ConflictWitness(m, step, "semantic", tuple(g.path_to(m)))
                return Verdict.fails(w, **_summary(g))
    return _done(g, "no reachable semantic conflict")


def is_persistent(net: Net, cap: int = 10_000, graph: MarkingGraph | None = None) -> Verdict:
    g = _graph(net, cap, graph)
    for m in g.vertices:
        ts = enabled_transitions(net, m)
        for t in ts:
            after = (m - net.pre(t)) + net.post(t)
            for u in ts:
                if u != t and not net.pre(u) <= after:
                    w = ConflictWitness(m, Multiset([t, u]), "persistence-violation",
                                        tuple(g.path_to(m)), (t, u))
                    return Verdict.fails(w, **_summary(g))
    return _done(g, "no transition disables another")


def structural_conflict_pairs(net: Net) -> frozenset[frozenset[str]]:
    """Pairs of distinct transitions sharing a preplace (purely syntactic)."""
    out = set()
    for t, u in itertools.combinations(net.transitions, 2):
        if net.pre(t).support() & net.pre(u).support():
            out.add(frozenset((t, u)))
    return frozenset(out)


def has_reachable_structural_conflict(net: Net, cap: int = 10_000,
                                      graph: MarkingGraph | None = None) -> Verdict:
    """``HOLDS`` with a witness ``(M, {t,u})`` when both are enabled and share a preplace."""
    g = _graph(net, cap, graph)
    pairs = structural_conflict_pairs(net)
    for m in g.vertices:
        ts = enabled_transitions(net, m)
        for t, u in itertools.combinations(ts, 2):
            if frozenset((t, u)) in pairs:
                w = ConflictWitness(m, Multiset([t, u]), "reachable-structural",
                                    tuple(g.path_to(m)), (t, u))
                return Verdict.holds(w, **_summary(g))
    if g.complete:
        return Verdict.fails(detail="no reachable structural conflict", **_summary(g))
    return Verdict.unknown("exploration truncated", **_summary(g))


def is_structural_conflict_net(net: Net, cap: int = 10_000,
                               graph: MarkingGraph | None = None) -> Verdict:
    """No enabled step ``{t, u}`` (``t = u`` included) has overlapping presets."""
    g = _graph(net, cap, graph)
    for m in g.vertices:
        ts = enabled_transitions(net, m)
        for t, u in itertools.combinations_with_replacement(ts, 2):
            step = Multiset([t, u])
            if preset(net, step) <= m and net.pre(t).support() & net.pre(u).support():
                w = ConflictWitness(m, step, "step-with-shared-preplace", tuple(g.path_to(m)))
                return Verdict.fails(w, **_summary(g))
    return _done(g, "no enabled step shares a preplace")


def landweber_robertson_conflict_free(net: Net) -> bool:
    """Syntactic check: every shared input place is on a self-loop with each consumer.

    Documented for comparison only; it does not capture the absence of
    choices (``fig3`` passes it, ``fig4-left`` does not).
    """
    for s in net.places:
        consumers = [t for t in net.transitions if net.pre(t)[s]]
        if len(consumers) > 1 and any(net.post(t)[s] == 0 for t in consumers):
            return False
    return True


@dataclass
class Classification:
    net: Net
    binary_conflict_free: Verdict
    conflict_free: Verdict
    persistent: Verdict
    structural_conflict_net: Verdict
    has_reachable_structural_conflict: Verdict
    structural_conflict_pairs: frozenset[frozenset[str]]
    exploration: dict = field(default_factory=dict)

    VERDICT_FIELDS = ("binary_conflict_free", "conflict_free", "persistent",
                      "structural_conflict_net", "has_reachable_structural_conflict")

    def verdicts(self) -> dict[str, Verdict]:
        return {k: getattr(self, k) for k in self.VERDICT_FIELDS}

    @property
    def all_definite(self) -> bool:
        return all(v.definite for v in self.verdicts().values())


def classify(net: Net, cap: int = 10_000) -> Classification:
    """Run every conflict check against one shared marking graph."""
    g = reachable_markings(net, cap)
    return Classification(
        net=net,
        binary_conflict_free=is_binary_conflict_free(net, graph=g),
        conflict_free=is_conflict_free(net, graph=g),
        persistent=is_persistent(net, graph=g),
        structural_conflict_net=is_structural_conflict_net(net, graph=g),
        has_reachable_structural_conflict=has_reachable_structural_conflict(net, graph=g),
        structural_conflict_pairs=structural_conflict_pairs(net),
        exploration={**_summary(g), "safe": g.is_safe()},
    )
