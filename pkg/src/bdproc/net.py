"""Place/transition nets, step firing and bounded reachability."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from .multiset import EMPTY, Multiset

# ---------------------------------------------------------------------------
# Errors


class NetError(Exception):
    pass


@dataclass(frozen=True)
class EmptyPreset:
    transition: str

    def __str__(self) -> str:
        return f"transition {self.transition!r} has no preplace"


@dataclass(frozen=True)
class UndeclaredId:
    node: str

    def __str__(self) -> str:
        return f"undeclared id {self.node!r}"


@dataclass(frozen=True)
class IdClash:
    node: str

    def __str__(self) -> str:
        return f"{self.node!r} is declared both as place and as transition"


@dataclass(frozen=True)
class ZeroWeightArc:
    source: str
    target: str

    def __str__(self) -> str:
        return f"arc {self.source} -> {self.target} has weight 0"


@dataclass(frozen=True)
class MisdirectedArc:
    source: str
    target: str

    def __str__(self) -> str:
        return f"arc {self.source} -> {self.target} must join a place and a transition"


class NetValidationError(NetError, ValueError):
    def __init__(self, violations: Sequence[Any]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class UnknownNodeError(NetError, KeyError):
    def __init__(self, node: str):
        self.node = node
        super().__init__(f"undeclared id {node!r}")


class EmptyStepError(NetError, ValueError):
    def __init__(self):
        super().__init__("a step must be a non-empty multiset of transitions")


class NotEnabledError(NetError):
    def __init__(self, step: Multiset, marking: Multiset, index: int | None = None):
        self.step = step
        self.marking = marking
        self.index = index
        where = f" at position {index}" if index is not None else ""
        super().__init__(f"step {step} is not enabled in {marking}{where}")


# ---------------------------------------------------------------------------
# Nets


@dataclass(frozen=True, eq=False)
class Net:
    """A validated net ``(S, T, F, M0)``.

    Build instances through :func:`validate_net`; the constructor itself
    performs no checks.
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    flow: Mapping[tuple[str, str], int]
    initial_marking: Multiset = EMPTY
    name: str = "net"
    _pre: dict = field(init=False, repr=False, compare=False)
    _post: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pre: dict[str, dict[str, int]] = {x: {} for x in self.places + self.transitions}
        post: dict[str, dict[str, int]] = {x: {} for x in self.places + self.transitions}
        for (x, y), w in self.flow.items():
            pre[y][x] = w
            post[x][y] = w
        object.__setattr__(self, "_pre", {x: Multiset(d) for x, d in pre.items()})
        object.__setattr__(self, "_post", {x: Multiset(d) for x, d in post.items()})

    def _key(self):
        return (self.name, self.places, self.transitions,
                frozenset(self.flow.items()), self.initial_marking)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Net):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    @cached_property
    def place_set(self) -> frozenset:
        return frozenset(self.places)

    @cached_property
    def transition_set(self) -> frozenset:
        return frozenset(self.transitions)

    def pre(self, x: str) -> Multiset:
        try:
            return self._pre[x]
        except KeyError:
            raise UnknownNodeError(x) from None

    def post(self, x: str) -> Multiset:
        try:
            return self._post[x]
        except KeyError:
            raise UnknownNodeError(x) from None

    def weight(self, x: str, y: str) -> int:
        return self.flow.get((x, y), 0)

    def marking_key(self, m: Multiset) -> tuple[int, ...]:
        """Canonical encoding used to order markings during exploration."""
        return m.sort_key(self.places)

    def __repr__(self) -> str:
        return (f"Net({self.name!r}, |S|={len(self.places)}, |T|={len(self.transitions)}, "
                f"M0={self.initial_marking})")


def validate_net(
    places: Iterable[str],
    transitions: Iterable[str],
    arcs: Mapping[tuple[str, str], int] | Iterable[tuple],
    marking: Mapping[str, int] | None = None,
    name: str = "net",
) -> Net:
    """Check a raw net description and build a :class:`Net`.

    ``arcs`` is either a mapping ``(src, dst) -> weight`` or an iterable of
    ``(src, dst)`` / ``(src, dst, weight)`` tuples; repeated arcs add up.
    Raises :class:`NetValidationError` listing every violation found.
    """
    places = [str(p) for p in places]
    transitions = [str(t) for t in transitions]
    violations: list = []
    pset, tset = set(places), set(transitions)
    for x in sorted(pset & tset):
        violations.append(IdClash(x))
    declared = pset | tset

    flow: dict[tuple[str, str], int] = {}
    items = arcs.items() if isinstance(arcs, Mapping) else (
        ((a[0], a[1]), a[2] if len(a) > 2 else 1) for a in arcs)
    for (x, y), w in items:
        x, y = str(x), str(y)
        bad = False
        for node in (x, y):
            if node not in declared:
                violations.append(UndeclaredId(node))
                bad = True
        if not isinstance(w, int) or w < 0:
            raise ValueError(f"arc weight must be a natural number, got {w!r}")
        if w == 0:
            violations.append(ZeroWeightArc(x, y))
            bad = True
        if not bad and not ((x in pset and y in tset) or (x in tset and y in pset)):
            violations.append(MisdirectedArc(x, y))
            bad = True
        if not bad:
            flow[(x, y)] = flow.get((x, y), 0) + w

    m0 = Multiset(marking or {})
    for s in sorted(m0, key=str):
        if s not in pset:
            violations.append(UndeclaredId(str(s)))

    for t in sorted(tset - pset):
        if not any(dst == t for (_, dst) in flow):
            violations.append(EmptyPreset(t))

    if violations:
        raise NetValidationError(violations)
    return Net(tuple(sorted(pset)), tuple(sorted(tset)), flow, m0, name)


# ---------------------------------------------------------------------------
# Pre/postsets and firing


def preset(net: Net, x: str | Mapping[str, int]) -> Multiset:
    """``•x``; for a multiset ``X`` the weighted sum of the presets."""
    if isinstance(x, Mapping):
        out = EMPTY
        for y, k in x.items():
            out = out + net.pre(y) * k
        return out
    return net.pre(x)


def postset(net: Net, x: str | Mapping[str, int]) -> Multiset:
    """``x•``; for a multiset ``X`` the weighted sum of the postsets."""
    if isinstance(x, Mapping):
        out = EMPTY
        for y, k in x.items():
            out = out + net.post(y) * k
        return out
    return net.post(x)


def as_step(g: Mapping[str, int] | Iterable[str]) -> Multiset:
    step = g if isinstance(g, Multiset) else Multiset(g)
    if step.is_empty():
        raise EmptyStepError()
    return step


def enabled(net: Net, m: Mapping[str, int], g: Mapping[str, int] | Iterable[str]) -> bool:
    """Whether step ``g`` is enabled at ``m`` (``•G ⊆ M``)."""
    step = as_step(g)
    for t in step:
        if t not in net.transition_set:
            raise UnknownNodeError(t)
    return preset(net, step) <= m


def fire_step(net: Net, m: Mapping[str, int], g: Mapping[str, int] | Iterable[str]) -> Multiset:
    step = as_step(g)
    m = m if isinstance(m, Multiset) else Multiset(m)
    if not enabled(net, m, step):
        raise NotEnabledError(step, m)
    return (m - preset(net, step)) + postset(net, step)


def fire_sequence(net: Net, m: Mapping[str, int], sigma: Sequence[str]) -> Multiset:
    """Fire the transitions of ``sigma`` one at a time.

    On failure the raised :class:`NotEnabledError` carries the 0-based index
    of the first transition that could not fire.
    """
    cur = m if isinstance(m, Multiset) else Multiset(m)
    for i, t in enumerate(sigma):
        step = Multiset({t: 1})
        if not enabled(net, cur, step):
            raise NotEnabledError(step, cur, i)
        cur = (cur - net.pre(t)) + net.post(t)
    return cur


def enabled_transitions(net: Net, m: Multiset) -> list[str]:
    return [t for t in net.transitions if net.pre(t) <= m]


# ---------------------------------------------------------------------------
# Reachable markings


@dataclass(frozen=True, eq=False)
class MarkingGraph:
    """Reachable markings explored breadth-first from ``M0``.

    ``vertices`` is in exploration order: level by level, each level sorted
    by the net's canonical marking encoding.  ``complete`` is true when the
    vertex set is closed under single-transition firing.
    """

    net: Net
    vertices: tuple[Multiset, ...]
    edges: tuple[tuple[Multiset, str, Multiset], ...]
    complete: bool
    cap_used: int
    parents: Mapping[Multiset, tuple[Multiset, str] | None] = field(repr=False, default_factory=dict)

    def __contains__(self, m: object) -> bool:
        return m in self.parents

    def __len__(self) -> int:
        return len(self.vertices)

    def index(self, m: Multiset) -> int:
        return self._order[m]

    @cached_property
    def _order(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def path_to(self, m: Multiset) -> list[str]:
        """A firing sequence from ``M0`` to ``m`` along recorded edges."""
        if m not in self.parents:
            raise KeyError(m)
        path: list[str] = []
        cur = m
        while self.parents[cur] is not None:
            prev, t = self.parents[cur]
            path.append(t)
            cur = prev
        return path[::-1]

    def successors(self, m: Multiset) -> list[tuple[str, Multiset]]:
        return self._succ.get(m, [])

    @cached_property
    def _succ(self) -> dict:
        out: dict = {}
        for a, t, b in self.edges:
            out.setdefault(a, []).append((t, b))
        return out

    def is_safe(self) -> bool:
        return all(k <= 1 for m in self.vertices for k in m.values())


def reachable_markings(net: Net, cap: int = 10_000) -> MarkingGraph:
    """Breadth-first closure of ``{M0}`` under single-transition firing.

    At most ``cap`` markings are kept; hitting the cap clears ``complete``.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    m0 = net.initial_marking
    parents: dict = {m0: None}
    vertices = [m0]
    edges = []
    complete = True
    level = [m0]
    while level and complete:
        found: dict[Multiset, tuple[Multiset, str]] = {}
        for m in level:
            for t in enabled_transitions(net, m):
                m2 = (m - net.pre(t)) + net.post(t)
                if m2 not in parents and m2 not in found:
                    if len(parents) + len(found) >= cap:
                        complete = False
                        continue
                    found[m2] = (m, t)
                edges.append((m, t, m2))
        new = sorted(found, key=net.marking_key)
        for m2 in new:
            parents[m2] = found[m2]
        vertices.extend(new)
        level = new
    # drop edges to markings that were cut off by the cap
    edges = [e for e in edges if e[2] in parents]
    return MarkingGraph(net, tuple(vertices), tuple(edges), complete, len(vertices), parents)
