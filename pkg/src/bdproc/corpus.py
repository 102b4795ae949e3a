"""The example nets of the figures, plus hand-built fig6 process families."""

from __future__ import annotations

from dataclasses import dataclass, field

from .net import Net, validate_net
from .process import Process


@dataclass(frozen=True)
class CorpusNet:
    name: str
    net: Net
    expected: dict = field(default_factory=dict)
    caption: str = ""


def fig1() -> Net:
    return validate_net(
        places=["1", "2", "3", "4", "5"],
        transitions=["a", "b", "c"],
        arcs=[("1", "a"), ("a", "4"), ("2", "b"), ("b", "4"),
              ("3", "c"), ("4", "c"), ("c", "5")],
        marking={"1": 1, "2": 1, "3": 1},
        name="fig1",
    )


def fig2() -> Net:
    arcs = []
    for t in "abc":
        arcs += [("p", t), ("p" + t, t), (t, "q")]
    arcs += [("q", "d"), ("pd", "d"), ("d", "p")]
    return validate_net(
        places=["p", "pa", "pb", "pc", "pd", "q"],
        transitions=["a", "b", "c", "d"],
        arcs=arcs,
        marking={"p": 2, "pa": 1, "pb": 1, "pc": 1, "pd": 1},
        name="fig2",
    )


def fig3() -> Net:
    return validate_net(
        places=["p"], transitions=["t", "u"],
        arcs=[("p", "t"), ("t", "p"), ("p", "u"), ("u", "p")],
        marking={"p": 1}, name="fig3",
    )


def fig4_left() -> Net:
    return validate_net(
        places=["p"], transitions=["t", "u"],
        arcs=[("p", "t"), ("p", "u")], marking={}, name="fig4-left",
    )


def fig4_right() -> Net:
    return validate_net(
        places=["p2", "q2"], transitions=["t", "u"],
        arcs=[("p2", "t"), ("p2", "u"), ("q2", "u")],
        marking={"p2": 1}, name="fig4-right",
    )


def fig5() -> Net:
    return validate_net(
        places=["p", "q", "r"], transitions=["t", "u"],
        arcs=[("p", "t"), ("q", "t"), ("q", "u"), ("r", "u")],
        marking={"p": 1, "q": 2, "r": 1}, name="fig5",
    )


def fig6() -> Net:
    return validate_net(
        places=["1", "2", "3"], transitions=["a", "b"],
        arcs=[("1", "a"), ("a", "1"), ("2", "a"), ("a", "2"),
              ("2", "b"), ("b", "2"), ("3", "b"), ("b", "3")],
        marking={"1": 1, "2": 2, "3": 1}, name="fig6",
    )


def choice_net() -> Net:
    """One token, two transitions competing for it."""
    return validate_net(
        places=["s"], transitions=["t", "u"],
        arcs=[("s", "t"), ("s", "u")], marking={"s": 1}, name="choice",
    )


NETS = {
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig4-left": fig4_left,
    "fig4-right": fig4_right,
    "fig5": fig5,
    "fig6": fig6,
}


def get(name: str) -> Net:
    try:
        return NETS[name]()
    except KeyError:
        raise KeyError(f"unknown corpus net {name!r}; known: {', '.join(NETS)}") from None


# Expected facts per net.  Verdict entries use "holds"/"fails"; counts that
# come from exhaustive search rather than from a caption are marked as such
# in the comments.
EXPECTED = {
    "fig1": {
        "structural_conflict_net": "holds",
        "conflict_free": "holds",
        "binary_conflict_free": "holds",
        "persistent": "holds",
        "has_reachable_structural_conflict": "fails",
        "reachable_markings": 7,          # exhaustive search
        "processes": 8,                   # exhaustive search, all depths
        "maximal_processes": 2,
        "maximal_classes": 1,
        "directed": True,
    },
    "fig2": {
        "structural_conflict_net": "fails",
        "conflict_free": "fails",
        "binary_conflict_free": "fails",
        "persistent": "fails",
        "maximal_classes": 1,
        "directed": True,
    },
    "fig3": {
        "persistent": "holds",
        "binary_conflict_free": "fails",
        "conflict_free": "fails",
        "structural_conflict_net": "holds",
        "has_reachable_structural_conflict": "holds",
    },
    "fig4-left": {
        "conflict_free": "holds",
        "binary_conflict_free": "holds",
        "structural_conflict_net": "holds",
        "has_reachable_structural_conflict": "fails",
        "processes": 1,
        "maximal_processes": 1,
        "maximal_classes": 1,
        "directed": True,
    },
    "fig4-right": {
        "conflict_free": "holds",
        "binary_conflict_free": "holds",
        "structural_conflict_net": "holds",
        "has_reachable_structural_conflict": "fails",
        "maximal_classes": 1,
        "directed": True,
    },
    "fig5": {
        "conflict_free": "holds",
        "binary_conflict_free": "holds",
        "structural_conflict_net": "fails",
        "has_reachable_structural_conflict": "holds",
        "maximal_classes": 1,
        "directed": True,
    },
    "fig6": {
        "structural_conflict_net": "fails",
        "conflict_free": "holds",
        "binary_conflict_free": "holds",
        "persistent": "holds",
    },
}

CAPTIONS = {
    "fig1": "A net with its two maximal GR-processes.",
    "fig2": "A net with only a single process up to swapping equivalence.",
    "fig3": "A net which is persistent but not binary-conflict-free.",
    "fig4-left": "Structural conflict, but no choices to resolve (empty marking).",
    "fig4-right": "Structural conflict, but no choices to resolve.",
    "fig5": "A reachable structural conflict, but no choices to resolve.",
    "fig6": "A net and two maximal GR-processes thereof.",
}


def corpus() -> list[CorpusNet]:
    return [CorpusNet(name, fn(), dict(EXPECTED.get(name, {})), CAPTIONS.get(name, ""))
            for name, fn in NETS.items()]


# ---------------------------------------------------------------------------
# Named processes of fig1


def fig1_first_maximal() -> Process:
    """Left process of fig1: ``c`` consumes the 4-token produced by ``a``."""
    return Process(
        {"s1": "1", "s2": "2", "s3": "3", "s4a": "4", "s4b": "4", "s5": "5"},
        {"ea": "a", "eb": "b", "ec": "c"},
        [("s1", "ea"), ("ea", "s4a"), ("s2", "eb"), ("eb", "s4b"),
         ("s4a", "ec"), ("s3", "ec"), ("ec", "s5")],
    )


def fig1_second_maximal() -> Process:
    """Right process of fig1: ``c`` consumes the 4-token produced by ``b``."""
    return Process(
        {"s1": "1", "s2": "2", "s3": "3", "s4a": "4", "s4b": "4", "s5": "5"},
        {"ea": "a", "eb": "b", "ec": "c"},
        [("s1", "ea"), ("ea", "s4a"), ("s2", "eb"), ("eb", "s4b"),
         ("s4b", "ec"), ("s3", "ec"), ("ec", "s5")],
    )


# ---------------------------------------------------------------------------
# fig6 process families
#
# Reading of the drawing: the first family fires only ``a``; its 2-labelled
# tokens alternate, so the i-th ``a`` consumes the 2-condition produced two
# steps earlier (the two initial 2-tokens for the first two events).  The
# second family runs an ``a``-chain on one 2-token and a ``b``-chain on the
# other.  ``fig6_mixed(d)`` has ``d`` events of each kind.


def fig6_all_a(depth: int) -> Process:
    conds = {"p0": "1", "q0": "2", "q1": "2", "r0": "3"}
    events: dict[str, str] = {}
    arcs = []
    twos = ["q0", "q1"]  # 2-conditions in the order they will be consumed
    for i in range(1, depth + 1):
        e = f"a{i}"
        events[e] = "a"
        arcs += [(f"p{i - 1}", e), (twos[i - 1], e)]
        conds[f"p{i}"] = "1"
        q = f"q{i + 1}"
        conds[q] = "2"
        arcs += [(e, f"p{i}"), (e, q)]
        twos.append(q)
    return Process(conds, events, arcs)


def fig6_mixed(depth: int) -> Process:
    conds = {"p0": "1", "qa0": "2", "qb0": "2", "r0": "3"}
    events: dict[str, str] = {}
    arcs = []
    for i in range(1, depth + 1):
        a, b = f"a{i}", f"b{i}"
        events[a] = "a"
        events[b] = "b"
        conds.update({f"p{i}": "1", f"qa{i}": "2", f"qb{i}": "2", f"r{i}": "3"})
        arcs += [(f"p{i - 1}", a), (f"qa{i - 1}", a), (a, f"p{i}"), (a, f"qa{i}")]
        arcs += [(f"qb{i - 1}", b), (f"r{i - 1}", b), (b, f"qb{i}"), (b, f"r{i}")]
    return Process(conds, events, arcs)
