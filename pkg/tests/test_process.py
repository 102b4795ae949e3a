import random

import pytest
from hypothesis import given, settings

from bdproc import corpus
from bdproc.harness import check_bisim
from bdproc.multiset import Multiset
from bdproc.net import fire_sequence
from bdproc.process import (
    BranchedCondition,
    Cyclic,
    FlowMismatch,
    InitialMismatch,
    NotDownwardClosed,
    Process,
    ProcessValidationError,
    canonical_form,
    canonical_process,
    check_process,
    enumerate_processes,
    final_marking,
    initial_process,
    is_prefix,
    is_prefix_up_to_iso,
    isomorphic,
    isomorphism,
    prefix_by_events,
    prefixes,
    process_end,
    successors,
    validate_process,
)
from generators import nets

M = Multiset
FIG1 = corpus.fig1()
P1, P2 = corpus.fig1_first_maximal(), corpus.fig1_second_maximal()


def _errors(conds, events, arcs, net):
    with pytest.raises(ProcessValidationError) as exc:
        validate_process(conds, events, arcs, net)
    return exc.value.violations


def _a_only():
    return prefix_by_events(P1, {"ea"})


def _b_only():
    return prefix_by_events(P1, {"eb"})


def test_first_fig1_process_is_valid():
    assert check_process(P1, FIG1) == P1
    assert check_process(P2, FIG1) == P2


def test_double_feed_is_flow_mismatch():
    arcs = set(P1.arcs) | {("s4b", "ec")}
    errs = _errors(P1.conditions, P1.events, arcs, FIG1)
    assert FlowMismatch("ec", "pre", M(["3", "4"]), M(["3", "4", "4"])) in errs


def test_condition_with_two_consumers():
    net = corpus.choice_net()
    errs = _errors({"c0": "s", "c1": "s"}, {"e0": "t", "e1": "u"},
                   [("c0", "e0"), ("c0", "e1")], net)
    assert BranchedCondition("c0", "out") in errs


def test_cycle_is_reported():
    net = corpus.fig3()
    errs = _errors({"c0": "p", "c1": "p"}, {"e0": "t", "e1": "t"},
                   [("c0", "e0"), ("e0", "c1"), ("c1", "e1"), ("e1", "c0")], net)
    assert any(isinstance(v, Cyclic) for v in errs)


def test_initial_mismatch():
    errs = _errors({"c0": "1"}, {}, [], FIG1)
    assert InitialMismatch(M(["1", "2", "3"]), M(["1"])) in errs


def test_initial_processes():
    p = initial_process(FIG1)
    assert sorted(p.conditions.values()) == ["1", "2", "3"] and not p.events
    assert sorted(initial_process(corpus.fig6()).conditions.values()) == ["1", "2", "2", "3"]
    empty = initial_process(corpus.fig4_left())
    assert not empty.conditions and not empty.events


def test_end_and_final_marking():
    p0 = initial_process(FIG1)
    assert process_end(p0) == frozenset(p0.conditions)
    assert process_end(P1) == {"s4b", "s5"}
    assert final_marking(P1) == M(["4", "5"])
    ab = prefix_by_events(P1, {"ea", "eb"})
    assert final_marking(ab) == M(["3", "4", "4"])
    assert final_marking(p0) == FIG1.initial_marking
    (_, one_a), = [(t, q) for t, q in successors(initial_process(corpus.fig6()), corpus.fig6()) if t == "a"]
    assert final_marking(one_a) == M(["1", "2", "2", "3"])


def test_successors_examples():
    first = successors(initial_process(FIG1), FIG1)
    assert [t for t, _ in first] == ["a", "b"]
    ab = prefix_by_events(P1, {"ea", "eb"})
    concrete = successors(ab, FIG1, dedup=False)
    assert [t for t, _ in concrete] == ["c", "c"]
    assert len(successors(ab, FIG1)) == 2
    assert successors(P1, FIG1) == []


def test_prefix_examples():
    assert is_prefix(initial_process(FIG1).renamed({"c0": "s1", "c1": "s2", "c2": "s3"}), P1)
    assert is_prefix(_a_only(), P1)
    assert not is_prefix(_a_only(), _b_only()) and not is_prefix(_b_only(), _a_only())
    assert is_prefix_up_to_iso(_a_only(), P2)


def test_prefix_by_events_examples():
    assert prefix_by_events(P1, set(P1.events)) == P1
    assert prefix_by_events(P1, set()).events == {}
    assert process_end(prefix_by_events(P1, set())) == {"s1", "s2", "s3"}
    with pytest.raises(NotDownwardClosed) as exc:
        prefix_by_events(P1, {"eb", "ec"})
    assert exc.value.event == "ec"


def test_isomorphism_examples():
    renamed = P1.renamed({x: x + "'" for x in [*P1.conditions, *P1.events]})
    assert isomorphic(P1, renamed)
    phi = isomorphism(P1, renamed)
    assert phi["ec"] == "ec'"
    assert not isomorphic(P1, P2)


def test_canonical_process_is_isomorphic_and_stable():
    c = canonical_process(P2)
    assert isomorphic(c, P2)
    assert canonical_process(P2.renamed({"ea": "zz"})) == c
    assert canonical_form(c).encode() == canonical_form(P2).encode()


# Frozen oracle: exhaustive enumeration; the process list is
# empty, a, b, ab, ac, bc and the two maximal processes.
def test_enumerate_fig1():
    e = enumerate_processes(FIG1, 3)
    assert len(e) == 8 and e.complete
    assert {k: len(v) for k, v in e.by_size().items()} == {0: 1, 1: 2, 2: 3, 3: 2}
    assert {canonical_form(p) for p in e.maximal()} == {canonical_form(P1), canonical_form(P2)}


def test_enumerate_small_cases():
    assert len(enumerate_processes(corpus.fig4_left(), 5)) == 1
    for name in corpus.NETS:
        e = enumerate_processes(corpus.get(name), 0)
        assert len(e) == 1
        assert list(e)[0] == initial_process(corpus.get(name))


ENUM_COUNTS = {"fig1": (8, True), "fig2": (28, True), "fig3": (31, False),
               "fig4-left": (1, True), "fig4-right": (2, True), "fig5": (4, True),
               "fig6": (116, False)}


@pytest.mark.parametrize("name", sorted(ENUM_COUNTS))
def test_enumeration_counts_depth4(name):
    e = enumerate_processes(corpus.get(name), 4)
    assert (len(e), e.complete) == ENUM_COUNTS[name]


def test_enumeration_cap():
    e = enumerate_processes(corpus.fig6(), 4, cap=10)
    assert len(e) == 10 and e.truncated_by_cap and not e.complete


@pytest.mark.parametrize("name", sorted(corpus.NETS))
def test_bisimulation_exhaustive_on_corpus(name):
    assert check_bisim(corpus.get(name), 4).outcome == "pass"


@settings(max_examples=60)
@given(nets())
def test_bisimulation_random(net):
    assert check_bisim(net, 3).outcome == "pass"


@settings(max_examples=60)
@given(nets())
def test_successors_sound(net):
    e = enumerate_processes(net, 2, cap=200)
    for p in e:
        for t, q in successors(p, net, dedup=False):
            check_process(q, net)
            assert is_prefix(p, q)
            new = set(q.events) - set(p.events)
            assert len(new) == 1 and q.events[new.pop()] == t


@settings(max_examples=50)
@given(nets())
def test_prefix_coherence(net):
    e = enumerate_processes(net, 3, cap=25)
    for q in e:
        for p in prefixes(q):
            assert is_prefix(p, q)
            added = [x for x in q.topological_events() if x not in p.events]
            reached = fire_sequence(net, final_marking(p), [q.events[x] for x in added])
            assert reached == final_marking(q)


@settings(max_examples=40)
@given(nets(layered=True))
def test_canonical_form_ignores_names(net):
    rng = random.Random(0)
    for p in enumerate_processes(net, 3, cap=30):
        names = [*p.conditions, *p.events]
        fresh = [f"n{i}" for i in range(len(names))]
        rng.shuffle(fresh)
        q = p.renamed(dict(zip(names, fresh)))
        assert canonical_form(q) == canonical_form(p)
        assert isomorphic(p, q)


def test_process_equality_is_concrete():
    assert P1 != P2
    assert Process(P1.conditions, P1.events, P1.arcs) == P1
    assert hash(Process(P1.conditions, P1.events, P1.arcs)) == hash(P1)
