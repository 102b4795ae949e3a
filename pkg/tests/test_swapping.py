import itertools

import pytest
from hypothesis import given, settings

from bdproc import corpus
from bdproc.harness import check_lemmas
from bdproc.process import (
    Process,
    canonical_form,
    downward_closed_sets,
    enumerate_processes,
    final_marking,
    initial_process,
    is_prefix,
    is_prefix_up_to_iso,
    isomorphic,
    prefix_by_events,
    prefixes,
)
from bdproc.swapping import (
    CausallyOrdered,
    LabelMismatch,
    ProcessSpace,
    SwapMove,
    bd_approximations,
    bd_preorder_fin,
    common_extension,
    cones_meet,
    legal_swaps,
    one_step_equiv,
    order_relation,
    swap,
    swap_class,
    swap_equiv,
    upward_cone,
)
from generators import nets

FIG1 = corpus.fig1()
P1, P2 = corpus.fig1_first_maximal(), corpus.fig1_second_maximal()


def _seq(net, labels):
    """The process that fires ``labels`` one after another, first choice each time."""
    from bdproc.process import successors
    p = initial_process(net)
    for t in labels:
        p = next(q for u, q in successors(p, net) if u == t)
    return p


def test_swap_examples():
    assert swap(P1, SwapMove("s4a", "s4b")) == P2
    assert swap(P1, ("s4a", "s4a")) == P1
    assert swap(swap(P1, ("s4a", "s4b")), ("s4a", "s4b")) == P1
    with pytest.raises(LabelMismatch):
        swap(P1, ("s1", "s2"))
    with pytest.raises(CausallyOrdered):
        swap(corpus.fig6_all_a(1), ("q0", "q2"))
    with pytest.raises(KeyError):
        swap(P1, ("s4a", "nope"))


def test_legal_swaps():
    assert legal_swaps(P1) == [SwapMove("s4a", "s4b")]
    assert legal_swaps(initial_process(FIG1)) == []
    assert SwapMove("q0", "q1") in legal_swaps(corpus.fig6_all_a(1), nontrivial=False)


def test_equivalence_examples():
    assert one_step_equiv(P1, P2)
    v = swap_equiv(P1, P2)
    assert v.is_holds and len(v.witness) == 1
    assert swap_equiv(P1, P1).is_holds
    assert swap_equiv(corpus.fig6_all_a(2), corpus.fig6_mixed(1)).is_fails
    fig3 = corpus.fig3()
    tu, ut = _seq(fig3, "tu"), _seq(fig3, "ut")
    v = swap_equiv(tu, ut)
    assert v.is_fails and v.detail == "class explored completely"
    assert not one_step_equiv(tu, ut)


def test_swap_path_replays():
    v = swap_equiv(P1, P2)
    src, dst = (P1, P2) if v.witness.start == "p" else (P2, P1)
    for mv in v.witness.moves:
        src = swap(src, mv)
    assert isomorphic(src, dst)


def test_swap_budget_gives_unknown():
    p = corpus.fig6_mixed(3)
    cls, complete = swap_class(p)
    assert complete
    far = cls[max(cls)]  # five swaps away from p
    v = swap_equiv(p, far)
    assert v.is_holds and len(v.witness) == 5
    assert swap_equiv(p, far, budget=2).is_unknown
    assert swap_equiv(p, p.renamed({"a1": "x"}), budget=1).is_holds


# Frozen oracle: swap classes of the mixed fig6 processes, counted up to
# isomorphism.
def test_fig6_mixed_class_sizes():
    assert [len(swap_class(corpus.fig6_mixed(d))[0]) for d in range(4)] == [1, 3, 26, 252]


def _naive_class(p: Process) -> set:
    seen = {canonical_form(p): p}
    todo = [p]
    while todo:
        x = todo.pop()
        for mv in legal_swaps(x):
            y = swap(x, mv)
            k = canonical_form(y)
            if k not in seen:
                seen[k] = y
                todo.append(y)
    return set(seen)


@pytest.mark.parametrize("d", [0, 1, 2])
def test_frame_closure_matches_naive_closure(d):
    for p in (corpus.fig6_mixed(d), corpus.fig6_all_a(2 * d)):
        assert set(swap_class(p)[0]) == _naive_class(p)


def test_preorder_examples():
    a_only = prefix_by_events(P1, {"ea"})
    b_only = prefix_by_events(P1, {"eb"})
    assert bd_preorder_fin(a_only, P2, FIG1).is_holds
    assert bd_preorder_fin(b_only, P1, FIG1).is_holds
    assert bd_preorder_fin(P1, a_only, FIG1).is_fails
    assert order_relation(P1, P2, FIG1) == "equivalent"
    assert order_relation(a_only, P1, FIG1) == "below"
    assert order_relation(P1, b_only, FIG1) == "above"
    assert order_relation(a_only, b_only, FIG1) == "incomparable"
    w = bd_preorder_fin(a_only, P2, FIG1).witness
    assert is_prefix(a_only, w) and swap_equiv(w, P2).is_holds


def test_preorder_fig6():
    net = corpus.fig6()
    for d in range(3):
        assert bd_preorder_fin(corpus.fig6_all_a(d), corpus.fig6_mixed(d), net).is_holds
        above = bd_preorder_fin(corpus.fig6_mixed(d), corpus.fig6_all_a(2 * d), net)
        assert above.is_holds == (d == 0)


def test_approximations():
    approx = bd_approximations(P1)
    assert len(approx) == 8 and approx.complete
    assert P2 in approx and initial_process(FIG1) in approx
    assert bd_approximations(P2).forms == approx.forms
    assert len(bd_approximations(initial_process(FIG1))) == 1
    small = bd_approximations(P1, depth=1)
    assert len(small) == 3 and not small.complete


def test_common_extension_examples():
    a_only = prefix_by_events(P1, {"ea"})
    b_only = prefix_by_events(P1, {"eb"})
    v = common_extension(a_only, b_only, FIG1)
    assert v.is_holds
    assert is_prefix(a_only, v.witness.p_ext) and is_prefix(b_only, v.witness.q_ext)
    choice = corpus.choice_net()
    t, u = _seq(choice, "t"), _seq(choice, "u")
    assert common_extension(t, u, choice).is_fails
    fig3 = corpus.fig3()
    assert common_extension(_seq(fig3, "t"), _seq(fig3, "u"), fig3, depth=5).is_unknown


def test_cones_agree_with_common_extension():
    for net in (FIG1, corpus.choice_net(), corpus.fig2(), corpus.fig5()):
        e = enumerate_processes(net, 2)
        space = ProcessSpace(net)
        cones = {k: upward_cone(space, p, 5) for k, p in e.processes.items()}
        for k1, k2 in itertools.combinations(sorted(e.processes), 2):
            direct = common_extension(e.processes[k1], e.processes[k2], net, depth=5, witness=False)
            status, _ = cones_meet(cones[k1], cones[k2], 5)
            assert status == direct.status.value, (net.name, k1, k2)


def _pairs(net, depth, cap):
    e = enumerate_processes(net, depth, cap=cap)
    procs = [e.processes[k] for k in sorted(e.processes)]
    return procs


@settings(max_examples=50)
@given(nets())
def test_swaps_preserve_validity_and_marking(net):
    from bdproc.process import check_process
    for p in _pairs(net, 3, 25):
        for mv in legal_swaps(p):
            q = swap(p, mv)
            check_process(q, net)
            assert final_marking(q) == final_marking(p)
            assert q.event_labels() == p.event_labels()
            assert one_step_equiv(q, p) and one_step_equiv(p, q)


@settings(max_examples=40)
@given(nets())
def test_swap_equiv_is_symmetric(net):
    procs = _pairs(net, 3, 12)
    for p, q in itertools.combinations(procs, 2):
        a, b = swap_equiv(p, q), swap_equiv(q, p)
        assert a.status == b.status
        if a.is_holds:
            assert final_marking(p) == final_marking(q)


@settings(max_examples=40)
@given(nets())
def test_swap_lifts_from_prefix(net):
    for p in _pairs(net, 3, 15):
        for keep in downward_closed_sets(p):
            pre = prefix_by_events(p, keep)
            for mv in legal_swaps(pre):
                assert is_prefix(swap(pre, mv), swap(p, mv))


@settings(max_examples=30)
@given(nets())
def test_preorder_is_a_preorder_with_swap_kernel(net):
    procs = _pairs(net, 2, 8)
    rel = {}
    for p, q in itertools.product(range(len(procs)), repeat=2):
        rel[p, q] = bd_preorder_fin(procs[p], procs[q], net).is_holds
    for i in range(len(procs)):
        assert rel[i, i]
    for i, j, k in itertools.product(range(len(procs)), repeat=3):
        if rel[i, j] and rel[j, k]:
            assert rel[i, k]
    for i, j in itertools.combinations(range(len(procs)), 2):
        kernel = rel[i, j] and rel[j, i]
        assert kernel == swap_equiv(procs[i], procs[j]).is_holds


@settings(max_examples=30)
@given(nets(layered=True))
def test_approximation_inclusion_matches_preorder(net):
    procs = _pairs(net, 3, 10)
    approx = {canonical_form(p): bd_approximations(p).forms for p in procs}
    for p, q in itertools.product(procs, repeat=2):
        included = approx[canonical_form(p)] <= approx[canonical_form(q)]
        assert included == bd_preorder_fin(p, q, net).is_holds


@settings(max_examples=30)
@given(nets(layered=True))
def test_prefix_up_to_iso_and_swaps(net):
    procs = _pairs(net, 3, 10)
    for p, q in itertools.product(procs, repeat=2):
        if is_prefix_up_to_iso(p, q):
            assert bd_preorder_fin(p, q, net).is_holds
        for pre in prefixes(q):
            assert is_prefix_up_to_iso(pre, q)


@pytest.mark.parametrize("name", sorted(corpus.NETS))
def test_lemmas_on_corpus(name):
    assert check_lemmas(corpus.get(name), 4).outcome in ("pass", "skip")


@settings(max_examples=25)
@given(nets(layered=True))
def test_lemmas_random(net):
    assert check_lemmas(net, 3, budget=2000).outcome in ("pass", "skip")
