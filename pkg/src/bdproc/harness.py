"""Bounded re-verification of the theory on concrete nets.

Each check enumerates the processes of a net up to a depth and tests a
statement against them.  Outcomes:

``pass``
    every prediction that could be evaluated within the bounds agreed, and no
    definite evidence contradicts the statement;
``fail``
    definite evidence contradicts a prediction or a stored expectation;
``unknown``
    a stored expectation could not be evaluated within the bounds;
``skip``
    the check does not apply to this net.

``observed["bounded"]`` is true when a prediction could only be tested for
consistency (for instance because the process set is infinite).
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

from . import corpus as _corpus
from .conflict import Classification, classify
from .multiset import Multiset
from .net import Net, enabled, enabled_transitions, fire_sequence, fire_step
from .process import (
    CanonicalForm,
    Process,
    canonical_form,
    downward_closed_sets,
    enumerate_processes,
    final_marking,
    initial_process,
    is_prefix,
    prefix_by_events,
    successors,
)
from .swapping import (
    ProcessSpace,
    bd_preorder_fin,
    cones_meet,
    default_budget,
    legal_swaps,
    swap,
    swap_equiv,
    upward_cone,
)
from .verdict import Status

PASS, FAIL, UNKNOWN, SKIP = "pass", "fail", "unknown", "skip"


@dataclass
class CheckReport:
    check_id: str
    net: str
    outcome: str
    summary: str = ""
    observed: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    witness: Any = None
    budgets: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.outcome in (PASS, SKIP)


class _Tally:
    """Collects confirmations, contradictions and open expectations."""

    def __init__(self):
        self.confirmed: list[str] = []
        self.violated: list[str] = []
        self.open: list[str] = []
        self.witness = None

    def expect(self, label: str, ok: bool | None, witness=None):
        if ok is None:
            self.open.append(label)
        elif ok:
            self.confirmed.append(label)
        else:
            self.violated.append(label)
            if self.witness is None:
                self.witness = witness

    def outcome(self) -> str:
        if self.violated:
            return FAIL
        if self.open:
            return UNKNOWN
        return PASS if self.confirmed else SKIP

    def summary(self) -> str:
        if self.violated:
            return "violated: " + "; ".join(self.violated)
        if self.open:
            return "undetermined: " + "; ".join(self.open)
        if self.confirmed:
            return "confirmed: " + "; ".join(self.confirmed)
        return "nothing to check"


def _report(check_id, name, tally: _Tally, observed, expected, witness, budgets) -> CheckReport:
    return CheckReport(check_id, name, tally.outcome(), tally.summary(), observed, expected,
                       tally.witness if tally.witness is not None else witness, budgets)


def _name(net: Net, name: str | None) -> str:
    return name or net.name


def _proc_json(p: Process) -> dict:
    from .textio import to_jsonable
    return to_jsonable(p)


# ---------------------------------------------------------------------------
# Classification sanity


def check_classification(net: Net, cap: int = 10_000, name: str | None = None,
                         expected: dict | None = None,
                         classification: Classification | None = None) -> CheckReport:
    """Stored verdicts, internal implications and witness replay."""
    expected = {k: v for k, v in (expected or {}).items() if k in Classification.VERDICT_FIELDS}
    cl = classification or classify(net, cap)
    v = cl.verdicts()
    tally = _Tally()
    for k, want in sorted(expected.items()):
        got = v[k].status
        tally.expect(f"{k} = {want}", None if got is Status.UNKNOWN else got.value == want)
    bcf, pers = v["binary_conflict_free"], v["persistent"]
    if bcf.is_holds and pers.definite:
        tally.expect("binary-conflict-free implies persistent", pers.is_holds)
    scn, cf = v["structural_conflict_net"], v["conflict_free"]
    if scn.is_holds and cf.definite and bcf.definite:
        tally.expect("on structural conflict nets conflict-free iff binary-conflict-free",
                     cf.status == bcf.status)
    if cl.exploration.get("complete") and cl.exploration.get("safe"):
        tally.expect("safe nets are structural conflict nets", scn.is_holds)
    for k, ver in sorted(v.items()):
        w = ver.witness
        if w is not None and hasattr(w, "path"):
            reached = fire_sequence(net, net.initial_marking, list(w.path))
            tally.expect(f"{k} witness replays", reached == w.marking, w)
    observed = {k: ver.status.value for k, ver in sorted(v.items())}
    observed["exploration"] = cl.exploration
    return _report("classify", _name(net, name), tally, observed, expected, None, {"cap": cap})


# ---------------------------------------------------------------------------
# Maximal processes


def check_unique_maximal(net: Net, depth: int, budget: int | None = None, name: str | None = None,
                         expected: dict | None = None,
                         classification: Classification | None = None,
                         space: ProcessSpace | None = None) -> CheckReport:
    budget = budget or default_budget()
    expected = {k: v for k, v in (expected or {}).items()
                if k in ("maximal_processes", "maximal_classes")}
    cl = classification or classify(net)
    enum = enumerate_processes(net, depth, cap=budget)
    space = space or ProcessSpace(net)
    maxs = sorted(canonical_form(p) for p in enum.maximal())
    classes: dict[CanonicalForm, list[CanonicalForm]] = {}
    classes_exact = True
    for k in maxs:
        space.reps.setdefault(k, enum.processes[k])
        cls, ok = space.swap_class(k, budget)
        classes_exact &= ok
        classes.setdefault(min(cls), []).append(k)
    n_classes = len(classes) if classes_exact else None
    finite = enum.complete
    tally = _Tally()
    for key, val in sorted(expected.items()):
        got = len(maxs) if key == "maximal_processes" else n_classes
        tally.expect(f"{key} = {val}", (got == val) if finite and got is not None else None)
    scn = cl.structural_conflict_net
    cf = cl.conflict_free
    witness = None
    if len(maxs) >= 2:
        r = swap_equiv(enum.processes[maxs[0]], enum.processes[maxs[1]], budget)
        witness = {"first_pair": r.status.value,
                   "swaps": [[m.p, m.q] for m in r.witness.moves] if r.is_holds else None}
    bounded = not finite
    if scn.is_holds and cf.definite and finite and n_classes is not None:
        if cf.is_holds:
            tally.expect("conflict-free structural conflict net has one maximal class",
                         n_classes == 1)
        else:
            tally.expect("structural conflict net with a conflict has several maximal classes",
                         n_classes >= 2)
    observed = {
        "processes": len(enum),
        "enumeration_complete": finite,
        "maximal_processes": len(maxs),
        "maximal_classes": n_classes,
        "bounded": bounded,
    }
    return _report("unique_maximal", _name(net, name), tally, observed, expected, witness,
                   {"depth": depth, "budget": budget})


def check_largest_bd(net: Net, depth: int, budget: int | None = None, name: str | None = None,
                     expected: dict | None = None,
                     classification: Classification | None = None,
                     space: ProcessSpace | None = None) -> CheckReport:
    """Directedness of the finite processes, cross-checked with conflict-freeness."""
    budget = budget or default_budget()
    expected = {k: v for k, v in (expected or {}).items() if k == "directed"}
    cl = classification or classify(net)
    enum = enumerate_processes(net, depth, cap=budget)
    space = space or ProcessSpace(net)
    keys = sorted(enum.processes)
    for k in keys:
        space.reps.setdefault(k, enum.processes[k])
    cone_depth = depth + 1
    cones = {k: upward_cone(space, k, cone_depth, budget) for k in keys}
    counts = {"holds": 0, "fails": 0, "unknown": 0}
    first_fail = None
    for a, b in itertools.combinations(keys, 2):
        st, size = cones_meet(cones[a], cones[b], cone_depth)
        counts[st] += 1
        if st == "fails" and first_fail is None:
            first_fail = (a, b, size)
    finite = enum.complete
    all_hold = counts["fails"] == 0 and counts["unknown"] == 0
    directed = True if all_hold and finite else (False if counts["fails"] else None)
    tally = _Tally()
    witness = None
    if first_fail is not None:
        a, b, size = first_fail
        witness = {"no_common_extension": [_proc_json(space.reps[a]), _proc_json(space.reps[b])],
                   "cone_empty_at": size}
    if "directed" in expected:
        tally.expect(f"directed = {expected['directed']}",
                     None if directed is None else directed == expected["directed"])
    scn, cf = cl.structural_conflict_net, cl.conflict_free
    bd_dagger = None
    if scn.is_holds and cf.definite:
        if counts["fails"]:
            tally.expect("non-directedness implies a conflict", cf.is_fails, witness)
        if finite and all_hold:
            tally.expect("directedness implies conflict-freeness", cf.is_holds)
        if finite and cf.is_holds:
            tally.expect("conflict-free implies directed", all_hold)
            bd_dagger = _bd_dagger_closed(enum, space, budget)
            tally.expect("finite processes form a prefix- and swap-closed set", bd_dagger)
    observed = {
        "processes": len(enum),
        "enumeration_complete": finite,
        "pairs": counts,
        "directed": directed,
        "bd_dagger_closed": bd_dagger,
        "bounded": not finite,
    }
    return _report("largest_bd", _name(net, name), tally, observed, expected, witness,
                   {"depth": depth, "cone_depth": cone_depth, "budget": budget})


def _bd_dagger_closed(enum, space: ProcessSpace, budget: int) -> bool:
    forms = enum.forms
    for k, p in enum.processes.items():
        for keep in downward_closed_sets(p):
            if canonical_form(prefix_by_events(p, keep)) not in forms:
                return False
        cls, ok = space.swap_class(k, budget)
        if not ok or not cls <= forms:
            return False
    return True


# ---------------------------------------------------------------------------
# Bisimulation between processes and markings


def check_bisim(net: Net, depth: int, budget: int | None = None, name: str | None = None) -> CheckReport:
    budget = budget or default_budget()
    enum = enumerate_processes(net, depth, cap=budget)
    tally = _Tally()
    m0 = net.initial_marking
    tally.expect("(a) initial process ends in M0", final_marking(initial_process(net)) == m0)
    bad = {"b": None, "c": None, "d": None}
    checked = 0
    for p in enum.processes.values():
        pm = final_marking(p)
        labels = [p.events[e] for e in p.topological_events()]
        if fire_sequence(net, m0, labels) != pm and bad["d"] is None:
            bad["d"] = _proc_json(p)
        if len(p) >= depth:
            continue
        checked += 1
        succ = successors(p, net, dedup=False)
        reached = {}
        for t, q in succ:
            reached.setdefault(t, set()).add(final_marking(q))
            if fire_step(net, pm, [t]) != final_marking(q) and bad["b"] is None:
                bad["b"] = {"process": _proc_json(p), "transition": t}
        for t in enabled_transitions(net, pm):
            if fire_step(net, pm, [t]) not in reached.get(t, ()) and bad["c"] is None:
                bad["c"] = {"process": _proc_json(p), "transition": t}
    tally.expect("(b) process steps are marking steps", bad["b"] is None, bad["b"])
    tally.expect("(c) marking steps are matched by process steps", bad["c"] is None, bad["c"])
    tally.expect("(d) final markings are reachable", bad["d"] is None, bad["d"])
    observed = {"processes": len(enum), "expanded": checked,
                "enumeration_complete": enum.complete}
    return _report("bisim", _name(net, name), tally, observed, {}, None,
                   {"depth": depth, "budget": budget})


def check_main_equivalence(net: Net, depth: int = 12, budget: int | None = None,
                           name: str | None = None) -> CheckReport:
    """Conflict-freeness, directedness and a unique maximal class agree.

    Only meaningful for structural conflict nets whose marking graph and
    process set are finite within the bounds; other nets are skipped.
    """
    budget = budget or default_budget()
    cl = classify(net)
    tally = _Tally()
    enum = enumerate_processes(net, depth, cap=budget)
    observed: dict[str, Any] = {"processes": len(enum), "enumeration_complete": enum.complete,
                                "structural_conflict_net": cl.structural_conflict_net.status.value}
    if not (cl.structural_conflict_net.is_holds and enum.complete and cl.conflict_free.definite):
        return _report("main_equivalence", _name(net, name), tally, observed, {}, None,
                       {"depth": depth, "budget": budget})
    space = ProcessSpace(net)
    keys = sorted(enum.processes)
    for k in keys:
        space.reps.setdefault(k, enum.processes[k])
    cones = {k: upward_cone(space, k, depth + 1, budget) for k in keys}
    pair_status = [cones_meet(cones[a], cones[b], depth + 1)[0]
                   for a, b in itertools.combinations(keys, 2)]
    directed = None if "unknown" in pair_status else "fails" not in pair_status
    ids = set()
    for p in enum.maximal():
        ids.add(space.class_id(space.add(p), budget))
    unique = None if None in ids else len(ids) == 1
    cf = cl.conflict_free.is_holds
    observed.update({"conflict_free": cf, "directed": directed, "unique_maximal_class": unique})
    tally.expect("directedness determined", directed is not None)
    tally.expect("maximal classes determined", unique is not None)
    if directed is not None and unique is not None:
        tally.expect("conflict-free iff directed iff unique maximal class",
                     cf == directed == unique)
    return _report("main_equivalence", _name(net, name), tally, observed, {}, None,
                   {"depth": depth, "budget": budget})


# ---------------------------------------------------------------------------
# Lemmas about the transition relation on processes


def _succ_forms(p: Process, net: Net, t: str, space: ProcessSpace) -> list[CanonicalForm]:
    return [space.add(q) for u, q in successors(p, net) if u == t]


def check_lemmas(net: Net, depth: int, budget: int | None = None, name: str | None = None,
                 classification: Classification | None = None,
                 space: ProcessSpace | None = None) -> CheckReport:
    budget = budget or default_budget()
    cl = classification or classify(net)
    enum = enumerate_processes(net, depth, cap=budget)
    space = space or ProcessSpace(net)
    procs = [enum.processes[k] for k in sorted(enum.processes)]
    counts = {"confl": 0, "swaptrans_a": 0, "swaptrans_b": 0, "cfdiamond": 0, "swapprefix": 0}
    bad: dict[str, Any] = {k: None for k in counts}
    undecided: set[str] = set()

    def cid(k):
        c = space.class_id(k, budget)
        if c is None:
            undecided.add("swap class over budget")
        return c

    bcf = cl.binary_conflict_free.is_holds
    for p in procs:
        n = len(p)
        pm = final_marking(p)
        succ = successors(p, net)
        if n <= depth - 1:
            # swaptrans (a): equally labelled concrete successors are swap equivalent
            by_label: dict[str, list[Process]] = {}
            for t, q in successors(p, net, dedup=False):
                by_label.setdefault(t, []).append(q)
            for t, qs in by_label.items():
                ids = {cid(space.add(q)) for q in qs}
                counts["swaptrans_a"] += 1
                if len(ids) > 1 and None not in ids and bad["swaptrans_a"] is None:
                    bad["swaptrans_a"] = {"process": _proc_json(p), "transition": t}
            # swaptrans (b): moves of any member of the class are matched from p
            kp = space.add(p)
            own = {(t, cid(space.add(q))) for t, q in succ}
            cls, ok = space.swap_class(kp, budget)
            if not ok:
                undecided.add("swap class over budget")
            for k in sorted(cls):
                for t, q in successors(space.reps[k], net):
                    counts["swaptrans_b"] += 1
                    if (t, cid(space.add(q))) not in own and bad["swaptrans_b"] is None:
                        bad["swaptrans_b"] = {"process": _proc_json(p), "member": _proc_json(space.reps[k]),
                                              "transition": t}
        if n <= depth - 2:
            for a, p1 in succ:
                for b in enabled_transitions(net, pm):
                    if not enabled(net, pm, Multiset([a, b])):
                        continue
                    counts["confl"] += 1
                    left = set(_succ_forms(p1, net, b, space))
                    right = {k2 for q in (space.reps[k] for k in _succ_forms(p, net, b, space))
                             for k2 in _succ_forms(q, net, a, space)}
                    if not left & right and bad["confl"] is None:
                        bad["confl"] = {"process": _proc_json(p), "a": a, "b": b}
            if bcf:
                for (a, p1), (b, q) in itertools.product(succ, succ):
                    if a == b:
                        continue
                    counts["cfdiamond"] += 1
                    ok_step = enabled(net, pm, Multiset([a, b]))
                    left = {cid(k) for k in _succ_forms(p1, net, b, space)}
                    right = {cid(k) for k in _succ_forms(q, net, a, space)}
                    if (not ok_step or not left & right) and bad["cfdiamond"] is None:
                        bad["cfdiamond"] = {"process": _proc_json(p), "a": a, "b": b}
        # swapprefix: a swap on a prefix lifts to the whole process
        for keep in downward_closed_sets(p):
            pre = prefix_by_events(p, keep)
            for mv in legal_swaps(pre):
                counts["swapprefix"] += 1
                if not is_prefix(swap(pre, mv), swap(p, mv)) and bad["swapprefix"] is None:
                    bad["swapprefix"] = {"process": _proc_json(p), "swap": [mv.p, mv.q]}
    tally = _Tally()
    names = {
        "confl": "concurrent steps can be reordered",
        "swaptrans_a": "equally labelled successors are swap equivalent",
        "swaptrans_b": "successors of swap-equivalent processes correspond",
        "cfdiamond": "diamond property without binary conflicts",
        "swapprefix": "swaps on prefixes lift to extensions",
    }
    for k in sorted(names):
        if k == "cfdiamond" and not bcf:
            continue
        if undecided and bad[k] is None and k in ("swaptrans_a", "swaptrans_b", "cfdiamond"):
            tally.expect(names[k], None)
        else:
            tally.expect(names[k], bad[k] is None, bad[k])
    observed = {"instances": counts, "cfdiamond": "checked" if bcf else "skipped",
                "processes": len(enum)}
    return _report("lemmas", _name(net, name), tally, observed, {}, None,
                   {"depth": depth, "budget": budget})


# ---------------------------------------------------------------------------
# The two drawn process families of fig6


def check_fig6_maximality(depth: int, budget: int | None = None) -> CheckReport:
    """The all-``a`` family sits strictly below the mixed family.

    At every ``d <= depth`` the ``d``-event all-``a`` prefix extends, up to
    swaps, into the mixed process with ``d`` events of each label, while no
    mixed process with a ``b`` event is below any all-``a`` process.
    """
    budget = budget or default_budget()
    net = _corpus.fig6()
    tally = _Tally()
    rows = []
    witness = None
    for d in range(depth + 1):
        low, high = _corpus.fig6_all_a(d), _corpus.fig6_mixed(d)
        le = bd_preorder_fin(low, high, net, budget)
        ge = bd_preorder_fin(high, _corpus.fig6_all_a(2 * d), net, budget)
        row = {"depth": d, "below": le.status.value, "above": ge.status.value}
        if le.is_holds:
            ext = le.witness
            replay = is_prefix(low, ext) and swap_equiv(ext, high, budget).is_holds
            row["extension_replays"] = replay
            tally.expect(f"d={d}: extension replays", replay)
            witness = {"depth": d, "extension": _proc_json(ext)}
        tally.expect(f"d={d}: all-a below mixed", None if le.is_unknown else le.is_holds)
        want_above = d == 0
        tally.expect(f"d={d}: mixed {'equal to' if want_above else 'not below'} all-a",
                     None if ge.is_unknown else ge.is_holds == want_above)
        rows.append(row)
    return _report("fig6_maximality", "fig6", tally, {"rows": rows}, {}, witness,
                   {"depth": depth, "budget": budget})


# ---------------------------------------------------------------------------
# Suites


@dataclass
class SuiteReport:
    depth: int
    budget: int
    cap: int
    classifications: dict[str, Classification]
    checks: list[CheckReport]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def outcome_counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, UNKNOWN: 0, SKIP: 0}
        for c in self.checks:
            out[c.outcome] += 1
        return out

    def exit_code(self) -> int:
        counts = self.outcome_counts
        if counts[FAIL]:
            return 1
        if counts[UNKNOWN]:
            return 2
        return 0

    def to_json(self, tool_version: str, net_label: str) -> dict:
        from .textio import to_jsonable
        verdicts = {}
        witnesses = []
        for name in sorted(self.classifications):
            cl = self.classifications[name]
            verdicts[name] = {k: v.status.value for k, v in sorted(cl.verdicts().items())}
            verdicts[name]["structural_conflict_pairs"] = sorted(
                sorted(p) for p in cl.structural_conflict_pairs)
            for k, v in sorted(cl.verdicts().items()):
                if v.witness is not None:
                    witnesses.append({"net": name, "property": k, "status": v.status.value,
                                      "witness": to_jsonable(v.witness)})
        return {
            "tool_version": tool_version,
            "net": net_label,
            "budgets": {"depth": self.depth, "budget": self.budget, "cap": self.cap},
            "verdicts": verdicts,
            "witnesses": witnesses,
            "checks": [to_jsonable(c) for c in self.checks],
            "summary": self.outcome_counts,
        }


def run_net_checks(net: Net, depth: int, budget: int | None = None, cap: int = 10_000,
                   name: str | None = None, expected: dict | None = None) -> tuple[Classification, list[CheckReport]]:
    budget = budget or default_budget()
    name = _name(net, name)
    cl = classify(net, cap)
    space = ProcessSpace(net)
    reports = [
        check_classification(net, cap, name, expected, cl),
        check_unique_maximal(net, depth, budget, name, expected, cl, space),
        check_largest_bd(net, depth, budget, name, expected, cl, space),
        check_bisim(net, depth, budget, name),
        check_lemmas(net, depth, budget, name, cl, space),
    ]
    return cl, reports


def run_suite(nets: Iterable[tuple[str, Net, dict]] | None = None, depth: int = 4,
              budget: int | None = None, cap: int = 10_000) -> SuiteReport:
    """Run every check on ``nets`` (the figure corpus by default).

    The order of reports is fixed by net name and check id, so two runs with
    the same arguments produce identical reports.
    """
    budget = budget or default_budget()
    if nets is None:
        nets = [(c.name, c.net, c.expected) for c in _corpus.corpus()]
    classifications = {}
    checks: list[CheckReport] = []
    for name, net, expected in sorted(nets, key=lambda x: x[0]):
        cl, reports = run_net_checks(net, depth, budget, cap, name, expected)
        classifications[name] = cl
        checks += reports
        if name == "fig6" and net == _corpus.fig6():
            checks.append(check_fig6_maximality(depth, budget))
    checks.sort(key=lambda c: (c.net, c.check_id))
    return SuiteReport(depth, budget, cap, classifications, checks)
