"""Canonical labelling of small vertex-coloured digraphs.

Colour refinement followed by individualisation with backtracking.  The
canonical code is the lexicographically least ``(invariant trail, code)``
over the leaves of the search tree; branches whose invariant trail already
exceeds the best one are cut, and automorphisms found between equal leaves
prune symmetric siblings.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Hashable, Sequence


def _rank(values: Sequence) -> list[int]:
    order = {v: i for i, v in enumerate(sorted(set(values)))}
    return [order[v] for v in values]


class _Search:
    def __init__(self, colours: Sequence, succs: Sequence[Sequence[int]]):
        self.n = len(colours)
        self.labels = list(colours)
        self.succs = [tuple(s) for s in succs]
        preds: list[list[int]] = [[] for _ in range(self.n)]
        for u, outs in enumerate(self.succs):
            for w in outs:
                preds[w].append(u)
        self.preds = [tuple(p) for p in preds]
        self.best: tuple | None = None  # (trail, code, order)
        self.autos: list[list[int]] = []

    def refine(self, colours: list[int]) -> tuple[list[int], tuple]:
        k = len(set(colours))
        while True:
            sigs = [
                (colours[v],
                 tuple(sorted(colours[u] for u in self.preds[v])),
                 tuple(sorted(colours[w] for w in self.succs[v])))
                for v in range(self.n)
            ]
            new = _rank(sigs)
            m = len(set(new))
            if m == k:
                counts = Counter(sigs)
                return colours, tuple(sorted(counts.items()))
            colours, k = new, m

    def leaf_code(self, colours: list[int]) -> tuple[tuple, list[int]]:
        order = sorted(range(self.n), key=colours.__getitem__)
        pos = colours  # discrete partition: colour == position
        code = (
            tuple(self.labels[v] for v in order),
            tuple(sorted((pos[u], pos[w]) for u in range(self.n) for w in self.succs[u])),
        )
        return code, order

    def _orbit_mates(self, v: int, explored: list[int], path: list[int]) -> bool:
        gens = [g for g in self.autos if all(g[x] == x for x in path)]
        if not gens:
            return False
        seen = {v}
        stack = [v]
        targets = set(explored)
        while stack:
            x = stack.pop()
            if x in targets:
                return True
            for g in gens:
                y = g[x]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    def dfs(self, colours: list[int], trail: tuple, path: list[int]) -> None:
        colours, inv = self.refine(colours)
        trail = trail + (inv,)
        if self.best is not None:
            best_trail = self.best[0]
            cut = best_trail[: len(trail)]
            if trail > cut:
                return
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(colours):
            cells.setdefault(c, []).append(v)
        target = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            code, order = self.leaf_code(colours)
            cand = (trail, code)
            if self.best is None or cand < self.best[:2]:
                self.best = (trail, code, order)
            elif cand == self.best[:2]:
                gamma = [0] * self.n
                for a, b in zip(self.best[2], order):
                    gamma[a] = b
                self.autos.append(gamma)
            return
        explored: list[int] = []
        for v in target:
            if explored and self._orbit_mates(v, explored, path):
                continue
            c = colours[v]
            ind = _rank([(x, 0 if u == v else 1) if x == c else (x, 1)
                         for u, x in enumerate(colours)])
            self.dfs(ind, trail, path + [v])
            explored.append(v)


def canonical_labelling(colours: Sequence[Hashable], succs: Sequence[Sequence[int]]) -> tuple[tuple, list[int]]:
    """Return ``(code, order)`` for a coloured digraph on ``0..n-1``.

    ``colours[v]`` must be mutually comparable.  Two graphs are isomorphic
    (respecting colours) iff their codes are equal; ``order[i]`` is the
    vertex placed at canonical position ``i``.
    """
    if not colours:
        return ((), ()), []
    s = _Search(colours, succs)
    s.dfs(_rank(list(colours)), (), [])
    assert s.best is not None
    return s.best[1], s.best[2]
