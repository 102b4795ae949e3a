"""Two ways to run fig1, and why they are really one.

Transitions a and b each put a token on place 4, and c consumes one
token from 4.  Under the collective token view those two tokens are
interchangeable, so which one c used should not matter.  The process
semantics records it anyway; swapping is what identifies the two records.
"""

from bdproc import corpus
from bdproc.process import canonical_form, enumerate_processes
from bdproc.swapping import bd_approximations, legal_swaps, swap, swap_equiv
from bdproc.textio import dot_export, serialize_process

net = corpus.fig1()
print(f"net {net.name}, initial marking {net.initial_marking}")

runs = enumerate_processes(net, depth=3)
print(f"{len(runs)} finite processes up to isomorphism; sizes:",
      {k: len(v) for k, v in sorted(runs.by_size().items())})

left, right = sorted(runs.maximal(), key=canonical_form)
print("\nthe two maximal processes:")
for p in (left, right):
    print(serialize_process(p, "run", net.name))

# the swap that turns one into the other
move = legal_swaps(left)[0]
print(f"legal swap in the first: {move}")
v = swap_equiv(left, right)
print(f"swap_equiv: {v.status.value}, path of {len(v.witness)} swap(s)")
print("swapped copy isomorphic to the second:",
      canonical_form(swap(left, move)) == canonical_form(right))

# both runs have the same finite approximations, so they denote one BD-run
a, b = bd_approximations(left), bd_approximations(right)
print(f"\nBD-approximations: {len(a)} and {len(b)}, equal: {a.forms == b.forms}")

print("\nDOT of the first run (pipe into `dot -Tsvg`):")
print(dot_export(left, "left"))
