"""Conflict, persistence and structural conflicts across the figure nets.

Each net is explored once and all five properties are read off the same
marking graph.  Witnesses are printed as multiset@marking.
"""

from bdproc import corpus
from bdproc.conflict import classify

cols = ("binary_conflict_free", "conflict_free", "persistent",
        "structural_conflict_net", "has_reachable_structural_conflict")
short = ("bcf", "cf", "pers", "scn", "reach-sc")

print(f"{'net':11}" + "".join(f"{s:>9}" for s in short) + "  markings")
witnesses = []
for c in corpus.corpus():
    cl = classify(c.net)
    row = [getattr(cl, k) for k in cols]
    print(f"{c.name:11}" + "".join(f"{v.status.value:>9}" for v in row)
          + f"  {cl.exploration['markings']:>8}")
    for k, v in zip(short, row):
        if v.witness is not None:
            witnesses.append(f"  {c.name:11} {k:9} {v.witness}")

print("\nwitnesses:")
print("\n".join(witnesses))

# fig3: t and u both want the single token on p, yet neither can ever
# disable the other for good because each puts the token back
print("\n" + corpus.CAPTIONS["fig3"])
