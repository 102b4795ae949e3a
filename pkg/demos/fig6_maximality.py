"""Maximal is not the same as largest.

In fig6, a and b share place 2, which holds two tokens.  A run that fires
only a, forever, can pass both 2-tokens through its a-chain in turn, so no
b event can ever be added: it is maximal with respect to prefixes.  Yet
every finite part of it extends, after swapping, into the mixed run where
an a-chain and a b-chain each keep one 2-token.  Once a b has fired the
reverse is impossible, so the mixed run is strictly larger.
"""

from bdproc import corpus
from bdproc.swapping import bd_preorder_fin

net = corpus.fig6()
print("d   all-a(d) <= mixed(d)   mixed(d) <= all-a(2d)")
for d in range(5):
    below = bd_preorder_fin(corpus.fig6_all_a(d), corpus.fig6_mixed(d), net)
    above = bd_preorder_fin(corpus.fig6_mixed(d), corpus.fig6_all_a(2 * d), net)
    print(f"{d}   {below.status.value:21}  {above.status.value}")

ext = bd_preorder_fin(corpus.fig6_all_a(2), corpus.fig6_mixed(2), net).witness
print("\nextension of all-a(2) that matches mixed(2) up to swaps:")
print(" ", sorted(ext.events.values()), "with", len(ext.conditions), "conditions")
