"""Writing a net by hand, firing it and checking it end to end.

The net below is a producer that fills a buffer with two items and a
consumer that takes both at once.  It is parsed from the text format,
fired step by step, classified and finally run through the same checks
the CLI performs with ``bdproc check``.
"""

from bdproc.conflict import classify
from bdproc.harness import run_suite
from bdproc.net import fire_sequence, fire_step, reachable_markings
from bdproc.textio import parse_net

TEXT = """
net buffer
place idle @1
place ready
place buf
place waiting @1
place done
trans produce
trans produce2
trans consume
arc idle -> produce
arc produce -> ready
arc produce -> buf
arc ready -> produce2
arc produce2 -> buf
arc waiting -> consume
arc buf -> consume *2
arc consume -> done
"""

net = parse_net(TEXT)
m0 = net.initial_marking
print("M0 =", m0)
m = fire_sequence(net, m0, ["produce", "produce2"])
print("after produce, produce2:", m)
print("then consume:", fire_step(net, m, ["consume"]))

g = reachable_markings(net)
print(f"\n{len(g)} reachable markings, complete={g.complete}")

cl = classify(net)
for k, v in cl.verdicts().items():
    print(f"  {k}: {v.status.value}")

report = run_suite([(net.name, net, {})], depth=4)
for c in report.checks:
    print(f"  {c.outcome:7} {c.check_id:16} {c.summary}")
