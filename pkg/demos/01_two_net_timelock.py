"""Two small nets that look compatible but can get stuck.

N1 offers ``b`` either early (t1, before time 2) or late (t3, after 3).
N2 only offers ``b`` early. Once the silent transition ``t`` commits N1
to the late branch, neither side can move: a timelock.

Run from the repository root: ``python3 demos/01_two_net_timelock.py``.
"""
from pathlib import Path

from ptpn import build_scg, chain_product, load_manifest, serialize_net
from ptpn.analysis import AcceptanceSpec, find_dead_classes, render_trace, verdict
from ptpn.export import marking_summary, to_dot

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

# %% Compose the two components over their shared labels {a, b}.
product = chain_product(load_manifest(FIXTURES / "twonet.manifest"))
print(serialize_net(product))

# The relation lists the transitions that must fire together.
for group in sorted(product.relation, key=sorted):
    print("group:", sorted(group))

# %% Build the state class graph. The {t3.1, t1.2} group never appears on
# an edge: t3.1 needs at least 3 time units while t1.2 must go by 2.
g = build_scg(product)
print(g.stats())
for e in g.edges:
    print(f"c{e.src} --{e.label or 'tau'} {sorted(e.firing_set)}--> c{e.dst}")

# %% Classify the dead classes. Reaching both p2 places is the happy end.
spec = AcceptanceSpec("b", "timeout", {"p2.1": 1, "p2.2": 1})
accepting, locked = find_dead_classes(g, spec)
for i in locked:
    print("timelocked:", marking_summary(product.net, g.classes[i].marking))

v = verdict(g, spec)
print(v.kind.value, render_trace(v.witness))

# %% The graph in Graphviz form; dead classes are drawn red.
print(to_dot(g))
