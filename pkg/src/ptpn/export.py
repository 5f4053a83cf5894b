"""Graphviz DOT and Aldebaran AUT renderings of a class graph.

Both writers are deterministic: classes keep their exploration index and
edges keep exploration order, so the same graph always prints the same bytes.
"""

from __future__ import annotations

import re

from .scg import SCGraph

TAU = "tau"


def marking_summary(net, marking) -> str:
    parts = [f"{p}" if k == 1 else f"{p}*{k}" for p, k in net.marking_dict(marking).items()]
    return ", ".join(parts) if parts else "(empty)"


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: SCGraph, dead_style=True) -> str:
    """Dead classes are drawn red with a double border; the frontier of a
    partial graph is drawn dashed."""
    net = g.ptpn.net
    frontier = set(g.frontier)
    lines = [f"digraph {_q(net.name)} {{"]
    if g.partial:
        lines.append(f"  // PARTIAL graph: exploration stopped ({g.stop_reason}), {len(frontier)} unexpanded classes")
        lines.append(f'  label="PARTIAL ({g.stop_reason})";')
    lines.append("  node [shape=box, fontname=monospace];")
    for i, c in enumerate(g.classes):
        attrs = [f"label={_q(f'c{i}: ' + marking_summary(net, c.marking))}"]
        if i in frontier:
            attrs.append("style=dashed")
        elif dead_style and not g.successors(i):
            attrs += ["color=red", "peripheries=2"]
        lines.append(f"  c{i} [{', '.join(attrs)}];")
    for e in g.edges:
        label = e.label if e.label is not None else TAU
        tip = "{" + ",".join(sorted(e.firing_set)) + "}"
        lines.append(f"  c{e.src} -> c{e.dst} [label={_q(label)}, tooltip={_q(tip)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_aut(g: SCGraph) -> str:
    """``des (0, edges, classes)`` followed by one ``(src, "label", dst)`` per edge.

    A partial graph gets a leading ``%`` comment line, which AUT readers skip.
    """
    out = []
    if g.partial:
        out.append(f"% PARTIAL graph: exploration stopped ({g.stop_reason})")
    out.append(f"des (0, {len(g.edges)}, {len(g.classes)})")
    for e in g.edges:
        label = e.label if e.label is not None else TAU
        out.append(f'({e.src}, "{label}", {e.dst})')
    return "\n".join(out) + "\n"


_AUT_HEADER = re.compile(r"^des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_AUT_EDGE = re.compile(r'^\(\s*(\d+)\s*,\s*"((?:[^"\\]|\\.)*)"\s*,\s*(\d+)\s*\)\s*$')


def read_aut(text: str):
    """Parse AUT text back into ``(initial, n_states, [(src, label, dst), ...])``."""
    header = None
    edges = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if header is None:
            m = _AUT_HEADER.match(line)
            if not m:
                raise ValueError(f"line {n}: expected 'des (init, edges, states)'")
            header = tuple(int(x) for x in m.groups())
            continue
        m = _AUT_EDGE.match(line)
        if not m:
            raise ValueError(f"line {n}: malformed transition {line!r}")
        edges.append((int(m.group(1)), m.group(2), int(m.group(3))))
    if header is None:
        raise ValueError("missing des header")
    init, n_edges, n_states = header
    if n_edges != len(edges):
        raise ValueError(f"header announces {n_edges} transitions, found {len(edges)}")
    return init, n_states, edges
