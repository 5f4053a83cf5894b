"""Verdicts over a state class graph, plus a discrete-time brute-force oracle.

Two graph questions back the verdict: can an edge carrying a given label be
reached, and must every maximal run eventually fire it. Dead classes (no
outgoing edge) are split into accepting endings and timelocks by a marking
predicate.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

from .errors import PartialGraphError, UnsupportedIntervalsError
from .model import PTPN
from .scg import Edge, SCGraph


class VerdictKind(str, enum.Enum):
    SUCCESS = "Success"
    TIMEOUT = "TimeOut"
    TIMELOCK = "TimeLock"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    witness: Optional[tuple] = None  # tuple of Edge

    def __post_init__(self):
        if self.kind in (VerdictKind.TIMEOUT, VerdictKind.TIMELOCK) and self.witness is None:
            raise ValueError(f"{self.kind.value} verdicts need a witness trace")
        if self.kind is VerdictKind.SUCCESS and self.witness is not None:
            raise ValueError("Success carries no witness")


@dataclass(frozen=True)
class AcceptanceSpec:
    """Which labels mean success/timeout and which dead markings are legitimate.

    ``accepting`` maps place names to the minimum token count required; a
    callable ``marking_dict -> bool`` is accepted too.
    """

    success_label: str
    timeout_label: str
    accepting: Union[Mapping[str, int], Callable] = field(default_factory=dict)

    def check_alphabet(self, alphabet) -> list:
        return [l for l in (self.success_label, self.timeout_label) if l not in alphabet]

    def accepts(self, net, marking) -> bool:
        md = net.marking_dict(marking, nonzero=False)
        if callable(self.accepting):
            return bool(self.accepting(md))
        return all(md.get(p, 0) >= k for p, k in self.accepting.items())


def _require_complete(g: SCGraph):
    if not g.complete:
        raise PartialGraphError(f"graph exploration stopped early ({g.stop_reason}); analysis needs a complete graph")


def _bfs_tree(g: SCGraph, skip_label=None, use_skip=False):
    """Shortest-path parents from class 0, optionally ignoring edges with ``skip_label``."""
    parent = {0: None}
    q = deque([0])
    order = []
    while q:
        i = q.popleft()
        order.append(i)
        for e in g.successors(i):
            if use_skip and e.label == skip_label:
                continue
            if e.dst not in parent:
                parent[e.dst] = e
                q.append(e.dst)
    return parent, order


def _path_to(parent, i) -> list:
    path = []
    while parent[i] is not None:
        e = parent[i]
        path.append(e)
        i = e.src
    return path[::-1]


def find_dead_classes(g: SCGraph, spec: AcceptanceSpec):
    """Return ``(accepting, timelocked)`` lists of dead class indices."""
    _require_complete(g)
    net = g.ptpn.net
    accepting, locked = [], []
    for i, c in enumerate(g.classes):
        if not g.successors(i):
            (accepting if spec.accepts(net, c.marking) else locked).append(i)
    return accepting, locked


def path_to_class(g: SCGraph, target: int) -> tuple:
    parent, _ = _bfs_tree(g)
    if target not in parent:
        raise ValueError(f"class {target} is unreachable")
    return tuple(_path_to(parent, target))


def event_reachable(g: SCGraph, label: str):
    """``(found, witness)``; the witness is a shortest edge path ending with ``label``."""
    parent, order = _bfs_tree(g)
    for i in order:
        for e in g.successors(i):
            if e.label == label:
                return True, tuple(_path_to(parent, i) + [e])
    return False, None


def event_inevitable(g: SCGraph, label: str, spec: Optional[AcceptanceSpec] = None):
    """Does every maximal run fire ``label``?

    Drop the ``label`` edges; the answer is no when, from class 0, one can still
    reach a class that is dead in the full graph or a cycle. The counterexample
    is a path to that dead class, or a lasso ``(stem + loop)``.
    """
    _require_complete(g)
    parent, order = _bfs_tree(g, label, use_skip=True)
    for i in order:
        if not g.successors(i):
            return False, tuple(_path_to(parent, i))
    # cycle detection in the reduced reachable subgraph (iterative DFS, colours)
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {i: WHITE for i in order}
    for root in order:
        if colour[root] != WHITE:
            continue
        stack = [(root, iter(g.successors(root)))]
        colour[root] = GREY
        on_path = [root]
        via = []
        while stack:
            node, it = stack[-1]
            advanced = False
            for e in it:
                if e.label == label:
                    continue
                if colour[e.dst] == GREY:
                    k = on_path.index(e.dst)
                    loop = via[k:] + [e]
                    return False, tuple(_path_to(parent, e.dst) + loop)
                if colour[e.dst] == WHITE:
                    colour[e.dst] = GREY
                    stack.append((e.dst, iter(g.successors(e.dst))))
                    on_path.append(e.dst)
                    via.append(e)
                    advanced = True
                    break
            if not advanced:
                colour[node] = BLACK
                stack.pop()
                on_path.pop()
                if via:
                    via.pop()
    return True, None


def verdict(g: SCGraph, spec: AcceptanceSpec) -> Verdict:
    """TimeOut beats TimeLock beats Success; anything else is Inconclusive."""
    _require_complete(g)
    hit, witness = event_reachable(g, spec.timeout_label)
    if hit:
        return Verdict(VerdictKind.TIMEOUT, witness)
    _, locked = find_dead_classes(g, spec)
    if locked:
        parent, _ = _bfs_tree(g)
        target = min(locked, key=lambda i: len(_path_to(parent, i)))
        return Verdict(VerdictKind.TIMELOCK, tuple(_path_to(parent, target)))
    ok, counter = event_inevitable(g, spec.success_label, spec)
    if ok:
        return Verdict(VerdictKind.SUCCESS)
    return Verdict(VerdictKind.INCONCLUSIVE, counter)


def replay(g: SCGraph, witness) -> int:
    """Follow a witness from class 0 through the graph; return the final class."""
    i = 0
    for e in witness:
        match = [f for f in g.successors(i) if f.firing_set == e.firing_set and f.dst == e.dst]
        if not match:
            raise ValueError(f"witness step {sorted(e.firing_set)} is not an edge of class {i}")
        i = e.dst
    return i


def render_trace(witness) -> list:
    """``[(label or 'tau', [members...]), ...]`` for text and JSON output."""
    return [(e.label if e.label is not None else "tau", sorted(e.firing_set)) for e in (witness or ())]


# --- discrete-time oracle ---------------------------------------------------

TICK = "@tick"


class _Discrete:
    """Integer-clock semantics: a state is (marking, elapsed clock per transition)."""

    def __init__(self, p: PTPN):
        net = p.net
        for t in net.transitions:
            if not net.intervals[t].is_closed_integer():
                raise UnsupportedIntervalsError(
                    f"transition {t} has interval {net.intervals[t]}; the oracle needs closed integer bounds")
        self.net = net
        self.T = net.transitions
        self.pre = [tuple(net.pre[t].get(pl, 0) for pl in net.places) for t in self.T]
        self.post = [tuple(net.post[t].get(pl, 0) for pl in net.places) for t in self.T]
        self.lo = [int(net.intervals[t].lo) for t in self.T]
        self.hi = [None if net.intervals[t].hi is None else int(net.intervals[t].hi) for t in self.T]
        self.sets = [(tuple(sorted(net.transition_index(t) for t in r)), p.set_label(r)) for r in p.relation]

    def _en(self, m, i):
        return all(a >= b for a, b in zip(m, self.pre[i]))

    def _cap(self, i, v):
        return min(v, self.hi[i] if self.hi[i] is not None else self.lo[i])

    def initial(self):
        m = self.net.m0
        return (m, tuple(0 if self._en(m, i) else None for i in range(len(self.T))))

    def tick(self, s):
        m, clk = s
        for i, v in enumerate(clk):
            if v is not None and self.hi[i] is not None and v + 1 > self.hi[i]:
                return None
        return (m, tuple(None if v is None else self._cap(i, v + 1) for i, v in enumerate(clk)))

    def moves(self, s):
        for (_, label), (_, s2) in zip(self.sets, self._all(s)):
            if s2 is not None:
                yield label, s2

    def moves_indexed(self, s):
        for (idx, _), (_, s2) in zip(self.sets, self._all(s)):
            if s2 is not None:
                yield idx, s2

    def _all(self, s):
        """One ``(set index, successor or None)`` per firing set, in relation order."""
        m, clk = s
        for idx, label in self.sets:
            if not all(clk[i] is not None and clk[i] >= self.lo[i] for i in idx):
                yield idx, None
                continue
            mid = list(m)
            for i in idx:
                mid = [a - b for a, b in zip(mid, self.pre[i])]
            if min(mid, default=0) < 0:
                yield idx, None
                continue
            m2 = list(mid)
            for i in idx:
                m2 = [a + b for a, b in zip(m2, self.post[i])]
            m2 = tuple(m2)
            fired = set(idx)
            clk2 = []
            for k in range(len(self.T)):
                if not self._en(m2, k):
                    clk2.append(None)
                elif k not in fired and clk[k] is not None and self._en(mid, k):
                    clk2.append(clk[k])
                else:
                    clk2.append(0)
            yield idx, (m2, tuple(clk2))


def discrete_time_oracle(p: PTPN, horizon: Optional[int] = None, max_trace_len: int = 0,
                         max_states: int = 1_000_000):
    """Enumerate the unit-delay semantics up to ``horizon`` elapsed time units.

    Returns ``(markings, traces)``. ``horizon=None`` explores to a fixpoint.
    ``traces`` holds the visible traces (labels and ticks, silent moves
    hidden) of at most ``max_trace_len`` events; pass 0 to skip them.
    """
    sem = _Discrete(p)
    s0 = sem.initial()
    best = {s0: 0}
    dq = deque([(s0, 0)])
    while dq:
        s, t = dq.popleft()
        if best.get(s, t) < t:
            continue
        for _, s2 in sem.moves(s):
            if s2 not in best or best[s2] > t:
                best[s2] = t
                dq.appendleft((s2, t))
        if horizon is None or t + 1 <= horizon:
            s2 = sem.tick(s)
            if s2 is not None and (s2 not in best or best[s2] > t + 1):
                best[s2] = t + 1
                dq.append((s2, t + 1))
        if len(best) > max_states:
            raise RuntimeError("discrete oracle state space exceeded max_states")
    markings = {s[0] for s in best}
    traces = _traces(sem, s0, max_trace_len, horizon) if max_trace_len else set()
    return markings, traces


def fired_sets(p: PTPN, horizon: Optional[int] = None, max_states: int = 1_000_000) -> set:
    """Firing sets that fire at least once in the unit-delay semantics."""
    sem = _Discrete(p)
    names = {tuple(sorted(p.net.transition_index(t) for t in r)): r for r in p.relation}
    s0 = sem.initial()
    seen = {s0: 0}
    stack = [s0]
    fired = set()
    while stack:
        s = stack.pop()
        t = seen[s]
        succ = [(idx, s2, t) for idx, s2 in sem.moves_indexed(s)]
        if horizon is None or t + 1 <= horizon:
            s2 = sem.tick(s)
            if s2 is not None:
                succ.append((None, s2, t + 1))
        for idx, s2, t2 in succ:
            if idx is not None:
                fired.add(names[idx])
            if s2 not in seen or seen[s2] > t2:
                seen[s2] = t2
                stack.append(s2)
        if len(seen) > max_states:
            raise RuntimeError("discrete oracle state space exceeded max_states")
    return fired


def _eps_closure(sem, states):
    out = set(states)
    stack = list(states)
    while stack:
        s = stack.pop()
        for label, s2 in sem.moves(s):
            if label is None and s2 not in out:
                out.add(s2)
                stack.append(s2)
    return frozenset(out)


def _traces(sem, s0, max_len, horizon):
    start = _eps_closure(sem, [s0])
    traces = {()}
    level = {(): (start, 0)}
    for _ in range(max_len):
        nxt = {}
        for tr, (states, ticks) in level.items():
            succ = {}
            for s in states:
                for label, s2 in sem.moves(s):
                    if label is not None:
                        succ.setdefault(label, set()).add(s2)
                if horizon is None or ticks < horizon:
                    s2 = sem.tick(s)
                    if s2 is not None:
                        succ.setdefault(TICK, set()).add(s2)
            for ev, ss in succ.items():
                key = tr + (ev,)
                nxt[key] = (_eps_closure(sem, ss), ticks + (ev == TICK))
        traces.update(nxt)
        level = nxt
    return traces


def label_traces(p: PTPN, max_len: int, horizon: Optional[int] = None) -> set:
    """Visible timed traces (labels plus :data:`TICK`) of at most ``max_len`` events."""
    sem = _Discrete(p)
    return _traces(sem, sem.initial(), max_len, horizon)


def sync_traces(ta: set, tb: set, labels, alpha_a, alpha_b, max_len: int) -> set:
    """Synchronous product of two prefix-closed trace sets on ``labels``.

    Ticks always synchronise; a label in ``labels`` must be taken by both sides;
    any other label is taken by the side whose alphabet has it.
    """
    labels = set(labels)
    out = set()
    stack = [((), (), ())]
    seen = set()
    while stack:
        w, u, v = stack.pop()
        if (w, u, v) in seen:
            continue
        seen.add((w, u, v))
        out.add(w)
        if len(w) >= max_len:
            continue
        cand = {TICK} | set(alpha_a) | set(alpha_b)
        for ev in cand:
            if ev == TICK or ev in labels:
                if u + (ev,) in ta and v + (ev,) in tb:
                    stack.append((w + (ev,), u + (ev,), v + (ev,)))
                continue
            if ev in alpha_a and u + (ev,) in ta:
                stack.append((w + (ev,), u + (ev,), v))
            if ev in alpha_b and v + (ev,) in tb:
                stack.append((w + (ev,), u, v + (ev,)))
    return out
