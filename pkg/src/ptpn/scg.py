"""State class graph of a PTPN.

A class is a marking plus a closed DBM over the transitions enabled at that
marking (variable 0 is "now"). Firing a set ``r`` requires the members to be
able to fire at one common instant that no other enabled transition's deadline
precedes; the successor domain is obtained by shifting the clock to that
instant, projecting away fired and disabled transitions and adding the static
intervals of newly enabled ones.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import dbm as D
from .errors import NotFirableError
from .model import PTPN


class _Compiled:
    """Index-based view of a PTPN used by the exploration hot loop."""

    def __init__(self, p: PTPN):
        net = p.net
        self.ptpn = p
        self.net = net
        nP, nT = len(net.places), len(net.transitions)
        self.pre = np.zeros((nT, nP), dtype=np.int64)
        self.post = np.zeros((nT, nP), dtype=np.int64)
        for ti, t in enumerate(net.transitions):
            for pl, w in net.pre[t].items():
                self.pre[ti, net.place_index(pl)] = w
            for pl, w in net.post[t].items():
                self.post[ti, net.place_index(pl)] = w
        ivs = [net.intervals[t] for t in net.transitions]
        values = [iv.lo for iv in ivs] + [iv.hi for iv in ivs]
        self.scale = D.scale_for(values)
        # encoded "x_t <= hi" and "-x_t <= -lo"
        self.hi = [D.encode(iv.upper, self.scale) for iv in ivs]
        self.neglo = [D.encode(type(iv.lower)(-iv.lo, iv.lower.strict), self.scale) for iv in ivs]
        self.sets = []
        for r in p.relation:
            idx = tuple(sorted(net.transition_index(t) for t in r))
            self.sets.append((idx, r, p.set_label(r)))
        self.set_index = {r: i for i, (_, r, _) in enumerate(self.sets)}

    def enabled(self, m: tuple) -> tuple:
        mv = np.asarray(m, dtype=np.int64)
        return tuple(np.flatnonzero((self.pre <= mv).all(axis=1)).tolist())


@lru_cache(maxsize=64)
def _compile(p: PTPN) -> _Compiled:
    return _Compiled(p)


@dataclass(frozen=True, eq=False)
class StateClass:
    marking: tuple
    enabled: tuple  # transition indices, increasing; DBM variable k+1 is enabled[k]
    raw: np.ndarray = field(repr=False)
    scale: int = 1

    @property
    def key(self):
        return (self.marking, self.raw.tobytes())

    def __eq__(self, other):
        return isinstance(other, StateClass) and class_equal(self, other)

    def __hash__(self):
        return hash(self.key)

    def domain(self, net) -> D.DBM:
        names = ["0"] + [net.transitions[i] for i in self.enabled]
        return D.DBM(names, self.raw.copy(), self.scale)

    def enabled_names(self, net) -> tuple:
        return tuple(net.transitions[i] for i in self.enabled)


def class_equal(a: StateClass, b: StateClass) -> bool:
    return (
        a.marking == b.marking
        and a.enabled == b.enabled
        and a.scale == b.scale
        and np.array_equal(a.raw, b.raw)
    )


def _extend(c: _Compiled, base: np.ndarray, old: list, new: list):
    """Append newly enabled transitions (static bounds only) to a closed matrix.

    ``old`` lists the transition indices already present (rows 1..), ``new``
    those being added. Returns ``(enabled, matrix)`` with variables in
    increasing transition order.
    """
    k_old = base.shape[0]
    n = k_old + len(new)
    m = np.empty((n, n), dtype=np.int64)
    m[:k_old, :k_old] = base
    if new:
        hi = np.array([c.hi[t] for t in new], dtype=np.int64)
        nlo = np.array([c.neglo[t] for t in new], dtype=np.int64)
        m[k_old:, 0] = hi
        m[0, k_old:] = nlo
        m[k_old:, 1:k_old] = D.add(hi[:, None], base[0:1, 1:k_old])
        m[1:k_old, k_old:] = D.add(base[1:k_old, 0:1], nlo[None, :])
        m[k_old:, k_old:] = D.add(hi[:, None], nlo[None, :])
        idx = np.arange(k_old, n)
        m[idx, idx] = D.LE_ZERO
    order = old + new
    if new and old and max(old) > min(new):
        perm = [0] + [1 + i for i in sorted(range(len(order)), key=order.__getitem__)]
        m = m[np.ix_(perm, perm)]
        order = sorted(order)
    return tuple(order), m


def _initial(c: _Compiled) -> StateClass:
    m0 = c.net.m0
    en, m = _extend(c, np.full((1, 1), D.LE_ZERO, dtype=np.int64), [], list(c.enabled(m0)))
    m.setflags(write=False)
    return StateClass(m0, en, m, c.scale)


def initial_class(p: PTPN) -> StateClass:
    return _initial(_compile(p))


def _firing_domain(cls: StateClass, members: tuple) -> Optional[np.ndarray]:
    """Domain restricted to runs where ``members`` fire together first, or None."""
    pos_of = {t: k + 1 for k, t in enumerate(cls.enabled)}
    try:
        pos = [pos_of[t] for t in members]
    except KeyError:
        return None
    m = cls.raw
    t = pos[0]
    for u in pos[1:]:
        m = D.constrain(m, t, u, D.LE_ZERO)
        if m is None:
            return None
        m = D.constrain(m, u, t, D.LE_ZERO)
        if m is None:
            return None
    # x_t <= x_k for every enabled k
    col_min = m[1:, :].min(axis=0)
    if col_min[t] < D.LE_ZERO:
        return None
    return np.minimum(m, D.add(m[:, t:t + 1], col_min[None, :]))


def _firable(c: _Compiled, cls: StateClass):
    en = set(cls.enabled)
    out = []
    for si, (idx, r, label) in enumerate(c.sets):
        if not en.issuperset(idx):
            continue
        fd = _firing_domain(cls, idx)
        if fd is not None:
            out.append((si, fd))
    return out


def firable_firing_sets(cls: StateClass, p: PTPN) -> list:
    c = _compile(p)
    return [c.sets[si][1] for si, _ in _firable(c, cls)]


def _successor(c: _Compiled, cls: StateClass, si: int, fd: np.ndarray) -> StateClass:
    idx = c.sets[si][0]
    m = np.asarray(cls.marking, dtype=np.int64)
    consumed = c.pre[list(idx)].sum(axis=0)
    mid = m - consumed
    m2 = mid + c.post[list(idx)].sum(axis=0)
    fired = set(idx)
    en2 = c.enabled(tuple(m2.tolist()))
    persistent = [t for t in cls.enabled if t not in fired and (c.pre[t] <= mid).all() and t in en2]
    pset = set(persistent)
    newly = [t for t in en2 if t not in pset]
    pos_of = {t: k + 1 for k, t in enumerate(cls.enabled)}
    keep = [pos_of[idx[0]]] + [pos_of[t] for t in persistent]
    base = fd[np.ix_(keep, keep)]
    en, mat = _extend(c, base, persistent, newly)
    mat.setflags(write=False)
    return StateClass(tuple(m2.tolist()), en, mat, c.scale)


def successor_class(cls: StateClass, r, p: PTPN) -> StateClass:
    c = _compile(p)
    r = frozenset(r)
    si = c.set_index.get(r)
    if si is None:
        raise NotFirableError(f"{sorted(r)} is not a firing set of the net")
    fd = _firing_domain(cls, c.sets[si][0])
    if fd is None:
        raise NotFirableError(f"{sorted(r)} cannot fire from this class")
    return _successor(c, cls, si, fd)


@dataclass(frozen=True)
class Edge:
    src: int
    firing_set: frozenset
    label: Optional[str]
    dst: int


@dataclass
class SCGraph:
    """Explored class graph. ``complete`` is False when a limit stopped the search,
    in which case ``frontier`` holds the indices of unexpanded classes."""

    ptpn: PTPN
    classes: list
    edges: list
    complete: bool = True
    frontier: list = field(default_factory=list)
    elapsed: float = 0.0
    stop_reason: Optional[str] = None

    def __post_init__(self):
        self._out = None

    @property
    def partial(self) -> bool:
        return not self.complete

    def successors(self, i: int) -> list:
        if self._out is None or len(self._out) != len(self.classes):
            out = [[] for _ in self.classes]
            for e in self.edges:
                out[e.src].append(e)
            self._out = out
        return self._out[i]

    def stats(self) -> dict:
        return {
            "classes": len(self.classes),
            "markings": len({c.marking for c in self.classes}),
            "domains": len({(c.enabled, c.raw.tobytes()) for c in self.classes}),
            "edges": len(self.edges),
        }

    def markings(self) -> set:
        return {c.marking for c in self.classes}


def build_scg(p: PTPN, max_classes: Optional[int] = None, time_budget: Optional[float] = None,
              order: str = "bfs") -> SCGraph:
    """Explore the class graph from the initial class.

    Stops early, returning a graph with ``complete=False``, once more than
    ``max_classes`` classes are known or ``time_budget`` seconds have passed.
    """
    if order not in ("bfs", "dfs"):
        raise ValueError("order must be 'bfs' or 'dfs'")
    c = _compile(p)
    start = time.perf_counter()
    init = _initial(c)
    classes = [init]
    index = {init.key: 0}
    edges = []
    work = deque([0])
    pop = work.popleft if order == "bfs" else work.pop
    stop = None
    while work:
        if max_classes is not None and len(classes) > max_classes:
            stop = "max_classes"
            break
        if time_budget is not None and time.perf_counter() - start > time_budget:
            stop = "time_budget"
            break
        i = pop()
        cls = classes[i]
        for si, fd in _firable(c, cls):
            nxt = _successor(c, cls, si, fd)
            j = index.get(nxt.key)
            if j is None:
                j = len(classes)
                index[nxt.key] = j
                classes.append(nxt)
                work.append(j)
            _, r, label = c.sets[si]
            edges.append(Edge(i, r, label, j))
    g = SCGraph(p, classes, edges, complete=stop is None, frontier=sorted(work),
                elapsed=time.perf_counter() - start, stop_reason=stop)
    return g
