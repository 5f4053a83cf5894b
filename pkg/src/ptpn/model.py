"""Nets, intervals, markings and product relations.

Values here are immutable once built. Markings are plain tuples of token
counts aligned with ``Net.places``; every public function also accepts a
``{place: tokens}`` mapping and normalises it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import EmptyIntervalError, NetError, NotEnabledError, UnknownTransitionError

Number = Union[int, Fraction, str]


def _frac(x: Number) -> Fraction:
    if isinstance(x, float):
        raise TypeError("bounds must be exact rationals, not floats")
    return Fraction(x)


@dataclass(frozen=True)
class Bound:
    """An upper bound ``<= value`` (or ``< value`` when strict); ``value=None`` is +inf."""

    value: Optional[Fraction]
    strict: bool = False

    def __post_init__(self):
        if self.value is not None:
            object.__setattr__(self, "value", _frac(self.value))
        elif self.strict:
            object.__setattr__(self, "strict", True)

    @classmethod
    def inf(cls) -> "Bound":
        return cls(None, True)

    @classmethod
    def le(cls, value: Number) -> "Bound":
        return cls(_frac(value), False)

    @classmethod
    def lt(cls, value: Number) -> "Bound":
        return cls(_frac(value), True)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def _key(self):
        if self.value is None:
            return (1, Fraction(0), 0)
        return (0, self.value, 0 if self.strict else 1)

    def __lt__(self, other: "Bound") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "Bound") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "Bound") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "Bound") -> bool:
        return self._key() >= other._key()

    def __add__(self, other: "Bound") -> "Bound":
        if self.value is None or other.value is None:
            return Bound.inf()
        return Bound(self.value + other.value, self.strict or other.strict)

    def __str__(self):
        if self.value is None:
            return "<inf"
        return f"{'<' if self.strict else '<='}{self.value}"


ZERO = Bound.le(0)
INF = Bound.inf()


@dataclass(frozen=True)
class TimeInterval:
    """Static firing interval; ``lower.strict`` marks an open left end."""

    lower: Bound
    upper: Bound

    def __post_init__(self):
        lo, hi = self.lower, self.upper
        if lo.value is None:
            raise EmptyIntervalError("lower endpoint must be finite")
        if lo.value < 0:
            raise EmptyIntervalError(f"negative lower endpoint {lo.value}")
        if hi.value is not None:
            if lo.value > hi.value:
                raise EmptyIntervalError(f"lower endpoint {lo.value} exceeds upper {hi.value}")
            if lo.value == hi.value and (lo.strict or hi.strict):
                raise EmptyIntervalError(f"degenerate interval at {lo.value} with an open end")

    @classmethod
    def closed(cls, lo: Number, hi: Optional[Number] = None) -> "TimeInterval":
        upper = INF if hi is None else Bound.le(hi)
        return cls(Bound.le(lo), upper)

    @classmethod
    def make(cls, lo: Number, hi: Optional[Number], lo_open=False, hi_open=False) -> "TimeInterval":
        upper = INF if hi is None else Bound(_frac(hi), hi_open)
        return cls(Bound(_frac(lo), lo_open), upper)

    @property
    def lo(self) -> Fraction:
        return self.lower.value

    @property
    def hi(self) -> Optional[Fraction]:
        return self.upper.value

    def is_default(self) -> bool:
        return self == DEFAULT_INTERVAL

    def is_closed_integer(self) -> bool:
        if self.lower.strict or self.lo.denominator != 1:
            return False
        if self.hi is None:
            return True
        return not self.upper.strict and self.hi.denominator == 1

    def contains(self, x: Fraction) -> bool:
        if x < self.lo or (self.lower.strict and x == self.lo):
            return False
        if self.hi is None:
            return True
        return x < self.hi or (x == self.hi and not self.upper.strict)

    def __str__(self):
        left = "]" if self.lower.strict else "["
        if self.hi is None:
            return f"{left}{self.lo},w["
        right = "[" if self.upper.strict else "]"
        return f"{left}{self.lo},{self.hi}{right}"


DEFAULT_INTERVAL = TimeInterval(Bound.le(0), INF)


Marking = tuple


@dataclass(frozen=True, eq=True)
class Net:
    """A time Petri net. ``labels[t] is None`` means the silent label."""

    name: str
    places: tuple
    transitions: tuple
    pre: dict
    post: dict
    m0: tuple
    intervals: dict
    labels: dict
    _pidx: dict = field(default=None, compare=False, repr=False)
    _tidx: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        places = tuple(self.places)
        transitions = tuple(self.transitions)
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", transitions)
        if len(set(places)) != len(places):
            raise NetError("duplicate place name")
        if len(set(transitions)) != len(transitions):
            raise NetError("duplicate transition name")
        pidx = {p: i for i, p in enumerate(places)}
        tidx = {t: i for i, t in enumerate(transitions)}
        object.__setattr__(self, "_pidx", pidx)
        object.__setattr__(self, "_tidx", tidx)

        def arcs(table, what):
            out = {}
            for t in transitions:
                row = {}
                for p, w in dict(table.get(t, {})).items():
                    if p not in pidx:
                        raise NetError(f"{what} arc of {t} references unknown place {p}")
                    if int(w) != w or w < 0:
                        raise NetError(f"arc weight {w} on {t}/{p} is not a natural number")
                    if w:
                        row[p] = int(w)
                out[t] = row
            for t in table:
                if t not in tidx:
                    raise NetError(f"{what} arcs reference unknown transition {t}")
            return out

        object.__setattr__(self, "pre", arcs(self.pre, "input"))
        object.__setattr__(self, "post", arcs(self.post, "output"))

        m0 = self.m0
        if isinstance(m0, Mapping):
            for p in m0:
                if p not in pidx:
                    raise NetError(f"initial marking references unknown place {p}")
            m0 = tuple(int(m0.get(p, 0)) for p in places)
        m0 = tuple(m0)
        if len(m0) != len(places) or any(k < 0 for k in m0):
            raise NetError("initial marking must give a non-negative count per place")
        object.__setattr__(self, "m0", m0)

        intervals = {t: dict(self.intervals).get(t, DEFAULT_INTERVAL) for t in transitions}
        labels = {t: dict(self.labels).get(t) for t in transitions}
        for t in list(self.intervals) + list(self.labels):
            if t not in tidx:
                raise NetError(f"unknown transition {t}")
        object.__setattr__(self, "intervals", intervals)
        object.__setattr__(self, "labels", labels)

    def __hash__(self):
        return hash((self.name, self.places, self.transitions, self.m0))

    @property
    def alphabet(self) -> frozenset:
        return frozenset(l for l in self.labels.values() if l is not None)

    def place_index(self, p: str) -> int:
        return self._pidx[p]

    def transition_index(self, t: str) -> int:
        try:
            return self._tidx[t]
        except KeyError:
            raise UnknownTransitionError(t) from None

    def as_marking(self, m) -> tuple:
        if isinstance(m, Mapping):
            unknown = set(m) - set(self._pidx)
            if unknown:
                raise NetError(f"marking references unknown places {sorted(unknown)}")
            return tuple(int(m.get(p, 0)) for p in self.places)
        m = tuple(m)
        if len(m) != len(self.places):
            raise NetError("marking length does not match the place count")
        return m

    def marking_dict(self, m, nonzero=True) -> dict:
        m = self.as_marking(m)
        return {p: k for p, k in zip(self.places, m) if k or not nonzero}

    def is_enabled(self, t: str, m) -> bool:
        m = self.as_marking(m)
        pidx = self._pidx
        return all(m[pidx[p]] >= w for p, w in self.pre[t].items())


def make_net(name, places, transitions, m0=None, intervals=None, labels=None) -> Net:
    """Convenience builder.

    ``transitions`` maps a transition name to ``(inputs, outputs)`` where each
    side is an iterable of place names or a ``{place: weight}`` mapping.
    """

    def side(x):
        if isinstance(x, Mapping):
            return dict(x)
        out = {}
        for p in x:
            out[p] = out.get(p, 0) + 1
        return out

    pre, post = {}, {}
    for t, (ins, outs) in transitions.items():
        pre[t] = side(ins)
        post[t] = side(outs)
    return Net(
        name=name,
        places=tuple(places),
        transitions=tuple(transitions),
        pre=pre,
        post=post,
        m0=dict(m0 or {}),
        intervals=dict(intervals or {}),
        labels=dict(labels or {}),
    )


def _set_order_key(net: Net, r: frozenset):
    idx = sorted(net.transition_index(t) for t in r)
    return (idx[0], len(idx), idx)


@dataclass(frozen=True)
class PTPN:
    """A net together with its product relation (ordered canonically)."""

    net: Net
    relation: tuple

    def __post_init__(self):
        rel = []
        seen = set()
        for r in self.relation:
            r = frozenset(r)
            if r in seen:
                continue
            seen.add(r)
            problem = validate_firing_set(self.net, r)
            if problem is not None:
                raise NetError(f"invalid firing set {sorted(r)}: {problem}")
            rel.append(r)
        rel.sort(key=lambda r: _set_order_key(self.net, r))
        object.__setattr__(self, "relation", tuple(rel))

    def set_label(self, r: frozenset) -> Optional[str]:
        return firing_set_label(self.net, r)

    @property
    def alphabet(self) -> frozenset:
        return self.net.alphabet


def firing_set_label(net: Net, r: Iterable[str]) -> Optional[str]:
    for t in r:
        return net.labels[t]
    return None


@dataclass(frozen=True)
class Violation:
    reason: str  # "LabelMismatch" | "SharedInputPlace" | "Empty"
    members: tuple
    place: Optional[str] = None

    def __str__(self):
        if self.reason == "SharedInputPlace":
            return f"SharedInputPlace({self.place}) between {', '.join(self.members)}"
        if self.reason == "Empty":
            return "Empty firing set"
        return f"LabelMismatch({', '.join(self.members)})"


def validate_firing_set(net: Net, r: Iterable[str]) -> Optional[Violation]:
    """Return ``None`` when ``r`` is a legal firing set, else the first violation.

    Members are inspected in net order so the report does not depend on how the
    caller ordered ``r``.
    """
    members = sorted(set(r), key=net.transition_index)
    if not members:
        return Violation("Empty", ())
    for i, t1 in enumerate(members):
        for t2 in members[i + 1:]:
            if net.labels[t1] != net.labels[t2]:
                return Violation("LabelMismatch", (t1, t2))
            for p in net.places:
                if net.pre[t1].get(p, 0) > 0 and net.pre[t2].get(p, 0) > 0:
                    return Violation("SharedInputPlace", (t1, t2), p)
    return None


def lift_to_ptpn(net: Net) -> PTPN:
    return PTPN(net, tuple(frozenset([t]) for t in net.transitions))


def enabled_set(net: Net, m) -> frozenset:
    m = net.as_marking(m)
    return frozenset(t for t in net.transitions if net.is_enabled(t, m))


def fire_firing_set(net: Net, m, r: Iterable[str]):
    """Fire all members of ``r`` at once.

    Returns ``(m2, persistent, newly_enabled)``. A transition outside ``r`` is
    persistent when the intermediate marking ``m - sum(Pre)`` still enables it.
    """
    m = list(net.as_marking(m))
    r = list(r)
    pidx = net._pidx
    for t in r:
        net.transition_index(t)
    mid = list(m)
    for t in r:
        for p, w in net.pre[t].items():
            mid[pidx[p]] -= w
    if any(k < 0 for k in mid) or not all(net.is_enabled(t, m) for t in r):
        missing = [t for t in r if not net.is_enabled(t, m)]
        raise NotEnabledError(f"not enabled: {', '.join(missing) or 'joint input exceeds marking'}")
    m2 = list(mid)
    for t in r:
        for p, w in net.post[t].items():
            m2[pidx[p]] += w
    m2 = tuple(m2)
    members = set(r)
    persistent = frozenset(
        k for k in net.transitions
        if k not in members and net.is_enabled(k, mid) and net.is_enabled(k, m2)
    )
    newly = enabled_set(net, m2) - persistent
    return m2, persistent, newly
