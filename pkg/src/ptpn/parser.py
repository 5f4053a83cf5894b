"""Textual net format and composition manifests.

Net files are line oriented; ``#`` starts a comment::

    net twonet
    pl p0 (1)
    pl p1
    tr t0 : a [0,w[ p0 -> p1
    tr t1 [2,3] p1*2 -> p0
    sync t0 t1

Intervals are ``[a,b]``, ``]a,b]``, ``[a,b[`` or ``]a,b[`` where ``w`` stands
for infinity (only as ``...,w[``). Endpoints are naturals or fractions ``p/q``.
A transition without interval gets ``[0,w[``. Without ``sync`` lines every
transition forms its own singleton firing set; with them, the relation is
exactly the listed sets. A bare ``sync`` line declares an explicit relation
without adding a set, which is how an empty relation is written.

Manifests list components in composition order::

    component manager.tpn
    component factory.tpn
    component supplier0.tpn
    sync-labels SO_BAZ_S0 ACK_S0_BAZ

A ``sync-labels`` line sets the label set used when the preceding component is
folded into the product; without it the step synchronises on the shared
alphabet.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .errors import (
    DuplicateNameError,
    EmptyIntervalError,
    EmptyIntervalParseError,
    MissingComponentError,
    NegativeTokensError,
    NetError,
    NetSyntaxError,
    UnknownReferenceError,
)
from .model import DEFAULT_INTERVAL, PTPN, Net, TimeInterval, lift_to_ptpn

NAME = r"[A-Za-z0-9_][A-Za-z0-9_.'\-]*"
_TOKEN = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<interval>[\[\]][^\s\[\]]*[\[\]])
  | (?P<arrow>->)
  | (?P<colon>:)
  | (?P<count>\(\s*-?\d+\s*\))
  | (?P<arc>{NAME}(?:\*-?\d+)?)
  | (?P<bad>\S+)
    """,
    re.VERBOSE,
)
_NAME_RE = re.compile(rf"^{NAME}$")
_NUM = re.compile(r"^(\d+)(?:/(\d+))?$")


def _tokens(line: str, lineno: int, source):
    out = []
    for m in _TOKEN.finditer(line):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise NetSyntaxError(f"unexpected {m.group()!r}", lineno, m.start() + 1, source)
        out.append((kind, m.group(), m.start() + 1))
    return out


def _number(text, lineno, col, source) -> Fraction:
    m = _NUM.match(text)
    if not m:
        raise NetSyntaxError(f"bad interval endpoint {text!r}", lineno, col, source)
    if m.group(2) is not None and int(m.group(2)) == 0:
        raise NetSyntaxError("zero denominator", lineno, col, source)
    return Fraction(int(m.group(1)), int(m.group(2) or 1))


def parse_interval(text: str, lineno=None, col=None, source=None) -> TimeInterval:
    if len(text) < 5 or text[0] not in "[]" or text[-1] not in "[]":
        raise NetSyntaxError(f"bad interval {text!r}", lineno, col, source)
    lo_open = text[0] == "]"
    hi_open = text[-1] == "["
    body = text[1:-1]
    parts = body.split(",")
    if len(parts) != 2:
        raise NetSyntaxError(f"bad interval {text!r}", lineno, col, source)
    lo = _number(parts[0].strip(), lineno, col, source)
    hi_text = parts[1].strip()
    if hi_text == "w":
        if not hi_open:
            raise NetSyntaxError("infinite upper bound must be open (',w[')", lineno, col, source)
        hi = None
    else:
        hi = _number(hi_text, lineno, col, source)
    try:
        return TimeInterval.make(lo, hi, lo_open, hi_open)
    except EmptyIntervalError as e:
        raise EmptyIntervalParseError(str(e), lineno, col, source) from None


def format_interval(iv: TimeInterval) -> str:
    return str(iv)


def parse_net(text: str, source: Optional[str] = None) -> PTPN:
    """Parse the textual format into a PTPN; errors carry line and column."""
    name = None
    places: list = []
    marking: dict = {}
    trs: list = []  # (name, label, interval, ins, outs, lineno, col)
    syncs: list = []  # (members, lineno, col)
    seen_names: dict = {}
    explicit = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip("\r")
        if not line.strip():
            continue
        toks = _tokens(line, lineno, source)
        head_kind, head, head_col = toks[0]
        rest = toks[1:]
        if head == "net":
            if len(rest) != 1 or not _NAME_RE.match(rest[0][1]):
                raise NetSyntaxError("expected 'net <name>'", lineno, head_col, source)
            if name is not None:
                raise DuplicateNameError("second 'net' declaration", lineno, head_col, source)
            name = rest[0][1]
        elif head == "pl":
            if not rest or rest[0][0] != "arc" or "*" in rest[0][1] or len(rest) > 2:
                raise NetSyntaxError("expected 'pl <place> [(<tokens>)]'", lineno, head_col, source)
            p = rest[0][1]
            if ("pl", p) in seen_names:
                raise DuplicateNameError(f"place {p} declared twice", lineno, rest[0][2], source)
            seen_names[("pl", p)] = lineno
            tokens = 0
            if len(rest) == 2:
                if rest[1][0] != "count":
                    raise NetSyntaxError("expected '(<tokens>)'", lineno, rest[1][2], source)
                tokens = int(rest[1][1].strip("() "))
                if tokens < 0:
                    raise NegativeTokensError(f"place {p} has {tokens} tokens", lineno, rest[1][2], source)
            places.append(p)
            marking[p] = tokens
        elif head == "tr":
            trs.append(_parse_tr(rest, lineno, head_col, source, seen_names))
        elif head == "sync":
            if not rest:
                explicit = True  # bare 'sync': the relation is exactly the listed sets, maybe none
                continue
            if any(k != "arc" or "*" in v for k, v, _ in rest):
                raise NetSyntaxError("expected 'sync <t1> <t2> ...'", lineno, head_col, source)
            syncs.append(([v for _, v, _ in rest], lineno, rest[0][2]))
        else:
            raise NetSyntaxError(f"unknown declaration {head!r}", lineno, head_col, source)

    if name is None:
        name = "net"
    place_set = set(places)
    pre, post, intervals, labels = {}, {}, {}, {}
    for tname, label, iv, ins, outs, lineno, _col in trs:
        for side, table in ((ins, pre), (outs, post)):
            row = table.setdefault(tname, {})
            for p, w, col in side:
                if p not in place_set:
                    raise UnknownReferenceError(f"undeclared place {p}", lineno, col, source)
                row[p] = row.get(p, 0) + w
        intervals[tname] = iv
        labels[tname] = label
    tnames = [t[0] for t in trs]
    try:
        net = Net(name, tuple(places), tuple(tnames), pre, post, marking, intervals, labels)
    except NetError as e:
        raise NetSyntaxError(str(e), None, None, source) from None

    if not syncs and not explicit:
        return lift_to_ptpn(net)
    rel = []
    tset = set(tnames)
    for members, lineno, col in syncs:
        for t in members:
            if t not in tset:
                raise UnknownReferenceError(f"undeclared transition {t}", lineno, col, source)
        if len(set(members)) != len(members):
            raise DuplicateNameError("transition repeated in a sync set", lineno, col, source)
        rel.append(frozenset(members))
    try:
        return PTPN(net, tuple(rel))
    except NetError as e:
        raise NetSyntaxError(str(e), syncs[0][1], None, source) from None


def _parse_tr(rest, lineno, head_col, source, seen_names):
    if not rest or rest[0][0] != "arc" or "*" in rest[0][1]:
        raise NetSyntaxError("expected 'tr <name> ...'", lineno, head_col, source)
    tname = rest[0][1]
    if ("tr", tname) in seen_names:
        raise DuplicateNameError(f"transition {tname} declared twice", lineno, rest[0][2], source)
    seen_names[("tr", tname)] = lineno
    i = 1
    label = None
    if i < len(rest) and rest[i][0] == "colon":
        if i + 1 >= len(rest) or rest[i + 1][0] != "arc" or "*" in rest[i + 1][1]:
            raise NetSyntaxError("expected a label after ':'", lineno, rest[i][2], source)
        label = rest[i + 1][1]
        i += 2
    iv = DEFAULT_INTERVAL
    if i < len(rest) and rest[i][0] == "interval":
        iv = parse_interval(rest[i][1], lineno, rest[i][2], source)
        i += 1
    ins, outs = [], []
    side = ins
    arrows = 0
    for kind, val, col in rest[i:]:
        if kind == "arrow":
            arrows += 1
            if arrows > 1:
                raise NetSyntaxError("second '->'", lineno, col, source)
            side = outs
            continue
        if kind != "arc":
            raise NetSyntaxError(f"unexpected {val!r}", lineno, col, source)
        p, _, w = val.partition("*")
        weight = int(w) if w else 1
        if weight <= 0:
            raise NetSyntaxError(f"arc weight must be positive, got {weight}", lineno, col, source)
        side.append((p, weight, col))
    if arrows != 1:
        raise NetSyntaxError("transition needs exactly one '->'", lineno, head_col, source)
    return tname, label, iv, ins, outs, lineno, head_col


def _arcs(row: dict, order) -> str:
    parts = []
    for p in order:
        w = row.get(p)
        if w:
            parts.append(p if w == 1 else f"{p}*{w}")
    return " ".join(parts)


def serialize_net(ptpn: PTPN) -> str:
    net = ptpn.net
    lines = [f"net {net.name}"]
    for p, k in zip(net.places, net.m0):
        lines.append(f"pl {p} ({k})" if k else f"pl {p}")
    for t in net.transitions:
        parts = ["tr", t]
        if net.labels[t] is not None:
            parts += [":", net.labels[t]]
        iv = net.intervals[t]
        if not iv.is_default():
            parts.append(str(iv))
        ins = _arcs(net.pre[t], net.places)
        outs = _arcs(net.post[t], net.places)
        if ins:
            parts.append(ins)
        parts.append("->")
        if outs:
            parts.append(outs)
        lines.append(" ".join(parts))
    if ptpn.relation != lift_to_ptpn(net).relation:
        if not ptpn.relation:
            lines.append("sync")
        for r in ptpn.relation:
            members = sorted(r, key=net.transition_index)
            lines.append("sync " + " ".join(members))
    return "\n".join(lines) + "\n"


def _read_text(path: Path) -> str:
    data = path.read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data[:e.start].count(b"\n") + 1
        raise NetSyntaxError("input is not valid UTF-8", line, None, str(path)) from None


def load_net(path) -> PTPN:
    path = Path(path)
    return parse_net(_read_text(path), source=str(path))


@dataclass(frozen=True)
class CompositionManifest:
    """Ordered components and, per fold step, an explicit label set or ``None``.

    ``sync[0]`` is always ``None`` (the first component has no step).
    ``nets`` optionally carries in-memory components keyed by their entry in
    ``components``; entries missing from it are read from ``base_dir``.
    """

    components: tuple
    sync: tuple
    nets: dict = field(default_factory=dict, compare=False)
    base_dir: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.components:
            raise MissingComponentError("manifest lists no component")
        if len(self.sync) != len(self.components) or self.sync[0] is not None:
            raise ValueError("sync must hold one entry per component, None first")

    def load(self, i: int) -> PTPN:
        key = self.components[i]
        if key in self.nets:
            return self.nets[key]
        path = Path(key)
        if self.base_dir is not None and not path.is_absolute():
            path = Path(self.base_dir) / path
        if not path.exists():
            raise MissingComponentError(f"component file {path} not found")
        return load_net(path)


def parse_manifest(text: str, source: Optional[str] = None, base_dir=None) -> CompositionManifest:
    components: list = []
    sync: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        col = raw.index(head) + 1
        if head == "component":
            if len(args) != 1:
                raise NetSyntaxError("expected 'component <path>'", lineno, col, source)
            components.append(args[0])
            sync.append(None)
        elif head == "sync-labels":
            if not components:
                raise NetSyntaxError("'sync-labels' before any component", lineno, col, source)
            if len(components) == 1:
                raise NetSyntaxError("the first component has no composition step", lineno, col, source)
            if sync[-1] is not None:
                raise DuplicateNameError("second 'sync-labels' for one step", lineno, col, source)
            for a in args:
                if not _NAME_RE.match(a):
                    raise NetSyntaxError(f"bad label {a!r}", lineno, col, source)
            sync[-1] = frozenset(args)
        else:
            raise NetSyntaxError(f"unknown directive {head!r}", lineno, col, source)
    if not components:
        raise MissingComponentError("manifest lists no component", None, None, source)
    return CompositionManifest(tuple(components), tuple(sync), base_dir=base_dir)


def serialize_manifest(manifest: CompositionManifest) -> str:
    lines = []
    for comp, labels in zip(manifest.components, manifest.sync):
        lines.append(f"component {comp}")
        if labels is not None:
            lines.append(" ".join(["sync-labels", *sorted(labels)]))
    return "\n".join(lines) + "\n"


def load_manifest(path) -> CompositionManifest:
    path = Path(path)
    return parse_manifest(_read_text(path), source=str(path), base_dir=str(path.parent))
