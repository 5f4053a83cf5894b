"""Synchronous product of PTPNs: juxtapose the nets, compose the relations."""

from __future__ import annotations

import logging
from typing import Iterable, Optional

from .errors import ProductError
from .model import PTPN, Net, firing_set_label, validate_firing_set
from .parser import CompositionManifest

log = logging.getLogger(__name__)


def _renaming(names_a, names_b, force_a=(), force_b=()):
    """Suffix ``.1``/``.2`` onto clashing names and onto the forced ones."""
    clash = set(names_a) & set(names_b)
    ra = {n: (f"{n}.1" if n in clash or n in force_a else n) for n in names_a}
    rb = {n: (f"{n}.2" if n in clash or n in force_b else n) for n in names_b}
    taken = set(ra.values())
    for n, new in list(rb.items()):
        # a suffixed name may still hit a literal name of the other side
        while new in taken:
            new += ".2"
        rb[n] = new
        taken.add(new)
    return ra, rb


def _rename_net(net: Net, pmap, tmap, name) -> dict:
    return dict(
        places=[pmap[p] for p in net.places],
        transitions=[tmap[t] for t in net.transitions],
        pre={tmap[t]: {pmap[p]: w for p, w in row.items()} for t, row in net.pre.items()},
        post={tmap[t]: {pmap[p]: w for p, w in row.items()} for t, row in net.post.items()},
        m0={pmap[p]: k for p, k in zip(net.places, net.m0)},
        intervals={tmap[t]: iv for t, iv in net.intervals.items()},
        labels={tmap[t]: l for t, l in net.labels.items()},
    )


def dropped_sets(a: PTPN, b: PTPN, labels: Iterable[str]) -> list:
    """Firing sets of either operand whose label is synchronised but has no partner."""
    labels = set(labels)
    out = []
    for own, other in ((a, b), (b, a)):
        other_labels = {other.set_label(r) for r in other.relation}
        for r in own.relation:
            l = own.set_label(r)
            if l is not None and l in labels and l not in other_labels:
                out.append(r)
    return out


def binary_product(a: PTPN, b: PTPN, labels: Optional[Iterable[str]] = None, name=None) -> PTPN:
    """Product of ``a`` and ``b`` synchronised on ``labels``.

    ``labels=None`` means the shared alphabet. Transitions that take part in
    synchronisation, and any name that clashes between the operands, get a
    ``.1``/``.2`` suffix. A synchronised label present in only one operand
    contributes nothing: its firing sets are dropped.
    """
    if not isinstance(a, PTPN) or not isinstance(b, PTPN):
        raise ProductError("operands must be PTPN instances")
    L = frozenset(a.alphabet & b.alphabet if labels is None else labels)
    na, nb = a.net, b.net
    ta, tb = _renaming(
        na.transitions,
        nb.transitions,
        force_a=[t for t in na.transitions if na.labels[t] in L],
        force_b=[t for t in nb.transitions if nb.labels[t] in L],
    )
    pa, pb = _renaming(na.places, nb.places)
    da = _rename_net(na, pa, ta, na.name)
    db = _rename_net(nb, pb, tb, nb.name)
    net = Net(
        name=name or f"{na.name}_x_{nb.name}",
        places=tuple(da["places"] + db["places"]),
        transitions=tuple(da["transitions"] + db["transitions"]),
        pre={**da["pre"], **db["pre"]},
        post={**da["post"], **db["post"]},
        m0={**da["m0"], **db["m0"]},
        intervals={**da["intervals"], **db["intervals"]},
        labels={**da["labels"], **db["labels"]},
    )

    rel = []
    for r1 in a.relation:
        l1 = a.set_label(r1)
        if l1 is None or l1 not in L:
            rel.append(frozenset(ta[t] for t in r1))
            continue
        for r2 in b.relation:
            if b.set_label(r2) == l1:
                rel.append(frozenset(ta[t] for t in r1) | frozenset(tb[t] for t in r2))
    for r2 in b.relation:
        l2 = b.set_label(r2)
        if l2 is None or l2 not in L:
            rel.append(frozenset(tb[t] for t in r2))

    for r in rel:
        problem = validate_firing_set(net, r)
        if problem is not None:
            raise ProductError(f"product produced an invalid firing set: {problem}")
    lost = dropped_sets(a, b, L)
    if lost:
        log.warning(
            "dropping %d firing set(s) with unmatched synchronised labels: %s",
            len(lost),
            "; ".join(f"{sorted(r)}:{firing_set_label(a.net if r <= set(na.transitions) else nb.net, r)}" for r in lost),
        )
    return PTPN(net, tuple(rel))


def chain_product(manifest: CompositionManifest, name=None) -> PTPN:
    """Left fold of :func:`binary_product` in manifest order."""
    acc = manifest.load(0)
    for i in range(1, len(manifest.components)):
        nxt = manifest.load(i)
        labels = manifest.sync[i]
        if labels is not None:
            missing = {l for l in labels if l not in acc.alphabet or l not in nxt.alphabet}
            if missing:
                raise ProductError(
                    f"step {i} ({manifest.components[i]}): labels {sorted(missing)} "
                    "are not in both operands' alphabets"
                )
        acc = binary_product(acc, nxt, labels)
    if name is not None:
        net = acc.net
        acc = PTPN(Net(name, net.places, net.transitions, net.pre, net.post, net.m0,
                       net.intervals, net.labels), acc.relation)
    return acc
