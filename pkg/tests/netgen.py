"""Random net generators shared by the property tests and the acceptance run."""

import random
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from ptpn import PTPN, TimeInterval, lift_to_ptpn, make_net, validate_firing_set

FIXTURES = Path(__file__).parent / "fixtures"


def closed_integer_net(rng: random.Random, name="r", max_places=4, max_transitions=4,
                       max_bound=5, labels=(None, "a", "b"), prefix=""):
    """Small bounded net with closed integer intervals (oracle-friendly).

    Every transition consumes at least as many tokens as it produces, so the
    token count never grows and the state space stays finite.
    """
    nP = rng.randint(1, max_places)
    nT = rng.randint(1, max_transitions)
    places = [f"{prefix}p{i}" for i in range(nP)]
    trs, ivs, lab = {}, {}, {}
    for j in range(nT):
        t = f"{prefix}t{j}"
        ins = rng.sample(places, rng.randint(1, min(2, nP)))
        outs = rng.sample(places, rng.randint(0, len(ins)))
        trs[t] = (ins, outs)
        lo = rng.randint(0, max_bound)
        hi = rng.randint(lo, max_bound)
        ivs[t] = TimeInterval.closed(lo, hi)
        lab[t] = rng.choice(labels)
    m0 = {p: rng.randint(0, 2) for p in places}
    if not any(m0.values()):
        m0[places[0]] = 1
    return lift_to_ptpn(make_net(name, places, trs, m0, ivs, lab))


def _rand_interval(rng):
    lo = Fraction(rng.randint(0, 12), rng.choice([1, 1, 2, 3]))
    if rng.random() < 0.3:
        return TimeInterval.make(lo, None, lo_open=rng.random() < 0.3)
    hi = lo + Fraction(rng.randint(0, 12), rng.choice([1, 2, 5]))
    if hi == lo:
        return TimeInterval.make(lo, hi)
    return TimeInterval.make(lo, hi, rng.random() < 0.3, rng.random() < 0.3)


def arbitrary_net(rng: random.Random, idx=0):
    """Anything the format can express: weights, fractions, open bounds, sync sets."""
    nP = rng.randint(0, 5)
    nT = rng.randint(0, 5) if nP else 0
    places = [f"p{i}" for i in range(nP)]
    trs, ivs, lab = {}, {}, {}
    for j in range(nT):
        t = f"t{j}" if rng.random() < 0.8 else f"t_{j}.{rng.randint(1, 2)}"
        ins = {p: rng.randint(1, 3) for p in rng.sample(places, rng.randint(0, nP))}
        outs = {p: rng.randint(1, 3) for p in rng.sample(places, rng.randint(0, nP))}
        trs[t] = (ins, outs)
        if rng.random() < 0.8:
            ivs[t] = _rand_interval(rng)
        lab[t] = rng.choice([None, "a", "b", "SYNC"])
    m0 = {p: rng.randint(0, 3) for p in places}
    net = make_net(f"n{idx}", places, trs, m0, ivs, lab)
    if rng.random() < 0.5 or not net.transitions:
        return lift_to_ptpn(net)
    cands = [frozenset([t]) for t in net.transitions]
    for a, b in combinations(net.transitions, 2):
        if validate_firing_set(net, (a, b)) is None:
            cands.append(frozenset([a, b]))
    rel = rng.sample(cands, rng.randint(0, len(cands)))
    return PTPN(net, tuple(rel))
