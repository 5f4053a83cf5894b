import random

import pytest

from ptpn import TimeInterval, build_scg, chain_product, lift_to_ptpn, load_manifest, make_net
from ptpn.analysis import (
    TICK,
    AcceptanceSpec,
    Verdict,
    VerdictKind,
    discrete_time_oracle,
    event_inevitable,
    event_reachable,
    find_dead_classes,
    fired_sets,
    label_traces,
    path_to_class,
    render_trace,
    replay,
    verdict,
)
from ptpn.errors import PartialGraphError, UnsupportedIntervalsError

from netgen import FIXTURES, closed_integer_net

iv = TimeInterval.closed


@pytest.fixture(scope="module")
def twonet():
    return chain_product(load_manifest(FIXTURES / "twonet.manifest"))


@pytest.fixture(scope="module")
def twonet_graph(twonet):
    return build_scg(twonet)


TWONET_SPEC = AcceptanceSpec("b", "timeout", {"p2.1": 1, "p2.2": 1})


class TestDeadClasses:
    def test_twonet_post_t_is_timelocked(self, twonet, twonet_graph):
        acc, locked = find_dead_classes(twonet_graph, TWONET_SPEC)
        assert len(acc) == 1 and len(locked) == 1
        m = twonet.net.marking_dict(twonet_graph.classes[locked[0]].marking)
        assert m == {"p3": 1, "p1.2": 1}
        labels = [e.label for e in path_to_class(twonet_graph, locked[0])]
        assert labels == ["a", None]

    def test_no_transitions(self):
        p = lift_to_ptpn(make_net("n", ["p"], {}, {"p": 1}))
        g = build_scg(p)
        assert find_dead_classes(g, AcceptanceSpec("s", "t", {"p": 1})) == ([0], [])
        assert find_dead_classes(g, AcceptanceSpec("s", "t", {"p": 2})) == ([], [0])

    def test_callable_predicate(self, twonet_graph):
        spec = AcceptanceSpec("b", "timeout", lambda m: True)
        assert find_dead_classes(twonet_graph, spec)[1] == []

    def test_partial_graph_refused(self, twonet):
        g = build_scg(twonet, max_classes=1)
        with pytest.raises(PartialGraphError):
            find_dead_classes(g, TWONET_SPEC)
        with pytest.raises(PartialGraphError):
            verdict(g, TWONET_SPEC)


class TestEvents:
    def test_reachable_with_witness(self, twonet_graph):
        ok, w = event_reachable(twonet_graph, "b")
        assert ok
        assert [e.label for e in w] == ["a", "b"]
        assert replay(twonet_graph, w) == w[-1].dst

    def test_absent_label(self, twonet_graph):
        assert event_reachable(twonet_graph, "nope") == (False, None)

    def test_twonet_not_inevitable(self, twonet, twonet_graph):
        ok, counter = event_inevitable(twonet_graph, "b", TWONET_SPEC)
        assert not ok
        end = replay(twonet_graph, counter)
        assert twonet.net.marking_dict(twonet_graph.classes[end].marking) == {"p3": 1, "p1.2": 1}

    def test_every_edge_labelled(self):
        p = lift_to_ptpn(make_net("n", ["a", "b", "c"], {"x": (["a"], ["b"]), "y": (["b"], ["c"])},
                                  {"a": 1}, labels={"x": "go", "y": "go"}))
        g = build_scg(p)
        assert event_inevitable(g, "go") == (True, None)

    def test_cycle_defeats_inevitability(self):
        p = lift_to_ptpn(make_net("n", ["a", "b"], {"spin": (["a"], ["a"]), "done": (["a"], ["b"])},
                                  {"a": 1}, {"spin": iv(1, 1), "done": iv(0, 5)}, {"done": "ok"}))
        g = build_scg(p)
        ok, lasso = event_inevitable(g, "ok")
        assert not ok
        assert lasso[-1].dst in {e.src for e in lasso}

    def test_inevitable_implies_reachable(self):
        rng = random.Random(31)
        for _ in range(60):
            g = build_scg(closed_integer_net(rng))
            for label in ("a", "b"):
                inev, _ = event_inevitable(g, label)
                if inev:
                    assert event_reachable(g, label)[0]


class TestVerdict:
    def test_twonet_timelock(self, twonet_graph):
        v = verdict(twonet_graph, AcceptanceSpec("b", "timeout", {"p2.1": 1}))
        assert v.kind is VerdictKind.TIMELOCK
        assert render_trace(v.witness) == [("a", ["t0.1", "t0.2"]), ("tau", ["t"])]
        replay(twonet_graph, v.witness)

    def test_timeout_beats_timelock(self):
        # the deadline fires at 4 while a dead non-accepting end also exists
        p = lift_to_ptpn(make_net("n", ["w", "late", "x", "stuck"],
                                  {"timeout": (["w"], ["late"]), "jam": (["x"], ["stuck"])},
                                  {"w": 1, "x": 1}, {"timeout": iv(4, 4), "jam": iv(0, 1)},
                                  {"timeout": "timeout"}))
        g = build_scg(p)
        v = verdict(g, AcceptanceSpec("success", "timeout", {"nothing": 1}))
        assert v.kind is VerdictKind.TIMEOUT
        assert v.witness[-1].label == "timeout"

    def test_inconclusive(self):
        p = lift_to_ptpn(make_net("n", ["a"], {"spin": (["a"], ["a"])}, {"a": 1}, {"spin": iv(1, 1)}))
        v = verdict(build_scg(p), AcceptanceSpec("success", "timeout", {}))
        assert v.kind is VerdictKind.INCONCLUSIVE

    def test_verdict_invariants(self):
        with pytest.raises(ValueError):
            Verdict(VerdictKind.TIMELOCK)
        with pytest.raises(ValueError):
            Verdict(VerdictKind.SUCCESS, ())

    def test_deterministic(self, twonet):
        a = verdict(build_scg(twonet), TWONET_SPEC)
        b = verdict(build_scg(twonet), TWONET_SPEC)
        assert a == b

    def test_check_alphabet(self, twonet):
        assert TWONET_SPEC.check_alphabet(twonet.alphabet) == ["timeout"]


class TestOracle:
    def test_single_window(self):
        p = lift_to_ptpn(make_net("n", ["p", "q"], {"t": (["p"], ["q"])}, {"p": 1}, {"t": iv(2, 3)},
                                  {"t": "go"}))
        markings, traces = discrete_time_oracle(p, horizon=10, max_trace_len=6)
        assert markings == {(1, 0), (0, 1)}
        fire_times = {tr.index("go") for tr in traces if "go" in tr}
        assert fire_times == {2, 3}
        assert (TICK,) * 4 not in traces

    def test_twonet_group_never_fires(self, twonet):
        assert frozenset({"t3.1", "t1.2"}) not in fired_sets(twonet, horizon=10)
        assert frozenset({"t"}) in fired_sets(twonet, horizon=10)
        _, traces = discrete_time_oracle(twonet, horizon=10, max_trace_len=8)
        # a 'b' after more than 2 ticks past 'a' could only come from the incompatible group
        for tr in traces:
            if "a" in tr and "b" in tr:
                between = tr[tr.index("a"):tr.index("b")]
                assert between.count(TICK) <= 2

    def test_rejects_non_integer(self):
        p = lift_to_ptpn(make_net("n", ["p"], {"t": (["p"], [])}, {"p": 1},
                                  {"t": TimeInterval.make(1, 2, lo_open=True)}))
        with pytest.raises(UnsupportedIntervalsError):
            discrete_time_oracle(p, 5)

    def test_markings_match_scg(self):
        rng = random.Random(41)
        for _ in range(40):
            p = closed_integer_net(rng)
            markings, _ = discrete_time_oracle(p, horizon=None)
            assert markings == build_scg(p).markings()

    def test_label_traces_prefix_closed(self, twonet):
        tr = label_traces(twonet, 5, horizon=6)
        assert () in tr
        assert all(t[:-1] in tr for t in tr if t)
