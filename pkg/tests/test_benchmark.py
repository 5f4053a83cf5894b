import pytest

from ptpn import TimeInterval, build_scg, chain_product, load_manifest, parse_net, serialize_net, validate_firing_set
from ptpn.analysis import VerdictKind, event_inevitable, event_reachable, find_dead_classes, replay, verdict
from ptpn.benchmark import (
    ACCEPT_PLACE,
    SYNC,
    ChainConfig,
    acceptance_spec,
    assemble_chain,
    build_model,
    gen_end_of_line,
    gen_factory,
    gen_manager,
    gen_supplier,
    write_benchmark,
)
from ptpn.product import binary_product

iv = TimeInterval.closed
S, TO, TL = VerdictKind.SUCCESS, VerdictKind.TIMEOUT, VerdictKind.TIMELOCK
YS = (6, 15, 50, 60, 175, 180)


def run(cfg):
    g = build_scg(build_model(cfg))
    return g, verdict(g, acceptance_spec())


class TestConfig:
    def test_defaults(self):
        c = ChainConfig()
        assert c.deadline == 210
        assert c.manager_lower == 2

    @pytest.mark.parametrize("kw", [dict(n_suppliers=0), dict(n_managers=0), dict(y=1), dict(deadline=0),
                                    dict(inspection=(5, 2))])
    def test_invalid(self, kw):
        with pytest.raises(Exception):
            ChainConfig(**kw)

    def test_override_hook(self):
        c = ChainConfig(n_suppliers=3, so_overrides={2: (10, 20)})
        assert c.order_interval(2) == iv(10, 20)
        assert c.order_interval(1) == iv(0, 1)


class TestComponents:
    def test_supplier_labels(self):
        a = gen_supplier(0, ChainConfig()).alphabet
        assert {"SO_BAZ_S0", "MOD_S0_BAZ", "MOD_BAZ_S0", "POK0", SYNC} <= a

    def test_supplier_intervals(self):
        net = gen_supplier(0, ChainConfig()).net
        assert net.intervals["s0_ins"] == iv(1, 7)
        assert net.intervals["s0_produce"] == iv(6, 10)

    def test_supplier_index_bounds(self):
        with pytest.raises(ValueError):
            gen_supplier(1, ChainConfig(n_suppliers=1))

    def test_supplier_alphabets_disjoint_but_sync(self):
        cfg = ChainConfig(n_suppliers=3)
        a, b = gen_supplier(0, cfg).alphabet, gen_supplier(2, cfg).alphabet
        assert a & b == {SYNC}

    def test_manager_tokens_and_grant(self):
        net = gen_manager(ChainConfig(n_suppliers=2, n_managers=2, y=6)).net
        assert net.marking_dict(net.m0) == {"mgr_idle": 2}
        assert net.intervals["mgr_grant0"] == iv(2, 6)
        assert net.intervals["mgr_grant1"] == iv(2, 6)

    def test_single_manager_serves_one_at_a_time(self):
        cfg = ChainConfig(n_suppliers=2, n_managers=1)
        p = gen_manager(cfg)
        g = build_scg(p, max_classes=500)
        for c in g.classes:
            m = p.net.marking_dict(c.marking)
            assert m.get("mgr_busy0", 0) + m.get("mgr_busy1", 0) + m.get("mgr_idle", 0) == 1

    def test_factory_orders(self):
        plain = gen_factory(ChainConfig(n_suppliers=2)).net
        assert plain.intervals["fac0_so"] == iv(0, 1) and plain.intervals["fac1_so"] == iv(0, 1)
        stag = gen_factory(ChainConfig(n_suppliers=3, staggered=True)).net
        assert stag.intervals["fac0_so"] == iv(0, 1)
        assert stag.intervals["fac1_so"] == iv(50, 100)
        assert stag.intervals["fac2_so"] == iv(0, 1)

    def test_factory_urgent_join(self):
        net = gen_factory(ChainConfig(n_suppliers=2)).net
        assert net.intervals["fac_te"] == iv(0, 0)
        assert net.labels["fac_te"] == SYNC

    def test_end_of_line(self):
        net = gen_end_of_line(ChainConfig()).net
        assert net.intervals["eol_timeout"] == iv(210, 210)
        assert net.intervals["eol_t0"] == iv(0, 0)
        assert gen_end_of_line(ChainConfig(deadline=99)).net.intervals["eol_timeout"] == iv(99, 99)

    def test_acceptance_predicate(self):
        net = gen_end_of_line(ChainConfig()).net
        spec = acceptance_spec()
        assert not spec.accepts(net, net.m0)
        assert spec.accepts(net, {ACCEPT_PLACE: 1})

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_components_valid_and_roundtrip(self, n):
        m = assemble_chain(ChainConfig(n_suppliers=n, n_managers=2, staggered=True))
        for name in m.components:
            p = m.nets[name]
            assert all(validate_firing_set(p.net, r) is None for r in p.relation)
            assert parse_net(serialize_net(p)) == p


class TestAssembly:
    def test_order(self):
        m = assemble_chain(ChainConfig(n_suppliers=1))
        assert m.components == ("manager.tpn", "factory.tpn", "supplier0.tpn", "end_of_line.tpn")
        assert len(assemble_chain(ChainConfig(n_suppliers=3)).components) == 6
        assert all(s is None for s in m.sync)

    def test_sync_bookkeeping(self):
        cfg = ChainConfig(n_suppliers=2)
        m = assemble_chain(cfg)
        acc = m.load(0)
        assert SYNC not in acc.alphabet  # the manager never sees SYNC
        for i in range(1, len(m.components)):
            acc = binary_product(acc, m.load(i))
            assert SYNC in acc.alphabet
        sync_sets = [r for r in acc.relation if acc.set_label(r) == SYNC]
        # one joint SYNC: the factory join, both suppliers and the end-of-line net
        assert len(sync_sets) == 1
        assert len(sync_sets[0]) == 4

    def test_write_and_reload(self, tmp_path):
        cfg = ChainConfig(n_suppliers=2, y=15)
        path = write_benchmark(cfg, tmp_path)
        assert path.name == "chain.manifest"
        loaded, built = chain_product(load_manifest(path)), build_model(cfg)
        assert loaded.net.transitions == built.net.transitions
        assert loaded.net.intervals == built.net.intervals
        assert loaded.relation == built.relation
        a = build_scg(chain_product(load_manifest(path)))
        b = build_scg(build_model(cfg))
        assert a.stats() == b.stats()


class TestVerdicts:
    @pytest.mark.parametrize("y", YS)
    def test_one_supplier(self, y):
        _, v = run(ChainConfig(1, 1, y))
        assert v.kind is (TO if y == 180 else S)

    @pytest.mark.parametrize("y", YS)
    def test_two_suppliers_one_manager(self, y):
        _, v = run(ChainConfig(2, 1, y))
        assert v.kind is (TO if y == 180 else TL)

    @pytest.mark.parametrize("y", YS)
    def test_two_suppliers_two_managers(self, y):
        _, v = run(ChainConfig(2, 2, y))
        assert v.kind is (TO if y == 180 else S)

    @pytest.mark.parametrize("y", YS)
    @pytest.mark.parametrize("managers", [1, 2])
    def test_staggered(self, y, managers):
        _, v = run(ChainConfig(2, managers, y, staggered=True))
        assert v.kind is (TO if y >= 175 else S)

    def test_success_case_details(self):
        g, _ = run(ChainConfig(1, 1, 6))
        spec = acceptance_spec()
        assert find_dead_classes(g, spec)[1] == []
        assert not event_reachable(g, "timeout")[0]
        assert event_inevitable(g, "success", spec)[0]

    def test_timelock_witness_replays(self):
        g, v = run(ChainConfig(2, 1, 6))
        end = replay(g, v.witness)
        assert not g.successors(end)
        assert not acceptance_spec().accepts(g.ptpn.net, g.classes[end].marking)

    def test_more_managers_never_worse(self):
        rank = {S: 0, VerdictKind.INCONCLUSIVE: 1, TL: 2, TO: 3}
        for y in (6, 60, 180):
            for stag in (False, True):
                a = run(ChainConfig(2, 1, y, stag))[1].kind
                b = run(ChainConfig(2, 2, y, stag))[1].kind
                assert rank[b] <= rank[a]

    def test_classes_grow_with_suppliers(self):
        s1 = run(ChainConfig(1, 1, 6))[0].stats()
        s2 = run(ChainConfig(2, 1, 6))[0].stats()
        assert all(s2[k] > s1[k] for k in s1)

    @pytest.mark.slow
    @pytest.mark.parametrize("managers,want", [(2, TL), (3, S)])
    def test_three_suppliers(self, managers, want):
        _, v = run(ChainConfig(3, managers, 6))
        assert v.kind is want
