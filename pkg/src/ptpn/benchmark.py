"""Parametric supply-chain nets: suppliers, a manager pool, the factory and an
end-of-line monitor, assembled as a left-fold product.

Labels follow ``TYPE_SOURCE_DEST``: ``SO_BAZ_Si`` (supply order from the
factory to supplier i), ``ACK_Si_BAZ_SO``, ``MOD_Si_BAZ`` (modification
request), ``MOD_BAZ_Si`` (modification granted), ``POKi`` (piece validated),
``SYNC`` (everyone done), then ``timeout`` / ``success`` on the monitor.
All reconstruction choices are listed in BENCHMARK.md.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .analysis import AcceptanceSpec
from .model import PTPN, TimeInterval, lift_to_ptpn, make_net
from .parser import CompositionManifest, serialize_manifest, serialize_net
from .product import chain_product

SUCCESS = "success"
TIMEOUT = "timeout"
SYNC = "SYNC"
ACCEPT_PLACE = "eol_end"


def _iv(x) -> TimeInterval:
    if isinstance(x, TimeInterval):
        return x
    lo, hi = x
    return TimeInterval.closed(lo, hi)


@dataclass(frozen=True)
class ChainConfig:
    n_suppliers: int = 1
    n_managers: int = 1
    y: int = 6
    staggered: bool = False
    deadline: int = 210
    inspection: tuple = (1, 7)
    production: tuple = (6, 10)
    delivery: tuple = (7, 14)
    so_interval: tuple = (0, 1)
    staggered_so: tuple = (50, 100)
    manager_lower: int = 2
    # supplier index -> order interval, applied after the staggering rule
    so_overrides: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if self.n_suppliers < 1 or self.n_managers < 1:
            raise ValueError("need at least one supplier and one manager")
        if self.y < self.manager_lower:
            raise ValueError(f"y={self.y} is below the manager lower bound {self.manager_lower}")
        if self.deadline <= 0:
            raise ValueError("deadline must be positive")
        for name in ("inspection", "production", "delivery", "so_interval", "staggered_so"):
            _iv(getattr(self, name))
        for iv in self.so_overrides.values():
            _iv(iv)

    def order_interval(self, i: int) -> TimeInterval:
        if i in self.so_overrides:
            return _iv(self.so_overrides[i])
        if self.staggered and i == 1:
            return _iv(self.staggered_so)
        return _iv(self.so_interval)


def so_label(i):
    return f"SO_BAZ_S{i}"


def ack_label(i):
    return f"ACK_S{i}_BAZ_SO"


def modreq_label(i):
    return f"MOD_S{i}_BAZ"


def grant_label(i):
    return f"MOD_BAZ_S{i}"


def pok_label(i):
    return f"POK{i}"


URGENT = TimeInterval.closed(0, 0)


def gen_supplier(i: int, cfg: ChainConfig) -> PTPN:
    """Order -> (inspection || acknowledgement) -> production -> POK, or a
    modification round trip then POK; SYNC once the batch has left."""
    if not 0 <= i < cfg.n_suppliers:
        raise ValueError(f"supplier index {i} out of range")
    s = f"s{i}_"
    places = [s + p for p in ("idle", "to_inspect", "to_ack", "inspected", "acked", "ready",
                              "mod_wait", "modified", "validated", "done")]
    tr = {
        s + "so": ([s + "idle"], [s + "to_inspect", s + "to_ack"]),
        s + "ins": ([s + "to_inspect"], [s + "inspected"]),
        s + "ack": ([s + "to_ack"], [s + "acked"]),
        s + "produce": ([s + "inspected", s + "acked"], [s + "ready"]),
        s + "pok": ([s + "ready"], [s + "validated"]),
        s + "modreq": ([s + "ready"], [s + "mod_wait"]),
        s + "modget": ([s + "mod_wait"], [s + "modified"]),
        s + "pok_mod": ([s + "modified"], [s + "validated"]),
        s + "sync": ([s + "validated"], [s + "done"]),
    }
    intervals = {
        s + "ins": _iv(cfg.inspection),
        s + "ack": URGENT,
        s + "produce": _iv(cfg.production),
        s + "pok": URGENT,
        s + "modreq": URGENT,
        s + "pok_mod": URGENT,
    }
    labels = {
        s + "so": so_label(i),
        s + "ack": ack_label(i),
        s + "pok": pok_label(i),
        s + "modreq": modreq_label(i),
        s + "modget": grant_label(i),
        s + "pok_mod": pok_label(i),
        s + "sync": SYNC,
    }
    net = make_net(f"supplier{i}", places, tr, {s + "idle": 1}, intervals, labels)
    return lift_to_ptpn(net)


def gen_manager(cfg: ChainConfig) -> PTPN:
    """``n_managers`` tokens in ``mgr_idle``. Per supplier: a check on order
    placement, a visit on request, the grant ``[manager_lower, y]`` that
    brings the manager back, and validation of delivered pieces."""
    places = ["mgr_idle"] + [f"mgr_busy{i}" for i in range(cfg.n_suppliers)]
    tr, intervals, labels = {}, {}, {}
    for i in range(cfg.n_suppliers):
        tr[f"mgr_order{i}"] = (["mgr_idle"], ["mgr_idle"])
        tr[f"mgr_visit{i}"] = (["mgr_idle"], [f"mgr_busy{i}"])
        tr[f"mgr_grant{i}"] = ([f"mgr_busy{i}"], ["mgr_idle"])
        tr[f"mgr_validate{i}"] = (["mgr_idle"], ["mgr_idle"])
        intervals[f"mgr_grant{i}"] = TimeInterval.closed(cfg.manager_lower, cfg.y)
        labels[f"mgr_order{i}"] = so_label(i)
        labels[f"mgr_visit{i}"] = modreq_label(i)
        labels[f"mgr_grant{i}"] = grant_label(i)
        labels[f"mgr_validate{i}"] = pok_label(i)
    net = make_net("manager", places, tr, {"mgr_idle": cfg.n_managers}, intervals, labels)
    return lift_to_ptpn(net)


def gen_factory(cfg: ChainConfig) -> PTPN:
    """One path per supplier (order, ack, optional modification, validated
    piece, delivery) joined by the urgent ``fac_te`` which carries SYNC.

    Delivery sits on the factory side so that ``fac_te`` becomes enabled
    exactly when the last batch arrives."""
    places, tr, intervals, labels = [], {}, {}, {}
    m0 = {}
    for i in range(cfg.n_suppliers):
        f = f"fac{i}_"
        places += [f + p for p in ("start", "ordered", "acked", "modified", "done", "received")]
        m0[f + "start"] = 1
        tr[f + "so"] = ([f + "start"], [f + "ordered"])
        tr[f + "ack"] = ([f + "ordered"], [f + "acked"])
        tr[f + "mod"] = ([f + "acked"], [f + "modified"])
        tr[f + "done"] = ([f + "acked"], [f + "done"])
        tr[f + "done_mod"] = ([f + "modified"], [f + "done"])
        tr[f + "ship"] = ([f + "done"], [f + "received"])
        intervals[f + "ship"] = _iv(cfg.delivery)
        intervals[f + "so"] = cfg.order_interval(i)
        labels[f + "so"] = so_label(i)
        labels[f + "ack"] = ack_label(i)
        labels[f + "mod"] = grant_label(i)
        labels[f + "done"] = pok_label(i)
        labels[f + "done_mod"] = pok_label(i)
    places.append("fac_complete")
    tr["fac_te"] = ([f"fac{i}_received" for i in range(cfg.n_suppliers)], ["fac_complete"])
    intervals["fac_te"] = URGENT
    labels["fac_te"] = SYNC
    net = make_net("factory", places, tr, m0, intervals, labels)
    return lift_to_ptpn(net)


def gen_end_of_line(cfg: ChainConfig) -> PTPN:
    """``eol_wait`` starts with one token feeding the ``[deadline, deadline]``
    timeout; SYNC adds a second token and the urgent ``eol_t0`` takes both."""
    places = ["eol_start", "eol_wait", "eol_late", "eol_ready", ACCEPT_PLACE]
    tr = {
        "eol_sync": (["eol_start"], ["eol_wait"]),
        "eol_timeout": (["eol_wait"], ["eol_late"]),
        "eol_t0": ({"eol_wait": 2}, ["eol_ready"]),
        "eol_success": (["eol_ready"], [ACCEPT_PLACE]),
    }
    intervals = {
        "eol_timeout": TimeInterval.closed(cfg.deadline, cfg.deadline),
        "eol_t0": URGENT,
    }
    labels = {"eol_sync": SYNC, "eol_timeout": TIMEOUT, "eol_success": SUCCESS}
    net = make_net("end_of_line", places, tr, {"eol_start": 1, "eol_wait": 1}, intervals, labels)
    return lift_to_ptpn(net)


def component_names(cfg: ChainConfig) -> list:
    return ["manager.tpn", "factory.tpn"] + [f"supplier{i}.tpn" for i in range(cfg.n_suppliers)] + ["end_of_line.tpn"]


def assemble_chain(cfg: ChainConfig) -> CompositionManifest:
    """Manager and factory first, then each supplier, then the end-of-line net."""
    names = component_names(cfg)
    nets = [gen_manager(cfg), gen_factory(cfg)]
    nets += [gen_supplier(i, cfg) for i in range(cfg.n_suppliers)]
    nets.append(gen_end_of_line(cfg))
    return CompositionManifest(tuple(names), (None,) * len(names), nets=dict(zip(names, nets)))


def acceptance_spec() -> AcceptanceSpec:
    return AcceptanceSpec(SUCCESS, TIMEOUT, {ACCEPT_PLACE: 1})


def build_model(cfg: ChainConfig) -> PTPN:
    tag = f"chain_s{cfg.n_suppliers}_m{cfg.n_managers}_y{cfg.y}{'_stag' if cfg.staggered else ''}"
    return chain_product(assemble_chain(cfg), name=tag)


def write_benchmark(cfg: ChainConfig, out_dir) -> Path:
    """Write every component net plus ``chain.manifest``; return the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = assemble_chain(cfg)
    for name in manifest.components:
        (out / name).write_text(serialize_net(manifest.nets[name]), encoding="utf-8")
    path = out / "chain.manifest"
    path.write_text(serialize_manifest(manifest), encoding="utf-8")
    return path
