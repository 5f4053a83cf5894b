"""Product time Petri nets: parsing, composition, state class graphs and
feasibility analysis, with a parametric supply-chain benchmark."""

from .model import (
    Bound,
    DEFAULT_INTERVAL,
    Net,
    PTPN,
    TimeInterval,
    enabled_set,
    fire_firing_set,
    lift_to_ptpn,
    make_net,
    validate_firing_set,
)
from .parser import (
    CompositionManifest,
    load_manifest,
    load_net,
    parse_manifest,
    parse_net,
    serialize_manifest,
    serialize_net,
)
from .product import binary_product, chain_product
from .dbm import DBM, canonicalize
from .scg import (
    SCGraph,
    StateClass,
    build_scg,
    class_equal,
    firable_firing_sets,
    initial_class,
    successor_class,
)

__version__ = "0.1.0"
