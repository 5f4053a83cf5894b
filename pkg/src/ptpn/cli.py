"""``ptpn`` command line.

Exit codes::

    0   Success verdict, or the command completed
    1   input error (unreadable file, parse or composition failure)
    2   TimeOut verdict
    3   TimeLock verdict
    4   Inconclusive verdict
    5   exploration stopped by --limit-classes / --budget-seconds
    64  usage error
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .analysis import AcceptanceSpec, VerdictKind, render_trace, verdict
from .benchmark import ChainConfig, acceptance_spec as chain_acceptance, build_model, write_benchmark
from .errors import PTPNError
from .export import to_aut, to_dot
from .model import PTPN
from .parser import load_manifest, load_net, serialize_net
from .product import chain_product
from .scg import build_scg

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CODES = {
    VerdictKind.SUCCESS: 0,
    VerdictKind.TIMEOUT: 2,
    VerdictKind.TIMELOCK: 3,
    VerdictKind.INCONCLUSIVE: 4,
}
EXIT_PARTIAL = 5
EXIT_USAGE = 64

SCHEMA_PATH = Path(__file__).with_name("report.schema.json")

Y_VALUES = (6, 15, 50, 60, 175, 180)
GRIDS = {
    "chain": dict(pairs=((1, 1), (2, 1), (2, 2), (3, 2), (3, 3)), ys=Y_VALUES, staggered=(False,)),
    "chain-staggered": dict(pairs=((1, 1), (2, 1), (2, 2)), ys=Y_VALUES, staggered=(True,)),
}

log = logging.getLogger("ptpn")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    vals = [v for v in text.replace(",", " ").split() if v]
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    try:
        return [int(v) for v in vals]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}")


def _pairs(text):
    out = []
    for item in text.replace(",", " ").split():
        try:
            s, m = item.lower().split("x")
            out.append((int(s), int(m)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"pair {item!r} is not of the form SxM")
    if not out:
        raise argparse.ArgumentTypeError("empty pair list")
    return out


# --- model loading ------------------------------------------------------------

@dataclass
class Model:
    ptpn: PTPN
    spec: AcceptanceSpec
    source: str
    config: dict | None = None


def _config_from(args, y=None, suppliers=None, managers=None, staggered=None) -> ChainConfig:
    kw = dict(
        n_suppliers=suppliers if suppliers is not None else args.suppliers,
        n_managers=managers if managers is not None else args.managers,
        y=y if y is not None else args.y,
        staggered=args.staggered if staggered is None else staggered,
    )
    if getattr(args, "deadline", None) is not None:
        kw["deadline"] = args.deadline
    try:
        return ChainConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc))


def _config_dict(cfg: ChainConfig) -> dict:
    return {"suppliers": cfg.n_suppliers, "managers": cfg.n_managers, "y": cfg.y,
            "staggered": cfg.staggered, "deadline": cfg.deadline}


def _read_model_file(path: str) -> PTPN:
    p = Path(path)
    if p.suffix == ".manifest":
        return chain_product(load_manifest(p))
    return load_net(p)


def _never(marking):
    return False


def _user_spec(args) -> AcceptanceSpec:
    accepting = {}
    for item in args.accept or ():
        place, _, k = item.partition("=")
        try:
            accepting[place] = int(k) if k else 1
        except ValueError:
            raise UsageError(f"--accept {item!r}: token count must be an integer")
    if not accepting:
        # without --accept every dead class counts as a timelock
        return AcceptanceSpec(args.success_label, args.timeout_label, _never)
    return AcceptanceSpec(args.success_label, args.timeout_label, accepting)


def _load_model(args) -> Model:
    if args.model is not None:
        if args.suppliers is not None:
            raise UsageError("give either a model file or --suppliers, not both")
        p = _read_model_file(args.model)
        spec = _user_spec(args) if hasattr(args, "success_label") else chain_acceptance()
        return Model(p, spec, args.model)
    if args.suppliers is None:
        raise UsageError("a model file or --suppliers is required")
    cfg = _config_from(args)
    return Model(build_model(cfg), chain_acceptance(), "generated", _config_dict(cfg))


def _explore(model: Model, args):
    return build_scg(model.ptpn, max_classes=args.limit_classes, time_budget=args.budget_seconds,
                     order=getattr(args, "order", "bfs"))


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# --- commands -----------------------------------------------------------------

def cmd_validate(args) -> int:
    bad = 0
    for f in args.files:
        try:
            p = _read_model_file(f)
        except PTPNError as exc:
            print(f"{exc}", file=sys.stderr)
            bad += 1
            continue
        net = p.net
        print(f"{f}: ok ({len(net.places)} places, {len(net.transitions)} transitions, "
              f"{len(p.relation)} firing sets)")
    return EXIT_INPUT if bad else EXIT_OK


def cmd_compose(args) -> int:
    p = chain_product(load_manifest(args.manifest))
    _emit(serialize_net(p), args.out)
    return EXIT_OK


def _stats_block(g) -> dict:
    s = g.stats()
    return {"classes": s["classes"], "markings": s["markings"], "domains": s["domains"],
            "transitions": s["edges"]}


def cmd_explore(args) -> int:
    model = _load_model(args)
    g = _explore(model, args)
    st = _stats_block(g)
    if args.format == "json":
        doc = {"model": model.source, "config": model.config, "complete": g.complete,
               "stop_reason": g.stop_reason, "stats": st, "elapsed_seconds": round(g.elapsed, 6)}
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        head = "complete" if g.complete else f"PARTIAL ({g.stop_reason})"
        _emit(f"{model.source}: {head}\n" + "".join(f"  {k:<12}{v}\n" for k, v in st.items())
              + f"  {'time':<12}{g.elapsed:.3f}s\n", args.out)
    return EXIT_OK if g.complete else EXIT_PARTIAL


def check_report(model: Model, g, v=None) -> dict:
    """JSON-ready report; ``v`` is None for a partial graph."""
    if v is None:
        name, code, trace = "Partial", EXIT_PARTIAL, []
    else:
        name, code, trace = v.kind.value, EXIT_CODES[v.kind], render_trace(v.witness)
    return {
        "model": model.source,
        "config": model.config,
        "verdict": name,
        "exit_code": code,
        "complete": g.complete,
        "stop_reason": g.stop_reason,
        "stats": _stats_block(g),
        "elapsed_seconds": round(g.elapsed, 6),
        "witness": [{"label": l, "members": m} for l, m in trace],
    }


def _format_report(r: dict) -> str:
    lines = [f"verdict: {r['verdict']}"]
    if not r["complete"]:
        lines.append(f"PARTIAL graph ({r['stop_reason']}): no verdict")
    lines += [f"  {k:<12}{v}" for k, v in r["stats"].items()]
    lines.append(f"  {'time':<12}{r['elapsed_seconds']:.3f}s")
    if r["witness"]:
        lines.append("trace:")
        for n, step in enumerate(r["witness"], 1):
            lines.append(f"  {n:>3}. {step['label']:<16} {{{', '.join(step['members'])}}}")
    return "\n".join(lines) + "\n"


def cmd_check(args) -> int:
    model = _load_model(args)
    missing = model.spec.check_alphabet(model.ptpn.alphabet)
    if missing:
        log.warning("labels %s do not occur in the model", ", ".join(missing))
    g = _explore(model, args)
    v = verdict(g, model.spec) if g.complete else None
    r = check_report(model, g, v)
    _emit(json.dumps(r, indent=2) + "\n" if args.format == "json" else _format_report(r), args.out)
    return r["exit_code"]


@dataclass(frozen=True)
class SweepSpec:
    pairs: tuple
    ys: tuple
    staggered: tuple = (False,)

    def __post_init__(self):
        if not self.pairs or not self.ys or not self.staggered:
            raise UsageError("sweep needs at least one supplier/manager pair, y value and staggering mode")

    def cells(self):
        for stag in self.staggered:
            for s, m in self.pairs:
                for y in self.ys:
                    yield s, m, y, stag


SWEEP_FIELDS = ["suppliers", "managers", "y", "staggered", "verdict", "complete",
                "classes", "markings", "domains", "transitions"]


def run_sweep(spec: SweepSpec, args, progress=None) -> str:
    """CSV text, one row per cell in ``spec.cells()`` order. Timing is left out
    so the output is byte-stable."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_FIELDS)
    for s, m, y, stag in spec.cells():
        cfg = _config_from(args, y=y, suppliers=s, managers=m, staggered=stag)
        g = build_scg(build_model(cfg), max_classes=args.limit_classes, time_budget=args.budget_seconds)
        kind = verdict(g, chain_acceptance()).kind.value if g.complete else "Partial"
        st = _stats_block(g)
        w.writerow([s, m, y, int(stag), kind, int(g.complete),
                    st["classes"], st["markings"], st["domains"], st["transitions"]])
        if progress:
            progress(f"{s}S/{m}M y={y}{' staggered' if stag else ''}: {kind} ({g.elapsed:.2f}s)")
    return buf.getvalue()


def cmd_sweep(args) -> int:
    grid = GRIDS[args.grid] if args.grid else {}
    if args.pairs:
        pairs = args.pairs
    elif args.suppliers_list or args.managers_list:
        if not (args.suppliers_list and args.managers_list):
            raise UsageError("--suppliers and --managers must both be given")
        pairs = [(s, m) for s in args.suppliers_list for m in args.managers_list]
    else:
        pairs = grid.get("pairs", ())
    ys = args.y if args.y is not None else grid.get("ys", ())
    stag = (True,) if args.staggered else grid.get("staggered", (False,))
    spec = SweepSpec(tuple(pairs), tuple(ys), tuple(stag))
    quiet = args.quiet
    text = run_sweep(spec, args, None if quiet else lambda msg: print(msg, file=sys.stderr))
    _emit(text, args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    model = _load_model(args)
    g = _explore(model, args)
    if g.partial:
        log.warning("graph is partial (%s); the export is flagged as such", g.stop_reason)
    _emit(to_dot(g) if args.format == "dot" else to_aut(g), args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.out is None:
        raise UsageError("generate needs --out DIR")
    path = write_benchmark(_config_from(args), args.out)
    print(path)
    return EXIT_OK


# --- argument parsing ------------------------------------------------------------

def _model_args(sp, need_model=True):
    if need_model:
        sp.add_argument("model", nargs="?", help="net file, or a .manifest to compose")
    sp.add_argument("--suppliers", type=int, help="generate the supply chain with this many suppliers")
    sp.add_argument("--managers", type=int, default=1)
    sp.add_argument("--y", type=int, default=6, help="upper bound of the modification grant")
    sp.add_argument("--staggered", action="store_true", help="order supplier 1 in [50,100]")
    sp.add_argument("--deadline", type=int, help="global lead-time budget (default 210)")


def _limit_args(sp):
    sp.add_argument("--limit-classes", type=int, metavar="N", help="stop after N classes")
    sp.add_argument("--budget-seconds", type=float, metavar="S", help="stop after S seconds")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ptpn", description="Product time Petri nets: compose, explore, check.",
                 epilog="exit codes: 0 success/ok, 1 input error, 2 TimeOut, 3 TimeLock, "
                        "4 Inconclusive, 5 partial exploration, 64 usage error")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("validate", help="parse net files and manifests")
    sp.add_argument("files", nargs="+")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("compose", help="compose a manifest into one net file")
    sp.add_argument("manifest")
    sp.add_argument("--format", choices=["tpn"], default="tpn")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("explore", help="build the state class graph and print its size")
    _model_args(sp)
    _limit_args(sp)
    sp.add_argument("--order", choices=["bfs", "dfs"], default="bfs")
    sp.add_argument("--format", choices=["text", "json"], default="text")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_explore)

    sp = sub.add_parser("check", help="classify as Success, TimeOut, TimeLock or Inconclusive")
    _model_args(sp)
    _limit_args(sp)
    sp.add_argument("--success-label", default="success")
    sp.add_argument("--timeout-label", default="timeout")
    sp.add_argument("--accept", action="append", metavar="PLACE[=K]",
                    help="dead markings with at least K tokens here are accepting (repeatable)")
    sp.add_argument("--format", choices=["text", "json"], default="text")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("sweep", help="verdict matrix over generated configurations, as CSV")
    sp.add_argument("--grid", choices=sorted(GRIDS))
    sp.add_argument("--pairs", type=_pairs, metavar="SxM,...", help="e.g. 1x1,2x1,2x2")
    sp.add_argument("--suppliers", dest="suppliers_list", type=_int_list, metavar="LIST")
    sp.add_argument("--managers", dest="managers_list", type=_int_list, metavar="LIST")
    sp.add_argument("--y", type=_int_list, metavar="LIST", help="e.g. 6,15,50")
    sp.add_argument("--staggered", action="store_true")
    sp.add_argument("--deadline", type=int)
    _limit_args(sp)
    sp.add_argument("--format", choices=["csv"], default="csv")
    sp.add_argument("--out")
    sp.add_argument("--quiet", action="store_true", help="no per-cell progress on stderr")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("export", help="write the class graph as DOT or AUT")
    _model_args(sp)
    _limit_args(sp)
    sp.add_argument("--format", choices=["dot", "aut"], default="aut")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("generate", help="write the supply-chain nets and manifest to a directory")
    _model_args(sp, need_model=False)
    sp.add_argument("--out", metavar="DIR")
    sp.set_defaults(func=cmd_generate, suppliers=1)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(format="warning: %(message)s", level=logging.WARNING, stream=sys.stderr)
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"ptpn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PTPNError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
