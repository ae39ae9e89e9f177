"""Command-line driver: configure, prepare, init, query, bench."""
import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from .baseline import PlainGraph, SecureEdgeList, list_edge_exist, list_neighbors_count
from .engine import QUERY_KINDS, Engine, engine_answer, oracle_answer
from .generators import GENERATORS, split_edges
from .graph.integrate import secure_config_k
from .graph.partition import EdgeParseError, local_process, parse_edge_list
from .graph.sharefile import ShareFileError, read_share_file, share_partition, write_share_file
from .mpc.session import Session
from .mpc.transport import CLIENT

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _seed(args) -> int:
    env = os.environ.get("GORAM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"GORAM_SEED must be an integer, got {env!r}") from None
    return args.seed


def _emit(record: dict):
    print(json.dumps(record, sort_keys=True))


def _share_path(out: Path, stem: str, party: int) -> Path:
    return out / f"{stem}.party{party}.gora"


def cmd_configure(args):
    if args.counts is not None:
        counts = [int(c) for c in args.counts.split(",")]
    else:
        counts = [len(parse_edge_list(p)) for p in args.edge_files]
    if not counts or any(c < 0 for c in counts):
        raise UsageError("need one non-negative edge count per provider")
    sess = Session(_seed(args))
    shares = sess.share_input(CLIENT, np.array(counts), arithmetic=True)
    k = secure_config_k(sess, shares, args.threshold_b, args.vertices)
    _emit({"k": k, "b": -(-args.vertices // k), "providers": len(counts),
           "threshold_b": args.threshold_b, "vertices": args.vertices,
           **sess.metrics().as_dict()})


def cmd_prepare(args):
    edges = parse_edge_list(args.edge_file, args.attr_lanes)
    part = local_process(edges, args.chunk_size, args.vertices, args.pad_extra, args.attr_lanes,
                         args.threshold_b)
    stem = Path(args.edge_file).name.rsplit(".", 1)[0]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bundles = share_partition(part, f"{_seed(args)}:{stem}".encode())
    paths = []
    for bnd in bundles:
        path = _share_path(out, stem, bnd.party)
        write_share_file(path, bnd)
        paths.append(str(path))
    _emit({"files": paths, "b": part.config.b, "l_i": part.l, "k": args.chunk_size,
           "edges": len(edges)})


_PARTY_RE = re.compile(r"^(?P<stem>.+)\.party(?P<party>[123])\.gora$")


def _group_share_files(paths) -> list[list]:
    groups: dict[str, dict[int, Path]] = {}
    for raw in paths:
        p = Path(raw)
        files = sorted(p.glob("*.gora")) if p.is_dir() else [p]
        for f in files:
            m = _PARTY_RE.match(f.name)
            if not m:
                raise UsageError(f"share file name {f.name!r} is not <stem>.party<N>.gora")
            groups.setdefault(str(f.parent / m["stem"]), {})[int(m["party"])] = f
    if not groups:
        raise UsageError("no share files given")
    out = []
    for stem, parts in sorted(groups.items()):
        if sorted(parts) != [1, 2, 3]:
            raise ShareFileError(f"provider {stem} lacks a share file for some party")
        out.append([read_share_file(parts[i]) for i in (1, 2, 3)])
    return out


def cmd_init(args):
    bundles = _group_share_files(args.share_files)
    t0 = time.perf_counter()
    eng = Engine.from_bundles(Session(_seed(args)), bundles, args.threshold_b, args.slices)
    elapsed = time.perf_counter() - t0
    eng.save(args.out)
    g = eng.goram
    _emit({"engine": str(args.out), "providers": len(bundles), "k": eng.k, "b": eng.b, "l": g.l,
           "slices": g.p, "init_seconds": round(elapsed, 4), **eng.init_metrics.as_dict()})


def _query_args(kind: str, ids: list[int], args) -> tuple:
    need = {"edge-exist": 2, "neighbors-count": 1, "neighbors-get": 1,
            "unique-neighbors-count": 1, "range-count": 2}
    if kind == "cycle":
        if len(ids) < 2:
            raise UsageError("cycle needs at least two vertex ids")
        return tuple(ids)
    if len(ids) != need[kind]:
        raise UsageError(f"{kind} takes {need[kind]} integer argument(s)")
    if kind == "range-count":
        return (ids[0], ids[1], args.attr_lane)
    return tuple(ids)


def cmd_query(args):
    qargs = _query_args(args.kind, args.ids, args)
    eng = Engine.load(args.engine)
    t0 = time.perf_counter()
    result = engine_answer(eng, args.kind, qargs)
    elapsed = time.perf_counter() - t0
    eng.save(args.engine)
    _emit({"kind": args.kind, "args": list(qargs), "result": result,
           "seconds": round(elapsed, 6), **eng.last_metrics.as_dict()})


def _random_args(kind: str, rng, V: int, edges, max_attr: int):
    if kind == "edge-exist":
        if edges and rng.random() < 0.5:
            e = edges[rng.integers(len(edges))]
            return (e.src, e.dst)
        return (int(rng.integers(1, V + 1)), int(rng.integers(1, V + 1)))
    if kind == "cycle":
        return tuple(int(x) for x in rng.integers(1, V + 1, size=3))
    if kind == "range-count":
        return (int(rng.integers(1, V + 1)), int(rng.integers(0, max_attr)), 0)
    return (int(rng.integers(1, V + 1)),)


def cmd_bench(args):
    seed = _seed(args)
    gen = GENERATORS[args.generator]
    max_attr = 1 << 20
    edges = gen(args.vertices, args.edges, seed, 1, max_attr)
    providers = split_edges(edges, args.providers, seed + 1)
    t0 = time.perf_counter()
    eng = Engine.from_edges(providers, args.vertices, B=args.threshold_b, seed=seed,
                            p=args.slices, pad_extra=args.pad_extra)
    init_s = time.perf_counter() - t0
    g = eng.goram
    plain = PlainGraph(edges)
    _emit({"record": "graph", "generator": args.generator, "vertices": args.vertices,
           "edges": len(edges), "providers": args.providers, "k": eng.k, "b": eng.b, "l": g.l,
           "slices": g.p, "threshold_b": args.threshold_b, "seed": seed,
           "init_seconds": round(init_s, 4), **{f"init_{k}": v for k, v in eng.init_metrics.as_dict().items()}})
    lst = SecureEdgeList.from_edges(eng.session.fork("list"), edges) if args.compare_list else None
    rng = np.random.default_rng(seed + 2)
    kinds = QUERY_KINDS if args.kinds is None else args.kinds.split(",")
    for kind in kinds:
        if kind not in QUERY_KINDS:
            raise UsageError(f"unknown query kind {kind}")
        secs, total, wrong = 0.0, None, 0
        for _ in range(args.queries):
            qargs = _random_args(kind, rng, args.vertices, edges, max_attr)
            t = time.perf_counter()
            res = engine_answer(eng, kind, qargs)
            secs += time.perf_counter() - t
            total = eng.last_metrics if total is None else total + eng.last_metrics
            wrong += res != oracle_answer(plain, kind, qargs)
        n = max(args.queries, 1)
        rec = {"record": "query", "kind": kind, "queries": args.queries,
               "avg_seconds": round(secs / n, 6), "avg_rounds": total.rounds / n if total else 0,
               "avg_bytes": total.total_bytes / n if total else 0,
               "avg_bytes_per_party": [b / n for b in total.bytes_sent] if total else [0, 0, 0],
               "oracle_mismatches": int(wrong)}
        if lst is not None and kind in ("edge-exist", "neighbors-count") and args.queries:
            ls = Session(seed + 3)
            before = ls.metrics()
            v = ls.share_input(CLIENT, np.uint64(1))
            if kind == "edge-exist":
                ls.reveal(list_edge_exist(ls, lst, v, ls.share_input(CLIENT, np.uint64(1))), to=CLIENT)
            else:
                ls.reveal(list_neighbors_count(ls, lst, v), to=CLIENT)
            lb = (ls.metrics() - before).total_bytes
            rec["list_bytes"] = lb
            rec["goram_to_list_bytes"] = round(rec["avg_bytes"] / lb, 6)
        _emit(rec)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="goram", description="Secret-shared graph store with ORAM partition indices.")
    ap.add_argument("--seed", type=int, default=0, help="master seed (GORAM_SEED overrides)")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("configure", help="securely compute the chunk size k")
    c.add_argument("edge_files", nargs="*", help="provider edge lists (only their sizes are used)")
    c.add_argument("--counts", help="comma-separated provider edge counts instead of files")
    c.add_argument("--vertices", type=int, required=True)
    c.add_argument("--threshold-b", type=int, default=1024)

    p = sub.add_parser("prepare", help="partition and secret-share one provider's edges")
    p.add_argument("edge_file")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--chunk-size", type=int, required=True)
    p.add_argument("--pad-extra", type=int, default=0)
    p.add_argument("--attr-lanes", type=int, default=1)
    p.add_argument("--threshold-b", type=int, default=1024)
    p.add_argument("--out", required=True, help="output directory")

    i = sub.add_parser("init", help="integrate share files and build the indices")
    i.add_argument("share_files", nargs="+", help="share files or directories holding them")
    i.add_argument("--threshold-b", type=int, default=1024)
    i.add_argument("--slices", type=int, default=1)
    i.add_argument("--out", required=True, help="engine state file")

    q = sub.add_parser("query", help="run one query as the client")
    q.add_argument("kind", choices=QUERY_KINDS)
    q.add_argument("ids", nargs="*", type=int)
    q.add_argument("--engine", required=True)
    q.add_argument("--attr-lane", type=int, default=0)

    b = sub.add_parser("bench", help="generate a graph and measure every query kind")
    b.add_argument("--generator", choices=sorted(GENERATORS), default="uniform")
    b.add_argument("--vertices", type=int, default=256)
    b.add_argument("--edges", type=int, default=2048)
    b.add_argument("--providers", type=int, default=3)
    b.add_argument("--threshold-b", type=int, default=1024)
    b.add_argument("--slices", type=int, default=1)
    b.add_argument("--pad-extra", type=int, default=0)
    b.add_argument("--queries", type=int, default=16)
    b.add_argument("--kinds", help="comma-separated subset of query kinds")
    b.add_argument("--compare-list", action="store_true", help="also measure the edge-list baseline")
    for sp in (c, p, i, q, b):
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    return ap


COMMANDS = {"configure": cmd_configure, "prepare": cmd_prepare, "init": cmd_init,
            "query": cmd_query, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.cmd](args)
    except UsageError as e:
        print(f"goram: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (EdgeParseError, ShareFileError, ValueError, OSError, OverflowError) as e:
        print(f"goram: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
