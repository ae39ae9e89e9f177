"""In-process deployment: providers, three servers and a client in one process."""
import pickle

import numpy as np

from . import queries as Q
from .baseline import PlainGraph
from .graph.integrate import PartitionedGraph, integrate, secure_config_k
from .graph.partition import GlobalConfig, chunk_of, local_process
from .graph.sharefile import ProviderShareBundle, combine_trio, share_partition
from .index import Goram
from .mpc.session import Metrics, Session
from .mpc.transport import CLIENT


class Engine:
    """Servers' state (the GORAM) plus the client-side query driver.

    The client computes partition indices from the public k, shares every input
    and is the only party that receives results.
    """

    def __init__(self, sess: Session, graph: PartitionedGraph, p: int = 1, pack: int = 4,
                 period=None):
        self.session = sess
        self.config: GlobalConfig = graph.config
        before = sess.metrics()
        self.goram = Goram(sess, graph, p, pack, period)
        self.build_metrics = self.goram.metrics() - before
        self.init_metrics: Metrics | None = None
        self.last_metrics: Metrics | None = None

    # -- construction ----------------------------------------------------

    @classmethod
    def from_bundles(cls, sess: Session, bundles: list[list[ProviderShareBundle]], B: int = 1024,
                     p: int = 1, pack: int = 4, period=None) -> "Engine":
        """``bundles[i]`` are the three servers' bundles from provider ``i``."""
        trios = [combine_trio(t) for t in bundles]
        heads = {(t[0].num_vertices, t[0].k, t[0].attr_lanes, t[0].b, t[0].width) for t in bundles}
        if len(heads) != 1:
            raise ValueError("providers disagree on (|V|, k, A, b, w)")
        first = bundles[0][0]
        cfg = GlobalConfig(first.num_vertices, first.k, B, first.width, first.attr_lanes)
        start = sess.metrics()
        graph = integrate(sess, trios, cfg)
        eng = cls(sess, graph, p, pack, period)
        eng.init_metrics = eng.goram.metrics() - start
        return eng

    @classmethod
    def from_edges(cls, provider_edges, num_vertices: int, k: int | None = None, B: int = 1024,
                   seed=0, p: int = 1, attr_lanes: int = 1, pad_extra=0, pack: int = 4,
                   period=None) -> "Engine":
        """Full pipeline: (secure k), local processing, sharing, integration, indexing."""
        sess = Session(seed)
        if k is None:
            counts = sess.share_input(CLIENT, np.array([len(e) for e in provider_edges]),
                                      arithmetic=True)
            k = secure_config_k(sess, counts, B, num_vertices)
        pads = pad_extra if isinstance(pad_extra, (list, tuple)) else [pad_extra] * len(provider_edges)
        bundles = []
        for i, (edges, eps) in enumerate(zip(provider_edges, pads)):
            part = local_process(edges, k, num_vertices, eps, attr_lanes, B)
            bundles.append(share_partition(part, sess.master_seed + b"provider-%d" % i))
        return cls.from_bundles(sess, bundles, B, p, pack, period)

    def save(self, path):
        with open(path, "wb") as fh:
            pickle.dump(self, fh)

    @staticmethod
    def load(path) -> "Engine":
        with open(path, "rb") as fh:
            eng = pickle.load(fh)
        if not isinstance(eng, Engine):
            raise ValueError("not an engine state file")
        return eng

    # -- client helpers --------------------------------------------------

    @property
    def k(self) -> int:
        return self.config.k

    @property
    def b(self) -> int:
        return self.config.b

    def metrics(self) -> Metrics:
        return self.goram.metrics()

    def _check(self, v: int):
        if not 1 <= int(v) <= self.config.num_vertices:
            raise ValueError(f"vertex {v} outside [1, {self.config.num_vertices}]")
        return int(v)

    def _share(self, value: int):
        return self.session.share_input(CLIENT, np.uint64(value))

    def _row(self, v: int) -> int:
        return chunk_of(v, self.k) - 1

    def _flat(self, vs: int, vd: int) -> int:
        return (chunk_of(vs, self.k) - 1) * self.b + chunk_of(vd, self.k) - 1

    def _edge_inputs(self, vs: int, vd: int):
        vs, vd = self._check(vs), self._check(vd)
        return self._share(vs), self._share(vd), self._share(self._flat(vs, vd))

    def _vertex_inputs(self, v: int):
        v = self._check(v)
        return self._share(v), self._share(self._row(v))

    def _open(self, x, start: Metrics):
        out = self.session.reveal(x, to=CLIENT)
        self.last_metrics = self.metrics() - start
        return out

    # -- queries ---------------------------------------------------------

    def edge_exist(self, vs: int, vd: int) -> bool:
        start = self.metrics()
        return bool(self._open(Q.edge_exist(self.goram, *self._edge_inputs(vs, vd)), start))

    def neighbors_count(self, v: int) -> int:
        start = self.metrics()
        return int(self._open(Q.neighbors_count(self.goram, *self._vertex_inputs(v)), start))

    def unique_neighbors_count(self, v: int) -> int:
        start = self.metrics()
        return int(self._open(Q.unique_neighbors_count(self.goram, *self._vertex_inputs(v)), start))

    def neighbors_get(self, v: int) -> list[int]:
        start = self.metrics()
        raw = self._open(Q.neighbors_get(self.goram, *self._vertex_inputs(v)), start)
        return sorted(int(x) for x in raw if x)

    def neighbors_get_raw(self, v: int) -> np.ndarray:
        start = self.metrics()
        return self._open(Q.neighbors_get(self.goram, *self._vertex_inputs(v)), start)

    def range_count(self, v: int, threshold: int, attr_lane: int = 0) -> int:
        start = self.metrics()
        sv, row = self._vertex_inputs(v)
        res = Q.range_count(self.goram, sv, row, self._share(threshold), attr_lane)
        return int(self._open(res, start))

    def cycle(self, vertices) -> bool:
        vs = [self._check(v) for v in vertices]
        if len(vs) < 2:
            raise ValueError("a cycle needs at least two vertices")
        start = self.metrics()
        m = len(vs)
        fw = [self._edge_inputs(vs[i], vs[(i + 1) % m]) for i in range(m)]
        bw = [self._edge_inputs(vs[(i + 1) % m], vs[i]) for i in range(m)]
        return bool(self._open(Q.cycle_identify(self.goram, fw, bw), start))

    def rebuild(self):
        self.goram.rebuild_indices()


QUERY_KINDS = ("edge-exist", "neighbors-count", "neighbors-get", "unique-neighbors-count",
               "cycle", "range-count")


def oracle_answer(plain: PlainGraph, kind: str, args):
    if kind == "edge-exist":
        return plain.edge_exist(*args)
    if kind == "neighbors-count":
        return plain.out_degree(*args)
    if kind == "neighbors-get":
        return sorted(plain.neighbors(*args))
    if kind == "unique-neighbors-count":
        return plain.unique_out_degree(*args)
    if kind == "cycle":
        return plain.cycle(args)
    if kind == "range-count":
        return plain.range_count(*args)
    raise ValueError(f"unknown query kind {kind}")


def engine_answer(eng: Engine, kind: str, args):
    if kind == "edge-exist":
        return eng.edge_exist(*args)
    if kind == "neighbors-count":
        return eng.neighbors_count(*args)
    if kind == "neighbors-get":
        return eng.neighbors_get(*args)
    if kind == "unique-neighbors-count":
        return eng.unique_neighbors_count(*args)
    if kind == "cycle":
        return eng.cycle(args)
    if kind == "range-count":
        return eng.range_count(*args)
    raise ValueError(f"unknown query kind {kind}")


__all__ = ["Engine", "QUERY_KINDS", "engine_answer", "oracle_answer"]
