"""GORAM: a vertex ORAM over row partitions and an edge ORAM over blocks.

Each block's record range is split into ``p`` slices; every slice owns its own
session and its own pair of ORAMs, so slices could run on separate workers.
"""
import hashlib
from dataclasses import dataclass

from .graph.integrate import PartitionedGraph
from .graph.partition import GlobalConfig
from .mpc.session import Metrics, Session
from .mpc.shares import BoolShares
from .oram import OramParams, SqrtOram


def slice_bounds(l: int, p: int) -> list[tuple[int, int]]:
    if not 1 <= p <= l:
        raise ValueError(f"slice count must lie in [1, l={l}]")
    out, start = [], 0
    for j in range(p):
        size = l // p + (1 if j < l % p else 0)
        out.append((start, start + size))
        start += size
    return out


@dataclass
class GoramSlice:
    session: Session
    lo: int
    hi: int
    voram: SqrtOram
    eoram: SqrtOram

    @property
    def l(self) -> int:
        return self.hi - self.lo


class Goram:
    """Index pair over one partitioned graph.

    :param sess: coordinating session (input sharing, cross-slice steps).
    :param graph: integrated partitioned graph.
    :param p: number of edge-range slices.
    :param pack: ORAM pack factor.
    :param period: ORAM epoch length policy; ``None`` means ceil(sqrt n) per ORAM.
    """

    def __init__(self, sess: Session, graph: PartitionedGraph, p: int = 1, pack: int = 4,
                 period=None):
        self.session = sess
        self.config: GlobalConfig = graph.config
        self.b = graph.b
        self.l = graph.l
        self.p = p
        self.pack = pack
        self.period = period
        self.record_lanes = graph.blocks.shape[-1]
        self.slices: list[GoramSlice] = []
        b, R = self.b, self.record_lanes
        for j, (lo, hi) in enumerate(slice_bounds(self.l, p)):
            part = graph.blocks[:, :, lo:hi, :].materialize()
            ss = sess.fork(f"slice-{j}")
            voram = SqrtOram(ss, part, self._params(b))
            eoram = SqrtOram(ss, part.reshape(b * b, hi - lo, R), self._params(b * b))
            self.slices.append(GoramSlice(ss, lo, hi, voram, eoram))

    def _params(self, n: int) -> OramParams:
        period = self.period(n) if callable(self.period) else self.period
        if period is not None:
            period = min(period, n)
        return OramParams(n, self.pack, period)

    def sessions(self) -> list[Session]:
        return [self.session] + [s.session for s in self.slices]

    def metrics(self) -> Metrics:
        """Cost summed over the coordinating and all slice sessions."""
        total = self.session.metrics()
        for s in self.slices:
            total = total + s.session.metrics()
        return total

    def transcript_digest(self) -> str:
        h = hashlib.blake2b(digest_size=32)
        for s in self.sessions():
            h.update(bytes.fromhex(s.transcript_digest()))
        return h.hexdigest()

    # -- partition access ------------------------------------------------

    def vertex_slices(self, row: BoolShares) -> list[BoolShares]:
        """Per slice, the (b, l_j, R) records of row partition ``row`` (0-based)."""
        return [s.voram.access(row) for s in self.slices]

    def edge_slices(self, flat: BoolShares) -> list[BoolShares]:
        """Per slice, the (l_j, R) records of block ``flat`` (0-based, row-major)."""
        return [s.eoram.access(flat) for s in self.slices]

    def access_vertex_partition(self, row: BoolShares) -> BoolShares:
        """All b*l records of a row partition, block-major and sorted within blocks."""
        parts = self.vertex_slices(row)
        return BoolShares.concat(parts, axis=1).reshape(self.b * self.l, self.record_lanes)

    def access_edge_partition(self, flat: BoolShares) -> BoolShares:
        return BoolShares.concat(self.edge_slices(flat), axis=0)

    def rebuild_indices(self):
        for s in self.slices:
            s.voram.rebuild()
            s.eoram.rebuild()


def build_goram(sess: Session, graph: PartitionedGraph, p: int = 1, pack: int = 4,
                period=None) -> Goram:
    return Goram(sess, graph, p, pack, period)
