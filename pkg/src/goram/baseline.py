"""Plaintext reference graph and the secure flat edge-list baseline."""
from collections import defaultdict

import numpy as np

from .graph.partition import EdgeRecord, as_edge
from .mpc import circuits as C
from .mpc.session import Session
from .mpc.shares import ArithShares, BoolShares
from .queries import _src, edge_key, match_key


class PlainGraph:
    """Multiset of directed edges with attributes; answers every query in the clear."""

    def __init__(self, edges=(), num_vertices: int | None = None):
        self.edges: list[EdgeRecord] = [as_edge(e) for e in edges]
        self.num_vertices = num_vertices
        self.out: dict[int, list[EdgeRecord]] = defaultdict(list)
        for e in self.edges:
            self.out[e.src].append(e)
        self._pairs = {(e.src, e.dst) for e in self.edges}

    def edge_exist(self, vs: int, vd: int) -> bool:
        return (vs, vd) in self._pairs

    def out_degree(self, v: int) -> int:
        return len(self.out.get(v, ()))

    def neighbors(self, v: int) -> set[int]:
        return {e.dst for e in self.out.get(v, ())}

    def unique_out_degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def range_count(self, v: int, threshold: int, attr_lane: int = 0) -> int:
        return sum(1 for e in self.out.get(v, ())
                   if (e.attrs[attr_lane] if attr_lane < len(e.attrs) else 0) < threshold)

    def cycle(self, vertices) -> bool:
        vs = list(vertices)
        m = len(vs)
        fw = all(self.edge_exist(vs[i], vs[(i + 1) % m]) for i in range(m))
        bw = all(self.edge_exist(vs[(i + 1) % m], vs[i]) for i in range(m))
        return fw or bw


class SecureEdgeList:
    """All providers' records (plus their dummies) in one flat secret list."""

    def __init__(self, records: BoolShares):
        if len(records.shape) != 2:
            raise ValueError("records must be (n, lanes)")
        self.records = records

    @classmethod
    def from_provider_shares(cls, shares: list[BoolShares]):
        return cls(BoolShares.concat([s.reshape(-1, s.shape[-1]) for s in shares]))

    @classmethod
    def from_edges(cls, sess: Session, edges, attr_lanes: int = 1, owner: int = 1):
        es = [as_edge(e) for e in edges]
        rec = np.zeros((max(len(es), 1), 1 + attr_lanes), dtype=np.uint64)
        for r, e in enumerate(es):
            rec[r, 0] = e.key
            rec[r, 1:1 + len(e.attrs)] = e.attrs
        return cls(sess.share_input(owner, rec))

    def __len__(self):
        return self.records.shape[0]


def list_edge_exist(sess: Session, lst: SecureEdgeList, vs: BoolShares, vd: BoolShares) -> BoolShares:
    return match_key(sess, lst.records, edge_key(vs, vd))


def list_neighbors_count(sess: Session, lst: SecureEdgeList, v: BoolShares) -> ArithShares:
    src = _src(lst.records)
    mask = C.eq(sess, src, v.reshape(()).broadcast_to(src.shape))
    return C.bit_to_arith(sess, mask).sum()
