"""Ego-centric queries over GORAM partitions.

Inputs are secret shares submitted by the client: vertex ids, and the 0-based
ORAM index of the partition that holds them (row ``ceil(v/k)-1`` for vertex
queries, ``(ceil(vs/k)-1)*b + ceil(vd/k)-1`` for edge queries).  Outputs stay
secret until the caller reveals them.
"""
import numpy as np

from .graph.partition import DST_MASK, KEY_SHIFT
from .index import Goram
from .mpc import circuits as C
from .mpc.session import Session
from .mpc.shares import ArithShares, BoolShares
from .shuffle import oblivious_shuffle

_DST = np.uint64(DST_MASK)


def edge_key(vs: BoolShares, vd: BoolShares) -> BoolShares:
    return (vs << KEY_SHIFT) ^ vd


def _src(records: BoolShares) -> BoolShares:
    return records[..., 0] >> KEY_SHIFT


def _dst(records: BoolShares) -> BoolShares:
    return records[..., 0] & _DST


def _count(sess: Session, bits: BoolShares) -> ArithShares:
    return C.bit_to_arith(sess, bits.flatten()).sum()


def _src_mask(sess: Session, records: BoolShares, v: BoolShares, num_vertices: int) -> BoolShares:
    """Records whose source is ``v``; ids are public-bounded by |V|."""
    src = _src(records)
    return C.eq(sess, src, v.reshape(()).broadcast_to(src.shape), bits=num_vertices.bit_length())


def match_key(sess: Session, records: BoolShares, key: BoolShares) -> BoolShares:
    """Existence bit of ``key`` among the records (dummies never match)."""
    k = records[..., 0]
    mask = C.eq(sess, k, key.reshape(()).broadcast_to(k.shape))
    return C.or_fold(sess, mask.flatten())


def edge_exist(g: Goram, vs: BoolShares, vd: BoolShares, flat: BoolShares) -> BoolShares:
    key = edge_key(vs, vd)
    bits = [match_key(s.session, part, key) for s, part in zip(g.slices, g.edge_slices(flat))]
    out = bits[0]
    for bit in bits[1:]:
        out = g.session.or_(out, bit)
    return out


def neighbors_count(g: Goram, v: BoolShares, row: BoolShares) -> ArithShares:
    total = None
    for s, part in zip(g.slices, g.vertex_slices(row)):
        c = _count(s.session, _src_mask(s.session, part, v, g.config.num_vertices))
        total = c if total is None else total + c
    return total


def _run_ends(sess: Session, candidate: BoolShares) -> BoolShares:
    """1 at the last lane of every run of equal candidates."""
    diff = C.neq(sess, candidate[1:], candidate[:-1])
    one = BoolShares.zeros((1,), candidate.width) ^ np.uint64(1)
    return BoolShares.concat([diff, one])


def _candidates(g: Goram, v: BoolShares, row: BoolShares):
    sess = g.session
    part = g.access_vertex_partition(row)
    mask = _src_mask(sess, part, v, g.config.num_vertices)
    return mask, C.mask_select(sess, mask, _dst(part))


def neighbors_get(g: Goram, v: BoolShares, row: BoolShares) -> BoolShares:
    """b*l lanes: every distinct out-neighbour once, zeros elsewhere, shuffled."""
    sess = g.session
    _, cand = _candidates(g, v, row)
    neighbors = C.mask_select(sess, _run_ends(sess, cand), cand)
    return oblivious_shuffle(sess, neighbors)


def unique_neighbors_count(g: Goram, v: BoolShares, row: BoolShares) -> ArithShares:
    sess = g.session
    mask, cand = _candidates(g, v, row)
    final = sess.and_(_run_ends(sess, cand), mask)
    return _count(sess, final)


def range_count(g: Goram, v: BoolShares, row: BoolShares, threshold: BoolShares,
                attr_lane: int = 0) -> ArithShares:
    """Out-edges of ``v`` whose attribute ``attr_lane`` is strictly below ``threshold``."""
    if not 0 <= attr_lane < g.record_lanes - 1:
        raise ValueError(f"attribute lane {attr_lane} out of range")
    total = None
    for s, part in zip(g.slices, g.vertex_slices(row)):
        sess = s.session
        attr = part[..., 1 + attr_lane]
        hits = _src_mask(sess, part, v, g.config.num_vertices)
        before = C.lt(sess, attr, threshold.reshape(()).broadcast_to(attr.shape))
        c = _count(sess, sess.and_(hits, before))
        total = c if total is None else total + c
    return total


def cycle_identify(g: Goram, forward, backward) -> BoolShares:
    """Cycle test composed from edge-existence bits.

    ``forward``/``backward`` are lists of ``(vs, vd, flat)`` share triples for the
    edges of the cycle and of its reversal.
    """
    sess = g.session
    fw = [edge_exist(g, *t) for t in forward]
    bw = [edge_exist(g, *t) for t in backward]
    both = C.and_fold(sess, BoolShares.stack([BoolShares.stack(fw), BoolShares.stack(bw)]))
    return sess.or_(both[0], both[1])
