"""Server-side configuration of k and oblivious merging of provider partitions."""
from dataclasses import dataclass, field

import numpy as np

from ..mpc import circuits as C
from ..mpc.session import Session
from ..mpc.shares import ArithShares, BoolShares
from .partition import GlobalConfig


def secure_config_k(sess: Session, counts: ArithShares, B: int, num_vertices: int) -> int:
    """clamp(floor(B*|V| / sum(counts)), 1, |V|) without opening the edge total.

    Binary search over k: each probe opens only the sign of ``B|V| - k*T``.
    The sequence of opened bits is a function of the resulting k.
    """
    total = counts.sum(axis=-1) if counts.shape else counts
    budget = B * num_vertices
    if budget >= 1 << (sess.width - 1):
        raise ValueError("B*|V| too large for the lane width")
    lo, hi = 1, num_vertices
    while lo < hi:
        mid = (lo + hi + 1) // 2
        over = C.sign_bit(sess, budget - total * mid)
        if int(sess.reveal(over)):
            hi = mid - 1
        else:
            lo = mid
    return lo


def compare_exchange(sess: Session, a: BoolShares, b: BoolShares, key_lane: int = 0):
    """Sort each pair of records by key: returns (min, max), lanes travel together."""
    cond = C.gt(sess, a[..., key_lane], b[..., key_lane])
    d = C.mask_select(sess, cond, a ^ b)
    return a ^ d, b ^ d


def merge_network(m1: int, m2: int):
    """Odd-even merge of sorted runs of lengths m1, m2 laid out as [run1, run2].

    Returns (size, offset, layers): the network works on ``size`` slots where
    run1 occupies ``[offset, offset+m1)`` preceded by -inf sentinels, run2 follows
    at ``M`` trailed by +inf sentinels.  Comparators touching a sentinel are
    resolved in plaintext by the caller; the rest are grouped into layers.
    """
    M = 1
    while M < max(m1, m2):
        M *= 2
    comps = []

    def merge(lo, hi, r):
        step = r * 2
        if step < hi - lo:
            merge(lo, hi, step)
            merge(lo + r, hi, step)
            comps.extend((i, i + r) for i in range(lo + r, hi - r, step))
        else:
            comps.append((lo, lo + r))

    merge(0, 2 * M - 1, 1)
    depth = [0] * (2 * M)
    layers: list[list[tuple[int, int]]] = []
    for i, j in comps:
        d = max(depth[i], depth[j])
        if d == len(layers):
            layers.append([])
        layers[d].append((i, j))
        depth[i] = depth[j] = d + 1
    return 2 * M, M - m1, layers


def merge_runs(sess: Session, runs: list[BoolShares], key_lane: int = 0) -> BoolShares:
    """Merge sorted runs (shape (..., m_r, R)) into one sorted run along axis -2.

    Runs are merged pairwise in a tree; all merges of one tree level share each
    comparator layer, so a layer costs one comparison and one select.
    """
    runs = list(runs)
    if not runs:
        raise ValueError("nothing to merge")
    lead = runs[0].shape[:-2]
    R = runs[0].shape[-1]
    w = runs[0].width
    while len(runs) > 1:
        pairs = [(runs[i], runs[i + 1]) for i in range(0, len(runs) - 1, 2)]
        leftover = [runs[-1]] if len(runs) % 2 else []
        # one buffer holding every pair's network, sentinels as zero records
        local_parts, next_parts, kinds, comps_by_layer, spans = [], [], [], [], []
        base = 0
        for a, b in pairs:
            m1, m2 = a.shape[-2], b.shape[-2]
            size, off, layers = merge_network(m1, m2)
            half = size // 2
            kind = np.zeros(size, dtype=np.int8)
            kind[:off] = -1
            kind[half + m2:] = 1
            pad_lo = BoolShares.zeros(lead + (off, R), w)
            pad_hi = BoolShares.zeros(lead + (half - m2, R), w)
            seg = BoolShares.concat([pad_lo, a, b, pad_hi], axis=-2)
            local_parts.append(seg.local)
            next_parts.append(seg.next)
            kinds.append(kind)
            for d, layer in enumerate(layers):
                if d == len(comps_by_layer):
                    comps_by_layer.append([])
                comps_by_layer[d].extend((i + base, j + base) for i, j in layer)
            spans.append((base, size))
            base += size
        ax = len(lead) + 1
        local = np.concatenate(local_parts, axis=ax)
        nxt = np.concatenate(next_parts, axis=ax)
        kind = np.concatenate(kinds)
        for layer in comps_by_layer:
            secure_i, secure_j, swap_i, swap_j = [], [], [], []
            for i, j in layer:
                if kind[i] == 0 and kind[j] == 0:
                    secure_i.append(i)
                    secure_j.append(j)
                elif kind[i] > kind[j]:
                    swap_i.append(i)
                    swap_j.append(j)
            if swap_i:
                si, sj = np.array(swap_i), np.array(swap_j)
                for arr in (local, nxt):
                    tmp = arr[..., si, :].copy()
                    arr[..., si, :] = arr[..., sj, :]
                    arr[..., sj, :] = tmp
                kind[si], kind[sj] = kind[sj], kind[si].copy()
            if secure_i:
                si, sj = np.array(secure_i), np.array(secure_j)
                buf = BoolShares(local, nxt, w)
                lo, hi = compare_exchange(sess, buf[..., si, :], buf[..., sj, :], key_lane)
                local[..., si, :], nxt[..., si, :] = lo.local, lo.next
                local[..., sj, :], nxt[..., sj, :] = hi.local, hi.next
        merged = []
        buf = BoolShares(local, nxt, w)
        for start, size in spans:
            real = np.flatnonzero(kind[start:start + size] == 0) + start
            assert real.size and np.all(np.diff(real) == 1)
            merged.append(buf[..., real[0]:real[-1] + 1, :].materialize())
        runs = merged + leftover
    return runs[0]


@dataclass
class PartitionedGraph:
    """Secret-shared b x b x l x (1+A) record array, every block sorted by key."""
    config: GlobalConfig
    blocks: BoolShares = field(repr=False)

    @property
    def b(self) -> int:
        return self.blocks.shape[0]

    @property
    def l(self) -> int:
        return self.blocks.shape[2]


def integrate(sess: Session, provider_shares: list[BoolShares], config: GlobalConfig) -> PartitionedGraph:
    """Merge N providers' sorted blocks into one aligned, sorted partitioned graph."""
    if not provider_shares:
        raise ValueError("no provider data")
    b, R = config.b, config.record_lanes
    for s in provider_shares:
        if s.shape[:2] != (b, b) or s.shape[3] != R or s.width != config.width:
            raise ValueError(f"provider partition shape {s.shape} does not match the configuration")
    return PartitionedGraph(config, merge_runs(sess, provider_shares))
