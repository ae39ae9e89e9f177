"""Recursive square-root ORAM over secret-shared blocks (read-only).

Layout for ``n`` blocks, pack factor ``P`` and epoch length ``T``:

* if ``n <= T`` the blocks are kept in a single scannable base level and an
  access is a one-hot dot product;
* otherwise the data is padded to a multiple of ``P**L`` (``L`` the smallest
  depth with ``ceil(n / P**L) <= T``) and shuffled with ShuffleMem.  Its
  permutation representation is packed ``P`` indices per element and shuffled
  again, level after level, until at most ``T`` packed elements remain.  The
  last permutation representation is the base level: a scannable array of
  physical positions with secret ``Used`` bits.

Every shuffled level therefore holds more than ``T`` elements, so an epoch of
``T`` accesses can always find an untouched element for a fake access.
"""
import math
from dataclasses import dataclass

import numpy as np

from .mpc import circuits as C
from .mpc.session import Session
from .mpc.shares import BoolShares
from .shuffle import shuffle_mem


@dataclass(frozen=True)
class OramParams:
    n: int
    pack: int = 4
    period: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ORAM needs at least one element")
        if self.pack < 2 or self.pack & (self.pack - 1):
            raise ValueError("pack factor must be a power of two >= 2")
        if self.period is not None and not 1 <= self.period <= self.n:
            raise ValueError("period must lie in [1, n]")

    @property
    def T(self) -> int:
        return self.period if self.period is not None else math.isqrt(self.n - 1) + 1


def _public_shares(values, width) -> BoolShares:
    """Trivial sharing of a public constant (component 0 = value)."""
    values = np.asarray(values, dtype=np.uint64)
    return BoolShares.zeros(values.shape, width) ^ values


class BaseLevel:
    """Directly scanned level: ``data[j]`` is tagged ``tags[j]``; ``used`` bits are secret."""

    def __init__(self, data: BoolShares, tags: BoolShares, used: BoolShares, entries: int):
        self.data = data
        self.tags = tags
        self.used = used
        self.entries = entries

    @classmethod
    def fresh(cls, data: BoolShares, entries: int | None = None):
        f = data.shape[0]
        return cls(data, _public_shares(np.arange(f), data.width),
                   BoolShares.zeros((f,), data.width), entries if entries is not None else f)

    @property
    def size(self) -> int:
        return self.data.shape[0]


class ShuffledLevel:
    def __init__(self, shuffled: BoolShares, tags: BoolShares, period: int):
        self.shuffled = shuffled
        self.tags = tags
        self.used = np.zeros(shuffled.shape[0], dtype=bool)
        block = shuffled.shape[1:]
        self._stash_local = np.zeros((3, period) + block, dtype=np.uint64)
        self._stash_next = np.zeros_like(self._stash_local)
        self._stash_tag_local = np.zeros((3, period), dtype=np.uint64)
        self._stash_tag_next = np.zeros_like(self._stash_tag_local)
        self.stash_len = 0

    @property
    def size(self) -> int:
        return self.shuffled.shape[0]

    def stash(self) -> tuple[BoolShares, BoolShares]:
        t, w = self.stash_len, self.shuffled.width
        return (BoolShares(self._stash_tag_local[:, :t], self._stash_tag_next[:, :t], w),
                BoolShares(self._stash_local[:, :t], self._stash_next[:, :t], w))

    def push(self, tag: BoolShares, block: BoolShares):
        t = self.stash_len
        if t >= self._stash_local.shape[1]:
            raise RuntimeError("stash overflow: epoch accounting bug")
        self._stash_tag_local[:, t] = tag.local
        self._stash_tag_next[:, t] = tag.next
        self._stash_local[:, t] = block.local
        self._stash_next[:, t] = block.next
        self.stash_len += 1


def first_unused_steps(used: BoolShares):
    """One-hot of the first 0 in ``used`` (last axis): Hillis-Steele prefix OR, then a differential XOR."""
    f = used.shape[-1]
    w = used.width
    zero_col = BoolShares.zeros(used.shape[:-1] + (1,), w)
    fz = BoolShares.concat([zero_col, (used ^ np.uint64(1))[..., :f - 1]], axis=-1)
    s = 1
    while s < f:
        a, b = fz[..., s:], fz[..., :f - s]
        ab, = yield [(a, b)]
        fz = BoolShares.concat([fz[..., :s], a ^ b ^ ab], axis=-1)
        s *= 2
    fz = BoolShares.concat([fz, zero_col ^ np.uint64(1)], axis=-1)
    return fz[..., :f] ^ fz[..., 1:]


def pos_base_mask(sess: Session, used: BoolShares, tags: BoolShares, index: BoolShares,
                  fake: BoolShares) -> BoolShares:
    """One-hot selection of a base-level slot, vectorised over leading batch axes.

    ``fake == 0`` selects the slot tagged ``index``; ``fake == 1`` selects the
    first slot whose Used bit is 0.  ``used``/``tags`` have shape ``(..., F)``,
    ``index`` and ``fake`` shape ``(...)``.  The prefix OR and the tag
    comparison share rounds.
    """
    f = used.shape[-1]
    fu, s1 = C.drive(sess, C.parallel_steps(
        first_unused_steps(used),
        C.eq_steps(tags, index[..., None].broadcast_to(tags.shape), bits=max(f - 1, 1).bit_length())))
    return C.mux(sess, fake, fu, s1)


def _or_steps(x: BoolShares, y: BoolShares):
    xy, = yield [(x, y)]
    return x ^ y ^ xy


def _take_base(sess: Session, level: BaseLevel, mask: BoolShares) -> int:
    """Mark the masked slot used and reveal its entry (the OR and the dot share a round)."""
    level.used, picked = C.drive(sess, C.parallel_steps(_or_steps(level.used, mask),
                                                        C.dot_steps(level.data, mask)))
    return int(sess.reveal(picked))


def get_pos_base(sess: Session, level: BaseLevel, index: BoolShares, fake: BoolShares) -> int:
    """Translate a secret index through the base level and reveal the physical position."""
    return _take_base(sess, level, pos_base_mask(sess, level.used, level.tags, index, fake))


def get_pos_base_reference(used, data, index: int, fake: bool) -> int:
    """Plaintext linear scan with the same semantics as :func:`get_pos_base`."""
    if fake:
        for j, u in enumerate(used):
            if not u:
                return int(data[j])
        raise ValueError("no unused slot left")
    return int(data[index])


class SqrtOram:
    """Read-only square-root ORAM; one instance belongs to one session.

    :param sess: session that runs every build, access and rebuild.
    :param data: secret blocks, shape ``(n, *block)``.
    :param params: pack factor and epoch length; defaults ``P=4``, ``T=ceil(sqrt n)``.
    """

    def __init__(self, sess: Session, data: BoolShares, params: OramParams | None = None):
        self.sess = sess
        self.params = params or OramParams(data.shape[0])
        if self.params.n != data.shape[0]:
            raise ValueError("params.n does not match the data")
        self._source = data
        self.epoch = -1
        self.trace: list[tuple[int, tuple[int, ...]]] = []
        self.build()

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def T(self) -> int:
        return self.params.T

    @property
    def level_sizes(self) -> list[int]:
        return [lvl.size for lvl in self.levels] + [self.base.entries]

    def build(self):
        """(Re)build every level with fresh shuffles; resets stashes and the epoch counter."""
        data, P, T = self._source, self.params.pack, self.T
        w = data.width
        self.epoch += 1
        self.accesses = 0
        self.levels: list[ShuffledLevel] = []
        n = data.shape[0]
        if n <= T:
            self.base = BaseLevel.fresh(data)
            return
        depth = 1
        while -(-n // P ** depth) > T:
            depth += 1
        span = P ** depth
        padded = -(-n // span) * span
        if padded > n:
            data = BoolShares.concat([data, BoolShares.zeros((padded - n,) + data.shape[1:], w)])
        cur = data
        while True:
            size = cur.shape[0]
            block = cur.shape[1:]
            flat = cur.reshape(size, -1)
            tagged = BoolShares.concat([flat, _public_shares(np.arange(size), w)[:, None]], axis=1)
            shuffled, rep = shuffle_mem(self.sess, tagged)
            m = flat.shape[1]
            self.levels.append(ShuffledLevel(shuffled[:, :m].reshape((size,) + block),
                                             shuffled[:, m], T))
            if size // P <= T:
                self.base = BaseLevel.fresh(rep, entries=size // P)
                return
            cur = rep.reshape(size // P, P)

    rebuild = build

    def access(self, index: BoolShares) -> BoolShares:
        """Return a sharing of ``data[index]``; the index stays secret."""
        sess = self.sess
        if index.shape not in ((), (1,)):
            raise ValueError("access takes a single secret index")
        index = index.reshape(())
        if not self.levels:
            onehot = C.eq(sess, self.base.tags, index.broadcast_to(self.base.tags.shape),
                          bits=max(self.n - 1, 1).bit_length())
            self.accesses += 1
            return C.oblivious_dot(sess, self.base.data, onehot)
        if self.accesses >= self.T:
            self.build()

        P = self.params.pack
        log_p = P.bit_length() - 1
        depth = len(self.levels)
        t = self.accesses
        w = index.width
        h = [index >> (k * log_p) for k in range(depth)]
        base = self.base

        # One batched comparison covers every stash scan, every lane selector
        # and the base-level tag match.
        cmp_left, cmp_right = [], []
        for k in range(depth):
            if t:
                cmp_left.append(self.levels[k].stash()[0])
                cmp_right.append(h[k].broadcast_to((t,)))
        for k in range(1, depth):
            cmp_left.append((h[k - 1] & np.uint64(P - 1)).broadcast_to((P,)))
            cmp_right.append(_public_shares(np.arange(P), w))
        cmp_left.append(base.tags)
        cmp_right.append(h[depth - 1].broadcast_to(base.tags.shape))
        bits = (self.levels[0].size - 1).bit_length()

        def index_side():
            hits = yield from C.eq_steps(BoolShares.concat(cmp_left), BoolShares.concat(cmp_right), bits)
            off = depth * t
            lane_hot = [None] + [hits[off + (k - 1) * P:off + k * P] for k in range(1, depth)]
            s1 = hits[off + (depth - 1) * P:]
            if not t:
                zero = BoolShares.zeros((), w)
                return [zero] * depth, None, lane_hot, [None] * depth, s1
            stash_hits = [hits[k * t:(k + 1) * t] for k in range(depth)]
            found_all, (stash_vals, stash_lanes) = yield from C.parallel_steps(
                C.or_fold_steps(BoolShares.stack(stash_hits)),
                _stash_lane_steps(self.levels, stash_hits, lane_hot))
            found = [found_all[k] for k in range(depth)]
            # found[k-1] implies found[k], so "found here, not one level down" is a XOR
            chosen = [found[k] ^ found[k - 1] for k in range(1, depth)]
            gates = []
            for k in range(1, depth):
                gates.append((C.spread_bit(chosen[k - 1] ^ np.uint64(1), (P,)), lane_hot[k]))
                gates.append((C.spread_bit(chosen[k - 1], ()), stash_lanes[k]))
            outs = (yield gates) if gates else []
            sel = [None] + outs[0::2]
            from_stash = [None] + outs[1::2]
            return found, stash_vals[0], sel, from_stash, s1

        fu, (found, stash_val0, sel, from_stash, s1) = C.drive(
            sess, C.parallel_steps(first_unused_steps(base.used), index_side()))
        p = _take_base(sess, base, C.mux(sess, found[depth - 1], fu, s1))
        positions = [0] * depth
        result = None
        for k in range(depth - 1, -1, -1):
            lvl = self.levels[k]
            positions[k] = p
            if lvl.used[p]:
                raise RuntimeError("physical index revealed twice in one epoch")
            lvl.used[p] = True
            fetched = lvl.shuffled[p]
            if k > 0:
                lane = C.oblivious_dot(sess, fetched, sel[k])
                if t:
                    lane = lane ^ from_stash[k]
                p = int(sess.reveal(lane))
            else:
                result = fetched if not t else C.mux(sess, found[0], stash_val0, fetched)
            lvl.push(lvl.tags[positions[k]], fetched)
        self.accesses += 1
        self.trace.append((self.epoch, tuple(positions)))
        return result


def _stash_lane_steps(levels, stash_hits, lane_hot):
    """Stash hits at every level, then the hit's lane for levels above 0 (two rounds)."""
    pairs = [(lvl.stash()[1], hit) for lvl, hit in zip(levels, stash_hits)]
    outs = yield [(C.spread_bit(hit, data.shape), data) for data, hit in pairs]
    vals = [o.xor_reduce(axis=0) for o in outs]
    if len(levels) == 1:
        return vals, [None]
    outs = yield [(C.spread_bit(lane_hot[k], (len(lane_hot[k]),)), vals[k]) for k in range(1, len(levels))]
    return vals, [None] + [o.xor_reduce(axis=0) for o in outs]
