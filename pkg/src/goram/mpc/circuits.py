"""Boolean and arithmetic circuits built from the session's gates.

All functions are vectorised: one call costs a fixed number of rounds no
matter how many lanes it processes.  Bits ("secret bits") are carried in bit 0
of a :class:`BoolShares` lane.
"""
import numpy as np

from .shares import ArithShares, BoolShares


def _one_lane_bit(x: BoolShares) -> BoolShares:
    return x & np.uint64(1)


def _pad_last(x: BoolShares, n: int, fill: int) -> BoolShares:
    pad = n - x.shape[-1]
    if pad == 0:
        return x
    filler = BoolShares.zeros(x.shape[:-1] + (pad,), x.width)
    if fill:
        filler = filler ^ np.uint64(fill)
    return BoolShares.concat([x, filler], axis=-1)


def drive(sess, steps):
    """Run a step generator to completion, one AND round per yielded gate list.

    A step generator yields a list of ``(x, y)`` AND gates, receives their
    outputs, and finally returns its result.  Independent generators merged with
    :func:`parallel_steps` share rounds.
    """
    try:
        gates = next(steps)
        while True:
            gates = steps.send(sess.and_many(gates) if gates else [])
    except StopIteration as e:
        return e.value


def parallel_steps(*gens):
    """Step generator that runs ``gens`` in lockstep; returns their results as a list."""
    results = [None] * len(gens)
    pending = {}
    for i, g in enumerate(gens):
        try:
            pending[i] = next(g)
        except StopIteration as e:
            results[i] = e.value
    while pending:
        outs = yield [gate for req in pending.values() for gate in req]
        nxt, off = {}, 0
        for i, req in pending.items():
            got = outs[off:off + len(req)]
            off += len(req)
            try:
                nxt[i] = gens[i].send(got)
            except StopIteration as e:
                results[i] = e.value
        pending = nxt
    return results


def eq_steps(x: BoolShares, y, bits: int | None = None):
    d = ~(x ^ y)
    span = x.width if bits is None else min(x.width, 1 << max(bits - 1, 0).bit_length())
    s = span // 2
    while s >= 1:
        d, = yield [(d, d >> s)]
        s //= 2
    return _one_lane_bit(d)


def eq(sess, x: BoolShares, y, bits: int | None = None) -> BoolShares:
    """Lane-wise ``x == y``; ``y`` may be shares or public. log2(w) rounds.

    With ``bits`` the caller promises both sides are below ``2**bits`` (a public
    bound), and only the low bits are folded: ceil(log2 bits) rounds.
    """
    return drive(sess, eq_steps(x, y, bits))


def neq(sess, x: BoolShares, y, bits: int | None = None) -> BoolShares:
    return eq(sess, x, y, bits) ^ np.uint64(1)


def lt(sess, x: BoolShares, y) -> BoolShares:
    """Unsigned ``x < y`` via a log-depth generate/propagate prefix tree.

    At each level an aligned segment combines its high half (more significant)
    with its low half: ``G = G_hi | (P_hi & G_lo)`` where the two terms are
    disjoint, so OR is XOR.  1 + log2(w) rounds.
    """
    if not isinstance(y, BoolShares):
        y = BoolShares.zeros(x.shape, x.width) ^ np.asarray(y, dtype=np.uint64)
    p = ~(x ^ y)
    g = sess.and_(~x, y)
    s = 1
    while s < x.width:
        g_hi, p_hi = g >> s, p >> s
        if s * 2 < x.width:
            t, p = sess.and_many([(p_hi, g), (p_hi, p)])
        else:
            t = sess.and_(p_hi, g)
        g = g_hi ^ t
        s *= 2
    return _one_lane_bit(g)


def gt(sess, x: BoolShares, y) -> BoolShares:
    if not isinstance(y, BoolShares):
        y = BoolShares.zeros(x.shape, x.width) ^ np.asarray(y, dtype=np.uint64)
    return lt(sess, y, x)


def not_bit(b: BoolShares) -> BoolShares:
    return b ^ np.uint64(1)


def spread_bit(bit: BoolShares, shape) -> BoolShares:
    """Bit 0 of ``bit`` spread over whole lanes and broadcast to ``shape``."""
    ext = bit.sign_extend_bit()
    extra = len(shape) - len(bit.shape)
    if extra < 0 or shape[:len(bit.shape)] != bit.shape:
        raise ValueError(f"bit shape {bit.shape} does not prefix value shape {shape}")
    if extra:
        ext = ext.reshape(bit.shape + (1,) * extra).broadcast_to(shape)
    return ext


def mask_select(sess, bit: BoolShares, value: BoolShares) -> BoolShares:
    """``bit ? value : 0`` lane-wise; ``bit`` may cover a prefix of ``value``'s shape."""
    return sess.and_(spread_bit(bit, value.shape), value)


def mux_steps(cond: BoolShares, a: BoolShares, b: BoolShares):
    picked, = yield [(spread_bit(cond, a.shape), a ^ b)]
    return b ^ picked


def mux(sess, cond: BoolShares, a: BoolShares, b: BoolShares) -> BoolShares:
    """``cond ? a : b``, one round."""
    return b ^ mask_select(sess, cond, a ^ b)


def dot_steps(data: BoolShares, onehot: BoolShares):
    picked, = yield [(spread_bit(onehot, data.shape), data)]
    return picked.xor_reduce(axis=len(onehot.shape) - 1)


def oblivious_dot(sess, data: BoolShares, onehot: BoolShares) -> BoolShares:
    """Pick the element of ``data`` at the single hot lane of ``onehot``.

    ``onehot`` covers the leading axes of ``data``; the last of those axes is
    folded away.  One round.
    """
    return drive(sess, dot_steps(data, onehot))


def or_fold_steps(bits: BoolShares):
    n = bits.shape[-1]
    size = 1 << max(0, (n - 1).bit_length())
    x = _pad_last(bits, size, 0)
    while x.shape[-1] > 1:
        h = x.shape[-1] // 2
        a, b = x[..., :h], x[..., h:]
        ab, = yield [(a, b)]
        x = a ^ b ^ ab
    return x[..., 0]


def or_fold(sess, bits: BoolShares) -> BoolShares:
    """OR over the last axis; ceil(log2 n) rounds."""
    return drive(sess, or_fold_steps(bits))


def and_fold(sess, bits: BoolShares) -> BoolShares:
    n = bits.shape[-1]
    size = 1 << max(0, (n - 1).bit_length())
    x = _pad_last(bits, size, 1)
    while x.shape[-1] > 1:
        h = x.shape[-1] // 2
        x = sess.and_(x[..., :h], x[..., h:])
    return x[..., 0]


def _component_shares(comp: np.ndarray, j: int, cls, width):
    """Replicated sharing whose only non-zero component is ``comp`` at slot ``j``.

    Component j is known to parties j and j-1, so this is local.
    """
    c = np.zeros((3,) + comp.shape, dtype=np.uint64)
    c[j] = comp
    return cls.from_components(c, width)


def bit_to_arith(sess, bit: BoolShares) -> ArithShares:
    """Boolean bit shares to arithmetic shares of the same 0/1 value.

    The three component bits are lifted to arithmetic sharings locally and
    XOR-ed arithmetically (x ^ y = x + y - 2xy): two sequential products.
    """
    b = (bit & np.uint64(1)).components()
    b0, b1, b2 = (_component_shares(b[j], j, ArithShares, bit.width) for j in range(3))
    t = b0 + b1 - sess.mul(b0, b1) * 2
    return t + b2 - sess.mul(t, b2) * 2


def arith_to_bool(sess, x: ArithShares) -> BoolShares:
    """Arithmetic to boolean shares via a carry-save layer and a Kogge-Stone adder."""
    w = x.width
    c = x.components()
    a, b, d = (_component_shares(c[j], j, BoolShares, w) for j in range(3))
    ab = a ^ b
    s = ab ^ d
    t1, t2 = sess.and_many([(a, b), (d, ab)])
    carry = (t1 ^ t2) << 1
    p0 = s ^ carry
    g = sess.and_(s, carry)
    p = p0
    k = 1
    while k < w:
        if k * 2 < w:
            t, p_new = sess.and_many([(p, g << k), (p, p << k)])
            p = p_new
        else:
            t = sess.and_(p, g << k)
        g = g ^ t
        k *= 2
    return p0 ^ (g << 1)


def sign_bit(sess, x: ArithShares) -> BoolShares:
    """Most significant bit of an arithmetic share, as a boolean bit."""
    return arith_to_bool(sess, x) >> (x.width - 1)
