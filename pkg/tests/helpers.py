import random

import numpy as np

from goram.baseline import PlainGraph
from goram.engine import Engine
from goram.generators import split_edges, uniform_graph
from goram.mpc import oblivious_dot
from goram.oram import get_pos_base_reference, pos_base_mask


def toy_engine(provider_edges, V, k, seed=0, p=1, pad=0, attr_lanes=1, period=None):
    return Engine.from_edges(provider_edges, V, k=k, seed=seed, p=p, pad_extra=pad,
                             attr_lanes=attr_lanes, period=period)


def random_setup(V, E, N, seed, max_attr=64):
    edges = uniform_graph(V, E, seed=seed, max_attr=max_attr)
    return edges, split_edges(edges, N, seed=seed + 1), PlainGraph(edges, V)


def random_query(kind, rng: random.Random, V, edges, max_attr=64):
    if kind == "edge-exist":
        if edges and rng.random() < 0.5:
            e = rng.choice(edges)
            return (e.src, e.dst)
        return (rng.randint(1, V), rng.randint(1, V))
    if kind == "cycle":
        if edges and rng.random() < 0.3:
            e = rng.choice(edges)
            return (e.src, e.dst)
        return tuple(rng.randint(1, V) for _ in range(rng.choice([2, 3, 3, 4])))
    if kind == "range-count":
        v = rng.choice(edges).src if edges and rng.random() < 0.7 else rng.randint(1, V)
        return (v, rng.randint(0, max_attr), 0)
    v = rng.choice(edges).src if edges and rng.random() < 0.7 else rng.randint(1, V)
    return (v,)


def exhaustive_pos_base(sess, F: int, rng) -> bool:
    """Every Used pattern with a zero, both fake values, vs. the linear scan."""
    pats = np.array([[(m >> j) & 1 for j in range(F)] for m in range((1 << F) - 1)], dtype=np.uint64)
    rows = len(pats)
    used = np.concatenate([pats, pats])
    fake = np.concatenate([np.ones(rows, np.uint64), np.zeros(rows, np.uint64)])
    index = np.arange(2 * rows, dtype=np.uint64) % np.uint64(F)
    data = rng.integers(0, 1 << 40, size=(2 * rows, F), dtype=np.uint64)
    tags = np.tile(np.arange(F, dtype=np.uint64), (2 * rows, 1))
    sh_used = sess.share_input(1, used)
    mask = pos_base_mask(sess, sh_used, sess.share_input(2, tags), sess.share_input(3, index),
                         sess.share_input(1, fake))
    data_sh = sess.share_input(2, data)
    got = sess.reveal(oblivious_dot(sess, data_sh, mask))
    new_used = sess.reveal(sess.or_(sh_used, mask))
    for r in range(2 * rows):
        want = get_pos_base_reference(used[r], data[r], int(index[r]), bool(fake[r]))
        if int(got[r]) != want:
            return False
        chosen = np.flatnonzero(data[r] == want)[0]
        exp_used = used[r].copy()
        exp_used[chosen] = 1
        if not np.array_equal(new_used[r], exp_used):
            return False
    return True
