"""Oblivious shuffling of block arrays, with and without the permutation representation.

Randomness schedule (fixed, drawn in this order from each pair's PRF stream):

* pair (S1, S2): Z12, ZL12, B~, pi12
* pair (S2, S3): Z23, ZL23, LC~, pi23
* pair (S3, S1): Z31, ZL31, A~, LA~, pi31

``oblivious_shuffle`` draws the same schedule minus the L-side values.
"""
import numpy as np

from .mpc.session import Session
from .mpc.shares import BoolShares


def permute(perm: np.ndarray, arr: np.ndarray) -> np.ndarray:
    """Move element ``i`` of ``arr`` to position ``perm[i]``."""
    out = np.empty_like(arr)
    out[perm] = arr
    return out


def inverse(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm), dtype=perm.dtype)
    return inv


class PairwisePermutations:
    """pi12, pi23, pi31 and their inverses, each drawn from one pair's seed."""

    def __init__(self, pi12, pi23, pi31):
        self.pi12, self.pi23, self.pi31 = pi12, pi23, pi31
        self.inv12, self.inv23, self.inv31 = inverse(pi12), inverse(pi23), inverse(pi31)

    def composed(self) -> np.ndarray:
        """pi = pi23 o pi31 o pi12 as a position map (test helper; no party knows it)."""
        return self.pi23[self.pi31[self.pi12]]


def _words(stream, shape):
    n = int(np.prod(shape, dtype=np.int64))
    return stream.words(n).reshape(shape)


def build_ranging_array(sess: Session, n: int) -> BoolShares:
    """Shares of L = [0, n): S1 masks L with its zero share, everyone forwards (one round)."""
    return sess.share_input(1, np.arange(n, dtype=np.uint64))


def _mask(sess, arr):
    return arr if sess.width == 64 else arr & np.uint64((1 << sess.width) - 1)


def shuffle_mem(sess: Session, data: BoolShares, return_perms: bool = False):
    """Shuffle ``data`` along axis 0 and build the shared permutation representation.

    Returns ``(shuffled, rep)`` where ``shuffled[rep[i]] == data[i]`` for all i.
    Three rounds in total: one to share L, two in the main protocol.
    """
    n = data.shape[0]
    if n < 1:
        raise ValueError("cannot shuffle an empty array")
    shape = data.shape
    L = build_ranging_array(sess, n)

    # what each server holds
    A1, B1 = data.local[0], data.next[0]
    C2 = data.next[1]
    LB2 = L.local[1]
    LC3, LA3 = L.local[2], L.next[2]

    k12, k23, k31 = sess.pair_stream(0, 1), sess.pair_stream(1, 2), sess.pair_stream(2, 0)
    Z12, ZL12, Bt = _mask(sess, _words(k12, shape)), _mask(sess, _words(k12, (n,))), _mask(sess, _words(k12, shape))
    pi12 = k12.permutation(n)
    Z23, ZL23, LCt = _mask(sess, _words(k23, shape)), _mask(sess, _words(k23, (n,))), _mask(sess, _words(k23, (n,)))
    pi23 = k23.permutation(n)
    Z31, ZL31 = _mask(sess, _words(k31, shape)), _mask(sess, _words(k31, (n,)))
    At, LAt = _mask(sess, _words(k31, shape)), _mask(sess, _words(k31, (n,)))
    pi31 = k31.permutation(n)
    perms = PairwisePermutations(pi12, pi23, pi31)

    # S1
    X1 = permute(pi12, A1 ^ B1 ^ Z12)
    X2 = permute(pi31, X1 ^ Z31)
    # S2
    Y1 = permute(pi12, C2 ^ Z12)
    LY1 = permute(perms.inv23, LB2 ^ ZL23)
    # S3
    LX1 = permute(perms.inv23, LC3 ^ LA3 ^ ZL23)
    LX2 = permute(perms.inv31, LX1 ^ ZL31)

    got = sess.round({(0, 1): X2, (1, 0): LY1, (1, 2): Y1, (2, 1): LX2})
    X2_at2, LY1_at1, Y1_at3, LX2_at2 = got[(0, 1)], got[(1, 0)], got[(1, 2)], got[(2, 1)]

    # S3
    Y2 = permute(pi31, Y1_at3 ^ Z31)
    Y3 = permute(pi23, Y2 ^ Z23)
    Ct2 = Y3 ^ At
    # S2
    X3 = permute(pi23, X2_at2 ^ Z23)
    Ct1 = X3 ^ Bt
    LX3 = permute(perms.inv12, LX2_at2 ^ ZL12)
    LBt2 = LX3 ^ LCt
    # S1
    LY2 = permute(perms.inv31, LY1_at1 ^ ZL31)
    LY3 = permute(perms.inv12, LY2 ^ ZL12)
    LBt1 = LY3 ^ LAt

    got = sess.round({(0, 1): LBt1, (1, 0): LBt2, (1, 2): Ct1, (2, 1): Ct2})
    Ct = got[(2, 1)] ^ Ct1  # S2's view; S3 computes the same value from got[(1, 2)] ^ Ct2
    LBt = got[(1, 0)] ^ LBt1

    shuffled = BoolShares(np.stack([At, Bt, Ct]), np.stack([Bt, Ct, At]), data.width)
    rep = BoolShares(np.stack([LAt, LBt, LCt]), np.stack([LBt, LCt, LAt]), data.width)
    if return_perms:
        return shuffled, rep, perms
    return shuffled, rep


def oblivious_shuffle(sess: Session, data: BoolShares, return_perms: bool = False):
    """Shuffle ``data`` along axis 0 under pi = pi23 o pi31 o pi12 (two rounds)."""
    n = data.shape[0]
    if n < 1:
        raise ValueError("cannot shuffle an empty array")
    shape = data.shape
    A1, B1 = data.local[0], data.next[0]
    C2 = data.next[1]

    k12, k23, k31 = sess.pair_stream(0, 1), sess.pair_stream(1, 2), sess.pair_stream(2, 0)
    Z12, Bt = _mask(sess, _words(k12, shape)), _mask(sess, _words(k12, shape))
    pi12 = k12.permutation(n)
    Z23 = _mask(sess, _words(k23, shape))
    pi23 = k23.permutation(n)
    Z31, At = _mask(sess, _words(k31, shape)), _mask(sess, _words(k31, shape))
    pi31 = k31.permutation(n)

    X2 = permute(pi31, permute(pi12, A1 ^ B1 ^ Z12) ^ Z31)
    Y1 = permute(pi12, C2 ^ Z12)
    got = sess.round({(0, 1): X2, (1, 2): Y1})
    Ct1 = permute(pi23, got[(0, 1)] ^ Z23) ^ Bt
    Ct2 = permute(pi23, permute(pi31, got[(1, 2)] ^ Z31) ^ Z23) ^ At
    got = sess.round({(1, 2): Ct1, (2, 1): Ct2})
    Ct = got[(2, 1)] ^ Ct1
    out = BoolShares(np.stack([At, Bt, Ct]), np.stack([Bt, Ct, At]), data.width)
    if return_perms:
        return out, PairwisePermutations(pi12, pi23, pi31)
    return out
