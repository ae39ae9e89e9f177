import random
from collections import Counter

import numpy as np
import pytest

from goram.baseline import PlainGraph
from goram.generators import split_edges, uniform_graph
from goram.graph import (
    EdgeParseError, EdgeRecord, GlobalConfig, ProviderShareBundle, ShareFileError, chunk_of,
    combine_trio, compare_exchange, integrate, local_process, merge_runs, optimal_k,
    parse_edge_list, read_share_file, records_to_edges, secure_config_k, share_partition,
    write_share_file,
)
from goram.graph.integrate import merge_network
from goram.mpc import CLIENT, Session


def test_chunk_of():
    assert chunk_of(1, 2) == 1
    assert chunk_of(2, 2) == 1
    assert chunk_of(7, 2) == 4
    with pytest.raises(ValueError):
        chunk_of(0, 2)
    with pytest.raises(ValueError):
        chunk_of(9, 2, 8)


def test_config_validation():
    assert GlobalConfig(10, 3).b == 4
    with pytest.raises(ValueError):
        GlobalConfig(10, 0)
    with pytest.raises(ValueError):
        GlobalConfig(10, 11)
    with pytest.raises(ValueError):
        GlobalConfig(10, 2, width=32)


def test_local_process_example():
    lp = local_process([(1, 2), (1, 3), (2, 5), (7, 8)], 2, 8)
    assert lp.l == 1
    want = {(1, 1): [(1, 2)], (1, 2): [(1, 3)], (1, 3): [(2, 5)], (4, 4): [(7, 8)]}
    for i in range(1, 5):
        for j in range(1, 5):
            got = [(e.src, e.dst) for e in lp.block(i, j)]
            assert got == want.get((i, j), [])
            if (i, j) not in want:
                assert not lp.records[i - 1, j - 1].any()


def test_local_process_empty_and_pad():
    lp = local_process([], 2, 8, extra_pad=1)
    assert lp.l == 1 and not lp.records.any()
    assert local_process([], 2, 8).l == 1
    assert local_process([(1, 2)], 2, 8, extra_pad=3).l == 4


def test_local_process_sorting_and_dummies_first():
    lp = local_process([(2, 1), (1, 2), (1, 1), (3, 3)], 2, 4)
    assert [(e.src, e.dst) for e in lp.block(1, 1)] == [(1, 1), (1, 2), (2, 1)]
    blk = lp.records[1, 1, :, 0]
    assert list(blk[:2]) == [0, 0] and blk[2] == (3 << 32) | 3


def test_local_process_rejects_out_of_range():
    with pytest.raises(ValueError):
        local_process([(1, 9)], 2, 8)
    with pytest.raises(ValueError):
        local_process([(1, 2, 5, 6)], 2, 8, attr_lanes=1)


def test_partition_totality_random():
    rng = random.Random(0)
    for _ in range(20):
        V = rng.randint(1, 40)
        k = rng.randint(1, V)
        edges = [(rng.randint(1, V), rng.randint(1, V), rng.randint(0, 99)) for _ in range(rng.randint(0, 60))]
        lp = local_process(edges, k, V)
        b = lp.config.b
        seen = Counter()
        for i in range(1, b + 1):
            for j in range(1, b + 1):
                keys = lp.records[i - 1, j - 1, :, 0]
                assert np.all(keys[:-1] <= keys[1:])
                for e in lp.block(i, j):
                    assert (chunk_of(e.src, k), chunk_of(e.dst, k)) == (i, j)
                    seen[(e.src, e.dst, e.attrs[0])] += 1
        assert seen == Counter(edges)


def test_parse_edge_list(tmp_path):
    f = tmp_path / "e.txt"
    f.write_text("# header\n1,2\n3, 4, 99  # comment\n\n5,6,1\n")
    es = parse_edge_list(f, attr_lanes=1)
    assert es == [EdgeRecord(1, 2, (0,)), EdgeRecord(3, 4, (99,)), EdgeRecord(5, 6, (1,))]
    for bad, line in [("1,2\n0,3\n", 2), ("1\n", 1), ("1,x\n", 1), ("1,2,3,4\n", 1), ("-1,2\n", 1)]:
        f.write_text(bad)
        with pytest.raises(EdgeParseError) as ei:
            parse_edge_list(f, attr_lanes=1)
        assert ei.value.line_no == line
        assert f"line {line}" in str(ei.value)


def test_share_bundles_roundtrip(tmp_path):
    lp = local_process([(1, 2, 5), (1, 3, 9), (4, 4, 1)], 2, 4)
    bundles = share_partition(lp, b"prov")
    paths = []
    for bnd in bundles:
        p = tmp_path / f"x.party{bnd.party}.gora"
        write_share_file(p, bnd)
        paths.append(p)
    back = [read_share_file(p) for p in paths]
    sh = combine_trio(back)
    assert np.array_equal(Session().reveal(sh), lp.records)
    # any two bundles reconstruct: party 1 holds (x0, x1), party 3 holds (x2, x0)
    assert np.array_equal(back[0].local ^ back[0].next ^ back[2].local, lp.records)
    # a single bundle exposes only the header values
    h = back[1]
    assert (h.b, h.l, h.attr_lanes, h.width, h.num_vertices, h.k) == (2, 1, 1, 64, 4, 2)
    assert share_partition(lp, b"prov")[0].to_bytes() == bundles[0].to_bytes()


def test_share_file_corruption_detected(tmp_path):
    lp = local_process([(1, 2, 5), (1, 3, 9), (4, 4, 1)], 2, 4)
    good = [b.to_bytes() for b in share_partition(lp, b"c")]
    rng = random.Random(1)
    positions = list(range(len(good[0])))
    for victim in range(3):
        for pos in rng.sample(positions, 40) + list(range(32)):
            raw = bytearray(good[victim])
            raw[pos] ^= 1 << rng.randrange(8)
            files = list(good)
            files[victim] = bytes(raw)
            with pytest.raises(ShareFileError):
                combine_trio([ProviderShareBundle.from_bytes(x) for x in files])
    with pytest.raises(ShareFileError):
        ProviderShareBundle.from_bytes(good[0][:-1])
    with pytest.raises(ShareFileError):
        combine_trio([ProviderShareBundle.from_bytes(good[0])] * 3)


def test_secure_config_k_examples(sess):
    def k_of(counts, B, V):
        return secure_config_k(sess, sess.share_input(CLIENT, np.array(counts), arithmetic=True), B, V)
    assert k_of([65536], 1024, 4096) == 64
    assert k_of([30000, 40000], 1, 100) == 1
    assert k_of([0, 0], 1024, 50) == 50
    assert k_of([10, 20, 30], 16, 1000) == optimal_k(16, 1000, 60)


def test_compare_exchange(sess):
    a = sess.share_input(1, [5, 50])
    b = sess.share_input(2, [3, 30])
    lo, hi = compare_exchange(sess, a, b)
    assert list(sess.reveal(lo)) == [3, 30] and list(sess.reveal(hi)) == [5, 50]
    a = sess.share_input(1, [4, 1])
    b = sess.share_input(2, [4, 2])
    lo, hi = compare_exchange(sess, a, b)
    assert list(sess.reveal(lo)) == [4, 1] and list(sess.reveal(hi)) == [4, 2]
    rng = np.random.default_rng(3)
    ka, kb = rng.integers(0, 9, 200, dtype=np.uint64), rng.integers(0, 9, 200, dtype=np.uint64)
    pa, pb = rng.integers(0, 1 << 60, (200, 2), dtype=np.uint64), rng.integers(0, 1 << 60, (200, 2), dtype=np.uint64)
    ra, rb = np.column_stack([ka, pa]), np.column_stack([kb, pb])
    lo, hi = compare_exchange(sess, sess.share_input(1, ra), sess.share_input(3, rb))
    swap = (ka > kb)[:, None]
    assert np.array_equal(sess.reveal(lo), np.where(swap, rb, ra))
    assert np.array_equal(sess.reveal(hi), np.where(swap, ra, rb))


def test_merge_network_sorts_all_01_inputs():
    # 0-1 principle on the symbolic network, sentinel handling included
    for m1 in range(1, 7):
        for m2 in range(1, 7):
            size, off, layers = merge_network(m1, m2)
            for bits in range(1 << (m1 + m2)):
                a = sorted((bits >> i) & 1 for i in range(m1))
                b = sorted((bits >> (m1 + i)) & 1 for i in range(m2))
                arr = [-1] * off + a + b + [2] * (size // 2 - m2)
                for layer in layers:
                    for i, j in layer:
                        if arr[i] > arr[j]:
                            arr[i], arr[j] = arr[j], arr[i]
                assert arr == sorted(arr)


def test_merge_runs_random(sess):
    rng = random.Random(5)
    for _ in range(10):
        lens = [rng.randint(1, 7) for _ in range(rng.randint(1, 5))]
        runs, vals = [], []
        for m in lens:
            v = sorted(rng.randint(0, 15) for _ in range(m))
            vals += v
            arr = np.array([[x, 100 + x] for x in v], dtype=np.uint64)[None, None]
            runs.append(sess.share_input(1, arr))
        out = sess.reveal(merge_runs(sess, runs))
        assert list(out[0, 0, :, 0]) == sorted(vals)
        assert np.array_equal(out[0, 0, :, 1], out[0, 0, :, 0] + 100)


def _integrate(sess, provider_edges, V, k, pads=None):
    trios = []
    for i, edges in enumerate(provider_edges):
        lp = local_process(edges, k, V, (pads or [0] * len(provider_edges))[i])
        trios.append(combine_trio(share_partition(lp, b"p%d" % i)))
    cfg = GlobalConfig(V, k)
    return integrate(sess, trios, cfg), trios


def test_integrate_examples(sess):
    g, trios = _integrate(sess, [[(1, 2), (3, 4)]], 4, 2)
    assert np.array_equal(sess.reveal(g.blocks), sess.reveal(trios[0]))
    g, _ = _integrate(sess, [[(1, 2)], [(1, 1)]], 4, 2)
    blk = sess.reveal(g.blocks)[0, 0, :, 0]
    assert list(blk) == [(1 << 32) | 1, (1 << 32) | 2]


def test_integrate_random_three_providers(sess):
    edges = uniform_graph(32, 200, seed=4, max_attr=50)
    parts = split_edges(edges, 3, seed=5)
    g, _ = _integrate(sess, parts, 32, 4, pads=[0, 2, 1])
    rec = sess.reveal(g.blocks)
    assert g.l == sum(local_process(p, 4, 32, e).l for p, e in zip(parts, [0, 2, 1]))
    got = Counter()
    for i in range(g.b):
        for j in range(g.b):
            keys = rec[i, j, :, 0]
            assert np.all(keys[:-1] <= keys[1:])
            for e in records_to_edges(rec[i, j]):
                assert (chunk_of(e.src, 4) - 1, chunk_of(e.dst, 4) - 1) == (i, j)
                got[(e.src, e.dst, e.attrs)] += 1
    assert got == Counter((e.src, e.dst, e.attrs) for e in edges)


def test_integrate_single_provider_skips_merge():
    def rounds(n):
        s = Session(9)
        provider = [uniform_graph(16, 30, seed=i) for i in range(n)]
        m0 = s.metrics()
        _integrate(s, provider, 16, 4)
        return (s.metrics() - m0).rounds
    assert rounds(1) == 0
    assert rounds(2) > 0


def test_integrate_rejects_mismatch(sess):
    a = combine_trio(share_partition(local_process([(1, 2)], 2, 8), b"a"))
    b = combine_trio(share_partition(local_process([(1, 2)], 4, 8), b"b"))
    with pytest.raises(ValueError):
        integrate(sess, [a, b], GlobalConfig(8, 2))


def test_plain_oracle_small():
    g = PlainGraph([(1, 2, 5), (1, 2, 6), (1, 3, 9), (2, 3, 1), (3, 1, 2)])
    assert g.edge_exist(1, 2) and not g.edge_exist(2, 1)
    assert g.out_degree(1) == 3 and g.unique_out_degree(1) == 2
    assert g.neighbors(1) == {2, 3} and g.neighbors(4) == set()
    assert g.range_count(1, 7) == 2
    assert g.cycle([1, 2, 3]) and g.cycle([1, 3, 2]) and not g.cycle([1, 2, 4])
    empty = PlainGraph([])
    assert not empty.edge_exist(1, 1) and empty.out_degree(1) == 0
