import json
import random

import pytest

from goram.baseline import PlainGraph
from goram.cli import main
from goram.engine import QUERY_KINDS, Engine, engine_answer, oracle_answer
from goram.generators import split_edges, uniform_graph
from goram.graph import combine_trio, local_process, parse_edge_list, read_share_file
from goram.mpc import Session


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    lines = [json.loads(l) for l in out.out.splitlines() if l.strip()]
    return code, lines, out.err


def write_edges(path, edges):
    path.write_text("# src,dst,ts\n" + "".join(f"{e.src},{e.dst},{e.attrs[0]}\n" for e in edges))


@pytest.fixture
def toy(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    a.write_text("1,2,5\n1,3,9\n2,3,1\n")
    b.write_text("3,1,4\n1,2,7\n")
    return tmp_path, a, b


def test_configure(capsys, toy):
    tmp, a, b = toy
    code, out, _ = run(capsys, "configure", a, b, "--vertices", 8, "--threshold-b", 4)
    assert code == 0 and out[0]["k"] == 6 and out[0]["b"] == 2
    code, out, _ = run(capsys, "configure", "--counts", "0,0", "--vertices", 8)
    assert out[0]["k"] == 8


def test_pipeline_and_share_files(capsys, toy):
    tmp, a, b = toy
    for f in (a, b):
        code, out, _ = run(capsys, "prepare", f, "--vertices", 4, "--chunk-size", 2, "--out", tmp / "sh", "--seed", 3)
        assert code == 0 and len(out[0]["files"]) == 3
    heads = {(read_share_file(p).b, read_share_file(p).l) for p in (tmp / "sh").glob("a.*.gora")}
    assert heads == {(2, 2)}
    # reconstruct equals local processing
    trio = [read_share_file(tmp / "sh" / f"a.party{i}.gora") for i in (1, 2, 3)]
    want = local_process(parse_edge_list(a, 1), 2, 4).records
    assert (Session().reveal(combine_trio(trio)) == want).all()
    before = (tmp / "sh" / "a.party1.gora").read_bytes()
    run(capsys, "prepare", a, "--vertices", 4, "--chunk-size", 2, "--out", tmp / "sh", "--seed", 3)
    assert (tmp / "sh" / "a.party1.gora").read_bytes() == before

    code, out, _ = run(capsys, "init", tmp / "sh", "--out", tmp / "eng.pkl", "--slices", 2)
    assert code == 0 and out[0]["rounds"] > 0 and out[0]["l"] == 3
    plain = PlainGraph(parse_edge_list(a, 1) + parse_edge_list(b, 1))
    cases = [("edge-exist", [1, 2]), ("edge-exist", [2, 1]), ("neighbors-count", [1]),
             ("neighbors-get", [1]), ("unique-neighbors-count", [1]), ("cycle", [1, 2, 3]),
             ("range-count", [1, 6])]
    for kind, ids in cases:
        code, out, _ = run(capsys, "query", kind, *ids, "--engine", tmp / "eng.pkl")
        assert code == 0
        args = tuple(ids) if kind != "range-count" else (ids[0], ids[1], 0)
        assert out[0]["result"] == oracle_answer(plain, kind, args), kind
        assert out[0]["rounds"] > 0


def test_init_single_provider_fewer_rounds(capsys, toy):
    tmp, a, b = toy
    for f in (a, b):
        run(capsys, "prepare", f, "--vertices", 4, "--chunk-size", 2, "--out", tmp / "sh")
    _, one, _ = run(capsys, "init", tmp / "sh" / "a.party1.gora", tmp / "sh" / "a.party2.gora",
                    tmp / "sh" / "a.party3.gora", "--out", tmp / "e1.pkl")
    _, two, _ = run(capsys, "init", tmp / "sh", "--out", tmp / "e2.pkl")
    assert one[0]["rounds"] < two[0]["rounds"]


def test_init_detects_corruption(capsys, toy):
    tmp, a, _ = toy
    run(capsys, "prepare", a, "--vertices", 4, "--chunk-size", 2, "--out", tmp / "sh")
    f = tmp / "sh" / "a.party2.gora"
    raw = bytearray(f.read_bytes())
    raw[50] ^= 0x10
    f.write_bytes(bytes(raw))
    code, _, err = run(capsys, "init", tmp / "sh", "--out", tmp / "e.pkl")
    assert code == 2 and "disagree" in err


def test_exit_codes(capsys, toy, tmp_path):
    tmp, a, _ = toy
    with pytest.raises(SystemExit) as ei:
        main(["bogus"])
    assert ei.value.code == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("1,2\n0,4\n")
    code, _, err = run(capsys, "prepare", bad, "--vertices", 4, "--chunk-size", 2, "--out", tmp / "x")
    assert code == 2 and "line 2" in err
    run(capsys, "prepare", a, "--vertices", 4, "--chunk-size", 2, "--out", tmp / "sh")
    run(capsys, "init", tmp / "sh", "--out", tmp / "e.pkl")
    code, _, err = run(capsys, "query", "neighbors-count", 9, "--engine", tmp / "e.pkl")
    assert code == 2
    code, _, _ = run(capsys, "query", "edge-exist", 1, "--engine", tmp / "e.pkl")
    assert code == 1


def test_seed_env_override(capsys, toy, monkeypatch):
    tmp, a, _ = toy
    run(capsys, "prepare", a, "--vertices", 4, "--chunk-size", 2, "--out", tmp / "s1", "--seed", 1)
    monkeypatch.setenv("GORAM_SEED", "2")
    run(capsys, "prepare", a, "--vertices", 4, "--chunk-size", 2, "--out", tmp / "s2", "--seed", 1)
    run(capsys, "prepare", a, "--vertices", 4, "--chunk-size", 2, "--out", tmp / "s3", "--seed", 7)
    p = "a.party1.gora"
    assert (tmp / "s1" / p).read_bytes() != (tmp / "s2" / p).read_bytes()
    assert (tmp / "s2" / p).read_bytes() == (tmp / "s3" / p).read_bytes()


def test_bench_report(capsys):
    argv = ["bench", "--vertices", 32, "--edges", 100, "--queries", 3, "--threshold-b", 16,
            "--compare-list", "--seed", 5]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out[0]["record"] == "graph"
    recs = out[1:]
    assert [r["kind"] for r in recs] == list(QUERY_KINDS)
    assert all(r["oracle_mismatches"] == 0 for r in recs)
    assert "goram_to_list_bytes" in recs[0]
    _, again, _ = run(capsys, *argv)
    strip = lambda rs: [{k: v for k, v in r.items() if "seconds" not in k} for r in rs]
    assert strip(out) == strip(again)


def test_end_to_end_random(capsys, tmp_path):
    rng = random.Random(3)
    for trial in range(3):
        V = rng.choice([8, 20])
        edges = uniform_graph(V, 3 * V, seed=trial, max_attr=30)
        parts = split_edges(edges, 2, seed=trial)
        for i, p in enumerate(parts):
            f = tmp_path / f"t{trial}p{i}.txt"
            write_edges(f, p)
            run(capsys, "prepare", f, "--vertices", V, "--chunk-size", 3, "--out", tmp_path / f"s{trial}")
        eng_file = tmp_path / f"e{trial}.pkl"
        assert run(capsys, "init", tmp_path / f"s{trial}", "--out", eng_file)[0] == 0
        plain = PlainGraph(edges)
        eng = Engine.load(eng_file)
        for kind in QUERY_KINDS:
            v = rng.randint(1, V)
            args = {"edge-exist": (v, rng.randint(1, V)), "cycle": (v, rng.randint(1, V), rng.randint(1, V)),
                    "range-count": (v, rng.randint(0, 30), 0)}.get(kind, (v,))
            assert engine_answer(eng, kind, args) == oracle_answer(plain, kind, args)
