"""Provider-side 2d partitioning of an edge list into b x b aligned blocks."""
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAX_VERTEX = (1 << 31) - 1
KEY_SHIFT = 32
DST_MASK = (1 << KEY_SHIFT) - 1


class EdgeParseError(ValueError):
    def __init__(self, line_no: int, msg: str):
        super().__init__(f"line {line_no}: {msg}")
        self.line_no = line_no


@dataclass(frozen=True)
class EdgeRecord:
    src: int
    dst: int
    attrs: tuple = ()

    @property
    def key(self) -> int:
        return (self.src << KEY_SHIFT) | self.dst


def as_edge(e) -> EdgeRecord:
    if isinstance(e, EdgeRecord):
        return e
    src, dst, *attrs = e
    return EdgeRecord(int(src), int(dst), tuple(int(a) for a in attrs))


@dataclass(frozen=True)
class GlobalConfig:
    num_vertices: int
    k: int
    B: int = 1024
    width: int = 64
    attr_lanes: int = 1

    def __post_init__(self):
        if not 1 <= self.num_vertices <= MAX_VERTEX:
            raise ValueError(f"|V| must be in [1, {MAX_VERTEX}]")
        if not 1 <= self.k <= self.num_vertices:
            raise ValueError("chunk size k must lie in [1, |V|]")
        if self.width != 64:
            raise ValueError("graph records need 64-bit lanes (key is src||dst)")
        if self.attr_lanes < 0:
            raise ValueError("attr_lanes must be >= 0")

    @property
    def b(self) -> int:
        return -(-self.num_vertices // self.k)

    @property
    def record_lanes(self) -> int:
        return 1 + self.attr_lanes


def chunk_of(v: int, k: int, num_vertices: int | None = None) -> int:
    """1-based chunk of vertex ``v``: ceil(v / k)."""
    if v < 1 or (num_vertices is not None and v > num_vertices):
        raise ValueError(f"vertex {v} out of range")
    return -(-v // k)


def block_of(src: int, dst: int, k: int) -> tuple[int, int]:
    return chunk_of(src, k), chunk_of(dst, k)


@dataclass
class LocalPartition:
    """``records[i, j, r]`` is lane vector (key, attrs...) of record r in block (i+1, j+1)."""
    config: GlobalConfig
    records: np.ndarray = field(repr=False)

    @property
    def l(self) -> int:
        return self.records.shape[2]

    def block(self, i: int, j: int) -> list[EdgeRecord]:
        """Real edges of 1-based block (i, j), in stored order."""
        out = []
        for rec in self.records[i - 1, j - 1]:
            key = int(rec[0])
            if key:
                out.append(EdgeRecord(key >> KEY_SHIFT, key & DST_MASK, tuple(int(a) for a in rec[1:])))
        return out


def records_to_edges(records: np.ndarray) -> list[EdgeRecord]:
    """Real edges in a (..., 1+A) record array, skipping dummies."""
    flat = records.reshape(-1, records.shape[-1])
    keep = flat[:, 0] != 0
    return [EdgeRecord(int(r[0]) >> KEY_SHIFT, int(r[0]) & DST_MASK, tuple(int(a) for a in r[1:]))
            for r in flat[keep]]


def local_process(edges, k: int, num_vertices: int, extra_pad: int = 0,
                  attr_lanes: int = 1, B: int = 1024) -> LocalPartition:
    """Route edges to blocks, sort each block by key, pad with leading dummies.

    Every block gets ``l_i = max(max block size + extra_pad, 1)`` records.
    """
    cfg = GlobalConfig(num_vertices, k, B, 64, attr_lanes)
    if extra_pad < 0:
        raise ValueError("extra_pad must be >= 0")
    b = cfg.b
    buckets: dict[tuple[int, int], list[EdgeRecord]] = {}
    for e in map(as_edge, edges):
        for v in (e.src, e.dst):
            if not 1 <= v <= num_vertices:
                raise ValueError(f"vertex id {v} outside [1, {num_vertices}]")
        if len(e.attrs) > attr_lanes:
            raise ValueError(f"edge {e.src}->{e.dst} has more than {attr_lanes} attributes")
        buckets.setdefault(block_of(e.src, e.dst, k), []).append(e)
    longest = max((len(v) for v in buckets.values()), default=0)
    l_i = max(longest + extra_pad, 1)
    rec = np.zeros((b, b, l_i, 1 + attr_lanes), dtype=np.uint64)
    for (i, j), es in buckets.items():
        es = sorted(es, key=lambda e: e.key)
        start = l_i - len(es)
        for r, e in enumerate(es, start):
            rec[i - 1, j - 1, r, 0] = e.key
            rec[i - 1, j - 1, r, 1:1 + len(e.attrs)] = e.attrs
    return LocalPartition(cfg, rec)


def parse_edge_list(source, attr_lanes: int | None = None) -> list[EdgeRecord]:
    """Parse ``src,dst[,attr...]`` lines; ``#`` starts a comment; ids are 1-based.

    ``source`` is a path or an iterable of lines.  With ``attr_lanes`` set, lines
    with more attributes are rejected and shorter ones are zero-filled.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = list(source)
    edges = []
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) < 2:
            raise EdgeParseError(no, "expected src,dst[,attrs]")
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise EdgeParseError(no, f"not an integer in {line!r}") from None
        src, dst, attrs = vals[0], vals[1], vals[2:]
        if src < 1 or dst < 1:
            raise EdgeParseError(no, "vertex ids are 1-based; 0 and negatives are rejected")
        if src > MAX_VERTEX or dst > MAX_VERTEX:
            raise EdgeParseError(no, "vertex id exceeds 2^31-1")
        if any(a < 0 or a >= 1 << 64 for a in attrs):
            raise EdgeParseError(no, "attribute does not fit in 64 bits")
        if attr_lanes is not None:
            if len(attrs) > attr_lanes:
                raise EdgeParseError(no, f"more than {attr_lanes} attribute(s)")
            attrs = attrs + [0] * (attr_lanes - len(attrs))
        edges.append(EdgeRecord(src, dst, tuple(attrs)))
    return edges


def optimal_k(B: int, num_vertices: int, total_edges: int) -> int:
    """Plaintext chunk size: clamp(floor(B*|V| / |E|), 1, |V|)."""
    if total_edges <= 0:
        return num_vertices
    return min(max(B * num_vertices // total_edges, 1), num_vertices)

