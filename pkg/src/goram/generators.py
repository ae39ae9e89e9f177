"""Synthetic graphs for tests and benchmarks."""
import numpy as np

from .graph.partition import EdgeRecord


def _attrs(rng, n: int, attr_lanes: int, max_attr: int) -> np.ndarray:
    return rng.integers(1, max_attr, size=(n, attr_lanes), dtype=np.uint64)


def uniform_graph(num_vertices: int, num_edges: int, seed=0, attr_lanes: int = 1,
                  max_attr: int = 1 << 20) -> list[EdgeRecord]:
    """Endpoints drawn uniformly at random; parallel edges and self-loops allowed."""
    rng = np.random.default_rng(seed)
    src = rng.integers(1, num_vertices + 1, size=num_edges)
    dst = rng.integers(1, num_vertices + 1, size=num_edges)
    at = _attrs(rng, num_edges, attr_lanes, max_attr)
    return [EdgeRecord(int(s), int(d), tuple(int(a) for a in row)) for s, d, row in zip(src, dst, at)]


def power_law_graph(num_vertices: int, num_edges: int, seed=0, attr_lanes: int = 1,
                    max_attr: int = 1 << 20) -> list[EdgeRecord]:
    """Preferential attachment: endpoints picked proportionally to degree + 1."""
    rng = np.random.default_rng(seed)
    weight = np.ones(num_vertices)
    edges = []
    at = _attrs(rng, num_edges, attr_lanes, max_attr)
    batch = max(1, num_edges // 64)
    while len(edges) < num_edges:
        m = min(batch, num_edges - len(edges))
        prob = weight / weight.sum()
        src = rng.choice(num_vertices, size=m, p=prob) + 1
        dst = rng.choice(num_vertices, size=m, p=prob) + 1
        for s, d in zip(src, dst):
            row = at[len(edges)]
            edges.append(EdgeRecord(int(s), int(d), tuple(int(a) for a in row)))
            weight[s - 1] += 1
            weight[d - 1] += 1
    return edges


def split_edges(edges, num_providers: int, seed=0) -> list[list[EdgeRecord]]:
    """Assign every edge to a provider uniformly at random."""
    rng = np.random.default_rng(seed)
    owner = rng.integers(0, num_providers, size=len(edges))
    out = [[] for _ in range(num_providers)]
    for e, o in zip(edges, owner):
        out[o].append(e)
    return out


GENERATORS = {"uniform": uniform_graph, "power-law": power_law_graph}
