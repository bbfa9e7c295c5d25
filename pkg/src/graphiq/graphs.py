"""Weighted graphs over landmark clouds and their adjacency vectors."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .delaunay import triangle_edges, triangulate

__all__ = [
    "WeightedGraph",
    "AdjacencyVector",
    "complete_graph",
    "delaunay_graph",
    "build_graph",
    "edge_index",
    "adjacency_vector",
    "graph_from_vector",
    "STRATEGIES",
]

STRATEGIES = ("complete", "meshed")


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric, non-negative, zero-diagonal weight matrix."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be square, got {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and >= 0")
        if np.any(np.diag(w) != 0):
            raise ValueError("weights must have a zero diagonal")
        if not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def edges(self) -> list[tuple[int, int, float]]:
        i, j = np.nonzero(np.triu(self.weights, 1))
        return [(int(a), int(b), float(self.weights[a, b])) for a, b in zip(i, j)]

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.edges()]})

    @classmethod
    def from_json(cls, text: str) -> "WeightedGraph":
        obj = json.loads(text)
        w = np.zeros((obj["n"], obj["n"]))
        for i, j, x in obj["edges"]:
            w[i, j] = w[j, i] = x
        return cls(w)


@dataclass(frozen=True, eq=False)
class AdjacencyVector:
    """Upper triangle of a weight matrix, row-major: a12, a13, ..., a(n-1)n."""

    entries: np.ndarray
    n: int

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.float64)
        if e.shape != (self.n * (self.n - 1) // 2,):
            raise ValueError(f"n={self.n} needs {self.n * (self.n - 1) // 2} entries, got {e.shape}")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def __len__(self) -> int:
        return self.entries.shape[0]


def _pairwise(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def complete_graph(cloud) -> WeightedGraph:
    pts = np.asarray(getattr(cloud, "points", cloud), dtype=np.float64)
    if pts.shape[0] < 2:
        raise ValueError(f"need at least 2 points, got {pts.shape[0]}")
    d = _pairwise(pts)
    return WeightedGraph(np.maximum(d, d.T))


def delaunay_graph(cloud, rng: np.random.Generator | None = None) -> WeightedGraph:
    """Distances on Delaunay edges, zero elsewhere."""
    pts = np.asarray(getattr(cloud, "points", cloud), dtype=np.float64)
    full = complete_graph(pts).weights
    w = np.zeros_like(full)
    for i, j in triangle_edges(triangulate(pts, rng)):
        w[i, j] = w[j, i] = full[i, j]
    return WeightedGraph(w)


def build_graph(cloud, strategy: str) -> WeightedGraph:
    if strategy == "complete":
        return complete_graph(cloud)
    if strategy == "meshed":
        return delaunay_graph(cloud)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def edge_index(i: int, j: int, n: int) -> int:
    """1-based position of entry (i, j), 1 <= i < j <= n, in the adjacency vector."""
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    return i * n - i * (i + 1) // 2 - n + j


def adjacency_vector(graph: WeightedGraph) -> AdjacencyVector:
    iu = np.triu_indices(graph.n, 1)
    return AdjacencyVector(graph.weights[iu], graph.n)


def graph_from_vector(vec: AdjacencyVector) -> WeightedGraph:
    w = np.zeros((vec.n, vec.n))
    iu = np.triu_indices(vec.n, 1)
    w[iu] = vec.entries
    return WeightedGraph(w + w.T)
