"""Watts-Strogatz small-world contact networks.

The contact graph is generated once and is immutable afterwards: epidemic
dynamics never add or remove edges, they only toggle existing edges between
active and deactivated.  Edge count is preserved exactly by the rewiring
step, so a graph built with ring degree ``k`` always has ``k * n / 2`` edges
and mean degree exactly ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "GenerationParams",
    "ContactNetwork",
    "watts_strogatz",
    "mean_degree",
    "clustering_coefficient",
    "save_edge_list",
    "load_edge_list",
]


@dataclass(frozen=True)
class GenerationParams:
    """Arguments the generator was called with, kept for provenance."""

    ring_degree: int
    rewiring_fraction: float
    seed: int


@dataclass(frozen=True, eq=False)
class ContactNetwork:
    """Immutable undirected graph on nodes ``0 .. node_count-1``.

    ``edges`` is an ``(m, 2)`` integer array with ``edges[:, 0] < edges[:, 1]``
    and rows sorted lexicographically, i.e. a canonical set of unordered node
    pairs with no self loops and no duplicates.  The array is marked
    read-only; a ContactNetwork is safe to share across concurrent
    simulation replicates.
    """

    node_count: int
    edges: np.ndarray
    generation_params: GenerationParams | None = None

    def __post_init__(self):
        edges = np.ascontiguousarray(np.asarray(self.edges, dtype=np.int64))
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise ValueError("edges must be an (m, 2) array of node pairs")
        if self.node_count <= 0:
            raise ValueError("node_count must be positive")
        if edges.size:
            if edges.min() < 0 or edges.max() >= self.node_count:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self loop")
            edges = np.column_stack([edges.min(axis=1), edges.max(axis=1)])
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise ValueError("duplicate edge")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree of every node."""
        deg = np.bincount(self.edges.ravel(), minlength=self.node_count)
        deg.setflags(write=False)
        return deg

    @cached_property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.node_count else 0

    @cached_property
    def _edge_rows(self) -> dict[tuple[int, int], int]:
        return {(int(i), int(j)): row for row, (i, j) in enumerate(self.edges)}

    def edge_row(self, i: int, j: int) -> int:
        """Row index of edge ``{i, j}`` in :attr:`edges`."""
        key = (i, j) if i < j else (j, i)
        try:
            return self._edge_rows[key]
        except KeyError:
            raise KeyError(f"no edge between {i} and {j}") from None

    def has_edge(self, i: int, j: int) -> bool:
        key = (i, j) if i < j else (j, i)
        return key in self._edge_rows

    def neighbor_sets(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.node_count)]
        for i, j in self.edges:
            adj[int(i)].add(int(j))
            adj[int(j)].add(int(i))
        return adj


def watts_strogatz(n: int, k: int, alpha: float, seed: int) -> ContactNetwork:
    """Build a small-world graph by ring-lattice rewiring.

    Each node is first joined to its ``k/2`` nearest neighbors on each side
    of a ring.  Every lattice edge is then visited once and, with probability
    ``alpha``, its clockwise endpoint is replaced by a node drawn uniformly
    at random, re-drawing on self loops and duplicates.  A draw is attempted
    at most ``n`` times; if no valid target is found the original edge is
    kept, so the edge count is always exactly ``k * n / 2``.

    Deterministic for a given ``seed``.
    """
    if k % 2 != 0:
        raise ValueError("ring degree k must be even")
    if k < 2:
        raise ValueError("ring degree k must be at least 2")
    if k >= n:
        raise ValueError("ring degree k must be smaller than node count n")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("rewiring fraction alpha must lie in [0, 1]")

    rng = np.random.default_rng(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    lattice = []
    for i in range(n):
        for offset in range(1, k // 2 + 1):
            j = (i + offset) % n
            adj[i].add(j)
            adj[j].add(i)
            lattice.append((i, j))

    for i, j in lattice:
        if rng.random() >= alpha:
            continue
        for _ in range(n):
            target = int(rng.integers(n))
            if target != i and target not in adj[i]:
                adj[i].discard(j)
                adj[j].discard(i)
                adj[i].add(target)
                adj[target].add(i)
                break
        # all draws invalid: keep the original edge

    pairs = [(i, j) for i in range(n) for j in adj[i] if i < j]
    edges = np.array(sorted(pairs), dtype=np.int64)
    params = GenerationParams(ring_degree=k, rewiring_fraction=alpha, seed=seed)
    return ContactNetwork(node_count=n, edges=edges, generation_params=params)


def mean_degree(net: ContactNetwork) -> float:
    """Average node degree, ``2 * edge_count / node_count``."""
    return 2.0 * net.edge_count / net.node_count


def clustering_coefficient(net: ContactNetwork) -> float:
    """Average local clustering coefficient.

    For each node, the fraction of its neighbor pairs that are themselves
    connected; nodes of degree below 2 contribute 0.  Requires at least
    3 nodes.
    """
    if net.node_count < 3:
        raise ValueError("clustering coefficient needs at least 3 nodes")
    adj = net.neighbor_sets()
    total = 0.0
    for i in range(net.node_count):
        neigh = adj[i]
        d = len(neigh)
        if d < 2:
            continue
        links = sum(len(adj[u] & neigh) for u in neigh) // 2
        total += links / (d * (d - 1) / 2)
    return total / net.node_count


def save_edge_list(net: ContactNetwork, path: str | Path) -> None:
    """Write the graph as text: a header line with the generation
    parameters, then one ``i j`` pair per line with ``i < j``, sorted
    lexicographically.
    """
    if net.generation_params is None:
        raise ValueError("cannot export a network without generation parameters")
    gp = net.generation_params
    lines = [f"n={net.node_count} k={gp.ring_degree} alpha={gp.rewiring_fraction} seed={gp.seed}"]
    lines.extend(f"{i} {j}" for i, j in net.edges)
    Path(path).write_text("\n".join(lines) + "\n")


def load_edge_list(path: str | Path) -> ContactNetwork:
    """Read a graph written by :func:`save_edge_list`."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty edge-list file")
    header = dict(item.split("=", 1) for item in lines[0].split())
    try:
        n = int(header["n"])
        params = GenerationParams(
            ring_degree=int(header["k"]),
            rewiring_fraction=float(header["alpha"]),
            seed=int(header["seed"]),
        )
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: malformed header {lines[0]!r}") from exc
    pairs = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: malformed edge line {ln!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return ContactNetwork(node_count=n, edges=edges, generation_params=params)
