"""
Graph storage and the renormalized propagator.

A Graph is an immutable undirected simple graph over nodes 0..n-1. Sparse
matrices are scipy CSR matrices in float64, dense matrices are numpy arrays.
"""

from dataclasses import dataclass
import logging

import networkx as nx
import numpy as np
import scipy.sparse as sp
from django.core.exceptions import ValidationError

from .exceptions import ShapeError

# Configure logging
logger = logging.getLogger(__name__)


def validate_node_id(node, n):
    """Validate that a node id lies in [0, n)."""
    if node < 0 or node >= n:
        raise ValidationError(f'Node id {node} is out of range for a graph with {n} nodes')


@dataclass(frozen=True)
class Graph:
    """
    Undirected simple graph with sorted adjacency lists.

    Attributes:
        n: number of nodes
        neighbors: per-node tuple of neighbour ids, ascending, no self-loops
    """
    n: int
    neighbors: tuple

    @property
    def edges(self):
        """Unordered edges as (u, v) pairs with u < v, in lexicographic order."""
        return [(u, v) for u in range(self.n) for v in self.neighbors[u] if u < v]

    @property
    def num_edges(self):
        return sum(len(nbrs) for nbrs in self.neighbors) // 2

    def neighbor_sets(self):
        return [frozenset(nbrs) for nbrs in self.neighbors]

    def __str__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True)
class GraphStatistics:
    nodes: int
    edges: int
    mean_degree: float
    max_degree: int
    density: float
    clustering: float


def build_graph(edge_pairs, n):
    """
    Build a simple undirected graph from a raw edge list.

    Duplicate edges, reversed duplicates and self-loops are dropped silently.

    Args:
        edge_pairs: iterable of (u, v) node pairs
        n: number of nodes; isolated nodes are kept

    Returns:
        Graph: the cleaned graph

    Raises:
        ValidationError: if a node id is outside [0, n)
    """
    adjacency = [set() for _ in range(n)]
    dropped_loops = 0
    for u, v in edge_pairs:
        u, v = int(u), int(v)
        validate_node_id(u, n)
        validate_node_id(v, n)
        if u == v:
            dropped_loops += 1
            continue
        adjacency[u].add(v)
        adjacency[v].add(u)
    graph = Graph(n=n, neighbors=tuple(tuple(sorted(nbrs)) for nbrs in adjacency))
    if dropped_loops:
        logger.info(f"Dropped {dropped_loops} self-loops while building the graph")
    logger.info(f"Built {graph}")
    return graph


def degrees(g):
    """Return the degree vector of g as an int64 array."""
    return np.fromiter((len(nbrs) for nbrs in g.neighbors), dtype=np.int64, count=g.n)


def adjacency_matrix(g):
    """Return the 0/1 adjacency matrix of g as a CSR matrix."""
    rows = np.repeat(np.arange(g.n), degrees(g))
    cols = np.fromiter((v for nbrs in g.neighbors for v in nbrs), dtype=np.int64, count=len(rows))
    data = np.ones(len(rows), dtype=np.float64)
    return sp.csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


def renormalized_propagator(g):
    """
    Build D̄^{-1/2} (I + A) D̄^{-1/2} for graph g.

    Every entry is computed as 1 / sqrt(d̄_i * d̄_j) from the integer degrees,
    so the matrix is exactly symmetric. Isolated nodes get a diagonal 1.0.

    Returns:
        scipy.sparse.csr_matrix: n x n float64 propagator with sorted indices
    """
    deg_bar = degrees(g) + 1
    rows = np.concatenate([np.arange(g.n), np.repeat(np.arange(g.n), deg_bar - 1)])
    cols = np.concatenate([
        np.arange(g.n),
        np.fromiter((v for nbrs in g.neighbors for v in nbrs), dtype=np.int64, count=int((deg_bar - 1).sum())),
    ])
    values = 1.0 / np.sqrt((deg_bar[rows] * deg_bar[cols]).astype(np.float64))
    prop = sp.csr_matrix((values, (rows, cols)), shape=(g.n, g.n))
    prop.sort_indices()
    prop.eliminate_zeros()
    return prop


def spmm(a, x):
    """
    Sparse-dense product a @ x.

    Raises:
        ShapeError: if a.cols != x.rows
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or a.shape[1] != x.shape[0]:
        raise ShapeError(f"Cannot multiply {a.shape[0]}x{a.shape[1]} sparse matrix by dense matrix of shape {x.shape}")
    return np.asarray(a @ x)


def permute_graph(g, perm):
    """Relabel g so that node v becomes perm[v]."""
    perm = np.asarray(perm)
    if sorted(perm.tolist()) != list(range(g.n)):
        raise ShapeError(f"Permutation of length {len(perm)} does not relabel a graph with {g.n} nodes")
    return build_graph([(perm[u], perm[v]) for u, v in g.edges], g.n)


def to_networkx(g):
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(g.n))
    nx_graph.add_edges_from(g.edges)
    return nx_graph


def graph_statistics(g):
    """
    Summarise g the way dataset tables do: size, degree, density and clustering.

    Clustering is the average local clustering coefficient (isolated and
    degree-one nodes contribute 0).
    """
    deg = degrees(g)
    num_edges = g.num_edges
    stats = GraphStatistics(
        nodes=g.n,
        edges=num_edges,
        mean_degree=(2.0 * num_edges / g.n) if g.n else 0.0,
        max_degree=int(deg.max()) if g.n else 0,
        density=(2.0 * num_edges / (g.n * (g.n - 1))) if g.n > 1 else 0.0,
        clustering=nx.average_clustering(to_networkx(g)) if g.n else 0.0,
    )
    logger.info(f"Graph statistics: {stats}")
    return stats
