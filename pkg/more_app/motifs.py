"""
Induced motif census for the five small motifs used as structural features.

census() counts every node set once under induced-subgraph isomorphism and
records, per node, how many counted occurrences contain it (the node motif
degree). brute_force_census() enumerates all 3- and 4-node subsets and is the
oracle the fast census is tested against.

The fast census works per edge: the common neighbourhood C of an edge (u, v)
gives its triangles (|C|), its K4s (adjacent pairs inside C) and the diamonds
that use (u, v) as chord (non-adjacent pairs inside C). Chordless 4-cycles are
derived from all 4-cycles (two common neighbours of a node pair, counted via
A^2) by removing the cycles that lie inside diamonds and K4s.
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
import logging

import numpy as np
import scipy.sparse as sp
from django.conf import settings

from .exceptions import CensusGuardError
from .graph import degrees

# Configure logging
logger = logging.getLogger(__name__)


class MotifKind(Enum):
    """The five motifs; value = (code, order, edge count, triangle count)."""
    M31 = ("m31", 3, 3, 1)  # triangle
    M32 = ("m32", 3, 2, 0)  # induced 3-path
    M41 = ("m41", 4, 6, 4)  # complete K4
    M42 = ("m42", 4, 5, 2)  # diamond, K4 minus one edge
    M43 = ("m43", 4, 4, 0)  # chordless 4-cycle

    @property
    def code(self):
        return self.value[0]

    @property
    def order(self):
        return self.value[1]

    @property
    def edge_count(self):
        return self.value[2]

    @property
    def triangles(self):
        return self.value[3]

    @property
    def density(self):
        return self.edge_count / (self.order * (self.order - 1) / 2)


MOTIF_ORDER = (MotifKind.M31, MotifKind.M32, MotifKind.M41, MotifKind.M42, MotifKind.M43)

# Motif counts reported for well-known benchmark networks, keyed by lower-case name.
REFERENCE_COUNTS = {
    'cora': {MotifKind.M31: 1630, MotifKind.M32: 47411, MotifKind.M41: 220, MotifKind.M42: 2468, MotifKind.M43: 1536},
    'email-eucore': {MotifKind.M31: 105461, MotifKind.M32: 866833, MotifKind.M41: 423750, MotifKind.M42: 2470220, MotifKind.M43: 909289},
    'facebook': {MotifKind.M31: 2310053, MotifKind.M32: 30478345, MotifKind.M41: 13743319, MotifKind.M42: 83926778, MotifKind.M43: 45518420},
    'polblogs': {MotifKind.M31: 101043, MotifKind.M32: 1038396, MotifKind.M41: 422327, MotifKind.M42: 2775480, MotifKind.M43: 1128796},
    'football': {MotifKind.M31: 810, MotifKind.M32: 3537, MotifKind.M41: 732, MotifKind.M42: 1155, MotifKind.M43: 564},
    'terrorattack': {MotifKind.M31: 26171, MotifKind.M32: 232, MotifKind.M41: 241419, MotifKind.M42: 0, MotifKind.M43: 0},
}


@dataclass
class MotifCensus:
    """
    Global motif counts and the n x 5 node-motif-degree table.

    nmd columns follow MOTIF_ORDER. non_induced is filled by census() only and
    holds the subgraph (not necessarily induced) counts for comparison with
    published tables.
    """
    global_counts: dict
    nmd: np.ndarray
    non_induced: dict = field(default=None)

    @property
    def n(self):
        return self.nmd.shape[0]

    def count(self, kind):
        return self.global_counts[kind]

    def handshake_holds(self):
        """Σ_v nmd[v][M] == order(M) · global[M] for every motif."""
        return all(
            int(self.nmd[:, column].sum()) == kind.order * self.global_counts[kind]
            for column, kind in enumerate(MOTIF_ORDER)
        )

    def same_counts(self, other):
        return self.global_counts == other.global_counts and np.array_equal(self.nmd, other.nmd)


def census(g):
    """
    Count induced occurrences of the five motifs and the node motif degrees.

    Args:
        g: Graph

    Returns:
        MotifCensus with induced counts and non-induced counts attached
    """
    n = g.n
    deg = degrees(g)
    nbr = g.neighbor_sets()

    triangle_at = np.zeros(n, dtype=np.int64)
    clique_at = np.zeros(n, dtype=np.int64)
    diamond_at = np.zeros(n, dtype=np.int64)
    triangle_edge_sum = 0
    clique_edge_sum = 0
    diamonds = 0

    for u, v in g.edges:
        common = nbr[u] & nbr[v]
        c = len(common)
        if c == 0:
            continue
        triangle_edge_sum += c
        triangle_at[u] += c
        triangle_at[v] += c
        adjacent_ends = 0
        for w in common:
            inside = len(nbr[w] & common)
            adjacent_ends += inside
            # w is a wing of a diamond with chord (u, v) for every non-adjacent x in C
            diamond_at[w] += c - 1 - inside
        cliques_on_edge = adjacent_ends // 2
        clique_edge_sum += cliques_on_edge
        clique_at[u] += cliques_on_edge
        clique_at[v] += cliques_on_edge
        chorded = c * (c - 1) // 2 - cliques_on_edge
        diamonds += chorded
        diamond_at[u] += chorded
        diamond_at[v] += chorded

    # every triangle at v is seen from both of its edges at v, every K4 from three
    triangle_at //= 2
    clique_at //= 3
    triangles = triangle_edge_sum // 3
    cliques = clique_edge_sum // 6

    wedges_at_center = deg * (deg - 1) // 2
    neighbor_degree_sum = np.array([int(deg[list(nbrs)].sum()) for nbrs in g.neighbors], dtype=np.int64)
    path_center = wedges_at_center - triangle_at
    path_end = neighbor_degree_sum - deg - 2 * triangle_at
    paths = int(path_center.sum())

    cycles_at = _four_cycles_per_node(g)
    cycles = int(cycles_at.sum()) // 4
    square_at = cycles_at - 3 * clique_at - diamond_at
    squares = cycles - 3 * cliques - diamonds

    nmd = np.column_stack([triangle_at, path_center + path_end, clique_at, diamond_at, square_at]).astype(np.int64)
    result = MotifCensus(
        global_counts={
            MotifKind.M31: int(triangles),
            MotifKind.M32: paths,
            MotifKind.M41: int(cliques),
            MotifKind.M42: int(diamonds),
            MotifKind.M43: int(squares),
        },
        nmd=nmd.reshape(n, len(MOTIF_ORDER)),
        non_induced={
            MotifKind.M31: int(triangles),
            MotifKind.M32: int(wedges_at_center.sum()),
            MotifKind.M41: int(cliques),
            MotifKind.M42: int(diamonds + 6 * cliques),
            MotifKind.M43: cycles,
        },
    )
    logger.info(f"Census on {g}: " + ", ".join(f"{kind.name}={count}" for kind, count in result.global_counts.items()))
    return result


def _four_cycles_per_node(g):
    """Number of (not necessarily induced) 4-cycles through each node."""
    if g.num_edges == 0:
        return np.zeros(g.n, dtype=np.int64)
    rows = np.repeat(np.arange(g.n), degrees(g))
    cols = np.fromiter((v for nbrs in g.neighbors for v in nbrs), dtype=np.int64, count=len(rows))
    adjacency = sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(g.n, g.n))
    walks = (adjacency @ adjacency).tocsr()
    walks = (walks - sp.diags(walks.diagonal())).tocsr()
    walks.eliminate_zeros()
    # a 4-cycle through v pairs v with its opposite node c via two common neighbours
    walks.data = walks.data * (walks.data - 1) // 2
    return np.asarray(walks.sum(axis=1)).ravel().astype(np.int64)


def classify_subset(nodes, nbr):
    """Return the MotifKind of the subgraph induced by `nodes`, or None."""
    local_degree = [sum(1 for other in nodes if other in nbr[node]) for node in nodes]
    edge_count = sum(local_degree) // 2
    if len(nodes) == 3:
        return {3: MotifKind.M31, 2: MotifKind.M32}.get(edge_count)
    if edge_count == 6:
        return MotifKind.M41
    if edge_count == 5:
        return MotifKind.M42
    if edge_count == 4 and all(d == 2 for d in local_degree):
        return MotifKind.M43
    return None


def brute_force_census(g, max_nodes=None):
    """
    Census by enumerating all C(n,3) + C(n,4) node subsets.

    Raises:
        CensusGuardError: if g has more than max_nodes nodes
    """
    if max_nodes is None:
        max_nodes = settings.MORE['CENSUS_GUARD']
    if g.n > max_nodes:
        raise CensusGuardError(f"Brute-force census refused: {g.n} nodes exceeds the guard of {max_nodes}")

    nbr = g.neighbor_sets()
    column = {kind: index for index, kind in enumerate(MOTIF_ORDER)}
    global_counts = {kind: 0 for kind in MOTIF_ORDER}
    nmd = np.zeros((g.n, len(MOTIF_ORDER)), dtype=np.int64)
    for size in (3, 4):
        for nodes in combinations(range(g.n), size):
            kind = classify_subset(nodes, nbr)
            if kind is None:
                continue
            global_counts[kind] += 1
            nmd[list(nodes), column[kind]] += 1
    return MotifCensus(global_counts=global_counts, nmd=nmd)


def nmd_matrix(c):
    """n x 5 float64 view of the node motif degrees."""
    return c.nmd.astype(np.float64)


def compare_counts(c, reference):
    """
    Compare a census with reference counts under both conventions.

    Returns:
        dict: MotifKind -> 'induced' | 'non-induced' | 'mismatch'
    """
    verdicts = {}
    for kind in MOTIF_ORDER:
        expected = reference[kind]
        if c.global_counts[kind] == expected:
            verdicts[kind] = 'induced'
        elif c.non_induced is not None and c.non_induced[kind] == expected:
            verdicts[kind] = 'non-induced'
        else:
            verdicts[kind] = 'mismatch'
            logger.warning(f"{kind.name}: census gives {c.global_counts[kind]} induced, reference is {expected}")
    return verdicts
