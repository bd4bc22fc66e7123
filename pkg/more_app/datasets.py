"""
Dataset ingestion and synthetic data generation.

Edge-list datasets come as two whitespace-separated files, "u v" per edge and
"node label" per node, ids 0- or 1-based. Cora comes as a tab-separated
.content file (id, binary features, label) and a .cites file (cited, citing).
Label strings are coded in first-seen order so splits are reproducible.
"""

from dataclasses import dataclass, field
import logging

import networkx as nx
import numpy as np
from django.core.exceptions import ValidationError

from .features import build_aft
from .graph import build_graph

# Configure logging
logger = logging.getLogger(__name__)


@dataclass
class Dataset:
    name: str
    graph: object
    aft: object
    labels: np.ndarray
    label_count: int
    label_names: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.labels) != self.graph.n:
            raise ValidationError(f"{self.name}: {len(self.labels)} labels for {self.graph.n} nodes")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.label_count):
            raise ValidationError(f"{self.name}: label ids must lie in [0, {self.label_count})")

    def __str__(self):
        return (f"{self.name}: {self.graph.n} nodes, {self.graph.num_edges} edges, "
                f"{self.aft.dim} features, {self.label_count} labels")


def validate_probability(value, name):
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must be a probability in [0, 1], got {value}")


def _data_lines(path):
    """Yield (line number, stripped line) for non-empty, non-comment lines."""
    with open(path, encoding='utf-8') as handle:
        for number, line in enumerate(handle, start=1):
            line = line.strip()
            if line and not line.startswith('#'):
                yield number, line


def _code_labels(raw_labels):
    """Map label strings to ids in first-seen order."""
    codes = {}
    ids = np.array([codes.setdefault(label, len(codes)) for label in raw_labels], dtype=np.int64)
    return ids, list(codes)


def read_edge_list(path, one_based=False):
    """
    Parse "u v" lines into integer pairs.

    Raises:
        ValidationError: for a line that is not two integers (with its line number)
    """
    offset = 1 if one_based else 0
    pairs = []
    for number, line in _data_lines(path):
        parts = line.split()
        try:
            if len(parts) < 2:
                raise ValueError(line)
            pairs.append((int(parts[0]) - offset, int(parts[1]) - offset))
        except ValueError:
            raise ValidationError(f"{path}, line {number}: expected 'u v', got {line!r}")
    logger.info(f"Read {len(pairs)} edge lines from {path}")
    return pairs


def load_edge_list_graph(path, one_based=False):
    """Graph over nodes 0..max id found in the edge list (no labels needed)."""
    pairs = read_edge_list(path, one_based)
    n = max((max(u, v) for u, v in pairs), default=-1) + 1
    return build_graph(pairs, n)


def load_edge_list_dataset(edges_path, labels_path, name, one_based=False, seed=0):
    """
    Load a featureless network with node labels.

    The labels file fixes n: its ids must be exactly 0..n-1 (after the
    one-based shift). Nodes get random one-hot attributes.

    Raises:
        ValidationError: unparsable lines, label ids outside 0..n-1, edges to unknown nodes
    """
    offset = 1 if one_based else 0
    entries = {}
    for number, line in _data_lines(labels_path):
        parts = line.split()
        try:
            node = int(parts[0]) - offset
        except ValueError:
            raise ValidationError(f"{labels_path}, line {number}: expected 'node label', got {line!r}")
        if len(parts) < 2:
            raise ValidationError(f"{labels_path}, line {number}: missing label for node {parts[0]}")
        entries[node] = parts[1]

    n = len(entries)
    unknown = sorted(node for node in entries if node < 0 or node >= n)
    if unknown:
        raise ValidationError(f"{labels_path}: unknown node ids {unknown[:5]} for {n} labelled nodes")

    labels, label_names = _code_labels(entries[node] for node in range(n))
    try:
        graph = build_graph(read_edge_list(edges_path, one_based), n)
    except ValidationError as e:
        logger.error(f"{edges_path} refers to a node without a label")
        raise ValidationError(f"{edges_path}: {e.messages[0]}")

    dataset = Dataset(
        name=name,
        graph=graph,
        aft=build_aft(None, n, seed),
        labels=labels,
        label_count=len(label_names),
        label_names=label_names,
    )
    logger.info(f"Loaded {dataset}")
    return dataset


def load_cora(content_path, cites_path, name="cora"):
    """
    Load a Cora-style citation network.

    Papers are indexed in .content order; citation direction is discarded and
    duplicate citations collapse into one edge.

    Raises:
        ValidationError: inconsistent feature counts, repeated paper ids or citations of unknown papers
    """
    index, features, raw_labels = {}, [], []
    feature_count = None
    for number, line in _data_lines(content_path):
        parts = line.split('\t')
        if feature_count is None:
            feature_count = len(parts) - 2
        if len(parts) - 2 != feature_count or feature_count < 1:
            raise ValidationError(f"{content_path}, line {number}: expected {feature_count} features, "
                                  f"got {len(parts) - 2}")
        try:
            features.append([float(value) for value in parts[1:-1]])
        except ValueError:
            raise ValidationError(f"{content_path}, line {number}: non-numeric feature value")
        if parts[0] in index:
            raise ValidationError(f"{content_path}, line {number}: repeated paper id {parts[0]}")
        index[parts[0]] = len(index)
        raw_labels.append(parts[-1])

    pairs = []
    for number, line in _data_lines(cites_path):
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"{cites_path}, line {number}: expected 'cited citing', got {line!r}")
        missing = [paper for paper in parts if paper not in index]
        if missing:
            raise ValidationError(f"{cites_path}, line {number}: unknown paper id {missing[0]}")
        pairs.append((index[parts[0]], index[parts[1]]))

    labels, label_names = _code_labels(raw_labels)
    n = len(index)
    dataset = Dataset(
        name=name,
        graph=build_graph(pairs, n),
        aft=build_aft(np.array(features, dtype=np.float64).reshape(n, feature_count or 0), n, seed=0),
        labels=labels,
        label_count=len(label_names),
        label_names=label_names,
    )
    logger.info(f"Loaded {dataset}")
    return dataset


def generate_synthetic(n, communities, p_in, p_out, seed, name=None):
    """
    Planted-partition graph with community labels and one-hot attributes.

    Community sizes differ by at most one node; node ids are grouped by
    community.

    Raises:
        ValidationError: communities < 2, n < communities, or not 0 <= p_out < p_in <= 1
    """
    if communities < 2:
        raise ValidationError(f"At least 2 communities are needed, got {communities}")
    if n < communities:
        raise ValidationError(f"Cannot place {n} nodes into {communities} communities")
    validate_probability(p_in, "p_in")
    validate_probability(p_out, "p_out")
    if not p_out < p_in:
        raise ValidationError(f"p_out ({p_out}) must be smaller than p_in ({p_in})")

    sizes = [len(block) for block in np.array_split(np.arange(n), communities)]
    probabilities = [[p_in if i == j else p_out for j in range(communities)] for i in range(communities)]
    planted = nx.stochastic_block_model(sizes, probabilities, seed=seed)
    labels = np.repeat(np.arange(communities), sizes)

    dataset = Dataset(
        name=name or f"synthetic-{n}-{communities}",
        graph=build_graph(planted.edges(), n),
        aft=build_aft(None, n, seed),
        labels=labels,
        label_count=communities,
        label_names=[str(community) for community in range(communities)],
    )
    logger.info(f"Generated {dataset} (p_in={p_in}, p_out={p_out}, seed={seed})")
    return dataset


def write_edge_list_dataset(dataset, edges_path, labels_path):
    """Write a dataset as 0-based edge and label files readable by load_edge_list_dataset."""
    with open(edges_path, 'w', encoding='utf-8') as handle:
        handle.write(f"# {dataset.name}: {dataset.graph.n} nodes, {dataset.graph.num_edges} edges\n")
        handle.writelines(f"{u} {v}\n" for u, v in dataset.graph.edges)
    with open(labels_path, 'w', encoding='utf-8') as handle:
        names = dataset.label_names or [str(label) for label in range(dataset.label_count)]
        handle.writelines(f"{node} {names[label]}\n" for node, label in enumerate(dataset.labels))
    logger.info(f"Wrote {dataset.name} to {edges_path} and {labels_path}")
