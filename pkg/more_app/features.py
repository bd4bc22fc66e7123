"""
Attribute and structural feature matrices fed to the two model branches.

SFT columns: [degree, M31, M32, M41, M42, M43 node motif degrees].
"""

from dataclasses import dataclass
from enum import Enum
import logging

import numpy as np

from .exceptions import ShapeError, StateError
from .graph import degrees
from .motifs import nmd_matrix

# Configure logging
logger = logging.getLogger(__name__)

SFT_COLUMNS = ('degree', 'm31', 'm32', 'm41', 'm42', 'm43')


class AttributeSource(Enum):
    FILE = "file"
    SYNTHETIC_ONE_HOT = "synthetic-one-hot"


class ScaleMode(Enum):
    NONE = "none"
    STANDARDIZE = "standardize"
    LOG1P = "log1p"


@dataclass(frozen=True)
class AttributeFeatures:
    matrix: np.ndarray
    source: AttributeSource

    @property
    def dim(self):
        return self.matrix.shape[1]


@dataclass(frozen=True)
class StructuralFeatures:
    matrix: np.ndarray


def build_sft(g, c):
    """
    Stack node degree and the five node motif degrees into an n x 6 matrix.

    Raises:
        StateError: if the census was computed on a graph of another size
    """
    if c.n != g.n:
        raise StateError(f"Census covers {c.n} nodes but the graph has {g.n}")
    matrix = np.column_stack([degrees(g).astype(np.float64), nmd_matrix(c)])
    return StructuralFeatures(matrix=matrix.reshape(g.n, len(SFT_COLUMNS)))


def build_aft(raw, n, seed):
    """
    Return the attribute features for n nodes.

    With raw attributes the matrix is used unchanged. Without them every node
    gets a distinct one-hot row: the rows are a seeded random permutation of
    the n standard basis vectors.

    Raises:
        ShapeError: if raw does not have n rows
    """
    if raw is not None:
        raw = np.asarray(raw, dtype=np.float64)
        if raw.ndim != 2 or raw.shape[0] != n:
            raise ShapeError(f"Attribute matrix of shape {raw.shape} does not describe {n} nodes")
        return AttributeFeatures(matrix=raw, source=AttributeSource.FILE)

    rng = np.random.default_rng(seed)
    matrix = np.zeros((n, n), dtype=np.float64)
    matrix[np.arange(n), rng.permutation(n)] = 1.0
    logger.info(f"Assigned random one-hot attributes to {n} featureless nodes (seed {seed})")
    return AttributeFeatures(matrix=matrix, source=AttributeSource.SYNTHETIC_ONE_HOT)


def scale_columns(f, mode):
    """
    Apply a per-column transform to structural features.

    standardize maps each column to zero mean and unit (population) deviation;
    a constant column becomes all zeros. log1p applies ln(1 + x).
    """
    mode = ScaleMode(mode)
    if mode is ScaleMode.NONE:
        return f
    if mode is ScaleMode.LOG1P:
        return StructuralFeatures(matrix=np.log1p(f.matrix))

    mean = f.matrix.mean(axis=0)
    deviation = f.matrix.std(axis=0)
    constant = np.ptp(f.matrix, axis=0) == 0
    if constant.any():
        logger.warning(f"Constant structural columns mapped to zero: {[SFT_COLUMNS[i] for i in np.flatnonzero(constant)]}")
    scaled = np.zeros_like(f.matrix)
    varying = ~constant
    scaled[:, varying] = (f.matrix[:, varying] - mean[varying]) / deviation[varying]
    return StructuralFeatures(matrix=scaled)
