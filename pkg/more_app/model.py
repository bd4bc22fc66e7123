"""
Forward and backward passes of the motif-aware classifier and the GCN baseline.

MORE:      probs = softmax(Ã · Aggre(ReLU(Ã·AFT·W_a), ReLU(Ã·SFT·W_s)) · Θ)
Baseline:  probs = softmax(Ã · ReLU(Ã·X·W0) · W1)

Dropout (inverted, rate p) is applied in train mode to each branch input and
to the aggregated matrix (MORE), or before each layer (baseline). Masks are
drawn from a generator seeded per call, so a forward pass with the same seed
replays the same masks. No layer has a bias term.

Gradients are derived by hand; Ã is symmetric, so Ãᵀ products reuse Ã.
"""

from dataclasses import dataclass, field, fields
from enum import Enum
import logging

import numpy as np
from django.core.exceptions import ValidationError

from .exceptions import ShapeError, StateError
from .graph import spmm

# Configure logging
logger = logging.getLogger(__name__)

PROBABILITY_FLOOR = 1e-12


class Aggregator(Enum):
    HA = "ha"  # Hadamard product
    SU = "su"  # elementwise sum
    CO = "co"  # column concatenation, attribute columns first

    def width(self, embed_dim):
        return 2 * embed_dim if self is Aggregator.CO else embed_dim

    @property
    def label(self):
        return f"MORE-{self.name}"


class _ParamsMixin:
    """Dictionary view of a parameter dataclass, used by the optimizer and checkpoints."""

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def copy(self):
        return type(self)(**{name: value.copy() for name, value in self.as_dict().items()})

    @classmethod
    def from_dict(cls, values):
        return cls(**{f.name: np.asarray(values[f.name], dtype=np.float64) for f in fields(cls)})

    def shapes(self):
        return {name: value.shape for name, value in self.as_dict().items()}

    def squared_norm(self):
        return sum(float(np.sum(value * value)) for value in self.as_dict().values())


@dataclass
class MoreParams(_ParamsMixin):
    w_a: np.ndarray  # attribute branch, d_a x ED
    w_s: np.ndarray  # structural branch, 6 x ED
    theta: np.ndarray  # h x L, h = ED (HA/SU) or 2·ED (CO)


@dataclass
class BaselineParams(_ParamsMixin):
    w0: np.ndarray  # d_a x ED
    w1: np.ndarray  # ED x L


@dataclass
class ModelOutput:
    probs: np.ndarray
    logits: np.ndarray
    cache: dict = field(repr=False, default_factory=dict)

    @property
    def predictions(self):
        # np.argmax returns the lowest index on ties
        return np.argmax(self.probs, axis=1)


def glorot_uniform(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_more_params(attr_dim, struct_dim, embed_dim, label_count, aggregator, seed):
    rng = np.random.default_rng(seed)
    width = Aggregator(aggregator).width(embed_dim)
    return MoreParams(
        w_a=glorot_uniform(rng, attr_dim, embed_dim),
        w_s=glorot_uniform(rng, struct_dim, embed_dim),
        theta=glorot_uniform(rng, width, label_count),
    )


def init_baseline_params(attr_dim, embed_dim, label_count, seed):
    rng = np.random.default_rng(seed)
    return BaselineParams(
        w0=glorot_uniform(rng, attr_dim, embed_dim),
        w1=glorot_uniform(rng, embed_dim, label_count),
    )


def dropout_mask(rng, shape, p):
    """Inverted-dropout mask (kept entries scaled by 1/(1-p)), or None when p is 0."""
    if p <= 0.0:
        return None
    return (rng.random(shape) >= p).astype(np.float64) / (1.0 - p)


def _check_propagator(prop, x):
    if prop.shape[0] != prop.shape[1] or prop.shape[1] != x.shape[0]:
        raise ShapeError(f"Propagator of shape {prop.shape} does not match {x.shape[0]} feature rows")


def _check_product(x, w, name):
    if x.ndim != 2 or w.ndim != 2 or x.shape[1] != w.shape[0]:
        raise ShapeError(f"{name}: cannot multiply features {x.shape} by weights {w.shape}")


def _embed(prop, x, w, mask):
    """One graph convolution; returns (ReLU output, pre-activation, dropped input)."""
    _check_propagator(prop, x)
    _check_product(x, w, "gcn_embed")
    dropped = x * mask if mask is not None else x
    pre = spmm(prop, dropped @ w)
    return np.maximum(pre, 0.0), pre, dropped


def gcn_embed(prop, x, w, train_mode=False, dropout_p=0.0, seed=None):
    """
    ReLU(Ã · dropout(x) · w).

    Dropout is only active in train mode; eval mode is deterministic.

    Raises:
        ShapeError: if prop, x and w do not chain
    """
    x = np.asarray(x, dtype=np.float64)
    mask = dropout_mask(np.random.default_rng(seed), x.shape, dropout_p) if train_mode else None
    return _embed(prop, x, np.asarray(w, dtype=np.float64), mask)[0]


def aggregate(h_a, h_s, mode):
    """
    Combine the two branch embeddings.

    Raises:
        ShapeError: HA/SU need equal shapes, CO needs equal row counts
    """
    mode = Aggregator(mode)
    if mode is Aggregator.CO:
        if h_a.shape[0] != h_s.shape[0]:
            raise ShapeError(f"CO aggregation needs equal row counts, got {h_a.shape} and {h_s.shape}")
        return np.hstack([h_a, h_s])
    if h_a.shape != h_s.shape:
        raise ShapeError(f"{mode.name} aggregation needs equal shapes, got {h_a.shape} and {h_s.shape}")
    if mode is Aggregator.HA:
        return h_a * h_s
    return h_a + h_s


def softmax_rows(z):
    """Row-wise softmax with the row maximum subtracted before exponentiation."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def more_forward(prop, aft, sft, params, mode, train_mode=False, dropout_p=0.0, seed=None):
    """
    Forward pass: softmax(Ã · Aggre(GCN(AFT), GCN(SFT)) · Θ).

    Masks are drawn in a fixed order (attribute input, structural input,
    aggregate) from one generator seeded with `seed`.

    Returns:
        ModelOutput with probabilities and the intermediates backward() needs
    """
    mode = Aggregator(mode)
    aft = np.asarray(aft, dtype=np.float64)
    sft = np.asarray(sft, dtype=np.float64)
    if aft.shape[0] != sft.shape[0]:
        raise ShapeError(f"AFT has {aft.shape[0]} rows but SFT has {sft.shape[0]}")
    if params.w_a.shape[1] != params.w_s.shape[1]:
        raise ShapeError(f"Branch widths differ: {params.w_a.shape[1]} vs {params.w_s.shape[1]}")
    if params.theta.shape[0] != mode.width(params.w_a.shape[1]):
        raise ShapeError(f"Θ has {params.theta.shape[0]} rows, {mode.name} aggregation yields {mode.width(params.w_a.shape[1])}")

    rng = np.random.default_rng(seed)
    mask_a = dropout_mask(rng, aft.shape, dropout_p) if train_mode else None
    mask_s = dropout_mask(rng, sft.shape, dropout_p) if train_mode else None
    h_a, z_a, x_a = _embed(prop, aft, params.w_a, mask_a)
    h_s, z_s, x_s = _embed(prop, sft, params.w_s, mask_s)

    combined = aggregate(h_a, h_s, mode)
    mask_g = dropout_mask(rng, combined.shape, dropout_p) if train_mode else None
    combined_dropped = combined * mask_g if mask_g is not None else combined
    propagated = spmm(prop, combined_dropped)
    logits = propagated @ params.theta

    return ModelOutput(
        probs=softmax_rows(logits),
        logits=logits,
        cache={
            'model': 'more', 'aggregator': mode, 'prop': prop, 'shapes': params.shapes(),
            'x_a': x_a, 'z_a': z_a, 'h_a': h_a,
            'x_s': x_s, 'z_s': z_s, 'h_s': h_s,
            'combined': combined, 'mask_g': mask_g, 'propagated': propagated,
        },
    )


def baseline_forward(prop, x, params, train_mode=False, dropout_p=0.0, seed=None):
    """Two-layer GCN: softmax(Ã · ReLU(Ã·X·W0) · W1), dropout before each layer."""
    x = np.asarray(x, dtype=np.float64)
    _check_product(params.w0, params.w1, "baseline_forward")
    rng = np.random.default_rng(seed)
    mask_0 = dropout_mask(rng, x.shape, dropout_p) if train_mode else None
    hidden, z_1, x_0 = _embed(prop, x, params.w0, mask_0)
    mask_1 = dropout_mask(rng, hidden.shape, dropout_p) if train_mode else None
    hidden_dropped = hidden * mask_1 if mask_1 is not None else hidden
    propagated = spmm(prop, hidden_dropped)
    logits = propagated @ params.w1

    return ModelOutput(
        probs=softmax_rows(logits),
        logits=logits,
        cache={
            'model': 'baseline', 'prop': prop, 'shapes': params.shapes(),
            'x_0': x_0, 'z_1': z_1, 'hidden': hidden, 'mask_1': mask_1, 'propagated': propagated,
        },
    )


def mask_indices(mask, n):
    """
    Normalise a node subset (boolean vector or index array) to sorted indices.

    Raises:
        ValidationError: if the subset is empty
    """
    mask = np.asarray(mask)
    indices = np.flatnonzero(mask) if mask.dtype == bool else np.unique(mask.astype(np.int64))
    if len(indices) == 0:
        raise ValidationError("The node mask must select at least one node")
    if indices[-1] >= n or indices[0] < 0:
        raise ValidationError(f"The node mask refers to nodes outside [0, {n})")
    return indices


def loss(output, labels, mask, params, l2):
    """
    Masked mean cross-entropy plus (l2/2)·Σ‖W‖² over every trainable matrix.

    Probabilities are floored at 1e-12 inside the logarithm.
    """
    labels = np.asarray(labels, dtype=np.float64)
    indices = mask_indices(mask, output.probs.shape[0])
    probs = np.maximum(output.probs[indices], PROBABILITY_FLOOR)
    cross_entropy = -np.sum(labels[indices] * np.log(probs), axis=1).mean()
    return float(cross_entropy + 0.5 * l2 * params.squared_norm())


def backward(output, labels, mask, params, l2):
    """
    Exact gradients of loss() with respect to every parameter matrix.

    The cache must come from a forward pass of the same model with parameters
    of the same shapes; dropout masks stored there are reused.

    Returns:
        dict: parameter name -> gradient array

    Raises:
        StateError: if the cache does not belong to these parameters
    """
    cache = output.cache
    expected = 'more' if isinstance(params, MoreParams) else 'baseline'
    if cache.get('model') != expected or cache.get('shapes') != params.shapes():
        raise StateError(f"Forward cache of model {cache.get('model')!r} does not match {type(params).__name__} {params.shapes()}")

    labels = np.asarray(labels, dtype=np.float64)
    indices = mask_indices(mask, output.probs.shape[0])
    d_logits = np.zeros_like(output.probs)
    d_logits[indices] = (output.probs[indices] - labels[indices]) / len(indices)
    prop = cache['prop']

    if expected == 'baseline':
        d_w1 = cache['propagated'].T @ d_logits + l2 * params.w1
        d_hidden = spmm(prop, d_logits @ params.w1.T)
        if cache['mask_1'] is not None:
            d_hidden = d_hidden * cache['mask_1']
        d_z1 = d_hidden * (cache['z_1'] > 0)
        d_w0 = cache['x_0'].T @ spmm(prop, d_z1) + l2 * params.w0
        return {'w0': d_w0, 'w1': d_w1}

    d_theta = cache['propagated'].T @ d_logits + l2 * params.theta
    d_combined = spmm(prop, d_logits @ params.theta.T)
    if cache['mask_g'] is not None:
        d_combined = d_combined * cache['mask_g']

    mode = cache['aggregator']
    if mode is Aggregator.HA:
        d_h_a = d_combined * cache['h_s']
        d_h_s = d_combined * cache['h_a']
    elif mode is Aggregator.SU:
        d_h_a = d_h_s = d_combined
    else:
        width = cache['h_a'].shape[1]
        d_h_a, d_h_s = d_combined[:, :width], d_combined[:, width:]

    d_z_a = d_h_a * (cache['z_a'] > 0)
    d_z_s = d_h_s * (cache['z_s'] > 0)
    d_w_a = cache['x_a'].T @ spmm(prop, d_z_a) + l2 * params.w_a
    d_w_s = cache['x_s'].T @ spmm(prop, d_z_s) + l2 * params.w_s
    return {'w_a': d_w_a, 'w_s': d_w_s, 'theta': d_theta}
