"""
Training protocol: splits, Adam, early stopping, evaluation and timing.

A run trains either the motif-aware model (attribute + structural branches)
or the two-layer GCN baseline on a PreparedDataset, records per-epoch
train/val/test loss and accuracy, and reports the iteration count together
with the average single training time (ASTT), the overall iteration time
(OIT) and the test evaluation time (TET).
"""

from dataclasses import asdict, dataclass, field, replace
import hashlib
import json
import logging
import math
import time

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.exceptions import ValidationError

from .exceptions import TrainingError
from .features import ScaleMode, build_sft, scale_columns
from .graph import renormalized_propagator
from .model import (
    Aggregator, MoreParams, backward, baseline_forward, init_baseline_params,
    init_more_params, loss, mask_indices, more_forward,
)
from .motifs import census

# Configure logging
logger = logging.getLogger(__name__)

MODEL_MORE = "more"
MODEL_BASELINE = "baseline"

# Split sizes used for networks with 1150..3000 nodes; other sizes keep the proportions.
SPLIT_TRAIN, SPLIT_VAL, SPLIT_TEST = 150, 500, 500
SPLIT_REFERENCE = SPLIT_TRAIN + SPLIT_VAL + SPLIT_TEST


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.01
    max_epoch: int = 300
    dropout_p: float = 0.5
    l2: float = 0.0005
    tolerance: int = 30
    embed_dim: int = 256
    aggregator: Aggregator = Aggregator.HA
    seed: int = 0
    model: str = MODEL_MORE
    scale: ScaleMode = ScaleMode.NONE

    @classmethod
    def from_settings(cls, **overrides):
        """Defaults from settings.MORE, then the given overrides."""
        defaults = settings.MORE
        config = cls(
            lr=defaults['LR'],
            max_epoch=defaults['MAX_EPOCH'],
            dropout_p=defaults['DROPOUT'],
            l2=defaults['L2'],
            tolerance=defaults['TOLERANCE'],
            embed_dim=defaults['EMBED_DIM'],
            seed=defaults['SEED'],
        )
        return replace(config, **overrides)

    @property
    def label(self):
        return "GCN" if self.model == MODEL_BASELINE else self.aggregator.label

    def as_json_dict(self):
        values = asdict(self)
        values['aggregator'] = self.aggregator.value
        values['scale'] = self.scale.value
        return values

    def config_hash(self):
        canonical = json.dumps(self.as_json_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


@dataclass(frozen=True)
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def sizes(self):
        return len(self.train), len(self.val), len(self.test)


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    test_loss: float
    train_acc: float
    val_acc: float
    test_acc: float


@dataclass
class TrainReport:
    history: list
    iter_count: int
    astt: float
    oit: float
    tet: float
    test_accuracy: float
    best_epoch: int
    stopped_early: bool = False

    def curve(self, name):
        return [getattr(record, name) for record in self.history]


@dataclass
class PreparedDataset:
    """Everything one training run needs, computed once per dataset."""
    name: str
    prop: object
    aft: np.ndarray
    sft: np.ndarray
    labels: np.ndarray
    one_hot: np.ndarray
    label_count: int
    split: Split


def make_split(n, labels, seed):
    """
    Draw disjoint train/val/test index sets.

    Networks with 1150 <= n <= 3000 nodes get 150/500/500 nodes; any other
    size keeps the same proportions, rounded down.

    Raises:
        ValidationError: if labels do not cover n nodes or a set would be empty
    """
    if labels is not None and len(labels) != n:
        raise ValidationError(f"Expected {n} labels, got {len(labels)}")
    if SPLIT_REFERENCE <= n <= 3000:
        sizes = (SPLIT_TRAIN, SPLIT_VAL, SPLIT_TEST)
    else:
        sizes = tuple(n * size // SPLIT_REFERENCE for size in (SPLIT_TRAIN, SPLIT_VAL, SPLIT_TEST))
    if min(sizes) < 1:
        raise ValidationError(f"{n} nodes are too few for a train/val/test split (sizes {sizes})")

    order = np.random.default_rng(seed).permutation(n)
    train_end = sizes[0]
    val_end = train_end + sizes[1]
    split = Split(
        train=np.sort(order[:train_end]),
        val=np.sort(order[train_end:val_end]),
        test=np.sort(order[val_end:val_end + sizes[2]]),
    )
    logger.info(f"Split {n} nodes into {split.sizes()} with seed {seed}")
    return split


def adam_step(params, grads, state, lr):
    """
    One bias-corrected Adam update.

    Args:
        params: dict name -> array
        grads: dict name -> array of the same shapes
        state: AdamState, not modified
        lr: step size

    Returns:
        (new params dict, new AdamState)
    """
    t = state.t + 1
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t
    updated, first, second = {}, {}, {}
    for name, value in params.items():
        g = grads[name]
        m = state.m.get(name, np.zeros_like(value))
        v = state.v.get(name, np.zeros_like(value))
        first[name] = state.beta1 * m + (1.0 - state.beta1) * g
        second[name] = state.beta2 * v + (1.0 - state.beta2) * (g * g)
        m_hat = first[name] / correction1
        v_hat = second[name] / correction2
        updated[name] = value - lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return updated, replace(state, m=first, v=second, t=t)


def prepare(dataset, config):
    """Census, structural features, propagator and split for one dataset."""
    logger.info(f"Preparing dataset {dataset.name} ({dataset.graph})")
    motif_census = census(dataset.graph)
    sft = scale_columns(build_sft(dataset.graph, motif_census), config.scale).matrix
    labels = np.asarray(dataset.labels, dtype=np.int64)
    return PreparedDataset(
        name=dataset.name,
        prop=renormalized_propagator(dataset.graph),
        aft=dataset.aft.matrix,
        sft=sft,
        labels=labels,
        one_hot=np.eye(dataset.label_count)[labels],
        label_count=dataset.label_count,
        split=make_split(dataset.graph.n, labels, config.seed),
    )


def init_params(data, config):
    if config.model == MODEL_BASELINE:
        return init_baseline_params(data.aft.shape[1], config.embed_dim, data.label_count, config.seed)
    return init_more_params(data.aft.shape[1], data.sft.shape[1], config.embed_dim, data.label_count,
                            config.aggregator, config.seed)


def forward(params, data, config, train_mode=False, seed=None):
    dropout_p = config.dropout_p if train_mode else 0.0
    if isinstance(params, MoreParams):
        return more_forward(data.prop, data.aft, data.sft, params, config.aggregator,
                            train_mode=train_mode, dropout_p=dropout_p, seed=seed)
    return baseline_forward(data.prop, data.aft, params, train_mode=train_mode, dropout_p=dropout_p, seed=seed)


def accuracy(output, labels, mask):
    indices = mask_indices(mask, output.probs.shape[0])
    return float(np.mean(output.predictions[indices] == np.asarray(labels)[indices]))


def evaluate(params, data, mask, config):
    """
    Fraction of masked nodes whose arg-max probability is the true label.

    Eval mode, so the result is deterministic; ties go to the lowest label.
    `config` supplies the aggregator of a MORE model.
    """
    return accuracy(forward(params, data, config), data.labels, mask)


def _epoch_record(epoch, train_loss, output, params, data, config):
    split = data.split
    return EpochRecord(
        epoch=epoch,
        train_loss=train_loss,
        val_loss=loss(output, data.one_hot, split.val, params, config.l2),
        test_loss=loss(output, data.one_hot, split.test, params, config.l2),
        train_acc=accuracy(output, data.labels, split.train),
        val_acc=accuracy(output, data.labels, split.val),
        test_acc=accuracy(output, data.labels, split.test),
    )


def train(data, config):
    """
    Train with Adam and early stopping on validation loss.

    Each epoch runs a train-mode forward pass, the loss on the training nodes,
    backward and one Adam step, then an eval-mode pass for the curves. Training
    stops after `tolerance` consecutive epochs without a new strict best
    validation loss; the best-validation parameters are evaluated on the test
    set.

    Returns:
        (TrainReport, best parameters)

    Raises:
        TrainingError: if the training loss becomes non-finite
    """
    logger.info(f"Training {config.label} on {data.name}: lr={config.lr}, max_epoch={config.max_epoch}, "
                f"embed_dim={config.embed_dim}, seed={config.seed}")
    params = init_params(data, config)
    kind = type(params)
    split = data.split
    adam = AdamState()
    dropout_seeds = np.random.default_rng([config.seed, 1]).integers(0, 2**32, size=config.max_epoch)

    best_val = math.inf
    best_params = params.copy()
    best_epoch = 0
    stale = 0
    history = []
    step_seconds = []
    stopped_early = False

    loop_start = time.perf_counter()
    for epoch in range(1, config.max_epoch + 1):
        step_start = time.perf_counter()
        output = forward(params, data, config, train_mode=True, seed=int(dropout_seeds[epoch - 1]))
        train_loss = loss(output, data.one_hot, split.train, params, config.l2)
        if not math.isfinite(train_loss):
            logger.error(f"Non-finite training loss {train_loss} for {config.label} on {data.name}")
            raise TrainingError(f"Training loss became {train_loss}", epoch)
        grads = backward(output, data.one_hot, split.train, params, config.l2)
        updated, adam = adam_step(params.as_dict(), grads, adam, config.lr)
        params = kind.from_dict(updated)
        step_seconds.append(time.perf_counter() - step_start)

        record = _epoch_record(epoch, train_loss, forward(params, data, config), params, data, config)
        history.append(record)
        if record.val_loss < best_val:
            best_val = record.val_loss
            best_params = params.copy()
            best_epoch = epoch
            stale = 0
        else:
            stale += 1

        if epoch % settings.MORE['LOG_EVERY'] == 0:
            logger.info(f"Epoch {epoch:04d} | train loss {record.train_loss:.4f} | val loss {record.val_loss:.4f} | "
                        f"train {record.train_acc:.3f} | val {record.val_acc:.3f} | test {record.test_acc:.3f}")
        if stale >= config.tolerance:
            stopped_early = True
            logger.info(f"Early stop at epoch {epoch}: no new best validation loss for {config.tolerance} epochs")
            break
    oit = time.perf_counter() - loop_start

    test_start = time.perf_counter()
    test_accuracy = evaluate(best_params, data, split.test, config)
    tet = time.perf_counter() - test_start

    report = TrainReport(
        history=history,
        iter_count=len(history),
        astt=float(np.mean(step_seconds)) if step_seconds else 0.0,
        oit=oit,
        tet=tet,
        test_accuracy=test_accuracy,
        best_epoch=best_epoch,
        stopped_early=stopped_early,
    )
    logger.info(f"{config.label} on {data.name}: test accuracy {test_accuracy:.4f} after {report.iter_count} "
                f"iterations (best epoch {best_epoch}, OIT {oit:.3f}s)")
    return report, best_params


def embedding_frame(params, data, config):
    """
    Eval-mode node embeddings as a table, one row per node.

    A MORE model gives the attribute branch (`attr_*`), the structural branch
    (`struct_*`) and their aggregate (`agg_*`); the baseline gives its hidden
    layer (`hidden_*`). The `node` and `label` columns come first.
    """
    cache = forward(params, data, config).cache
    if isinstance(params, MoreParams):
        blocks = (('attr', cache['h_a']), ('struct', cache['h_s']), ('agg', cache['combined']))
    else:
        blocks = (('hidden', cache['hidden']),)
    frame = pd.DataFrame({'node': np.arange(len(data.labels)), 'label': data.labels})
    columns = [pd.DataFrame(values, columns=[f"{prefix}_{i}" for i in range(values.shape[1])])
               for prefix, values in blocks]
    return pd.concat([frame, *columns], axis=1)
