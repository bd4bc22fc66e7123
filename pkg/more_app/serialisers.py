"""
JSON representations of benchmark results, training reports, configurations
and parameter checkpoints.

JSON text is produced with the DRF JSONRenderer and read back with the
JSONParser, so every file the commands write has one encoding path.
"""

import io
import logging

import numpy as np
from rest_framework import serializers
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from .exceptions import StateError
from .model import Aggregator, BaselineParams, MoreParams
from .models import BenchmarkResult
from .training import MODEL_BASELINE, MODEL_MORE

logger = logging.getLogger(__name__)


class BenchmarkResultSerialiser(serializers.ModelSerializer):
     class Meta:
         model=BenchmarkResult
         fields=['result_id','dataset','model','aggregator','lr','max_epoch','embed_dim','seed',
                 'accuracy','iter_count','astt','oit','tet','error','created_at']


class EpochRecordSerialiser(serializers.Serializer):
     epoch=serializers.IntegerField()
     train_loss=serializers.FloatField()
     val_loss=serializers.FloatField()
     test_loss=serializers.FloatField()
     train_acc=serializers.FloatField()
     val_acc=serializers.FloatField()
     test_acc=serializers.FloatField()


class TrainReportSerialiser(serializers.Serializer):
     history=EpochRecordSerialiser(many=True)
     iter_count=serializers.IntegerField()
     astt=serializers.FloatField()
     oit=serializers.FloatField()
     tet=serializers.FloatField()
     test_accuracy=serializers.FloatField()
     best_epoch=serializers.IntegerField()
     stopped_early=serializers.BooleanField()


class TrainConfigSerialiser(serializers.Serializer):
     """Represents a TrainConfig; enums are written as their string values."""
     lr=serializers.FloatField()
     max_epoch=serializers.IntegerField()
     dropout_p=serializers.FloatField()
     l2=serializers.FloatField()
     tolerance=serializers.IntegerField()
     embed_dim=serializers.IntegerField()
     aggregator=serializers.CharField(source='aggregator.value')
     seed=serializers.IntegerField()
     model=serializers.CharField()
     scale=serializers.CharField(source='scale.value')
     config_hash=serializers.CharField()


class ParamsCheckpointSerialiser(serializers.Serializer):
     model=serializers.ChoiceField(choices=[MODEL_MORE, MODEL_BASELINE])
     aggregator=serializers.ChoiceField(choices=[mode.value for mode in Aggregator], allow_blank=True)
     seed=serializers.IntegerField()
     config_hash=serializers.CharField(max_length=64, min_length=64)
     params=serializers.DictField(child=serializers.DictField())

     def validate_params(self, value):
          """Each entry needs a shape and exactly prod(shape) values."""
          for name, entry in value.items():
               shape = entry.get('shape')
               values = entry.get('values')
               if not isinstance(shape, list) or not isinstance(values, list):
                    raise serializers.ValidationError(f"Parameter {name} needs a 'shape' and a 'values' list")
               if len(values) != int(np.prod(shape)):
                    raise serializers.ValidationError(
                         f"Parameter {name}: shape {shape} needs {int(np.prod(shape))} values, got {len(values)}")
          return value


def render_json(data):
    return JSONRenderer().render(data, renderer_context={'indent': 2})


def parse_json(raw):
    return JSONParser().parse(io.BytesIO(raw))


def write_json(path, data):
    with open(path, 'wb') as handle:
        handle.write(render_json(data))


def read_json(path):
    with open(path, 'rb') as handle:
        return parse_json(handle.read())


def report_document(dataset_name, config, report):
    return {
        'dataset': dataset_name,
        'model': config.label,
        'config': TrainConfigSerialiser(config).data,
        'report': TrainReportSerialiser(report).data,
    }


def save_checkpoint(path, params, config):
    """Write parameters with the identity of the configuration that produced them."""
    document = {
        'model': MODEL_MORE if isinstance(params, MoreParams) else MODEL_BASELINE,
        'aggregator': config.aggregator.value if isinstance(params, MoreParams) else "",
        'seed': config.seed,
        'config_hash': config.config_hash(),
        'params': {
            name: {'shape': list(value.shape), 'values': value.ravel().tolist()}
            for name, value in params.as_dict().items()
        },
    }
    write_json(path, document)
    logger.info(f"Saved {config.label} checkpoint to {path}")


def load_checkpoint(path):
    """
    Read a checkpoint written by save_checkpoint.

    Returns:
        (MoreParams or BaselineParams, validated checkpoint metadata dict)

    Raises:
        StateError: if the file is not a valid checkpoint
    """
    serialiser = ParamsCheckpointSerialiser(data=read_json(path))
    if not serialiser.is_valid():
        logger.error(f"Invalid checkpoint {path}: {serialiser.errors}")
        raise StateError(f"Invalid checkpoint {path}: {dict(serialiser.errors)}")
    document = serialiser.validated_data
    kind = MoreParams if document['model'] == MODEL_MORE else BaselineParams
    arrays = {
        name: np.asarray(entry['values'], dtype=np.float64).reshape(entry['shape'])
        for name, entry in document['params'].items()
    }
    try:
        params = kind.from_dict(arrays)
    except KeyError as e:
        raise StateError(f"Checkpoint {path} lacks parameter {e}")
    logger.info(f"Loaded {kind.__name__} checkpoint from {path}")
    return params, document
