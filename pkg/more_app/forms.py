"""
Django forms validating externally supplied training configurations.

Management command flags and every object of a benchmark grid file pass
through TrainConfigForm before a TrainConfig is built, so bad values are
reported as form errors instead of failing deep inside training.
"""

import logging
import math

from django import forms

from .features import ScaleMode
from .model import Aggregator
from .training import MODEL_BASELINE, MODEL_MORE, TrainConfig

logger = logging.getLogger(__name__)

# "gcn" is accepted as another name for the baseline
MODEL_ALIASES = {'gcn': MODEL_BASELINE, MODEL_BASELINE: MODEL_BASELINE, MODEL_MORE: MODEL_MORE}


class TrainConfigForm(forms.Form):
    """
    Form for one training configuration.

    Any field left out of the submitted data takes its value from the
    settings-derived defaults (TrainConfig.from_settings).
    """
    AGGREGATOR_CHOICES = [(mode.value, mode.label) for mode in Aggregator]
    MODEL_CHOICES = [(MODEL_MORE, 'MORE'), (MODEL_BASELINE, 'GCN baseline'), ('gcn', 'GCN baseline')]
    SCALE_CHOICES = [(mode.value, mode.value) for mode in ScaleMode]

    lr = forms.FloatField(label="Learning rate")
    max_epoch = forms.IntegerField(label="Maximum epochs", min_value=0)
    dropout_p = forms.FloatField(label="Dropout rate")
    l2 = forms.FloatField(label="L2 weight", min_value=0.0)
    tolerance = forms.IntegerField(label="Early-stopping tolerance", min_value=1)
    embed_dim = forms.IntegerField(label="Embedding dimension", min_value=1)
    aggregator = forms.ChoiceField(choices=AGGREGATOR_CHOICES)
    seed = forms.IntegerField(min_value=0)
    model = forms.ChoiceField(choices=MODEL_CHOICES)
    scale = forms.ChoiceField(choices=SCALE_CHOICES, label="Structural feature scaling")

    def __init__(self, data=None, *args, **kwargs):
        if data is not None:
            defaults = TrainConfig.from_settings().as_json_dict()
            data = {**defaults, **{key: value for key, value in data.items() if value is not None}}
        super().__init__(data, *args, **kwargs)

    def clean_lr(self):
        """Validate that the learning rate is positive and finite."""
        lr = self.cleaned_data.get('lr')
        if lr is None or not math.isfinite(lr) or lr <= 0:
            raise forms.ValidationError("Learning rate must be a positive number")
        return lr

    def clean_dropout_p(self):
        dropout_p = self.cleaned_data.get('dropout_p')
        if not 0.0 <= dropout_p < 1.0:
            raise forms.ValidationError("Dropout rate must lie in [0, 1)")
        return dropout_p

    def clean_model(self):
        return MODEL_ALIASES[self.cleaned_data.get('model')]

    def clean(self):
        """
        Override clean method to add configuration validation logging.
        """
        cleaned_data = super().clean()
        if self.errors:
            logger.warning(f"Training configuration rejected: {self.errors.as_text()}")
        return cleaned_data

    def to_config(self):
        """
        Build the validated TrainConfig.

        Raises:
            ValidationError: if the form is not valid
        """
        if not self.is_valid():
            raise forms.ValidationError(f"Invalid training configuration: {self.errors.as_text()}")
        data = self.cleaned_data
        config = TrainConfig(
            lr=data['lr'],
            max_epoch=data['max_epoch'],
            dropout_p=data['dropout_p'],
            l2=data['l2'],
            tolerance=data['tolerance'],
            embed_dim=data['embed_dim'],
            aggregator=Aggregator(data['aggregator']),
            seed=data['seed'],
            model=data['model'],
            scale=ScaleMode(data['scale']),
        )
        logger.info(f"Validated configuration for {config.label}: {config.as_json_dict()}")
        return config
