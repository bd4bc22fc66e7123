# django data models used to store benchmark results
# so that runs can be compared and reported on later
import logging
import math

from django.core.exceptions import ValidationError
from django.core.validators import MinValueValidator, MaxValueValidator, RegexValidator
from django.db import models


def validate_model_label(value):
    valid_labels = ['GCN', 'MORE-HA', 'MORE-SU', 'MORE-CO']
    if value not in valid_labels:
        raise ValidationError(
            f'{value} is not a valid model. Please use one of: {", ".join(valid_labels)}'
        )


def validate_learning_rate(value):
    """Validate that the learning rate is a positive finite number."""
    if value is None or not math.isfinite(value) or value <= 0:
        raise ValidationError(f'Learning rate must be a positive number, got {value}')


validate_dataset_name = RegexValidator(
    r'^[A-Za-z0-9_\-\.]+$',
    message="Dataset name can only contain letters, digits, underscores, hyphens and dots"
)


# Configure logging
logger = logging.getLogger(__name__)


class BenchmarkResult(models.Model):
    """
    One row of a benchmark run: a model variant trained with one configuration on one dataset.

    Failed rows keep their error message and leave the metric fields empty.
    """
    AGGREGATOR_CHOICES = [
        ("", "None"),  # the GCN baseline has no aggregator
        ("ha", "Hadamard"),
        ("su", "Sum"),
        ("co", "Concatenation"),
    ]

    result_id = models.AutoField(primary_key=True)  # Unique identifier for each result
    dataset = models.CharField(
        max_length=80,
        validators=[validate_dataset_name],
        help_text="Name of the dataset (e.g., 'cora', 'football')"
    )
    model = models.CharField(
        max_length=10,
        validators=[validate_model_label],
        help_text="Model variant: GCN, MORE-HA, MORE-SU or MORE-CO"
    )
    aggregator = models.CharField(
        max_length=2,
        choices=AGGREGATOR_CHOICES,
        blank=True,
        default="",
        help_text="Aggregation of the two embeddings (empty for the baseline)"
    )
    lr = models.FloatField(
        validators=[validate_learning_rate],
        help_text="Adam learning rate"
    )
    max_epoch = models.PositiveIntegerField(
        help_text="Epoch limit of the run"
    )
    embed_dim = models.PositiveIntegerField(
        validators=[MinValueValidator(1)],
        help_text="Width of each embedding"
    )
    seed = models.IntegerField(default=0)
    accuracy = models.FloatField(
        null=True,
        blank=True,
        validators=[MinValueValidator(0.0), MaxValueValidator(1.0)],
        help_text="Test accuracy of the best-validation parameters, in [0, 1]"
    )
    iter_count = models.PositiveIntegerField(default=0)  # epochs actually run
    astt = models.FloatField(null=True, blank=True, help_text="Average single training step time in seconds")
    oit = models.FloatField(null=True, blank=True, help_text="Overall iteration time in seconds")
    tet = models.FloatField(null=True, blank=True, help_text="Test evaluation time in seconds")
    error = models.TextField(blank=True, default="", help_text="Error message of a failed row")
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['dataset', 'model', 'lr', 'max_epoch', 'embed_dim', 'result_id']

    @classmethod
    def from_row(cls, row):
        """Build an unsaved result from a BenchmarkRow; NaN metrics become NULL."""
        def finite(value):
            return value if value is not None and math.isfinite(value) else None

        return cls(
            dataset=row.dataset,
            model=row.model,
            aggregator=row.aggregator,
            lr=row.lr,
            max_epoch=row.max_epoch,
            embed_dim=row.embed_dim,
            seed=row.seed,
            accuracy=finite(row.accuracy),
            iter_count=row.iter_count,
            astt=finite(row.astt),
            oit=finite(row.oit),
            tet=finite(row.tet),
            error=row.error,
        )

    def clean(self):
        super().clean()
        if self.model == 'GCN' and self.aggregator:
            raise ValidationError("The GCN baseline has no aggregator.")
        if self.model.startswith('MORE-') and self.aggregator != self.model[-2:].lower():
            raise ValidationError(f"Model {self.model} does not match aggregator '{self.aggregator}'.")
        if not self.error and self.accuracy is None:
            raise ValidationError("A successful result needs an accuracy.")

    def save(self, *args, **kwargs):
        self.full_clean()  # Call full_clean before saving to force validation
        super().save(*args, **kwargs)

    @property
    def failed(self):
        return bool(self.error)

    def __str__(self):
        accuracy = "failed" if self.failed else f"{self.accuracy:.4f}"
        result_str = f"{self.dataset} {self.model} lr={self.lr} epochs={self.max_epoch} ED={self.embed_dim}: {accuracy}"
        logger.debug(f"BenchmarkResult __str__ called: {result_str}")
        return result_str
