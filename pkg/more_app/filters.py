"""
This module defines filters over stored benchmark results using the Django filters framework.
"""

import logging
import django_filters
from .models import BenchmarkResult

# Configure logging
logger = logging.getLogger(__name__)

# Filter for use by the report command
class BenchmarkResultFilter(django_filters.FilterSet):
    """
    Filter for stored benchmark results.

    This filter allows selecting results by dataset, model, learning rate, epoch limit,
    embedding dimension and a minimum accuracy. Failed rows can be excluded.
    """
    dataset = django_filters.CharFilter(
        label="Dataset",
        field_name='dataset',
        lookup_expr='iexact'
    )
    model = django_filters.CharFilter(
        label="Model",
        field_name='model',
        lookup_expr='iexact'
    )
    lr = django_filters.NumberFilter(
        label="Learning rate",
        field_name='lr',
        lookup_expr='exact'
    )
    max_epoch = django_filters.NumberFilter(
        label="Maximum epochs",
        field_name='max_epoch',
        lookup_expr='exact',
        min_value=0
    )
    embed_dim = django_filters.NumberFilter(
        label="Embedding dimension",
        field_name='embed_dim',
        lookup_expr='exact',
        min_value=1
    )
    min_accuracy = django_filters.NumberFilter(
        label="Minimum accuracy",
        field_name='accuracy',
        lookup_expr='gte',
        min_value=0,
        max_value=1
    )
    succeeded = django_filters.BooleanFilter(
        label="Only successful rows",
        method='filter_succeeded'
    )

    def filter_succeeded(self, queryset, name, value):
        """
        Keep only rows without an error (True) or only failed rows (False).
        """
        if value is None:
            return queryset
        logger.info(f"Filtering benchmark results by success: {value}")
        if value:
            return queryset.filter(error="")
        return queryset.exclude(error="")

    class Meta:
        model = BenchmarkResult
        fields = ['dataset', 'model', 'lr', 'max_epoch', 'embed_dim', 'min_accuracy', 'succeeded']
