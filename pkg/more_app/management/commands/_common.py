"""Dataset selection flags and error mapping shared by the management commands."""

import logging

from django.core.exceptions import ValidationError

from ...datasets import generate_synthetic, load_cora, load_edge_list_dataset
from ...exceptions import MoreError
from ...models import BenchmarkResult

logger = logging.getLogger(__name__)


def add_dataset_arguments(parser):
    group = parser.add_argument_group('datasets')
    group.add_argument('--edge-list', nargs=3, action='append', metavar=('NAME', 'EDGES', 'LABELS'),
                       help="Featureless network: edge list file and node label file")
    group.add_argument('--cora', nargs=3, action='append', metavar=('NAME', 'CONTENT', 'CITES'),
                       help="Cora-style .content and .cites files")
    group.add_argument('--synthetic', nargs=2, action='append', metavar=('NAME', 'N'),
                       help="Planted-partition network with N nodes")
    group.add_argument('--communities', type=int, default=2,
                       help="Number of communities of a synthetic network")
    group.add_argument('--p-in', type=float, default=0.3,
                       help="Edge probability inside a community")
    group.add_argument('--p-out', type=float, default=0.01,
                       help="Edge probability between communities")
    group.add_argument('--one-based', action='store_true',
                       help="Node ids in edge-list files start at 1")


def validate_dataset_names(names):
    """
    Check names before anything is loaded: they label result rows and are stored with them.

    Raises:
        ValidationError: for a name the BenchmarkResult model would reject, or a repeated name
    """
    field = BenchmarkResult._meta.get_field('dataset')
    for name in names:
        try:
            field.clean(name, None)
        except ValidationError as e:
            raise ValidationError(f"Dataset name {name!r}: {'; '.join(e.messages)}")
    repeated = sorted({name for name in names if names.count(name) > 1})
    if repeated:
        raise ValidationError(f"Dataset names must be unique, repeated: {', '.join(repeated)}")


def load_datasets(options, seed):
    """
    Load every dataset named by the flags, in the order edge lists, Cora files, synthetic.

    Raises:
        ValidationError: for invalid or repeated names, unreadable files or invalid generator arguments
    """
    validate_dataset_names([entry[0] for flag in ('edge_list', 'cora', 'synthetic')
                            for entry in options.get(flag) or []])
    datasets = []
    for name, edges, labels in options.get('edge_list') or []:
        datasets.append(load_edge_list_dataset(edges, labels, name, one_based=options['one_based'], seed=seed))
    for name, content, cites in options.get('cora') or []:
        datasets.append(load_cora(content, cites, name=name))
    for name, n in options.get('synthetic') or []:
        try:
            n = int(n)
        except ValueError:
            raise ValidationError(f"Synthetic network {name}: node count must be an integer, got {n!r}")
        datasets.append(generate_synthetic(n, options['communities'], options['p_in'], options['p_out'],
                                           seed, name=name))
    logger.info(f"Loaded {len(datasets)} dataset(s): {[dataset.name for dataset in datasets]}")
    return datasets


# errors a command reports as a CommandError instead of a traceback
EXPECTED_ERRORS = (MoreError, ValidationError, OSError)


def describe_error(error):
    if isinstance(error, ValidationError):
        return "; ".join(error.messages)
    return str(error)
