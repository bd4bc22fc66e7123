from dataclasses import replace
import logging

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from django.db import transaction
from rest_framework.exceptions import ParseError

from ...benchmark import DEFAULT_PRESET, GRID_PRESETS, best_rows, format_table, run_benchmark, write_csv
from ...forms import TrainConfigForm
from ...models import BenchmarkResult
from ...serialisers import read_json
from ._common import EXPECTED_ERRORS, add_dataset_arguments, describe_error, load_datasets

logger = logging.getLogger(__name__)


def grid_from_json(document, default_seed):
    """
    Validate a JSON array of configuration objects.

    Raises:
        CommandError: if the document is not an array of valid configurations
    """
    if not isinstance(document, list):
        raise CommandError("The grid file must hold a JSON array of configuration objects")
    grid = []
    for position, entry in enumerate(document):
        if not isinstance(entry, dict):
            raise CommandError(f"Grid entry {position} is not a JSON object")
        form = TrainConfigForm({'seed': default_seed, **entry})
        if not form.is_valid():
            raise CommandError(f"Grid entry {position} is invalid:\n{form.errors.as_text()}")
        grid.append(form.to_config())
    return grid


class Command(BaseCommand):
    help = "Run GCN, MORE-HA, MORE-SU and MORE-CO over a configuration grid on one or more datasets."

    def add_arguments(self, parser):
        add_dataset_arguments(parser)
        grids = parser.add_mutually_exclusive_group()
        grids.add_argument('--grid', help="JSON array of training configurations, e.g. "
                                          "[{\"lr\": 0.01, \"max_epoch\": 300, \"embed_dim\": 64}]")
        grids.add_argument('--preset', choices=sorted(GRID_PRESETS), default=DEFAULT_PRESET,
                           help="Named grid: 'accuracy' runs the three lr/epoch groups, 'efficiency' runs "
                                "lr=0.003, ED=256 for iteration and timing comparison (default: %(default)s)")
        parser.add_argument('--ed-sweep', action='store_true',
                            help="Repeat every configuration for each embedding dimension in MORE['EMBED_DIM_SWEEP']")
        parser.add_argument('--seed', type=int, default=settings.MORE['SEED'],
                            help="Seed for generated data and grid entries without one")
        parser.add_argument('--out', help="CSV file for the result rows")
        parser.add_argument('--best', action='store_true',
                            help="Also print the best embedding dimension per dataset, model and lr/epoch group")
        parser.add_argument('--save', action='store_true', help="Store the rows in the database")
        parser.add_argument('--workers', type=int, default=1, help="Rows trained concurrently")

    def handle(self, *args, **options):
        if options['workers'] < 1:
            raise CommandError("--workers must be at least 1")
        try:
            if options['grid']:
                grid = grid_from_json(read_json(options['grid']), options['seed'])
            else:
                grid = grid_from_json(list(GRID_PRESETS[options['preset']]), options['seed'])
            if options['ed_sweep']:
                grid = [replace(config, embed_dim=embed_dim)
                        for config in grid for embed_dim in settings.MORE['EMBED_DIM_SWEEP']]
            datasets = load_datasets(options, options['seed']) if grid else []
            if grid and not datasets:
                raise CommandError("benchmark needs at least one dataset (--edge-list, --cora or --synthetic)")
            rows = run_benchmark(datasets, grid, workers=options['workers'])
        except EXPECTED_ERRORS as e:
            logger.error(f"benchmark failed: {e}")
            raise CommandError(describe_error(e))
        except ParseError as e:
            raise CommandError(f"Cannot read grid file: {e.detail}")

        self.stdout.write(format_table(rows))
        if options['best'] and rows:
            self.stdout.write("")
            self.stdout.write(format_table(best_rows(rows)))

        failed = sum(row.failed for row in rows)
        if failed:
            self.stdout.write(self.style.WARNING(f"{failed} of {len(rows)} rows failed"))

        if options['out']:
            try:
                write_csv(rows, options['out'])
            except OSError as e:
                raise CommandError(f"Cannot write {options['out']}: {e}")
            self.stdout.write(self.style.SUCCESS(f"Wrote {len(rows)} rows to {options['out']}"))
        if options['save']:
            try:
                with transaction.atomic():
                    for row in rows:
                        BenchmarkResult.from_row(row).save()
            except ValidationError as e:
                logger.error(f"Storing benchmark rows failed: {e}")
                raise CommandError(f"Cannot store rows: {describe_error(e)}")
            self.stdout.write(self.style.SUCCESS(f"Stored {len(rows)} rows"))
