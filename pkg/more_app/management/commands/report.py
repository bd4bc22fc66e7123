import logging

from django.core.management.base import BaseCommand, CommandError

from ...benchmark import BenchmarkRow, best_rows, format_table
from ...filters import BenchmarkResultFilter
from ...models import BenchmarkResult
from ...serialisers import BenchmarkResultSerialiser, render_json

logger = logging.getLogger(__name__)


def as_row(result):
    return BenchmarkRow(
        dataset=result.dataset,
        model=result.model,
        aggregator=result.aggregator,
        lr=result.lr,
        max_epoch=result.max_epoch,
        embed_dim=result.embed_dim,
        seed=result.seed,
        accuracy=result.accuracy if result.accuracy is not None else float('nan'),
        iter_count=result.iter_count,
        astt=result.astt if result.astt is not None else float('nan'),
        oit=result.oit if result.oit is not None else float('nan'),
        tet=result.tet if result.tet is not None else float('nan'),
        error=result.error,
    )


class Command(BaseCommand):
    help = "List stored benchmark results, optionally filtered, as a table or JSON."

    def add_arguments(self, parser):
        parser.add_argument('--dataset', help="Only this dataset")
        parser.add_argument('--model', help="Only this model (GCN, MORE-HA, MORE-SU, MORE-CO)")
        parser.add_argument('--lr', help="Only this learning rate")
        parser.add_argument('--max-epoch', help="Only this epoch limit")
        parser.add_argument('--embed-dim', help="Only this embedding dimension")
        parser.add_argument('--min-accuracy', help="Only rows with at least this test accuracy (0-1)")
        parser.add_argument('--best', action='store_true',
                            help="Keep the best embedding dimension per dataset, model and lr/epoch group")
        parser.add_argument('--json', action='store_true', help="Print JSON instead of a table")

    def handle(self, *args, **options):
        data = {
            key: options[key]
            for key in ('dataset', 'model', 'lr', 'max_epoch', 'embed_dim', 'min_accuracy')
            if options[key] is not None
        }
        if options['best']:
            data['succeeded'] = 'true'
        result_filter = BenchmarkResultFilter(data, queryset=BenchmarkResult.objects.all())
        if not result_filter.is_valid():
            raise CommandError(f"Invalid filter:\n{result_filter.errors.as_text()}")
        results = list(result_filter.qs)
        logger.info(f"Report: {len(results)} stored results match {data}")

        if options['best']:
            keep = {(row.dataset, row.model, row.lr, row.max_epoch, row.embed_dim)
                    for row in best_rows([as_row(result) for result in results])}
            results = [result for result in results
                       if (result.dataset, result.model, result.lr, result.max_epoch, result.embed_dim) in keep]

        if options['json']:
            self.stdout.write(render_json(BenchmarkResultSerialiser(results, many=True).data).decode('utf-8'))
        else:
            self.stdout.write(format_table([as_row(result) for result in results]))
