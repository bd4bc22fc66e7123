import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from ...datasets import generate_synthetic, write_edge_list_dataset
from ._common import EXPECTED_ERRORS, describe_error

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Generate a planted-partition network and write it as edge list and label files."

    def add_arguments(self, parser):
        parser.add_argument('n', type=int, help="Number of nodes")
        parser.add_argument('--communities', type=int, default=2, help="Number of communities")
        parser.add_argument('--p-in', type=float, default=0.3, help="Edge probability inside a community")
        parser.add_argument('--p-out', type=float, default=0.01, help="Edge probability between communities")
        parser.add_argument('--seed', type=int, default=settings.MORE['SEED'], help="Generator seed")
        parser.add_argument('--name', help="Dataset name written into the edge file header")
        parser.add_argument('--edges-out', required=True, help="Edge list file to write")
        parser.add_argument('--labels-out', required=True, help="Node label file to write")

    def handle(self, *args, **options):
        try:
            dataset = generate_synthetic(options['n'], options['communities'], options['p_in'],
                                         options['p_out'], options['seed'], name=options['name'])
            write_edge_list_dataset(dataset, options['edges_out'], options['labels_out'])
        except EXPECTED_ERRORS as e:
            logger.error(f"synthesize failed: {e}")
            raise CommandError(describe_error(e))
        self.stdout.write(self.style.SUCCESS(
            f"Wrote {dataset.graph.n} nodes and {dataset.graph.num_edges} edges to "
            f"{options['edges_out']} and {options['labels_out']}"))
