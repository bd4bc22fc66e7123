import logging

import pandas as pd
from django.core.management.base import BaseCommand, CommandError

from ...datasets import load_edge_list_graph
from ...graph import graph_statistics
from ...motifs import MOTIF_ORDER, REFERENCE_COUNTS, census, compare_counts
from ._common import EXPECTED_ERRORS, describe_error

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Print graph statistics and motif counts of an edge list; optionally write node motif degrees."

    def add_arguments(self, parser):
        parser.add_argument('edges', help="Edge list file, one 'u v' pair per line")
        parser.add_argument('--one-based', action='store_true', help="Node ids start at 1")
        parser.add_argument('--nmd-out', help="CSV file for the per-node motif degrees")
        parser.add_argument('--compare', metavar='NAME', choices=sorted(REFERENCE_COUNTS),
                            help="Compare the counts with the reference counts of a known dataset")

    def handle(self, *args, **options):
        try:
            graph = load_edge_list_graph(options['edges'], options['one_based'])
            stats = graph_statistics(graph)
            result = census(graph)
        except EXPECTED_ERRORS as e:
            logger.error(f"census failed: {e}")
            raise CommandError(describe_error(e))

        self.stdout.write(pd.Series({
            'nodes': stats.nodes,
            'edges': stats.edges,
            'mean degree': round(stats.mean_degree, 4),
            'max degree': stats.max_degree,
            'density': round(stats.density, 6),
            'clustering': round(stats.clustering, 4),
        }).to_string())
        self.stdout.write("")

        counts = pd.DataFrame({
            'motif': [kind.name for kind in MOTIF_ORDER],
            'induced': [result.global_counts[kind] for kind in MOTIF_ORDER],
            'non_induced': [result.non_induced[kind] for kind in MOTIF_ORDER],
        })
        if options['compare']:
            reference = REFERENCE_COUNTS[options['compare']]
            verdicts = compare_counts(result, reference)
            counts['reference'] = [reference[kind] for kind in MOTIF_ORDER]
            counts['verdict'] = [verdicts[kind] for kind in MOTIF_ORDER]
        self.stdout.write(counts.to_string(index=False))
        self.stdout.write(f"handshake identities hold: {result.handshake_holds()}")

        if options['nmd_out']:
            frame = pd.DataFrame(result.nmd, columns=[kind.code for kind in MOTIF_ORDER])
            frame.insert(0, 'node', range(graph.n))
            try:
                frame.to_csv(options['nmd_out'], index=False, encoding='utf-8')
            except OSError as e:
                raise CommandError(f"Cannot write {options['nmd_out']}: {e}")
            self.stdout.write(self.style.SUCCESS(f"Wrote node motif degrees of {graph.n} nodes to {options['nmd_out']}"))
