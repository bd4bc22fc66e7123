from dataclasses import asdict
import logging

import pandas as pd
from django.core.management.base import BaseCommand, CommandError

from ...forms import TrainConfigForm
from ...serialisers import report_document, save_checkpoint, write_json
from ...training import embedding_frame, prepare, train
from ._common import EXPECTED_ERRORS, add_dataset_arguments, describe_error, load_datasets

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ['epoch', 'train_loss', 'val_loss', 'test_loss', 'train_acc', 'val_acc', 'test_acc']


class Command(BaseCommand):
    help = "Train the GCN baseline or a MORE variant on one dataset and report accuracy and timings."

    def add_arguments(self, parser):
        add_dataset_arguments(parser)
        parser.add_argument('--model', choices=['gcn', 'more'], default='more', help="Model to train")
        parser.add_argument('--agg', choices=['ha', 'su', 'co'], help="MORE aggregator")
        parser.add_argument('--lr', type=float, help="Learning rate")
        parser.add_argument('--max-epoch', type=int, help="Epoch limit")
        parser.add_argument('--dropout', type=float, help="Dropout rate")
        parser.add_argument('--l2', type=float, help="L2 weight")
        parser.add_argument('--tolerance', type=int, help="Early-stopping tolerance in epochs")
        parser.add_argument('--embed-dim', type=int, help="Embedding dimension")
        parser.add_argument('--seed', type=int, help="Random seed for the split, initialisation and dropout")
        parser.add_argument('--scale', choices=['none', 'standardize', 'log1p'], help="Structural feature scaling")
        parser.add_argument('--curves-out', help="CSV file for the per-epoch loss and accuracy curves")
        parser.add_argument('--params-out', help="JSON checkpoint of the best-validation parameters")
        parser.add_argument('--report-out', help="JSON file for the full training report")
        parser.add_argument('--embeddings-out',
                            help="CSV file for the per-node embeddings of the best-validation parameters")

    def handle(self, *args, **options):
        form = TrainConfigForm({
            'lr': options['lr'],
            'max_epoch': options['max_epoch'],
            'dropout_p': options['dropout'],
            'l2': options['l2'],
            'tolerance': options['tolerance'],
            'embed_dim': options['embed_dim'],
            'aggregator': options['agg'],
            'seed': options['seed'],
            'model': options['model'],
            'scale': options['scale'],
        })
        if not form.is_valid():
            raise CommandError(f"Invalid training configuration:\n{form.errors.as_text()}")
        config = form.to_config()

        try:
            datasets = load_datasets(options, config.seed)
            if len(datasets) != 1:
                raise CommandError(f"train needs exactly one dataset, got {len(datasets)}")
            dataset = datasets[0]
            data = prepare(dataset, config)
            report, best_params = train(data, config)
        except EXPECTED_ERRORS as e:
            logger.error(f"train failed: {e}")
            raise CommandError(describe_error(e))

        self.stdout.write(f"{config.label} on {dataset.name}")
        self.stdout.write(f"test accuracy: {report.test_accuracy:.4f}")
        self.stdout.write(f"iterations: {report.iter_count} (best epoch {report.best_epoch}"
                          f"{', stopped early' if report.stopped_early else ''})")
        self.stdout.write(f"ASTT: {report.astt:.6f}s  OIT: {report.oit:.4f}s  TET: {report.tet:.6f}s")

        try:
            if options['curves_out']:
                curves = pd.DataFrame([asdict(record) for record in report.history], columns=CURVE_COLUMNS)
                curves.to_csv(options['curves_out'], index=False, encoding='utf-8')
                self.stdout.write(self.style.SUCCESS(f"Wrote {len(curves)} epochs to {options['curves_out']}"))
            if options['params_out']:
                save_checkpoint(options['params_out'], best_params, config)
                self.stdout.write(self.style.SUCCESS(f"Wrote parameters to {options['params_out']}"))
            if options['report_out']:
                write_json(options['report_out'], report_document(dataset.name, config, report))
                self.stdout.write(self.style.SUCCESS(f"Wrote report to {options['report_out']}"))
            if options['embeddings_out']:
                embeddings = embedding_frame(best_params, data, config)
                embeddings.to_csv(options['embeddings_out'], index=False, encoding='utf-8')
                self.stdout.write(self.style.SUCCESS(
                    f"Wrote {embeddings.shape[1] - 2} embedding columns for {len(embeddings)} nodes "
                    f"to {options['embeddings_out']}"))
        except OSError as e:
            raise CommandError(f"Cannot write output: {e}")
