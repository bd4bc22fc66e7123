import math
import os
import tempfile
from unittest import mock

import pandas as pd
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from more_app import benchmark
from more_app.benchmark import (
    DEFAULT_PRESET, GRID_PRESETS, BenchmarkRow, best_rows, format_table, run_benchmark, write_csv,
)
from more_app.datasets import generate_synthetic
from more_app.exceptions import TrainingError
from more_app.training import TrainConfig


def make_row(embed_dim, accuracy, model='MORE-SU', error=""):
    return BenchmarkRow(dataset='toy', model=model, aggregator='su', lr=0.01, max_epoch=300, embed_dim=embed_dim,
                        seed=0, accuracy=accuracy, iter_count=10, astt=0.01, oit=0.1, tet=0.001, error=error)


class RunBenchmarkTest(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.dataset = generate_synthetic(60, 2, 0.4, 0.02, seed=1, name='toy')

    def config(self, **overrides):
        values = dict(lr=0.01, max_epoch=4, dropout_p=0.5, l2=0.0005, tolerance=30, embed_dim=4, seed=0)
        values.update(overrides)
        return TrainConfig(**values)

    # Test Scenario 1: one configuration gives one row per model variant.
    def test_single_config(self):
        rows = run_benchmark([self.dataset], [self.config()])
        self.assertEqual([row.model for row in rows], ['GCN', 'MORE-HA', 'MORE-SU', 'MORE-CO'])
        self.assertEqual([row.aggregator for row in rows], ['', 'ha', 'su', 'co'])
        self.assertTrue(all(row.iter_count == 4 and not row.failed for row in rows))

    # Test Scenario 2: the three lr/epoch groups give 12 rows per dataset.
    def test_three_groups(self):
        grid = [self.config(lr=lr, max_epoch=2) for lr in (0.01, 0.001, 0.0003)]
        rows = run_benchmark([self.dataset], grid)
        self.assertEqual(len(rows), 12)
        self.assertEqual([row.lr for row in rows[:3]], [0.01, 0.001, 0.0003])

    # Test Scenario 3: an empty grid produces no rows.
    def test_empty_grid(self):
        self.assertEqual(run_benchmark([self.dataset], []), [])

    # Test Scenario 4: threaded runs assemble rows in the same order with the same results.
    def test_workers_keep_order(self):
        grid = [self.config(), self.config(embed_dim=6)]
        serial = run_benchmark([self.dataset], grid, workers=1)
        threaded = run_benchmark([self.dataset], grid, workers=3)
        self.assertEqual([(r.model, r.embed_dim, r.accuracy) for r in serial],
                         [(r.model, r.embed_dim, r.accuracy) for r in threaded])

    # Test Scenario 5: a failing row is recorded and the rest of the grid still runs.
    def test_failed_row_does_not_abort(self):
        real_train = benchmark.train

        def flaky_train(data, config):
            if config.label == 'MORE-CO':
                raise TrainingError("Training loss became nan", 3)
            return real_train(data, config)

        with mock.patch('more_app.benchmark.train', side_effect=flaky_train):
            rows = run_benchmark([self.dataset], [self.config()])
        self.assertEqual(len(rows), 4)
        failed = [row for row in rows if row.failed]
        self.assertEqual([row.model for row in failed], ['MORE-CO'])
        self.assertIn("epoch 3", failed[0].error)
        self.assertTrue(math.isnan(failed[0].accuracy))

    # Test Scenario 6: every dataset is prepared and trained on its own data.
    def test_each_dataset_trains_on_its_own_data(self):
        other = generate_synthetic(90, 3, 0.4, 0.02, seed=1, name='other')
        real_train = benchmark.train
        seen = []

        def recording_train(data, config):
            seen.append((data.name, data.aft.shape, data.label_count))
            return real_train(data, config)

        with mock.patch('more_app.benchmark.train', side_effect=recording_train):
            rows = run_benchmark([self.dataset, other], [self.config(max_epoch=1)])
        self.assertEqual([row.dataset for row in rows], ['toy'] * 4 + ['other'] * 4)
        self.assertEqual(seen[:4], [('toy', (60, 60), 2)] * 4)
        self.assertEqual(seen[4:], [('other', (90, 90), 3)] * 4)

    # Test Scenario 7: two datasets with one name would give indistinguishable rows.
    def test_repeated_dataset_name(self):
        twin = generate_synthetic(90, 3, 0.4, 0.02, seed=1, name='toy')
        with self.assertRaisesMessage(ValidationError, 'toy'):
            run_benchmark([self.dataset, twin], [self.config()])

    def test_grid_presets(self):
        self.assertEqual([(entry['lr'], entry['max_epoch']) for entry in GRID_PRESETS['accuracy']],
                         [(0.01, 300), (0.001, 500), (0.0003, 1000)])
        efficiency, = GRID_PRESETS['efficiency']
        self.assertEqual((efficiency['lr'], efficiency['embed_dim']), (0.003, 256))
        self.assertIn(DEFAULT_PRESET, GRID_PRESETS)


class BenchmarkReportTest(SimpleTestCase):

    # Test Scenario 1: the best embedding dimension wins, ties go to the smaller one.
    def test_best_rows(self):
        rows = [make_row(64, 0.8), make_row(32, 0.8), make_row(128, 0.7), make_row(16, math.nan, error="boom")]
        best = best_rows(rows)
        self.assertEqual(len(best), 1)
        self.assertEqual(best[0].embed_dim, 32)

    def test_best_rows_per_model(self):
        best = best_rows([make_row(32, 0.5), make_row(64, 0.6, model='GCN'), make_row(32, 0.7, model='GCN')])
        self.assertEqual(sorted((row.model, row.embed_dim) for row in best), [('GCN', 32), ('MORE-SU', 32)])

    def test_table_and_csv(self):
        rows = [make_row(32, 0.815), make_row(64, math.nan, error="diverged")]
        table = format_table(rows)
        self.assertIn('MORE-SU', table)
        self.assertIn('81.5', table)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'rows.csv')
            write_csv(rows, path)
            frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns[:4]), ['dataset', 'model', 'aggregator', 'lr'])
        self.assertEqual(len(frame), 2)

    def test_empty_table(self):
        self.assertEqual(format_table([]), "(no benchmark rows)")
