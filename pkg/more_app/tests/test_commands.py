import json
import os
import tempfile
from io import StringIO
from unittest import mock

import pandas as pd
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from more_app.model import MoreParams
from more_app.models import BenchmarkResult
from more_app.serialisers import load_checkpoint

K4_EDGES = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"


class CommandTestCase(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, name, text):
        with open(self.path(name), 'w', encoding='utf-8') as handle:
            handle.write(text)
        return self.path(name)

    def run_command(self, *args):
        out = StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()


class SplitCommandTest(CommandTestCase):

    # Test Scenario 1: the index sets are printed as JSON.
    def test_split_json(self):
        document = json.loads(self.run_command('split', '115', '--seed', '3'))
        self.assertEqual([len(document[key]) for key in ('train', 'val', 'test')], [15, 50, 50])
        self.assertEqual(document, json.loads(self.run_command('split', '115', '--seed', '3')))

    def test_split_too_small(self):
        with self.assertRaises(CommandError):
            self.run_command('split', '5')


class CensusCommandTest(CommandTestCase):

    # Test Scenario 1: counts are printed and node motif degrees written as CSV.
    def test_census_with_nmd_out(self):
        edges = self.write('k4.edges', K4_EDGES)
        output = self.run_command('census', edges, '--nmd-out', self.path('nmd.csv'))
        self.assertIn('M41', output)
        self.assertIn('handshake identities hold: True', output)
        with open(self.path('nmd.csv'), encoding='utf-8') as handle:
            lines = handle.read().splitlines()
        self.assertEqual(lines[0], 'node,m31,m32,m41,m42,m43')
        self.assertEqual(lines[1], '0,3,0,1,0,0')
        self.assertEqual(len(lines), 5)

    def test_census_compare(self):
        edges = self.write('k4.edges', K4_EDGES)
        output = self.run_command('census', edges, '--compare', 'football')
        self.assertIn('mismatch', output)

    def test_census_one_based(self):
        edges = self.write('k4.edges', "1 2\n2 3\n3 1\n")
        output = self.run_command('census', edges, '--one-based')
        self.assertIn('nodes', output)

    def test_census_missing_file(self):
        with self.assertRaises(CommandError):
            self.run_command('census', self.path('missing.edges'))

    def test_census_bad_line(self):
        with self.assertRaisesMessage(CommandError, 'line 2'):
            self.run_command('census', self.write('bad.edges', "0 1\nfoo bar\n"))


class TrainCommandTest(CommandTestCase):

    def train_args(self, *extra):
        return ['train', '--synthetic', 'toy', '60', '--p-in', '0.4', '--p-out', '0.02', '--max-epoch', '8',
                '--embed-dim', '4', '--seed', '2', *extra]

    # Test Scenario 1: curves, parameters and report are written.
    def test_train_outputs(self):
        output = self.run_command(*self.train_args(
            '--agg', 'co', '--curves-out', self.path('curves.csv'), '--params-out', self.path('params.json'),
            '--report-out', self.path('report.json')))
        self.assertIn('MORE-CO on toy', output)
        self.assertIn('test accuracy', output)

        curves = pd.read_csv(self.path('curves.csv'))
        self.assertEqual(list(curves.columns),
                         ['epoch', 'train_loss', 'val_loss', 'test_loss', 'train_acc', 'val_acc', 'test_acc'])
        self.assertEqual(len(curves), 8)

        params, document = load_checkpoint(self.path('params.json'))
        self.assertIsInstance(params, MoreParams)
        self.assertEqual(params.theta.shape, (8, 2))
        self.assertEqual(document['seed'], 2)

        with open(self.path('report.json'), encoding='utf-8') as handle:
            report = json.load(handle)
        self.assertEqual(report['model'], 'MORE-CO')
        self.assertEqual(report['config']['embed_dim'], 4)
        self.assertEqual(report['report']['iter_count'], 8)

    # Test Scenario 2: identical flags give bit-identical loss curves.
    def test_train_is_deterministic(self):
        self.run_command(*self.train_args('--model', 'gcn', '--curves-out', self.path('first.csv')))
        self.run_command(*self.train_args('--model', 'gcn', '--curves-out', self.path('second.csv')))
        with open(self.path('first.csv'), encoding='utf-8') as first, \
                open(self.path('second.csv'), encoding='utf-8') as second:
            self.assertEqual(first.read(), second.read())

    def test_train_on_edge_list_files(self):
        self.run_command('synthesize', '40', '--p-in', '0.5', '--p-out', '0.02', '--seed', '1',
                         '--edges-out', self.path('s.edges'), '--labels-out', self.path('s.labels'))
        output = self.run_command('train', '--edge-list', 'syn', self.path('s.edges'), self.path('s.labels'),
                                  '--max-epoch', '3', '--embed-dim', '4', '--scale', 'standardize')
        self.assertIn('on syn', output)

    # Test Scenario 3: per-node embeddings of the best parameters are written as CSV.
    def test_train_embeddings_out(self):
        output = self.run_command(*self.train_args('--agg', 'su', '--embeddings-out', self.path('emb.csv')))
        self.assertIn('Wrote 12 embedding columns for 60 nodes', output)
        embeddings = pd.read_csv(self.path('emb.csv'))
        self.assertEqual(list(embeddings.columns[:3]), ['node', 'label', 'attr_0'])
        self.assertEqual(embeddings.shape, (60, 14))
        self.assertEqual(embeddings['node'].tolist(), list(range(60)))

    def test_invalid_learning_rate(self):
        with self.assertRaisesMessage(CommandError, 'lr'):
            self.run_command(*self.train_args('--lr', '-1'))

    def test_missing_dataset(self):
        with self.assertRaises(CommandError):
            self.run_command('train', '--max-epoch', '1')

    def test_invalid_synthetic_probabilities(self):
        with self.assertRaises(CommandError):
            self.run_command('train', '--synthetic', 'toy', '60', '--p-in', '0.01', '--p-out', '0.3')


class BenchmarkCommandTest(CommandTestCase):

    def benchmark_args(self, grid, *extra):
        grid_path = self.write('grid.json', json.dumps(grid))
        return ['benchmark', '--grid', grid_path, '--synthetic', 'toy', '60', '--p-in', '0.4', '--p-out', '0.02',
                *extra]

    # Test Scenario 1: one configuration gives four rows, written as CSV and stored.
    def test_benchmark_csv_and_save(self):
        output = self.run_command(*self.benchmark_args(
            [{'lr': 0.01, 'max_epoch': 3, 'embed_dim': 4}], '--out', self.path('rows.csv'), '--save'))
        self.assertIn('MORE-SU', output)
        frame = pd.read_csv(self.path('rows.csv'))
        self.assertEqual(frame['model'].tolist(), ['GCN', 'MORE-HA', 'MORE-SU', 'MORE-CO'])
        self.assertEqual(BenchmarkResult.objects.count(), 4)

        report = self.run_command('report', '--model', 'GCN')
        self.assertIn('GCN', report)
        self.assertNotIn('MORE-HA', report)
        stored = json.loads(self.run_command('report', '--json', '--dataset', 'toy'))
        self.assertEqual(len(stored), 4)

    # Test Scenario 2: an empty grid succeeds without output rows.
    def test_empty_grid(self):
        output = self.run_command(*self.benchmark_args([]))
        self.assertIn('(no benchmark rows)', output)

    def test_embedding_sweep_and_best(self):
        grid = [{'lr': 0.01, 'max_epoch': 2}]
        with self.settings(MORE={'SEED': 0, 'EMBED_DIM': 4, 'EMBED_DIM_SWEEP': [2, 4], 'LR': 0.01,
                                 'MAX_EPOCH': 2, 'DROPOUT': 0.5, 'L2': 0.0005, 'TOLERANCE': 30, 'LOG_EVERY': 50,
                                 'CENSUS_GUARD': 64}):
            self.run_command(*self.benchmark_args(grid, '--ed-sweep', '--best', '--save'))
        self.assertEqual(BenchmarkResult.objects.count(), 8)
        best = json.loads(self.run_command('report', '--best', '--json'))
        self.assertEqual(len(best), 4)

    # Test Scenario 3: an invalid dataset name is refused before any row is trained.
    def test_invalid_dataset_name(self):
        grid_path = self.write('grid.json', json.dumps([{'lr': 0.01, 'max_epoch': 2, 'embed_dim': 4}]))
        with mock.patch('more_app.benchmark.train') as train:
            with self.assertRaisesMessage(CommandError, "Dataset name 'my net'"):
                self.run_command('benchmark', '--grid', grid_path, '--synthetic', 'my net', '40', '--save')
        train.assert_not_called()
        self.assertEqual(BenchmarkResult.objects.count(), 0)

    def test_repeated_dataset_name(self):
        with self.assertRaisesMessage(CommandError, 'repeated: toy'):
            self.run_command(*self.benchmark_args([{'lr': 0.01, 'max_epoch': 2}], '--synthetic', 'toy', '40'))

    def test_rows_failing_model_validation_are_not_stored(self):
        grid = [{'lr': 0.01, 'max_epoch': 2, 'embed_dim': 4}]
        with mock.patch.object(BenchmarkResult, 'clean', side_effect=ValidationError("accuracy is required")):
            with self.assertRaisesMessage(CommandError, 'Cannot store rows'):
                self.run_command(*self.benchmark_args(grid, '--save'))
        self.assertEqual(BenchmarkResult.objects.count(), 0)

    def test_preset_and_grid_are_exclusive(self):
        grid_path = self.write('grid.json', json.dumps([]))
        with self.assertRaises(CommandError):
            self.run_command('benchmark', '--grid', grid_path, '--preset', 'efficiency', '--synthetic', 'toy', '40')

    def test_invalid_grid_entry(self):
        with self.assertRaisesMessage(CommandError, 'Grid entry 0'):
            self.run_command(*self.benchmark_args([{'lr': -0.5}]))

    def test_grid_must_be_array(self):
        with self.assertRaises(CommandError):
            self.run_command(*self.benchmark_args({'lr': 0.01}))

    def test_malformed_grid_file(self):
        grid_path = self.write('grid.json', "[{'lr': 0.01")
        with self.assertRaises(CommandError):
            self.run_command('benchmark', '--grid', grid_path, '--synthetic', 'toy', '60')


class SynthesizeCommandTest(CommandTestCase):

    def test_synthesize_writes_files(self):
        output = self.run_command('synthesize', '8', '--p-in', '1.0', '--p-out', '0.0',
                                  '--edges-out', self.path('k.edges'), '--labels-out', self.path('k.labels'))
        self.assertIn('12 edges', output)
        with open(self.path('k.labels'), encoding='utf-8') as handle:
            self.assertEqual(len(handle.read().splitlines()), 8)

    def test_synthesize_invalid(self):
        with self.assertRaises(CommandError):
            self.run_command('synthesize', '8', '--communities', '1',
                             '--edges-out', self.path('k.edges'), '--labels-out', self.path('k.labels'))
