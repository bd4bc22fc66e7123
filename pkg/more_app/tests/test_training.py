from dataclasses import replace
from unittest import mock

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings

from more_app import training
from more_app.datasets import generate_synthetic
from more_app.exceptions import TrainingError
from more_app.features import ScaleMode
from more_app.model import Aggregator, BaselineParams, MoreParams
from more_app.training import (
    MODEL_BASELINE, AdamState, TrainConfig, adam_step, embedding_frame, evaluate, make_split, prepare, train,
)


class MakeSplitTest(SimpleTestCase):

    # Test Scenario 1: networks of 1150..3000 nodes get 150/500/500.
    def test_reference_sizes(self):
        self.assertEqual(make_split(2708, None, seed=0).sizes(), (150, 500, 500))
        self.assertEqual(make_split(1150, None, seed=0).sizes(), (150, 500, 500))

    # Test Scenario 2: smaller networks keep the proportions.
    def test_proportional_sizes(self):
        self.assertEqual(make_split(115, None, seed=0).sizes(), (15, 50, 50))

    def test_sets_are_disjoint_sorted_and_seeded(self):
        split = make_split(300, None, seed=4)
        together = np.concatenate([split.train, split.val, split.test])
        self.assertEqual(len(set(together.tolist())), len(together))
        self.assertTrue(np.all(np.diff(split.train) > 0))
        again = make_split(300, None, seed=4)
        self.assertTrue(np.array_equal(split.val, again.val))
        self.assertFalse(np.array_equal(split.val, make_split(300, None, seed=5).val))

    def test_too_few_nodes(self):
        with self.assertRaises(ValidationError):
            make_split(5, None, seed=0)

    def test_label_count_must_match(self):
        with self.assertRaises(ValidationError):
            make_split(200, np.zeros(10), seed=0)


class AdamTest(SimpleTestCase):

    # Test Scenario 1: the first bias-corrected step moves each entry by about lr·sign(g).
    def test_first_step(self):
        params = {'w': np.array([[1.0, -2.0]])}
        grads = {'w': np.array([[0.5, -4.0]])}
        state = AdamState()
        updated, new_state = adam_step(params, grads, state, lr=0.1)
        np.testing.assert_allclose(updated['w'], [[0.9, -1.9]], rtol=0, atol=1e-6)
        self.assertEqual(new_state.t, 1)
        self.assertEqual(state.t, 0)
        self.assertEqual(params['w'].tolist(), [[1.0, -2.0]])

    def test_zero_gradient_keeps_params(self):
        params = {'w': np.array([3.0])}
        updated, _ = adam_step(params, {'w': np.array([0.0])}, AdamState(), lr=0.5)
        self.assertEqual(updated['w'].tolist(), [3.0])


class TrainConfigTest(SimpleTestCase):

    @override_settings(MORE={'LR': 0.02, 'MAX_EPOCH': 7, 'DROPOUT': 0.1, 'L2': 0.0, 'TOLERANCE': 3,
                             'EMBED_DIM': 16, 'SEED': 9})
    def test_from_settings(self):
        config = TrainConfig.from_settings(embed_dim=4)
        self.assertEqual((config.lr, config.max_epoch, config.tolerance, config.seed), (0.02, 7, 3, 9))
        self.assertEqual(config.embed_dim, 4)

    def test_label_and_hash(self):
        config = TrainConfig(aggregator=Aggregator.CO)
        self.assertEqual(config.label, 'MORE-CO')
        self.assertEqual(replace(config, model=MODEL_BASELINE).label, 'GCN')
        self.assertEqual(config.config_hash(), TrainConfig(aggregator=Aggregator.CO).config_hash())
        self.assertNotEqual(config.config_hash(), replace(config, lr=0.001).config_hash())
        self.assertEqual(len(config.config_hash()), 64)


class TrainTest(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.dataset = generate_synthetic(60, 2, 0.4, 0.02, seed=1, name='toy')

    def config(self, **overrides):
        values = dict(lr=0.01, max_epoch=15, dropout_p=0.5, l2=0.0005, tolerance=30, embed_dim=8,
                      aggregator=Aggregator.HA, seed=3)
        values.update(overrides)
        return TrainConfig(**values)

    def test_prepare(self):
        data = prepare(self.dataset, self.config(scale=ScaleMode.LOG1P))
        self.assertEqual(data.sft.shape, (60, 6))
        self.assertEqual(data.aft.shape, (60, 60))
        self.assertEqual(data.split.sizes(), (7, 26, 26))
        self.assertEqual(data.one_hot.shape, (60, 2))

    # Test Scenario 1: two runs with the same seed give bit-identical curves.
    def test_determinism(self):
        config = self.config(aggregator=Aggregator.SU)
        first, first_params = train(prepare(self.dataset, config), config)
        second, second_params = train(prepare(self.dataset, config), config)
        for name in ('train_loss', 'val_loss', 'test_loss', 'val_acc'):
            self.assertEqual(first.curve(name), second.curve(name))
        self.assertTrue(np.array_equal(first_params.theta, second_params.theta))
        self.assertEqual(first.test_accuracy, second.test_accuracy)

    # Test Scenario 2: with a constant validation loss training stops after tolerance + 1 epochs.
    def test_early_stop_on_constant_validation_loss(self):
        config = self.config(lr=1e-300, max_epoch=100, tolerance=5)
        report, _ = train(prepare(self.dataset, config), config)
        self.assertEqual(report.iter_count, 6)
        self.assertTrue(report.stopped_early)
        self.assertEqual(report.best_epoch, 1)

    # Test Scenario 3: max_epoch = 0 evaluates the initial parameters.
    def test_zero_epochs(self):
        config = self.config(max_epoch=0)
        data = prepare(self.dataset, config)
        report, params = train(data, config)
        self.assertEqual(report.iter_count, 0)
        self.assertEqual(report.history, [])
        self.assertEqual(report.astt, 0.0)
        self.assertEqual(report.best_epoch, 0)
        self.assertIsInstance(params, MoreParams)
        self.assertEqual(report.test_accuracy, evaluate(params, data, data.split.test, config))

    def test_report_fields(self):
        config = self.config(model=MODEL_BASELINE)
        report, params = train(prepare(self.dataset, config), config)
        self.assertIsInstance(params, BaselineParams)
        self.assertEqual(report.iter_count, 15)
        self.assertEqual([record.epoch for record in report.history], list(range(1, 16)))
        self.assertGreaterEqual(report.oit, 0.0)
        self.assertGreaterEqual(report.tet, 0.0)
        self.assertTrue(0.0 <= report.test_accuracy <= 1.0)
        self.assertFalse(report.stopped_early)

    def test_non_finite_loss_raises(self):
        config = self.config()
        data = prepare(self.dataset, config)
        with mock.patch('more_app.training.loss', return_value=float('nan')):
            with self.assertRaises(TrainingError) as raised:
                train(data, config)
        self.assertEqual(raised.exception.epoch, 1)

    # Test Scenario 4: every variant lowers its training loss on the synthetic network.
    def test_training_loss_decreases(self):
        variants = [self.config(aggregator=aggregator) for aggregator in Aggregator]
        variants.append(self.config(model=MODEL_BASELINE))
        for config in variants:
            config = replace(config, max_epoch=60, tolerance=100)
            report, _ = train(prepare(self.dataset, config), config)
            with self.subTest(model=config.label):
                self.assertLess(report.history[-1].train_loss, report.history[0].train_loss)

    # Test Scenario 5: a validation loss that keeps falling never triggers the early stop.
    def test_no_early_stop_while_validation_improves(self):
        config = self.config(max_epoch=20, tolerance=1)
        data = prepare(self.dataset, config)
        real_record = training._epoch_record

        def falling_validation(epoch, *args):
            return replace(real_record(epoch, *args), val_loss=1.0 / epoch)

        with mock.patch('more_app.training._epoch_record', side_effect=falling_validation):
            report, _ = train(data, config)
        self.assertEqual(report.iter_count, 20)
        self.assertFalse(report.stopped_early)
        self.assertEqual(report.best_epoch, 20)


class EmbeddingFrameTest(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.dataset = generate_synthetic(60, 2, 0.4, 0.02, seed=1, name='toy')

    # Test Scenario 1: branch and aggregate columns follow node and label.
    def test_concatenation_columns(self):
        config = TrainConfig(max_epoch=2, embed_dim=3, aggregator=Aggregator.CO)
        data = prepare(self.dataset, config)
        _, params = train(data, config)
        frame = embedding_frame(params, data, config)
        self.assertEqual(list(frame.columns[:5]), ['node', 'label', 'attr_0', 'attr_1', 'attr_2'])
        self.assertEqual(frame.shape, (60, 2 + 3 + 3 + 6))
        self.assertEqual(frame['label'].tolist(), data.labels.tolist())
        np.testing.assert_array_equal(frame[['agg_0', 'agg_1', 'agg_2']].to_numpy(),
                                      frame[['attr_0', 'attr_1', 'attr_2']].to_numpy())

    def test_baseline_hidden_layer(self):
        config = TrainConfig(max_epoch=2, embed_dim=4, model=MODEL_BASELINE)
        data = prepare(self.dataset, config)
        _, params = train(data, config)
        frame = embedding_frame(params, data, config)
        self.assertEqual(list(frame.columns), ['node', 'label', 'hidden_0', 'hidden_1', 'hidden_2', 'hidden_3'])
        self.assertTrue((frame[['hidden_0', 'hidden_1', 'hidden_2', 'hidden_3']] >= 0).all().all())
