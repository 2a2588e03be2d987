# Copyright 2026 The coco-denoiser Authors.
# All Rights Reserved.
#
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.
import os
import shutil
import tempfile
import unittest

import mock
import numpy as np
from numpy import testing as npt

from coco_denoiser import exceptions
from coco_denoiser import oracles


def _finite_difference(func, x, eps=1e-6):
    grad = np.zeros_like(x)
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = eps
        grad[j] = (func(x + step) - func(x - step)) / (2 * eps)
    return grad


def _toy_dataset():
    features = np.array([[1.0, 2.0, 0.0],
                         [-0.5, 1.0, 1.5],
                         [2.0, -1.0, 0.5],
                         [0.0, 0.5, -2.0]])
    return oracles.Dataset(features=features, labels=[1, -1, -1, 1])


class TestQuadraticObjective(unittest.TestCase):

    def test_true_grad(self):
        objective = oracles.QuadraticObjective(eigenvalues=[1.0, 1.0 / 3])
        npt.assert_array_equal([0.0, 0.0], oracles.quadratic_true_grad(
            objective, [0.0, 0.0]))
        npt.assert_allclose([3.0, 1.0], oracles.quadratic_true_grad(
            objective, [3.0, 3.0]))

    def test_grad_matches_finite_differences(self):
        objective = oracles.QuadraticObjective.linspace(5, rotate=True,
                                                        seed=3)
        x = np.random.default_rng(0).standard_normal(5)
        npt.assert_allclose(_finite_difference(objective.value, x),
                            objective.gradient(x), atol=1e-6)

    def test_dimension_mismatch(self):
        objective = oracles.QuadraticObjective(eigenvalues=[1.0, 0.5])
        self.assertRaises(exceptions.DimensionMismatch,
                          oracles.quadratic_true_grad, objective,
                          [1.0, 2.0, 3.0])

    def test_lipschitz(self):
        objective = oracles.QuadraticObjective(eigenvalues=[1.0 / 3, 1.0])
        self.assertEqual(1.0, oracles.lipschitz_estimate(objective))

    def test_linspace(self):
        objective = oracles.QuadraticObjective.linspace(10)
        npt.assert_allclose(np.linspace(1.0 / 3, 1.0, 10),
                            objective.eigenvalues)
        npt.assert_array_equal(np.zeros(10), objective.minimizer)

    def test_rotation_keeps_the_spectrum(self):
        objective = oracles.QuadraticObjective.linspace(4, rotate=True,
                                                        seed=1)
        npt.assert_allclose(np.linspace(1.0 / 3, 1.0, 4),
                            np.linalg.eigvalsh(objective.hessian))
        self.assertFalse(np.allclose(objective.hessian,
                                     np.diag(np.diag(objective.hessian))))

    def test_explicit_hessian(self):
        objective = oracles.QuadraticObjective(hessian=[[2.0, 1.0],
                                                        [1.0, 2.0]])
        self.assertAlmostEqual(3.0, objective.lipschitz)

    def test_invalid_hessians(self):
        self.assertRaises(exceptions.InvalidParameter,
                          oracles.QuadraticObjective,
                          hessian=[[1.0, 2.0], [0.0, 1.0]])
        self.assertRaises(exceptions.InvalidParameter,
                          oracles.QuadraticObjective,
                          hessian=[[1.0, 0.0], [0.0, -1.0]])
        self.assertRaises(exceptions.InvalidParameter,
                          oracles.QuadraticObjective,
                          eigenvalues=[1.0, -0.1])
        self.assertRaises(exceptions.InvalidParameter,
                          oracles.QuadraticObjective)


class TestLogisticObjective(unittest.TestCase):

    def setUp(self):
        super(TestLogisticObjective, self).setUp()
        self.dataset = _toy_dataset()

    def test_gradient_at_origin(self):
        objective = oracles.LogisticObjective(self.dataset)
        for i in range(self.dataset.count):
            npt.assert_allclose(
                -self.dataset.labels[i] * self.dataset.features[i] / 2,
                oracles.logistic_single_grad(objective, i, np.zeros(3)))

    def test_regularizer_only(self):
        dataset = oracles.Dataset(features=[[0.0, 0.0]], labels=[1])
        objective = oracles.LogisticObjective(dataset, reg=0.3)
        npt.assert_allclose([0.3, -0.6], oracles.logistic_single_grad(
            objective, 0, [1.0, -2.0]))

    def test_single_grad_matches_finite_differences(self):
        objective = oracles.LogisticObjective(self.dataset, reg=0.1)
        x = np.array([0.3, -0.2, 0.7])
        for i in range(self.dataset.count):
            a_i = self.dataset.features[i]
            y_i = self.dataset.labels[i]

            def loss(z):
                return (np.logaddexp(0.0, -y_i * (a_i @ z)) +
                        0.05 * (z @ z))

            npt.assert_allclose(_finite_difference(loss, x),
                                objective.example_gradient(i, x),
                                atol=1e-6)

    def test_full_gradient_matches_finite_differences(self):
        objective = oracles.LogisticObjective(self.dataset, reg=0.01)
        x = np.array([-0.4, 0.9, 0.2])
        npt.assert_allclose(_finite_difference(objective.value, x),
                            objective.gradient(x), atol=1e-5)
        npt.assert_allclose(
            np.mean([objective.example_gradient(i, x)
                     for i in range(objective.count)], axis=0),
            objective.gradient(x), atol=1e-12)

    def test_index_out_of_range(self):
        objective = oracles.LogisticObjective(self.dataset)
        for i in (-1, 4):
            self.assertRaises(exceptions.ExampleIndexOutOfRange,
                              oracles.logistic_single_grad, objective, i,
                              np.zeros(3))

    def test_lipschitz_estimate(self):
        features = np.array([[2.0, 0.0], [0.0, -2.0], [np.sqrt(2)] * 2])
        dataset = oracles.Dataset(features=features, labels=[1, -1, 1])
        objective = oracles.LogisticObjective(dataset, reg=0.1)
        self.assertAlmostEqual(1.1, oracles.lipschitz_estimate(objective))

    def test_lipschitz_bound_holds(self):
        objective = oracles.LogisticObjective(self.dataset, reg=0.2)
        bound = oracles.lipschitz_estimate(objective)
        rng = np.random.default_rng(2)
        for _ in range(100):
            x, z = rng.standard_normal((2, 3)) * 3
            i = int(rng.integers(objective.count))
            self.assertLessEqual(
                np.linalg.norm(objective.example_gradient(i, x) -
                               objective.example_gradient(i, z)),
                bound * np.linalg.norm(x - z) + 1e-12)

    def test_rejects_invalid_labels_and_reg(self):
        self.assertRaises(exceptions.InvalidParameter, oracles.Dataset,
                          features=[[1.0]], labels=[2])
        self.assertRaises(exceptions.DimensionMismatch, oracles.Dataset,
                          features=[[1.0], [2.0]], labels=[1])
        self.assertRaises(exceptions.InvalidParameter,
                          oracles.LogisticObjective, self.dataset, reg=-1)

    def test_minimizer_is_stationary_and_cached(self):
        objective = oracles.LogisticObjective(self.dataset, reg=0.1)
        x_star = oracles.logistic_minimizer(objective)
        self.assertLessEqual(np.linalg.norm(objective.gradient(x_star)),
                             1e-10)
        with mock.patch.object(objective, 'gradient') as gradient:
            npt.assert_array_equal(x_star,
                                   oracles.logistic_minimizer(objective))
            gradient.assert_not_called()


class TestNoisyQuery(unittest.TestCase):

    def test_zero_noise_is_exact(self):
        sample = oracles.noisy_query([1.0, -2.0],
                                     oracles.NoiseModel(sigma=0.0),
                                     np.random.default_rng(0))
        npt.assert_array_equal([1.0, -2.0], sample.gradient)
        self.assertEqual(1, sample.calls)

    def test_fixed_seed_is_reproducible(self):
        noise = oracles.NoiseModel(sigma=3.0)
        first = oracles.noisy_query(np.ones(4), noise,
                                    np.random.default_rng(42))
        second = oracles.noisy_query(np.ones(4), noise,
                                     np.random.default_rng(42))
        npt.assert_array_equal(first.gradient, second.gradient)

    def test_consumes_exactly_d_draws(self):
        rng = np.random.default_rng(5)
        reference = np.random.default_rng(5)
        oracles.noisy_query(np.zeros(3), oracles.NoiseModel(sigma=1.0), rng)
        reference.standard_normal(3)
        self.assertEqual(reference.standard_normal(),
                         rng.standard_normal())

    def test_sample_mean_and_independence(self):
        count, sigma = 100000, 2.0
        rng = np.random.default_rng(7)
        noise = oracles.NoiseModel(sigma=sigma)
        true_grad = np.array([1.0, -3.0])
        samples = np.array([oracles.noisy_query(true_grad, noise, rng).gradient
                            for _ in range(count)])
        deviation = np.abs(samples.mean(axis=0) - true_grad)
        self.assertTrue(np.all(deviation <= 4 * sigma / np.sqrt(count)))
        w = (samples - true_grad)[:, 0] / sigma
        correlation = np.mean(w[1:] * w[:-1])
        self.assertLessEqual(abs(correlation), 4 / np.sqrt(count))

    def test_negative_sigma(self):
        self.assertRaises(exceptions.InvalidParameter, oracles.NoiseModel,
                          sigma=-1.0)


class TestGradientOracle(unittest.TestCase):

    def test_quadratic_oracle(self):
        objective = oracles.QuadraticObjective(eigenvalues=[1.0, 0.5])
        oracle = oracles.GradientOracle(objective,
                                        oracles.NoiseModel(sigma=0.0))
        self.assertFalse(oracle.is_finite_sum)
        sample = oracle.query(np.array([2.0, 2.0]),
                              np.random.default_rng(0))
        npt.assert_allclose([2.0, 1.0], sample.gradient)
        npt.assert_array_equal([0.0, 0.0], oracle.minimizer)
        self.assertEqual(1.0, oracle.lipschitz)

    def test_logistic_oracle_samples_one_example(self):
        objective = oracles.LogisticObjective(_toy_dataset())
        oracle = oracles.GradientOracle(objective)
        self.assertTrue(oracle.is_finite_sum)
        x = np.array([0.1, 0.2, 0.3])
        rng = np.random.default_rng(3)
        expected_index = int(np.random.default_rng(3).integers(4))
        npt.assert_array_equal(objective.example_gradient(expected_index, x),
                               oracle.query(x, rng).gradient)


class TestLibsvm(unittest.TestCase):

    def test_parse_line(self):
        dataset = oracles.parse_libsvm(b"+1 1:0.5 3:-2\n")
        npt.assert_array_equal([[0.5, 0.0, -2.0]], dataset.features)
        npt.assert_array_equal([1.0], dataset.labels)
        self.assertEqual(3, dataset.dimension)

    def test_zero_label_maps_to_minus_one(self):
        dataset = oracles.parse_libsvm("0 2:1\n1 1:1\n")
        npt.assert_array_equal([-1.0, 1.0], dataset.labels)
        npt.assert_array_equal([[0.0, 1.0], [1.0, 0.0]], dataset.features)

    def test_other_binary_labels(self):
        dataset = oracles.parse_libsvm("1 1:1\n2 2:1\n2 1:3\n")
        npt.assert_array_equal([-1.0, 1.0, 1.0], dataset.labels)

    def test_comments_and_blank_lines(self):
        text = "# header\n\n-1 1:2 # trailing\n+1 2:4\n"
        dataset = oracles.parse_libsvm(text)
        self.assertEqual(2, dataset.count)
        npt.assert_array_equal([[2.0, 0.0], [0.0, 4.0]], dataset.features)

    def test_parse_errors_name_the_line(self):
        cases = (("1 2:a\n", 1),
                 ("1 1:1\n-1 3:1 2:1\n", 2),
                 ("1 1:1\nx 1:1\n", 2),
                 ("1 1:1\n1 0:5\n", 2),
                 ("1 1:1\n\n1 2\n", 3))
        for text, line in cases:
            with self.assertRaises(exceptions.LibsvmParseError) as ctx:
                oracles.parse_libsvm(text)
            self.assertEqual(line, ctx.exception.kwargs['line'])

    def test_multiclass_labels(self):
        self.assertRaises(exceptions.LibsvmParseError,
                          oracles.parse_libsvm, "1 1:1\n2 1:1\n3 1:1\n")

    def test_round_trip(self):
        dataset = oracles.Dataset(
            features=[[0.1, 0.0, 1e-17], [0.0, -3.25, 2.0 / 3]],
            labels=[-1, 1])
        parsed = oracles.parse_libsvm(oracles.serialize_libsvm(dataset))
        npt.assert_array_equal(dataset.features, parsed.features)
        npt.assert_array_equal(dataset.labels, parsed.labels)

    def test_round_trip_keeps_trailing_zero_columns(self):
        dataset = oracles.Dataset(features=[[1.0, 0.0], [2.0, 0.0]],
                                  labels=[1, -1])
        text = oracles.serialize_libsvm(dataset)
        self.assertEqual("+1 1:1.0 2:0.0\n-1 1:2.0 2:0.0\n", text)
        parsed = oracles.parse_libsvm(text)
        self.assertEqual((2, 2), parsed.features.shape)
        npt.assert_array_equal(dataset.features, parsed.features)

    def test_explicit_dimension(self):
        dataset = oracles.parse_libsvm("+1 1:1\n-1 2:1\n", dimension=4)
        npt.assert_array_equal([[1.0, 0.0, 0.0, 0.0],
                                [0.0, 1.0, 0.0, 0.0]], dataset.features)
        with self.assertRaises(exceptions.LibsvmParseError) as ctx:
            oracles.parse_libsvm("+1 1:1\n-1 3:1\n", dimension=2)
        self.assertEqual(2, ctx.exception.kwargs['line'])

    def test_load_libsvm(self):
        directory = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, directory)
        path = os.path.join(directory, 'toy.libsvm')
        with open(path, 'w') as fh:
            fh.write("+1 1:1 2:2\n-1 2:1\n")
        dataset = oracles.load_libsvm(path)
        self.assertEqual((2, 2), dataset.features.shape)

    def test_load_missing_file(self):
        with self.assertRaises(exceptions.DatasetFileError) as ctx:
            oracles.load_libsvm('/nonexistent/coco/data.libsvm')
        self.assertIsInstance(ctx.exception, exceptions.CocoDataException)
